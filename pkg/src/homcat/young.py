"""Spatial analog: a photon pair behind a double slit.

The collective transverse coordinate x (the difference of the two detection
positions) carries a cat-like amplitude: one lobe of width slit_width at
+d and its exchange partner at -d, d = x_a - x_b, under a broad source
envelope. The far field measures the conjugate momentum pbar, where the
even (bosonic) superposition produces bright-center fringes

    |A(pbar)|^2 (peak-normalized) = (1/2) e^{-pbar^2 w^2} (1 + cos(2 pbar d)),

the parity mirror of the delay-domain dip: same envelope, fringes shifted
by half a period. fractional_propagation interpolates between the
double-hump near field and these fringes by rotating the cat's closed-form
Wigner function, which is what a lens system at intermediate defocus
measures.

Propagation is treated in the Fraunhofer limit by default: the quadratic
Fresnel phase is dropped, which makes the trace independent of the screen
distance. That is only honest when the distance dominates the Rayleigh
range of the slit structure, so a ratio gate refuses near screens.
exact_fresnel keeps the quadratic phase for convergence studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import FarFieldError, GridResolutionError, ValidationError

__all__ = [
    "SlitConfig",
    "MomentumTrace",
    "FractionalTrace",
    "ParityReport",
    "young_joint_detection",
    "analytic_young",
    "fractional_propagation",
    "matched_parity_axis",
    "compare_parity",
]

_MIN_SOURCE_RATIO = 10.0
_DEFAULT_SOURCE_RATIO = 1e5
_FAR_FIELD_GATE = 100.0


@dataclass(frozen=True)
class SlitConfig:
    """Double-slit geometry on the collective transverse axis.

    slit_width is the Gaussian lobe width, x_a and x_b the slit positions
    (their difference sets the fringe frequency), source_width the pair
    source envelope on the collective axis (0 selects slit_width * 1e5,
    wide enough that the envelope never distorts the fringes at the
    tolerances used here), wavenumber the carrier k, screen_distance the
    propagation length used by the Fresnel factor and the far-field gate.
    """

    slit_width: float
    x_a: float
    x_b: float
    wavenumber: float
    screen_distance: float
    source_width: float = 0.0

    def __post_init__(self) -> None:
        if not (self.slit_width > 0.0 and math.isfinite(self.slit_width)):
            raise ValidationError("slit_width must be positive")
        for name in ("x_a", "x_b"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"{name} must be finite")
        if not (self.wavenumber > 0.0 and math.isfinite(self.wavenumber)):
            raise ValidationError("wavenumber must be positive")
        if not (self.screen_distance > 0.0 and math.isfinite(self.screen_distance)):
            raise ValidationError("screen_distance must be positive")
        if self.source_width == 0.0:
            object.__setattr__(
                self, "source_width", _DEFAULT_SOURCE_RATIO * self.slit_width
            )
        if self.source_width < _MIN_SOURCE_RATIO * self.slit_width:
            raise ValidationError(
                f"source_width must be at least {_MIN_SOURCE_RATIO:.0f}x the "
                "slit width; a narrower source washes out the slit structure"
            )

    @property
    def separation(self) -> float:
        return self.x_a - self.x_b

    def far_field_ratio(self) -> float:
        x_max = max(abs(self.x_a), abs(self.x_b)) + 5.0 * self.slit_width
        return self.screen_distance / (self.wavenumber * x_max**2)


@dataclass(frozen=True, eq=False)
class MomentumTrace:
    """Peak-normalized detection intensity over the collective momentum."""

    pbar: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.pbar.shape != self.values.shape:
            raise ValidationError("trace arrays must share one shape")


@dataclass(frozen=True, eq=False)
class FractionalTrace:
    """Rotated Wigner marginal over the dimensionless coordinate u."""

    u: np.ndarray
    values: np.ndarray
    theta: float


def _collective_amplitude(config: SlitConfig, x: np.ndarray) -> np.ndarray:
    d = config.separation
    w = config.slit_width
    lobes = np.exp(-((x - d) ** 2) / (2.0 * w**2)) + np.exp(
        -((x + d) ** 2) / (2.0 * w**2)
    )
    return lobes * np.exp(-(x**2) / (2.0 * config.source_width**2))


def young_joint_detection(
    config: SlitConfig,
    pbar: Optional[np.ndarray] = None,
    n_points: int = 801,
    exact_fresnel: bool = False,
    n_quad: int = 4097,
) -> MomentumTrace:
    """Far-field joint detection trace |A(pbar)|^2, peak-normalized.

    The default drops the Fresnel phase, which the far-field gate must
    license; exact_fresnel keeps exp(i k x^2 / (2 z)) in the diffraction
    integral (any distance, used to watch the Fraunhofer limit emerge).
    """
    if pbar is None:
        span = 5.0 / config.slit_width
        pbar = np.linspace(-span, span, n_points)
    else:
        pbar = np.asarray(pbar, dtype=float)
    if not exact_fresnel:
        ratio = config.far_field_ratio()
        if ratio < _FAR_FIELD_GATE:
            raise FarFieldError(
                f"screen at z = {config.screen_distance:.3e} m gives "
                f"z / (k x_max^2) = {ratio:.2f}; the Fraunhofer treatment "
                f"needs at least {_FAR_FIELD_GATE:.0f}. Move the screen out "
                "or request exact_fresnel"
            )
    if n_quad < 101 or n_quad % 2 == 0:
        raise ValidationError("n_quad must be an odd count of at least 101")
    x_half = abs(config.separation) + 10.0 * config.slit_width
    x = np.linspace(-x_half, x_half, n_quad)
    dx = x[1] - x[0]
    psi = _collective_amplitude(config, x).astype(complex)
    if exact_fresnel:
        phase_rate = (
            config.wavenumber * x_half / config.screen_distance
            + float(np.max(np.abs(pbar)))
        )
        if dx * phase_rate >= 0.5 * math.pi:
            raise GridResolutionError(
                f"the diffraction integrand advances {dx * phase_rate:.2f} rad "
                "per step; raise n_quad"
            )
        psi = psi * np.exp(
            1j * config.wavenumber * x**2 / (2.0 * config.screen_distance)
        )
    kernel = np.exp(-1j * np.multiply.outer(pbar, x))
    amplitude = kernel @ psi * dx
    values = np.abs(amplitude) ** 2
    peak = float(np.max(values))
    if peak <= 0.0:
        raise ValidationError("detection trace vanished; check the geometry")
    return MomentumTrace(pbar=pbar, values=values / peak)


def analytic_young(config: SlitConfig, pbar) -> np.ndarray:
    """Closed-form fringes (1/2) e^{-pbar^2 w^2} (1 + cos(2 pbar d)).

    Infinite-source limit of the peak-normalized far-field trace.
    """
    pbar = np.asarray(pbar, dtype=float)
    w = config.slit_width
    d = config.separation
    return 0.5 * np.exp(-(pbar**2) * w**2) * (1.0 + np.cos(2.0 * pbar * d))


def fractional_propagation(
    config: SlitConfig,
    theta: float,
    u: Optional[np.ndarray] = None,
    n_points: int = 801,
) -> FractionalTrace:
    """Closed-form rotated marginal of the slit cat's Wigner function.

    u is the dimensionless rotated coordinate (positions in slit widths at
    theta = 0, momenta times the slit width at theta = pi/2):

        P(u) = pi^{-1/2} [e^{-(u - D cos t)^2} + e^{-(u + D cos t)^2}
               + 2 e^{-u^2} e^{-D^2 cos^2 t} cos(2 D u sin t)],  D = d / w.

    theta = 0 is the near field (two humps, interference exponentially
    hidden), theta = pi/2 the far field (the Young fringes).
    """
    if not (0.0 <= theta <= 0.5 * math.pi):
        raise ValidationError("theta must lie in [0, pi/2]")
    if u is None:
        dd = abs(config.separation) / config.slit_width
        u = np.linspace(-(dd + 5.0), dd + 5.0, n_points)
    else:
        u = np.asarray(u, dtype=float)
    big_d = config.separation / config.slit_width
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    values = (
        np.exp(-((u - big_d * cos_t) ** 2))
        + np.exp(-((u + big_d * cos_t) ** 2))
        + 2.0
        * np.exp(-(u**2))
        * math.exp(-(big_d**2) * cos_t**2)
        * np.cos(2.0 * big_d * u * sin_t)
    ) / math.sqrt(math.pi)
    return FractionalTrace(u=u, values=values, theta=theta)


def matched_parity_axis(
    separation_ratio: float,
    span: float = 5.0,
    samples_per_half_period: int = 8,
) -> np.ndarray:
    """Dimensionless grid on which fringes of both parities stay aligned.

    The step divides the fringe half-period pi/(2 D) exactly, so shifting
    by half a period is an integer index shift and the parity comparison
    needs no interpolation.
    """
    if not (separation_ratio > 0.0 and math.isfinite(separation_ratio)):
        raise ValidationError("separation_ratio must be positive")
    if samples_per_half_period < 2:
        raise ValidationError("need at least 2 samples per half period")
    half_period = 0.5 * math.pi / separation_ratio
    du = half_period / samples_per_half_period
    n_side = int(math.ceil(span / du))
    return du * np.arange(-n_side, n_side + 1)


@dataclass(frozen=True)
class ParityReport:
    """Outcome of the delay-domain vs momentum-domain parity comparison."""

    separation_ratio: float
    hom_at_origin: float
    young_origin_deficit: float
    envelope_max_error: float
    fringe_shift_max_error: float

    @property
    def passes(self) -> bool:
        return (
            self.hom_at_origin <= 1e-12
            and self.young_origin_deficit <= 1e-12
            and self.envelope_max_error <= 1e-6
            and self.fringe_shift_max_error <= 1e-6
        )


def compare_parity(
    u: np.ndarray,
    hom_values: np.ndarray,
    young_values: np.ndarray,
    hom_separation_ratio: float,
    young_separation_ratio: float,
) -> ParityReport:
    """Check that the two experiments are the two parities of one cat.

    Inputs are dimensionless traces over one shared grid u: the delay trace
    in its (1/2) e^{-u^2} (1 - cos) scaling and the peak-normalized
    momentum trace. The report measures the dark origin of one, the bright
    origin of the other, the envelope identity hom + young = e^{-u^2}, and
    the half-period fringe shift between the envelope-divided fringes.
    """
    u = np.asarray(u, dtype=float)
    hom_values = np.asarray(hom_values, dtype=float)
    young_values = np.asarray(young_values, dtype=float)
    if u.shape != hom_values.shape or u.shape != young_values.shape:
        raise ValidationError("parity comparison needs traces on one grid")
    if not math.isclose(
        hom_separation_ratio, young_separation_ratio, rel_tol=1e-9
    ):
        raise ValidationError(
            f"separation ratios differ ({hom_separation_ratio!r} vs "
            f"{young_separation_ratio!r}); the cats are not congruent"
        )
    if u.size < 5:
        raise ValidationError("parity comparison needs at least 5 samples")
    du = float(u[1] - u[0])
    if not np.allclose(np.diff(u), du, rtol=1e-9, atol=0.0):
        raise ValidationError("parity comparison needs a uniform grid")
    origin = int(np.argmin(np.abs(u)))
    if abs(u[origin]) > 1e-9 * du:
        raise ValidationError("the grid must contain u = 0")

    ratio = 0.5 * (hom_separation_ratio + young_separation_ratio)
    half_period = 0.5 * math.pi / ratio
    steps = half_period / du
    shift = int(round(steps))
    if shift < 1 or abs(steps - shift) > 1e-6:
        raise ValidationError(
            "the grid step does not divide the fringe half-period; build the "
            "grid with matched_parity_axis"
        )

    envelope = np.exp(-(u**2))
    envelope_err = float(np.max(np.abs(hom_values + young_values - envelope)))

    # Envelope division amplifies absolute noise in the tails, so the fringe
    # comparison is confined to where the envelope is appreciable.
    core = np.abs(u) <= 3.0
    fringe_hom = np.where(core, hom_values, 0.0) / envelope
    fringe_young = np.where(core, young_values, 0.0) / envelope
    idx = np.arange(u.size - shift)
    both = core[idx + shift] & core[idx]
    shift_err = float(
        np.max(np.abs(fringe_young[idx + shift][both] - fringe_hom[idx][both]))
    )

    return ParityReport(
        separation_ratio=ratio,
        hom_at_origin=float(abs(hom_values[origin])),
        young_origin_deficit=float(np.max(young_values) - young_values[origin]),
        envelope_max_error=envelope_err,
        fringe_shift_max_error=shift_err,
    )
