"""Biphoton spectral amplitudes, Gaussian filters, and collective coordinates.

All frequencies are angular detunings in rad/s relative to the degeneracy
frequency, which is the origin of every axis. Wavelength figures are
converted at ingestion with wavelength_to_angular.

The pair state is a joint spectral amplitude JSA(w_s, w_i). Two factorized
backings are supported: a Gaussian pump envelope f_plus(w_plus) times a
phase-matching amplitude f_minus(w_minus), and a strict energy-conservation
pump (a delta line in w_plus) under which every downstream computation
reduces to a one-dimensional amplitude over the collective detuning. A
grid-sampled backing over (w_s, w_i) is kept for cross-checks of the reduced
pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.constants import c as _SPEED_OF_LIGHT

from .axes import FrequencyAxis
from .errors import ValidationError

__all__ = [
    "wavelength_to_angular",
    "to_collective",
    "to_pair",
    "GaussianLobe",
    "GaussianFilter",
    "filter_product_collective",
    "collective_marking_lobe",
    "collective_transmission_lobe",
    "PumpEnvelope",
    "PhaseMatching",
    "GaussianPhaseMatching",
    "TwoLobePhaseMatching",
    "FlatPhaseMatching",
    "SampledPhaseMatching",
    "BiphotonSpectralState",
]

_EDGE_FRACTION = 0.05
_EDGE_ENERGY_TOL = 1e-6


def wavelength_to_angular(lambda_center_m: float, delta_lambda_m: float) -> float:
    """Convert a wavelength span to an angular-frequency span.

    Returns 2*pi*c*delta_lambda/lambda_center**2, the differential of
    omega = 2*pi*c/lambda at the carrier wavelength.
    """
    if not (lambda_center_m > 0.0 and math.isfinite(lambda_center_m)):
        raise ValidationError("lambda_center_m must be positive")
    if not (delta_lambda_m >= 0.0 and math.isfinite(delta_lambda_m)):
        raise ValidationError("delta_lambda_m must be nonnegative")
    return 2.0 * math.pi * _SPEED_OF_LIGHT * delta_lambda_m / lambda_center_m**2


def to_collective(omega_s, omega_i):
    """Map pair frequencies to collective ones: (w_s+w_i, w_s-w_i)."""
    return omega_s + omega_i, omega_s - omega_i


def to_pair(omega_plus, omega_minus):
    """Inverse of to_collective.

    Exact in floating point whenever both forward sums were exact; in
    general the recovered components carry a rounding error bounded by the
    precision of the larger coordinate.
    """
    return 0.5 * (omega_plus + omega_minus), 0.5 * (omega_plus - omega_minus)


@dataclass(frozen=True)
class GaussianLobe:
    """Gaussian spectral amplitude exp(-(w-center)^2/(2 width^2)).

    phase_slope (seconds) multiplies the lobe by exp(1j*phase_slope*w),
    a linear spectral phase, i.e. a time translation of the wavepacket.
    amplitude is a real scale factor.
    """

    center: float
    width: float
    phase_slope: float = 0.0
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ValidationError("lobe width must be positive and finite")
        for name in ("center", "phase_slope", "amplitude"):
            if not math.isfinite(getattr(self, name)):
                raise ValidationError(f"lobe {name} must be finite")

    def evaluate(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        gauss = self.amplitude * np.exp(
            -((omega - self.center) ** 2) / (2.0 * self.width**2)
        )
        if self.phase_slope != 0.0:
            return gauss * np.exp(1j * self.phase_slope * omega)
        return gauss

    def l2_norm_sq(self) -> float:
        return self.amplitude**2 * math.sqrt(math.pi) * self.width


def _lobe_inner_product(a: GaussianLobe, b: GaussianLobe) -> complex:
    """<a|b> = integral of conj(a(w)) b(w) dw for equal-width lobes."""
    if not math.isclose(a.width, b.width, rel_tol=1e-12):
        raise ValidationError("inner product implemented for equal widths only")
    w = a.width
    ds = b.phase_slope - a.phase_slope
    sep = a.center - b.center
    mid = 0.5 * (a.center + b.center)
    mag = (
        a.amplitude
        * b.amplitude
        * math.sqrt(math.pi)
        * w
        * math.exp(-(sep**2) / (4.0 * w**2))
        * math.exp(-(ds**2) * w**2 / 4.0)
    )
    return mag * complex(math.cos(ds * mid), math.sin(ds * mid))


@dataclass(frozen=True)
class GaussianFilter:
    """Spectral filter passband; a zero-phase GaussianLobe."""

    lobe: GaussianLobe

    def __post_init__(self) -> None:
        if self.lobe.phase_slope != 0.0:
            raise ValidationError("filter passbands carry no spectral phase")

    @property
    def center(self) -> float:
        return self.lobe.center

    @property
    def width(self) -> float:
        return self.lobe.width

    def evaluate(self, omega) -> np.ndarray:
        return self.lobe.evaluate(omega)


def _require_equal_widths(f1: GaussianFilter, f2: GaussianFilter) -> float:
    if not math.isclose(f1.width, f2.width, rel_tol=1e-12):
        raise ValidationError(
            f"filter widths differ ({f1.width!r} vs {f2.width!r}); "
            "equal widths are required"
        )
    return f1.width


def filter_product_collective(
    f1: GaussianFilter, f2: GaussianFilter
) -> Tuple[GaussianLobe, GaussianLobe]:
    """Factor the passband product into collective-coordinate lobes.

    f1(w_s)*f2(w_i) equals lobe_minus(w_s-w_i)*lobe_plus(w_s+w_i) pointwise,
    with both collective lobes centered at center1 -/+ center2 and carrying
    exponent denominator 4 sigma^2 (width scaled by sqrt(2)).
    """
    sigma = _require_equal_widths(f1, f2)
    w = math.sqrt(2.0) * sigma
    lobe_minus = GaussianLobe(
        center=f1.center - f2.center,
        width=w,
        amplitude=f1.lobe.amplitude * f2.lobe.amplitude,
    )
    lobe_plus = GaussianLobe(center=f1.center + f2.center, width=w)
    return lobe_minus, lobe_plus


def collective_marking_lobe(f1: GaussianFilter, f2: GaussianFilter) -> GaussianLobe:
    """Collective profile post-selected by coincidences behind the filters.

    Each detector keeps its own filter in both exchange branches of a
    coincidence, so the collective detuning of every detected pair is drawn
    to center1 - center2 with the filters' own width. This is the lobe whose
    delayed superposition produces the beating trace, the displaced terms of
    the cat decomposition, and the time-resolved fringe envelope.
    """
    sigma = _require_equal_widths(f1, f2)
    return GaussianLobe(center=f1.center - f2.center, width=sigma)


def collective_transmission_lobe(
    f1: GaussianFilter, f2: GaussianFilter
) -> GaussianLobe:
    """Joint transmission envelope of the filter pair on the collective axis.

    Width sigma/sqrt(2) at the separation center1 - center2, scaled by the
    passbands' mutual overlap exp(-(center1-center2)^2/(4 sigma^2)). Its
    Fourier transform is the joint temporal envelope of a filtered
    anti-correlated pair; see the time-resolved module.
    """
    sigma = _require_equal_widths(f1, f2)
    sep = f1.center - f2.center
    return GaussianLobe(
        center=sep,
        width=sigma / math.sqrt(2.0),
        amplitude=f1.lobe.amplitude
        * f2.lobe.amplitude
        * math.exp(-(sep**2) / (4.0 * sigma**2)),
    )


@dataclass(frozen=True)
class PumpEnvelope:
    """Pump spectral envelope f_plus over w_plus.

    mode "strict_delta" imposes exact energy conservation (w_i = -w_s) and
    switches every consumer to the reduced one-dimensional representation.
    mode "gaussian" is a Gaussian of the given width.
    """

    mode: str
    width: float = 0.0

    def __post_init__(self) -> None:
        if self.mode not in ("strict_delta", "gaussian"):
            raise ValidationError(f"unknown pump mode {self.mode!r}")
        if self.mode == "gaussian" and not (
            self.width > 0.0 and math.isfinite(self.width)
        ):
            raise ValidationError("gaussian pump width must be positive")

    @classmethod
    def strict_delta(cls) -> "PumpEnvelope":
        return cls(mode="strict_delta")

    @classmethod
    def gaussian(cls, width: float) -> "PumpEnvelope":
        return cls(mode="gaussian", width=width)

    @property
    def is_strict(self) -> bool:
        return self.mode == "strict_delta"

    def evaluate(self, omega_plus) -> np.ndarray:
        if self.is_strict:
            raise ValidationError(
                "a strict-delta pump has no pointwise value; use the reduced "
                "representation of the state"
            )
        omega_plus = np.asarray(omega_plus, dtype=float)
        return np.exp(-(omega_plus**2) / (2.0 * self.width**2))


class PhaseMatching:
    """Phase-matching amplitude f_minus over the collective detuning."""

    def evaluate(self, omega) -> np.ndarray:
        raise NotImplementedError

    def sample(self, axis: FrequencyAxis) -> np.ndarray:
        values = np.asarray(self.evaluate(axis.samples))
        return values.astype(complex, copy=False)

    def support_scale(self) -> Optional[float]:
        """Half-width that captures the amplitude, or None if unbounded."""
        return None

    def l2_norm_sq(self) -> Optional[float]:
        """Analytic squared L2 norm when available."""
        return None

    def scaled(self, factor: float) -> "PhaseMatching":
        raise ValidationError(
            f"{type(self).__name__} does not support amplitude rescaling"
        )


@dataclass(frozen=True)
class GaussianPhaseMatching(PhaseMatching):
    """Gaussian f_minus of the given width, centered at zero."""

    width: float
    amplitude: float = 1.0

    def __post_init__(self) -> None:
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ValidationError("phase-matching width must be positive")

    def evaluate(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return self.amplitude * np.exp(-(omega**2) / (2.0 * self.width**2))

    def support_scale(self) -> float:
        return 6.0 * self.width

    def l2_norm_sq(self) -> float:
        return self.amplitude**2 * math.sqrt(math.pi) * self.width

    def scaled(self, factor: float) -> "GaussianPhaseMatching":
        return replace(self, amplitude=self.amplitude * factor)


@dataclass(frozen=True)
class TwoLobePhaseMatching(PhaseMatching):
    """Superposition lobe_a + relative_sign * lobe_b (a cat-like amplitude)."""

    lobe_a: GaussianLobe
    lobe_b: GaussianLobe
    relative_sign: int = 1

    def __post_init__(self) -> None:
        if self.relative_sign not in (-1, 1):
            raise ValidationError("relative_sign must be +1 or -1")

    def evaluate(self, omega) -> np.ndarray:
        return self.lobe_a.evaluate(omega) + self.relative_sign * self.lobe_b.evaluate(
            omega
        )

    def support_scale(self) -> float:
        return (
            max(abs(self.lobe_a.center), abs(self.lobe_b.center))
            + 6.0 * max(self.lobe_a.width, self.lobe_b.width)
        )

    def l2_norm_sq(self) -> float:
        cross = _lobe_inner_product(self.lobe_a, self.lobe_b)
        return (
            self.lobe_a.l2_norm_sq()
            + self.lobe_b.l2_norm_sq()
            + 2.0 * self.relative_sign * cross.real
        )

    def scaled(self, factor: float) -> "TwoLobePhaseMatching":
        return replace(
            self,
            lobe_a=replace(self.lobe_a, amplitude=self.lobe_a.amplitude * factor),
            lobe_b=replace(self.lobe_b, amplitude=self.lobe_b.amplitude * factor),
        )


@dataclass(frozen=True)
class FlatPhaseMatching(PhaseMatching):
    """Unit amplitude everywhere: the broadband limit where the filters set
    every spectral scale. Not normalizable; valid only in filtered pipelines.
    """

    def evaluate(self, omega) -> np.ndarray:
        return np.ones_like(np.asarray(omega, dtype=float))


@dataclass(frozen=True, eq=False)
class SampledPhaseMatching(PhaseMatching):
    """Complex samples on a FrequencyAxis. No resampling is performed:
    evaluation is only allowed at grid points and sample() requires the
    same axis.
    """

    axis: FrequencyAxis
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.axis.n_samples,):
            raise ValidationError(
                "sampled phase matching needs one value per axis sample"
            )
        object.__setattr__(self, "values", values)
        energy = np.abs(values) ** 2
        total = float(energy.sum())
        if total == 0.0:
            raise ValidationError("sampled phase matching is identically zero")
        edge = max(1, int(round(_EDGE_FRACTION * self.axis.n_samples)))
        edge_energy = float(energy[:edge].sum() + energy[-edge:].sum())
        if edge_energy > _EDGE_ENERGY_TOL * total:
            raise ValidationError(
                "sampled phase matching is not band-limited within its axis "
                f"(edge energy fraction {edge_energy / total:.3e})"
            )

    def evaluate(self, omega) -> np.ndarray:
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.empty(omega.shape, dtype=complex)
        for k, value in enumerate(omega.ravel()):
            out.ravel()[k] = self.values[self.axis.index_of(value)]
        return out

    def sample(self, axis: FrequencyAxis) -> np.ndarray:
        if not self.axis.matches(axis):
            raise ValidationError(
                "sampled phase matching cannot be resampled onto a different axis"
            )
        return self.values.copy()

    def support_scale(self) -> float:
        return self.axis.half_width

    def l2_norm_sq(self) -> float:
        return float(np.trapezoid(np.abs(self.values) ** 2, dx=self.axis.spacing))

    def scaled(self, factor: float) -> "SampledPhaseMatching":
        return SampledPhaseMatching(axis=self.axis, values=self.values * factor)


@dataclass(frozen=True, eq=False)
class BiphotonSpectralState:
    """Joint spectral amplitude of a photon pair.

    Factorized backing: JSA(w_s, w_i) = f_plus(w_s+w_i) * f_minus(w_s-w_i).
    Grid backing: complex samples over a square (w_s, w_i) lattice.
    """

    pump: Optional[PumpEnvelope] = None
    pm: Optional[PhaseMatching] = None
    grid_axis_s: Optional[FrequencyAxis] = None
    grid_axis_i: Optional[FrequencyAxis] = None
    grid_values: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        factorized = self.pump is not None or self.pm is not None
        gridded = self.grid_values is not None
        if factorized == gridded:
            raise ValidationError(
                "state must be either factorized (pump and pm) or grid-backed"
            )
        if factorized and (self.pump is None or self.pm is None):
            raise ValidationError("factorized state needs both pump and pm")
        if gridded:
            if self.grid_axis_s is None or self.grid_axis_i is None:
                raise ValidationError("grid-backed state needs both axes")
            values = np.asarray(self.grid_values, dtype=complex)
            expected = (self.grid_axis_s.n_samples, self.grid_axis_i.n_samples)
            if values.shape != expected:
                raise ValidationError(
                    f"grid shape {values.shape} does not match axes {expected}"
                )
            object.__setattr__(self, "grid_values", values)

    @classmethod
    def factorized(
        cls, pump: PumpEnvelope, pm: PhaseMatching
    ) -> "BiphotonSpectralState":
        return cls(pump=pump, pm=pm)

    @classmethod
    def from_grid(
        cls, axis_s: FrequencyAxis, axis_i: FrequencyAxis, values: np.ndarray
    ) -> "BiphotonSpectralState":
        return cls(grid_axis_s=axis_s, grid_axis_i=axis_i, grid_values=values)

    @property
    def is_grid(self) -> bool:
        return self.grid_values is not None

    @property
    def is_strict(self) -> bool:
        return self.pump is not None and self.pump.is_strict

    def evaluate(self, omega_s, omega_i):
        """Pointwise JSA value.

        Grid-backed states interpolate bilinearly (exact at lattice nodes)
        and refuse out-of-bounds queries. Strict-delta states have no 2D
        pointwise value; use reduced_samples instead.
        """
        if self.is_grid:
            return self._evaluate_grid(omega_s, omega_i)
        if self.is_strict:
            raise ValidationError(
                "strict-delta states reduce to a 1D amplitude over the "
                "collective detuning; query reduced_samples(axis) instead"
            )
        w_plus, w_minus = to_collective(
            np.asarray(omega_s, dtype=float), np.asarray(omega_i, dtype=float)
        )
        return self.pump.evaluate(w_plus) * self.pm.evaluate(w_minus)

    def _evaluate_grid(self, omega_s, omega_i):
        axis_s, axis_i = self.grid_axis_s, self.grid_axis_i
        ws = np.asarray(omega_s, dtype=float)
        wi = np.asarray(omega_i, dtype=float)
        xs = (ws - (axis_s.center - axis_s.half_width)) / axis_s.spacing
        xi = (wi - (axis_i.center - axis_i.half_width)) / axis_i.spacing
        if np.any(xs < 0) or np.any(xs > axis_s.n_samples - 1) or np.any(
            xi < 0
        ) or np.any(xi > axis_i.n_samples - 1):
            raise ValidationError("query outside the grid bounds")
        i0 = np.clip(np.floor(xs).astype(int), 0, axis_s.n_samples - 2)
        j0 = np.clip(np.floor(xi).astype(int), 0, axis_i.n_samples - 2)
        fs = xs - i0
        fi = xi - j0
        v = self.grid_values
        out = (
            v[i0, j0] * (1 - fs) * (1 - fi)
            + v[i0 + 1, j0] * fs * (1 - fi)
            + v[i0, j0 + 1] * (1 - fs) * fi
            + v[i0 + 1, j0 + 1] * fs * fi
        )
        return out

    def norm_sq(self) -> float:
        """Squared L2 norm under the state's own convention.

        Grid: 2D trapezoid quadrature. Gaussian pump: the exact factorized
        integral (Jacobian one half). Strict delta: the L2 norm of the
        reduced amplitude over the collective detuning.
        """
        if self.is_grid:
            density = np.abs(self.grid_values) ** 2
            inner = np.trapezoid(density, dx=self.grid_axis_i.spacing, axis=1)
            return float(np.trapezoid(inner, dx=self.grid_axis_s.spacing))
        pm_norm = self.pm.l2_norm_sq()
        if pm_norm is None:
            raise ValidationError(
                f"{type(self.pm).__name__} has no finite norm; this state "
                "cannot be normalized"
            )
        if self.is_strict:
            return pm_norm
        pump_norm = math.sqrt(math.pi) * self.pump.width
        return 0.5 * pump_norm * pm_norm

    def normalize(self) -> "BiphotonSpectralState":
        n2 = self.norm_sq()
        if not (n2 > 0.0 and math.isfinite(n2)):
            raise ValidationError("cannot normalize a zero-norm state")
        factor = 1.0 / math.sqrt(n2)
        if self.is_grid:
            return BiphotonSpectralState.from_grid(
                self.grid_axis_s, self.grid_axis_i, self.grid_values * factor
            )
        return BiphotonSpectralState.factorized(self.pump, self.pm.scaled(factor))

    def reduced_samples(self, axis: FrequencyAxis) -> np.ndarray:
        """Reduced amplitude over the collective detuning (strict delta only)."""
        if not self.is_strict:
            raise ValidationError(
                "only strict-delta states have a reduced 1D representation"
            )
        return self.pm.sample(axis)
