"""Chirped-pump engineering of the collective spectral phase.

A pump with longitudinal amplitude A(z) = e^{-z^2/(2 waist^2)} e^{i z^2/a^2}
writes its Fourier transform onto the collective axis through the group
velocity: f(omega) is the integral of A(z) e^{i omega z / v_g}. The
quadratic z-phase (chirp parameter a, curvature 1/a^2) becomes a quadratic
spectral phase, and a quadratic spectral phase shears the chronocyclic
Wigner map in frequency:

    W_chirped(omega, t) = W_unchirped(omega - s t, t),  s = -2 v_g^2 / a^2,

exactly, including the shared peak normalization. The shear converts delay
into frequency displacement: the delay-domain coincidence cut of a chirped
configuration reads out the unchirped map along the line omega = -s tau,
which is what scan_cuts exploits to tomograph the map from coincidence
traces alone.

verify_shear avoids interpolation by designing a time lattice on which the
candidate shear moves the map by integer column counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from .axes import FrequencyAxis, TimeAxis
from .errors import (
    GridResolutionError,
    NumericRegimeError,
    NyquistLimitError,
    ValidationError,
)
from .interferometer import FilterPlacement, HomConfig, hom_trace
from .spectral import BiphotonSpectralState, PhaseMatching, PumpEnvelope
from .wigner import ChronocyclicMap, chronocyclic_w_minus, wigner_cut

__all__ = [
    "PumpProfile",
    "PumpDerivedPhaseMatching",
    "ShearReport",
    "CutScan",
    "pump_amplitude",
    "pump_spectral_amplitude",
    "phase_matching_from_pump",
    "pump_from_phase_matching",
    "verify_shear",
    "scan_cuts",
]

_Z_REACH = 7.0
_NYQUIST_SAFETY = 0.25
_MIN_NZ = 257
_EDGE_FRACTION = 0.05
_EDGE_ENERGY_TOL = 1e-6


@dataclass(frozen=True)
class PumpProfile:
    """Longitudinal pump: Gaussian waist, group velocity, chirp length a.

    chirp = 0 means no quadratic phase; otherwise the curvature is 1/a^2.
    """

    waist: float
    group_velocity: float
    chirp: float = 0.0

    def __post_init__(self) -> None:
        if not (self.waist > 0.0 and math.isfinite(self.waist)):
            raise ValidationError("pump waist must be positive")
        if not (self.group_velocity > 0.0 and math.isfinite(self.group_velocity)):
            raise ValidationError("group velocity must be positive")
        if not (self.chirp >= 0.0 and math.isfinite(self.chirp)):
            raise ValidationError("chirp length must be nonnegative")

    @property
    def curvature(self) -> float:
        return 0.0 if self.chirp == 0.0 else 1.0 / self.chirp**2

    @property
    def spectral_width(self) -> float:
        """Width of |f|: v_g/waist, broadened by the chirp."""
        base = self.group_velocity / self.waist
        ratio = 2.0 * self.waist**2 * self.curvature
        return base * math.sqrt(1.0 + ratio**2)

    @property
    def shear_slope(self) -> float:
        """-2 v_g^2 / a^2: the map shear written by this chirp."""
        return -2.0 * self.group_velocity**2 * self.curvature


def pump_amplitude(profile: PumpProfile, z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    gauss = np.exp(-(z**2) / (2.0 * profile.waist**2))
    if profile.curvature == 0.0:
        return gauss.astype(complex)
    return gauss * np.exp(1j * profile.curvature * z**2)


def _phase_rate(profile: PumpProfile, omega_max: float) -> float:
    z_max = _Z_REACH * profile.waist
    return omega_max / profile.group_velocity + 2.0 * profile.curvature * z_max


def _auto_nz(profile: PumpProfile, omega_max: float) -> int:
    z_max = _Z_REACH * profile.waist
    rate = _phase_rate(profile, omega_max)
    n = int(math.ceil(2.0 * z_max * rate / (_NYQUIST_SAFETY * math.pi))) + 1
    n = max(n, _MIN_NZ)
    return n if n % 2 == 1 else n + 1


def pump_spectral_amplitude(
    profile: PumpProfile, omegas, n_z: Optional[int] = None
) -> np.ndarray:
    """f(omega) = integral over z of A(z) e^{i omega z / v_g}.

    Trapezoid quadrature over +-7 waists. n_z defaults to a count that
    keeps the integrand phase well under pi per step; explicit counts that
    alias are refused.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    omega_max = float(np.max(np.abs(omegas))) if omegas.size else 0.0
    if n_z is None:
        n_z = _auto_nz(profile, omega_max)
    if n_z < 9 or n_z % 2 == 0:
        raise ValidationError("n_z must be an odd count of at least 9")
    z_max = _Z_REACH * profile.waist
    dz = 2.0 * z_max / (n_z - 1)
    rate = _phase_rate(profile, omega_max)
    if dz * rate >= math.pi:
        raise NyquistLimitError(
            f"z step {dz:.3e} m advances the integrand phase by "
            f"{dz * rate:.2f} rad; raise n_z above {_auto_nz(profile, omega_max)}"
        )
    z = np.linspace(-z_max, z_max, n_z)
    weights = np.full(n_z, dz)
    weights[0] = weights[-1] = 0.5 * dz
    amp = pump_amplitude(profile, z) * weights
    kernel = np.exp(1j * np.multiply.outer(omegas, z / profile.group_velocity))
    return kernel @ amp


@dataclass(frozen=True, eq=False)
class PumpDerivedPhaseMatching(PhaseMatching):
    """Collective amplitude written by a pump profile, unit peak magnitude.

    Samples are stored on the construction axis; evaluation elsewhere
    repeats the same quadrature, so off-axis queries (wider map axes) stay
    consistent with the stored samples.
    """

    profile: PumpProfile
    axis: FrequencyAxis
    values: np.ndarray
    scale: float
    n_z: int
    amplitude: float = 1.0

    def evaluate(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        omega_max = float(np.max(np.abs(omega))) if omega.size else 0.0
        n_z = max(self.n_z, _auto_nz(self.profile, omega_max))
        raw = pump_spectral_amplitude(self.profile, omega, n_z=n_z)
        return (self.amplitude * self.scale) * raw.reshape(omega.shape)

    def sample(self, axis: FrequencyAxis) -> np.ndarray:
        if self.axis.matches(axis):
            return self.amplitude * self.values
        return self.evaluate(axis.samples).astype(complex, copy=False)

    def support_scale(self) -> float:
        return self.axis.half_width

    def l2_norm_sq(self) -> float:
        return self.amplitude**2 * float(
            np.trapezoid(np.abs(self.values) ** 2, dx=self.axis.spacing)
        )

    def scaled(self, factor: float) -> "PumpDerivedPhaseMatching":
        return replace(self, amplitude=self.amplitude * factor)


def phase_matching_from_pump(
    profile: PumpProfile, axis: FrequencyAxis, n_z: Optional[int] = None
) -> PumpDerivedPhaseMatching:
    """Sample the pump-written collective amplitude on an axis.

    The samples are scaled to unit peak magnitude. The axis must contain
    the amplitude: spectral energy at the edges means the chirp broadened
    |f| past the grid.
    """
    if n_z is None:
        n_z = _auto_nz(profile, axis.half_width + abs(axis.center))
    raw = pump_spectral_amplitude(profile, axis.samples, n_z=n_z)
    peak = float(np.max(np.abs(raw)))
    if peak <= 0.0:
        raise ValidationError("pump transform vanished on this axis")
    values = raw / peak
    energy = np.abs(values) ** 2
    total = float(energy.sum())
    edge = max(1, int(round(_EDGE_FRACTION * axis.n_samples)))
    frac = float(energy[:edge].sum() + energy[-edge:].sum()) / total
    if frac > _EDGE_ENERGY_TOL:
        raise ValidationError(
            f"pump spectrum leaks {frac:.3e} of its energy past the axis "
            f"(chirp-broadened width {profile.spectral_width:.3e} rad/s); "
            "widen the axis"
        )
    return PumpDerivedPhaseMatching(
        profile=profile, axis=axis, values=values, scale=1.0 / peak, n_z=n_z
    )


def pump_from_phase_matching(
    pm: PumpDerivedPhaseMatching, z_values
) -> np.ndarray:
    """Longitudinal profile recovered from the collective amplitude.

    A(z) = (2 pi v_g)^{-1} integral f(omega) e^{-i omega z / v_g} d omega
    over the stored axis; equals the original pump up to the stored peak
    normalization.
    """
    z_values = np.atleast_1d(np.asarray(z_values, dtype=float))
    v_g = pm.profile.group_velocity
    kernel = np.exp(-1j * np.multiply.outer(z_values / v_g, pm.axis.samples))
    return (pm.axis.spacing / (2.0 * math.pi * v_g)) * (kernel @ pm.values)


@dataclass(frozen=True, eq=False)
class ShearReport:
    """Measured shear of a chirped map against its unchirped reference."""

    chirp: float
    slope_candidate: float
    slope_fit: float
    fit_r2: float
    max_pointwise_error: float
    t_axis: TimeAxis

    @property
    def passes(self) -> bool:
        return self.max_pointwise_error < 1e-3


def _design_time_axis(
    slope: float, omega_axis: FrequencyAxis, t_half: float, n_t: int
) -> TimeAxis:
    """Lattice on which slope * t is an integer count of frequency steps."""
    if n_t < 5:
        raise ValidationError("need at least 5 time samples")
    dw = omega_axis.spacing
    dt0 = 2.0 * t_half / (n_t - 1)
    if slope == 0.0:
        n_side = (n_t - 1) // 2
        return TimeAxis(0.0, dt0 * n_side, 2 * n_side + 1)
    m = max(1, int(round(abs(slope) * dt0 / dw)))
    dt = m * dw / abs(slope)
    n_side = int(math.floor(t_half / dt))
    if n_side < 2:
        raise GridResolutionError(
            f"shear slope {slope:.3e} rad/s^2 moves the map {m} columns per "
            "time step; refine the frequency axis to resolve it"
        )
    return TimeAxis(0.0, dt * n_side, 2 * n_side + 1)


def _centroid_slope(cmap: ChronocyclicMap) -> Tuple[float, float]:
    """Least-squares slope of the per-row positive-mass centroid, with R^2."""
    vals = np.clip(cmap.values, 0.0, None)
    mass = vals.sum(axis=1)
    keep = mass > 1e-9 * float(np.max(mass))
    if int(keep.sum()) < 3:
        raise NumericRegimeError("too few massive rows to fit a shear slope")
    t = cmap.t_axis.samples[keep]
    centroids = (vals[keep] @ cmap.omega_axis.samples) / mass[keep]
    slope, intercept = np.polyfit(t, centroids, 1)
    predicted = slope * t + intercept
    ss_res = float(np.sum((centroids - predicted) ** 2))
    ss_tot = float(np.sum((centroids - centroids.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def verify_shear(
    profile: PumpProfile,
    omega_axis: FrequencyAxis,
    n_t: int = 161,
    t_half: Optional[float] = None,
    n_z: Optional[int] = None,
) -> ShearReport:
    """Measure the map shear of a chirped pump against -2 v_g^2 / a^2.

    Builds the chirped and unchirped maps on a lattice where the candidate
    shear is an integer column shift per row, fits the per-row centroid
    drift, and reports the maximum pointwise difference between the chirped
    map and the column-shifted reference (shift integers taken from the
    fitted slope). Maps are peak-1 normalized, so the error is absolute.
    """
    base_width = profile.group_velocity / profile.waist
    if t_half is None:
        t_half = 4.0 / base_width
    slope = profile.shear_slope
    reach = abs(slope) * t_half + 6.0 * profile.spectral_width
    if reach > omega_axis.half_width:
        raise GridResolutionError(
            f"the shear sweeps the map to |omega| ~ {reach:.3e} rad/s but the "
            f"axis ends at {omega_axis.half_width:.3e} rad/s; widen the axis "
            "or shorten the time span"
        )
    t_axis = _design_time_axis(slope, omega_axis, t_half, n_t)

    pm_chirped = phase_matching_from_pump(profile, omega_axis, n_z=n_z)
    pm_ref = phase_matching_from_pump(
        replace(profile, chirp=0.0), omega_axis, n_z=n_z
    )
    map_chirped = chronocyclic_w_minus(
        pm_chirped, omega_axis, t_axis, method="direct"
    )
    map_ref = chronocyclic_w_minus(pm_ref, omega_axis, t_axis, method="direct")

    slope_fit, r2 = _centroid_slope(map_chirped)

    dw = omega_axis.spacing
    n = omega_axis.n_samples
    worst = 0.0
    for k, t in enumerate(t_axis.samples):
        shift = int(round(slope_fit * t / dw))
        lo = max(0, shift)
        hi = min(n, n + shift)
        if hi <= lo:
            continue
        diff = map_chirped.values[k, lo:hi] - map_ref.values[k, lo - shift : hi - shift]
        worst = max(worst, float(np.max(np.abs(diff))))
    return ShearReport(
        chirp=profile.chirp,
        slope_candidate=slope,
        slope_fit=slope_fit,
        fit_r2=r2,
        max_pointwise_error=worst,
        t_axis=t_axis,
    )


@dataclass(frozen=True, eq=False)
class CutScan:
    """Delay-domain tomography of the unchirped map via chirped cuts."""

    chirps: Tuple[float, ...]
    slopes_candidate: np.ndarray
    slopes_fit: np.ndarray
    shear_reports: Tuple[ShearReport, ...]
    taus: np.ndarray
    traces: Tuple[np.ndarray, ...]
    reference_map: ChronocyclicMap
    recon_values: Tuple[np.ndarray, ...]
    direct_values: Tuple[np.ndarray, ...]
    recon_rel_l2: float


def scan_cuts(
    profiles: Sequence[PumpProfile],
    omega_axis: FrequencyAxis,
    t_axis: TimeAxis,
    n_z: Optional[int] = None,
) -> CutScan:
    """Reconstruct the unchirped map from coincidence cuts of chirped pumps.

    For each profile the delay trace of its (unfiltered, strict-pump)
    interferometer gives 1 - 2 I_a(tau) = W_a(0, tau) = W_0(-s_a tau, tau).
    The scan verifies each shear first and refuses profiles whose maps do
    not shear cleanly; reconstruction pairs are snapped to the nearest
    reference column. The pooled relative L2 error across all profiles
    quantifies the tomography.
    """
    profiles = tuple(profiles)
    if len(profiles) < 2:
        raise ValidationError("a cut scan needs at least two pump profiles")
    first = profiles[0]
    for p in profiles[1:]:
        if not (
            math.isclose(p.waist, first.waist, rel_tol=1e-12)
            and math.isclose(p.group_velocity, first.group_velocity, rel_tol=1e-12)
        ):
            raise ValidationError(
                "all profiles in a scan must share waist and group velocity"
            )
    if t_axis.center != 0.0:
        raise ValidationError("the scan needs a delay axis centered at zero")

    reference = replace(first, chirp=0.0)
    pm_ref = phase_matching_from_pump(reference, omega_axis, n_z=n_z)
    ref_map = chronocyclic_w_minus(pm_ref, omega_axis, t_axis, method="direct")

    taus = t_axis.samples
    dw = omega_axis.spacing
    n = omega_axis.n_samples
    reports = []
    traces = []
    recon_all = []
    direct_all = []
    for profile in profiles:
        report = verify_shear(
            profile, omega_axis, t_half=t_axis.half_width, n_z=n_z
        )
        if not report.passes:
            raise NumericRegimeError(
                f"chirp {profile.chirp:.3e} m does not shear cleanly "
                f"(max pointwise error {report.max_pointwise_error:.3e}); "
                "its cut cannot be placed on the reference map"
            )
        reports.append(report)

        pm = phase_matching_from_pump(profile, omega_axis, n_z=n_z)
        state = BiphotonSpectralState.factorized(PumpEnvelope.strict_delta(), pm)
        config = HomConfig(state=state, placement=FilterPlacement.NONE)
        trace = hom_trace(config, taus=taus)
        traces.append(trace.probabilities)

        recon = []
        direct = []
        for j, tau in enumerate(taus):
            omega_target = -report.slope_fit * tau
            col = int(round((omega_target - (omega_axis.center - omega_axis.half_width)) / dw))
            if col < 0 or col >= n:
                continue
            recon.append(1.0 - 2.0 * trace.probabilities[j])
            direct.append(ref_map.values[j, col])
        if not recon:
            raise ValidationError(
                "no reconstruction points landed on the reference axis"
            )
        recon_all.append(np.asarray(recon))
        direct_all.append(np.asarray(direct))

    pooled_diff = np.concatenate(
        [r - d for r, d in zip(recon_all, direct_all)]
    )
    pooled_ref = np.concatenate(direct_all)
    denom = float(np.linalg.norm(pooled_ref))
    if denom == 0.0:
        raise NumericRegimeError("reference map vanished at every cut point")
    rel_l2 = float(np.linalg.norm(pooled_diff)) / denom

    return CutScan(
        chirps=tuple(p.chirp for p in profiles),
        slopes_candidate=np.array([p.shear_slope for p in profiles]),
        slopes_fit=np.array([r.slope_fit for r in reports]),
        shear_reports=tuple(reports),
        taus=taus,
        traces=tuple(traces),
        reference_map=ref_map,
        recon_values=tuple(recon_all),
        direct_values=tuple(direct_all),
        recon_rel_l2=rel_l2,
    )
