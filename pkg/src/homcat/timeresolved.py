"""Temporal amplitudes and time-resolved coincidence detection.

The collective spectral amplitude S maps to a temporal wavepacket by the
unitary transform j(t) = (2 pi)^{-1/2} integral S(nu) e^{-i nu t} d nu.
A coincidence with detection-time difference taubar at splitter delay tau
interferes the two exchange branches at reflected temporal arguments:

    I(tau, taubar) = (1/4) |j(-tau - taubar) - j(taubar - tau)|^2.

At taubar = 0 the two arguments coincide and I vanishes identically, for
any amplitude: simultaneous detections never distinguish the exchange.
Scanning taubar at fixed tau reveals the beating of a displaced lobe even
where the delay-only trace would show none; integrating the same quantity
over taubar recovers the delay-only coincidence probability of the same
collective amplitude (times twice its baseline norm), which ties the two
detection models together.

Whether the time argument is observable at all is a detector property:
select_regime classifies a detection window against the wavepacket
duration and refuses the ambiguous middle ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .axes import FrequencyAxis, TimeAxis
from .errors import (
    DetectorRegimeError,
    GridResolutionError,
    NumericRegimeError,
    ValidationError,
)
from .spectral import (
    BiphotonSpectralState,
    GaussianLobe,
    GaussianPhaseMatching,
    PhaseMatching,
    SampledPhaseMatching,
    TwoLobePhaseMatching,
)

__all__ = [
    "DetectionModel",
    "JointTemporalAmplitude",
    "TimeResolvedTrace",
    "select_regime",
    "jta_from_jsa",
    "jsa_from_jta",
    "time_resolved_coincidence",
    "time_resolved_trace",
    "time_resolved_coincidence_grid",
    "analytic_time_beating",
]

_EDGE_FRACTION = 0.05
_EDGE_ENERGY_TOL = 1e-6
_REGIME_MARGIN = 10.0

_TWO_PI = 2.0 * math.pi
_SQRT_TWO_PI = math.sqrt(_TWO_PI)


@dataclass(frozen=True)
class DetectionModel:
    """Detector timing classification.

    regime "resolved" means the window is at least a factor 10 below the
    wavepacket duration (timestamps carry which-time information);
    "non_resolved" means a factor 10 above (the detector integrates the
    wavepacket away).
    """

    regime: str
    window: float
    wavepacket_duration: float


def select_regime(
    window: float, bandwidth: Union[float, GaussianLobe, GaussianPhaseMatching]
) -> DetectionModel:
    """Classify a detector window against a spectral bandwidth.

    bandwidth is a width in rad/s (or an object carrying .width); the
    wavepacket duration is its reciprocal. Windows within a factor 10 of
    the duration are refused: neither detection model applies there.
    """
    width = getattr(bandwidth, "width", bandwidth)
    if not (isinstance(width, (int, float)) and width > 0.0 and math.isfinite(width)):
        raise ValidationError("bandwidth must be a positive width in rad/s")
    if not (window > 0.0 and math.isfinite(window)):
        raise ValidationError("detector window must be positive and finite")
    duration = 1.0 / float(width)
    if window <= duration / _REGIME_MARGIN:
        regime = "resolved"
    elif window >= duration * _REGIME_MARGIN:
        regime = "non_resolved"
    else:
        raise DetectorRegimeError(
            f"detector window {window:.3e} s is within a factor "
            f"{_REGIME_MARGIN:.0f} of the wavepacket duration {duration:.3e} s; "
            "neither the time-resolved nor the integrating model applies"
        )
    return DetectionModel(regime=regime, window=window, wavepacket_duration=duration)


@dataclass(frozen=True, eq=False)
class JointTemporalAmplitude:
    """Temporal amplitude samples.

    Reduced form: values j(t) over times (1D, any monotone grid). Grid
    form: values over a square (t_s, t_i) lattice given by axis_s/axis_i.
    """

    values: np.ndarray
    times: Optional[np.ndarray] = None
    axis_s: Optional[TimeAxis] = None
    axis_i: Optional[TimeAxis] = None
    normalization: str = "unitary"

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.ndim == 1:
            if self.times is None or self.times.shape != values.shape:
                raise ValidationError("reduced amplitude needs matching times")
        elif values.ndim == 2:
            if self.axis_s is None or self.axis_i is None:
                raise ValidationError("grid amplitude needs both time axes")
            expected = (self.axis_s.n_samples, self.axis_i.n_samples)
            if values.shape != expected:
                raise ValidationError(
                    f"grid shape {values.shape} does not match axes {expected}"
                )
        else:
            raise ValidationError("amplitude must be 1D or 2D")

    @property
    def is_reduced(self) -> bool:
        return self.values.ndim == 1


def _default_axis(obj) -> FrequencyAxis:
    if isinstance(obj, GaussianLobe):
        return FrequencyAxis(0.0, 5.0 * (abs(obj.center) + 3.0 * obj.width), 1025)
    if isinstance(obj, SampledPhaseMatching):
        return obj.axis
    if isinstance(obj, GaussianPhaseMatching):
        return FrequencyAxis(0.0, 5.0 * obj.width, 1025)
    if isinstance(obj, TwoLobePhaseMatching):
        return FrequencyAxis(0.0, 5.0 * obj.support_scale() / 2.0, 1025)
    if isinstance(obj, BiphotonSpectralState) and obj.is_strict:
        return _default_axis(obj.pm)
    raise ValidationError(
        f"no default frequency axis for {type(obj).__name__}; pass one explicitly"
    )


def _collective_samples(
    obj, axis: Optional[FrequencyAxis]
) -> Tuple[FrequencyAxis, np.ndarray]:
    """Resolve an amplitude-like object to samples on a symmetric axis."""
    if isinstance(obj, BiphotonSpectralState):
        if not obj.is_strict:
            raise ValidationError(
                "reduced temporal amplitudes exist for strict-delta states "
                "only; use the grid form for broadband pumps"
            )
        obj = obj.pm
    if axis is None:
        axis = _default_axis(obj)
    if axis.center != 0.0:
        raise ValidationError("collective sampling needs an axis centered at zero")
    if isinstance(obj, GaussianLobe):
        values = np.asarray(obj.evaluate(axis.samples), dtype=complex)
    elif isinstance(obj, PhaseMatching):
        values = obj.sample(axis)
    else:
        raise ValidationError(
            f"cannot interpret {type(obj).__name__} as a collective amplitude"
        )
    _check_band_limit(values)
    return axis, values


def _check_band_limit(values: np.ndarray) -> None:
    energy = np.abs(values) ** 2
    total = float(energy.sum())
    if total == 0.0:
        raise ValidationError("amplitude is identically zero on its axis")
    edge = max(1, int(round(_EDGE_FRACTION * values.size)))
    frac = float(energy[:edge].sum() + energy[-edge:].sum()) / total
    if frac > _EDGE_ENERGY_TOL:
        raise GridResolutionError(
            f"amplitude leaks {frac:.3e} of its energy into the axis edges; "
            "the transform would alias"
        )


def _fourier_times(axis: FrequencyAxis) -> np.ndarray:
    return np.fft.fftshift(np.fft.fftfreq(axis.n_samples, d=axis.spacing / _TWO_PI))


def _transform_fft(axis: FrequencyAxis, values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    times = _fourier_times(axis)
    nu0 = axis.samples[0]
    spectrum = np.fft.fftshift(np.fft.fft(values))
    j = (axis.spacing / _SQRT_TWO_PI) * np.exp(-1j * nu0 * times) * spectrum
    return times, j


def _transform_direct(
    axis: FrequencyAxis, values: np.ndarray, times: np.ndarray
) -> np.ndarray:
    kernel = np.exp(-1j * np.multiply.outer(times, axis.samples))
    return (axis.spacing / _SQRT_TWO_PI) * (kernel @ values)


def jta_from_jsa(
    obj,
    axis: Optional[FrequencyAxis] = None,
    method: str = "fft",
    times: Optional[np.ndarray] = None,
    normalization: str = "unitary",
) -> JointTemporalAmplitude:
    """Temporal amplitude of a spectral one.

    Reduced inputs (a lobe, a phase matching, a strict-delta state) give the
    1D transform; method "fft" lands on the conjugate lattice
    t_k = 2 pi k / (n d_nu) and "direct" evaluates the same plain-sum
    quadrature at arbitrary times. A Gaussian-pump factorized or grid state
    gives the 2D transform over (t_s, t_i), fft only.

    normalization "unitary" keeps the (2 pi)^{-1/2} convention (discrete
    Parseval holds exactly on the fft lattice); "unit_overlap" additionally
    divides by the lobe width so a Gaussian lobe transforms to a unit-height
    envelope.
    """
    if normalization not in ("unitary", "unit_overlap"):
        raise ValidationError(f"unknown normalization {normalization!r}")
    if isinstance(obj, BiphotonSpectralState) and not obj.is_strict:
        if times is not None or method != "fft":
            raise ValidationError("the 2D transform is fft-only on its own lattice")
        if normalization != "unitary":
            raise ValidationError("the 2D transform is unitary only")
        return _jta_grid(obj, axis)

    ax, values = _collective_samples(obj, axis)
    if method == "fft":
        if times is not None:
            raise ValidationError("the fft method derives its own times")
        t, j = _transform_fft(ax, values)
    elif method == "direct":
        if times is None:
            raise ValidationError("the direct method needs explicit times")
        t = np.asarray(times, dtype=float)
        j = _transform_direct(ax, values, t)
    else:
        raise ValidationError(f"unknown method {method!r}")
    if normalization == "unit_overlap":
        if not isinstance(obj, GaussianLobe):
            raise ValidationError(
                "unit_overlap normalization is defined for Gaussian lobes"
            )
        j = j / obj.width
    return JointTemporalAmplitude(values=j, times=t, normalization=normalization)


def _jta_grid(
    state: BiphotonSpectralState, axis: Optional[FrequencyAxis]
) -> JointTemporalAmplitude:
    if state.is_grid:
        axis_s, axis_i = state.grid_axis_s, state.grid_axis_i
        grid = state.grid_values
    else:
        if axis is None:
            pm_scale = state.pm.support_scale()
            if pm_scale is None:
                raise ValidationError("pass an explicit axis for this state")
            half = 5.0 * max(pm_scale / 2.0, state.pump.width)
            axis = FrequencyAxis(0.0, half, 513)
        axis_s = axis_i = axis
        ws = axis.samples[:, None]
        wi = axis.samples[None, :]
        grid = np.asarray(state.evaluate(ws, wi), dtype=complex)
    energy = np.abs(grid) ** 2
    _check_band_limit(np.sqrt(energy.sum(axis=0)))
    _check_band_limit(np.sqrt(energy.sum(axis=1)))
    ts = _fourier_times(axis_s)
    ti = _fourier_times(axis_i)
    spectrum = np.fft.fftshift(np.fft.fft2(grid))
    phase_s = np.exp(-1j * axis_s.samples[0] * ts)[:, None]
    phase_i = np.exp(-1j * axis_i.samples[0] * ti)[None, :]
    values = (
        (axis_s.spacing * axis_i.spacing / _TWO_PI) * phase_s * phase_i * spectrum
    )
    dt_s = float(ts[1] - ts[0])
    dt_i = float(ti[1] - ti[0])
    t_axis_s = TimeAxis(0.0, dt_s * ((axis_s.n_samples - 1) // 2), axis_s.n_samples)
    t_axis_i = TimeAxis(0.0, dt_i * ((axis_i.n_samples - 1) // 2), axis_i.n_samples)
    return JointTemporalAmplitude(values=values, axis_s=t_axis_s, axis_i=t_axis_i)


def jsa_from_jta(
    jta: JointTemporalAmplitude, axis: FrequencyAxis
) -> np.ndarray:
    """Collective spectral samples recovered from a reduced temporal amplitude.

    Exact inverse of the fft-lattice transform; for other time grids it is
    the plain-sum quadrature of the inverse integral.
    """
    if not jta.is_reduced:
        raise ValidationError("spectral recovery is implemented for reduced form")
    t = jta.times
    if t.size < 2:
        raise ValidationError("need at least two time samples")
    dt = float(t[1] - t[0])
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0.0):
        raise ValidationError("spectral recovery needs a uniform time grid")
    kernel = np.exp(1j * np.multiply.outer(axis.samples, t))
    return (dt / _SQRT_TWO_PI) * (kernel @ jta.values)


def time_resolved_coincidence(
    obj,
    tau: float,
    taubar: float,
    axis: Optional[FrequencyAxis] = None,
) -> float:
    """I(tau, taubar) of a collective amplitude, by direct quadrature."""
    ax, values = _collective_samples(obj, axis)
    targets = np.array([-tau - taubar, taubar - tau], dtype=float)
    j = _transform_direct(ax, values, targets)
    return 0.25 * float(np.abs(j[0] - j[1]) ** 2)


@dataclass(frozen=True, eq=False)
class TimeResolvedTrace:
    """I(tau, taubar) sampled over detection-time differences at fixed tau."""

    taubars: np.ndarray
    values: np.ndarray
    tau: float
    scaled: bool

    def __post_init__(self) -> None:
        if self.taubars.shape != self.values.shape:
            raise ValidationError("trace arrays must share one shape")


def time_resolved_trace(
    obj,
    taubars,
    tau: float = 0.0,
    axis: Optional[FrequencyAxis] = None,
    scaled: bool = False,
    detection: Optional[DetectionModel] = None,
) -> TimeResolvedTrace:
    """Detection-time-difference trace at fixed delay.

    scaled divides by the squared lobe width so a Gaussian lobe input lands
    on the unit-envelope closed form (see analytic_time_beating). Passing a
    DetectionModel asserts that its regime is "resolved"; an integrating
    detector cannot measure this trace.
    """
    if detection is not None and detection.regime != "resolved":
        raise ValidationError(
            "time-resolved traces require a resolved detector; this window "
            "integrates over the wavepacket"
        )
    taubars = np.asarray(taubars, dtype=float)
    ax, values = _collective_samples(obj, axis)
    targets = np.concatenate([-tau - taubars, taubars - tau])
    j = _transform_direct(ax, values, targets)
    j1, j2 = j[: taubars.size], j[taubars.size :]
    out = 0.25 * np.abs(j1 - j2) ** 2
    if scaled:
        if not isinstance(obj, GaussianLobe):
            raise ValidationError("scaled traces are defined for Gaussian lobes")
        out = out / obj.width**2
    return TimeResolvedTrace(taubars=taubars, values=out, tau=tau, scaled=scaled)


def time_resolved_coincidence_grid(
    jta: JointTemporalAmplitude, tau: float, taubar: float
) -> float:
    """I(tau, taubar) from a 2D temporal amplitude.

    Both delays must be integer multiples of the lattice spacing; the two
    branches are then exact sample lookups, JT(t0, t0 + taubar + tau) and
    JT(t0 + taubar, t0 + tau), and the t0 integral is a trapezoid over the
    window where both are defined. The window must contain the wavepacket:
    if the integrand carries edge energy the lattice is too short.
    """
    if jta.is_reduced:
        raise ValidationError("grid coincidence needs the 2D temporal amplitude")
    if not jta.axis_s.matches(jta.axis_i):
        raise ValidationError("grid coincidence needs one shared time lattice")
    ax = jta.axis_s
    dt = ax.spacing
    shifts = {}
    for name, value in (("tau", tau), ("taubar", taubar)):
        steps = value / dt
        if abs(steps - round(steps)) > 1e-9:
            raise ValidationError(
                f"{name} = {value!r} is not an integer multiple of the "
                f"lattice spacing {dt!r}"
            )
        shifts[name] = int(round(steps))
    m_tau, m_bar = shifts["tau"], shifts["taubar"]
    n = ax.n_samples
    offsets = (0, m_bar + m_tau, m_bar, m_tau)
    lo = max(0, *(-o for o in offsets))
    hi = min(n, *(n - o for o in offsets))
    if hi - lo < 3:
        raise ValidationError("delays leave no overlap on the time lattice")
    i0 = np.arange(lo, hi)
    v = jta.values
    amp = 0.5 * (v[i0, i0 + m_bar + m_tau] - v[i0 + m_bar, i0 + m_tau])
    density = np.abs(amp) ** 2
    total = float(np.trapezoid(density, dx=dt))
    # An exchange-symmetric amplitude cancels to roundoff everywhere; the
    # edge fraction of pure noise is meaningless, so report the noise total.
    noise = (np.finfo(float).eps * float(np.max(np.abs(v)))) ** 2
    if total <= 100.0 * noise * dt * density.size:
        return total
    edge = max(1, int(round(_EDGE_FRACTION * density.size)))
    edge_sum = float(density[:edge].sum() + density[-edge:].sum())
    if total > 0.0 and edge_sum * dt > _EDGE_ENERGY_TOL * total:
        raise NumericRegimeError(
            "the t0 window truncates the integrand (edge energy fraction "
            f"{edge_sum * dt / total:.3e}); enlarge the time lattice"
        )
    return total


def analytic_time_beating(
    omega_1: float, omega_2: float, sigma: float, taubar
) -> np.ndarray:
    """Closed-form detection-time beating of the collective lobe at
    omega_1 - omega_2: (1/2) e^{-taubar^2 sigma^2} (1 - cos(2 taubar
    (omega_1 - omega_2))). Unit envelope; compare against scaled traces.
    """
    if not sigma > 0.0:
        raise ValidationError("sigma must be positive")
    taubar = np.asarray(taubar, dtype=float)
    return (
        0.5
        * np.exp(-(taubar**2) * sigma**2)
        * (1.0 - np.cos(2.0 * taubar * (omega_1 - omega_2)))
    )
