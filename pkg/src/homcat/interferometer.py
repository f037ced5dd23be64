"""Delay, balanced beam splitter, spectral filtering, and coincidences.

The coincidence branch after a balanced splitter carries the antisymmetrized
amplitude A(w_s, w_i) = (JSA(w_s, w_i) e^{-i w_i tau} - JSA(w_i, w_s)
e^{-i w_s tau})/2, with the delay in the idler arm by default. Under a
strict-delta pump everything reduces to one collective axis: the pair state
|w, -w> is labeled by the axis value w, the branch amplitudes are S(w) and
S(-w), and the idler delay phase becomes e^{+i w tau}.

Filter placement changes the physics, not just the order of factors:

* before_splitter: each photon passes its filter while the paths are still
  distinguishable, so the passbands mark the paths. The literal pointwise
  product f1(w_s) f2(w_i) multiplies the state, and interference survives
  only through the passband overlap (the eraser configuration).
* after_splitter: the filters sit behind the outputs and a coincidence
  post-selects one photon per detector. Both exchange branches then face
  the same detector-filter assignment, so the reduced pipeline multiplies
  the antisymmetrized amplitude by the single collective marking lobe at
  center1 - center2, and the full beating visibility survives. (The 2D grid
  path keeps the literal product f1(w_s) f2(w_i) instead; it realizes the
  path-marking reading and is retained for cross-checks.)

Coincidence probabilities are normalized so that fully distinguishable
photons give 1/2: I(tau) = ||a_tau||^2 / (2 Ninf) with Ninf the exact
incoherent (tau -> infinity) limit of ||a_tau||^2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .axes import FrequencyAxis
from .errors import GridResolutionError, ValidationError
from .spectral import (
    BiphotonSpectralState,
    FlatPhaseMatching,
    GaussianFilter,
    GaussianLobe,
    GaussianPhaseMatching,
    PhaseMatching,
    TwoLobePhaseMatching,
    collective_marking_lobe,
)

__all__ = [
    "FilterPlacement",
    "HomConfig",
    "PostSelectedState",
    "CoincidenceTrace",
    "default_reduced_axis",
    "apply_beamsplitter_coincidence",
    "apply_filters",
    "coincidence_probability",
    "hom_trace",
    "analytic_beating",
    "analytic_eraser",
    "visibility",
]

_EDGE_FRACTION = 0.05
_EDGE_ENERGY_TOL = 1e-6


class FilterPlacement(enum.Enum):
    AFTER = "after_splitter"
    BEFORE = "before_splitter"
    NONE = "none"


@dataclass(frozen=True)
class HomConfig:
    """One interferometer setting.

    filters is a (GaussianFilter, GaussianFilter) pair or None. eraser_shift
    displaces the first filter center downward by mu and is meaningful only
    with before_splitter placement. delay_on selects which arm carries the
    delay phase; the idler arm is the default convention.
    """

    state: BiphotonSpectralState
    tau: float = 0.0
    placement: FilterPlacement = FilterPlacement.NONE
    filters: Optional[Tuple[GaussianFilter, GaussianFilter]] = None
    eraser_shift: float = 0.0
    delay_on: str = "idler"
    axis: Optional[FrequencyAxis] = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.tau):
            raise ValidationError("delay tau must be finite")
        if self.delay_on not in ("idler", "signal"):
            raise ValidationError("delay_on must be 'idler' or 'signal'")
        if self.placement is FilterPlacement.NONE and self.filters is not None:
            raise ValidationError("placement 'none' admits no filters")
        if self.placement is not FilterPlacement.NONE and self.filters is None:
            raise ValidationError(
                f"placement {self.placement.value!r} requires a filter pair"
            )
        if self.filters is not None:
            f1, f2 = self.filters
            if not math.isclose(f1.width, f2.width, rel_tol=1e-12):
                raise ValidationError("filter widths must be equal")
        if self.eraser_shift != 0.0 and self.placement is not FilterPlacement.BEFORE:
            raise ValidationError(
                "eraser_shift is defined only for before_splitter placement"
            )


@dataclass(frozen=True, eq=False)
class PostSelectedState:
    """Coincidence-branch state after the splitter (and any filtering).

    raw_norm is the success probability ||a||^2 of the coincidence branch
    including the 1/4 branching weight; amplitude is the renormalized
    amplitude (zeros when raw_norm vanishes). branch_pos/branch_neg hold the
    two filtered exchange-branch amplitudes without their delay phases; their
    norms fix the distinguishable baseline.

    Reduced states live on one collective axis; grid states store 2D arrays
    over (axis_s, axis_i).
    """

    tau: float
    delay_on: str
    raw_norm: float
    amplitude: np.ndarray
    branch_pos: np.ndarray
    branch_neg: np.ndarray
    axis: Optional[FrequencyAxis] = None
    axis_s: Optional[FrequencyAxis] = None
    axis_i: Optional[FrequencyAxis] = None

    @property
    def is_reduced(self) -> bool:
        return self.axis is not None

    def baseline_norm(self) -> float:
        """Ninf: the incoherent large-delay limit of raw_norm."""
        return 0.25 * (
            _norm_sq(self.branch_pos, self._spacings())
            + _norm_sq(self.branch_neg, self._spacings())
        )

    def _spacings(self) -> Tuple[float, ...]:
        if self.is_reduced:
            return (self.axis.spacing,)
        return (self.axis_s.spacing, self.axis_i.spacing)

    def coincidence_probability(self) -> float:
        """I at this tau, normalized to the 1/2 distinguishable baseline."""
        ninf = self.baseline_norm()
        if ninf <= 0.0:
            raise ValidationError("post-selected state has zero baseline norm")
        return 0.5 * self.raw_norm / ninf


def _norm_sq(values: np.ndarray, spacings: Tuple[float, ...]) -> float:
    density = np.abs(values) ** 2
    for dx in reversed(spacings):
        density = np.trapezoid(density, dx=dx, axis=-1)
    return float(density)


def _check_edge_energy(values: np.ndarray, what: str) -> None:
    density = np.abs(np.asarray(values)) ** 2
    total = float(density.sum())
    if total == 0.0:
        return
    n = density.shape[-1]
    edge = max(1, int(round(_EDGE_FRACTION * n)))
    mask = np.zeros(n, dtype=bool)
    mask[:edge] = True
    mask[-edge:] = True
    frac = float(density[..., mask].sum()) / total
    if density.ndim > 1:
        frac_rows = float(density[mask, :].sum()) / total
        frac = max(frac, frac_rows)
    if frac > _EDGE_ENERGY_TOL:
        raise GridResolutionError(
            f"{what}: energy fraction {frac:.3e} sits in the outer "
            f"{int(100 * _EDGE_FRACTION)}% of the axis; enlarge or refine the grid"
        )


def default_reduced_axis(config: HomConfig, n_samples: int = 1025) -> FrequencyAxis:
    """Collective axis sized to the widest structure in the configuration."""
    if config.axis is not None:
        return config.axis
    pm = config.state.pm
    own_axis = getattr(pm, "axis", None)
    if isinstance(own_axis, FrequencyAxis):
        return own_axis
    candidates = []
    if isinstance(pm, GaussianPhaseMatching):
        candidates.append(pm.width)
    elif isinstance(pm, TwoLobePhaseMatching):
        candidates.append(pm.support_scale() / 2.0)
    elif pm is not None and not isinstance(pm, FlatPhaseMatching):
        scale = pm.support_scale()
        if scale is not None:
            candidates.append(scale / 2.0)
    if config.filters is not None:
        f1, f2 = config.filters
        sep = abs(f1.center - f2.center) + abs(config.eraser_shift)
        candidates.append(sep + 3.0 * f1.width)
    if not candidates:
        raise ValidationError(
            "cannot size an axis: flat phase matching without filters has no "
            "spectral scale; pass an explicit axis"
        )
    return FrequencyAxis(0.0, 5.0 * max(candidates), n_samples)


def _reduced_phases(nu: np.ndarray, tau, delay_on: str):
    """Delay phases for the two exchange branches on the collective axis.

    With the pair labeled |w, -w>, the idler-arm delay e^{-i w_i tau} is
    e^{+i w tau} on the direct branch and e^{-i w tau} on the exchanged one.
    """
    tau_arr = np.asarray(tau, dtype=float)
    phase = np.exp(1j * np.multiply.outer(tau_arr, nu))
    if delay_on == "idler":
        return phase, np.conj(phase)
    return np.conj(phase), phase


def apply_beamsplitter_coincidence(
    state: BiphotonSpectralState,
    tau: float,
    delay_on: str = "idler",
    axis: Optional[FrequencyAxis] = None,
    axes: Optional[Tuple[FrequencyAxis, FrequencyAxis]] = None,
) -> PostSelectedState:
    """Antisymmetrized coincidence-branch amplitude at delay tau.

    Strict-delta states reduce onto a symmetric collective axis; other
    states are evaluated on a square (w_s, w_i) grid so the exchange is an
    exact transpose.
    """
    if state.is_strict:
        if axis is None:
            axis = default_reduced_axis(HomConfig(state=state, tau=tau))
        if axis.center != 0.0:
            raise ValidationError(
                "the reduced exchange needs an axis symmetric about zero"
            )
        samples = state.reduced_samples(axis)
        return _postselect_reduced(samples, samples[::-1], axis, tau, delay_on)
    return _beamsplit_grid(state, tau, delay_on, axes)


def _postselect_reduced(
    b1: np.ndarray,
    b2: np.ndarray,
    axis: FrequencyAxis,
    tau: float,
    delay_on: str,
) -> PostSelectedState:
    ph1, ph2 = _reduced_phases(axis.samples, tau, delay_on)
    raw_amp = 0.5 * (b1 * ph1 - b2 * ph2)
    raw = _norm_sq(raw_amp, (axis.spacing,))
    amp = raw_amp / math.sqrt(raw) if raw > 0.0 else np.zeros_like(raw_amp)
    return PostSelectedState(
        tau=tau,
        delay_on=delay_on,
        raw_norm=raw,
        amplitude=amp,
        branch_pos=b1,
        branch_neg=b2,
        axis=axis,
    )


def _square_axes(
    state: BiphotonSpectralState,
    axes: Optional[Tuple[FrequencyAxis, FrequencyAxis]],
) -> Tuple[FrequencyAxis, FrequencyAxis]:
    if state.is_grid:
        axes = (state.grid_axis_s, state.grid_axis_i)
    if axes is None:
        pm_scale = state.pm.support_scale()
        if pm_scale is None:
            raise ValidationError("pass explicit axes for this state")
        half = 5.0 * max(pm_scale / 2.0, state.pump.width)
        ax = FrequencyAxis(0.0, half, 1025)
        axes = (ax, ax)
    if not axes[0].matches(axes[1]):
        raise ValidationError(
            "the exchange term needs identical signal and idler axes"
        )
    return axes


def _beamsplit_grid(
    state: BiphotonSpectralState,
    tau: float,
    delay_on: str,
    axes: Optional[Tuple[FrequencyAxis, FrequencyAxis]],
) -> PostSelectedState:
    axis_s, axis_i = _square_axes(state, axes)
    if state.is_grid:
        grid = state.grid_values
    else:
        ws = axis_s.samples[:, None]
        wi = axis_i.samples[None, :]
        grid = np.asarray(state.evaluate(ws, wi), dtype=complex)
    ph_i = np.exp(-1j * axis_i.samples * tau)[None, :]
    ph_s = np.exp(-1j * axis_s.samples * tau)[:, None]
    if delay_on == "idler":
        raw_amp = 0.5 * (grid * ph_i - grid.T * ph_s)
    else:
        raw_amp = 0.5 * (grid * ph_s - grid.T * ph_i)
    spacings = (axis_s.spacing, axis_i.spacing)
    raw = _norm_sq(raw_amp, spacings)
    amp = raw_amp / math.sqrt(raw) if raw > 0.0 else np.zeros_like(raw_amp)
    return PostSelectedState(
        tau=tau,
        delay_on=delay_on,
        raw_norm=raw,
        amplitude=amp,
        branch_pos=grid,
        branch_neg=grid.T,
        axis_s=axis_s,
        axis_i=axis_i,
    )


class _BeforeFilteredPM(PhaseMatching):
    """Phase matching multiplied by the pre-splitter passband product.

    On the collective axis the product is f1(w) f2(-w): the signal branch
    meets filter 1 at +w and the idler branch meets filter 2 at -w.
    """

    def __init__(
        self, base: PhaseMatching, lobe1: GaussianLobe, lobe2: GaussianLobe
    ) -> None:
        self._base = base
        self._lobe1 = lobe1
        self._lobe2 = lobe2

    def evaluate(self, omega) -> np.ndarray:
        omega = np.asarray(omega, dtype=float)
        return (
            np.asarray(self._base.evaluate(omega))
            * self._lobe1.evaluate(omega)
            * self._lobe2.evaluate(-omega)
        )

    def support_scale(self) -> Optional[float]:
        sep = max(abs(self._lobe1.center), abs(self._lobe2.center))
        return 2.0 * (sep + 6.0 * self._lobe1.width)


def apply_filters(
    obj,
    filters: Optional[Tuple[GaussianFilter, GaussianFilter]],
    placement: FilterPlacement,
    eraser_shift: float = 0.0,
) -> object:
    """Apply the filter pair in the stated position.

    before_splitter takes a BiphotonSpectralState and returns the filtered
    state (paths marked by the passbands, eraser_shift displacing the first
    filter center). after_splitter takes a PostSelectedState; the reduced
    path multiplies by the collective marking lobe (coincidence
    post-selection keeps each detector behind its own filter in both
    exchange branches), while the 2D path multiplies by the literal product
    f1(w_s) f2(w_i). placement 'none' accepts no filters.
    """
    if placement is FilterPlacement.NONE:
        if filters is not None:
            raise ValidationError("placement 'none' admits no filters")
        return obj
    if filters is None:
        raise ValidationError("this placement requires a filter pair")
    f1, f2 = filters
    if not math.isclose(f1.width, f2.width, rel_tol=1e-12):
        raise ValidationError("filter widths must be equal")
    if eraser_shift != 0.0 and placement is not FilterPlacement.BEFORE:
        raise ValidationError("eraser_shift applies to before_splitter only")

    if placement is FilterPlacement.BEFORE:
        if not isinstance(obj, BiphotonSpectralState):
            raise ValidationError(
                "before_splitter filtering acts on the biphoton state"
            )
        shifted = GaussianLobe(
            center=f1.center - eraser_shift,
            width=f1.width,
            amplitude=f1.lobe.amplitude,
        )
        if obj.is_strict:
            pm = _BeforeFilteredPM(obj.pm, shifted, f2.lobe)
            return BiphotonSpectralState.factorized(obj.pump, pm)
        return _filter_grid_state(obj, shifted, f2.lobe)

    if not isinstance(obj, PostSelectedState):
        raise ValidationError(
            "after_splitter filtering acts on the post-selected state"
        )
    if obj.is_reduced:
        lobe = collective_marking_lobe(f1, f2)
        window = lobe.evaluate(obj.axis.samples)
        return _postselect_filtered(obj, window)
    ws = obj.axis_s.samples[:, None]
    wi = obj.axis_i.samples[None, :]
    window = f1.evaluate(ws) * f2.evaluate(wi)
    return _postselect_filtered(obj, window)


def _filter_grid_state(
    state: BiphotonSpectralState, lobe1: GaussianLobe, lobe2: GaussianLobe
) -> BiphotonSpectralState:
    # The filtered product no longer factorizes over (w_plus, w_minus), so
    # non-strict states are pinned onto a square pair grid here.
    if state.is_grid:
        axis_s, axis_i = state.grid_axis_s, state.grid_axis_i
        grid = state.grid_values
    else:
        pm_scale = state.pm.support_scale()
        if pm_scale is None:
            raise ValidationError(
                "flat phase matching with a broadband pump has no spectral "
                "scale; build the state on an explicit grid first"
            )
        sep = max(abs(lobe1.center), abs(lobe2.center)) + 3.0 * lobe1.width
        half = 5.0 * max(pm_scale / 2.0, state.pump.width, sep)
        axis_s = axis_i = FrequencyAxis(0.0, half, 513)
        ws = axis_s.samples[:, None]
        wi = axis_i.samples[None, :]
        grid = np.asarray(state.evaluate(ws, wi), dtype=complex)
    ws = axis_s.samples[:, None]
    wi = axis_i.samples[None, :]
    values = grid * lobe1.evaluate(ws) * lobe2.evaluate(wi)
    return BiphotonSpectralState.from_grid(axis_s, axis_i, values)


def _postselect_filtered(
    post: PostSelectedState, window: np.ndarray
) -> PostSelectedState:
    raw_amp = post.amplitude * math.sqrt(post.raw_norm) * window
    spacings = post._spacings()
    raw = _norm_sq(raw_amp, spacings)
    amp = raw_amp / math.sqrt(raw) if raw > 0.0 else np.zeros_like(raw_amp)
    return PostSelectedState(
        tau=post.tau,
        delay_on=post.delay_on,
        raw_norm=raw,
        amplitude=amp,
        branch_pos=post.branch_pos * window,
        branch_neg=post.branch_neg * window,
        axis=post.axis,
        axis_s=post.axis_s,
        axis_i=post.axis_i,
    )


def _postselect_config(
    config: HomConfig, tau: float, axis: Optional[FrequencyAxis]
) -> PostSelectedState:
    state = config.state
    if config.placement is FilterPlacement.BEFORE:
        state = apply_filters(
            state, config.filters, FilterPlacement.BEFORE, config.eraser_shift
        )
    if state.is_strict:
        post = apply_beamsplitter_coincidence(
            state, tau, config.delay_on, axis=axis
        )
    else:
        post = apply_beamsplitter_coincidence(state, tau, config.delay_on)
    if config.placement is FilterPlacement.AFTER:
        post = apply_filters(post, config.filters, FilterPlacement.AFTER)
    return post


def coincidence_probability(config: HomConfig) -> float:
    """Coincidence probability at config.tau, baseline-normalized to 1/2."""
    axis = default_reduced_axis(config) if config.state.is_strict else None
    post = _postselect_config(config, config.tau, axis)
    _check_edge_energy(post.branch_pos, "post-selected amplitude")
    _check_edge_energy(post.branch_neg, "post-selected amplitude")
    return post.coincidence_probability()


@dataclass(frozen=True, eq=False)
class CoincidenceTrace:
    """Sampled coincidence probability against a delay parameter."""

    delays: np.ndarray
    probabilities: np.ndarray
    raw_norms: Optional[np.ndarray] = None
    width_scale: Optional[float] = None
    label: str = "coincidence"

    def __post_init__(self) -> None:
        if self.delays.shape != self.probabilities.shape:
            raise ValidationError("trace arrays must share one shape")


def _default_tau_grid(config: HomConfig, n_points: int) -> np.ndarray:
    if config.filters is not None:
        scale = config.filters[0].width
    elif isinstance(config.state.pm, GaussianPhaseMatching):
        scale = config.state.pm.width
    elif isinstance(config.state.pm, TwoLobePhaseMatching):
        scale = config.state.pm.lobe_a.width
    else:
        raise ValidationError(
            "no spectral scale to size the delay grid; pass taus explicitly"
        )
    span = 5.0 / scale
    return np.linspace(-span, span, n_points)


def hom_trace(
    config: HomConfig,
    taus: Optional[Sequence[float]] = None,
    n_points: int = 801,
) -> CoincidenceTrace:
    """Coincidence probability over a delay grid.

    config.tau is ignored; the grid defaults to +-5 over the filter width
    (filtered) or the phase-matching width (unfiltered), 801 points.
    """
    if n_points < 3:
        raise ValidationError("a trace needs at least 3 points")
    taus = (
        np.asarray(taus, dtype=float)
        if taus is not None
        else _default_tau_grid(config, n_points)
    )
    width_scale = config.filters[0].width if config.filters else None
    if width_scale is None and isinstance(config.state.pm, GaussianPhaseMatching):
        width_scale = config.state.pm.width

    if not config.state.is_strict:
        values = np.empty(taus.shape)
        raws = np.empty(taus.shape)
        for k, tau in enumerate(taus):
            post = _postselect_config(config, float(tau), None)
            values[k] = post.coincidence_probability()
            raws[k] = post.raw_norm
        return CoincidenceTrace(taus, values, raws, width_scale, config.placement.value)

    axis = default_reduced_axis(config)
    probe = _postselect_config(config, 0.0, axis)
    _check_edge_energy(probe.branch_pos, "trace amplitude")
    _check_edge_energy(probe.branch_neg, "trace amplitude")
    b1, b2 = probe.branch_pos, probe.branch_neg
    ninf = probe.baseline_norm()
    if ninf <= 0.0:
        raise ValidationError("state has zero norm on the trace axis")
    ph1, ph2 = _reduced_phases(axis.samples, taus, config.delay_on)
    amps = 0.5 * (b1[None, :] * ph1 - b2[None, :] * ph2)
    raws = np.trapezoid(np.abs(amps) ** 2, dx=axis.spacing, axis=1)
    values = 0.5 * raws / ninf
    return CoincidenceTrace(taus, values, raws, width_scale, config.placement.value)


def analytic_beating(
    omega_1: float, omega_2: float, sigma: float, tau
) -> np.ndarray:
    """Closed-form after-splitter coincidence trace.

    (1/2)(1 - e^{-tau^2 sigma^2} cos(2 tau (omega_2 - omega_1))); beating
    period pi/(omega_2 - omega_1).
    """
    if not sigma > 0.0:
        raise ValidationError("sigma must be positive")
    tau = np.asarray(tau, dtype=float)
    return 0.5 * (
        1.0
        - np.exp(-(tau**2) * sigma**2) * np.cos(2.0 * tau * (omega_2 - omega_1))
    )


def analytic_eraser(
    omega_1: float,
    omega_2: float,
    sigma: float,
    tau,
    mu: float = 0.0,
) -> np.ndarray:
    """Closed-form before-splitter (eraser) coincidence trace.

    (1/2)(1 - e^{-(omega_1-omega_2-mu)^2/(2 sigma^2)} e^{-tau^2 sigma^2/2}).
    """
    if not sigma > 0.0:
        raise ValidationError("sigma must be positive")
    tau = np.asarray(tau, dtype=float)
    vis = math.exp(-((omega_1 - omega_2 - mu) ** 2) / (2.0 * sigma**2))
    return 0.5 * (1.0 - vis * np.exp(-(tau**2) * sigma**2 / 2.0))


def visibility(trace: CoincidenceTrace) -> float:
    """Dip visibility (baseline - extremum)/baseline with baseline 1/2."""
    if trace.width_scale is not None:
        needed = 4.0 / trace.width_scale
        if float(np.max(np.abs(trace.delays))) < needed * (1.0 - 1e-12):
            raise ValidationError(
                f"trace covers |tau| <= {np.max(np.abs(trace.delays)):.3e} s "
                f"but visibility needs at least {needed:.3e} s"
            )
    return float((0.5 - np.min(trace.probabilities)) / 0.5)
