"""Acceptance self-check.

Runs every numbered criterion at desk scale against its stated bound and
prints one measured-vs-tolerance row per criterion. Numeric measurements
are deterministic (fixed seeds, fixed grids); only the timing columns vary
between invocations.

build_stage(coarsen_grids=True) is the negative-test hook: it swaps the
collective frequency axis for one too narrow to hold the filtered
amplitude, so the pipeline criteria fail with the grid-resolution error
instead of producing silently wrong numbers.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, TextIO, Tuple

import numpy as np

from .axes import FrequencyAxis, TimeAxis
from .errors import HomcatError
from .interferometer import (
    FilterPlacement,
    HomConfig,
    analytic_beating,
    analytic_eraser,
    apply_beamsplitter_coincidence,
    apply_filters,
    hom_trace,
    visibility,
)
from .phasegate import PumpProfile, scan_cuts
from .spectral import (
    BiphotonSpectralState,
    FlatPhaseMatching,
    GaussianFilter,
    GaussianLobe,
    GaussianPhaseMatching,
    PumpEnvelope,
    TwoLobePhaseMatching,
    collective_marking_lobe,
    collective_transmission_lobe,
    wavelength_to_angular,
)
from .timeresolved import (
    analytic_time_beating,
    jta_from_jsa,
    time_resolved_coincidence,
    time_resolved_trace,
)
from .wigner import (
    cat_decomposition,
    chronocyclic_w_minus,
    wigner_cut,
    wigner_marginal_over_omega,
)
from .young import (
    SlitConfig,
    analytic_young,
    compare_parity,
    matched_parity_axis,
    young_joint_detection,
)

__all__ = ["SubCheck", "CheckResult", "SelftestStage", "build_stage", "run_selftest"]

_WAVELENGTH = 1.55e-6
_FILTER_WIDTH_M = 50e-12
_FILTER_SEPARATION_M = 0.6e-9
_GROUP_VELOCITY = 2.1e8
_SHEAR_TARGETS = (0.15, 0.3)
_SEED = 20260814


@dataclass(frozen=True)
class SubCheck:
    """One measured quantity against its bound."""

    label: str
    measured: float
    bound: float
    strict: bool = True

    @property
    def passed(self) -> bool:
        if self.strict:
            return self.measured < self.bound
        return self.measured <= self.bound

    def render(self) -> str:
        rel = "<" if self.strict else "<="
        mark = "" if self.passed else " [FAIL]"
        return f"{self.label}={self.measured:.3e} ({rel} {self.bound:g}){mark}"


@dataclass(frozen=True)
class CheckResult:
    index: int
    name: str
    seconds: float
    checks: Tuple[SubCheck, ...]
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(c.passed for c in self.checks)

    def detail(self) -> str:
        if self.error is not None:
            return self.error
        return "; ".join(c.render() for c in self.checks)


@dataclass(frozen=True)
class SelftestStage:
    """Shared physical setting for all criteria.

    Filter width and separation follow the 50 pm / 0.6 nm two-color
    configuration at 1.55 um, converted to angular frequency; the chirped
    profiles target map shears of 0.15 and 0.3 filter widths per delay
    step scale (slope in units of width^2).
    """

    sigma: float
    separation: float
    omega_1: float
    omega_2: float
    filters: Tuple[GaussianFilter, GaussianFilter]
    axis: FrequencyAxis
    taus: np.ndarray
    gate_axis: FrequencyAxis
    gate_t_axis: TimeAxis
    profiles: Tuple[PumpProfile, ...]
    slits: SlitConfig

    @property
    def marking_lobe(self) -> GaussianLobe:
        return collective_marking_lobe(*self.filters)


def build_stage(coarsen_grids: bool = False) -> SelftestStage:
    sigma = wavelength_to_angular(_WAVELENGTH, _FILTER_WIDTH_M)
    separation = wavelength_to_angular(_WAVELENGTH, _FILTER_SEPARATION_M)
    omega_1 = 0.5 * separation
    omega_2 = -0.5 * separation
    filters = (
        GaussianFilter(GaussianLobe(omega_1, sigma)),
        GaussianFilter(GaussianLobe(omega_2, sigma)),
    )
    if coarsen_grids:
        # Too narrow for the filtered amplitude: its outer-5% energy
        # fraction exceeds the pipeline's band-limit tolerance.
        axis = FrequencyAxis(0.0, separation + sigma, 1025)
    else:
        axis = FrequencyAxis(0.0, 5.0 * (separation + 3.0 * sigma), 1025)
    taus = np.linspace(-5.0 / sigma, 5.0 / sigma, 801)
    waist = _GROUP_VELOCITY / sigma
    profiles = [PumpProfile(waist=waist, group_velocity=_GROUP_VELOCITY)]
    for target in _SHEAR_TARGETS:
        chirp = _GROUP_VELOCITY * math.sqrt(2.0 / (target * sigma**2))
        profiles.append(
            PumpProfile(waist=waist, group_velocity=_GROUP_VELOCITY, chirp=chirp)
        )
    return SelftestStage(
        sigma=sigma,
        separation=separation,
        omega_1=omega_1,
        omega_2=omega_2,
        filters=filters,
        axis=axis,
        taus=taus,
        gate_axis=FrequencyAxis(0.0, 8.0 * sigma, 2049),
        gate_t_axis=TimeAxis(0.0, 3.2 / sigma, 161),
        profiles=tuple(profiles),
        slits=SlitConfig(
            slit_width=10e-6,
            x_a=60e-6,
            x_b=-60e-6,
            wavenumber=2.0 * math.pi / _WAVELENGTH,
            screen_distance=10.0,
        ),
    )


def _flat_state() -> BiphotonSpectralState:
    return BiphotonSpectralState.factorized(
        PumpEnvelope.strict_delta(), FlatPhaseMatching()
    )


def _stage_cat(stage: SelftestStage, ctx: Dict[str, object]):
    """Even-convention decomposition of the two displaced marking lobes.

    The +1 relative sign fixes the beating term's origin cut to
    +e^{-t^2 sigma^2} cos(2 t separation), the convention the delay trace
    measures; criteria 3 and 4 share this build.
    """
    if "cat" not in ctx:
        t_axis = TimeAxis(0.0, 5.0 / stage.sigma, 801)
        ctx["cat"] = cat_decomposition(
            GaussianLobe(stage.separation, stage.sigma),
            GaussianLobe(-stage.separation, stage.sigma),
            stage.axis,
            t_axis,
            parity=1,
        )
    return ctx["cat"]


def _beating_trace(stage: SelftestStage, ctx: Dict[str, object]):
    if "beating_trace" not in ctx:
        config = HomConfig(
            state=_flat_state(),
            placement=FilterPlacement.AFTER,
            filters=stage.filters,
            axis=stage.axis,
        )
        ctx["beating_trace"] = hom_trace(config, taus=stage.taus)
    return ctx["beating_trace"]


def _crit_beating(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    t0 = time.perf_counter()
    trace = _beating_trace(stage, ctx)
    model = analytic_beating(stage.omega_1, stage.omega_2, stage.sigma, stage.taus)
    wall = time.perf_counter() - t0
    err = float(np.max(np.abs(trace.probabilities - model)))
    return [
        SubCheck("max|I - closed form|", err, 1e-4),
        SubCheck("trace wall seconds", wall, 5.0),
    ]


def _crit_eraser(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    worst = 0.0
    vis_err = math.inf
    for mu in (0.0, stage.separation):
        config = HomConfig(
            state=_flat_state(),
            placement=FilterPlacement.BEFORE,
            filters=stage.filters,
            eraser_shift=mu,
            axis=stage.axis,
        )
        trace = hom_trace(config, taus=stage.taus)
        ctx.setdefault("probability_traces", []).append(trace.probabilities)
        model = analytic_eraser(
            stage.omega_1, stage.omega_2, stage.sigma, stage.taus, mu=mu
        )
        worst = max(worst, float(np.max(np.abs(trace.probabilities - model))))
        if mu != 0.0:
            vis_err = abs(visibility(trace) - 1.0)
    return [
        SubCheck("max|I - closed form|", worst, 1e-4),
        SubCheck("|restored visibility - 1|", vis_err, 1e-4),
    ]


def _crit_cut_identity(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    trace = _beating_trace(stage, ctx)
    dec = _stage_cat(stage, ctx)
    _, cut = wigner_cut(dec.w_beating, 0.0)
    err = float(np.max(np.abs(trace.probabilities - 0.5 * (1.0 - cut))))
    return [SubCheck("max|I - (1 - W_beat(0,tau))/2|", err, 1e-4)]


def _crit_cat_terms(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    dec = _stage_cat(stage, ctx)
    residual = float(
        np.max(
            np.abs(
                dec.w12.values
                + dec.w21.values
                + dec.w_beating.values
                - dec.full.values
            )
        )
    )
    t = dec.w_beating.t_axis.samples
    _, cut = wigner_cut(dec.w_beating, 0.0)
    cut_model = np.exp(-(t**2) * stage.sigma**2) * np.cos(
        2.0 * t * (stage.omega_2 - stage.omega_1)
    )
    cut_err = float(np.max(np.abs(cut - cut_model)))

    # Negativity at three-width separation of the filter centers, i.e.
    # displaced lobes at +-3 sigma on the collective axis.
    sep3 = 3.0 * stage.sigma
    small_axis = FrequencyAxis(0.0, 5.0 * (sep3 + 3.0 * stage.sigma), 513)
    small_t = TimeAxis(0.0, 4.0 / stage.sigma, 129)
    dec3 = cat_decomposition(
        GaussianLobe(sep3, stage.sigma),
        GaussianLobe(-sep3, stage.sigma),
        small_axis,
        small_t,
        parity=1,
    )
    negativity = float(np.min(dec3.full.values) + 0.05 * np.max(dec3.full.values))
    single = chronocyclic_w_minus(
        GaussianLobe(0.0, stage.sigma),
        FrequencyAxis(0.0, 8.0 * stage.sigma, 257),
        TimeAxis(0.0, 4.0 / stage.sigma, 129),
    )
    spurious = float(-np.min(single.values))
    return [
        SubCheck("max|w12 + w21 + w_beat - full|", residual, 1e-10),
        SubCheck("max|beating cut - closed form|", cut_err, 1e-6),
        SubCheck("min W + 0.05 max W (two lobes)", negativity, 0.0),
        SubCheck("-min W (single lobe)", spurious, 1e-10),
    ]


def _crit_time_resolved(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    lobe = stage.marking_lobe
    taubars = stage.taus
    trace = time_resolved_trace(lobe, taubars, tau=0.0, scaled=True)
    model = analytic_time_beating(
        stage.omega_1, stage.omega_2, stage.sigma, taubars
    )
    peak_num = float(np.max(trace.values))
    peak_model = float(np.max(model))
    err = float(np.max(np.abs(trace.values / peak_num - model / peak_model)))
    ctx["time_trace"] = trace

    rng = np.random.default_rng(_SEED)
    random_taus = rng.uniform(-5.0 / stage.sigma, 5.0 / stage.sigma, 10)
    worst_zero = max(
        time_resolved_coincidence(lobe, float(tau), 0.0) for tau in random_taus
    )
    return [
        SubCheck("max|I(0,taubar) - closed form|", err, 1e-4),
        SubCheck("max I(tau, 0)", worst_zero, 1e-12, strict=False),
    ]


def _crit_marginal(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    odd = TwoLobePhaseMatching(
        GaussianLobe(stage.separation, stage.sigma),
        GaussianLobe(-stage.separation, stage.sigma),
        relative_sign=-1,
    )
    t_axis = TimeAxis(0.0, 5.0 / stage.sigma, 801)
    cmap = chronocyclic_w_minus(odd, stage.axis, t_axis)
    times, marginal = wigner_marginal_over_omega(cmap)
    trace = ctx.get("time_trace")
    if trace is None or trace.taubars.shape != times.shape:
        trace = time_resolved_trace(stage.marking_lobe, times, tau=0.0, scaled=True)
    err = float(
        np.max(
            np.abs(
                marginal / np.max(marginal)
                - trace.values / np.max(trace.values)
            )
        )
    )
    return [SubCheck("max|marginal - I(0,taubar)| (peak-normalized)", err, 1e-3)]


def _crit_jta(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    lobe = collective_transmission_lobe(*stage.filters)
    jta = jta_from_jsa(lobe, method="fft", normalization="unit_overlap")
    t = jta.times
    model = (
        math.exp(-((stage.omega_1 - stage.omega_2) ** 2) / (4.0 * stage.sigma**2))
        * np.exp(-(t**2) * stage.sigma**2 / 4.0)
        * np.exp(-1j * t * (stage.omega_1 - stage.omega_2))
    )
    err = float(np.max(np.abs(jta.values - model)))

    jta_plain = jta_from_jsa(lobe, method="fft")
    axis = FrequencyAxis(0.0, 5.0 * (abs(lobe.center) + 3.0 * lobe.width), 1025)
    spectral_energy = lobe.l2_norm_sq()
    dt = float(jta_plain.times[1] - jta_plain.times[0])
    temporal_energy = float(np.sum(np.abs(jta_plain.values) ** 2) * dt)
    parseval = abs(temporal_energy - spectral_energy) / spectral_energy

    rng = np.random.default_rng(_SEED + 1)
    picks = rng.choice(jta_plain.times.size, size=25, replace=False)
    direct = jta_from_jsa(
        lobe, axis=axis, method="direct", times=jta_plain.times[picks]
    )
    cross = float(np.max(np.abs(direct.values - jta_plain.values[picks])))
    return [
        SubCheck("max|JTA - closed form|", err, 1e-6),
        SubCheck("relative Parseval defect", parseval, 1e-10),
        SubCheck("max|fft - direct| at 25 points", cross, 1e-8),
    ]


def _crit_young(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    slits = stage.slits
    pbar = np.linspace(-5.0 / slits.slit_width, 5.0 / slits.slit_width, 801)
    trace = young_joint_detection(slits, pbar=pbar)
    model = analytic_young(slits, pbar)
    err = float(np.max(np.abs(trace.values - model)))

    ratio_young = abs(slits.separation) / slits.slit_width
    ratio_hom = abs(stage.separation) / stage.sigma
    u = matched_parity_axis(ratio_young)
    hom_values = time_resolved_trace(
        stage.marking_lobe, u / stage.sigma, tau=0.0, scaled=True
    ).values
    young_values = young_joint_detection(slits, pbar=u / slits.slit_width).values
    report = compare_parity(u, hom_values, young_values, ratio_hom, ratio_young)
    return [
        SubCheck("max|fringes - closed form|", err, 1e-4),
        SubCheck("delay trace at origin", report.hom_at_origin, 1e-12, strict=False),
        SubCheck(
            "fringe origin deficit", report.young_origin_deficit, 1e-12, strict=False
        ),
        SubCheck("parity envelope error", report.envelope_max_error, 1e-6),
        SubCheck("half-period shift error", report.fringe_shift_max_error, 1e-6),
    ]


def _crit_shear(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    scan = scan_cuts(stage.profiles, stage.gate_axis, stage.gate_t_axis)
    shear_err = max(r.max_pointwise_error for r in scan.shear_reports)

    curvatures = np.array([p.curvature for p in stage.profiles])
    slope, intercept = np.polyfit(curvatures, scan.slopes_fit, 1)
    predicted = slope * curvatures + intercept
    ss_res = float(np.sum((scan.slopes_fit - predicted) ** 2))
    ss_tot = float(np.sum((scan.slopes_fit - scan.slopes_fit.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot
    return [
        SubCheck("max shear pointwise error", shear_err, 1e-3),
        SubCheck("1 - R^2 of slope vs curvature", 1.0 - r2, 1e-3),
        SubCheck("cut-scan reconstruction rel L2", scan.recon_rel_l2, 1e-2),
    ]


def _crit_exchange(stage: SelftestStage, ctx: Dict[str, object]) -> List[SubCheck]:
    pump = PumpEnvelope.gaussian(stage.sigma)
    state = BiphotonSpectralState.factorized(
        pump, GaussianPhaseMatching(3.0 * stage.sigma)
    )
    filtered = apply_filters(state, stage.filters, FilterPlacement.BEFORE)
    post = apply_beamsplitter_coincidence(filtered, 0.37 / stage.sigma, "idler")
    amp = post.amplitude
    antisym = float(np.max(np.abs(amp + amp.T)))
    peak = float(np.max(np.abs(amp)))
    antisym_rel = antisym / peak if peak > 0.0 else antisym

    probs = [np.asarray(p) for p in ctx.get("probability_traces", [])]
    probs.append(np.atleast_1d(_beating_trace(stage, ctx).probabilities))
    probs.append(np.atleast_1d(post.coincidence_probability()))
    lo = min(float(np.min(p)) for p in probs)
    hi = max(float(np.max(p)) for p in probs)
    excess = max(0.0, -lo, hi - 1.0)

    sym_axis = FrequencyAxis(0.0, 12.0 * stage.sigma, 257)
    sym = BiphotonSpectralState.factorized(
        pump, GaussianPhaseMatching(2.0 * stage.sigma)
    )
    post_sym = apply_beamsplitter_coincidence(
        sym, 0.0, "idler", axes=(sym_axis, sym_axis)
    )
    return [
        SubCheck("max|A + A^T| / max|A|", antisym_rel, 1e-12),
        SubCheck("probability range excess", excess, 0.0, strict=False),
        SubCheck(
            "symmetric-state I(0)",
            post_sym.coincidence_probability(),
            1e-12,
            strict=False,
        ),
    ]


_CRITERIA: Tuple[Tuple[int, str, Callable], ...] = (
    (1, "coincidence beating vs closed form", _crit_beating),
    (2, "filter-displacement eraser", _crit_eraser),
    (3, "trace equals beating-term cut", _crit_cut_identity),
    (4, "cat decomposition terms", _crit_cat_terms),
    (5, "time-resolved beating", _crit_time_resolved),
    (6, "map marginal vs time trace", _crit_marginal),
    (7, "temporal amplitude consistency", _crit_jta),
    (8, "double-slit fringes and parity", _crit_young),
    (9, "chirped-pump shear and cut scan", _crit_shear),
    (10, "exchange antisymmetry and bounds", _crit_exchange),
)


def run_selftest(
    stream: Optional[TextIO] = None, coarsen_grids: bool = False
) -> bool:
    """Run all criteria, print the report table, return overall pass."""
    out = stream if stream is not None else sys.stdout
    stage = build_stage(coarsen_grids=coarsen_grids)
    ctx: Dict[str, object] = {}
    results: List[CheckResult] = []
    start = time.perf_counter()
    for index, name, fn in _CRITERIA:
        t0 = time.perf_counter()
        try:
            checks = tuple(fn(stage, ctx))
            results.append(
                CheckResult(index, name, time.perf_counter() - t0, checks)
            )
        except HomcatError as exc:
            results.append(
                CheckResult(
                    index,
                    name,
                    time.perf_counter() - t0,
                    (),
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    total = time.perf_counter() - start
    results.append(
        CheckResult(
            11,
            "selftest wall time",
            total,
            (SubCheck("wall seconds", total, 60.0),),
        )
    )

    width = max(len(r.name) for r in results)
    print(f"{'#':>3}  {'criterion':<{width}}  {'status':<6}  {'time':>8}  measured vs tolerance", file=out)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(
            f"{r.index:>3}  {r.name:<{width}}  {status:<6}  {r.seconds:>7.2f}s  {r.detail()}",
            file=out,
        )
    passed = sum(1 for r in results if r.passed)
    overall = "PASS" if passed == len(results) else "FAIL"
    print(f"selftest: {overall} ({passed}/{len(results)} criteria)", file=out)
    return passed == len(results)
