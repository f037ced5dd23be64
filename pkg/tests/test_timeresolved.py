import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homcat import (
    BiphotonSpectralState,
    DetectionModel,
    DetectorRegimeError,
    FilterPlacement,
    FrequencyAxis,
    GaussianLobe,
    GaussianPhaseMatching,
    HomConfig,
    PumpEnvelope,
    TimeAxis,
    TwoLobePhaseMatching,
    ValidationError,
    analytic_time_beating,
    hom_trace,
    jsa_from_jta,
    jta_from_jsa,
    select_regime,
    time_resolved_coincidence,
    time_resolved_coincidence_grid,
    time_resolved_trace,
)

# (1/sqrt(2pi)) integral of the lobe times e^{-i nu t}, from an independent
# quadrature, frozen before the tests were written.
PROBE_LOBE = GaussianLobe(2.0, 1.3, phase_slope=0.4, amplitude=0.9)
PROBE_JTA_POINTS = {
    0.0: 0.7120643460401775 + 0.7331689057838198j,
    0.31: 1.143245337736988 + 0.20803581568540241j,
    -1.7: -0.013811357856674476 - 0.024553552656099664j,
}


def closed_form_jta(lobe: GaussianLobe, times: np.ndarray) -> np.ndarray:
    shifted = np.asarray(times, dtype=float) - lobe.phase_slope
    return (
        lobe.amplitude
        * lobe.width
        * np.exp(-(lobe.width**2) * shifted**2 / 2.0)
        * np.exp(-1j * lobe.center * shifted)
    )


class TestRegime:
    def test_classification(self):
        slow = select_regime(1e-9, 1e12)
        assert slow.regime == "non_resolved"
        fast = select_regime(1e-12, 1e9)
        assert fast.regime == "resolved"
        assert fast.wavepacket_duration == 1e-9
        with pytest.raises(DetectorRegimeError):
            select_regime(2e-12, 1e12)

    def test_factor_ten_boundaries_are_inclusive(self):
        assert select_regime(1e-13, 1e12).regime == "resolved"
        assert select_regime(1e-11, 1e12).regime == "non_resolved"

    def test_width_carrying_objects_and_validation(self):
        assert select_regime(1e-12, GaussianLobe(0.0, 1e9)).regime == "resolved"
        with pytest.raises(ValidationError):
            select_regime(0.0, 1e12)
        with pytest.raises(ValidationError):
            select_regime(1e-12, -3.0)


class TestReducedTransform:
    def test_direct_transform_matches_frozen_quadrature_and_closed_form(self):
        times = np.array(sorted(PROBE_JTA_POINTS))
        jta = jta_from_jsa(PROBE_LOBE, method="direct", times=times)
        expected = np.array([PROBE_JTA_POINTS[t] for t in times])
        assert np.max(np.abs(jta.values - expected)) < 1e-10
        assert np.max(np.abs(closed_form_jta(PROBE_LOBE, times) - expected)) < 1e-12

    def test_fft_and_direct_agree_on_the_fft_lattice(self):
        jta = jta_from_jsa(PROBE_LOBE)
        rng = np.random.default_rng(20260814)
        picks = rng.choice(jta.times.size, size=25, replace=False)
        direct = jta_from_jsa(
            PROBE_LOBE, method="direct", times=jta.times[picks]
        )
        assert np.max(np.abs(direct.values - jta.values[picks])) < 1e-8

    def test_round_trip_recovers_the_spectral_samples(self):
        axis = FrequencyAxis(0.0, 29.5, 1025)
        jta = jta_from_jsa(PROBE_LOBE, axis=axis)
        back = jsa_from_jta(jta, axis)
        original = PROBE_LOBE.evaluate(axis.samples)
        assert np.max(np.abs(back - original)) < 1e-8

    def test_parseval_on_the_fft_lattice(self):
        axis = FrequencyAxis(0.0, 29.5, 1025)
        jta = jta_from_jsa(PROBE_LOBE, axis=axis)
        spectral = float(np.sum(np.abs(PROBE_LOBE.evaluate(axis.samples)) ** 2))
        spectral *= axis.spacing
        dt = float(jta.times[1] - jta.times[0])
        temporal = float(np.sum(np.abs(jta.values) ** 2)) * dt
        assert abs(temporal - spectral) < 1e-10 * spectral

    def test_unit_overlap_gives_a_unit_height_envelope(self):
        width = 0.7
        lobe = GaussianLobe(0.0, width)
        times = np.linspace(-3.0 / width, 3.0 / width, 101)
        jta = jta_from_jsa(lobe, method="direct", times=times, normalization="unit_overlap")
        envelope = np.exp(-(times**2) * width**2 / 2.0)
        assert np.max(np.abs(jta.values - envelope)) < 1e-12
        with pytest.raises(ValidationError):
            jta_from_jsa(
                GaussianPhaseMatching(1.0), normalization="unit_overlap"
            )

    def test_method_argument_guards(self):
        with pytest.raises(ValidationError):
            jta_from_jsa(PROBE_LOBE, method="direct")
        with pytest.raises(ValidationError):
            jta_from_jsa(PROBE_LOBE, method="fft", times=np.array([0.0]))
        with pytest.raises(ValidationError):
            jta_from_jsa(PROBE_LOBE, method="chebyshev")
        with pytest.raises(ValidationError):
            jta_from_jsa(PROBE_LOBE, normalization="max")


class TestTimeResolvedBeating:
    def test_simultaneous_detection_never_fires(self):
        assert time_resolved_coincidence(PROBE_LOBE, tau=0.8, taubar=0.0) == 0.0

    @given(
        center=st.floats(-4.0, 4.0),
        width=st.floats(0.5, 2.0),
        slope=st.floats(-1.0, 1.0),
        tau=st.floats(-3.0, 3.0),
    )
    @settings(max_examples=25)
    def test_simultaneous_detection_never_fires_property(self, center, width, slope, tau):
        lobe = GaussianLobe(center, width, phase_slope=slope)
        assert time_resolved_coincidence(lobe, tau=tau, taubar=0.0) == 0.0

    def test_scaled_trace_is_the_closed_form_beating(self):
        omega_1, omega_2, sigma = 2.0, -2.0, 1.0
        lobe = GaussianLobe(omega_1 - omega_2, sigma)
        taubars = TimeAxis(0.0, 3.0, 301).samples
        trace = time_resolved_trace(lobe, taubars, scaled=True)
        expected = analytic_time_beating(omega_1, omega_2, sigma, taubars)
        assert np.max(np.abs(trace.values - expected)) < 1e-10
        assert trace.scaled and trace.tau == 0.0

    def test_trace_is_exactly_symmetric_in_the_detection_difference(self):
        taubars = TimeAxis(0.0, 2.5, 251).samples
        trace = time_resolved_trace(PROBE_LOBE, taubars)
        np.testing.assert_array_equal(trace.values, trace.values[::-1])

    def test_first_fringe_lands_near_the_half_period(self):
        omega_1, omega_2, sigma = 2.0, -2.0, 1.0
        lobe = GaussianLobe(omega_1 - omega_2, sigma)
        taubars = np.linspace(0.0, 1.0, 2001)
        trace = time_resolved_trace(lobe, taubars)
        half_period = math.pi / (2.0 * (omega_1 - omega_2))
        peak = taubars[int(np.argmax(trace.values))]
        assert abs(peak - half_period) < 0.1 * half_period

    def test_unmarked_lobe_shows_no_beating(self):
        lobe = GaussianLobe(0.0, 1.2)
        taubars = TimeAxis(0.0, 3.0, 201).samples
        trace = time_resolved_trace(lobe, taubars)
        assert np.max(trace.values) < 1e-25

    def test_integrating_detector_is_refused(self):
        slow = DetectionModel(regime="non_resolved", window=1e-9, wavepacket_duration=1e-12)
        with pytest.raises(ValidationError):
            time_resolved_trace(PROBE_LOBE, np.array([0.1]), detection=slow)
        fast = DetectionModel(regime="resolved", window=1e-12, wavepacket_duration=1e-9)
        trace = time_resolved_trace(PROBE_LOBE, np.array([0.1]), detection=fast)
        assert trace.values.shape == (1,)

    def test_scaled_needs_a_lobe(self):
        with pytest.raises(ValidationError):
            time_resolved_trace(
                GaussianPhaseMatching(1.0), np.array([0.1]), scaled=True
            )

    def test_broadband_state_has_no_reduced_trace(self):
        state = BiphotonSpectralState.factorized(
            PumpEnvelope.gaussian(0.5), GaussianPhaseMatching(1.0)
        )
        with pytest.raises(ValidationError):
            time_resolved_trace(state, np.array([0.1]))


class TestMarginalTie:
    def test_taubar_marginal_reproduces_the_delay_only_trace(self):
        state = BiphotonSpectralState.factorized(
            PumpEnvelope.strict_delta(),
            TwoLobePhaseMatching(GaussianLobe(3.0, 1.0), GaussianLobe(-3.0, 1.0)),
        ).normalize()
        axis = FrequencyAxis(0.0, 30.0, 1025)
        taus = np.array([0.0, 0.3, 1.0])
        pipeline = hom_trace(
            HomConfig(state=state, placement=FilterPlacement.NONE, axis=axis),
            taus=taus,
        )
        taubars = TimeAxis(0.0, 8.0, 1601).samples
        for tau, reference in zip(taus, pipeline.probabilities):
            trace = time_resolved_trace(state, taubars, tau=tau, axis=axis)
            marginal = float(np.trapezoid(trace.values, taubars))
            assert abs(marginal - reference) < 1e-4


class TestGridForm:
    @staticmethod
    def grid_jta(relative_sign: int = -1):
        state = BiphotonSpectralState.factorized(
            PumpEnvelope.gaussian(0.5),
            TwoLobePhaseMatching(
                GaussianLobe(2.0, 1.0),
                GaussianLobe(-2.0, 1.0),
                relative_sign=relative_sign,
            ),
        )
        return jta_from_jsa(state, axis=FrequencyAxis(0.0, 12.0, 129))

    def test_simultaneous_detection_is_exactly_zero(self):
        jta = self.grid_jta()
        dt = jta.axis_s.spacing
        assert time_resolved_coincidence_grid(jta, 0.0, 0.0) == 0.0
        assert time_resolved_coincidence_grid(jta, 4.0 * dt, 0.0) == 0.0
        assert time_resolved_coincidence_grid(jta, 0.0, 3.0 * dt) > 0.01

    def test_exchange_symmetric_state_is_suppressed_at_zero_delay(self):
        jta = self.grid_jta(relative_sign=1)
        dt = jta.axis_s.spacing
        assert time_resolved_coincidence_grid(jta, 0.0, 3.0 * dt) < 1e-25

    def test_off_lattice_delays_are_refused(self):
        jta = self.grid_jta()
        dt = jta.axis_s.spacing
        with pytest.raises(ValidationError):
            time_resolved_coincidence_grid(jta, 0.0, 0.37 * dt)
        with pytest.raises(ValidationError):
            time_resolved_coincidence_grid(jta, 0.37 * dt, 0.0)

    def test_degenerate_overlap_is_refused(self):
        jta = self.grid_jta()
        dt = jta.axis_s.spacing
        n = jta.axis_s.n_samples
        with pytest.raises(ValidationError):
            time_resolved_coincidence_grid(jta, (n - 1) * dt, 0.0)

    def test_form_mismatches_are_refused(self):
        jta = self.grid_jta()
        with pytest.raises(ValidationError):
            jsa_from_jta(jta, FrequencyAxis(0.0, 12.0, 129))
        reduced = jta_from_jsa(PROBE_LOBE)
        with pytest.raises(ValidationError):
            time_resolved_coincidence_grid(reduced, 0.0, 0.0)

    def test_grid_transform_is_fft_only_and_unitary_only(self):
        state = BiphotonSpectralState.factorized(
            PumpEnvelope.gaussian(0.5), GaussianPhaseMatching(1.0)
        )
        with pytest.raises(ValidationError):
            jta_from_jsa(state, method="direct")
        with pytest.raises(ValidationError):
            jta_from_jsa(state, normalization="unit_overlap")
