import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from homcat import (
    BiphotonSpectralState,
    FlatPhaseMatching,
    FrequencyAxis,
    GaussianFilter,
    GaussianLobe,
    GaussianPhaseMatching,
    PumpEnvelope,
    TwoLobePhaseMatching,
    ValidationError,
    collective_marking_lobe,
    collective_transmission_lobe,
    filter_product_collective,
    to_collective,
    to_pair,
    wavelength_to_angular,
)

# Frozen from an adaptive-quadrature run of the same integrals (see the
# build notes); the package computes these by closed form instead.
QUAD_NORM_REAL_PAIR = 3.6098349511712957
QUAD_NORM_COMPLEX_PAIR = 2.7454478041959622
CONVERSIONS = {
    50e-12: 39201905667.197784,
    0.6e-9: 470422868006.37335,
    0.2e-9: 156807622668.79114,
}

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_wavelength_conversion_values():
    assert wavelength_to_angular(1.55e-6, 0.0) == 0.0
    for dl, expected in CONVERSIONS.items():
        got = wavelength_to_angular(1.55e-6, dl)
        assert math.isclose(got, expected, rel_tol=1e-14)
    with pytest.raises(ValidationError):
        wavelength_to_angular(-1.0, 1e-12)
    with pytest.raises(ValidationError):
        wavelength_to_angular(1.55e-6, -1e-12)


def test_collective_coordinates_substitution():
    assert to_collective(0.0, 0.0) == (0.0, 0.0)
    assert to_collective(3.0, -3.0) == (0.0, 6.0)
    assert to_collective(1.0, 0.5) == (1.5, 0.5)
    assert to_pair(1.5, 0.5) == (1.0, 0.5)


@given(omega_s=st.floats(-1e12, 1e12), omega_i=st.floats(-1e12, 1e12))
def test_round_trip_is_exact_when_the_sums_are(omega_s, omega_i):
    plus, minus = to_collective(omega_s, omega_i)
    back_s, back_i = to_pair(plus, minus)
    # Exactness cannot survive rounding in the forward sums; when they are
    # representable the inverse halving is exact as well.
    from fractions import Fraction

    fs, fi = Fraction(omega_s), Fraction(omega_i)
    if Fraction(plus) == fs + fi and Fraction(minus) == fs - fi:
        assert back_s == omega_s and back_i == omega_i
    scale = max(abs(omega_s), abs(omega_i), 1e-300)
    eps = np.finfo(float).eps
    assert abs(back_s - omega_s) <= 2.0 * eps * scale
    assert abs(back_i - omega_i) <= 2.0 * eps * scale


@given(
    center=st.floats(-10.0, 10.0),
    width=st.floats(0.1, 10.0),
    offset=st.floats(0.0, 20.0),
)
def test_lobe_is_even_about_center_without_phase_slope(center, width, offset):
    lobe = GaussianLobe(center, width)
    left = complex(lobe.evaluate(center - offset))
    right = complex(lobe.evaluate(center + offset))
    # center +- offset rounds, so demand symmetry only to quadrature noise
    # (absolute floor covers the denormal tail of the Gaussian).
    assert left.imag == 0.0 and right.imag == 0.0
    assert left.real == pytest.approx(right.real, rel=1e-9, abs=1e-300)


def test_lobe_validation():
    with pytest.raises(ValidationError):
        GaussianLobe(0.0, 0.0)
    with pytest.raises(ValidationError):
        GaussianLobe(0.0, -1.0)
    with pytest.raises(ValidationError):
        GaussianLobe(float("inf"), 1.0)
    with pytest.raises(ValidationError):
        GaussianFilter(GaussianLobe(0.0, 1.0, phase_slope=0.5))


def test_filter_product_collective_centers():
    f0 = GaussianFilter(GaussianLobe(0.0, 1.0))
    minus, plus = filter_product_collective(f0, f0)
    assert minus.center == 0.0 and plus.center == 0.0
    f1 = GaussianFilter(GaussianLobe(2.0, 1.0))
    f2 = GaussianFilter(GaussianLobe(-2.0, 1.0))
    minus, plus = filter_product_collective(f1, f2)
    assert minus.center == 4.0 and plus.center == 0.0
    assert math.isclose(minus.width, math.sqrt(2.0), rel_tol=1e-15)


def test_filter_product_identity_on_grid():
    f1 = GaussianFilter(GaussianLobe(1.3, 0.7))
    f2 = GaussianFilter(GaussianLobe(-0.4, 0.7))
    minus, plus = filter_product_collective(f1, f2)
    ws = np.linspace(-4.0, 4.0, 101)
    wi = np.linspace(-4.0, 4.0, 101)
    direct = np.multiply.outer(f1.evaluate(ws), f2.evaluate(wi))
    s_grid = ws[:, None]
    i_grid = wi[None, :]
    collective = minus.evaluate(s_grid - i_grid) * plus.evaluate(s_grid + i_grid)
    assert np.max(np.abs(direct - collective)) < 1e-12


def test_marking_and_transmission_lobes():
    f1 = GaussianFilter(GaussianLobe(3.0, 1.5))
    f2 = GaussianFilter(GaussianLobe(-1.0, 1.5))
    marking = collective_marking_lobe(f1, f2)
    assert marking.center == 4.0 and marking.width == 1.5
    trans = collective_transmission_lobe(f1, f2)
    assert trans.center == 4.0
    assert math.isclose(trans.width, 1.5 / math.sqrt(2.0), rel_tol=1e-15)
    assert math.isclose(trans.amplitude, math.exp(-16.0 / 9.0), rel_tol=1e-14)
    with pytest.raises(ValidationError):
        collective_marking_lobe(f1, GaussianFilter(GaussianLobe(0.0, 1.0)))


def test_two_lobe_norms_match_quadrature():
    pair = TwoLobePhaseMatching(GaussianLobe(2.0, 1.0), GaussianLobe(-2.0, 1.0))
    assert math.isclose(pair.l2_norm_sq(), QUAD_NORM_REAL_PAIR, rel_tol=1e-12)
    cplx = TwoLobePhaseMatching(
        GaussianLobe(1.5, 0.8, phase_slope=0.3, amplitude=1.2),
        GaussianLobe(-0.7, 0.8, phase_slope=-0.1, amplitude=0.9),
        relative_sign=-1,
    )
    assert math.isclose(cplx.l2_norm_sq(), QUAD_NORM_COMPLEX_PAIR, rel_tol=1e-12)


def test_two_lobe_norm_agrees_with_grid_quadrature():
    pm = TwoLobePhaseMatching(
        GaussianLobe(1.0, 0.9, phase_slope=0.2),
        GaussianLobe(-2.0, 0.9, amplitude=0.7),
        relative_sign=-1,
    )
    axis = FrequencyAxis(0.0, 12.0, 4097)
    sampled = pm.sample(axis)
    grid_norm = float(np.trapezoid(np.abs(sampled) ** 2, dx=axis.spacing))
    assert math.isclose(pm.l2_norm_sq(), grid_norm, rel_tol=1e-10)


@given(
    pump_width=st.floats(0.5, 3.0),
    pm_width=st.floats(0.5, 3.0),
    ws=st.floats(-3.0, 3.0),
    wi=st.floats(-3.0, 3.0),
)
def test_factorized_state_evaluates_as_a_product(pump_width, pm_width, ws, wi):
    state = BiphotonSpectralState.factorized(
        PumpEnvelope.gaussian(pump_width), GaussianPhaseMatching(pm_width)
    )
    plus, minus = to_collective(ws, wi)
    expected = math.exp(-(plus**2) / (2.0 * pump_width**2)) * math.exp(
        -(minus**2) / (2.0 * pm_width**2)
    )
    assert abs(complex(state.evaluate(ws, wi)) - expected) < 1e-12


def test_factorized_peak_and_anticorrelated_suppression():
    state = BiphotonSpectralState.factorized(
        PumpEnvelope.gaussian(1.0), GaussianPhaseMatching(1.0)
    )
    peak = complex(state.evaluate(0.0, 0.0))
    assert peak.imag == 0.0 and peak.real > 0.0
    xi = 0.05
    narrow = BiphotonSpectralState.factorized(
        PumpEnvelope.gaussian(xi), GaussianPhaseMatching(1.0)
    )
    x = 0.04
    ratio = complex(narrow.evaluate(x, x)).real / complex(narrow.evaluate(0.0, 0.0)).real
    expected = math.exp(-((2 * x) ** 2) / (2.0 * xi**2)) * math.exp(0.0)
    assert math.isclose(ratio, expected, rel_tol=1e-10)


def test_grid_state_returns_stored_samples_exactly():
    axis = FrequencyAxis(0.0, 2.0, 33)
    rng = np.random.default_rng(7)
    values = rng.normal(size=(33, 33)) + 1j * rng.normal(size=(33, 33))
    state = BiphotonSpectralState.from_grid(axis, axis, values)
    samples = axis.samples
    for i, j in ((0, 0), (16, 7), (32, 32), (5, 20)):
        assert complex(state.evaluate(samples[i], samples[j])) == complex(values[i, j])


def test_normalize_examples_and_idempotence():
    state = BiphotonSpectralState.factorized(
        PumpEnvelope.gaussian(1.3), GaussianPhaseMatching(0.8)
    )
    normalized = state.normalize()
    assert math.isclose(normalized.norm_sq(), 1.0, rel_tol=1e-12)
    again = normalized.normalize()
    assert math.isclose(again.norm_sq(), 1.0, rel_tol=1e-12)
    ws, wi = 0.3, -0.9
    assert abs(complex(again.evaluate(ws, wi)) - complex(normalized.evaluate(ws, wi))) < 1e-12

    scaled = BiphotonSpectralState.factorized(
        PumpEnvelope.gaussian(1.3), GaussianPhaseMatching(0.8).scaled(7.0)
    )
    assert abs(
        complex(scaled.normalize().evaluate(ws, wi))
        - complex(normalized.evaluate(ws, wi))
    ) < 1e-12


@given(
    width=st.floats(0.3, 3.0),
    center=st.floats(0.25, 2.0),
    sign=st.sampled_from([-1, 1]),
)
def test_normalize_is_idempotent_for_two_lobe_states(width, center, sign):
    # Lobes kept clear of each other: an odd pair that nearly coincides
    # cancels, and its norm carries no relative precision to test against.
    pm = TwoLobePhaseMatching(
        GaussianLobe(center, width),
        GaussianLobe(-center, width),
        relative_sign=sign,
    )
    state = BiphotonSpectralState.factorized(PumpEnvelope.strict_delta(), pm)
    once = state.normalize()
    twice = once.normalize()
    assert math.isclose(once.norm_sq(), 1.0, rel_tol=1e-12)
    axis = FrequencyAxis(0.0, 1.0, 5)
    np.testing.assert_allclose(
        once.reduced_samples(axis), twice.reduced_samples(axis), rtol=1e-12
    )


def test_normalize_refuses_a_cancelled_state():
    pm = TwoLobePhaseMatching(
        GaussianLobe(0.0, 1.0), GaussianLobe(0.0, 1.0), relative_sign=-1
    )
    state = BiphotonSpectralState.factorized(PumpEnvelope.strict_delta(), pm)
    with pytest.raises(ValidationError, match="zero-norm"):
        state.normalize()


def test_strict_delta_refusals_and_reduced_samples():
    strict = BiphotonSpectralState.factorized(
        PumpEnvelope.strict_delta(), GaussianPhaseMatching(1.0)
    )
    with pytest.raises(ValidationError):
        strict.evaluate(0.0, 0.0)
    axis = FrequencyAxis(0.0, 3.0, 7)
    np.testing.assert_allclose(
        strict.reduced_samples(axis), np.exp(-axis.samples**2 / 2.0)
    )
    gaussian = BiphotonSpectralState.factorized(
        PumpEnvelope.gaussian(1.0), GaussianPhaseMatching(1.0)
    )
    with pytest.raises(ValidationError):
        gaussian.reduced_samples(axis)


def test_flat_phase_matching_cannot_normalize():
    state = BiphotonSpectralState.factorized(
        PumpEnvelope.strict_delta(), FlatPhaseMatching()
    )
    with pytest.raises(ValidationError):
        state.normalize()


def test_pump_envelope_validation():
    with pytest.raises(ValidationError):
        PumpEnvelope.gaussian(0.0)
    with pytest.raises(ValidationError):
        PumpEnvelope(mode="boxcar")
    with pytest.raises(ValidationError):
        PumpEnvelope.strict_delta().evaluate(0.0)
    with pytest.raises(ValidationError):
        TwoLobePhaseMatching(
            GaussianLobe(1.0, 1.0), GaussianLobe(-1.0, 1.0), relative_sign=2
        )
