import math

import numpy as np
import pytest

from homcat import (
    FarFieldError,
    GaussianLobe,
    GridResolutionError,
    SlitConfig,
    ValidationError,
    analytic_young,
    compare_parity,
    fractional_propagation,
    matched_parity_axis,
    time_resolved_trace,
    young_joint_detection,
)

WAVENUMBER = 2.0 * math.pi / 780e-9

# P(pbar)/P(0) from an independent quadrature of the slit amplitude,
# frozen before the tests were written.
FROZEN_RATIOS = {
    25000.0: 0.9207047862408309,
    60000.0: 0.25820395426633014,
}
DARK_FRINGE = 13089.969389957471


def stage_config(**overrides) -> SlitConfig:
    params = dict(
        slit_width=1e-5,
        x_a=6e-5,
        x_b=-6e-5,
        wavenumber=WAVENUMBER,
        screen_distance=20.0,
    )
    params.update(overrides)
    return SlitConfig(**params)


def symmetric_grid(span: float, n: int) -> np.ndarray:
    spacing = 2.0 * span / (n - 1)
    return spacing * (np.arange(n) - (n - 1) // 2)


class TestMomentumTrace:
    def test_frozen_ratios_and_closed_form(self):
        config = stage_config()
        pbar = np.array([0.0, DARK_FRINGE] + sorted(FROZEN_RATIOS))
        trace = young_joint_detection(config, pbar=pbar)
        assert trace.values[0] == 1.0
        assert abs(trace.values[1]) < 1e-8
        for value, p in zip(trace.values[2:], sorted(FROZEN_RATIOS)):
            assert abs(value - FROZEN_RATIOS[p]) < 1e-8
        closed = analytic_young(config, pbar)
        assert np.max(np.abs(trace.values - closed / closed[0])) < 1e-4

    def test_trace_is_even_with_a_bright_center(self):
        config = stage_config()
        pbar = symmetric_grid(4e5, 1601)
        trace = young_joint_detection(config, pbar=pbar)
        np.testing.assert_array_equal(trace.values, trace.values[::-1])
        assert int(np.argmax(trace.values)) == 800
        assert np.max(trace.values) == 1.0

    def test_coincident_slits_leave_the_bare_envelope(self):
        config = stage_config(x_a=3e-5, x_b=3e-5)
        assert config.separation == 0.0
        pbar = symmetric_grid(3e5, 301)
        trace = young_joint_detection(config, pbar=pbar)
        envelope = np.exp(-(pbar**2) * config.slit_width**2)
        assert np.max(np.abs(trace.values - envelope)) < 1e-6

    def test_fringe_maxima_spacing(self):
        config = stage_config()
        pbar = np.linspace(-1e5, 1e5, 4001)
        trace = young_joint_detection(config, pbar=pbar)
        v = trace.values
        interior = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])) + 1
        spacings = np.diff(pbar[interior])
        period = math.pi / config.separation
        assert len(spacings) >= 4
        assert np.max(np.abs(spacings - period)) < 0.02 * period

    def test_quadrature_count_is_validated(self):
        config = stage_config()
        with pytest.raises(ValidationError):
            young_joint_detection(config, n_quad=4096)
        with pytest.raises(ValidationError):
            young_joint_detection(config, n_quad=99)


class TestFresnel:
    def test_near_screen_is_refused_without_the_exact_phase(self):
        near = stage_config(screen_distance=0.5)
        assert near.far_field_ratio() < 100.0
        with pytest.raises(FarFieldError):
            young_joint_detection(near)
        pbar = np.linspace(-1e5, 1e5, 201)
        trace = young_joint_detection(near, pbar=pbar, exact_fresnel=True)
        assert trace.values.shape == pbar.shape

    def test_fraunhofer_limit_emerges_with_distance(self):
        pbar = np.linspace(-1e5, 1e5, 401)
        reference = young_joint_detection(
            stage_config(screen_distance=1e4), pbar=pbar
        )
        errors = []
        for z in (0.5, 5.0, 50.0):
            fresnel = young_joint_detection(
                stage_config(screen_distance=z), pbar=pbar, exact_fresnel=True
            )
            errors.append(float(np.max(np.abs(fresnel.values - reference.values))))
        assert errors[0] > errors[1] > errors[2]
        assert errors[2] < 1e-4

    def test_undersampled_fresnel_phase_is_refused(self):
        near = stage_config(screen_distance=0.5)
        pbar = np.linspace(-5e5, 5e5, 11)
        with pytest.raises(GridResolutionError):
            young_joint_detection(near, pbar=pbar, exact_fresnel=True, n_quad=101)


class TestFractional:
    def test_far_field_angle_reproduces_the_fringes(self):
        config = stage_config()
        u = matched_parity_axis(12.0)
        trace = fractional_propagation(config, math.pi / 2.0, u=u)
        origin = int(np.argmin(np.abs(u)))
        normalized = trace.values / trace.values[origin]
        closed = analytic_young(config, u / config.slit_width)
        assert np.max(np.abs(normalized - closed / closed[origin])) < 1e-12

    def test_near_field_angle_shows_two_humps(self):
        config = stage_config()
        trace = fractional_propagation(config, 0.0)
        v = trace.values
        interior = np.flatnonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:])) + 1
        assert len(interior) == 2
        big_d = config.separation / config.slit_width
        np.testing.assert_allclose(
            trace.u[interior], [-big_d, big_d], rtol=0, atol=0.05
        )
        origin = int(np.argmin(np.abs(trace.u)))
        assert v[origin] < 1e-30 * np.max(v)

    def test_marginal_is_nonnegative_at_intermediate_angles(self):
        config = stage_config()
        for theta in (0.2, math.pi / 4.0, 1.2):
            trace = fractional_propagation(config, theta)
            assert np.min(trace.values) > -1e-15

    def test_angle_range_is_validated(self):
        config = stage_config()
        for theta in (-0.1, math.pi / 2.0 + 0.1):
            with pytest.raises(ValidationError):
                fractional_propagation(config, theta)


class TestParity:
    def test_the_two_experiments_are_the_two_parities_of_one_cat(self):
        ratio = 12.0
        config = stage_config()
        assert config.separation / config.slit_width == ratio
        u = matched_parity_axis(ratio)

        # Delay domain: detection-time beating of the marked collective lobe,
        # in unit-envelope scaling (sigma = 1 makes u the time difference).
        hom = time_resolved_trace(GaussianLobe(ratio, 1.0), u, scaled=True)
        # Momentum domain: peak-normalized far-field fringes at u = pbar w.
        young = young_joint_detection(config, pbar=u / config.slit_width)

        report = compare_parity(u, hom.values, young.values, ratio, ratio)
        assert report.passes
        assert report.hom_at_origin == 0.0
        assert report.young_origin_deficit == 0.0
        assert report.envelope_max_error < 1e-6
        assert report.fringe_shift_max_error < 1e-6

    def test_mismatched_ratios_are_refused(self):
        u = matched_parity_axis(12.0)
        flat = np.zeros_like(u)
        with pytest.raises(ValidationError):
            compare_parity(u, flat, flat, 12.0, 13.0)

    def test_unmatched_grids_are_refused(self):
        u = matched_parity_axis(12.0)
        flat = np.zeros_like(u)
        with pytest.raises(ValidationError):
            compare_parity(u + 0.5 * (u[1] - u[0]), flat, flat, 12.0, 12.0)
        with pytest.raises(ValidationError):
            compare_parity(np.linspace(-5.0, 5.0, u.size), flat, flat, 12.0, 12.0)
        with pytest.raises(ValidationError):
            compare_parity(u[:-1], flat, flat[:-1], 12.0, 12.0)

    def test_matched_axis_divides_the_half_period(self):
        for ratio, spp in ((12.0, 8), (5.0, 16), (2.5, 4)):
            u = matched_parity_axis(ratio, samples_per_half_period=spp)
            du = u[1] - u[0]
            steps = (0.5 * math.pi / ratio) / du
            assert abs(steps - round(steps)) < 1e-9
            assert u[0] == -u[-1]
            assert u[(u.size - 1) // 2] == 0.0
        with pytest.raises(ValidationError):
            matched_parity_axis(-1.0)
        with pytest.raises(ValidationError):
            matched_parity_axis(12.0, samples_per_half_period=1)


class TestConfigValidation:
    def test_narrow_source_is_refused(self):
        with pytest.raises(ValidationError):
            stage_config(source_width=5e-5)
        config = stage_config(source_width=2e-4)
        assert config.source_width == 2e-4

    def test_default_source_tracks_the_slit_width(self):
        assert stage_config().source_width == 1.0

    def test_geometry_is_validated(self):
        with pytest.raises(ValidationError):
            stage_config(slit_width=0.0)
        with pytest.raises(ValidationError):
            stage_config(wavenumber=-1.0)
        with pytest.raises(ValidationError):
            stage_config(screen_distance=0.0)
        with pytest.raises(ValidationError):
            stage_config(x_a=math.inf)
