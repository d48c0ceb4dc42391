# tests/test_bubbles.py
"""
Bubble, Cutoff and Weighted Norm Tests

Purpose:
- Test bubble evaluation, scale covariance and parameter derivatives
- Test the cutoff ramp, its gradient bound and the sigma validity check
- Test approximate solutions Z / Z* and the weighted sup-norm estimates

Test Coverage:
- unit_profile / bubble_eval / bubble_sum consistency
- dU/dlambda and dU/dx_i against central differences
- eta profile values and constancy on balls
- star_weight, dstar_weight, norm_estimate, build_sample_set
"""

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st

from src.bubbles.approx import ApproxSolution, approx_eval
from src.bubbles.bubble import (
    bubble_dcenter,
    bubble_dlambda,
    bubble_dy,
    bubble_eval,
    bubble_power_sum,
    bubble_sum,
    unit_profile,
)
from src.bubbles.cutoff import (
    cylinder_distance,
    eta_eval,
    eta_gradient_bound,
    eta_is_constant_on_ball,
    make_cutoff,
    ramp,
    reduced_coordinates,
    validate_sigma,
)
from src.bubbles.norms import build_sample_set, dstar_weight, norm_estimate, star_weight
from src.core.exceptions import InvalidConfigException, UsageException
from src.core.models import Bubble, CylinderConfig, EtaProfile
from src.lattice.points import generate_points


def _config(k: int = 8, h: float = 0.3) -> CylinderConfig:
    return CylinderConfig(k=k, r_bar=1.0, h_bar=h, y2_bar=(0.0, 0.0, 0.0))


class TestBubble:
    """Test single bubbles"""

    @pytest.mark.unit
    def test_peak_value(self, params_6):
        """U_{x,lambda}(x) = C_N lambda^{(N-2s)/2}"""
        bubble = Bubble(center=(0.0,) * 6, lam=4.0)
        assert bubble_eval(params_6, bubble, np.zeros(6)) == pytest.approx(params_6.C_N * 4.0 ** 2.1, rel=1e-14)
        assert unit_profile(params_6, 0.0) == pytest.approx(params_6.C_N)

    @pytest.mark.unit
    @given(
        lam=st.floats(min_value=0.1, max_value=100.0),
        z=st.lists(st.floats(min_value=-3.0, max_value=3.0), min_size=6, max_size=6),
    )
    @hyp_settings(max_examples=40, deadline=None)
    def test_scale_covariance(self, params_6, lam, z):
        """U_{x,lambda}(x + z/lambda) = lambda^{(N-2s)/2} U_{0,1}(z)"""
        center = np.array([0.3, -0.2, 0.1, 0.0, 1.0, -1.0])
        z = np.asarray(z)
        bubble = Bubble(center=tuple(center), lam=lam)
        lhs = bubble_eval(params_6, bubble, center + z / lam)
        rhs = lam ** params_6.half_gamma * unit_profile(params_6, float(z @ z))
        assert lhs == pytest.approx(rhs, rel=1e-12)

    @pytest.mark.unit
    def test_batch_matches_pointwise(self, params_6):
        rng = np.random.default_rng(1)
        ys = rng.normal(size=(7, 6))
        bubble = Bubble(center=(1.0, 0.0, 0.0, 0.0, 0.0, 0.0), lam=3.0)
        batch = bubble_eval(params_6, bubble, ys)
        assert batch.shape == (7,)
        for y, value in zip(ys, batch):
            assert bubble_eval(params_6, bubble, y) == pytest.approx(value, rel=1e-15)

    @pytest.mark.unit
    def test_dlambda_matches_difference(self, params_6):
        y = np.array([0.4, 0.1, -0.3, 0.2, 0.0, 0.1])
        lam, step = 2.5, 1e-5
        center = (0.1,) * 6
        fd = (bubble_eval(params_6, Bubble(center=center, lam=lam + step), y)
              - bubble_eval(params_6, Bubble(center=center, lam=lam - step), y)) / (2 * step)
        assert bubble_dlambda(params_6, Bubble(center=center, lam=lam), y) == pytest.approx(fd, rel=1e-7)

    @pytest.mark.unit
    @pytest.mark.parametrize("i", [0, 2, 4])
    def test_dcenter_matches_difference(self, params_6, i):
        y = np.array([0.4, 0.1, -0.3, 0.2, 0.0, 0.1])
        center = np.full(6, 0.1)
        step = 1e-6
        shift = np.zeros(6)
        shift[i] = step
        plus = bubble_eval(params_6, Bubble(center=tuple(center + shift), lam=2.0), y)
        minus = bubble_eval(params_6, Bubble(center=tuple(center - shift), lam=2.0), y)
        bubble = Bubble(center=tuple(center), lam=2.0)
        assert bubble_dcenter(params_6, bubble, y, i) == pytest.approx((plus - minus) / (2 * step), rel=1e-6)
        assert bubble_dy(params_6, bubble, y, i) == -bubble_dcenter(params_6, bubble, y, i)

    @pytest.mark.unit
    def test_sums_over_centers(self, params_6):
        centers = generate_points(_config(k=4))
        y = np.array([[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]])
        expected = sum(bubble_eval(params_6, Bubble(center=tuple(c), lam=5.0), y[0]) for c in centers)
        assert bubble_sum(params_6, centers, 5.0, y)[0] == pytest.approx(expected, rel=1e-13)
        powered = sum(bubble_eval(params_6, Bubble(center=tuple(c), lam=5.0), y[0]) ** 2 for c in centers)
        assert bubble_power_sum(params_6, centers, 5.0, y, 2.0)[0] == pytest.approx(powered, rel=1e-13)

    @pytest.mark.unit
    def test_nonfinite_center_rejected(self):
        with pytest.raises(ValueError):
            Bubble(center=(np.nan, 0.0, 0.0, 0.0, 0.0, 0.0), lam=1.0)


class TestCutoff:
    """Test the cutoff eta"""

    @pytest.mark.unit
    def test_ramp_endpoints(self):
        values = ramp(np.array([-1.0, 0.0, 0.5, 1.0, 2.0]))
        assert values[0] == 1.0 and values[1] == 1.0
        assert values[2] == pytest.approx(0.5)
        assert values[3] == 0.0 and values[4] == 0.0

    @pytest.mark.unit
    def test_eta_levels(self):
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1)
        on_anchor = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        mid = np.array([1.15, 0.0, 0.0, 0.0, 0.0, 0.0])
        far = np.array([0.0, 1.3, 0.0, 0.0, 0.0, 0.0])
        assert eta_eval(cutoff, on_anchor) == 1.0
        assert eta_eval(cutoff, mid) == pytest.approx(0.5)
        assert eta_eval(cutoff, far) == 0.0

    @pytest.mark.unit
    def test_eta_depends_on_reduced_coordinates_only(self):
        """eta is invariant under rotations of y'"""
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1)
        a = np.array([1.12, 0.0, 0.0, 0.05, 0.0, 0.0])
        b = np.array([0.0, 0.0, 1.12, 0.05, 0.0, 0.0])
        assert eta_eval(cutoff, a) == pytest.approx(eta_eval(cutoff, b), rel=1e-14)
        r, y2 = reduced_coordinates(b)
        assert r[0] == pytest.approx(1.12)
        assert y2.shape == (1, 3)
        assert cylinder_distance(cutoff, a)[0] == pytest.approx(np.hypot(0.12, 0.05))

    @pytest.mark.unit
    def test_gradient_bound_matches_slope(self):
        """Central difference of eta never exceeds 1.875 / sigma"""
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1)
        rs = np.linspace(1.0, 1.3, 301)
        ys = np.zeros((rs.size, 6))
        ys[:, 0] = rs
        values = eta_eval(cutoff, ys)
        slope = np.max(np.abs(np.diff(values) / np.diff(rs)))
        assert slope <= eta_gradient_bound(cutoff) * (1 + 1e-9)
        assert slope == pytest.approx(eta_gradient_bound(cutoff), rel=1e-3)

    @pytest.mark.unit
    def test_constant_on_ball(self):
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1)
        center = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
        assert eta_is_constant_on_ball(cutoff, center, 0.05)
        assert not eta_is_constant_on_ball(cutoff, center, 0.15)

    @pytest.mark.unit
    def test_unit_profile(self):
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1, profile=EtaProfile.UNIT)
        assert eta_eval(cutoff, np.full(6, 5.0)) == 1.0
        assert eta_gradient_bound(cutoff) == 0.0

    @pytest.mark.unit
    def test_sigma_factor_default(self):
        assert make_cutoff(2.0, (), sigma_factor=0.2).sigma == pytest.approx(0.4)

    @pytest.mark.unit
    def test_validate_sigma(self, bump_potential):
        small = make_cutoff(1.5, (0.0, 0.0, 0.0), sigma=0.1)
        assert validate_sigma(small, bump_potential, 0.9)
        large = make_cutoff(1.5, (0.0, 0.0, 0.0), sigma=0.2)
        with pytest.raises(InvalidConfigException):
            validate_sigma(large, bump_potential, 0.9)


class TestApproxSolution:
    """Test Z and Z*"""

    @pytest.mark.unit
    def test_without_cutoff_is_bubble_sum(self, params_6):
        sol = ApproxSolution(params_6, _config(), 20.0)
        y = np.array([0.9, 0.1, 0.2, 0.0, 0.0, 0.0])
        assert approx_eval(sol, y) == pytest.approx(float(sol.bubble_total(y)[0]), rel=1e-15)
        assert sol.k == 8
        assert len(sol.bubbles) == 16

    @pytest.mark.unit
    def test_cutoff_kills_far_field(self, params_6):
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1)
        sol = ApproxSolution(params_6, _config(), 20.0, cutoff)
        assert approx_eval(sol, np.array([0.0, 0.0, 0.0, 3.0, 0.0, 0.0])) == 0.0
        near = generate_points(_config())[0]
        assert approx_eval(sol, near) == pytest.approx(approx_eval(sol.without_cutoff(), near))

    @pytest.mark.unit
    def test_from_centers(self, params_6):
        sol = ApproxSolution.from_centers(params_6, [[0.0] * 6], 2.0)
        assert approx_eval(sol, np.zeros(6)) == pytest.approx(params_6.C_N * 2.0 ** 2.1)
        with pytest.raises(UsageException):
            ApproxSolution.from_centers(params_6, [[0.0] * 5], 2.0)

    @pytest.mark.unit
    def test_invalid_arguments(self, params_6):
        with pytest.raises(UsageException):
            ApproxSolution(params_6, _config(), 0.0)
        with pytest.raises(UsageException):
            ApproxSolution(params_6, CylinderConfig(k=4, r_bar=1.0, h_bar=0.1, y2_bar=(0.0, 0.0)), 1.0)


class TestNorms:
    """Test the weighted sup-norm estimates"""

    @pytest.mark.unit
    def test_single_bubble_star_norm(self, params_6):
        """||U||_* for one bubble is at least C_N and bounded on the sample set"""
        center = np.zeros((1, 6))
        lam = 10.0
        bubble = Bubble(center=(0.0,) * 6, lam=lam)
        samples = np.vstack([center, np.eye(6) * 0.05, np.eye(6) * 1.0])
        estimate = norm_estimate(
            lambda y: bubble_eval(params_6, bubble, y),
            lambda y: star_weight(params_6, center, lam, y),
            samples,
        )
        at_center = bubble_eval(params_6, bubble, np.zeros(6)) / star_weight(params_6, center, lam, np.zeros(6))
        assert np.isfinite(estimate)
        assert estimate >= at_center
        assert estimate <= params_6.C_N * 2.0 ** params_6.half_gamma * (1.0 + lam) ** params_6.tau

    @pytest.mark.unit
    def test_weights_scale(self, params_6):
        center = np.zeros((1, 6))
        assert star_weight(params_6, center, 4.0, np.zeros(6)) == pytest.approx(4.0 ** 2.1)
        assert dstar_weight(params_6, center, 4.0, np.zeros(6)) == pytest.approx(4.0 ** 3.9)

    @pytest.mark.unit
    def test_empty_sample_set(self):
        with pytest.raises(UsageException):
            norm_estimate(np.array([]), np.array([]), np.empty((0, 6)))

    @pytest.mark.unit
    def test_sample_set(self, params_6):
        cutoff = make_cutoff(1.0, (0.0, 0.0, 0.0), sigma=0.1)
        samples = build_sample_set(params_6, _config(), 50.0, cutoff, n_far=8, seed=3)
        assert samples.ndim == 2 and samples.shape[1] == 6
        assert np.unique(samples, axis=0).shape[0] == samples.shape[0]
        assert any(np.allclose(row, generate_points(_config())[0]) for row in samples)
        again = build_sample_set(params_6, _config(), 50.0, cutoff, n_far=8, seed=3)
        np.testing.assert_array_equal(samples, again)

    @pytest.mark.unit
    def test_sample_set_bounds_bubble_sum(self, params_6):
        """Z* has a finite ||.||_* estimate on the structured set"""
        sol = ApproxSolution(params_6, _config(), 50.0)
        samples = build_sample_set(params_6, _config(), 50.0, n_far=4)
        estimate = norm_estimate(
            lambda y: approx_eval(sol, y),
            lambda y: star_weight(params_6, _config(), 50.0, y),
            samples,
        )
        assert 0.0 < estimate < 10.0 * params_6.C_N
