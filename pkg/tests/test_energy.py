# tests/test_energy.py
"""
Energy Reduction Tests

Purpose:
- Test potentials and their analytic derivatives
- Test the energy constants and the leading-order energy expansion
- Test the reduced system, the critical point of r^{2s} V and the scaling sweep
- Test the direct Monte Carlo energy oracle on configurations with known answers

Test Coverage:
- PotentialModel families, gradient, Hessian and Cartesian helpers
- compute_constants, energy_expansion, grad_lambda, grad_h, grad_r, grad_y
- safeguarded_newton, solve_reduced_system, find_critical_point, reduced_solution
- sweep_scaling slopes, regime_point, energy_of_bubbles, energy_direct_oracle
"""

import math

import numpy as np
import pytest

from src.core.exceptions import (
    CriticalPointDomainException,
    DomainException,
    InvalidConfigException,
    NumericException,
    UsageException,
)
from src.core.models import CylinderConfig, PotentialFamily, PotentialSpec, RegimeSpec
from src.energy.constants import compute_constants
from src.energy.expansion import (
    energy_expansion,
    grad_h,
    grad_lambda,
    grad_r,
    grad_y,
    h_exponent,
    in_regime,
    interaction_energy_exact,
    lambda_exponent,
    regime_bounds,
    regime_point,
)
from src.energy.oracle import energy_direct_oracle, energy_of_bubbles
from src.energy.potentials import PotentialModel
from src.energy.reduced import find_critical_point, reduced_solution, safeguarded_newton, solve_reduced_system
from src.energy.sweep import fit_loglog_slope, sweep_scaling
from src.integrals.radial import radial_moment
from src.processing.verification_pipeline import five_point_derivative

from tests.conftest import R_STAR_BUMP

FD_TOL = 1e-8
SLOPE_TOL = 1e-10
Y2_ZERO = (0.0, 0.0, 0.0)


@pytest.fixture(scope="module")
def constants_6(params_6):
    return compute_constants(params_6, R_STAR_BUMP)


def _inside_point(params, k: int):
    """Geometric centre of the (lambda, h) regime box"""
    b = regime_bounds(params.N, params.s, k)
    return math.sqrt(b["lam_min"] * b["lam_max"]), 0.5 * (b["h_min"] + b["h_max"])


class TestPotentials:
    """Test V(r, y'') families"""

    @pytest.mark.unit
    def test_gaussian_bump_values(self, bump_potential):
        assert bump_potential.value(np.array([1.0]), np.zeros((1, 3)))[0] == pytest.approx(1.0)
        assert bump_potential.value(np.array([2.0]), np.zeros((1, 3)))[0] == pytest.approx(math.exp(-1.0))
        assert bump_potential.tag == "gaussian_bump"

    @pytest.mark.unit
    @pytest.mark.parametrize("family", ["gaussian_bump", "saddle"])
    def test_gradient_matches_difference(self, family):
        spec = PotentialSpec(family=PotentialFamily(family), a=0.5, r_center=1.2, y_center=[0.1, -0.2, 0.0])
        V = PotentialModel.from_spec(spec, 6)
        x = np.array([1.4, 0.3, 0.1, -0.2])
        dr, dy = V.gradient(x[:1], x[None, 1:])
        grad = np.concatenate([dr, dy[0]])
        step = 1e-6
        for j in range(4):
            e = np.zeros(4)
            e[j] = step
            fd = (V.value(x[:1] + e[:1], (x[1:] + e[1:])[None, :])[0]
                  - V.value(x[:1] - e[:1], (x[1:] - e[1:])[None, :])[0]) / (2 * step)
            assert grad[j] == pytest.approx(fd, rel=1e-6, abs=1e-10)

    @pytest.mark.unit
    def test_hessian_symmetric(self, bump_potential):
        hess = bump_potential.hessian(1.3, [0.1, 0.0, -0.1])
        np.testing.assert_allclose(hess, hess.T)
        # V = exp(-q): d^2V/dr^2 at r = r_c, y'' = 0 equals -2
        at_peak = bump_potential.hessian(1.0, [0.0, 0.0, 0.0])
        assert at_peak[0, 0] == pytest.approx(-2.0, rel=1e-6)

    @pytest.mark.unit
    def test_cartesian_helpers(self, bump_potential):
        y = np.array([[0.6, 0.8, 0.0, 0.2, 0.0, 0.0]])
        grad = bump_potential.grad_at(y)
        assert grad.shape == (1, 6)
        assert bump_potential.radial_euler(y)[0] == pytest.approx(float(grad[0] @ y[0]), rel=1e-12)
        assert bump_potential.value_at(y)[0] == pytest.approx(math.exp(-0.04))

    @pytest.mark.unit
    def test_scaled(self, bump_potential):
        y = np.array([[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]])
        assert bump_potential.scaled(3.0).value_at(y)[0] == pytest.approx(3.0)

    @pytest.mark.unit
    def test_y_center_length(self):
        with pytest.raises(InvalidConfigException):
            PotentialModel.gaussian_bump(6, y_center=[0.0])


class TestConstants:
    """Test A and B constants"""

    @pytest.mark.unit
    def test_relations(self, params_6, constants_6):
        g = params_6.gamma
        assert constants_6.B3 == pytest.approx(constants_6.A2 / constants_6.A1 * constants_6.B2, rel=1e-14)
        assert constants_6.B2 == pytest.approx(constants_6.A1 * constants_6.A5 / R_STAR_BUMP ** g, rel=1e-14)
        assert constants_6.B0 == pytest.approx(2 * 0.9 / 6 * radial_moment(params_6, params_6.two_s_star),
                                               rel=1e-12)
        assert constants_6.D2 == pytest.approx(g * constants_6.B2 / (1.8 * constants_6.B1), rel=1e-14)
        assert set(constants_6.notes) == {"A2", "A6"}

    @pytest.mark.unit
    def test_r_bar_scaling(self, params_6):
        one = compute_constants(params_6, 1.0)
        two = compute_constants(params_6, 2.0)
        assert two.B2 == pytest.approx(one.B2 * 2.0 ** (-params_6.gamma), rel=1e-13)
        assert two.B0 == one.B0

    @pytest.mark.unit
    def test_nonpositive_r_bar(self, params_6):
        with pytest.raises(DomainException):
            compute_constants(params_6, 0.0)


class TestExpansion:
    """Test the energy expansion and its derivatives"""

    @pytest.mark.unit
    def test_exponents(self):
        assert lambda_exponent(6, 0.9) == pytest.approx(1.75, rel=1e-15)
        assert h_exponent(6, 0.9) == pytest.approx(-3.2 / 5.2, rel=1e-15)

    @pytest.mark.unit
    def test_terms_sum_to_total(self, params_6, constants_6):
        lam, h = _inside_point(params_6, 8)
        e = energy_expansion(constants_6, 0.9, 8, lam, h)
        assert e.total == pytest.approx(e.base + e.potential + e.same_side + e.cross_side, rel=1e-15)
        assert e.in_regime
        assert e.same_side < 0.0 and e.cross_side < 0.0 and e.potential > 0.0
        assert "lambda" in e.order_tag

    @pytest.mark.unit
    def test_out_of_regime_is_flagged(self, params_6, constants_6):
        lam, h = _inside_point(params_6, 8)
        assert not energy_expansion(constants_6, 0.9, 8, 100.0 * lam, h).in_regime
        assert not in_regime(6, 0.9, 8, lam, 0.99)

    @pytest.mark.unit
    def test_custom_regime(self):
        wide = RegimeSpec(L0=0.01, L1=100.0, M0=0.01, M1=100.0)
        assert regime_bounds(6, 0.9, 8, wide)["lam_max"] == pytest.approx(100.0 * 8 ** 1.75)
        with pytest.raises(ValueError):
            RegimeSpec(L0=2.0, L1=1.0)

    @pytest.mark.unit
    @pytest.mark.parametrize("lam,h", [(0.0, 0.1), (10.0, 0.0), (10.0, 1.0)])
    def test_invalid_arguments(self, constants_6, lam, h):
        with pytest.raises(DomainException):
            energy_expansion(constants_6, 0.9, 8, lam, h)

    @pytest.mark.numeric
    @pytest.mark.parametrize("k", [4, 8, 32])
    def test_grad_lambda_and_h(self, params_6, constants_6, k):
        lam, h = _inside_point(params_6, k)

        def varying(lam_, h_):
            e = energy_expansion(constants_6, 0.9, k, lam_, h_)
            return e.potential + e.same_side + e.cross_side

        value = abs(varying(lam, h))
        fd = five_point_derivative(lambda x: varying(x, h), lam, 1e-3 * lam)
        an = grad_lambda(constants_6, 0.9, k, lam, h)
        assert abs(fd - an) / (abs(an) + value / lam) <= FD_TOL
        fd = five_point_derivative(lambda x: varying(lam, x), h, 1e-3 * h)
        an = grad_h(constants_6, 0.9, k, lam, h)
        assert abs(fd - an) / (abs(an) + value / h) <= FD_TOL

    @pytest.mark.numeric
    def test_grad_position(self, params_6, constants_6):
        """grad_r and grad_y against differences of k B1 V / lambda^{2s} + exact interaction"""
        V = PotentialModel.gaussian_bump(6, y_center=[0.2, 0.0, 0.0])
        k = 8
        lam, h = _inside_point(params_6, k)
        r0, y0 = 1.3, [0.1, 0.0, -0.1]

        def position_energy(r, y2):
            shifted = CylinderConfig(k=k, r_bar=r, h_bar=h, y2_bar=tuple(y2))
            v = float(V.value(np.array([r]), np.asarray(y2)[None, :])[0])
            return k * constants_6.B1 * v / lam ** 1.8 + interaction_energy_exact(constants_6, shifted, lam)

        config = CylinderConfig(k=k, r_bar=r0, h_bar=h, y2_bar=tuple(y0))
        an = grad_r(constants_6, V, config, lam)
        fd = five_point_derivative(lambda x: position_energy(x, y0), r0, 1e-3 * r0)
        assert abs(fd - an) / (abs(an) + abs(position_energy(r0, y0)) / r0) <= FD_TOL

        def along(x):
            return position_energy(r0, [y0[0], y0[1], x])

        an = grad_y(constants_6, V, config, lam, 6)
        fd = five_point_derivative(along, y0[2], 1e-3)
        assert abs(fd - an) / (abs(an) + abs(along(y0[2]))) <= FD_TOL

    @pytest.mark.unit
    def test_grad_y_axis_range(self, constants_6, bump_potential):
        config = CylinderConfig(k=8, r_bar=1.0, h_bar=0.1, y2_bar=Y2_ZERO)
        with pytest.raises(UsageException):
            grad_y(constants_6, bump_potential, config, 10.0, 3)


class TestReducedSystem:
    """Test the reduced system and the critical point"""

    @pytest.mark.unit
    def test_safeguarded_newton(self):
        root, iterations = safeguarded_newton(lambda x: (x * x - 2.0, 2.0 * x), 0.0, 2.0)
        assert root == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert iterations > 0
        assert safeguarded_newton(lambda x: (x - 1.0, 1.0), 1.0, 3.0) == (1.0, 0)
        with pytest.raises(NumericException):
            safeguarded_newton(lambda x: (x * x + 1.0, 2.0 * x), -1.0, 1.0)

    @pytest.mark.unit
    def test_solve_reduced_system(self, params_6, constants_6):
        t1, t2 = solve_reduced_system(constants_6, 0.8)
        g, q = params_6.gamma, 6 - 3.6
        assert abs(-t1 + constants_6.D1 / t1 ** g) / t1 <= 1e-10
        assert abs(constants_6.D2 - 0.8 * t2 ** q) / constants_6.D2 <= 1e-10
        with pytest.raises(DomainException):
            solve_reduced_system(constants_6, 0.0)

    @pytest.mark.numeric
    def test_gaussian_bump_critical_point(self, params_6, bump_potential):
        """r* = (1 + sqrt(1 + 4s))/2 for V = exp(-((r-1)^2 + |y''|^2))"""
        cp = find_critical_point(params_6, bump_potential, (1.2, None))
        assert cp.r_star == pytest.approx(R_STAR_BUMP, abs=1e-8)
        assert R_STAR_BUMP == pytest.approx(1.57238, abs=1e-5)
        np.testing.assert_allclose(cp.y2_star, 0.0, atol=1e-8)
        assert cp.nondegenerate
        # strict maximum in 4 reduced variables
        assert cp.jac_det_sign == 1
        assert cp.gradient_norm <= 1e-8

    @pytest.mark.numeric
    def test_saddle_critical_point(self, params_6):
        spec = PotentialSpec(family=PotentialFamily.SADDLE, a=0.0, b=1.0, r_center=1.0)
        cp = find_critical_point(params_6, PotentialModel.from_spec(spec, 6), (1.2, [0.1, 0.1, 0.1]))
        assert cp.r_star == pytest.approx(R_STAR_BUMP, abs=1e-7)
        assert cp.nondegenerate
        assert cp.jac_det_sign == -1

    @pytest.mark.numeric
    def test_constant_potential_drifts_to_axis(self, params_6, constant_potential):
        with pytest.raises(CriticalPointDomainException):
            find_critical_point(params_6, constant_potential, (1.2, None))

    @pytest.mark.unit
    def test_nonpositive_initial_radius(self, params_6, bump_potential):
        with pytest.raises(DomainException):
            find_critical_point(params_6, bump_potential, (0.0, None))

    @pytest.mark.numeric
    def test_reduced_solution(self, params_6, constants_6, bump_potential):
        solution = reduced_solution(params_6, constants_6, bump_potential, (1.2, None))
        V_star = math.exp(-(R_STAR_BUMP - 1.0) ** 2)
        assert (solution.t1, solution.t2) == pytest.approx(solve_reduced_system(constants_6, V_star), rel=1e-8)
        assert solution.nondegenerate


class TestScalingSweep:
    """Test the log-log scaling laws"""

    @pytest.mark.unit
    def test_fit_slope(self):
        x = np.array([1.0, 2.0, 4.0, 8.0])
        assert fit_loglog_slope(x, 3.0 * x ** 2) == pytest.approx(2.0, abs=1e-12)

    @pytest.mark.numeric
    def test_slopes_are_exact(self, params_6, bump_potential):
        sweep = sweep_scaling(params_6, bump_potential, [8, 16, 32, 64])
        assert abs(sweep["slope_lambda"] - 1.75) <= SLOPE_TOL
        assert abs(sweep["slope_h"] - (-3.2 / 5.2)) <= SLOPE_TOL
        assert sweep["r_bar"] == pytest.approx(R_STAR_BUMP, abs=1e-8)
        assert list(sweep["table"].columns) == ["k", "t1", "t2", "h_k", "lambda_k"]

    @pytest.mark.unit
    def test_short_k_list(self, params_6, bump_potential):
        with pytest.raises(UsageException):
            sweep_scaling(params_6, bump_potential, [8, 16, 32], point=(1.0, Y2_ZERO))
        with pytest.raises(UsageException):
            sweep_scaling(params_6, bump_potential, [8, 16, 16, 32], point=(1.0, Y2_ZERO))

    @pytest.mark.unit
    def test_regime_point(self, params_6, constants_6):
        h, lam = regime_point(params_6, constants_6, 0.8, 16)
        t1, t2 = solve_reduced_system(constants_6, 0.8)
        assert h == pytest.approx(t1 * 16 ** h_exponent(6, 0.9))
        assert lam == pytest.approx(t2 * 16 ** 1.75)
        bounds = regime_bounds(6, 0.9, 16)
        assert regime_point(params_6, constants_6, 0.8, 16, which="upper") == (bounds["h_max"], bounds["lam_max"])
        with pytest.raises(UsageException):
            regime_point(params_6, constants_6, 0.8, 16, which="middle")


class TestEnergyOracle:
    """Test the direct Monte Carlo energy"""

    @pytest.mark.mc
    def test_single_bubble_energy(self, params_6, constant_potential, small_mc):
        """I(U) = (s/N) int U^{2_s^*} + 1/2 lambda^{-2s} int U_{0,1}^2 for V = 1"""
        lam = 5.0
        result = energy_of_bubbles(params_6, [[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]], lam, constant_potential, small_mc)
        expected = (0.9 / 6.0 * radial_moment(params_6, params_6.two_s_star)
                    + 0.5 * lam ** (-1.8) * radial_moment(params_6, 2.0))
        assert result["total"] == pytest.approx(expected, rel=1e-9)
        assert result["interaction_part"] == 0.0

    @pytest.mark.mc
    @pytest.mark.slow
    def test_oracle_interaction_matches_lattice(self, params_6, bump_potential, small_mc):
        """Pairwise MC interactions against A5 times the exact lattice sums"""
        config = CylinderConfig(k=4, r_bar=1.0, h_bar=0.3, y2_bar=Y2_ZERO)
        oracle = energy_direct_oracle(params_6, config, 100.0, bump_potential, small_mc)
        slack = 4.0 * oracle["interaction_stderr"] / oracle["interaction_target"]
        assert oracle["interaction_relerr"] <= 0.05 + slack
        assert oracle["gradient_part"] > 0.0 and oracle["power_part"] > 0.0
        assert np.isfinite(oracle["stderr"])
