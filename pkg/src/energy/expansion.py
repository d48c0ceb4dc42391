# src/energy/expansion.py
"""
Leading terms of the reduced energy I(Z) for the doubled cylinder and its
derivatives in lambda, h_bar, r_bar and y''.

Only retained terms are evaluated; the neglected orders are reported as a
tag, never estimated.
"""
import logging
import math
from typing import Dict, Optional, Tuple

import numpy as np

from src.core.config import settings
from src.core.exceptions import DomainException, UsageException
from src.core.models import CylinderConfig, EnergyConstants, EnergyExpansion, PhysicalParams, RegimeSpec
from src.lattice.sums import lattice_sum_exact

logger = logging.getLogger(__name__)

ORDER_TAG = "k*O(lambda^(-2s-eps))"


def _gamma(constants: EnergyConstants) -> float:
    return constants.N - 2.0 * constants.s


def _check_args(lam: float, h_bar: float):
    if not lam > 0.0:
        raise DomainException(f"lambda must be positive, got {lam}", "lam", lam)
    if not 0.0 < h_bar < 1.0:
        raise DomainException(f"h_bar must lie in (0, 1), got {h_bar}", "h_bar", h_bar)


def _regime(regime: Optional[RegimeSpec]) -> RegimeSpec:
    return regime if regime is not None else RegimeSpec(**settings.regime)


def lambda_exponent(N: int, s: float) -> float:
    """(N - 2s)/(N - 4s)"""
    return (N - 2.0 * s) / (N - 4.0 * s)


def h_exponent(N: int, s: float) -> float:
    """-(N - 2s - 1)/(N - 2s + 1)"""
    g = N - 2.0 * s
    return -(g - 1.0) / (g + 1.0)


def regime_bounds(N: int, s: float, k: int, regime: Optional[RegimeSpec] = None) -> Dict[str, float]:
    """Admissible (lambda, h_bar) box for k"""
    reg = _regime(regime)
    lam_scale = k ** lambda_exponent(N, s)
    h_scale = k ** h_exponent(N, s)
    return {
        "lam_min": reg.L0 * lam_scale,
        "lam_max": reg.L1 * lam_scale,
        "h_min": reg.M0 * h_scale,
        "h_max": reg.M1 * h_scale,
    }


def in_regime(N: int, s: float, k: int, lam: float, h_bar: float, regime: Optional[RegimeSpec] = None) -> bool:
    b = regime_bounds(N, s, k, regime)
    return b["lam_min"] <= lam <= b["lam_max"] and b["h_min"] <= h_bar <= b["h_max"]


def energy_expansion(constants: EnergyConstants, V_val: float, k: int, lam: float, h_bar: float,
                     regime: Optional[RegimeSpec] = None) -> EnergyExpansion:
    """k (B0 + B1 V/lam^{2s} - B2 k^g/(lam^g (1-h^2)^{g/2}) - B3 k/(lam^g h^{g-1} sqrt(1-h^2)))"""
    _check_args(lam, h_bar)
    g, s = _gamma(constants), constants.s
    root = math.sqrt(1.0 - h_bar * h_bar)
    base = k * constants.B0
    potential = k * constants.B1 * V_val / lam ** (2.0 * s)
    same = -k * constants.B2 * k ** g / (lam ** g * root ** g)
    cross = -k * constants.B3 * k / (lam ** g * h_bar ** (g - 1.0) * root)
    regime_ok = in_regime(constants.N, s, k, lam, h_bar, regime)
    if not regime_ok:
        logger.warning("energy_expansion outside the scaling regime: k=%d lambda=%.4g h=%.4g", k, lam, h_bar)
    return EnergyExpansion(
        base=base,
        potential=potential,
        same_side=same,
        cross_side=cross,
        total=base + potential + same + cross,
        order_tag=ORDER_TAG,
        in_regime=regime_ok,
    )


def grad_lambda(constants: EnergyConstants, V_val: float, k: int, lam: float, h_bar: float) -> float:
    """d/d lambda of the retained terms"""
    _check_args(lam, h_bar)
    g, s = _gamma(constants), constants.s
    root = math.sqrt(1.0 - h_bar * h_bar)
    return k * (-2.0 * s * constants.B1 * V_val / lam ** (2.0 * s + 1.0)
                + g * constants.B2 * k ** g / (lam ** (g + 1.0) * root ** g)
                + g * constants.B3 * k / (lam ** (g + 1.0) * h_bar ** (g - 1.0) * root))


def grad_h(constants: EnergyConstants, V_val: float, k: int, lam: float, h_bar: float) -> float:
    """d/d h_bar of the retained terms"""
    _check_args(lam, h_bar)
    g = _gamma(constants)
    one_m = 1.0 - h_bar * h_bar
    lam_g = lam ** g
    return k * (-g * constants.B2 * h_bar * k ** g / (lam_g * one_m ** (0.5 * (g + 2.0)))
                + (g - 1.0) * constants.B3 * k / (lam_g * h_bar ** g * math.sqrt(one_m))
                - constants.B3 * k * h_bar ** (2.0 - g) / (lam_g * one_m ** 1.5))


def _exact_sums(config: CylinderConfig, g: float) -> Tuple[float, float]:
    same = lattice_sum_exact(config, g, "same_side")
    cross = lattice_sum_exact(config, g, "cross_side")
    return same, cross


def interaction_energy_exact(constants: EnergyConstants, config: CylinderConfig, lam: float) -> float:
    """-k A5 lam^{-g} (S_same + S_cross) with exact lattice sums"""
    g = _gamma(constants)
    same, cross = _exact_sums(config, g)
    return -config.k * constants.A5 * (same + cross) / lam ** g


def grad_r(constants: EnergyConstants, potential, config: CylinderConfig, lam: float) -> float:
    """k (B1 dV/dr / lam^{2s} + g A5/(r lam^g) (S_same + S_cross))"""
    if not lam > 0.0:
        raise DomainException(f"lambda must be positive, got {lam}", "lam", lam)
    g, s = _gamma(constants), constants.s
    dr, _ = potential.gradient(np.array([config.r_bar]), np.asarray(config.y2_bar, dtype=float)[None, :])
    same, cross = _exact_sums(config, g)
    return config.k * (constants.B1 * float(dr[0]) / lam ** (2.0 * s)
                       + g * constants.A5 / (config.r_bar * lam ** g) * (same + cross))


def grad_y(constants: EnergyConstants, potential, config: CylinderConfig, lam: float, axis: int) -> float:
    """k B1/lam^{2s} dV/dy_j for the coordinate y_j, j in 4..N"""
    if not 4 <= axis <= constants.N:
        raise UsageException(f"axis must lie in 4..{constants.N}, got {axis}", "axis")
    _, dy = potential.gradient(np.array([config.r_bar]), np.asarray(config.y2_bar, dtype=float)[None, :])
    return config.k * constants.B1 / lam ** (2.0 * constants.s) * float(dy[0, axis - 4])


def regime_point(params: PhysicalParams, constants: EnergyConstants, V_val: float, k: int,
                 regime: Optional[RegimeSpec] = None, which: str = "scaling") -> Tuple[float, float]:
    """(h_bar_k, lambda_k): the reduced-system scaling or an edge of the regime box"""
    from src.energy.reduced import solve_reduced_system

    N, s = params.N, params.s
    if which == "scaling":
        t1, t2 = solve_reduced_system(constants, V_val)
        return t1 * k ** h_exponent(N, s), t2 * k ** lambda_exponent(N, s)
    bounds = regime_bounds(N, s, k, regime)
    if which == "lower":
        return bounds["h_min"], bounds["lam_min"]
    if which == "upper":
        return bounds["h_max"], bounds["lam_max"]
    raise UsageException(f"unknown regime point '{which}' (scaling, lower, upper)", "which")
