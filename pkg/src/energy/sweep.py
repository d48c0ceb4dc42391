# src/energy/sweep.py
"""Scaling-law sweep of (h_bar_k, lambda_k) over k with log-log slope fits."""
import logging
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from src.core.exceptions import UsageException
from src.core.models import EnergyConstants, PhysicalParams
from src.energy.constants import compute_constants
from src.energy.expansion import h_exponent, lambda_exponent
from src.energy.reduced import find_critical_point, solve_reduced_system

logger = logging.getLogger(__name__)


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x"""
    slope, _ = np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)
    return float(slope)


def sweep_scaling(params: PhysicalParams, potential, k_list: Sequence[int],
                  point: Optional[tuple] = None, constants: Optional[EnergyConstants] = None,
                  initial_r: float = 1.2) -> Dict[str, object]:
    """
    Table of (k, t1, t2, h_k, lambda_k) at the critical point of r^{2s} V
    (or at the given (r, y'') point) with fitted log-log slopes.
    """
    ks = [int(k) for k in k_list]
    if len(ks) < 4 or any(b <= a for a, b in zip(ks, ks[1:])):
        raise UsageException("k_list must be increasing with at least 4 entries", "k_list")

    if point is None:
        cp = find_critical_point(params, potential, (initial_r, None))
        point = (cp.r_star, cp.y2_star)
    r_bar, y2_bar = point
    constants = constants or compute_constants(params, r_bar)
    V_val = float(potential.value(np.array([r_bar]), np.asarray(y2_bar, dtype=float)[None, :])[0])
    t1, t2 = solve_reduced_system(constants, V_val)

    N, s = params.N, params.s
    rows = []
    for k in ks:
        rows.append({
            "k": k,
            "t1": t1,
            "t2": t2,
            "h_k": t1 * k ** h_exponent(N, s),
            "lambda_k": t2 * k ** lambda_exponent(N, s),
        })
    table = pd.DataFrame(rows)
    slope_lambda = fit_loglog_slope(table["k"], table["lambda_k"])
    slope_h = fit_loglog_slope(table["k"], table["h_k"])
    logger.info("scaling sweep: slope(lambda)=%.12g, slope(h)=%.12g", slope_lambda, slope_h)
    return {
        "table": table,
        "slope_lambda": slope_lambda,
        "slope_h": slope_h,
        "expected_lambda": lambda_exponent(N, s),
        "expected_h": h_exponent(N, s),
        "V_val": V_val,
        "r_bar": r_bar,
        "y2_bar": tuple(y2_bar),
    }
