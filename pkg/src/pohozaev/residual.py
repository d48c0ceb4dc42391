# src/pohozaev/residual.py
"""
Residual l_k = Z^{2_s^*-1} - V Z - (-Delta)^s Z of the cutoff ansatz and the
decay of its ||.||_** norm along the scaling regime.
"""
import logging
from typing import Dict, Optional, Sequence

import numpy as np
import pandas as pd

from src.bubbles.approx import ApproxSolution, approx_eval
from src.bubbles.cutoff import make_cutoff
from src.bubbles.norms import build_sample_set, dstar_weight, norm_estimate
from src.core.config import settings
from src.core.exceptions import UsageException
from src.core.models import CylinderConfig, EtaProfile, McSpec, PhysicalParams
from src.energy.constants import compute_constants
from src.energy.expansion import regime_point
from src.energy.reduced import find_critical_point
from src.energy.sweep import fit_loglog_slope
from src.fractional.commutator import cutoff_commutator_J3, default_j3_mc

logger = logging.getLogger(__name__)


def lk_eval(params: PhysicalParams, sol: ApproxSolution, potential, y, mc: Optional[McSpec] = None) -> Dict[str, float]:
    """J1 = Z^p - eta sum U^p, J2 = -V Z, J3 = -(cutoff commutator); total = J1 + J2 + J3"""
    y = np.asarray(y, dtype=float)
    p = params.critical_power
    Z = approx_eval(sol, y)
    eta = float(sol.eta(y)[0])
    J1 = Z ** p - eta * float(sol.power_total(y, p)[0])
    J2 = -float(potential.value_at(y)[0]) * Z
    if sol.cutoff is None or sol.cutoff.profile == EtaProfile.UNIT:
        J3, J3_err = 0.0, 0.0
    else:
        commutator = cutoff_commutator_J3(params, sol.cutoff, sol.bubbles, y, mc)
        J3, J3_err = -commutator.value, commutator.error
    return {"J1": J1, "J2": J2, "J3": J3, "J3_error": J3_err, "total": J1 + J2 + J3}


def residual_components(params: PhysicalParams, sol: ApproxSolution, potential, samples: np.ndarray,
                        mc: Optional[McSpec] = None) -> pd.DataFrame:
    """lk_eval on every sample point, with the ||.||_** weight"""
    rows = []
    for y in samples:
        row = lk_eval(params, sol, potential, y, mc)
        row["weight"] = dstar_weight(params, sol.points, sol.lam, y)
        rows.append(row)
    return pd.DataFrame(rows)


def residual_norm_trend(params: PhysicalParams, potential, k_list: Sequence[int],
                        point: Optional[tuple] = None, sigma_factor: Optional[float] = None,
                        n_far: Optional[int] = None, mc: Optional[McSpec] = None,
                        seed: int = 0, initial_r: float = 1.2,
                        slack: Optional[float] = None, sigma: Optional[float] = None,
                        profile: EtaProfile = EtaProfile.QUINTIC) -> Dict[str, object]:
    """
    ||l_k||_** estimate at the regime scaling for each k, and the slope of
    log(norm) against log(lambda_k).
    """
    ks = [int(k) for k in k_list]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise UsageException("k_list must be increasing", "k_list")
    if point is None:
        cp = find_critical_point(params, potential, (initial_r, None))
        point = (cp.r_star, cp.y2_star)
    r_bar, y2_bar = point[0], tuple(point[1])
    constants = compute_constants(params, r_bar)
    V_val = float(potential.value(np.array([r_bar]), np.asarray(y2_bar, dtype=float)[None, :])[0])
    n_far = int(settings.residual.get("far_samples", 64)) if n_far is None else n_far
    mc = mc or default_j3_mc()
    slack = float(settings.threshold("residual_slope_slack")) if slack is None else slack

    rows = []
    for k in ks:
        h_k, lam_k = regime_point(params, constants, V_val, k)
        config = CylinderConfig(k=k, r_bar=r_bar, h_bar=h_k, y2_bar=y2_bar)
        cutoff = make_cutoff(r_bar, y2_bar, sigma=sigma, sigma_factor=sigma_factor, profile=profile)
        sol = ApproxSolution(params, config, lam_k, cutoff)
        samples = build_sample_set(params, config, lam_k, cutoff, n_far=n_far, seed=seed)
        comp = residual_components(params, sol, potential, samples, mc)
        norms = {
            name: norm_estimate(comp[name].to_numpy(), comp["weight"].to_numpy(), samples)
            for name in ("J1", "J2", "J3", "total")
        }
        rows.append({
            "k": k,
            "lambda_k": lam_k,
            "h_k": h_k,
            "samples": len(samples),
            "norm_total": norms["total"],
            "norm_J1": norms["J1"],
            "norm_J2": norms["J2"],
            "norm_J3": norms["J3"],
            "max_J3_error": float(comp["J3_error"].max()),
        })
        logger.info("residual k=%d lambda=%.4g: ||l_k||_** ~ %.4e over %d samples", k, lam_k, norms["total"],
                    len(samples))

    table = pd.DataFrame(rows)
    slope = fit_loglog_slope(table["lambda_k"], table["norm_total"])
    threshold = -(2.0 * params.s + 1.0) / 2.0 + slack
    return {
        "table": table,
        "slope": slope,
        "threshold": threshold,
        "passed": bool(slope <= threshold),
        "r_bar": r_bar,
        "y2_bar": y2_bar,
    }
