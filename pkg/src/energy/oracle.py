# src/energy/oracle.py
"""
Direct Monte Carlo evaluation of

    I(Z*) = 1/2 int |(-Delta)^{s/2} Z*|^2 + 1/2 int V Z*^2 - 1/2_s^* int Z*^{2_s^*}.

Each bubble solves the limit equation, so the gradient term is exactly
1/2 sum_{i,j} int U_i^{2_s^*-1} U_j; the self terms are closed forms and the
pair terms come from interaction_integral_mc.
"""
import logging
import math
from typing import Dict, Sequence

import numpy as np

from src.bubbles.bubble import bubble_sum
from src.core.models import Bubble, CylinderConfig, McEstimate, McSpec, PhysicalParams
from src.integrals.monte_carlo import (
    integrate_mc,
    interaction_constants,
    interaction_integral_mc,
    local_displacement,
)
from src.integrals.radial import radial_bubble_integral
from src.integrals.sampling import MixtureProposal, bubble_mixture
from src.lattice.points import generate_points
from src.lattice.sums import lattice_sum_exact

logger = logging.getLogger(__name__)


def _pair_spec(spec: McSpec, index: int) -> McSpec:
    """Independent stream per pair"""
    return spec.model_copy(update={"seed": (spec.seed + 7919 * (index + 1)) % (2 ** 64)})


def _potential_term(params: PhysicalParams, centers: np.ndarray, lam: float, potential, spec: McSpec) -> McEstimate:
    """1/2 int V Z*^2"""
    proposal = MixtureProposal(bubble_mixture(centers, lam, params.gamma))

    def integrand(y):
        return 0.5 * potential.value_at(y) * bubble_sum(params, centers, lam, y) ** 2

    return integrate_mc("potential_energy", spec, proposal, integrand)


def _power_term(params: PhysicalParams, centers: np.ndarray, lam: float, spec: McSpec) -> McEstimate:
    """1/2_s^* int Z*^{2_s^*}"""
    proposal = MixtureProposal(bubble_mixture(centers, lam, float(params.N)))

    def integrand(y):
        return bubble_sum(params, centers, lam, y) ** params.two_s_star / params.two_s_star

    return integrate_mc("power_energy", spec, proposal, integrand)


def _combine(parts: Sequence[McEstimate]) -> float:
    return math.sqrt(sum(p.stderr ** 2 for p in parts))


def energy_of_bubbles(params: PhysicalParams, centers, lam: float, potential, spec: McSpec) -> Dict[str, float]:
    """I(Z*) for equal-scale bubbles at arbitrary centers"""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    m = centers.shape[0]
    bubbles = [Bubble(center=tuple(c), lam=lam) for c in centers]
    self_term = radial_bubble_integral(params, params.two_s_star)

    pair_sum, pair_var, index = 0.0, 0.0, 0
    for i in range(m):
        for j in range(i + 1, m):
            est = interaction_integral_mc(params, bubbles[i], bubbles[j], _pair_spec(spec, index))
            pair_sum += est.estimate
            pair_var += est.stderr ** 2
            index += 1
    # 1/2 sum_{i != j} counts each unordered pair twice
    gradient = 0.5 * m * self_term + pair_sum
    potential_part = _potential_term(params, centers, lam, potential, spec)
    power_part = _power_term(params, centers, lam, spec)

    total = gradient + potential_part.estimate - power_part.estimate
    stderr = math.sqrt(pair_var + potential_part.stderr ** 2 + power_part.stderr ** 2)
    return {
        "gradient_part": gradient,
        "interaction_part": pair_sum,
        "potential_part": potential_part.estimate,
        "power_part": power_part.estimate,
        "total": total,
        "stderr": stderr,
    }


def energy_direct_oracle(params: PhysicalParams, config: CylinderConfig, lam: float, potential,
                         spec: McSpec) -> Dict[str, float]:
    """
    I(Z*) for the cylinder configuration. By symmetry every bubble sees the
    same neighbours, so the gradient term is k (int U^{2_s^*} + sum_{j != 1} int U_1^{2_s^*-1} U_j).
    """
    centers = generate_points(config)
    bubbles = [Bubble(center=tuple(c), lam=lam) for c in centers]
    self_term = radial_bubble_integral(params, params.two_s_star)

    estimates = [interaction_integral_mc(params, bubbles[0], b, _pair_spec(spec, j))
                 for j, b in enumerate(bubbles[1:])]
    interaction = sum(e.estimate for e in estimates)
    interaction_err = _combine(estimates)

    gradient = config.k * (self_term + interaction)
    potential_part = _potential_term(params, centers, lam, potential, spec)
    power_part = _power_term(params, centers, lam, spec)

    A5 = interaction_constants(params)["A5"]
    g = params.gamma
    target = 0.0
    if config.k > 1:
        target += lattice_sum_exact(config, g, "same_side")
    target += lattice_sum_exact(config, g, "cross_side")
    target *= A5 / lam ** g

    total = gradient + potential_part.estimate - power_part.estimate
    stderr = math.sqrt((config.k * interaction_err) ** 2 + potential_part.stderr ** 2 + power_part.stderr ** 2)
    far = min(float(np.linalg.norm(local_displacement(bubbles[0], b))) for b in bubbles[1:])
    logger.info("direct oracle k=%d lambda=%.4g: I=%.10g +- %.2g (nearest lambda*d=%.3g)",
                config.k, lam, total, stderr, far)
    return {
        "gradient_part": gradient,
        "interaction_part": interaction,
        "interaction_stderr": interaction_err,
        "interaction_target": target,
        "interaction_relerr": abs(interaction - target) / target,
        "potential_part": potential_part.estimate,
        "power_part": power_part.estimate,
        "total": total,
        "stderr": stderr,
    }

