# src/fractional/commutator.py
"""
Cutoff commutator

    J(y) = c(N,s) P.V. int (eta(y) - eta(x)) W(x) / |x - y|^{N+2s} dx,  W = sum_j U_j,

so that (-Delta)^s (eta W) = eta (-Delta)^s W + J.

The ball |x - y| < sigma/4 uses the symmetrized deterministic rule and is
skipped when eta is constant on it. The rest is sampled from a mixture of a
kernel-shaped Pareto shell around y, the uniform (r, y'')-tube of radius
2 sigma and the bubble profiles.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from src.bubbles.cutoff import eta_eval, eta_is_constant_on_ball
from src.core.config import settings
from src.core.models import Bubble, CutoffEta, EtaProfile, McSpec, PhysicalParams, PvResult
from src.fractional.pv_quadrature import symmetric_inner_integral
from src.integrals.monte_carlo import integrate_mc
from src.integrals.sampling import MixtureProposal, ParetoComponent, RadialComponent, TubeComponent

logger = logging.getLogger(__name__)

INNER_FRACTION = 0.25
COARSE_RULE = (12, 3)
FINE_RULE = (18, 4)


def bubble_field(params: PhysicalParams, bubbles: Sequence[Bubble]):
    """x -> sum_j U_j(x) for bubbles of possibly different scales"""
    centers = np.array([b.center for b in bubbles], dtype=float)
    lams = np.array([b.lam for b in bubbles], dtype=float)
    lead = params.C_N * lams ** params.half_gamma

    def field(x):
        x = np.atleast_2d(x)
        d2 = np.sum((x[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
        return np.sum(lead * (1.0 + lams ** 2 * d2) ** (-params.half_gamma), axis=1)

    return field


def default_j3_mc(seed: Optional[int] = None) -> McSpec:
    mc = settings.monte_carlo
    return McSpec(
        n_samples=int(settings.residual.get("j3_samples", 20000)),
        seed=int(mc.get("seed", 0) if seed is None else seed),
        shards=int(mc.get("shards", 8)),
        antithetic=bool(mc.get("antithetic", True)),
    )


def cutoff_commutator_J3(params: PhysicalParams, cutoff: CutoffEta, bubbles: Sequence[Bubble], y,
                         mc: Optional[McSpec] = None) -> PvResult:
    """c(N,s) P.V. int (eta(y) - eta(x)) sum_j U_j(x) |x-y|^{-N-2s} dx"""
    if cutoff.profile == EtaProfile.UNIT or not bubbles:
        return PvResult(value=0.0, error=0.0, nodes=0)
    mc = mc or default_j3_mc()
    y = np.asarray(y, dtype=float)
    N, s = params.N, params.s
    radius = INNER_FRACTION * cutoff.sigma
    W = bubble_field(params, bubbles)
    eta_y = eta_eval(cutoff, y)

    def g(x):
        return (eta_y - eta_eval(cutoff, x)) * W(x)

    inner, inner_err, nodes = 0.0, 0.0, 0
    if not eta_is_constant_on_ball(cutoff, y, radius):
        coarse = -symmetric_inner_integral(g, y, 0.0, radius, s, *COARSE_RULE)
        inner = -symmetric_inner_integral(g, y, 0.0, radius, s, *FINE_RULE)
        inner_err = abs(inner - coarse)
        nodes = FINE_RULE[0] * FINE_RULE[1] ** (N - 1) * 2

    share = 0.5 / len(bubbles)
    components = [
        ParetoComponent(center=y.copy(), inner_radius=radius, s=s, weight=0.25, omega=params.omega_Nm1),
        TubeComponent(anchor_r=cutoff.anchor_r, anchor_y2=tuple(cutoff.anchor_y2), radius=2.0 * cutoff.sigma,
                      weight=0.25, N=N),
    ] + [RadialComponent(center=b.x, lam=b.lam, a=0.5 * N + s, weight=share) for b in bubbles]
    proposal = MixtureProposal(components)

    def integrand(x):
        dist = np.linalg.norm(x - y, axis=1)
        outside = dist >= radius
        safe = np.where(outside, dist, radius)
        return np.where(outside, g(x) / safe ** (N + 2.0 * s), 0.0)

    outer = integrate_mc("commutator_J3", mc, proposal, integrand)
    value = params.c_Ns * (inner + outer.estimate)
    error = params.c_Ns * (inner_err + outer.stderr)
    logger.debug("J3 at |y|=%.4g: inner=%.4g outer=%.4g +- %.2g", float(np.linalg.norm(y)), inner,
                 outer.estimate, outer.stderr)
    return PvResult(value=value, error=error, nodes=nodes + mc.n_samples)
