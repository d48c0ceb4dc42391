# src/integrals/monte_carlo.py
"""
Seeded, sharded Monte Carlo integration and the bubble interaction integrals.

Every estimator is a mean of iid "units": one importance weight f(z)/q(z),
or the mean of an antithetic pair. Shards draw from independent streams
seeded by (seed, crc32(label), shard index), run on a thread pool, and are
combined in shard order, so results never depend on the worker count.

All bubble integrals are evaluated in coordinates z = lambda (y - x_1)
centred at the first bubble.
"""
import logging
import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import integrate

from src.bubbles.bubble import unit_profile
from src.core.config import settings
from src.core.exceptions import NumericException, UsageException
from src.core.models import Bubble, McEstimate, McSpec, PhysicalParams, ProposalType
from src.integrals.radial import radial_bubble_integral
from src.integrals.sampling import MixtureProposal, RadialComponent
from src.params.special import sphere_area

logger = logging.getLogger(__name__)

CHUNK_SIZE = 50_000

UnitSampler = Callable[[np.random.Generator, int], np.ndarray]
Integrand = Callable[[np.ndarray], np.ndarray]


# =============================================================================
# SHARDED DRIVER
# =============================================================================

def shard_sizes(n_units: int, shards: int) -> List[int]:
    """Even split; the first n_units % shards shards take one extra unit"""
    base, extra = divmod(n_units, shards)
    return [base + (1 if i < extra else 0) for i in range(shards)]


def shard_rng(seed: int, label: str, shard: int) -> np.random.Generator:
    tag = zlib.crc32(label.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), tag, shard]))


def _chunk_moments(values: np.ndarray) -> Tuple[int, float, float]:
    n = values.shape[0]
    mean = float(np.mean(values))
    m2 = float(np.sum((values - mean) ** 2))
    return n, mean, m2


def merge_moments(a: Tuple[int, float, float], b: Tuple[int, float, float]) -> Tuple[int, float, float]:
    """Chan et al. pairwise combination of (count, mean, M2)"""
    na, ma, sa = a
    nb, mb, sb = b
    if na == 0:
        return b
    if nb == 0:
        return a
    n = na + nb
    delta = mb - ma
    return n, ma + delta * nb / n, sa + sb + delta * delta * na * nb / n


def _run_shard(sampler: UnitSampler, rng: np.random.Generator, n_units: int) -> Tuple[int, float, float]:
    acc = (0, 0.0, 0.0)
    done = 0
    while done < n_units:
        size = min(CHUNK_SIZE, n_units - done)
        values = np.asarray(sampler(rng, size), dtype=float)
        if not np.all(np.isfinite(values)):
            raise NumericException("non-finite importance weight", "monte_carlo")
        acc = merge_moments(acc, _chunk_moments(values))
        done += size
    return acc


def run_sharded(label: str, spec: McSpec, sampler: UnitSampler, n_units: Optional[int] = None) -> McEstimate:
    """Mean and standard error of sampler units over spec.shards seeded shards"""
    units = n_units if n_units is not None else spec.n_samples
    sizes = shard_sizes(units, spec.shards)
    rngs = [shard_rng(spec.seed, label, i) for i in range(spec.shards)]
    workers = max(1, min(settings.workers, spec.shards))

    with ThreadPoolExecutor(max_workers=workers) as pool:
        partials = list(pool.map(lambda args: _run_shard(sampler, *args), zip(rngs, sizes)))

    total = (0, 0.0, 0.0)
    for part in partials:
        total = merge_moments(total, part)
    count, mean, m2 = total
    stderr = math.sqrt(m2 / (count - 1) / count) if count > 1 else float("inf")
    logger.debug("%s: %d units in %d shards, estimate=%.10g stderr=%.3g", label, count, spec.shards, mean, stderr)
    return McEstimate(estimate=mean, stderr=stderr, n_samples=spec.n_samples)


def importance_sampler(proposal: MixtureProposal, integrand: Integrand, antithetic: bool) -> UnitSampler:
    """Units f(z)/q(z), or antithetic pair means"""

    def draw(rng: np.random.Generator, n: int) -> np.ndarray:
        z, partner = proposal.sample(rng, n, antithetic=antithetic)
        values = integrand(z) / proposal.density(z)
        if partner is None:
            return values
        return 0.5 * (values + integrand(partner) / proposal.density(partner))

    return draw


def integrate_mc(label: str, spec: McSpec, proposal: MixtureProposal, integrand: Integrand) -> McEstimate:
    """int f by importance sampling from proposal; antithetic pairs count as two samples"""
    if spec.antithetic:
        n_units = max(2, spec.n_samples // 2)
    else:
        n_units = spec.n_samples
    return run_sharded(label, spec, importance_sampler(proposal, integrand, spec.antithetic), n_units)


def scaled_estimate(est: McEstimate, factor: float) -> McEstimate:
    return McEstimate(estimate=factor * est.estimate, stderr=abs(factor) * est.stderr, n_samples=est.n_samples)


# =============================================================================
# BUBBLE INTERACTIONS
# =============================================================================

def _require_unbounded_proposal(spec: McSpec, operation: str):
    if spec.proposal == ProposalType.UNIFORM_BALL:
        raise UsageException(f"{operation} integrates over R^N; uniform_ball is only valid on bounded domains",
                             "proposal")


def local_displacement(b1: Bubble, b2: Bubble) -> np.ndarray:
    """D = lambda (x_2 - x_1) for equal-scale bubbles"""
    if not math.isclose(b1.lam, b2.lam, rel_tol=1e-12):
        raise UsageException(f"interaction integrals need equal scales, got {b1.lam} and {b2.lam}", "lam")
    if len(b1.center) != len(b2.center):
        raise UsageException("bubbles live in different dimensions", "center")
    return b1.lam * (b2.x - b1.x)


def _unit_gradient(params: PhysicalParams, z: np.ndarray, axis: int) -> np.ndarray:
    """d/dz_l U_{0,1}(z)"""
    q = np.sum(z * z, axis=1)
    return -params.gamma * params.C_N * z[:, axis] * (1.0 + q) ** (-params.half_gamma - 1.0)


def interaction_proposal(params: PhysicalParams, D: np.ndarray) -> MixtureProposal:
    """Half (1+r^2)^{-(N+2s)/2} at 0, half (1+r^2)^{-N} at D"""
    N = params.N
    return MixtureProposal([
        RadialComponent(center=np.zeros(N), lam=1.0, a=0.5 * (N + 2 * params.s), weight=0.5),
        RadialComponent(center=np.asarray(D, dtype=float), lam=1.0, a=float(N), weight=0.5),
    ])


def interaction_constants(params: PhysicalParams) -> dict:
    """A_5 = C_N int U^{2_s^*-1}, A_6 = (N-2s)^2/(N+2s) A_5"""
    A5 = params.C_N * radial_bubble_integral(params, params.critical_power)
    return {"A5": A5, "A6": params.gamma ** 2 / (params.N + 2 * params.s) * A5}


def interaction_integral_mc(params: PhysicalParams, b1: Bubble, b2: Bubble, spec: McSpec) -> McEstimate:
    """int U_{b1}^{2_s^*-1} U_{b2}"""
    _require_unbounded_proposal(spec, "interaction_integral_mc")
    D = local_displacement(b1, b2)
    p = params.critical_power

    def integrand(z):
        return unit_profile(params, np.sum(z * z, axis=1)) ** p * unit_profile(params, np.sum((z - D) ** 2, axis=1))

    return integrate_mc("interaction", spec, interaction_proposal(params, D), integrand)


def interaction_target(params: PhysicalParams, b1: Bubble, b2: Bubble) -> float:
    """A_5 / (lambda |x_1 - x_2|)^{N-2s}"""
    dist = float(np.linalg.norm(local_displacement(b1, b2)))
    if dist == 0.0:
        raise UsageException("far-field target needs distinct centers", "center")
    return interaction_constants(params)["A5"] / dist ** params.gamma


def interaction_gradient_mc(params: PhysicalParams, b1: Bubble, b2: Bubble, axis: int, spec: McSpec) -> McEstimate:
    """int U_{b1}^{2_s^*-2} U_{b2} dU_{b1}/dy_l (axis l is 0-based)"""
    _require_unbounded_proposal(spec, "interaction_gradient_mc")
    if not 0 <= axis < params.N:
        raise UsageException(f"axis must lie in [0, {params.N}), got {axis}", "axis")
    D = local_displacement(b1, b2)
    p = params.critical_power
    lam = b1.lam

    def integrand(z):
        q = np.sum(z * z, axis=1)
        return (lam * unit_profile(params, q) ** (p - 1.0) * _unit_gradient(params, z, axis)
                * unit_profile(params, np.sum((z - D) ** 2, axis=1)))

    return integrate_mc("interaction_gradient", spec, interaction_proposal(params, D), integrand)


def interaction_gradient_target(params: PhysicalParams, b1: Bubble, b2: Bubble, axis: int) -> float:
    """-A_6 (x_2 - x_1)_l / (lambda^{N-2s} |x_2 - x_1|^{N-2s+2})"""
    diff = b2.x - b1.x
    dist = float(np.linalg.norm(diff))
    if dist == 0.0:
        raise UsageException("far-field target needs distinct centers", "center")
    A6 = interaction_constants(params)["A6"]
    return -A6 * diff[axis] / (b1.lam ** params.gamma * dist ** (params.gamma + 2.0))


def potential_mass_integral(params: PhysicalParams, potential, bubble: Bubble, spec: McSpec) -> McEstimate:
    """int V(|y'|, y'') U_bubble^2 = lambda^{-2s} B_1 E[V(x + w/lambda)], w ~ (1+|w|^2)^{-(N-2s)}"""
    _require_unbounded_proposal(spec, "potential_mass_integral")
    N = params.N
    lam = bubble.lam
    proposal = MixtureProposal([RadialComponent(center=np.zeros(N), lam=1.0, a=params.gamma, weight=1.0)])
    x = bubble.x

    def draw(rng, n):
        w, partner = proposal.sample(rng, n, antithetic=spec.antithetic)
        values = potential.value_at(x + w / lam)
        if partner is None:
            return values
        return 0.5 * (values + potential.value_at(x + partner / lam))

    n_units = max(2, spec.n_samples // 2) if spec.antithetic else spec.n_samples
    mean_v = run_sharded("potential_mass", spec, draw, n_units)
    B1 = radial_bubble_integral(params, 2.0)
    return scaled_estimate(mean_v, lam ** (-2.0 * params.s) * B1)


# =============================================================================
# OVERLAPS (deterministic axial reduction)
# =============================================================================

def _axial_integral(params: PhysicalParams, dist: float, kernel: Callable[[float, float], float]) -> float:
    """
    int_{R^N} F(z) dz for F depending on (u, rho), u along the axis through
    0 and dist*e, rho the distance to it; weight omega_{N-2} rho^{N-2}.
    """
    N = params.N
    omega = sphere_area(N - 1)

    def inner(u):
        scale = 1.0 + min(abs(u), abs(u - dist))

        def f(rho):
            return rho ** (N - 2) * kernel(u, rho)

        head, _ = integrate.quad(f, 0.0, scale, epsabs=0.0, epsrel=1e-10, limit=200)
        tail, _ = integrate.quad(f, scale, np.inf, epsabs=0.0, epsrel=1e-10, limit=200)
        return head + tail

    if dist > 0.0:
        breaks = [(-np.inf, 0.0), (0.0, 0.5 * dist), (0.5 * dist, dist), (dist, np.inf)]
    else:
        breaks = [(-np.inf, 0.0), (0.0, np.inf)]
    total = 0.0
    for lo, hi in breaks:
        part, _ = integrate.quad(inner, lo, hi, epsabs=0.0, epsrel=1e-9, limit=200)
        total += part
    return omega * total


def overlap_integral(params: PhysicalParams, b1: Bubble, b2: Bubble) -> float:
    """int U_{b1} U_{b2} = lambda^{-2s} int U(z) U(z - D)"""
    D = local_displacement(b1, b2)
    dist = float(np.linalg.norm(D))
    C, h = params.C_N, params.half_gamma

    def kernel(u, rho):
        r2 = rho * rho
        return C * C * (1.0 + u * u + r2) ** (-h) * (1.0 + (u - dist) ** 2 + r2) ** (-h)

    return b1.lam ** (-2.0 * params.s) * _axial_integral(params, dist, kernel)


def overlap_gradient(params: PhysicalParams, b1: Bubble, b2: Bubble, axis: int) -> float:
    """int U_{b1} dU_{b2}/dy_l = lambda^{1-2s} int U(z) (d_l U)(z - D)"""
    if not 0 <= axis < params.N:
        raise UsageException(f"axis must lie in [0, {params.N}), got {axis}", "axis")
    D = local_displacement(b1, b2)
    dist = float(np.linalg.norm(D))
    if dist == 0.0:
        return 0.0
    C, h, g = params.C_N, params.half_gamma, params.gamma

    def kernel(u, rho):
        r2 = rho * rho
        return (C * (1.0 + u * u + r2) ** (-h)
                * (-g * C * (u - dist)) * (1.0 + (u - dist) ** 2 + r2) ** (-h - 1.0))

    along = _axial_integral(params, dist, kernel)
    return b1.lam ** (1.0 - 2.0 * params.s) * along * D[axis] / dist
