# src/fractional/pv_quadrature.py
"""
Principal-value evaluation of the fractional Laplacian

    (-Delta)^s u(y) = c(N,s) int (u(y) - (u(y+z) + u(y-z))/2) |z|^{-N-2s} dz.

The symmetrized second difference is O(|z|^2), so on the inner ball
|z| < R the radial integral int rho^{1-2s} (A(rho)/rho^2) is handled by a
Gauss-Jacobi rule whose weight absorbs rho^{1-2s}. On |z| > R the
substitution rho = R/t and a second Gauss-Jacobi weight t^{2s-1+beta} take
the power tail of u exactly; nothing is truncated.

Radial terms reduce the sphere integral to a 1-D Gegenbauer integral in the
angle between z and y - c. Generic terms use a product rule on S^{N-1}.
"""
import logging
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special

from src.bubbles.bubble import unit_profile
from src.core.config import settings
from src.core.exceptions import AccuracyException, NormalizationException
from src.core.models import Bubble, PhysicalParams, PvQuadratureSpec, PvResult
from src.fractional.field import FieldFunction, GenericTerm, RadialTerm
from src.params.special import sphere_area

logger = logging.getLogger(__name__)

NORMALIZATION_THRESHOLD = 1e-3


def default_pv_spec() -> PvQuadratureSpec:
    return PvQuadratureSpec(**settings.quadrature)


# =============================================================================
# RULES
# =============================================================================

@lru_cache(maxsize=64)
def _jacobi(n: int, alpha: float, beta: float) -> Tuple[np.ndarray, np.ndarray]:
    x, w = special.roots_jacobi(n, alpha, beta)
    return x, w


@lru_cache(maxsize=32)
def sphere_rule(N: int, order: int) -> Tuple[np.ndarray, np.ndarray]:
    """Product rule on S^{N-1}: Gauss-Gegenbauer in the polar angles, uniform in the azimuth"""
    polar_nodes, polar_weights = [], []
    for i in range(1, N - 1):
        alpha = 0.5 * (N - 2 - i)
        t, w = _jacobi(order, alpha, alpha)
        polar_nodes.append(t)
        polar_weights.append(w)
    m = 2 * order
    phi = 2.0 * np.pi * (np.arange(m) + 0.5) / m
    w_phi = np.full(m, 2.0 * np.pi / m)

    grids = np.meshgrid(*polar_nodes, phi, indexing="ij")
    wgrids = np.meshgrid(*polar_weights, w_phi, indexing="ij")
    weights = np.ones_like(grids[0])
    for wg in wgrids:
        weights = weights * wg

    coords = []
    running = np.ones_like(grids[0])
    for t in grids[:-1]:
        coords.append(running * t)
        running = running * np.sqrt(np.clip(1.0 - t * t, 0.0, None))
    coords.append(running * np.cos(grids[-1]))
    coords.append(running * np.sin(grids[-1]))
    points = np.stack([c.ravel() for c in coords], axis=1)
    return points, weights.ravel()


# =============================================================================
# RADIAL (ZONAL) PATH
# =============================================================================

def _radial_term_integral(term: RadialTerm, y: np.ndarray, s: float, N: int, spec: PvQuadratureSpec) -> float:
    """int (f(d^2) - (f(+) + f(-))/2) |zeta|^{-N-2s} in units of the term's scale"""
    w = (y - term.center) / term.scale
    d = float(np.linalg.norm(w))
    f0 = float(term.profile(np.array([d * d]))[0])
    R = spec.inner_radius * max(1.0, 0.5 * d)
    omega_nm2 = sphere_area(N - 1)
    t, wt = _jacobi(spec.angular_nodes, 0.5 * (N - 3), 0.5 * (N - 3))

    def shell_mean(rho: np.ndarray) -> np.ndarray:
        """int_{S^{N-1}} (f(|w + rho theta|^2) + f(|w - rho theta|^2))/2"""
        rho = rho[:, None]
        base = d * d + rho * rho
        cross = 2.0 * rho * d * t[None, :]
        vals = 0.5 * (term.profile(base + cross) + term.profile(base - cross))
        return omega_nm2 * vals @ wt

    x, wx = _jacobi(spec.radial_nodes, 0.0, 1.0 - 2.0 * s)
    rho = 0.5 * R * (1.0 + x)
    A = sphere_area(N) * f0 - shell_mean(rho)
    inner = (0.5 * R) ** (2.0 - 2.0 * s) * float(np.sum(wx * A / rho ** 2))

    beta = term.decay
    xo, wo = _jacobi(spec.outer_nodes, 0.0, 2.0 * s - 1.0 + beta)
    tt = 0.5 * (1.0 + xo)
    M = shell_mean(R / tt)
    outer = (sphere_area(N) * f0 * R ** (-2.0 * s) / (2.0 * s)
             - R ** (-2.0 * s) * 2.0 ** (-(2.0 * s + beta)) * float(np.sum(wo * M / tt ** beta)))
    return term.coef * term.scale ** (-2.0 * s) * (inner + outer)


# =============================================================================
# GENERIC PATH
# =============================================================================

def symmetric_inner_integral(func: Callable[[np.ndarray], np.ndarray], y: np.ndarray, f0: float, R: float,
                             s: float, radial_nodes: int, sphere_order: int) -> float:
    """int_{|z|<R} (f0 - (func(y+z) + func(y-z))/2) |z|^{-N-2s} dz"""
    N = y.shape[0]
    theta, wtheta = sphere_rule(N, sphere_order)
    x, wx = _jacobi(radial_nodes, 0.0, 1.0 - 2.0 * s)
    rho = 0.5 * R * (1.0 + x)
    A = np.empty(rho.shape[0])
    for i, r in enumerate(rho):
        plus = func(y + r * theta)
        minus = func(y - r * theta)
        A[i] = float(np.sum(wtheta * (f0 - 0.5 * (plus + minus))))
    return (0.5 * R) ** (2.0 - 2.0 * s) * float(np.sum(wx * A / rho ** 2))


def _generic_term_integral(term: GenericTerm, y: np.ndarray, s: float, spec: PvQuadratureSpec) -> float:
    N = y.shape[0]
    R = spec.inner_radius * term.scale
    f0 = float(term(y[None, :])[0])
    inner = symmetric_inner_integral(term, y, f0, R, s, spec.radial_nodes, spec.sphere_order)

    theta, wtheta = sphere_rule(N, spec.sphere_order)
    beta = term.decay
    xo, wo = _jacobi(spec.outer_nodes, 0.0, 2.0 * s - 1.0 + beta)
    tt = 0.5 * (1.0 + xo)
    M = np.array([float(np.sum(wtheta * term(y + (R / t) * theta))) for t in tt])
    outer = (sphere_area(N) * f0 * R ** (-2.0 * s) / (2.0 * s)
             - R ** (-2.0 * s) * 2.0 ** (-(2.0 * s + beta)) * float(np.sum(wo * M / tt ** beta)))
    return inner + outer


def _evaluate(params: PhysicalParams, u: FieldFunction, y: np.ndarray, spec: PvQuadratureSpec) -> float:
    total = 0.0
    for term in u.radial:
        total += _radial_term_integral(term, y, params.s, params.N, spec)
    for term in u.generic:
        total += _generic_term_integral(term, y, params.s, spec)
    return params.c_Ns * total


def _node_count(u: FieldFunction, N: int, spec: PvQuadratureSpec) -> int:
    radial = len(u.radial) * (spec.radial_nodes + spec.outer_nodes) * spec.angular_nodes
    sphere = spec.sphere_order ** (N - 2) * 2 * spec.sphere_order
    generic = len(u.generic) * (spec.radial_nodes + spec.outer_nodes) * sphere
    return radial + generic


def frac_laplacian_pv(params: PhysicalParams, u: Union[FieldFunction, Callable], y,
                      spec: Optional[PvQuadratureSpec] = None) -> PvResult:
    """(-Delta)^s u(y), refined until two successive rules agree"""
    spec = spec or default_pv_spec()
    field = u if isinstance(u, FieldFunction) else FieldFunction.from_callable(u)
    y = np.asarray(y, dtype=float)
    scale = params.c_Ns * field.magnitude(params.s)

    previous = _evaluate(params, field, y, spec)
    for _ in range(spec.max_refinements):
        spec = spec.refined()
        current = _evaluate(params, field, y, spec)
        err = abs(current - previous)
        if err <= spec.target_tol * max(abs(current), scale):
            return PvResult(value=current, error=err, nodes=_node_count(field, params.N, spec))
        previous_pair = (previous, current)
        previous = current
    raise AccuracyException("frac_laplacian_pv", previous_pair, spec.target_tol)


# =============================================================================
# BUBBLE IDENTITY
# =============================================================================

def bubble_pde_residual(params: PhysicalParams, sample_points: Sequence[Sequence[float]],
                        spec: Optional[PvQuadratureSpec] = None) -> float:
    """max relative residual of (-Delta)^s U_{0,1} = U_{0,1}^{2_s^*-1} over the samples"""
    field = FieldFunction.from_bubble(params, Bubble(center=tuple([0.0] * params.N), lam=1.0))
    worst = 0.0
    for y in np.atleast_2d(np.asarray(sample_points, dtype=float)):
        lhs = frac_laplacian_pv(params, field, y, spec).value
        rhs = float(unit_profile(params, np.dot(y, y))) ** params.critical_power
        worst = max(worst, abs(lhs - rhs) / rhs)
    return worst


def normalization_points(N: int) -> np.ndarray:
    """Ten fixed points with |y| <= 3"""
    radii = (0.0, 0.3, 0.6, 0.8, 1.0, 1.5, 2.0, 2.2, 2.5, 3.0)
    points = np.zeros((len(radii), N))
    diag = np.ones(N) / np.sqrt(N)
    for i, r in enumerate(radii):
        direction = np.eye(N)[i % N] if i % 2 == 0 else diag
        points[i] = r * direction
    return points


def verify_normalization(params: PhysicalParams, spec: Optional[PvQuadratureSpec] = None,
                         threshold: float = NORMALIZATION_THRESHOLD) -> float:
    """Check c(N, s) through the bubble identity; raises NormalizationException"""
    residual = bubble_pde_residual(params, normalization_points(params.N), spec)
    if residual > threshold:
        raise NormalizationException(residual, threshold)
    logger.info("bubble identity verified: max relative residual %.3e (N=%d, s=%g)", residual, params.N, params.s)
    return residual
