# src/energy/reduced.py
"""
The reduced system and the critical point of r^{2s} V.

In the scaled unknowns h = t1 k^{-(g-1)/(g+1)}, lambda = t2 k^{g/(N-4s)}
(g = N - 2s) the leading equations become

    -t1 + D1 / t1^g = 0,        D2 - V t2^{N-4s} = 0,

solved in closed form and confirmed by a safeguarded Newton iteration.
"""
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from src.core.config import settings
from src.core.exceptions import (
    CriticalPointDomainException,
    DomainException,
    NumericException,
    SearchFailureException,
    handle_numeric_error,
)
from src.core.models import CriticalPoint, EnergyConstants, PhysicalParams, ReducedSolution

logger = logging.getLogger(__name__)

AGREEMENT_TOL = 1e-10


def safeguarded_newton(func: Callable[[float], Tuple[float, float]], lo: float, hi: float,
                       tol: float = 1e-14, max_iter: int = 200) -> Tuple[float, int]:
    """
    Root of func in [lo, hi], func(x) -> (f, df). Newton steps that leave the
    bracket or fail to halve the previous step fall back to bisection.
    """
    f_lo, _ = func(lo)
    f_hi, _ = func(hi)
    if f_lo == 0.0:
        return lo, 0
    if f_hi == 0.0:
        return hi, 0
    if f_lo * f_hi > 0.0:
        raise NumericException(f"root not bracketed in [{lo}, {hi}]", "safeguarded_newton")
    # orient so that f(xl) < 0
    xl, xh = (lo, hi) if f_lo < 0.0 else (hi, lo)
    x = 0.5 * (lo + hi)
    dx_old = abs(hi - lo)
    dx = dx_old
    f, df = func(x)
    for it in range(1, max_iter + 1):
        newton_out = ((x - xh) * df - f) * ((x - xl) * df - f) > 0.0
        if newton_out or abs(2.0 * f) > abs(dx_old * df):
            dx_old = dx
            dx = 0.5 * (xh - xl)
            x = xl + dx
        else:
            dx_old = dx
            dx = f / df
            x = x - dx
        if abs(dx) < tol * max(1.0, abs(x)):
            return x, it
        f, df = func(x)
        if f < 0.0:
            xl = x
        else:
            xh = x
    raise SearchFailureException("safeguarded Newton did not converge", max_iter, x)


def _bracket(func: Callable[[float], Tuple[float, float]], guess: float) -> Tuple[float, float]:
    """Halve/double around a positive guess until the sign changes"""
    lo, hi = guess, guess
    f_guess, _ = func(guess)
    for _ in range(200):
        lo *= 0.5
        hi *= 2.0
        if func(lo)[0] * f_guess <= 0.0:
            return lo, guess
        if func(hi)[0] * f_guess <= 0.0:
            return guess, hi
    raise NumericException("could not bracket the reduced-system root", "solve_reduced_system")


@handle_numeric_error
def solve_reduced_system(constants: EnergyConstants, V_val: float) -> Tuple[float, float]:
    """t1 = D1^{1/(g+1)}, t2 = (D2/V)^{1/(N-4s)}, each confirmed by Newton to 1e-10"""
    if not V_val > 0.0:
        raise DomainException(f"V(r_bar, y2_bar) must be positive, got {V_val}", "V_val", V_val)
    g = constants.N - 2.0 * constants.s
    q = constants.N - 4.0 * constants.s
    D1, D2 = constants.D1, constants.D2

    t1 = D1 ** (1.0 / (g + 1.0))
    t2 = (D2 / V_val) ** (1.0 / q)

    def f1(t):
        return -t + D1 / t ** g, -1.0 - g * D1 / t ** (g + 1.0)

    def f2(t):
        return D2 - V_val * t ** q, -q * V_val * t ** (q - 1.0)

    for name, closed, func in (("t1", t1, f1), ("t2", t2, f2)):
        if func(closed)[0] == 0.0:
            continue
        lo, hi = _bracket(func, closed)
        root, _ = safeguarded_newton(func, lo, hi)
        if abs(root - closed) > AGREEMENT_TOL * closed:
            raise NumericException(f"{name}: closed form {closed:.15g} vs Newton {root:.15g}", "solve_reduced_system")
    return t1, t2


# =============================================================================
# CRITICAL POINT OF r^{2s} V
# =============================================================================

def _reduced_gradient(potential, s: float, x: np.ndarray) -> np.ndarray:
    """grad (r^{2s} V) at x = (r, y'')"""
    r = x[0]
    y2 = x[None, 1:]
    v = float(potential.value(np.array([r]), y2)[0])
    dr, dy = potential.gradient(np.array([r]), y2)
    lead = 2.0 * s * r ** (2.0 * s - 1.0) * v + r ** (2.0 * s) * float(dr[0])
    return np.concatenate([[lead], r ** (2.0 * s) * dy[0]])


def _fd_jacobian(potential, s: float, x: np.ndarray, step: float) -> np.ndarray:
    dim = x.size
    jac = np.zeros((dim, dim))
    for j in range(dim):
        h = step * max(1.0, abs(x[j]))
        e = np.zeros(dim)
        e[j] = h
        jac[:, j] = (_reduced_gradient(potential, s, x + e) - _reduced_gradient(potential, s, x - e)) / (2.0 * h)
    return jac


def find_critical_point(params: PhysicalParams, potential, initial: Tuple[float, Sequence[float]]) -> CriticalPoint:
    """Damped Newton on grad (r^{2s} V) with a finite-difference Jacobian"""
    cfg = settings.critical_point
    max_iter = int(cfg.get("max_iterations", 100))
    step = float(cfg.get("fd_step", 1e-6))
    grad_tol = float(cfg.get("gradient_tol", 1e-12))
    step_tol = float(cfg.get("step_tol", 1e-13))
    nondeg_tol = float(cfg.get("nondegeneracy_tol", 1e-8))
    s = params.s

    r0, y0 = initial
    if not r0 > 0.0:
        raise DomainException(f"initial r must be positive, got {r0}", "r", r0)
    y0 = list(y0) if y0 is not None else [0.0] * (params.N - 3)
    x = np.array([r0, *y0], dtype=float)
    r_floor = 1e-8 * r0

    g = _reduced_gradient(potential, s, x)
    scale = max(1.0, float(np.linalg.norm(g)))
    for it in range(1, max_iter + 1):
        jac = _fd_jacobian(potential, s, x, step)
        try:
            delta = np.linalg.solve(jac, -g)
        except np.linalg.LinAlgError:
            delta = -np.linalg.lstsq(jac, g, rcond=None)[0]
        norm_g = float(np.linalg.norm(g))
        t = 1.0
        while True:
            trial = x + t * delta
            if trial[0] > 0.0:
                g_trial = _reduced_gradient(potential, s, trial)
                if float(np.linalg.norm(g_trial)) < norm_g or t < 1e-10:
                    break
            t *= 0.5
            if t < 1e-12:
                trial, g_trial = x + t * delta, _reduced_gradient(potential, s, x + t * delta)
                break
        moved = float(np.linalg.norm(trial - x))
        x, g = trial, g_trial
        if x[0] < r_floor:
            raise CriticalPointDomainException(f"critical-point search drifted to r={x[0]:.3g}", it, x.tolist())
        if float(np.linalg.norm(g)) <= grad_tol * scale or moved <= step_tol * max(1.0, float(np.linalg.norm(x))):
            if float(np.linalg.norm(g)) > 1e3 * grad_tol * scale:
                raise SearchFailureException("Newton stalled away from a critical point", it, x.tolist())
            return _classify(potential, s, x, g, it, step, nondeg_tol)
    raise SearchFailureException("critical-point search did not converge", max_iter, x.tolist())


def _classify(potential, s: float, x: np.ndarray, g: np.ndarray, iterations: int, step: float,
              nondeg_tol: float) -> CriticalPoint:
    jac = _fd_jacobian(potential, s, x, step)
    sv = np.linalg.svd(jac, compute_uv=False)
    ratio = float(sv[-1] / sv[0]) if sv[0] > 0.0 else 0.0
    nondegenerate = ratio > nondeg_tol
    det = float(np.linalg.det(jac))
    sign = int(np.sign(det)) if nondegenerate else 0
    logger.info("critical point r*=%.12g y''*=%s after %d iterations (det sign %d)", x[0],
                np.array2string(x[1:], precision=6), iterations, sign)
    return CriticalPoint(
        r_star=float(x[0]),
        y2_star=tuple(float(v) for v in x[1:]),
        nondegenerate=nondegenerate,
        jac_det_sign=sign,
        iterations=iterations,
        gradient_norm=float(np.linalg.norm(g)),
        singular_ratio=ratio,
    )


def reduced_solution(params: PhysicalParams, constants: EnergyConstants, potential,
                     initial: Tuple[float, Optional[Sequence[float]]]) -> ReducedSolution:
    """Critical point of r^{2s} V together with the t-scalings at V(r*, y''*)"""
    cp = find_critical_point(params, potential, initial)
    V_star = float(potential.value(np.array([cp.r_star]), np.asarray(cp.y2_star)[None, :])[0])
    t1, t2 = solve_reduced_system(constants, V_star)
    return ReducedSolution(
        t1=t1, t2=t2, r_star=cp.r_star, y2_star=cp.y2_star,
        nondegenerate=cp.nondegenerate, jac_det_sign=cp.jac_det_sign, iterations=cp.iterations,
    )
