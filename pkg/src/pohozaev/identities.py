# src/pohozaev/identities.py
"""
Volume forms of the local Pohozaev identities and the concentration
integral, both over B_rho = {y : |(|y'|, y'') - (r0, y0'')| <= rho}.

u = Z is used for the solution (the correction phi is not computed).
All ball integrals share one Monte Carlo stream ("ball_integral"), so
identities that differ by a constant factor use identical samples.
"""
import logging
from typing import Callable, Dict, Union

import numpy as np

from src.bubbles.approx import ApproxSolution, approx_eval
from src.core.exceptions import UsageException
from src.core.models import BallSpec, McEstimate, McSpec, PhysicalParams, ProposalType
from src.integrals.monte_carlo import integrate_mc
from src.integrals.radial import radial_bubble_integral
from src.integrals.sampling import MixtureProposal, TubeComponent, bubble_mixture

logger = logging.getLogger(__name__)

BALL_LABEL = "ball_integral"

ReducedFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def ball_indicator(ball: BallSpec, y: np.ndarray) -> np.ndarray:
    r = np.linalg.norm(y[:, :3], axis=1)
    d2 = (r - ball.center_r) ** 2
    if y.shape[1] > 3:
        d2 = d2 + np.sum((y[:, 3:] - np.asarray(ball.center_y2, dtype=float)) ** 2, axis=1)
    return d2 <= ball.rho ** 2


def ball_proposal(params: PhysicalParams, sol: ApproxSolution, ball: BallSpec, spec: McSpec) -> MixtureProposal:
    """Bubble profiles (1+r^2)^{-(N-2s)} plus the uniform tube; uniform tube only for uniform_ball"""
    tube = TubeComponent(anchor_r=ball.center_r, anchor_y2=tuple(ball.center_y2), radius=ball.rho,
                         weight=0.5, N=params.N)
    if spec.proposal == ProposalType.UNIFORM_BALL:
        return MixtureProposal([tube])
    return MixtureProposal(bubble_mixture(sol.points, sol.lam, params.gamma, weight=0.5) + [tube])


def _ball_integral(params: PhysicalParams, sol: ApproxSolution, ball: BallSpec, spec: McSpec,
                   weight: Callable[[np.ndarray], np.ndarray]) -> McEstimate:
    """int_{B_rho} weight(y) Z(y)^2 dy"""
    proposal = ball_proposal(params, sol, ball, spec)

    def integrand(y):
        inside = ball_indicator(ball, y)
        out = np.zeros(y.shape[0])
        if np.any(inside):
            yi = y[inside]
            out[inside] = weight(yi) * approx_eval(sol, yi) ** 2
        return out

    return integrate_mc(BALL_LABEL, spec, proposal, integrand)


def _axis_index(mode: str, N: int) -> int:
    try:
        axis = int(mode.split("_", 1)[1])
    except (IndexError, ValueError):
        raise UsageException(f"unknown mode '{mode}' (radial or axis_<i>)", "mode")
    if not 4 <= axis <= N:
        raise UsageException(f"axis mode needs i in 4..{N}, got {axis}", "mode")
    return axis


def pohozaev_volume(params: PhysicalParams, sol: ApproxSolution, potential, ball: BallSpec, mode: str,
                    spec: McSpec) -> McEstimate:
    """
    radial:  int_{B_rho} (s V + <grad V, y>/2) u^2
    axis_i:  1/2 int_{B_rho} dV/dy_i u^2
    """
    s = params.s
    if mode == "radial":
        def weight(y):
            return s * potential.value_at(y) + 0.5 * potential.radial_euler(y)
    else:
        axis = _axis_index(mode, params.N)

        def weight(y):
            return 0.5 * potential.grad_at(y)[:, axis - 1]

    return _ball_integral(params, sol, ball, spec, weight)


def concentration_integral(params: PhysicalParams, sol: ApproxSolution, g: Union[ReducedFunction, float],
                           ball: BallSpec, spec: McSpec) -> Dict[str, float]:
    """int_{B_rho} g u^2 against 2k lambda^{-2s} g(r_bar, y_bar'') int U^2"""
    if sol.config is None:
        raise UsageException("concentration_integral needs a cylinder configuration", "sol")
    if not callable(g):
        level = float(g)

        def g(r, y2, _level=level):
            return np.full(np.shape(r), _level)

    def weight(y):
        return g(np.linalg.norm(y[:, :3], axis=1), y[:, 3:])

    est = _ball_integral(params, sol, ball, spec, weight)
    cfg = sol.config
    g_bar = float(np.asarray(g(np.array([cfg.r_bar]), np.asarray(cfg.y2_bar, dtype=float)[None, :]))[0])
    target = 2.0 * cfg.k * sol.lam ** (-2.0 * params.s) * g_bar * radial_bubble_integral(params, 2.0)
    if target == 0.0:
        relerr = 0.0 if est.estimate == 0.0 else float("inf")
    else:
        relerr = abs(est.estimate - target) / abs(target)
    return {"estimate": est.estimate, "stderr": est.stderr, "target": target, "relative_error": relerr}


def radial_pohozaev_weight(params: PhysicalParams, potential) -> ReducedFunction:
    """g(r, y'') = r^{1-2s} d/dr (r^{2s} V) / 2 = s V + r V_r / 2"""
    s = params.s

    def g(r, y2):
        r = np.atleast_1d(np.asarray(r, dtype=float))
        y2 = np.asarray(y2, dtype=float).reshape(r.shape[0], -1)
        dr, _ = potential.gradient(r, y2)
        return s * potential.value(r, y2) + 0.5 * r * dr

    return g
