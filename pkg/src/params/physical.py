# src/params/physical.py
"""
Physical parameters: the admissible s-window, derived exponents and the
normalization constants C_N and c(N, s).
"""
import logging
import math
from typing import Dict, Tuple

from src.core.exceptions import AdmissibilityException, DomainException
from src.core.models import PhysicalParams
from src.params.special import special_gamma, sphere_area

logger = logging.getLogger(__name__)

SUPPORTED_DIMENSIONS = (5, 6, 7, 8)


def _check_dimension(N: int):
    if isinstance(N, bool) or int(N) != N or N not in SUPPORTED_DIMENSIONS:
        raise DomainException(f"dimension N must be an integer in [5, 8], got {N}", "N", N)


def admissible_s_window(N: int) -> Tuple[float, float]:
    """Open interval of admissible fractional orders for dimension N"""
    _check_dimension(N)
    if N == 5:
        root = math.sqrt(N * N - 2 * N + 9)
        return (N + 3 - root) / 4.0, (3 * (N - 1) - root) / 8.0
    return N * (math.sqrt(8 * N - 11) - 1.0) / (8 * N - 12), 1.0


def window_relations(N: int, s: float) -> Dict[str, float]:
    """Polynomials whose roots are the window endpoints, evaluated at s"""
    _check_dimension(N)
    if N == 5:
        return {
            "lower": 2 * s * s - (N + 3) * s + N,
            "upper": 8 * s * s - 6 * (N - 1) * s + N * N - 2 * N,
        }
    return {"lower": ((8 * N - 12) * s + N) ** 2 - N * N * (8 * N - 11)}


def fractional_normalization(N: int, s: float) -> float:
    """c(N, s) = s 4^s Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s))"""
    return s * 4.0 ** s * special_gamma(0.5 * (N + 2 * s)) / (math.pi ** (0.5 * N) * special_gamma(1.0 - s))


def make_params(N: int, s: float) -> PhysicalParams:
    """Build PhysicalParams for an admissible (N, s)"""
    _check_dimension(N)
    lo, hi = admissible_s_window(N)
    if not lo < s < hi:
        raise AdmissibilityException(N, s, (lo, hi))
    if not N > 4 * s + 1:
        raise DomainException(f"N > 4s + 1 fails for N={N}, s={s}", "s", s)

    two_s_star = 2.0 * N / (N - 2.0 * s)
    tau = (N - 4.0 * s) / (2.0 * (N - 2.0 * s))
    gamma0 = special_gamma(0.5 * (N + 2 * s)) / special_gamma(0.5 * (N - 2 * s))
    C_N = (4.0 ** s * gamma0) ** ((N - 2.0 * s) / (4.0 * s))

    params = PhysicalParams(
        N=N,
        s=s,
        two_s_star=two_s_star,
        tau=tau,
        gamma0=gamma0,
        C_N=C_N,
        c_Ns=fractional_normalization(N, s),
        omega_Nm1=sphere_area(N),
    )
    logger.debug("params N=%d s=%.6g C_N=%.12g c_Ns=%.12g", N, s, C_N, params.c_Ns)
    return params


def exponent_diagnostics(params: PhysicalParams) -> Dict[str, float]:
    """Margins of the exponent condition min{...} > (2s+1)/2"""
    N, s, tau = params.N, params.s, params.tau
    margins = {
        "decay_margin": 0.5 * (N - 2 * s) - tau,
        "order_margin": 2 * s - tau,
        "power_margin": (2 * s / (N - 2 * s)) * (0.5 * (N + 2 * s) - tau),
    }
    threshold = 0.5 * (2 * s + 1)
    smallest = min(margins.values())
    return {
        **margins,
        "threshold": threshold,
        "min_margin": smallest,
        "holds": bool(smallest > threshold),
    }
