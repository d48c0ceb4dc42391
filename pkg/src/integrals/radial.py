# src/integrals/radial.py
"""
Closed-form radial bubble integrals.

For radial integrands the N-dimensional integral collapses to
omega_{N-1} int_0^inf r^{N-1+m} (1+r^2)^{-a} dr = omega_{N-1} 1/2 B((N+m)/2, a - (N+m)/2).
Every closed form here has a 1-D adaptive quadrature counterpart used as a
cross-check.
"""
import logging

from scipy import integrate

from src.core.exceptions import DivergenceException, NumericException
from src.core.models import PhysicalParams
from src.params.special import special_beta, sphere_area

logger = logging.getLogger(__name__)

CROSS_CHECK_RTOL = 1e-10


def _radial_beta(N: int, exponent: float, m: float) -> float:
    """int_0^inf r^{N-1+m} (1+r^2)^{-exponent} dr"""
    return 0.5 * special_beta(0.5 * (N + m), exponent - 0.5 * (N + m))


def radial_moment(params: PhysicalParams, p: float, m: float = 0.0) -> float:
    """int_{R^N} U_{0,1}^p |z|^m dz"""
    exponent = 0.5 * p * params.gamma
    if not 2.0 * exponent > params.N + m:
        raise DivergenceException(f"int U^{p:g} |z|^{m:g}", p)
    return params.C_N ** p * params.omega_Nm1 * _radial_beta(params.N, exponent, m)


def radial_bubble_integral(params: PhysicalParams, p: float) -> float:
    """int_{R^N} U_{0,1}^p, finite iff p (N - 2s) > N"""
    return cross_checked_radial_integral(params, p, 0.0)


def radial_quadrature(params: PhysicalParams, p: float, m: float = 0.0) -> float:
    """Same integral by adaptive quadrature on [0,1] and r = 1/u on [1, inf)"""
    N = params.N
    exponent = 0.5 * p * params.gamma
    if not 2.0 * exponent > N + m:
        raise DivergenceException(f"int U^{p:g} |z|^{m:g}", p)
    power = N - 1 + m

    def head(r):
        return r ** power * (1.0 + r * r) ** (-exponent)

    # r^{power} (1+r^2)^{-a} dr with r = 1/u becomes u^{2a - power - 2} (1+u^2)^{-a} du
    tail_power = 2.0 * exponent - power - 2.0

    def tail(u):
        if u == 0.0:
            return 1.0 if tail_power == 0.0 else 0.0
        return u ** tail_power * (1.0 + u * u) ** (-exponent)

    a, _ = integrate.quad(head, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    b, _ = integrate.quad(tail, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return params.C_N ** p * params.omega_Nm1 * (a + b)


def cross_checked_radial_integral(params: PhysicalParams, p: float, m: float = 0.0) -> float:
    """Beta form, verified against quadrature to 1e-10 relative"""
    closed = radial_moment(params, p, m)
    numeric = radial_quadrature(params, p, m)
    rel = abs(closed - numeric) / abs(closed)
    if rel > CROSS_CHECK_RTOL:
        raise NumericException(
            f"radial integral p={p:g}, m={m:g}: Beta form {closed:.15g} vs quadrature {numeric:.15g} "
            f"(relative {rel:.2e})",
            "radial_bubble_integral",
        )
    logger.debug("radial integral p=%g m=%g = %.15g (quadrature rel %.1e)", p, m, closed, rel)
    return closed


def a6_alternate(params: PhysicalParams) -> float:
    """(N-2s)^2/N C_N^{2_s^*} int |z|^2 (1+|z|^2)^{-(N+2s)/2-1}"""
    N, s, g = params.N, params.s, params.gamma
    integral = params.omega_Nm1 * 0.5 * special_beta(0.5 * (N + 2), s)
    return g * g / N * params.C_N ** params.two_s_star * integral


def profile_normalizer(N: int, a: float) -> float:
    """int_{R^N} (1+|w|^2)^{-a} dw, finite iff a > N/2"""
    if not a > 0.5 * N:
        raise DivergenceException(f"int (1+|w|^2)^(-{a:g}) over R^{N}", a)
    return sphere_area(N) * _radial_beta(N, a, 0.0)
