# src/params/special.py
"""
Special functions used across the toolkit.

Gamma, zeta and Beta come from scipy.special; these wrappers add domain
checks so that poles and divergent arguments surface as DomainException
instead of inf/nan.
"""
import math

import numpy as np
from scipy import integrate, special

from src.core.exceptions import DivergenceException, DomainException, require_finite


def special_gamma(x: float) -> float:
    """Gamma function for x > 0"""
    if not x > 0.0:
        raise DomainException(f"Gamma requires x > 0, got {x}", "x", x)
    return require_finite(float(special.gamma(x)), "special_gamma")


def special_lgamma(x: float) -> float:
    if not x > 0.0:
        raise DomainException(f"log-Gamma requires x > 0, got {x}", "x", x)
    return float(special.gammaln(x))


def special_zeta(x: float) -> float:
    """Riemann zeta for x > 1"""
    if not x > 1.0:
        raise DomainException(f"zeta requires x > 1, got {x}", "x", x)
    return require_finite(float(special.zeta(x, 1.0)), "special_zeta")


def special_beta(a: float, b: float) -> float:
    """Euler Beta B(a, b) for a, b > 0"""
    if not (a > 0.0 and b > 0.0):
        raise DomainException(f"Beta requires a, b > 0, got ({a}, {b})", "beta_args", [a, b])
    return float(np.exp(special.betaln(a, b)))


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere S^{n-1} in R^n"""
    return 2.0 * math.pi ** (n / 2.0) / special_gamma(n / 2.0)


def ball_volume(n: int, radius: float = 1.0) -> float:
    """Volume of the n-ball of the given radius"""
    return math.pi ** (n / 2.0) / special_gamma(n / 2.0 + 1.0) * radius ** n


def half_line_integral(gamma: float) -> float:
    """int_0^inf (1 + t^2)^(-gamma/2) dt by adaptive quadrature"""
    if not gamma > 1.0:
        raise DivergenceException("half_line_integral", gamma)

    def f(t):
        return (1.0 + t * t) ** (-0.5 * gamma)

    # t = 1/u on [1, inf) keeps both pieces on a bounded interval
    def g(u):
        return u ** (gamma - 2.0) * (1.0 + u * u) ** (-0.5 * gamma) if u > 0.0 else (1.0 if gamma == 2.0 else 0.0)

    head, _ = integrate.quad(f, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    tail, _ = integrate.quad(g, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200)
    return head + tail


def half_line_integral_beta(gamma: float) -> float:
    """Closed form 1/2 B(1/2, (gamma-1)/2) of the same integral"""
    if not gamma > 1.0:
        raise DivergenceException("half_line_integral", gamma)
    return 0.5 * special_beta(0.5, 0.5 * (gamma - 1.0))
