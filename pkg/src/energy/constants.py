# src/energy/constants.py
"""Energy constants A_1..A_6, B_0..B_3, D_1, D_2."""
import logging

from src.core.exceptions import DomainException, handle_numeric_error
from src.core.models import EnergyConstants, PhysicalParams
from src.integrals.monte_carlo import interaction_constants
from src.integrals.radial import a6_alternate, radial_bubble_integral
from src.lattice.sums import a2_resolution, lattice_constants

logger = logging.getLogger(__name__)


@handle_numeric_error
def compute_constants(params: PhysicalParams, r_bar: float = 1.0) -> EnergyConstants:
    """All energy constants for (N, s) at the ring radius r_bar"""
    if not r_bar > 0.0:
        raise DomainException(f"r_bar must be positive, got {r_bar}", "r_bar", r_bar)
    g, s, N = params.gamma, params.s, params.N

    lattice = lattice_constants(params)
    inter = interaction_constants(params)
    A1, A2, A5, A6 = lattice["A1"], lattice["A2"], inter["A5"], inter["A6"]

    B0 = 2.0 * s / N * radial_bubble_integral(params, params.two_s_star)
    B1 = radial_bubble_integral(params, 2.0)
    B2 = A1 * A5 / r_bar ** g
    B3 = A2 / A1 * B2

    alt = a6_alternate(params)
    notes = {
        "A2": str(a2_resolution(g)["note"]),
        "A6": f"(N-2s)^2/(N+2s) A5 = {A6:.15g}; (N-2s)^2/N C_N^(2*) |z|^2-moment form = {alt:.15g}",
    }
    if abs(alt - A6) > 1e-10 * A6:
        logger.warning("A6 closed forms disagree: %.15g vs %.15g", A6, alt)

    constants = EnergyConstants(
        N=N, s=s,
        A1=A1, A2=A2, A3=lattice["A3"], A4=lattice["A4"], A5=A5, A6=A6,
        B0=B0, B1=B1, B2=B2, B3=B3,
        D1=(g - 1.0) * B3 / (g * B2),
        D2=g * B2 / (2.0 * s * B1),
        r_bar_used=r_bar,
        notes=notes,
    )
    logger.debug("constants N=%d s=%g r_bar=%g: B0=%.6g B1=%.6g B2=%.6g B3=%.6g", N, s, r_bar, B0, B1, B2, B3)
    return constants
