# src/integrals/sampling.py
"""
Importance proposals for the Monte Carlo integrals.

RadialProfileSampler draws w in R^N with density proportional to
(1+|w|^2)^{-a}. With t = r^2/(1+r^2), t is Beta(N/2, a - N/2), so the radius
comes from an inverse-CDF table of the regularized incomplete Beta function
(2048 knots clustered at both ends, PCHIP interpolation). The last table
interval falls back to the exact inverse.

MixtureProposal combines radial profiles and tube-uniform components and
evaluates the balance-heuristic density.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import interpolate, special

from src.core.config import settings
from src.core.exceptions import UsageException
from src.integrals.radial import profile_normalizer
from src.params.special import ball_volume

logger = logging.getLogger(__name__)


def random_directions(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """n uniform unit vectors in R^dim"""
    g = rng.standard_normal((n, dim))
    norms = np.linalg.norm(g, axis=1)
    while np.any(norms == 0.0):
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), dim))
        norms = np.linalg.norm(g, axis=1)
    return g / norms[:, None]


class RadialProfileSampler:
    """Samples from rho_a(w) = (1+|w|^2)^{-a} / Z_a on R^N"""

    def __init__(self, N: int, a: float, knots: Optional[int] = None):
        if not a > 0.5 * N:
            raise UsageException(f"radial profile needs a > N/2, got a={a}, N={N}", "a")
        self.N = N
        self.a = float(a)
        self.alpha = 0.5 * N
        self.beta = self.a - 0.5 * N
        self.log_norm = float(np.log(profile_normalizer(N, self.a)))
        self.knots = int(knots or settings.monte_carlo.get("table_knots", 2048))
        self._v = np.linspace(0.0, 1.0, self.knots)
        u = 0.5 * (1.0 - np.cos(np.pi * self._v))
        t = special.betaincinv(self.alpha, self.beta, u)
        self._table = interpolate.PchipInterpolator(self._v, t)
        self._v_exact = self._v[-2]

    def _t_from_uniform(self, u: np.ndarray) -> np.ndarray:
        v = np.arccos(np.clip(1.0 - 2.0 * u, -1.0, 1.0)) / np.pi
        t = np.empty_like(u)
        body = v <= self._v_exact
        t[body] = self._table(v[body])
        if np.any(~body):
            t[~body] = special.betaincinv(self.alpha, self.beta, u[~body])
        return np.clip(t, 0.0, np.nextafter(1.0, 0.0))

    def radii(self, u: np.ndarray) -> np.ndarray:
        t = self._t_from_uniform(np.asarray(u, dtype=float))
        return np.sqrt(t / (1.0 - t))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n points w in R^N"""
        r = self.radii(rng.random(n))
        return r[:, None] * random_directions(rng, n, self.N)

    def log_density(self, w) -> np.ndarray:
        w = np.atleast_2d(np.asarray(w, dtype=float))
        return -self.a * np.log1p(np.sum(w * w, axis=1)) - self.log_norm


@lru_cache(maxsize=64)
def profile_sampler(N: int, a: float) -> RadialProfileSampler:
    """Cached sampler; the table depends only on (N, a)"""
    return RadialProfileSampler(N, a)


# =============================================================================
# MIXTURE COMPONENTS
# =============================================================================

@dataclass(frozen=True, eq=False)
class RadialComponent:
    """lambda^N rho_a(lambda (z - center))"""
    center: np.ndarray
    lam: float
    a: float
    weight: float

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        w = profile_sampler(len(self.center), self.a).sample(rng, n)
        return self.center + w / self.lam

    def reflect(self, z: np.ndarray) -> np.ndarray:
        return 2.0 * self.center - z

    def density(self, z: np.ndarray) -> np.ndarray:
        sampler = profile_sampler(len(self.center), self.a)
        w = self.lam * (z - self.center)
        return np.exp(len(self.center) * np.log(self.lam) + sampler.log_density(w))


@dataclass(frozen=True, eq=False)
class TubeComponent:
    """
    Uniform (r, y'') in the (N-2)-ball of the given radius around (r0, y0''),
    y' = r times a uniform direction in S^2. Density in R^N is
    1 / (V_{N-2}(radius) 4 pi r^2) inside the tube.
    """
    anchor_r: float
    anchor_y2: Tuple[float, ...]
    radius: float
    weight: float
    N: int = field(default=6)

    def __post_init__(self):
        if not self.radius < self.anchor_r:
            raise UsageException("tube radius must stay below the anchor radius", "radius")

    @property
    def _center(self) -> np.ndarray:
        return np.array([self.anchor_r, *self.anchor_y2], dtype=float)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        dim = self.N - 2
        rad = self.radius * rng.random(n) ** (1.0 / dim)
        reduced = self._center + rad[:, None] * random_directions(rng, n, dim)
        lead = reduced[:, :1] * random_directions(rng, n, 3)
        return np.column_stack([lead, reduced[:, 1:]])

    def reflect(self, z: np.ndarray) -> np.ndarray:
        """Reflect (r, y'') through the anchor, keeping the direction of y'"""
        r = np.linalg.norm(z[:, :3], axis=1)
        r_new = 2.0 * self.anchor_r - r
        lead = z[:, :3] * (r_new / r)[:, None]
        y2 = 2.0 * np.asarray(self.anchor_y2, dtype=float) - z[:, 3:]
        return np.column_stack([lead, y2])

    def density(self, z: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(z[:, :3], axis=1)
        d2 = (r - self.anchor_r) ** 2 + np.sum((z[:, 3:] - np.asarray(self.anchor_y2)) ** 2, axis=1)
        inside = d2 <= self.radius ** 2
        vol = ball_volume(self.N - 2, self.radius)
        safe_r = np.where(r > 0.0, r, 1.0)
        return np.where(inside, 1.0 / (vol * 4.0 * np.pi * safe_r ** 2), 0.0)


@dataclass(frozen=True, eq=False)
class ParetoComponent:
    """Kernel-shaped shell: density 2s R^{2s} / (omega_{N-1} |z - c|^{N+2s}) for |z - c| >= R"""
    center: np.ndarray
    inner_radius: float
    s: float
    weight: float
    omega: float

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        N = len(self.center)
        rad = self.inner_radius * (1.0 - rng.random(n)) ** (-1.0 / (2.0 * self.s))
        return self.center + rad[:, None] * random_directions(rng, n, N)

    def reflect(self, z: np.ndarray) -> np.ndarray:
        return 2.0 * self.center - z

    def density(self, z: np.ndarray) -> np.ndarray:
        N = len(self.center)
        dist = np.linalg.norm(z - self.center, axis=1)
        safe = np.where(dist >= self.inner_radius, dist, self.inner_radius)
        value = 2.0 * self.s * self.inner_radius ** (2.0 * self.s) / (self.omega * safe ** (N + 2.0 * self.s))
        return np.where(dist >= self.inner_radius, value, 0.0)


class MixtureProposal:
    """sum_j w_j q_j(z); sampling picks components by a multinomial draw"""

    def __init__(self, components: Sequence):
        if not components:
            raise UsageException("mixture needs at least one component", "components")
        total = sum(c.weight for c in components)
        if not total > 0.0:
            raise UsageException("mixture weights must sum to a positive value", "components")
        self.components: List = list(components)
        self.weights = np.array([c.weight for c in components], dtype=float) / total

    def sample(self, rng: np.random.Generator, n: int, antithetic: bool = False):
        """
        Returns (z, partner). partner is None unless antithetic, in which case
        partner[i] is z[i] reflected through its component's centre.
        """
        counts = rng.multinomial(n, self.weights)
        blocks, mirrors = [], []
        for component, count in zip(self.components, counts):
            if count == 0:
                continue
            z = component.sample(rng, int(count))
            blocks.append(z)
            if antithetic:
                mirrors.append(component.reflect(z))
        z = np.vstack(blocks)
        partner = np.vstack(mirrors) if antithetic else None
        return z, partner

    def density(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=float))
        out = np.zeros(z.shape[0])
        for weight, component in zip(self.weights, self.components):
            out += weight * component.density(z)
        return out


def bubble_mixture(centers: np.ndarray, lam: float, a: float, weight: float = 1.0) -> List[RadialComponent]:
    """Equal-weight radial components at each center"""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    share = weight / centers.shape[0]
    return [RadialComponent(center=c.copy(), lam=lam, a=a, weight=share) for c in centers]
