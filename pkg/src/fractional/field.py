# src/fractional/field.py
"""
Functions handed to the fractional Laplacian.

A FieldFunction is a linear combination of
- radial terms  coef * f(|y - c|^2 / scale^2)   (bubbles, constants), and
- generic terms coef * g(y)                      (anything else),
each carrying its length scale and power-decay exponent so that the
quadrature can place its inner radius and absorb the far tail.
"""
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence, Tuple

import numpy as np

from src.core.models import Bubble, PhysicalParams

Profile = Callable[[np.ndarray], np.ndarray]


def bubble_profile(q: np.ndarray, half_gamma: float) -> np.ndarray:
    return (1.0 + q) ** (-half_gamma)


def flat_profile(q: np.ndarray) -> np.ndarray:
    return np.ones_like(np.asarray(q, dtype=float))


@dataclass(frozen=True, eq=False)
class RadialTerm:
    center: np.ndarray
    scale: float
    coef: float
    profile: Profile
    decay: float

    def __call__(self, y: np.ndarray) -> np.ndarray:
        q = np.sum((y - self.center) ** 2, axis=-1) / self.scale ** 2
        return self.coef * self.profile(q)

    def times(self, factor: float) -> "RadialTerm":
        return RadialTerm(self.center, self.scale, factor * self.coef, self.profile, self.decay)


@dataclass(frozen=True, eq=False)
class GenericTerm:
    func: Callable[[np.ndarray], np.ndarray]
    scale: float = 1.0
    decay: float = 0.0
    coef: float = 1.0

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.coef * np.asarray(self.func(y), dtype=float)

    def times(self, factor: float) -> "GenericTerm":
        return GenericTerm(self.func, self.scale, self.decay, factor * self.coef)


class FieldFunction:
    """Linear combination of radial and generic terms"""

    def __init__(self, radial: Sequence[RadialTerm] = (), generic: Sequence[GenericTerm] = ()):
        self.radial: Tuple[RadialTerm, ...] = tuple(radial)
        self.generic: Tuple[GenericTerm, ...] = tuple(generic)

    @classmethod
    def from_bubble(cls, params: PhysicalParams, bubble: Bubble) -> "FieldFunction":
        term = RadialTerm(
            center=bubble.x,
            scale=1.0 / bubble.lam,
            coef=params.C_N * bubble.lam ** params.half_gamma,
            profile=partial(bubble_profile, half_gamma=params.half_gamma),
            decay=params.gamma,
        )
        return cls(radial=[term])

    @classmethod
    def from_bubbles(cls, params: PhysicalParams, centers: np.ndarray, lam: float) -> "FieldFunction":
        out = cls()
        for c in np.atleast_2d(np.asarray(centers, dtype=float)):
            out = out + cls.from_bubble(params, Bubble(center=tuple(c), lam=lam))
        return out

    @classmethod
    def constant(cls, value: float, N: int) -> "FieldFunction":
        return cls(radial=[RadialTerm(np.zeros(N), 1.0, float(value), flat_profile, 0.0)])

    @classmethod
    def from_callable(cls, func: Callable[[np.ndarray], np.ndarray], scale: float = 1.0,
                      decay: float = 0.0) -> "FieldFunction":
        return cls(generic=[GenericTerm(func, scale, decay)])

    def __call__(self, y) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        total = np.zeros(y.shape[0])
        for term in self.radial:
            total += term(y)
        for term in self.generic:
            total += term(y)
        return total

    def __add__(self, other: "FieldFunction") -> "FieldFunction":
        return FieldFunction(self.radial + other.radial, self.generic + other.generic)

    def __mul__(self, factor: float) -> "FieldFunction":
        return FieldFunction([t.times(factor) for t in self.radial], [t.times(factor) for t in self.generic])

    __rmul__ = __mul__

    def __neg__(self) -> "FieldFunction":
        return self * -1.0

    def __sub__(self, other: "FieldFunction") -> "FieldFunction":
        return self + (-other)

    def magnitude(self, s: float) -> float:
        """sum |coef| scale^{-2s}, the natural size of (-Delta)^s of this field"""
        terms = self.radial + self.generic
        return float(sum(abs(t.coef) * t.scale ** (-2.0 * s) for t in terms))
