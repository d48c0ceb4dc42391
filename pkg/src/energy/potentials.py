# src/energy/potentials.py
"""
Potentials V(r, y'') with analytic gradients.

Families:
- constant:       V = level
- gaussian_bump:  V = a + b exp(-((r - r_c)^2 + |y'' - y_c|^2) / w)
- saddle:         V = (a + b exp(-(r - r_c)^2 / w)) (floor - depth exp(-|y'' - y_c|^2 / w_y))
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from src.core.exceptions import InvalidConfigException
from src.core.models import PotentialFamily, PotentialSpec


class PotentialModel:
    """V(r, y'') with gradient, finite-difference Hessian and Cartesian helpers"""

    def __init__(self, spec: PotentialSpec, n_extra: int, scale: float = 1.0):
        self.spec = spec
        self.family = spec.family
        self.n_extra = n_extra
        self.scale = float(scale)
        y_center = spec.y_center if spec.y_center is not None else [0.0] * n_extra
        if len(y_center) != n_extra:
            raise InvalidConfigException("potential.y_center", y_center, f"{n_extra} coordinates (N - 3)")
        self.y_center = np.asarray(y_center, dtype=float)

    @classmethod
    def from_spec(cls, spec: PotentialSpec, N: int) -> "PotentialModel":
        return cls(spec, N - 3)

    @classmethod
    def constant(cls, level: float, N: int) -> "PotentialModel":
        return cls(PotentialSpec(family=PotentialFamily.CONSTANT, level=level), N - 3)

    @classmethod
    def gaussian_bump(cls, N: int, a: float = 0.0, b: float = 1.0, r_center: float = 1.0,
                      y_center: Optional[Sequence[float]] = None, width: float = 1.0) -> "PotentialModel":
        spec = PotentialSpec(family=PotentialFamily.GAUSSIAN_BUMP, a=a, b=b, r_center=r_center,
                             y_center=list(y_center) if y_center is not None else None, width=width)
        return cls(spec, N - 3)

    def scaled(self, factor: float) -> "PotentialModel":
        """c V for c > 0"""
        return PotentialModel(self.spec, self.n_extra, self.scale * factor)

    @property
    def tag(self) -> str:
        return self.family.value

    # -------------------------------------------------------------------------
    # reduced variables
    # -------------------------------------------------------------------------

    def _prep(self, r, y2) -> Tuple[np.ndarray, np.ndarray]:
        r = np.atleast_1d(np.asarray(r, dtype=float))
        y2 = np.asarray(y2, dtype=float).reshape(r.shape[0], self.n_extra)
        return r, y2

    def value(self, r, y2) -> np.ndarray:
        r, y2 = self._prep(r, y2)
        spec = self.spec
        if self.family == PotentialFamily.CONSTANT:
            out = np.full(r.shape, spec.level)
        elif self.family == PotentialFamily.GAUSSIAN_BUMP:
            q = (r - spec.r_center) ** 2 + np.sum((y2 - self.y_center) ** 2, axis=1)
            out = spec.a + spec.b * np.exp(-q / spec.width)
        else:
            radial = spec.a + spec.b * np.exp(-(r - spec.r_center) ** 2 / spec.width)
            well = spec.well_floor - spec.well_depth * np.exp(
                -np.sum((y2 - self.y_center) ** 2, axis=1) / spec.well_width)
            out = radial * well
        return self.scale * out

    def gradient(self, r, y2) -> Tuple[np.ndarray, np.ndarray]:
        """(dV/dr, dV/dy'')"""
        r, y2 = self._prep(r, y2)
        spec = self.spec
        if self.family == PotentialFamily.CONSTANT:
            return np.zeros(r.shape), np.zeros(y2.shape)
        if self.family == PotentialFamily.GAUSSIAN_BUMP:
            dy = y2 - self.y_center
            q = (r - spec.r_center) ** 2 + np.sum(dy ** 2, axis=1)
            bump = spec.b * np.exp(-q / spec.width)
            dr = -2.0 * (r - spec.r_center) / spec.width * bump
            dyv = -2.0 * dy / spec.width * bump[:, None]
            return self.scale * dr, self.scale * dyv
        radial_bump = spec.b * np.exp(-(r - spec.r_center) ** 2 / spec.width)
        radial = spec.a + radial_bump
        dradial = -2.0 * (r - spec.r_center) / spec.width * radial_bump
        dy = y2 - self.y_center
        well_bump = spec.well_depth * np.exp(-np.sum(dy ** 2, axis=1) / spec.well_width)
        well = spec.well_floor - well_bump
        dwell = 2.0 * dy / spec.well_width * well_bump[:, None]
        return self.scale * dradial * well, self.scale * radial[:, None] * dwell

    def hessian(self, r: float, y2: Sequence[float], step: float = 1e-5) -> np.ndarray:
        """Central-difference Hessian in (r, y'') from the analytic gradient"""
        x0 = np.array([r, *y2], dtype=float)
        dim = x0.size
        hess = np.zeros((dim, dim))
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = step
            gp = self._grad_vector(x0 + e)
            gm = self._grad_vector(x0 - e)
            hess[:, j] = (gp - gm) / (2.0 * step)
        return 0.5 * (hess + hess.T)

    def _grad_vector(self, x: np.ndarray) -> np.ndarray:
        dr, dy = self.gradient(x[:1], x[None, 1:])
        return np.concatenate([dr, dy[0]])

    # -------------------------------------------------------------------------
    # Cartesian points y in R^N
    # -------------------------------------------------------------------------

    def value_at(self, y) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        return self.value(np.linalg.norm(y[:, :3], axis=1), y[:, 3:])

    def grad_at(self, y) -> np.ndarray:
        """Cartesian gradient dV/dy_i, shape (M, N)"""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        r = np.linalg.norm(y[:, :3], axis=1)
        dr, dy = self.gradient(r, y[:, 3:])
        safe_r = np.where(r > 0.0, r, 1.0)
        lead = np.where(r[:, None] > 0.0, dr[:, None] * y[:, :3] / safe_r[:, None], 0.0)
        return np.column_stack([lead, dy])

    def radial_euler(self, y) -> np.ndarray:
        """<grad V(y), y> = r V_r + y'' . grad_{y''} V"""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        r = np.linalg.norm(y[:, :3], axis=1)
        dr, dy = self.gradient(r, y[:, 3:])
        return r * dr + np.sum(y[:, 3:] * dy, axis=1)
