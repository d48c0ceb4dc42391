# src/bubbles/approx.py
"""Approximate solutions Z (with cutoff) and Z* (without) built from 2k bubbles."""
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from src.bubbles.bubble import bubble_power_sum, bubble_sum
from src.bubbles.cutoff import eta_eval
from src.core.exceptions import UsageException
from src.core.models import Bubble, CutoffEta, CylinderConfig, PhysicalParams
from src.lattice.points import generate_points


@dataclass(frozen=True)
class ApproxSolution:
    params: PhysicalParams
    config: Optional[CylinderConfig]
    lam: float
    cutoff: Optional[CutoffEta] = None
    centers: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.lam > 0.0:
            raise UsageException(f"lambda must be positive, got {self.lam}", "lam")
        if self.config is None and self.centers is None:
            raise UsageException("ApproxSolution needs a CylinderConfig or explicit centers", "config")
        if self.config is not None and self.config.N != self.params.N:
            raise UsageException(
                f"config has dimension {self.config.N} but params has N={self.params.N}", "config.y2_bar"
            )

    @classmethod
    def from_centers(cls, params: PhysicalParams, centers: Sequence[Sequence[float]], lam: float,
                     cutoff: Optional[CutoffEta] = None) -> "ApproxSolution":
        pts = np.atleast_2d(np.asarray(centers, dtype=float))
        if pts.shape[1] != params.N:
            raise UsageException(f"centers must have {params.N} coordinates", "centers")
        return cls(params=params, config=None, lam=lam, cutoff=cutoff, centers=pts)

    @property
    def points(self) -> np.ndarray:
        if self.centers is not None:
            return self.centers
        return generate_points(self.config)

    @property
    def bubbles(self) -> List[Bubble]:
        return [Bubble(center=tuple(p), lam=self.lam) for p in self.points]

    @property
    def k(self) -> int:
        return self.config.k if self.config is not None else len(self.points) // 2

    def without_cutoff(self) -> "ApproxSolution":
        return ApproxSolution(self.params, self.config, self.lam, None, self.centers)

    def bubble_total(self, y) -> np.ndarray:
        """sum_j U_j(y), no cutoff"""
        return bubble_sum(self.params, self.points, self.lam, y)

    def power_total(self, y, p: float) -> np.ndarray:
        """sum_j U_j(y)^p"""
        return bubble_power_sum(self.params, self.points, self.lam, y, p)

    def eta(self, y) -> np.ndarray:
        y = np.atleast_2d(np.asarray(y, dtype=float))
        if self.cutoff is None:
            return np.ones(y.shape[0])
        return np.atleast_1d(eta_eval(self.cutoff, y))


def approx_eval(sol: ApproxSolution, y):
    """Z(y) = eta(y) sum_j U_j(y), or Z*(y) when the cutoff is absent"""
    single = np.asarray(y).ndim == 1
    values = sol.eta(y) * sol.bubble_total(y)
    return float(values[0]) if single else values
