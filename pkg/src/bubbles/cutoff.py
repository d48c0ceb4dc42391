# src/bubbles/cutoff.py
"""
Cutoff eta(y), a function of the reduced variables (|y'|, y'') only.

eta = 1 within distance sigma of the anchor, 0 beyond 2 sigma, and a
quintic smoothstep in between.
"""
import logging
from typing import Optional, Sequence

import numpy as np

from src.core.config import settings
from src.core.exceptions import InvalidConfigException
from src.core.models import CutoffEta, EtaProfile

logger = logging.getLogger(__name__)

# max of d/dt of the quintic smoothstep, attained at t = 1/2
QUINTIC_MAX_SLOPE = 1.875


def reduced_coordinates(y) -> tuple:
    """(r, y'') with r = |y'| and y' = (y_1, y_2, y_3)"""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    return np.linalg.norm(y[:, :3], axis=1), y[:, 3:]


def cylinder_distance(cutoff: CutoffEta, y) -> np.ndarray:
    """|(r, y'') - (r_0, y_0'')| for each point"""
    r, y2 = reduced_coordinates(y)
    anchor_y2 = np.asarray(cutoff.anchor_y2, dtype=float)
    d2 = (r - cutoff.anchor_r) ** 2
    if y2.shape[1]:
        d2 = d2 + np.sum((y2 - anchor_y2) ** 2, axis=1)
    return np.sqrt(d2)


def ramp(t: np.ndarray) -> np.ndarray:
    """1 at t <= 0, 0 at t >= 1"""
    t = np.clip(t, 0.0, 1.0)
    return 1.0 - t ** 3 * (10.0 - 15.0 * t + 6.0 * t * t)


def eta_eval(cutoff: CutoffEta, y):
    """eta(y) in [0, 1]; scalar for a single point"""
    single = np.asarray(y).ndim == 1
    if cutoff.profile == EtaProfile.UNIT:
        out = np.ones(1 if single else np.asarray(y).shape[0])
    else:
        d = cylinder_distance(cutoff, y)
        out = ramp(d / cutoff.sigma - 1.0)
    return float(out[0]) if single else out


def eta_gradient_bound(cutoff: CutoffEta) -> float:
    """sup |grad eta|"""
    if cutoff.profile == EtaProfile.UNIT:
        return 0.0
    return QUINTIC_MAX_SLOPE / cutoff.sigma


def eta_is_constant_on_ball(cutoff: CutoffEta, y, radius: float) -> bool:
    """True when eta cannot vary on the Euclidean ball B(y, radius)"""
    if cutoff.profile == EtaProfile.UNIT:
        return True
    d = float(cylinder_distance(cutoff, y)[0])
    # cylinder distance is 1-Lipschitz in y
    return d + radius <= cutoff.sigma or d - radius >= 2.0 * cutoff.sigma


def make_cutoff(anchor_r: float, anchor_y2: Sequence[float], sigma: Optional[float] = None,
                sigma_factor: Optional[float] = None, profile: EtaProfile = EtaProfile.QUINTIC) -> CutoffEta:
    """Cutoff with sigma = sigma_factor * r_0 unless sigma is given"""
    if sigma is None:
        factor = sigma_factor if sigma_factor is not None else float(settings.cutoff.get("sigma_factor", 0.1))
        sigma = factor * anchor_r
    return CutoffEta(anchor_r=anchor_r, anchor_y2=tuple(anchor_y2), sigma=sigma, profile=profile)


def validate_sigma(cutoff: CutoffEta, potential, s: float, n_radii: int = 64,
                   radius_factor: Optional[float] = None) -> bool:
    """Check r^{2s} V > 0 on the open (r, y'')-ball of radius 10 sigma"""
    factor = radius_factor or float(settings.cutoff.get("validity_radius_factor", 10.0))
    radius = factor * cutoff.sigma
    dim = 1 + len(cutoff.anchor_y2)
    directions = [np.eye(dim)[i] * sign for i in range(dim) for sign in (1.0, -1.0)]
    if dim > 1:
        diag = np.ones(dim) / np.sqrt(dim)
        directions += [diag, -diag]
    anchor = np.array([cutoff.anchor_r, *cutoff.anchor_y2], dtype=float)
    for direction in directions:
        for i in range(n_radii):
            point = anchor + radius * (i / n_radii) * direction
            r, y2 = point[0], point[1:]
            if r <= 0.0:
                raise InvalidConfigException("cutoff.sigma", cutoff.sigma,
                                             f"10 sigma ball must stay in r > 0 (anchor r={cutoff.anchor_r})")
            value = r ** (2 * s) * float(potential.value(np.array([r]), y2[None, :])[0])
            if not value > 0.0:
                raise InvalidConfigException("cutoff.sigma", cutoff.sigma,
                                             f"r^(2s) V > 0 within {factor:g} sigma of the anchor")
    logger.debug("sigma=%.4g validated on %d directions", cutoff.sigma, len(directions))
    return True
