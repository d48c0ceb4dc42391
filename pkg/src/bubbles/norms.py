# src/bubbles/norms.py
"""
Weighted sup-norms ||.||_* and ||.||_** estimated on explicit sample sets.

The estimate is a max over samples, hence a lower bound of the true sup.
"""
from typing import Callable, Optional, Union

import numpy as np

from src.core.exceptions import UsageException
from src.core.models import CutoffEta, CylinderConfig, PhysicalParams
from src.lattice.points import generate_points, min_gap_d0

LOCAL_OFFSETS = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)
RAMP_STEPS = (0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0)

PointSource = Union[CylinderConfig, np.ndarray]


def _points(config: PointSource) -> np.ndarray:
    if isinstance(config, CylinderConfig):
        return generate_points(config)
    return np.atleast_2d(np.asarray(config, dtype=float))


def _weight(points: np.ndarray, lam: float, y, lead: float, tail: float) -> np.ndarray:
    y = np.atleast_2d(np.asarray(y, dtype=float))
    dist = np.sqrt(np.sum((y[:, None, :] - points[None, :, :]) ** 2, axis=-1))
    return lam ** lead * np.sum((1.0 + lam * dist) ** (-tail), axis=1)


def star_weight(params: PhysicalParams, config: PointSource, lam: float, y):
    """sum_j lambda^{(N-2s)/2} / (1 + lambda |y - x_j|)^{(N-2s)/2 + tau}"""
    single = np.asarray(y).ndim == 1
    lead = 0.5 * (params.N - 2 * params.s)
    w = _weight(_points(config), lam, y, lead, lead + params.tau)
    return float(w[0]) if single else w


def dstar_weight(params: PhysicalParams, config: PointSource, lam: float, y):
    """sum_j lambda^{(N+2s)/2} / (1 + lambda |y - x_j|)^{(N+2s)/2 + tau}"""
    single = np.asarray(y).ndim == 1
    lead = 0.5 * (params.N + 2 * params.s)
    w = _weight(_points(config), lam, y, lead, lead + params.tau)
    return float(w[0]) if single else w


def norm_estimate(u: Union[Callable, np.ndarray], weight: Union[Callable, np.ndarray], samples) -> float:
    """max over samples of |u(y)| / weight(y)"""
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0 or samples.shape[0] == 0:
        raise UsageException("norm_estimate needs a nonempty sample set", "samples")
    samples = np.atleast_2d(samples)
    u_vals = np.atleast_1d(u(samples) if callable(u) else np.asarray(u, dtype=float))
    w_vals = np.atleast_1d(weight(samples) if callable(weight) else np.asarray(weight, dtype=float))
    if u_vals.shape[0] != samples.shape[0] or w_vals.shape[0] != samples.shape[0]:
        raise UsageException("u and weight must provide one value per sample", "samples")
    return float(np.max(np.abs(u_vals) / w_vals))


def build_sample_set(params: PhysicalParams, config: CylinderConfig, lam: float,
                     cutoff: Optional[CutoffEta] = None, n_far: int = 32, seed: int = 0) -> np.ndarray:
    """Structured sample set: local grids, segments, ramp points, far field"""
    N = params.N
    pts = generate_points(config)
    k = config.k
    x_plus, x_minus = pts[0], pts[k]
    if k >= 2:
        cap = min_gap_d0(config)
    else:
        cap = max(config.r_bar * config.h_bar / 2.0, 1.0 / lam)

    radial = np.zeros(N)
    radial[0] = 1.0
    tangent = np.zeros(N)
    tangent[1] = 1.0
    axes = [radial, tangent] + [np.eye(N)[i] for i in range(2, N)]

    samples = []
    for center in (x_plus, x_minus):
        for offset in LOCAL_OFFSETS:
            step = min(offset / lam, cap)
            if step == 0.0:
                samples.append(center.copy())
                continue
            for axis in axes:
                samples.append(center + step * axis)
                samples.append(center - step * axis)

    neighbours = [x_minus] + ([pts[1]] if k >= 2 else [])
    for other in neighbours:
        for t in (0.25, 0.5):
            samples.append(x_plus + t * (other - x_plus))

    if cutoff is not None:
        direction = x_plus[:3] / np.linalg.norm(x_plus[:3])
        anchor_y2 = np.asarray(cutoff.anchor_y2, dtype=float)
        for c in RAMP_STEPS:
            for sign in (1.0, -1.0):
                r = cutoff.anchor_r + sign * c * cutoff.sigma
                if r <= 0.0:
                    continue
                samples.append(np.concatenate([r * direction, anchor_y2]))
            if N > 3:
                shifted = anchor_y2.copy()
                shifted[0] += c * cutoff.sigma
                samples.append(np.concatenate([cutoff.anchor_r * direction, shifted]))

    if n_far > 0:
        rng = np.random.default_rng(seed)
        half = 3.0 * config.r_bar
        box = rng.uniform(-half, half, size=(n_far, N))
        box[:, 3:] += np.asarray(config.y2_bar, dtype=float)
        samples.extend(box)

    return np.unique(np.asarray(samples), axis=0)
