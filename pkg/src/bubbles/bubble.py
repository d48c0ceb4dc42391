# src/bubbles/bubble.py
"""
Bubbles U_{x,lambda}(y) = C_N lambda^{(N-2s)/2} (1 + lambda^2 |y-x|^2)^{-(N-2s)/2}
and their parameter derivatives. All functions accept a single point of
shape (N,) or a batch of shape (M, N).
"""
import numpy as np

from src.core.models import Bubble, PhysicalParams


def _offsets(bubble: Bubble, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    return y - bubble.x


def unit_profile(params: PhysicalParams, q) -> np.ndarray:
    """U_{0,1} as a function of q = |z|^2"""
    return params.C_N * (1.0 + np.asarray(q, dtype=float)) ** (-params.half_gamma)


def bubble_eval(params: PhysicalParams, bubble: Bubble, y):
    """U_{x,lambda}(y)"""
    diff = _offsets(bubble, y)
    q = (bubble.lam ** 2) * np.sum(diff * diff, axis=-1)
    return params.C_N * bubble.lam ** params.half_gamma * (1.0 + q) ** (-params.half_gamma)


def bubble_dlambda(params: PhysicalParams, bubble: Bubble, y):
    """dU/dlambda"""
    diff = _offsets(bubble, y)
    q = (bubble.lam ** 2) * np.sum(diff * diff, axis=-1)
    u = params.C_N * bubble.lam ** params.half_gamma * (1.0 + q) ** (-params.half_gamma)
    return u * params.gamma / (2.0 * bubble.lam) * (1.0 - q) / (1.0 + q)


def bubble_dcenter(params: PhysicalParams, bubble: Bubble, y, i: int):
    """dU/dx_i (derivative in the center coordinate)"""
    diff = _offsets(bubble, y)
    lam2 = bubble.lam ** 2
    q = lam2 * np.sum(diff * diff, axis=-1)
    u = params.C_N * bubble.lam ** params.half_gamma * (1.0 + q) ** (-params.half_gamma)
    return u * params.gamma * lam2 * diff[..., i] / (1.0 + q)


def bubble_dy(params: PhysicalParams, bubble: Bubble, y, i: int):
    """dU/dy_i = -dU/dx_i"""
    return -bubble_dcenter(params, bubble, y, i)


def bubble_sum(params: PhysicalParams, centers: np.ndarray, lam: float, y) -> np.ndarray:
    """sum_j U_{x_j,lambda}(y) for a (2k, N) array of centers"""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    d2 = np.sum((y[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
    vals = params.C_N * lam ** params.half_gamma * (1.0 + lam * lam * d2) ** (-params.half_gamma)
    return np.sum(vals, axis=1)


def bubble_power_sum(params: PhysicalParams, centers: np.ndarray, lam: float, y, p: float) -> np.ndarray:
    """sum_j U_{x_j,lambda}(y)^p"""
    y = np.atleast_2d(np.asarray(y, dtype=float))
    d2 = np.sum((y[:, None, :] - centers[None, :, :]) ** 2, axis=-1)
    vals = params.C_N * lam ** params.half_gamma * (1.0 + lam * lam * d2) ** (-params.half_gamma)
    return np.sum(vals ** p, axis=1)
