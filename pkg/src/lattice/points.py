# src/lattice/points.py
"""Concentration points x_j^+/- on the doubled cylinder."""
import numpy as np

from src.core.exceptions import DomainException
from src.core.models import CylinderConfig


def generate_points(config: CylinderConfig) -> np.ndarray:
    """(2k, N) array: x_1^+ ... x_k^+ followed by x_1^- ... x_k^-"""
    k, r, h = config.k, config.r_bar, config.h_bar
    angles = 2.0 * np.pi * np.arange(k) / k
    radius = r * np.sqrt(1.0 - h * h)
    ring = np.column_stack([radius * np.cos(angles), radius * np.sin(angles)])
    tail = np.broadcast_to(np.asarray(config.y2_bar, dtype=float), (k, len(config.y2_bar)))
    plus = np.column_stack([ring, np.full(k, r * h), tail])
    minus = np.column_stack([ring, np.full(k, -r * h), tail])
    return np.vstack([plus, minus])


def same_side_distances(config: CylinderConfig) -> np.ndarray:
    """|x_j^+ - x_1^+| for j = 2..k"""
    j = np.arange(2, config.k + 1)
    return 2.0 * config.r_bar * np.sqrt(1.0 - config.h_bar ** 2) * np.sin((j - 1) * np.pi / config.k)


def cross_side_distances(config: CylinderConfig) -> np.ndarray:
    """|x_j^- - x_1^+| for j = 1..k"""
    j = np.arange(1, config.k + 1)
    h2 = config.h_bar ** 2
    sin2 = np.sin((j - 1) * np.pi / config.k) ** 2
    return 2.0 * config.r_bar * np.sqrt((1.0 - h2) * sin2 + h2)


def min_gap_d0(config: CylinderConfig) -> float:
    """min{|x_2^+ - x_1^+|/4, |x_1^- - x_1^+|/4}"""
    if config.k < 2:
        raise DomainException("min_gap_d0 needs k >= 2", "k", config.k)
    same = 2.0 * config.r_bar * np.sqrt(1.0 - config.h_bar ** 2) * np.sin(np.pi / config.k)
    cross = 2.0 * config.r_bar * config.h_bar
    return float(min(same, cross) / 4.0)


def rotation_matrix(N: int, k: int) -> np.ndarray:
    """Rotation by 2 pi / k in the (y_1, y_2) plane"""
    rot = np.eye(N)
    c, s = np.cos(2.0 * np.pi / k), np.sin(2.0 * np.pi / k)
    rot[0, 0], rot[0, 1], rot[1, 0], rot[1, 1] = c, -s, s, c
    return rot
