"""Shared helpers: independent input generators and a slow-but-sure quantile oracle."""

from __future__ import annotations

import math

import numpy as np


def ball_cloud(n: int, seed: int, radius: float = 1.0) -> np.ndarray:
    """Uniform points in a ball, generated directly (not via the library)."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    return dirs * (radius * np.cbrt(rng.uniform(size=n)))[:, None]


def disc_patch(n: int, seed: int, radius: float = 0.2) -> np.ndarray:
    """Uniform points on a disc of the given radius in the z=0 plane."""
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=n))
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta), np.zeros(n)])


def phi_inv_bisect(p: float, iters: int = 200) -> float:
    """Inverse standard-normal CDF by bisection on erf; independent oracle."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must be in (0, 1)")
    lo, hi = -12.0, 12.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if 0.5 * (1.0 + math.erf(mid / math.sqrt(2.0))) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def row_rel_error(got: np.ndarray, want: np.ndarray) -> np.ndarray:
    """Per-row relative error ||got - want|| / ||want|| for 2-d complex arrays."""
    num = np.linalg.norm(got - want, axis=-1)
    den = np.linalg.norm(want, axis=-1)
    return num / den
