"""Synthetic surface clouds with analytic normals, and three corruption models.

All shapes are centered at the origin and sized to fit inside the unit
ball, which keeps downstream bandwidths on one scale. Corruptions model
sensor artifacts: Gaussian jitter, a linear density falloff (varying scan
distance), and periodic occlusion stripes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateOutputError, ParameterError, ValidationError
from .features import canonical_seed

SHAPE_KINDS = ("sphere", "plane_patch", "cylinder", "torus")
CORRUPTION_MODELS = ("perturb", "density_gradient", "density_stripes")

TORUS_MAJOR = 0.7
TORUS_MINOR = 0.25
CYLINDER_RADIUS = 0.5
CYLINDER_HALF_HEIGHT = 0.8


@dataclass
class PointCloud:
    """n points with optional unit normals and a free-form name."""

    coords: NDArray[np.float64]
    normals: NDArray[np.float64] | None = None
    name: str = ""

    def __post_init__(self) -> None:
        pts = np.array(self.coords, dtype=np.float64)  # private copy
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"coords must have shape (n, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValidationError("a point cloud needs at least one point")
        if not np.isfinite(pts).all():
            raise ValidationError("coords contain non-finite values")
        pts.flags.writeable = False
        self.coords = pts
        if self.normals is not None:
            nrm = np.array(self.normals, dtype=np.float64)
            if nrm.shape != pts.shape:
                raise ValidationError(
                    f"normals shape {nrm.shape} does not match coords shape {pts.shape}")
            lengths = np.linalg.norm(nrm, axis=1)
            if not np.all(np.abs(lengths - 1.0) <= 1e-6):
                raise ValidationError("normals must have unit norm within 1e-6")
            nrm.flags.writeable = False
            self.normals = nrm

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    def __len__(self) -> int:
        return self.coords.shape[0]


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(canonical_seed(seed)))


def gen_shape(kind: str, n: int, seed: int) -> PointCloud:
    """Sample n points on a named surface, with analytic unit normals.

    Kinds: ``sphere`` (radius 1), ``plane_patch`` (unit disc in the z=0
    plane), ``cylinder`` (lateral surface, radius 0.5, height 1.6), and
    ``torus`` (major radius 0.7, minor radius 0.25, area-uniform sampling).
    """
    if kind not in SHAPE_KINDS:
        raise ParameterError(f"unknown shape kind {kind!r}; expected one of {SHAPE_KINDS}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    rng = _rng(seed)
    n = int(n)

    if kind == "sphere":
        dirs = rng.normal(size=(n, 3))
        lengths = np.linalg.norm(dirs, axis=1)
        while np.any(lengths < 1e-12):  # essentially never; keeps the math safe
            redo = lengths < 1e-12
            dirs[redo] = rng.normal(size=(int(redo.sum()), 3))
            lengths = np.linalg.norm(dirs, axis=1)
        dirs /= lengths[:, None]
        return PointCloud(coords=dirs, normals=dirs, name="sphere")

    if kind == "plane_patch":
        radii = np.sqrt(rng.uniform(size=n))
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        coords = np.column_stack([radii * np.cos(theta), radii * np.sin(theta), np.zeros(n)])
        normals = np.tile(np.array([0.0, 0.0, 1.0]), (n, 1))
        return PointCloud(coords=coords, normals=normals, name="plane_patch")

    if kind == "cylinder":
        theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
        z = rng.uniform(-CYLINDER_HALF_HEIGHT, CYLINDER_HALF_HEIGHT, size=n)
        ct, st = np.cos(theta), np.sin(theta)
        coords = np.column_stack([CYLINDER_RADIUS * ct, CYLINDER_RADIUS * st, z])
        normals = np.column_stack([ct, st, np.zeros(n)])
        return PointCloud(coords=coords, normals=normals, name="cylinder")

    # torus: theta runs around the hole, phi around the tube. Area density is
    # proportional to (R + r cos(phi)), handled by rejection on phi.
    big_r, small_r = TORUS_MAJOR, TORUS_MINOR
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n)
    phi = np.empty(n)
    filled = 0
    while filled < n:
        cand = rng.uniform(0.0, 2.0 * np.pi, size=n - filled)
        accept = rng.uniform(size=n - filled) < (big_r + small_r * np.cos(cand)) / (big_r + small_r)
        kept = cand[accept]
        phi[filled:filled + kept.size] = kept
        filled += kept.size
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    ring = big_r + small_r * cp
    coords = np.column_stack([ring * ct, ring * st, small_r * sp])
    normals = np.column_stack([cp * ct, cp * st, sp])
    return PointCloud(coords=coords, normals=normals, name="torus")


def corrupt(pc: PointCloud, model: str, seed: int, *, sigma: float | None = None,
            bands: int = 8, axis: int = 0, low_keep: float = 0.1) -> PointCloud:
    """Apply one corruption model, returning a new cloud.

    * ``perturb``: i.i.d. Gaussian jitter with std ``sigma`` added to every
      coordinate; normals are left untouched and n is preserved. sigma=0
      returns an identical copy.
    * ``density_gradient``: each point survives with probability falling
      linearly from 1.0 at the low end of ``axis`` to ``low_keep`` at the
      high end.
    * ``density_stripes``: the bounding interval along ``axis`` is cut into
      ``bands`` equal slabs and every other slab is dropped (the slab
      containing the minimum is kept). Deterministic; the seed is unused.

    Surviving points keep their original order. Removing every point raises
    DegenerateOutputError (cannot happen for stripes: the minimum survives).
    """
    if model not in CORRUPTION_MODELS:
        raise ParameterError(f"unknown corruption model {model!r}; expected one of {CORRUPTION_MODELS}")
    if axis not in (0, 1, 2):
        raise ParameterError(f"axis must be 0, 1, or 2, got {axis!r}")
    coords = pc.coords
    normals = pc.normals

    if model == "perturb":
        if sigma is None:
            raise ParameterError("perturb requires sigma")
        s = float(sigma)
        if not np.isfinite(s) or s < 0:
            raise ParameterError(f"sigma must be >= 0, got {sigma!r}")
        if s == 0.0:
            return PointCloud(coords=coords, normals=normals, name=pc.name)
        noisy = coords + _rng(seed).normal(0.0, s, size=coords.shape)
        return PointCloud(coords=noisy, normals=normals, name=pc.name)

    line = coords[:, axis]
    lo, hi = float(line.min()), float(line.max())
    span = hi - lo

    if model == "density_gradient":
        t = np.zeros_like(line) if span == 0.0 else (line - lo) / span
        keep_prob = 1.0 + t * (float(low_keep) - 1.0)
        keep = _rng(seed).uniform(size=line.shape[0]) < keep_prob
    else:  # density_stripes
        if bands < 1:
            raise ParameterError(f"bands must be >= 1, got {bands!r}")
        if span == 0.0:
            band = np.zeros(line.shape[0], dtype=np.int64)
        else:
            band = np.minimum((bands * (line - lo) / span).astype(np.int64), bands - 1)
        keep = band % 2 == 0

    if not keep.any():
        raise DegenerateOutputError(f"{model} removed every point")
    return PointCloud(coords=coords[keep],
                      normals=None if normals is None else normals[keep],
                      name=pc.name)
