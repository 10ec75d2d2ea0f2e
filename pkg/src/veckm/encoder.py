"""The three local-encoding computation paths plus row normalization.

Given points X (n x 3) and an A basis with bandwidth alpha, the encoding of
point j summarizes its neighborhood as a length-d complex vector. Three
routes compute it:

* ``encode_pointwise`` is the definition: average exp(i (x_k - x_j) . A)
  over neighbors within a sharp radius. One row at a time, used as the oracle.
* ``encode_dense_sharp`` / ``encode_dense_soft_exact`` build all rows at once
  through an explicit n x n adjacency (binary, or Gaussian-decay weights
  exp(-beta^2 ||x_j - x_k||^2 / 2)). Quadratic reference paths.
* ``encode_dense_factorized`` is the production path. The soft adjacency
  factorizes through a second basis B (p frequency vectors at bandwidth
  beta), so G = (B_mat (B_mat^H A_mat)) ./ A_mat costs Theta(npd) time and
  O(np + nd + pd) memory. No n x n buffer is ever materialized.

The dense sharp/soft paths return plain neighbor sums; ``encode_pointwise``
returns the 1/n'-averaged form. ``normalize_rows`` rescales rows to norm
sqrt(d) and is deferred so the raw sums stay inspectable.

All accumulation is in float64/complex128; 32-bit is export-only. Every
function here is pure, and with a single BLAS thread the summation order is
fixed, so repeated runs are bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DegenerateEncodingError, ParameterError, ValidationError
from .features import FeatureBasis


@dataclass(frozen=True)
class AdjacencySpec:
    """Which neighborhood notion produced an encoding: sharp(radius) or soft(beta)."""

    kind: str
    value: float

    def __post_init__(self) -> None:
        if self.kind not in ("sharp", "soft"):
            raise ParameterError(f"kind must be 'sharp' or 'soft', got {self.kind!r}")
        v = float(self.value)
        if not np.isfinite(v) or v <= 0:
            raise ParameterError(f"{self.kind} parameter must be positive, got {self.value!r}")
        object.__setattr__(self, "value", v)

    @classmethod
    def sharp(cls, radius: float) -> "AdjacencySpec":
        return cls("sharp", radius)

    @classmethod
    def soft(cls, beta: float) -> "AdjacencySpec":
        return cls("soft", beta)

    @property
    def radius(self) -> float:
        if self.kind != "sharp":
            raise ParameterError("radius is only defined for sharp neighborhoods")
        return self.value

    @property
    def beta(self) -> float:
        if self.kind != "soft":
            raise ParameterError("beta is only defined for soft neighborhoods")
        return self.value


@dataclass
class EncodingMatrix:
    """An n x d complex matrix of per-point encodings with its construction parameters.

    Attributes
    ----------
    rows : ndarray of complex128, shape (n, d)
        One encoding per input point.
    normalized : bool
        True when every row has norm sqrt(d); False for raw sums/averages.
    alpha : float
        Bandwidth of the A basis that produced the rows.
    neighborhood : AdjacencySpec
        The adjacency notion (sharp radius or soft beta) that was used.
    """

    rows: NDArray[np.complex128]
    normalized: bool
    alpha: float
    neighborhood: AdjacencySpec

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.complex128)
        if rows.ndim != 2:
            raise ValidationError(f"rows must be a 2-d matrix, got shape {rows.shape}")
        if rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValidationError(f"rows must be non-empty, got shape {rows.shape}")
        a = float(self.alpha)
        if not np.isfinite(a) or a <= 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha!r}")
        if not isinstance(self.neighborhood, AdjacencySpec):
            raise ValidationError("neighborhood must be an AdjacencySpec")
        self.rows = rows
        self.alpha = a
        self.normalized = bool(self.normalized)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


def _cloud_coords(points: ArrayLike) -> NDArray[np.float64]:
    """Validate an (n, 3) coordinate array (accepts PointCloud via .coords)."""
    coords = getattr(points, "coords", points)
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValidationError(f"points must have shape (n, 3), got {pts.shape}")
    if pts.shape[0] == 0:
        raise ValidationError("points are empty")
    if not np.isfinite(pts).all():
        bad = int(np.argwhere(~np.isfinite(pts).all(axis=1))[0, 0])
        raise ValidationError(f"non-finite coordinate at point index {bad}")
    return pts


def _phase_planes(pts: NDArray[np.float64], basis: FeatureBasis):
    """Cosine and sine planes of the phase matrix X . basis (n x dim each)."""
    phase = pts @ basis.matrix
    return np.cos(phase), np.sin(phase)


def _check_unit_modulus(c: NDArray[np.float64], s: NDArray[np.float64]) -> None:
    # The ./ A step multiplies by conjugates, which is only a division when
    # |A| = 1 entrywise. cos^2 + sin^2 cannot drift from 1, but guard anyway.
    m2 = c * c
    m2 += s * s
    m2 -= 1.0
    assert float(np.abs(m2, out=m2).max()) < 1e-9, "embedding entries lost unit modulus"


def _sq_dists(pts: NDArray[np.float64]) -> NDArray[np.float64]:
    """Pairwise squared distances via the Gram expansion (tiny negatives clipped)."""
    sq = np.einsum("ij,ij->i", pts, pts)
    d2 = sq[:, None] + sq[None, :]
    d2 -= 2.0 * (pts @ pts.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def _shift_to_local(weights: NDArray[np.float64], cA: NDArray[np.float64],
                    sA: NDArray[np.float64]) -> NDArray[np.complex128]:
    """Form (W . A_mat) ./ A_mat given the adjacency weights and the A planes.

    The division is by unit-modulus entries, so it is implemented as
    multiplication by the conjugate plane. This is the identity that turns
    global phases exp(i x_k . a) into neighbor-relative ones
    exp(i (x_k - x_j) . a) without forming any per-pair difference.
    """
    re = weights @ cA
    im = weights @ sA
    out = np.empty(cA.shape, dtype=np.complex128)
    out.real = re * cA + im * sA
    out.imag = im * cA - re * sA
    return out


def encode_pointwise(points: ArrayLike, center_index: int, radius: float,
                     basis_a: FeatureBasis) -> NDArray[np.complex128]:
    """Encode one point's neighborhood directly from the definition.

    Averages exp(i (x_k - x_center) . A) over the points with
    ||x_k - x_center|| < radius. The center is always its own neighbor
    (distance 0), contributing an all-ones term, so the neighbor count n'
    is at least 1 and the result is the 1/n'-averaged local encoding.

    Returns a length-dim complex vector. Raises IndexError for a bad
    center_index and ParameterError for a non-positive radius.
    """
    pts = _cloud_coords(points)
    n = pts.shape[0]
    idx = int(center_index)
    if idx < 0 or idx >= n:
        raise IndexError(f"center_index {center_index} out of range for {n} points")
    r = float(radius)
    if not np.isfinite(r) or r <= 0:
        raise ParameterError(f"radius must be positive, got {radius!r}")
    diffs = pts - pts[idx]
    within = np.einsum("ij,ij->i", diffs, diffs) < r * r
    phase = diffs[within] @ basis_a.matrix
    terms = np.empty(phase.shape, dtype=np.complex128)
    np.cos(phase, out=terms.real)
    np.sin(phase, out=terms.imag)
    return terms.mean(axis=0)


def encode_dense_sharp(points: ArrayLike, radius: float,
                       basis_a: FeatureBasis) -> EncodingMatrix:
    """Encode all points through the binary adjacency (quadratic reference path).

    J[j, k] = 1 iff ||x_j - x_k|| < radius (strict, so the diagonal is 1),
    and G = (J . A_mat) ./ A_mat. Rows are plain neighbor sums: row j equals
    n'_j times ``encode_pointwise(points, j, radius, basis_a)``. Costs
    Theta(n^2) time and memory by design; it exists as an oracle.
    """
    pts = _cloud_coords(points)
    r = float(radius)
    if not np.isfinite(r) or r <= 0:
        raise ParameterError(f"radius must be positive, got {radius!r}")
    cA, sA = _phase_planes(pts, basis_a)
    _check_unit_modulus(cA, sA)
    adj = (_sq_dists(pts) < r * r).astype(np.float64)
    rows = _shift_to_local(adj, cA, sA)
    return EncodingMatrix(rows, normalized=False, alpha=basis_a.bandwidth,
                          neighborhood=AdjacencySpec.sharp(r))


def encode_dense_soft_exact(points: ArrayLike, beta: float,
                            basis_a: FeatureBasis) -> EncodingMatrix:
    """Encode all points through the exact Gaussian-decay adjacency.

    W[j, k] = exp(-beta^2 ||x_j - x_k||^2 / 2) computed as a dense n x n
    matrix, then G = (W . A_mat) ./ A_mat. This is the p -> infinity limit
    the factorized path converges to, kept quadratic on purpose as its
    oracle.
    """
    pts = _cloud_coords(points)
    b = float(beta)
    if not np.isfinite(b) or b <= 0:
        raise ParameterError(f"beta must be positive, got {beta!r}")
    cA, sA = _phase_planes(pts, basis_a)
    _check_unit_modulus(cA, sA)
    w = _sq_dists(pts)
    w *= -0.5 * b * b
    np.exp(w, out=w)
    rows = _shift_to_local(w, cA, sA)
    return EncodingMatrix(rows, normalized=False, alpha=basis_a.bandwidth,
                          neighborhood=AdjacencySpec.soft(b))


def encode_dense_factorized(points: ArrayLike, basis_a: FeatureBasis,
                            basis_b: FeatureBasis, normalize: bool = True) -> EncodingMatrix:
    """Encode all points in Theta(npd) time without any n x n intermediate.

    Computes G = (1/p) (B_mat (B_mat^H A_mat)) ./ A_mat where
    A_mat = exp(i X A) is n x d and B_mat = exp(i X B) is n x p. The p x d
    cross product B_mat^H A_mat is formed first, so peak auxiliary memory is
    O(np + nd + pd). The 1/p scale makes the raw rows converge to the
    soft-exact neighbor sums as p grows.

    With ``normalize=True`` (default) rows are rescaled to norm sqrt(d);
    pass False to keep the raw averaged sums for oracle comparisons.

    Everything runs on the real cosine/sine planes: the complex products
    expand into eight real matrix multiplications, which keeps memory flat
    and lets BLAS do all the work.
    """
    pts = _cloud_coords(points)
    p = basis_b.dim
    cA, sA = _phase_planes(pts, basis_a)
    _check_unit_modulus(cA, sA)
    cB, sB = _phase_planes(pts, basis_b)

    # B_mat^H A_mat = (cB - i sB)^T (cA + i sA), a small p x d matrix.
    cross_re = cB.T @ cA + sB.T @ sA
    cross_im = cB.T @ sA - sB.T @ cA
    # B_mat (B_mat^H A_mat), back up to n x d.
    g_re = cB @ cross_re - sB @ cross_im
    g_im = cB @ cross_im + sB @ cross_re
    del cB, sB, cross_re, cross_im

    out = np.empty(cA.shape, dtype=np.complex128)
    out.real = g_re * cA + g_im * sA  # multiply by conj(A_mat) == divide by A_mat
    out.imag = g_im * cA - g_re * sA
    del g_re, g_im, cA, sA
    out *= 1.0 / p

    m = EncodingMatrix(out, normalized=False, alpha=basis_a.bandwidth,
                       neighborhood=AdjacencySpec.soft(basis_b.bandwidth))
    return normalize_rows(m) if normalize else m


def encode_multi_beta(points: ArrayLike, basis_a: FeatureBasis,
                      bases_b: "list[FeatureBasis]", normalize: bool = True) -> EncodingMatrix:
    """Concatenate factorized encodings for several soft bandwidths.

    Each beta yields an independent n x d block; blocks are joined along the
    feature axis, so the result is n x (k d) for k bandwidths. When
    normalized, each block has norm sqrt(d) and the whole row therefore has
    norm sqrt(k d), matching the normalized invariant at the wider dim. The
    recorded neighborhood keeps the first beta (the finest-grained scale is
    by convention listed first).
    """
    if not bases_b:
        raise ParameterError("bases_b must contain at least one basis")
    blocks = [encode_dense_factorized(points, basis_a, bb, normalize=normalize).rows
              for bb in bases_b]
    rows = blocks[0] if len(blocks) == 1 else np.hstack(blocks)
    return EncodingMatrix(rows, normalized=normalize, alpha=basis_a.bandwidth,
                          neighborhood=AdjacencySpec.soft(bases_b[0].bandwidth))


def normalize_rows(m: EncodingMatrix) -> EncodingMatrix:
    """Rescale every row to Euclidean norm sqrt(d). Idempotent.

    Raises DegenerateEncodingError naming the first zero row, since a zero
    vector has no direction to keep.
    """
    rows = m.rows
    norms = np.sqrt(np.einsum("ij,ij->i", rows.real, rows.real)
                    + np.einsum("ij,ij->i", rows.imag, rows.imag))
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise DegenerateEncodingError(f"row {int(zero[0])} has zero norm")
    scaled = rows * (np.sqrt(m.dim) / norms)[:, None]
    return EncodingMatrix(scaled, normalized=True, alpha=m.alpha, neighborhood=m.neighborhood)
