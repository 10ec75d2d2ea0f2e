"""Kernel-mixture oracle: density evaluation, reconstruction, and similarities.

A neighborhood of points x_1..x_n induces the Gaussian mixture
f(x) = (1/n) sum_k exp(-alpha^2 ||x - x_k||^2 / 2). The local encoding is a
compressed carrier of exactly this function: inner products against single
point embeddings reconstruct f, and inner products between two encodings
converge to the double-sum overlap of their mixtures. Everything here
evaluates those closed forms directly, making this module the oracle the
encoder paths are judged against.

All inner products carry a 1/dim factor; without it the quantities grow
linearly in dim instead of converging.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ContractError, ParameterError, ValidationError
from .features import FeatureBasis

_CHUNK_ROWS = 8192


@dataclass(frozen=True)
class KernelMixture:
    """A Gaussian mixture over n sample points at bandwidth alpha.

    Samples are stored in local (neighborhood-centered) coordinates; the
    array is frozen after construction.
    """

    samples: NDArray[np.float64]
    alpha: float

    def __post_init__(self) -> None:
        pts = np.asarray(self.samples, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValidationError(f"samples must have shape (n, 3), got {pts.shape}")
        if pts.shape[0] < 1:
            raise ValidationError("samples are empty")
        if not np.isfinite(pts).all():
            raise ValidationError("samples contain non-finite coordinates")
        a = float(self.alpha)
        if not np.isfinite(a) or a <= 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha!r}")
        if pts.flags.writeable:
            pts = pts.copy()
            pts.flags.writeable = False
        object.__setattr__(self, "samples", pts)
        object.__setattr__(self, "alpha", a)

    @property
    def n(self) -> int:
        return self.samples.shape[0]


def _query_array(x: ArrayLike):
    q = np.asarray(x, dtype=np.float64)
    single = q.ndim == 1
    if single:
        q = q[None, :]
    if q.ndim != 2 or q.shape[1] != 3:
        raise ValidationError(f"query points must have shape (q, 3) or (3,), got {np.shape(x)}")
    if not np.isfinite(q).all():
        raise ValidationError("query points contain non-finite coordinates")
    return q, single


def _cross_sq_dists(a: NDArray[np.float64], b: NDArray[np.float64]) -> NDArray[np.float64]:
    d2 = np.einsum("ij,ij->i", a, a)[:, None] + np.einsum("ij,ij->i", b, b)[None, :]
    d2 -= 2.0 * (a @ b.T)
    np.maximum(d2, 0.0, out=d2)
    return d2


def mixture_eval(m: KernelMixture, x: ArrayLike):
    """Evaluate the mixture at one point or a batch of points.

    Returns a float in (0, 1] for a single 3-vector, or an array of such
    values for an (q, 3) batch. This is the exact closed form, no
    approximation.
    """
    q, single = _query_array(x)
    d2 = _cross_sq_dists(q, m.samples)
    d2 *= -0.5 * m.alpha * m.alpha
    np.exp(d2, out=d2)
    vals = d2.mean(axis=1)
    return float(vals[0]) if single else vals


def reconstruct(g: ArrayLike, basis_a: FeatureBasis, query_points: ArrayLike) -> NDArray[np.float64]:
    """Recover mixture values from a raw (1/n-averaged) encoding.

    Returns Re[(1/dim) <exp(i x A), g>] for each query x, which converges to
    ``mixture_eval`` of the neighborhood's mixture as dim grows. Queries are
    in the same local coordinates the encoding was built in. Feeding a
    normalized encoding still gives the right shape of values, just rescaled
    by the row's normalization constant.

    Raises ContractError when the encoding length does not match the basis.
    """
    vec = np.asarray(g, dtype=np.complex128)
    if vec.ndim != 1:
        raise ValidationError(f"g must be a 1-d complex vector, got shape {vec.shape}")
    if vec.shape[0] != basis_a.dim:
        raise ContractError(
            f"encoding has {vec.shape[0]} entries but the basis has dim {basis_a.dim}")
    q, single = _query_array(query_points)
    gr = np.ascontiguousarray(vec.real)
    gi = np.ascontiguousarray(vec.imag)
    out = np.empty(q.shape[0], dtype=np.float64)
    for start in range(0, q.shape[0], _CHUNK_ROWS):
        block = q[start:start + _CHUNK_ROWS]
        phase = block @ basis_a.matrix
        out[start:start + block.shape[0]] = np.cos(phase) @ gr
        out[start:start + block.shape[0]] += np.sin(phase) @ gi
    out /= basis_a.dim
    return out


def reconstruction_grid(points: ArrayLike, alpha: float, nodes: int = 32,
                        pad: float | None = None) -> NDArray[np.float64]:
    """Uniform nodes^3 grid over the points' bounding box, padded by 2/alpha.

    The default padding resolves the kernel width at the given alpha; pass
    ``pad`` to override it.
    """
    pts = np.asarray(getattr(points, "coords", points), dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 1:
        raise ValidationError(f"points must have shape (n, 3), got {pts.shape}")
    if not (np.isfinite(alpha) and alpha > 0):
        raise ParameterError(f"alpha must be positive, got {alpha!r}")
    if nodes < 2:
        raise ParameterError(f"nodes must be at least 2, got {nodes}")
    margin = 2.0 / float(alpha) if pad is None else float(pad)
    lo = pts.min(axis=0) - margin
    hi = pts.max(axis=0) + margin
    axes = [np.linspace(lo[i], hi[i], nodes) for i in range(3)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    return grid.reshape(-1, 3)


def mixture_similarity(m1: KernelMixture, m2: KernelMixture) -> float:
    """Overlap of two mixtures: (1/(mn)) sum over all cross pairs of the kernel.

    Symmetric, bounded in (0, 1], and equal to 1 only for two single-point
    mixtures at the same location. Both mixtures must share one alpha.
    """
    if m1.alpha != m2.alpha:
        raise ContractError(f"mixtures have different alphas: {m1.alpha} vs {m2.alpha}")
    d2 = _cross_sq_dists(m1.samples, m2.samples)
    d2 *= -0.5 * m1.alpha * m1.alpha
    np.exp(d2, out=d2)
    return float(d2.mean())


def encoding_similarity(g1: ArrayLike, g2: ArrayLike) -> float:
    """Re[(1/dim) <g1, g2>] between two encodings over the same basis.

    On raw (1/n-averaged) encodings this converges to
    ``mixture_similarity`` of the underlying neighborhoods. For g1 == g2 it
    equals (1/dim) ||g||^2 exactly.
    """
    a = np.asarray(g1, dtype=np.complex128)
    b = np.asarray(g2, dtype=np.complex128)
    if a.ndim != 1 or b.ndim != 1:
        raise ValidationError("encodings must be 1-d complex vectors")
    if a.shape[0] != b.shape[0]:
        raise ContractError(f"encoding dims differ: {a.shape[0]} vs {b.shape[0]}")
    return float((a.real @ b.real + a.imag @ b.imag) / a.shape[0])
