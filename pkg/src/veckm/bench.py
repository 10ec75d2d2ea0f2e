"""Scaling benchmarks and parameter sweeps.

Timing wraps the same pure encoder functions the library exposes, so
benchmarking never changes numerical results. Only scaling exponents are
meaningful across machines; absolute milliseconds are not asserted
anywhere.
"""

from __future__ import annotations

import gc
import time
import tracemalloc
from dataclasses import dataclass

import numpy as np
from threadpoolctl import threadpool_limits

from .encoder import (encode_dense_factorized, encode_dense_sharp,
                      encode_dense_soft_exact, normalize_rows)
from .errors import ParameterError
from .features import basis_for_role, canonical_seed, embed, role_seed
from .kernel import radius_for_beta
from .mixture import (KernelMixture, encoding_similarity, mixture_eval,
                      reconstruct, reconstruction_grid)
from .shapes import PointCloud, corrupt, gen_shape

SHARP_SIZE_CAP = 20000
BENCH_CSV_HEADER = "n,path,threads,median_ms,mem_estimate_bytes"
SWEEP_CSV_HEADER = "alpha,beta,d,p,seed,recon_corr,fact_err,noise_self_sim,cross_loc_sim"

# Bandwidths used for timing runs. Runtime does not depend on their values,
# only on (n, d, p), so fixed choices keep the harness simple.
_BENCH_ALPHA = 30.0
_BENCH_BETA = 6.0

_COMPLEX_BYTES = 16


@dataclass
class BenchRecord:
    """One timed configuration. median_ms is None when the path was skipped."""

    n: int
    path: str
    threads: int
    median_ms: float | None
    mem_estimate_bytes: int


@dataclass
class SweepRecord:
    """Quality metrics for one (alpha, beta, d, p, seed) grid cell."""

    alpha: float
    beta: float
    d: int
    p: int
    seed: int
    recon_corr: float
    fact_err: float
    noise_self_sim: float
    cross_loc_sim: float


def factorized_mem_estimate(n: int, d: int, p: int) -> int:
    """Analytic peak estimate for the factorized path: (np + nd + pd) complex entries."""
    return (n * p + n * d + p * d) * _COMPLEX_BYTES


def sharp_mem_estimate(n: int, d: int) -> int:
    """Analytic peak estimate for the sharp path: (n^2 + nd) complex entries."""
    return (n * n + n * d) * _COMPLEX_BYTES


def uniform_ball(n: int, seed: int, radius: float = 1.0) -> np.ndarray:
    """n points uniform in a ball: random directions scaled by u^(1/3)."""
    rng = np.random.default_rng(np.random.SeedSequence(canonical_seed(seed)))
    dirs = rng.normal(size=(n, 3))
    dirs /= np.maximum(np.linalg.norm(dirs, axis=1), 1e-300)[:, None]
    return dirs * (radius * np.cbrt(rng.uniform(size=n)))[:, None]


def fit_log_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(n)."""
    ns = np.asarray(sizes, dtype=np.float64)
    ts = np.asarray(times, dtype=np.float64)
    if ns.shape != ts.shape or ns.size < 2:
        raise ParameterError("need matching size/time sequences of length >= 2")
    return float(np.polyfit(np.log(ns), np.log(ts), 1)[0])


def _median_ms(fn, reps: int) -> float:
    samples = []
    for _ in range(reps):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return float(np.median(samples) * 1000.0)


def bench_scaling(sizes, d: int, p: int, reps: int = 3, *, seed: int = 0,
                  threads: int = 1, sharp_cap: int = SHARP_SIZE_CAP) -> list[BenchRecord]:
    """Time the factorized and sharp paths over uniform-ball clouds.

    Sizes must be strictly ascending and reps at least 3 (medians need
    something to chew on). The sharp path is skipped above ``sharp_cap``
    points to keep its quadratic memory in check; skipped rows carry
    ``median_ms=None``. The thread cap is applied around the timed calls
    and recorded per row.
    """
    sizes = [int(s) for s in sizes]
    if not sizes or any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParameterError("sizes must be a non-empty strictly ascending list")
    if sizes[0] < 1:
        raise ParameterError("sizes must be positive")
    if reps < 3:
        raise ParameterError(f"reps must be >= 3, got {reps}")
    if threads < 1:
        raise ParameterError(f"threads must be >= 1, got {threads}")

    basis_a = basis_for_role(d, _BENCH_ALPHA, seed, "A")
    basis_b = basis_for_role(p, _BENCH_BETA, seed, "B")
    radius = radius_for_beta(_BENCH_BETA)
    records: list[BenchRecord] = []
    with threadpool_limits(limits=threads):
        for i, n in enumerate(sizes):
            cloud = uniform_ball(n, role_seed(seed, f"bench{i}"))
            ms = _median_ms(lambda: encode_dense_factorized(cloud, basis_a, basis_b), reps)
            records.append(BenchRecord(n, "factorized", threads, ms,
                                       factorized_mem_estimate(n, d, p)))
            if n <= sharp_cap:
                ms = _median_ms(lambda: encode_dense_sharp(cloud, radius, basis_a), reps)
                records.append(BenchRecord(n, "sharp", threads, ms, sharp_mem_estimate(n, d)))
            else:
                records.append(BenchRecord(n, "sharp", threads, None, sharp_mem_estimate(n, d)))
            del cloud
            gc.collect()
    return records


def factorized_peak_memory(n: int, d: int, p: int, seed: int = 0) -> dict:
    """Measure traced peak memory of one factorized encode against the estimate.

    Inputs are built before tracing starts, so the figure covers only the
    encoder's own allocations (planes, cross products, output). Returns
    ``peak_bytes``, ``analytic_bytes``, and their ratio.
    """
    cloud = uniform_ball(n, seed)
    basis_a = basis_for_role(d, _BENCH_ALPHA, seed, "A")
    basis_b = basis_for_role(p, _BENCH_BETA, seed, "B")
    gc.collect()
    tracemalloc.start()
    tracemalloc.reset_peak()
    encode_dense_factorized(cloud, basis_a, basis_b)
    _, peak = tracemalloc.get_traced_memory()
    tracemalloc.stop()
    analytic = factorized_mem_estimate(n, d, p)
    return {"peak_bytes": int(peak), "analytic_bytes": analytic,
            "ratio": peak / analytic}


def write_bench_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(BENCH_CSV_HEADER + "\n")
        for r in records:
            ms = "skipped" if r.median_ms is None else f"{r.median_ms:.3f}"
            fh.write(f"{r.n},{r.path},{r.threads},{ms},{r.mem_estimate_bytes}\n")


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.corrcoef(a, b)[0, 1])


def _mean_row_cosine(rows_a: np.ndarray, rows_b: np.ndarray) -> float:
    dots = np.einsum("ij,ij->i", rows_a.real, rows_b.real)
    dots += np.einsum("ij,ij->i", rows_a.imag, rows_b.imag)
    na = np.sqrt(np.einsum("ij,ij->i", rows_a.real, rows_a.real)
                 + np.einsum("ij,ij->i", rows_a.imag, rows_a.imag))
    nb = np.sqrt(np.einsum("ij,ij->i", rows_b.real, rows_b.real)
                 + np.einsum("ij,ij->i", rows_b.imag, rows_b.imag))
    return float(np.mean(dots / (na * nb)))


def _local_patch(n: int, seed: int, radius: float = 0.2) -> np.ndarray:
    """A disc patch of the given radius in local coordinates."""
    return gen_shape("plane_patch", n, seed).coords * radius


def _cross_location_similarity(beta: float, basis_a, seed: int) -> float:
    """Mean pairwise encoding similarity of four distinct neighborhoods on a torus."""
    surface = gen_shape("torus", 2000, role_seed(seed, "sweep-surface"))
    rng = np.random.default_rng(np.random.SeedSequence(
        [canonical_seed(seed), *b"sweep-centers"]))
    centers = rng.choice(surface.n, size=4, replace=False)
    radius = radius_for_beta(beta)
    encodings = []
    for idx in centers:
        diffs = surface.coords - surface.coords[idx]
        local = diffs[np.einsum("ij,ij->i", diffs, diffs) < radius * radius]
        encodings.append(embed(local, basis_a).mean(axis=0))
    sims = [encoding_similarity(encodings[i], encodings[j])
            for i in range(4) for j in range(i + 1, 4)]
    return float(np.mean(sims))


def sweep_params(alphas, betas, ds, ps, seeds=(0,)) -> list[SweepRecord]:
    """Quality metrics over the full (alpha, beta, d, p, seed) grid.

    For each cell, on a fixed 100-point disc patch (radius 0.2, redrawn per
    seed): the Pearson correlation between reconstruction and the exact
    mixture on a padded 32^3 grid; the factorized-vs-exact error (one minus
    the mean per-row cosine against the normalized soft-exact oracle); the
    encoding self-similarity under sigma=0.01 jitter; and the mean pairwise
    encoding similarity across four distinct torus neighborhoods.
    """
    alphas, betas = [float(a) for a in alphas], [float(b) for b in betas]
    ds, ps = [int(d) for d in ds], [int(p) for p in ps]
    seeds = [int(s) for s in seeds]
    if not (alphas and betas and ds and ps and seeds):
        raise ParameterError("all sweep grids must be non-empty")

    records: list[SweepRecord] = []
    for seed in seeds:
        patch = _local_patch(100, role_seed(seed, "sweep-patch"))
        noisy = corrupt(PointCloud(patch), "perturb",
                        role_seed(seed, "sweep-noise"), sigma=0.01)
        for alpha in alphas:
            mix = KernelMixture(patch, alpha)
            grid = reconstruction_grid(patch, alpha, nodes=32)
            truth = mixture_eval(mix, grid)
            for d in ds:
                basis_a = basis_for_role(d, alpha, seed, "A")
                g_clean = embed(patch, basis_a).mean(axis=0)
                g_noisy = embed(noisy, basis_a).mean(axis=0)
                recon_corr = _pearson(reconstruct(g_clean, basis_a, grid), truth)
                noise_self = encoding_similarity(g_clean, g_noisy)
                for beta in betas:
                    exact = normalize_rows(encode_dense_soft_exact(patch, beta, basis_a))
                    cross = _cross_location_similarity(beta, basis_a, seed)
                    for p in ps:
                        basis_b = basis_for_role(p, beta, seed, "B")
                        fact = encode_dense_factorized(patch, basis_a, basis_b)
                        fact_err = 1.0 - _mean_row_cosine(fact.rows, exact.rows)
                        records.append(SweepRecord(alpha, beta, d, p, seed,
                                                   recon_corr, fact_err,
                                                   noise_self, cross))
    return records


def write_sweep_csv(records, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SWEEP_CSV_HEADER + "\n")
        for r in records:
            fh.write(f"{r.alpha:.17g},{r.beta:.17g},{r.d},{r.p},{r.seed},"
                     f"{r.recon_corr:.17g},{r.fact_err:.17g},"
                     f"{r.noise_self_sim:.17g},{r.cross_loc_sim:.17g}\n")
