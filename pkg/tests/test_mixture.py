"""Mixture evaluation, reconstruction from encodings, and similarity scores."""

import numpy as np
import pytest

from veckm import (ContractError, KernelMixture, ParameterError, ValidationError,
                   encode_pointwise, encoding_similarity, make_basis, mixture_eval,
                   mixture_similarity, reconstruct, reconstruction_grid)

from conftest import ball_cloud

ALPHA = 30.0


def _loop_mixture_similarity(a: KernelMixture, b: KernelMixture) -> float:
    total = 0.0
    for x in a.samples:
        for y in b.samples:
            d2 = float(np.sum((x - y) ** 2))
            total += np.exp(-0.5 * a.alpha * a.alpha * d2)
    return total / (len(a.samples) * len(b.samples))


class TestKernelMixture:
    def test_samples_frozen(self):
        mix = KernelMixture(ball_cloud(10, 0), 2.0)
        with pytest.raises(ValueError):
            mix.samples[0, 0] = 5.0

    def test_validation(self):
        with pytest.raises(ValidationError):
            KernelMixture(np.ones((0, 3)), 2.0)
        with pytest.raises(ValidationError):
            KernelMixture(np.ones((4, 2)), 2.0)
        with pytest.raises(ParameterError):
            KernelMixture(ball_cloud(4, 0), 0.0)


class TestMixtureEval:
    def test_exact_one_at_single_sample(self):
        mix = KernelMixture(np.zeros((1, 3)), 3.0)
        assert mixture_eval(mix, np.zeros(3)) == 1.0

    def test_midpoint_value(self):
        mix = KernelMixture(np.array([[0.0, 0.0, 0.0]]), 2.0)
        got = mixture_eval(mix, np.array([0.5, 0.0, 0.0]))
        assert got == pytest.approx(np.exp(-0.5), rel=1e-12)

    def test_far_query_vanishes(self):
        mix = KernelMixture(ball_cloud(20, 1, radius=0.1), 30.0)
        assert mixture_eval(mix, np.array([5.0, 0.0, 0.0])) < 1e-6

    def test_batch_matches_singles(self):
        mix = KernelMixture(ball_cloud(20, 2, radius=0.3), 10.0)
        queries = ball_cloud(7, 3, radius=0.5)
        batch = mixture_eval(mix, queries)
        singles = np.array([mixture_eval(mix, q) for q in queries])
        assert np.allclose(batch, singles, rtol=1e-12)


class TestReconstruct:
    def test_origin_spike(self):
        # A single sample at the origin encodes to a row of ones; reading it
        # back at the origin averages cos(0) over all frequencies: exactly 1.
        b = make_basis(256, 5.0, 0)
        g = np.ones(256, dtype=np.complex128)
        assert reconstruct(g, b, np.zeros((1, 3)))[0] == 1.0

    def test_far_query_small(self):
        b = make_basis(2048, 30.0, 1)
        pts = np.array([[0.05, 0.0, 0.0], [0.0, 0.05, 0.0], [0.0, 0.0, 0.05]])
        g = encode_pointwise(np.vstack([np.zeros(3), pts]), 0, 1.0, b)
        val = reconstruct(g, b, np.array([[3.0, 0.0, 0.0]]))
        assert abs(val[0]) < 0.05

    def test_dim_mismatch(self):
        b = make_basis(64, 5.0, 0)
        with pytest.raises(ContractError):
            reconstruct(np.ones(32, dtype=np.complex128), b, np.zeros((1, 3)))

    def test_matrix_rows_rejected(self):
        b = make_basis(64, 5.0, 0)
        with pytest.raises(ValidationError):
            reconstruct(np.ones((2, 64), dtype=np.complex128), b, np.zeros((1, 3)))


class TestReconstructionConvergence:
    def test_error_shrinks_with_dim(self):
        # Median (over seeds) of the max grid error must not grow as the
        # feature count rises.  Uses a 16^3 grid to keep the loop fast; the
        # helper's own default stays at 32 nodes.
        dims = (512, 2048, 8192)
        per_dim = {d: [] for d in dims}
        for seed in range(30):
            pts = ball_cloud(40, 1000 + seed, radius=0.15)
            centered = pts - pts[0]  # the pointwise encoding is center-relative
            mix = KernelMixture(centered, ALPHA)
            grid = reconstruction_grid(centered, ALPHA, nodes=16)
            truth = mixture_eval(mix, grid)
            for d in dims:
                b = make_basis(d, ALPHA, 77000 + seed)
                g = encode_pointwise(pts, 0, 10.0, b)
                approx = reconstruct(g, b, grid)
                per_dim[d].append(float(np.max(np.abs(approx - truth))))
        medians = [float(np.median(per_dim[d])) for d in dims]
        assert medians[0] >= medians[1] >= medians[2]


class TestSimilarityGap:
    def test_encoding_tracks_mixture(self):
        # |encoding similarity - mixture similarity| shrinks as d grows.
        dims = (512, 2048, 8192)
        per_dim = {d: [] for d in dims}
        for seed in range(30):
            xs = ball_cloud(25, 2000 + seed, radius=0.2)
            ys = ball_cloud(25, 3000 + seed, radius=0.2)
            want = mixture_similarity(KernelMixture(xs, ALPHA), KernelMixture(ys, ALPHA))
            for d in dims:
                # Encode each cloud about a common origin (mean feature) so
                # the score estimates the mixture overlap of the raw points.
                b = make_basis(d, ALPHA, 88000 + seed)
                gx = np.mean(np.exp(1j * (xs @ b.matrix)), axis=0)
                gy = np.mean(np.exp(1j * (ys @ b.matrix)), axis=0)
                got = encoding_similarity(gx, gy)
                per_dim[d].append(abs(got - want))
        medians = [float(np.median(per_dim[d])) for d in dims]
        assert medians[0] >= medians[1] >= medians[2]
        assert medians[-1] < 0.05


class TestMixtureSimilarity:
    def test_alpha_mismatch(self):
        a = KernelMixture(ball_cloud(5, 0), 2.0)
        b = KernelMixture(ball_cloud(5, 1), 3.0)
        with pytest.raises(ContractError):
            mixture_similarity(a, b)

    def test_single_point_pairs(self):
        a = KernelMixture(np.zeros((1, 3)), 2.0)
        b = KernelMixture(np.array([[0.5, 0.0, 0.0]]), 2.0)
        assert mixture_similarity(a, a) == 1.0
        assert mixture_similarity(a, b) == pytest.approx(np.exp(-0.5), rel=1e-12)

    def test_symmetric_and_bounded(self):
        a = KernelMixture(ball_cloud(15, 4, radius=0.3), 5.0)
        b = KernelMixture(ball_cloud(10, 5, radius=0.3), 5.0)
        ab = mixture_similarity(a, b)
        assert ab == pytest.approx(mixture_similarity(b, a), rel=1e-12)
        assert 0.0 < ab <= 1.0

    def test_matches_double_loop(self):
        a = KernelMixture(ball_cloud(12, 6, radius=0.4), 4.0)
        b = KernelMixture(ball_cloud(9, 7, radius=0.4), 4.0)
        assert mixture_similarity(a, b) == pytest.approx(_loop_mixture_similarity(a, b),
                                                         rel=1e-12)

    def test_translation_lowers_similarity(self):
        pts = ball_cloud(20, 8, radius=0.2)
        a = KernelMixture(pts, ALPHA)
        moved = KernelMixture(pts + np.array([3.0 / ALPHA, 0.0, 0.0]), ALPHA)
        assert mixture_similarity(a, a) > mixture_similarity(a, moved)


class TestEncodingSimilarity:
    def test_self_similarity_is_mean_square_modulus(self):
        b = make_basis(128, ALPHA, 9)
        pts = ball_cloud(30, 10, radius=0.3)
        g = encode_pointwise(pts, 0, 10.0, b)
        want = float(np.vdot(g, g).real) / 128.0
        assert encoding_similarity(g, g) == pytest.approx(want, rel=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ContractError):
            encoding_similarity(np.ones(4, dtype=np.complex128),
                                np.ones(8, dtype=np.complex128))

    def test_noise_ordering(self):
        # Same patch under growing jitter: similarity to the clean encoding
        # should fall monotonically for a handful of seeds.
        b = make_basis(1024, ALPHA, 11)
        for seed in (21, 22, 23):
            pts = ball_cloud(200, seed, radius=0.2)
            clean = np.mean(np.exp(1j * (pts @ b.matrix)), axis=0)
            sims = []
            rng = np.random.default_rng(seed + 500)
            for sigma in (0.005, 0.02):
                noisy = pts + rng.normal(0.0, sigma, pts.shape)
                sims.append(encoding_similarity(
                    clean, np.mean(np.exp(1j * (noisy @ b.matrix)), axis=0)))
            assert sims[0] > sims[1]


class TestReconstructionGrid:
    def test_covers_cloud_with_margin(self):
        pts = ball_cloud(50, 12, radius=0.3)
        grid = reconstruction_grid(pts, ALPHA, nodes=8)
        assert grid.shape == (512, 3)
        pad = 2.0 / ALPHA
        for axis in range(3):
            assert grid[:, axis].min() == pytest.approx(pts[:, axis].min() - pad)
            assert grid[:, axis].max() == pytest.approx(pts[:, axis].max() + pad)

    def test_custom_pad(self):
        pts = np.zeros((1, 3))
        grid = reconstruction_grid(pts, 1.0, nodes=2, pad=1.0)
        corners = {tuple(row) for row in grid}
        assert (-1.0, -1.0, -1.0) in corners and (1.0, 1.0, 1.0) in corners

    def test_bad_nodes(self):
        with pytest.raises(ParameterError):
            reconstruction_grid(np.zeros((1, 3)), 1.0, nodes=1)
