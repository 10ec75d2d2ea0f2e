"""Benchmark harness: memory estimates, scaling records, sweep metrics."""

import numpy as np
import pytest

from veckm import (ParameterError, bench_scaling, encode_dense_factorized,
                   factorized_mem_estimate, factorized_peak_memory, fit_log_slope,
                   basis_for_role, sharp_mem_estimate, sweep_params, uniform_ball,
                   write_bench_csv, write_sweep_csv)
from veckm.bench import BENCH_CSV_HEADER, SWEEP_CSV_HEADER


class TestMemEstimates:
    def test_formulas(self):
        assert factorized_mem_estimate(10, 4, 8) == (10 * 8 + 10 * 4 + 8 * 4) * 16
        assert sharp_mem_estimate(10, 4) == (100 + 40) * 16

    def test_factorized_stays_linear_at_scale(self):
        # At n=100k the factorized budget is ~7 GB below even a single
        # n x n float64 buffer, which is the whole point of the method.
        n, d, p = 100_000, 256, 4096
        assert factorized_mem_estimate(n, d, p) == (n * p + n * d + p * d) * 16
        assert factorized_mem_estimate(n, d, p) < n * n * 8


class TestUniformBall:
    def test_contained_and_deterministic(self):
        pts = uniform_ball(500, 3, radius=0.7)
        assert pts.shape == (500, 3)
        assert np.max(np.linalg.norm(pts, axis=1)) <= 0.7
        assert np.array_equal(pts, uniform_ball(500, 3, radius=0.7))
        assert not np.array_equal(pts, uniform_ball(500, 4, radius=0.7))

    def test_fills_the_ball(self):
        pts = uniform_ball(4000, 5)
        r = np.linalg.norm(pts, axis=1)
        # Volume-uniform sampling puts half the points beyond r = 2^(-1/3).
        assert abs(np.mean(r > 0.5 ** (1 / 3)) - 0.5) < 0.05


class TestFitLogSlope:
    def test_exact_powers(self):
        ns = np.array([100, 200, 400, 800])
        assert fit_log_slope(ns, 3.0 * ns.astype(float) ** 2) == pytest.approx(2.0, abs=1e-12)
        assert fit_log_slope(ns, 0.5 * ns.astype(float)) == pytest.approx(1.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ParameterError):
            fit_log_slope([1.0], [2.0])
        with pytest.raises(ParameterError):
            fit_log_slope([1.0, 2.0], [1.0, 2.0, 3.0])


class TestBenchScaling:
    def test_records_and_skip_marking(self):
        recs = bench_scaling([50, 80, 100], d=16, p=32, reps=3, seed=1, sharp_cap=80)
        assert len(recs) == 6
        assert [r.path for r in recs] == ["factorized", "sharp"] * 3
        assert [r.n for r in recs] == [50, 50, 80, 80, 100, 100]
        for r in recs:
            assert r.threads == 1
            assert r.mem_estimate_bytes > 0
        skipped = [r for r in recs if r.median_ms is None]
        assert [(r.n, r.path) for r in skipped] == [(100, "sharp")]
        assert all(r.median_ms > 0 for r in recs if r.median_ms is not None)

    def test_validation(self):
        with pytest.raises(ParameterError):
            bench_scaling([], d=4, p=8)
        with pytest.raises(ParameterError):
            bench_scaling([100, 100], d=4, p=8)
        with pytest.raises(ParameterError):
            bench_scaling([200, 100], d=4, p=8)
        with pytest.raises(ParameterError):
            bench_scaling([10, 20], d=4, p=8, reps=2)
        with pytest.raises(ParameterError):
            bench_scaling([10, 20], d=4, p=8, threads=0)

    def test_timing_does_not_perturb_results(self):
        # Encodings computed before and after a bench run stay bit-identical;
        # the harness shares the pure encoder and owns no mutable state.
        cloud = uniform_ball(60, 9)
        ba = basis_for_role(16, 30.0, 9, "A")
        bb = basis_for_role(32, 6.0, 9, "B")
        before = encode_dense_factorized(cloud, ba, bb).rows.tobytes()
        bench_scaling([20, 40], d=16, p=32, reps=3, seed=9)
        after = encode_dense_factorized(cloud, ba, bb).rows.tobytes()
        assert before == after

    def test_csv_shape(self, tmp_path):
        recs = bench_scaling([50, 80, 100], d=16, p=32, reps=3, seed=1, sharp_cap=80)
        p = tmp_path / "bench.csv"
        write_bench_csv(recs, p)
        lines = p.read_text().splitlines()
        assert lines[0] == BENCH_CSV_HEADER == "n,path,threads,median_ms,mem_estimate_bytes"
        assert len(lines) == 7
        assert lines[6].split(",")[3] == "skipped"
        cells = lines[1].split(",")
        assert cells[0] == "50" and cells[1] == "factorized"
        float(cells[3])  # parses as a number


class TestPeakMemory:
    def test_reports_sane_ratio(self):
        stats = factorized_peak_memory(2048, 32, 64, seed=0)
        assert stats["analytic_bytes"] == factorized_mem_estimate(2048, 32, 64)
        assert 0.1 < stats["ratio"] < 4.0
        assert stats["peak_bytes"] > 0


class TestSweep:
    def test_grid_and_ranges(self):
        recs = sweep_params([30.0], [6.0], [64], [256], seeds=[0, 1])
        assert len(recs) == 2
        for r, seed in zip(recs, (0, 1)):
            assert (r.alpha, r.beta, r.d, r.p, r.seed) == (30.0, 6.0, 64, 256, seed)
            assert -1.0 <= r.recon_corr <= 1.0
            assert 0.0 <= r.fact_err <= 2.0
            assert 0.0 < r.noise_self_sim < 1.5
            assert -1.0 <= r.cross_loc_sim <= 1.5

    def test_deterministic(self):
        a = sweep_params([30.0], [6.0], [32], [64], seeds=[5])
        b = sweep_params([30.0], [6.0], [32], [64], seeds=[5])
        assert a == b

    def test_empty_grid(self):
        with pytest.raises(ParameterError):
            sweep_params([], [6.0], [64], [256])
        with pytest.raises(ParameterError):
            sweep_params([30.0], [6.0], [64], [256], seeds=[])

    def test_csv_shape(self, tmp_path):
        recs = sweep_params([30.0], [6.0], [32], [64], seeds=[0])
        p = tmp_path / "sweep.csv"
        write_sweep_csv(recs, p)
        lines = p.read_text().splitlines()
        assert lines[0] == SWEEP_CSV_HEADER
        assert lines[0] == "alpha,beta,d,p,seed,recon_corr,fact_err,noise_self_sim,cross_loc_sim"
        assert len(lines) == 2
        cells = lines[1].split(",")
        assert len(cells) == 9
        assert float(cells[0]) == 30.0 and int(cells[2]) == 32
