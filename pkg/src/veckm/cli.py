"""Command-line surface: generate, corrupt, encode, inspect, and benchmark.

All randomness flows from explicit ``--seed`` flags. The A and B bases are
derived from (seed, role) tags, so ``encode`` and ``reconstruct`` can
regenerate identical bases from the seed alone without shipping matrices.
Thread count comes from ``--threads``, then the ``VECKM_THREADS`` env var,
then defaults to 1; in that sequential mode identical command lines produce
byte-identical files (benchmark timing columns excepted, being wall-clock
measurements).

Exit codes: 0 success, 2 usage error, 1 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np
from threadpoolctl import threadpool_limits

from . import bench as bench_mod
from . import pcio
from .encoder import (encode_dense_factorized, encode_dense_sharp,
                      encode_dense_soft_exact, encode_multi_beta, normalize_rows)
from .errors import ContractError, VecKMError
from .features import basis_for_role, make_basis, role_seed
from .kernel import (RADIUS_BETA_PRODUCT, gaussian_kernel, kernel_estimate,
                     radius_for_beta)
from .mixture import KernelMixture, encoding_similarity, mixture_similarity, reconstruct
from .shapes import CORRUPTION_MODELS, SHAPE_KINDS, corrupt, gen_shape

_FLOAT_FMT = "%.17g"


def _csv_list(text: str, kind, flag: str):
    try:
        return [kind(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{flag} expects a comma-separated list") from None


def _cmd_gen(args, _parser) -> int:
    cloud = gen_shape(args.kind, args.n, args.seed)
    pcio.write_cloud(cloud, args.out)
    print(f"wrote {args.out} ({cloud.n} points, kind={args.kind})")
    return 0


def _cmd_corrupt(args, parser) -> int:
    if args.model == "perturb" and args.sigma is None:
        parser.error("--model perturb requires --sigma")
    cloud = pcio.read_cloud(args.infile)
    result = corrupt(cloud, args.model, args.seed, sigma=args.sigma,
                     bands=args.bands, axis=args.axis)
    pcio.write_cloud(result, args.out)
    print(f"wrote {args.out} ({result.n} of {cloud.n} points, model={args.model})")
    return 0


def _encode_paths(args, parser: argparse.ArgumentParser):
    """Resolve which encoding path the flag combination selects."""
    chosen = [name for name, on in
              [("--exact", args.exact), ("--soft-exact", args.soft_exact),
               ("--multi-beta", args.multi_beta is not None)] if on]
    if len(chosen) > 1:
        parser.error(f"{' and '.join(chosen)} are mutually exclusive")
    if args.exact:
        if args.radius is None:
            parser.error("--exact requires --radius")
        return "sharp"
    if args.soft_exact:
        if args.beta is None:
            parser.error("--soft-exact requires --beta")
        return "soft"
    if args.multi_beta is not None:
        if args.p is None:
            parser.error("--multi-beta requires --p")
        return "multi"
    if args.beta is None or args.p is None:
        parser.error("factorized encoding requires --beta and --p")
    return "factorized"


def _cmd_encode(args, parser) -> int:
    path = _encode_paths(args, parser)
    cloud = pcio.read_cloud(args.infile)
    basis_a = basis_for_role(args.d, args.alpha, args.seed, "A")
    normalize = not args.no_normalize

    if path == "sharp":
        m = encode_dense_sharp(cloud, args.radius, basis_a)
        if normalize:
            m = normalize_rows(m)
    elif path == "soft":
        m = encode_dense_soft_exact(cloud, args.beta, basis_a)
        if normalize:
            m = normalize_rows(m)
    elif path == "multi":
        bases_b = [basis_for_role(args.p, b, args.seed, f"B{i}")
                   for i, b in enumerate(args.multi_beta)]
        m = encode_multi_beta(cloud, basis_a, bases_b, normalize=normalize)
    else:
        basis_b = basis_for_role(args.p, args.beta, args.seed, "B")
        m = encode_dense_factorized(cloud, basis_a, basis_b, normalize=normalize)

    pcio.write_encoding(m, args.out, precision="f32" if args.f32 else "f64")
    if args.csv_out:
        pcio.write_encoding_csv(m, args.csv_out)
    print(f"wrote {args.out} ({m.n} x {m.dim}, path={path}, normalized={m.normalized})")
    return 0


def _cmd_reconstruct(args, _parser) -> int:
    m = pcio.read_encoding(args.encoding)
    if not 0 <= args.row < m.n:
        raise IndexError(f"--row {args.row} out of range for {m.n} rows")
    alpha = m.alpha if args.alpha is None else args.alpha
    if args.alpha is not None and args.alpha != m.alpha:
        raise ContractError(
            f"--alpha {args.alpha} does not match the encoding's alpha {m.alpha}")
    basis_a = basis_for_role(m.dim, alpha, args.basis_seed, "A")

    if args.extent is not None:
        extent = args.extent
    else:
        nb = m.neighborhood
        reach = nb.value if nb.kind == "sharp" else radius_for_beta(nb.value)
        extent = reach + 2.0 / alpha
    axis = np.linspace(-extent, extent, args.grid)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    density = reconstruct(m.rows[args.row], basis_a, grid)

    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("x,y,z,density\n")
        for q, v in zip(grid, density):
            fh.write(",".join(_FLOAT_FMT % c for c in q) + "," + _FLOAT_FMT % v + "\n")
    print(f"wrote {args.out} ({args.grid}^3 grid, row={args.row}, extent={extent:.6g})")
    return 0


def _neighborhood_mixture(cloud, m, row: int) -> KernelMixture:
    """The mixture an encoding row targets: neighbors of the row's point, centered."""
    nb = m.neighborhood
    radius = nb.value if nb.kind == "sharp" else radius_for_beta(nb.value)
    diffs = cloud.coords - cloud.coords[row]
    local = diffs[np.einsum("ij,ij->i", diffs, diffs) < radius * radius]
    return KernelMixture(local, m.alpha)


def _cmd_similarity(args, parser) -> int:
    enc_a = pcio.read_encoding(args.enc_a)
    enc_b = pcio.read_encoding(args.enc_b)
    if not 0 <= args.row_a < enc_a.n:
        raise IndexError(f"--row-a {args.row_a} out of range for {enc_a.n} rows")
    if not 0 <= args.row_b < enc_b.n:
        raise IndexError(f"--row-b {args.row_b} out of range for {enc_b.n} rows")
    value = encoding_similarity(enc_a.rows[args.row_a], enc_b.rows[args.row_b])
    print(f"encoding_similarity {value:.12g}")
    if args.oracle:
        if not (args.cloud_a and args.cloud_b):
            parser.error("--oracle requires --cloud-a and --cloud-b")
        mix_a = _neighborhood_mixture(pcio.read_cloud(args.cloud_a), enc_a, args.row_a)
        mix_b = _neighborhood_mixture(pcio.read_cloud(args.cloud_b), enc_b, args.row_b)
        print(f"mixture_similarity {mixture_similarity(mix_a, mix_b):.12g}")
    return 0


def _cmd_kernel_check(args, parser) -> int:
    if args.pairs < 1:
        parser.error(f"--pairs must be >= 1, got {args.pairs}")
    basis = make_basis(args.d, args.alpha, args.seed)
    pts = bench_mod.uniform_ball(2 * args.pairs, role_seed(args.seed, "pairs"))
    worst_err = 0.0
    worst_imag = 0.0
    for k in range(args.pairs):
        x, y = pts[2 * k], pts[2 * k + 1]
        est = kernel_estimate(x, y, basis)
        worst_err = max(worst_err, abs(est.value - gaussian_kernel(x, y, args.alpha)))
        worst_imag = max(worst_imag, abs(est.imag))
    print(f"pairs {args.pairs}")
    print(f"max_abs_error {worst_err:.12g}")
    print(f"max_abs_imag {worst_imag:.12g}")
    return 0


def _cmd_bench(args, _parser) -> int:
    records = bench_mod.bench_scaling(args.sizes, args.d, args.p, args.reps,
                                      seed=args.seed, threads=args.threads_resolved,
                                      sharp_cap=args.sharp_cap)
    bench_mod.write_bench_csv(records, args.out)
    print(f"wrote {args.out} ({len(records)} rows)")
    return 0


def _cmd_sweep(args, _parser) -> int:
    records = bench_mod.sweep_params(args.alphas, args.betas, args.ds, args.ps,
                                     seeds=args.seeds)
    bench_mod.write_sweep_csv(records, args.out)
    print(f"wrote {args.out} ({len(records)} rows)")
    return 0


def _cmd_radius(args, _parser) -> int:
    print(f"{radius_for_beta(args.beta, args.product):.3f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=None,
                        help="BLAS thread cap (default: VECKM_THREADS env var, else 1)")

    parser = argparse.ArgumentParser(
        prog="veckm",
        description="Local point-cloud geometry encodings via vectorized kernel mixtures.")
    sub = parser.add_subparsers(dest="command", required=True)

    q = sub.add_parser("gen", parents=[common], help="generate a synthetic shape")
    q.add_argument("--kind", required=True, choices=SHAPE_KINDS)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", required=True)
    q.set_defaults(handler=_cmd_gen)

    q = sub.add_parser("corrupt", parents=[common], help="apply a corruption model")
    q.add_argument("--model", required=True, choices=CORRUPTION_MODELS)
    q.add_argument("--sigma", type=float, default=None, help="jitter std for perturb")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--bands", type=int, default=8)
    q.add_argument("--axis", type=int, default=0, choices=(0, 1, 2))
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(handler=_cmd_corrupt)

    q = sub.add_parser("encode", parents=[common],
                       help="encode a cloud (factorized by default)")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--beta", type=float, default=None)
    q.add_argument("--p", type=int, default=None)
    q.add_argument("--radius", type=float, default=None)
    q.add_argument("--exact", action="store_true",
                   help="quadratic sharp-adjacency path (requires --radius)")
    q.add_argument("--soft-exact", action="store_true",
                   help="quadratic soft-adjacency path (requires --beta)")
    q.add_argument("--multi-beta", type=lambda s: _csv_list(s, float, "--multi-beta"),
                   default=None, metavar="B1,B2,...",
                   help="concatenated factorized encodings, one block per beta")
    q.add_argument("--no-normalize", action="store_true",
                   help="keep raw sums/averages instead of sqrt(d)-norm rows")
    q.add_argument("--f32", action="store_true", help="write 32-bit payload")
    q.add_argument("--csv-out", default=None, help="also export the matrix as CSV")
    q.set_defaults(handler=_cmd_encode)

    q = sub.add_parser("reconstruct", parents=[common],
                       help="evaluate one row's implied density on a grid")
    q.add_argument("--encoding", required=True)
    q.add_argument("--basis-seed", type=int, required=True)
    q.add_argument("--alpha", type=float, default=None,
                   help="must match the encoding header when given")
    q.add_argument("--grid", type=int, default=32, help="nodes per axis")
    q.add_argument("--row", type=int, default=0)
    q.add_argument("--extent", type=float, default=None,
                   help="half-width of the cube (default: reach + 2/alpha)")
    q.add_argument("--out", required=True)
    q.set_defaults(handler=_cmd_reconstruct)

    q = sub.add_parser("similarity", parents=[common],
                       help="inner-product similarity between two encoding rows")
    q.add_argument("--enc-a", required=True)
    q.add_argument("--enc-b", required=True)
    q.add_argument("--row-a", type=int, default=0)
    q.add_argument("--row-b", type=int, default=0)
    q.add_argument("--oracle", action="store_true",
                   help="also print the mixture overlap from the raw clouds")
    q.add_argument("--cloud-a", default=None)
    q.add_argument("--cloud-b", default=None)
    q.set_defaults(handler=_cmd_similarity)

    q = sub.add_parser("kernel-check", parents=[common],
                       help="compare the feature estimate against the closed-form kernel")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--pairs", type=int, default=100)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(handler=_cmd_kernel_check)

    q = sub.add_parser("bench", parents=[common], help="runtime scaling benchmark")
    q.add_argument("--sizes", type=lambda s: _csv_list(s, int, "--sizes"), required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--reps", type=int, default=3)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--sharp-cap", type=int, default=bench_mod.SHARP_SIZE_CAP)
    q.add_argument("--out", required=True)
    q.set_defaults(handler=_cmd_bench)

    q = sub.add_parser("sweep", parents=[common], help="parameter quality sweep")
    q.add_argument("--alphas", type=lambda s: _csv_list(s, float, "--alphas"), required=True)
    q.add_argument("--betas", type=lambda s: _csv_list(s, float, "--betas"), required=True)
    q.add_argument("--ds", type=lambda s: _csv_list(s, int, "--ds"), required=True)
    q.add_argument("--ps", type=lambda s: _csv_list(s, int, "--ps"), required=True)
    q.add_argument("--seeds", type=lambda s: _csv_list(s, int, "--seeds"), default=[0])
    q.add_argument("--out", required=True)
    q.set_defaults(handler=_cmd_sweep)

    q = sub.add_parser("radius", parents=[common],
                       help="neighborhood radius equivalent to a soft bandwidth")
    q.add_argument("--beta", type=float, required=True)
    q.add_argument("--product", type=float, default=RADIUS_BETA_PRODUCT,
                   help="override the tabulated beta*radius constant")
    q.set_defaults(handler=_cmd_radius)

    return parser


def _resolve_threads(args, parser) -> int:
    if args.threads is not None:
        threads = args.threads
    else:
        raw = os.environ.get("VECKM_THREADS", "").strip()
        if raw:
            try:
                threads = int(raw)
            except ValueError:
                parser.error(f"VECKM_THREADS must be an integer, got {raw!r}")
        else:
            threads = 1
    if threads < 1:
        parser.error(f"thread count must be >= 1, got {threads}")
    return threads


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads_resolved = _resolve_threads(args, parser)
    try:
        with threadpool_limits(limits=args.threads_resolved):
            return args.handler(args, parser)
    except (VecKMError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entry()
