"""``gpot`` command line interface.

Exit codes: 0 on success, 2 for invalid input or configuration, 3 when a
numerical computation fails.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .bounds import BOUND_IDS, BoundQuery, bound_value
from .divergences import divergence_report
from .errors import GpotError, InvalidInput, NumericalInconsistency
from .experiments import ExperimentConfig, rows_to_csv, run_experiment
from .kernels import KernelSpec, gram
from .simulation import INNOVATIONS, PathSample, estimate_from_samples, sample_paths, sample_points

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _eps_list(text: str):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad epsilon list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("epsilon list is empty")
    return vals


def _add_kernel_args(p):
    p.add_argument("--kernel", required=True, choices=("se", "exp", "poly"))
    p.add_argument("--param", type=float, help="sigma (se) or a (exp)")
    p.add_argument("--degree", type=int, help="degree (poly)")
    p.add_argument("--dim", type=int, default=1)


def _kernel(args) -> KernelSpec:
    return KernelSpec(args.kernel, args.dim, param=args.param, degree=args.degree)


def _emit(out, text: str):
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_gram(args):
    k = _kernel(args)
    X = fileio.read_matrix_csv(args.points)
    fileio.write_matrix_csv(args.out, gram(k, X).base.entries)


def cmd_divergence(args):
    a = fileio.read_matrix_csv(args.a)
    b = fileio.read_matrix_csv(args.b)
    mean_a = fileio.read_vector_csv(args.mean_a) if args.mean_a else None
    mean_b = fileio.read_vector_csv(args.mean_b) if args.mean_b else None
    report = divergence_report(a, b, args.epsilon, mean_a, mean_b)
    _emit(args.out, fileio.dumps_json(report.to_dict()))


def cmd_simulate(args):
    k = _kernel(args)
    if args.points:
        X = fileio.read_matrix_csv(args.points)
        if args.m is not None and args.m != X.shape[0]:
            raise InvalidInput(f"--m {args.m} disagrees with {X.shape[0]} points in {args.points}")
    else:
        if args.m is None:
            raise InvalidInput("either --m or --points is required")
        X = sample_points(k.dim, args.m, args.seed, 0).coords
    g = gram(k, X)
    z = sample_paths(g, args.n, args.innovation, args.seed, 1)
    files = fileio.path_files(args.out)
    fileio.write_matrix_csv(files["z"], z.Z)
    fileio.write_matrix_csv(files["points"], X)
    meta = {
        "d": k.dim,
        "m": z.m,
        "N": z.N,
        "kernel": k.to_dict(),
        "seed": args.seed,
        "innovation": args.innovation,
    }
    fileio.write_json(files["meta"], meta)


def _load_paths(z_path, points_path):
    Z = fileio.read_matrix_csv(z_path)
    if points_path is None:
        points_path = fileio.points_for(z_path)
    X = fileio.read_matrix_csv(points_path) if points_path else None
    if X is not None and X.shape[0] != Z.shape[0]:
        raise InvalidInput(f"{points_path} has {X.shape[0]} points but {z_path} has {Z.shape[0]} rows")
    return PathSample(X, Z)


def cmd_estimate(args):
    z1 = _load_paths(args.za, args.points_a)
    z2 = _load_paths(args.zb, args.points_b)
    report = estimate_from_samples(z1, z2, args.epsilon, args.subtract_mean)
    _emit(args.out, fileio.dumps_json(report.to_dict()))


def cmd_experiment(args):
    cfg = ExperimentConfig.from_dict(fileio.read_json(args.config))
    rows = run_experiment(cfg, jobs=args.jobs)
    _emit(args.out, rows_to_csv(rows))


def cmd_bound(args):
    q = BoundQuery(
        args.id,
        kappa1_sq=args.kappa1_sq,
        kappa2_sq=args.kappa2_sq,
        m=args.m,
        N=args.n,
        epsilon=args.epsilon,
        delta=args.delta,
        dim_hk2=args.dim_hk2,
        hs_a_n=args.hs_a_n,
        hs_a=args.hs_a,
        hs_b=args.hs_b,
        hs_diff_a=args.hs_diff_a,
        hs_diff_b=args.hs_diff_b,
    )
    print(repr(bound_value(q)))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gpot", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gram", help="Gram matrix of a kernel on a point set")
    _add_kernel_args(p)
    p.add_argument("--points", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("divergence", help="divergences between two covariance matrices")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--epsilon", type=_eps_list, required=True)
    p.add_argument("--mean-a")
    p.add_argument("--mean-b")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_divergence)

    p = sub.add_parser("simulate", help="simulate process realizations")
    _add_kernel_args(p)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--innovation", choices=INNOVATIONS, default="gaussian")
    p.add_argument("--points", help="reuse sites from this CSV instead of sampling")
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate divergences from realizations")
    p.add_argument("--za", required=True)
    p.add_argument("--zb", required=True)
    p.add_argument("--points-a")
    p.add_argument("--points-b")
    p.add_argument("--epsilon", type=_eps_list, required=True)
    p.add_argument("--subtract-mean", action="store_true")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="run a Gram-size or sample-count sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default="-")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bound", help="evaluate an error bound")
    p.add_argument("--id", required=True, choices=BOUND_IDS)
    p.add_argument("--kappa1-sq", type=float)
    p.add_argument("--kappa2-sq", type=float)
    p.add_argument("--m", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--dim-hk2", type=int)
    for name in ("hs-a-n", "hs-a", "hs-b", "hs-diff-a", "hs-diff-b"):
        p.add_argument(f"--{name}", type=float)
    p.set_defaults(func=cmd_bound)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (NumericalInconsistency, np.linalg.LinAlgError) as exc:
        print(f"gpot: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GpotError, OSError) as exc:
        print(f"gpot: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
