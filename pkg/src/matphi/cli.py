"""``phi`` command-line front end.

Subcommands::

    phi run INPUT -p P -o OUTDIR      phi_0..phi_p as Matrix Market files
    phi corpus -o DIR [--seed S]      write the synthetic test corpus
    phi bench DIR -p P -o OUTDIR      forward-error and cost report
    phi verify INPUT -p P             compare against the extended-precision oracle
    phi theta                         regenerate the threshold table

Exit status is 0 on success, 1 on a numerical failure and 2 on bad input.
Failures also print a one-line JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bench import bench
from .corpus import gen_corpus, load_corpus
from .densemat import DEFAULT_SEED, PhiContext, SingularPivotError
from .mmio import MatrixParseError, read_matrix, write_mtx
from .oracle import DEFAULT_DIGITS, phi_reference, phi_series_lifted, rel_error
from .pade import OPTIMAL_DEGREES, THETA, regenerate_table
from .phieval import phi_funm, phi_funm_fixed

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_INPUT = 2


class InputError(Exception):
    """Bad command-line input; maps to exit status 2."""


def _fail(record: dict, code: int) -> int:
    print(json.dumps(record), file=sys.stderr)
    return code


def _load(args) -> np.ndarray:
    path = Path(args.input)
    if not path.is_file():
        raise InputError(f"no such file: {path}")
    fmt = None if args.format == "auto" else args.format
    return read_matrix(path, fmt)


def _context(args) -> PhiContext:
    return PhiContext(seed=args.seed, exact_alpha=args.exact_alpha)


def _compute(a, args):
    ctx = _context(args)
    if args.force_s is not None and args.force_m is None:
        raise InputError("--force-s needs --force-m")
    if args.force_m is not None:
        return phi_funm_fixed(a, args.p, args.force_m, args.force_s, ctx)
    return phi_funm(a, args.p, ctx)


def _check_p(p: int) -> None:
    if p < 1:
        raise InputError("p must be >= 1")


def cmd_run(args) -> int:
    _check_p(args.p)
    a = _load(args)
    t0 = time.perf_counter()
    res = _compute(a, args)
    wall = time.perf_counter() - t0
    if not all(np.all(np.isfinite(x)) for x in res.phis):
        return _fail({"error": "numerical", "message": "non-finite entries in the result",
                      "diagnostics": res.diagnostics()}, EXIT_NUMERICAL)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for j, x in enumerate(res.phis):
        write_mtx(out / f"phi{j}.mtx", x, comment=f"phi_{j}(A)")
    diag = res.diagnostics()
    diag["wall_time_s"] = wall
    diag["input"] = str(args.input)
    if args.digits is not None:
        ref = phi_reference(a, args.p, args.digits)
        diag["oracle_digits"] = args.digits
        diag["oracle_rel_error"] = [rel_error(r, x) for r, x in zip(ref, res.phis)]
    text = json.dumps(diag, indent=2)
    (out / "diagnostics.json").write_text(text + "\n")
    if args.emit_diagnostics:
        print(text)
    return EXIT_OK


def cmd_corpus(args) -> int:
    paths = gen_corpus(args.seed, args.output)
    print(f"wrote {len(paths) - 1} matrices and manifest.json to {args.output}")
    return EXIT_OK


def cmd_bench(args) -> int:
    _check_p(args.p)
    indir = Path(args.corpus)
    if not (indir / "manifest.json").is_file():
        raise InputError(f"{indir} has no manifest.json; run 'phi corpus' first")
    corpus = load_corpus(indir)
    report = bench(corpus, p=args.p, digits=args.digits, jobs=args.jobs, seed=args.seed)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.csv").write_text(report.to_csv())
    summary = report.summary()
    (out / "summary.txt").write_text(summary)
    print(summary, end="")
    if args.strict and report.failures():
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_verify(args) -> int:
    _check_p(args.p)
    a = _load(args)
    res = _compute(a, args)
    ref = phi_reference(a, args.p, args.digits)
    second = phi_series_lifted(a, args.p, args.digits)
    worst = 0.0
    print(f"{'j':>3} {'error':>11} {'oracle gap':>11}")
    for j in range(args.p + 1):
        err = rel_error(ref[j], res.phis[j])
        gap = rel_error(ref[j], second[j])
        worst = max(worst, err if math.isfinite(err) else math.inf)
        print(f"{j:>3} {err:11.3e} {gap:11.3e}")
    ok = worst <= args.tol
    print(f"max error {worst:.3e} ({'within' if ok else 'above'} tolerance {args.tol:g}); "
          f"matmul count {res.matmul_count}")
    if not ok:
        return _fail({"error": "verify", "message": f"max error {worst:.3e} above {args.tol:g}"}, EXIT_NUMERICAL)
    return EXIT_OK


def cmd_theta(args) -> int:
    p_values = range(1, args.p_max + 1)
    t0 = time.perf_counter()
    table = regenerate_table(p_values, K_extra=args.k_extra, dps=args.dps)
    mismatches = 0
    print(f"{'m':>3} {'p':>3} {'embedded':>10} {'regenerated':>14} match")
    for i, m in enumerate(OPTIMAL_DEGREES):
        for p in p_values:
            value = table[(i, p)]
            embedded = THETA[i][p - 1]
            ok = float(f"{value:.2e}") == embedded
            mismatches += not ok
            print(f"{m:>3} {p:>3} {embedded:10.3g} {value:14.6e} {'yes' if ok else 'NO'}")
    print(f"{len(table) - mismatches}/{len(table)} entries agree to 3 significant digits "
          f"({time.perf_counter() - t0:.1f} s)")
    if mismatches:
        return _fail({"error": "theta", "message": f"{mismatches} entries differ"}, EXIT_NUMERICAL)
    return EXIT_OK


def _matrix_args(sp, with_output: bool):
    sp.add_argument("input", help="Matrix Market (.mtx) or CSV file")
    sp.add_argument("-p", type=int, required=True, help="largest phi index (>= 1)")
    if with_output:
        sp.add_argument("-o", "--output", required=True, help="output directory")
    sp.add_argument("--format", choices=["auto", "matrix-market", "csv"], default="auto")
    sp.add_argument("--force-m", type=int, choices=OPTIMAL_DEGREES, help="use this Pade degree")
    sp.add_argument("--force-s", type=int, help="use this scaling parameter (needs --force-m)")
    sp.add_argument("--exact-alpha", action="store_true", help="form matrix powers instead of estimating their norms")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED, help="norm estimator seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phi", description="Matrix phi-functions by scaling and recovering.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="compute phi_0(A)..phi_p(A)")
    _matrix_args(sp, with_output=True)
    sp.add_argument("--digits", type=int, help="also compare against the oracle at this many digits")
    sp.add_argument("--emit-diagnostics", action="store_true", help="print diagnostics JSON on stdout")
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("corpus", help="write the synthetic test corpus")
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_corpus)

    sp = sub.add_parser("bench", help="forward errors and costs over a corpus directory")
    sp.add_argument("corpus", help="directory written by 'phi corpus'")
    sp.add_argument("-p", type=int, default=10)
    sp.add_argument("-o", "--output", required=True)
    sp.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--strict", action="store_true", help="exit 1 if any row carries a failure tag")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("verify", help="compare one matrix against the oracle")
    _matrix_args(sp, with_output=False)
    sp.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("theta", help="regenerate the threshold table and compare")
    sp.add_argument("--p-max", type=int, default=10, choices=range(1, 11), metavar="{1..10}")
    sp.add_argument("--dps", type=int, default=120)
    sp.add_argument("--k-extra", type=int, default=250)
    sp.set_defaults(func=cmd_theta)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except MatrixParseError as exc:
        return _fail(exc.record(), EXIT_INPUT)
    except (InputError, ValueError) as exc:
        return _fail({"error": "input", "message": str(exc)}, EXIT_INPUT)
    except (SingularPivotError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail({"error": "numerical", "kind": type(exc).__name__, "message": str(exc)}, EXIT_NUMERICAL)


if __name__ == "__main__":
    sys.exit(main())
