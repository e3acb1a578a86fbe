"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 infeasible margins.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import io as dio
from .dependence import (
    DEFAULT_TOL,
    is_independent,
    is_quasi_independent,
    lambda_gap,
    odds_ratios_local,
    odds_ratios_pivot,
    same_dependence,
    signature,
)
from .grid import (
    GridError,
    gaussian_copula_grid,
    haar_delta,
    lambda_bar,
    local_dependence,
    odds_ratio_function,
)
from .measures import (
    CALIBRATIONS,
    calibrate,
    kendall_tau,
    mutual_information,
    overall_dependence,
    pearson_rho,
    plrd_check,
    pqd_check,
    spearman_rho,
)
from .projection import DEFAULT_MAX_ITER, ipf
from .support import Verdict, dim_gamma, frechet_feasible, maximal_zero_rectangles
from .tables import MarginPair, TableError

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2


class InputError(Exception):
    pass


def _rect_json(rect):
    rows, cols = rect.sorted()
    return {"rows": list(rows), "cols": list(cols)}


def analyze_table(t, calibration="yule", tol=DEFAULT_TOL, input_digest=None) -> dict:
    """The full analysis report for one table, as a JSON-ready dict."""
    sig = signature(t)
    meas = overall_dependence(t, calibration)
    report = {
        "schema": dio.SCHEMA,
        "input_digest": input_digest,
        "shape": list(t.shape),
        "support": {
            "n_cells": t.support.n_cells,
            "full": t.support.is_full,
            "rectangles": [_rect_json(r) for r in maximal_zero_rectangles(t.support)],
        },
        "dim_gamma": dim_gamma(t.support),
        "delta": sig.delta,
        "norm2": sig.norm2,
        "lambda_circ": sig.lambda_circ,
        "quasi_independent": is_quasi_independent(t, tol),
        "independent": is_independent(t, tol),
        "measures": {
            "R": meas.regional,
            "Q": meas.quasi_deviation,
            "D": meas.overall,
            "calibration": calibration,
        },
        "indicators": {
            "rho": pearson_rho(t),
            "rho_s": spearman_rho(t),
            "tau": kendall_tau(t),
            "mi": mutual_information(t),
            "pqd": pqd_check(t),
            "plrd": plrd_check(t),
        },
    }
    if t.support.is_full:
        report["odds_ratios"] = {
            "log_pivot_00": odds_ratios_pivot(t),
            "log_local": odds_ratios_local(t),
        }
    return report


def _load_table(path):
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        return dio.parse_table(data.decode()), dio.digest(data)
    except (TableError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: {e}") from None


def _parse_vector(text: str, what: str) -> np.ndarray:
    try:
        v = np.array([float(x) for x in text.split(",")])
    except ValueError:
        raise InputError(f"--{what}: expected a comma-separated list of numbers") from None
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise InputError(f"--{what}: entries must be positive")
    return v / v.sum()


def _parse_pivot(text: str) -> tuple[int, int]:
    try:
        i, j = (int(x) for x in text.split(","))
    except ValueError:
        raise InputError("--pivot: expected i,j") from None
    return i, j


def cmd_ingest(args) -> int:
    try:
        text = Path(args.pairs).read_text()
        t, rl, cl = dio.parse_pairs(text)
    except OSError as e:
        raise InputError(f"{args.pairs}: {e.strerror}") from None
    except TableError as e:
        raise InputError(f"{args.pairs}: {e}") from None
    comments = [f"row_labels={json.dumps(rl)}", f"col_labels={json.dumps(cl)}"]
    out = dio.format_table(t, comments)
    if args.output:
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)
    if args.labels:
        Path(args.labels).write_text(dio.dump_json({"row_labels": rl, "col_labels": cl}))
    return EXIT_OK


def _analyze_path(path, args):
    t, dg = _load_table(path)
    return analyze_table(t, args.calibration, args.tol, dg)


def cmd_analyze(args) -> int:
    if args.batch:
        files = sorted(Path(args.batch).glob("*.csv"))
        if not files:
            raise InputError(f"{args.batch}: no .csv files")

        def run(p):
            try:
                return _analyze_path(p, args)
            except InputError as e:
                return {"error": str(e)}

        with ThreadPoolExecutor() as pool:
            results = list(pool.map(run, files))
        sys.stdout.write(dio.dump_json({p.name: r for p, r in zip(files, results)}))
        return EXIT_INPUT if any("error" in r for r in results) else EXIT_OK
    if not args.table:
        raise InputError("analyze needs a table file or --batch")
    sys.stdout.write(dio.dump_json(_analyze_path(args.table, args)))
    return EXIT_OK


def cmd_ipf(args) -> int:
    t, dg = _load_table(args.table)
    r = _parse_vector(args.rows, "rows")
    c = _parse_vector(args.cols, "cols")
    if (r.size, c.size) != t.shape:
        raise InputError(f"margins have shape {(r.size, c.size)}, table has {t.shape}")
    target = MarginPair(r, c)
    feas = frechet_feasible(t.support, target)
    report = {
        "schema": dio.SCHEMA,
        "input_digest": dg,
        "verdict": feas.verdict.value,
        "violations": [_rect_json(v) for v in feas.violations],
        "tight": [_rect_json(v) for v in feas.tight],
    }
    if feas.verdict is Verdict.INFEASIBLE:
        sys.stdout.write(dio.dump_json(report))
        return EXIT_INFEASIBLE
    rep = ipf(t, target, tol=args.tol, max_iter=args.max_iter)
    report.update(
        converged=rep.converged,
        iterations=rep.iterations,
        final_margin_gap=rep.final_margin_gap,
        support_shrunk=rep.support_shrunk,
        dependence_preserved=rep.dependence_preserved,
        alpha=rep.alpha,
        beta=rep.beta,
        result=rep.result.probs,
    )
    sys.stdout.write(dio.dump_json(report))
    return EXIT_OK


def cmd_compare(args) -> int:
    a, da = _load_table(args.table_a)
    b, db = _load_table(args.table_b)
    if a.shape != b.shape:
        raise InputError(f"shape mismatch: {a.shape} vs {b.shape}")
    same_support = a.support == b.support
    report = {
        "schema": dio.SCHEMA,
        "input_digests": [da, db],
        "same_dependence": same_dependence(a, b),
        "same_support": same_support,
        "lambda_gap": lambda_gap(a, b),
    }
    sys.stdout.write(dio.dump_json(report))
    return EXIT_OK


def cmd_grid(args) -> int:
    if args.make_gauss:
        rho, level = args.make_gauss
        try:
            g = gaussian_copula_grid(float(rho), int(level))
        except ValueError as e:
            raise InputError(f"--make-gauss: {e}") from None
        out = dio.format_grid(g)
        if args.output:
            Path(args.output).write_text(out)
        else:
            sys.stdout.write(out)
        return EXIT_OK
    if not args.grid:
        raise InputError("grid needs a grid file or --make-gauss")
    try:
        g = dio.parse_grid(Path(args.grid).read_text())
    except OSError as e:
        raise InputError(f"{args.grid}: {e.strerror}") from None
    except (GridError, TableError) as e:
        raise InputError(f"{args.grid}: {e}") from None
    try:
        out = _grid_op(g, args)
    except GridError as e:
        raise InputError(str(e)) from None
    sys.stdout.write(out)
    return EXIT_OK


def _grid_op(g, args) -> str:
    op = args.op
    if op == "delta":
        h = haar_delta(g)
        if args.format == "csv":
            lines = ["kx,ky,lx,ly,coefficient"]
            for (kx, ky), blk in sorted(h.blocks.items()):
                for (lx, ly), v in np.ndenumerate(blk):
                    lines.append(f"{kx},{ky},{lx},{ly},{v!r}")
            return "\n".join(lines) + "\n"
        same = np.sqrt(sum(v * v for v in h.same_scale().values()))
        return dio.dump_json({
            "schema": dio.SCHEMA,
            "level": g.level,
            "norm2": h.norm2,
            "same_scale_norm2": same,
            "quasi_deviation": {c: calibrate(h.norm2, c) for c in CALIBRATIONS},
        })
    if op == "lambda":
        return dio.format_matrix(lambda_bar(g), f"lambda_bar level={g.level}")
    if op == "omega":
        if args.pivot is None:
            raise InputError("--op omega needs --pivot i,j")
        pivot = _parse_pivot(args.pivot)
        return dio.format_matrix(odds_ratio_function(g, pivot), f"omega pivot={pivot[0]},{pivot[1]}")
    return dio.format_matrix(
        local_dependence(g, restrict_to_support=True), f"gamma level={g.level}"
    )


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="depcore", description="Dependence analysis of bivariate tables and grids.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="build a table from x,y[,count] pairs")
    s.add_argument("pairs")
    s.add_argument("-o", "--output", help="table CSV path (default: stdout)")
    s.add_argument("--labels", help="also write the label map as JSON here")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("analyze", help="full dependence report as JSON")
    s.add_argument("table", nargs="?")
    s.add_argument("--batch", metavar="DIR", help="analyze every *.csv in DIR")
    s.add_argument("--calibration", choices=CALIBRATIONS, default="yule")
    s.add_argument("--tol", type=float, default=DEFAULT_TOL)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("ipf", help="fit a table to new margins, keeping its dependence")
    s.add_argument("table")
    s.add_argument("--rows", required=True, help="comma-separated row margin")
    s.add_argument("--cols", required=True, help="comma-separated column margin")
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    s.set_defaults(func=cmd_ipf)

    s = sub.add_parser("compare", help="do two tables share their dependence?")
    s.add_argument("table_a")
    s.add_argument("table_b")
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("grid", help="dependence surfaces of a gridded density")
    s.add_argument("grid", nargs="?")
    s.add_argument("--op", choices=("delta", "lambda", "omega", "gamma"), default="delta")
    s.add_argument("--pivot", help="pivot cell i,j for --op omega")
    s.add_argument("--format", choices=("json", "csv"), default="json",
                   help="for --op delta: summary JSON or full coefficient CSV")
    s.add_argument("--make-gauss", nargs=2, metavar=("RHO", "K"),
                   help="emit a Gaussian copula grid instead of reading one")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_grid)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"depcore: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (TableError, GridError, ValueError) as e:
        print(f"depcore: error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
