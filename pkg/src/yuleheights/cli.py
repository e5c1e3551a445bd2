"""Command-line entry point: ``yuleheights <subcommand> [flags]``.

Exit status: 0 success, 1 a check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import closed_forms as cf
from . import harness, moments, oracle
from .closed_forms import StatisticId
from .numeric import MODES, RATIONAL, Surd, UndefinedAtN, format_value, value_mode
from .yule import simulate as simulate_trees

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OUTPUT_DIR_ENV = "YULEHEIGHTS_OUTPUT_DIR"


class UsageError(Exception):
    pass


class MixedModeError(UsageError):
    pass


# -- table output ------------------------------------------------------------


def _cell_mode(value):
    if isinstance(value, (float, Surd)) or (hasattr(value, "denominator") and not isinstance(value, int)):
        return value_mode(value)
    return None


def _check_modes(rows, numeric_columns) -> None:
    seen = {_cell_mode(r[c]) for r in rows for c in numeric_columns if r[c] is not None} - {None}
    if len(seen) > 1:
        raise MixedModeError("refusing to print a table that mixes rational and float values")


def _text_cell(value) -> str:
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, int)) or _cell_mode(value):
        return format_value(value)
    return str(value)


def _json_cell(value):
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value if value == value and abs(value) != float("inf") else None
    return format_value(value)  # exact values travel as strings


def render_table(columns, rows, fmt: str, numeric_columns=()) -> str:
    """Render dict rows; rejects tables mixing rational and float cells."""
    _check_modes(rows, numeric_columns)
    if fmt == "json":
        return json.dumps([{c: _json_cell(r[c]) for c in columns} for r in rows], indent=2) + "\n"
    cells = [[_text_cell(r[c]) for c in columns] for r in rows]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(cells)
        return buf.getvalue()
    widths = [max(len(x) for x in col) for col in zip(columns, *cells)]
    lines = ["  ".join(x.ljust(w) for x, w in zip(line, widths)).rstrip() for line in [list(columns), *cells]]
    return "\n".join(lines) + "\n"


def _output_path(out: str | None) -> Path | None:
    if out in (None, "-"):
        return None
    path = Path(out)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(text: str, args) -> None:
    path = _output_path(args.out)
    if path is None:
        sys.stdout.write(text)
        return
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


# -- subcommands ---------------------------------------------------------------


def _parse_stats(text: str) -> list[StatisticId]:
    if text == "all":
        return list(StatisticId)
    try:
        return [StatisticId.parse(s.strip()) for s in text.split(",")]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_exact(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    rows = []
    for sid in _parse_stats(args.stat):
        try:
            value = cf.statistic(sid, args.n, args.mode)
        except UndefinedAtN:
            value = None
        rows.append({"n": args.n, "statistic": sid.value, "value": value})
    _emit(render_table(("n", "statistic", "value"), rows, args.format, ("value",)), args)
    return EXIT_OK


_MOMENTS = {"height": moments.height_moment, "tau": moments.tau_moment, "shared": moments.shared_moment}


def cmd_moment(args) -> int:
    value = _MOMENTS[args.kind](args.n, args.m, args.mode)
    row = {"n": args.n, "m": args.m, "kind": args.kind, "value": value}
    _emit(render_table(("n", "m", "kind", "value"), [row], args.format, ("value",)), args)
    return EXIT_OK


def cmd_partitions(args) -> int:
    rows = [{"partition": "(" + ",".join(map(str, k)) + ")", "coefficient": c}
            for k, c in moments.coefficient_table(args.m)]
    _emit(render_table(("partition", "coefficient"), rows, args.format), args)
    return EXIT_OK


def _sim_job(a):
    n, lo, hi, seed = a
    return simulate_trees(n, range(lo, hi), seed)


def cmd_simulate(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    if args.replicates < 1:
        raise UsageError("--replicates must be >= 1")
    jobs = [(args.n, lo, min(lo + harness.BLOCK, args.replicates), args.seed)
            for lo in range(0, args.replicates, harness.BLOCK)]
    if args.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            parts = list(pool.map(_sim_job, jobs))
    else:
        parts = [_sim_job(j) for j in jobs]
    rows = []
    for (_, lo, _, _), d in zip(jobs, parts):
        for i in range(len(d["height"])):
            rows.append({"replicate": lo + i, "height": float(d["height"][i]), "tau": float(d["tau"][i]),
                         "cond_tau": float(d["cond_tau"][i]), "kappa": int(d["kappa"][i])})
    cols = ("replicate", "height", "tau", "cond_tau", "kappa")
    _emit(render_table(cols, rows, args.format, ("height", "tau", "cond_tau")), args)
    return EXIT_OK


def _parse_grid(text: str) -> tuple[int, ...]:
    if text == "default":
        return harness.DEFAULT_GRID
    out = []
    try:
        for part in text.split(","):
            if "-" in part:
                lo, hi = (int(x) for x in part.split("-"))
                out += range(lo, hi + 1)
            else:
                out.append(int(part))
    except ValueError as exc:
        raise UsageError(f"bad --grid {text!r}") from exc
    return tuple(out)


def cmd_verify(args) -> int:
    fmt = "csv" if args.format == "text" else args.format
    try:
        config = harness.ExperimentConfig(
            n_grid=_parse_grid(args.grid), replicates=args.replicates, seed=args.seed,
            statistics=_parse_stats(args.stat), z_threshold=args.threshold, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rows = harness.run_experiment(config)
    text = harness.emit_report(rows, fmt, None, config)
    _emit(text, args)
    if args.plot:
        csv_name = args.out if fmt == "csv" and args.out not in (None, "-") else "report.csv"
        harness.emit_plot_script(csv_name, _output_path(args.plot), rows)
    rate = harness.pass_rate(rows)
    ok = rate >= args.min_pass_rate
    print(f"pass rate {rate:.4f} over defined rows ({'ok' if ok else 'FAILED'})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAIL


def _oracle_indicator_rows(n: int):
    got = oracle.oracle_indicator_moments(n)
    ref = {
        "mean": {k: cf.pair_coalescent_pmf(n, k) for k in range(1, n)},
        "second": {k: cf.indicator_second_moment(n, k) for k in range(1, n)},
        "variance": {k: cf.indicator_variance(n, k) for k in range(1, n)},
        "cross": {(a, b): cf.indicator_cross_moment(n, a, b) for a in range(1, n) for b in range(a + 1, n)},
    }
    for kind in ("mean", "second", "variance", "cross"):
        for key, value in got[kind].items():
            label = f"{kind}[{key[0]};{key[1]}]" if kind == "cross" else f"{kind}[{key}]"
            yield label, value, ref[kind][key]


def _oracle_statistic_rows(n: int):
    source = "enumeration" if n <= oracle.ORACLE_MAX_N else "closed_form"
    got = oracle.oracle_statistics(n, source)
    for sid in StatisticId:
        try:
            ref = cf.statistic(sid, n, RATIONAL)
        except UndefinedAtN:
            ref = None
        yield sid.value, got[sid], ref


def cmd_oracle(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    if args.check == "indicators" and args.n > oracle.ORACLE_MAX_N:
        raise UsageError(f"indicator enumeration supports n <= {oracle.ORACLE_MAX_N}")
    source = _oracle_indicator_rows if args.check == "indicators" else _oracle_statistic_rows
    rows = [{"statistic": label, "n": args.n, "oracle": a, "formula": b, "equal": a == b}
            for label, a, b in source(args.n)]
    _emit(render_table(("statistic", "n", "oracle", "formula", "equal"), rows, args.format,
                       ("oracle", "formula")), args)
    return EXIT_OK if all(r["equal"] for r in rows) else EXIT_FAIL


# -- parser --------------------------------------------------------------------


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES, default=None,
                        help="number representation (default: rational up to n=500, float above)")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text", help="output format")
    common.add_argument("--out", default=None,
                        help=f"output file ('-' or omitted: stdout); relative paths resolve under ${OUTPUT_DIR_ENV}")
    common.add_argument("--seed", type=_u64, default=20240101, help="64-bit simulation seed")

    threads = argparse.ArgumentParser(add_help=False)
    threads.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                         help="worker processes (output does not depend on this)")

    parser = argparse.ArgumentParser(prog="yuleheights", description=__doc__.splitlines()[0],
                                     allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, parents=(common,)):
        return sub.add_parser(name, help=help_text, description=help_text, parents=list(parents),
                              allow_abbrev=False)

    p = add("exact", "exact values of registered statistics")
    p.add_argument("--n", type=int, required=True, help="number of tips (>= 2)")
    p.add_argument("--stat", default="all", help="statistic id, comma list, or 'all'")
    p.set_defaults(func=cmd_exact)

    p = add("moment", "m-th moment of height, pair coalescent time or shared path")
    p.add_argument("--n", type=int, required=True, help="number of tips")
    p.add_argument("--m", type=int, required=True, help="moment order")
    p.add_argument("--kind", choices=tuple(_MOMENTS), default="height", help="which random variable")
    p.set_defaults(func=cmd_moment)

    p = add("partitions", "multiplicity vectors of m with their integer coefficients")
    p.add_argument("--m", type=int, required=True, help="moment order")
    p.set_defaults(func=cmd_partitions)

    p = add("simulate", "per-replicate height, tau, E[tau|tree] and coalescence event",
            (common, threads))
    p.add_argument("--n", type=int, required=True, help="number of tips (>= 2)")
    p.add_argument("--replicates", type=int, default=1000, help="number of trees")
    p.set_defaults(func=cmd_simulate)

    p = add("verify", "Monte Carlo check of every statistic across a grid of n", (common, threads))
    p.add_argument("--grid", default="default", help="'default' or list like 2-10,25,100")
    p.add_argument("--replicates", type=int, default=None,
                   help="trees per n (default 200000 for n <= 100, 20000 above)")
    p.add_argument("--threshold", type=float, default=4.0, help="|z| pass threshold")
    p.add_argument("--stat", default="all", help="statistic id, comma list, or 'all'")
    p.add_argument("--min-pass-rate", type=float, default=0.99, help="gate on defined rows")
    p.add_argument("--plot", default=None, help="also write a gnuplot script here")
    p.set_defaults(func=cmd_verify)

    p = add("oracle", "exhaustive / direct-sum cross-check of the closed forms")
    p.add_argument("--n", type=int, required=True, help="number of tips")
    p.add_argument("--check", choices=("indicators", "statistics"), default="statistics",
                   help="what to compare")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits 2 on bad usage
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be >= 1")
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError) as exc:
        print(f"yuleheights {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"yuleheights {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
