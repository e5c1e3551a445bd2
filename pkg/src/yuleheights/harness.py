"""Monte Carlo verification of the statistic registry.

For every tip count in a grid, simulate ``R`` trees, form plug-in estimates
of each registered statistic from the per-tree triples ``(U, tau, E[tau|Y])``,
attach a standard error and compare with the exact value through a z-score.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .closed_forms import StatisticId as S
from .closed_forms import statistic
from .numeric import UndefinedAtN
from .yule import simulate

__all__ = [
    "DEFAULT_GRID",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "VerificationRow",
    "default_replicates",
    "estimate",
    "run_experiment",
    "pass_rate",
    "gate",
    "emit_report",
    "read_csv_report",
    "emit_plot_script",
    "report_schema",
]

DEFAULT_GRID: tuple[int, ...] = tuple(range(2, 11)) + (25, 100) + tuple(range(250, 2501, 250))
CSV_COLUMNS = ("n", "statistic", "theory", "estimate", "std_error", "z", "replicates", "seed", "pass")
CORRELATIONS = frozenset({S.CORR_TAU_CONDTAU, S.CORR_SHARED_CONDSHARED, S.CORR_SHARED_TAURESID})
MIN_CORR_REPLICATES = 1000
# replicates per simulation job; fixed so that the split never depends on worker count
BLOCK = 20_000


def default_replicates(n: int) -> int:
    return 200_000 if n <= 100 else 20_000


@dataclass
class ExperimentConfig:
    n_grid: Sequence[int] = DEFAULT_GRID
    replicates: int | None = None  # None: default_replicates(n)
    seed: int = 20240101
    statistics: Sequence[S] | None = None  # None: every registered statistic
    z_threshold: float = 4.0
    threads: int = 1
    experiment: int = 0
    csv_path: str | None = None
    json_path: str | None = None
    plot_path: str | None = None

    def __post_init__(self):
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if not self.n_grid or min(self.n_grid) < 2:
            raise ValueError("n_grid must be nonempty with every n >= 2")
        self.statistics = tuple(S) if self.statistics is None else tuple(
            s if isinstance(s, S) else S.parse(s) for s in self.statistics)
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.z_threshold <= 0:
            raise ValueError("z_threshold must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.replicates is not None and self.replicates < 2:
            raise ValueError("need at least 2 replicates")
        if CORRELATIONS & set(self.statistics):
            low = [n for n in self.n_grid if self.replicates_for(n) < MIN_CORR_REPLICATES]
            if low:
                raise ValueError(
                    f"correlation statistics need >= {MIN_CORR_REPLICATES} replicates (n={low[0]})")

    def replicates_for(self, n: int) -> int:
        return default_replicates(n) if self.replicates is None else self.replicates

    def header(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        d["statistics"] = [s.value for s in self.statistics]
        d["replicates"] = {str(n): self.replicates_for(n) for n in self.n_grid}
        for key in ("threads", "csv_path", "json_path", "plot_path"):
            d.pop(key)  # do not affect the numbers
        return d


@dataclass
class VerificationRow:
    n: int
    statistic: S
    theory: float
    estimate: float
    std_error: float
    z: float
    replicates: int
    seed: int
    passed: bool | None  # None: theory undefined at n, row skipped

    @property
    def status(self) -> str:
        return "skipped" if self.passed is None else ("true" if self.passed else "false")


# -- estimators --------------------------------------------------------------


def _mean(x: np.ndarray) -> tuple[float, float]:
    return float(np.mean(x)), float(np.std(x, ddof=1) / math.sqrt(len(x)))


def _loo_moments(x: np.ndarray, y: np.ndarray):
    """Leave-one-out (R-1 normalized) variances and covariance, all O(R)."""
    x = x - x.mean()
    y = y - y.mean()
    R = len(x)
    sx, sy = x.sum(), y.sum()
    sxx, syy, sxy = (x * x).sum(), (y * y).sum(), (x * y).sum()

    def loo(sa, sb, sab, a, b):
        m = R - 1
        return ((sab - a * b) - (sa - a) * (sb - b) / m) / (m - 1)

    full = lambda sa, sb, sab: (sab - sa * sb / R) / (R - 1)  # noqa: E731
    return (
        (full(sx, sx, sxx), loo(sx, sx, sxx, x, x)),
        (full(sy, sy, syy), loo(sy, sy, syy, y, y)),
        (full(sx, sy, sxy), loo(sx, sy, sxy, x, y)),
    )


def _jackknife_se(loo: np.ndarray) -> float:
    R = len(loo)
    return float(math.sqrt((R - 1) / R * np.sum((loo - loo.mean()) ** 2)))


def _var(x):
    (v, loo), _, _ = _loo_moments(x, x)
    return float(v), _jackknife_se(loo)


def _cov(x, y):
    _, _, (c, loo) = _loo_moments(x, y)
    return float(c), _jackknife_se(loo)


def _corr(x, y):
    (vx, lx), (vy, ly), (c, lc) = _loo_moments(x, y)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = c / math.sqrt(vx * vy) if vx > 0 and vy > 0 else math.nan
        loo = lc / np.sqrt(lx * ly)
    if not math.isfinite(r):
        return math.nan, math.nan
    return float(r), _jackknife_se(loo)


def estimate(sid: S, height: np.ndarray, tau: np.ndarray, cond_tau: np.ndarray) -> tuple[float, float]:
    """Plug-in estimate and standard error of one statistic from per-tree samples."""
    U, t, c = height, tau, cond_tau
    shared, cshared, resid = U - t, U - c, t - c
    means = {
        S.E_U: U, S.E_U2: U * U, S.E_TAU: t, S.E_TAU2: t * t, S.E_SHARED: shared,
        S.E_U_SHARED: U * shared, S.E_U_SHARED_COND: U * cshared, S.E_SHARED2: shared**2,
        S.E_U_TAU: U * t, S.E_CONDSHARED2: cshared**2, S.E_CONDTAU2: c * c,
        S.E_TAURESID2: resid**2,
    }
    if sid in means:
        return _mean(means[sid])
    pairs = {
        S.VAR_TAU: (_var, t, t), S.VAR_CONDTAU: (_var, c, c),
        S.VAR_SHARED: (_var, shared, shared), S.VAR_CONDSHARED: (_var, cshared, cshared),
        S.COV_TAU_CONDTAU: (_cov, t, c), S.CORR_TAU_CONDTAU: (_corr, t, c),
        S.COV_SHARED_CONDSHARED: (_cov, shared, cshared),
        S.CORR_SHARED_CONDSHARED: (_corr, shared, cshared),
        S.COV_SHARED_TAURESID: (_cov, shared, resid),
        S.CORR_SHARED_TAURESID: (_corr, shared, resid),
    }
    f, x, y = pairs[sid]
    return f(x) if f is _var else f(x, y)


def _z(est: float, se: float, theory: float) -> float:
    diff = est - theory
    # an exactly degenerate statistic (e.g. a residual that is identically 0)
    if abs(diff) <= 64 * np.finfo(float).eps * max(1.0, abs(theory)):
        return 0.0
    if not math.isfinite(se) or se == 0:
        return math.inf if math.isfinite(diff) else math.nan
    return diff / se


# -- driver ------------------------------------------------------------------


def _job(args):
    n, lo, hi, seed, experiment = args
    d = simulate(n, range(lo, hi), seed, experiment)
    return d["height"], d["tau"], d["cond_tau"]


def _samples(config: ExperimentConfig, pool) -> dict[int, tuple[np.ndarray, ...]]:
    jobs = []
    for n in config.n_grid:
        R = config.replicates_for(n)
        jobs += [(n, lo, min(lo + BLOCK, R), config.seed, config.experiment) for lo in range(0, R, BLOCK)]
    results = pool.map(_job, jobs) if pool else map(_job, jobs)
    parts: dict[int, list] = {}
    for (n, *_), res in zip(jobs, results):
        parts.setdefault(n, []).append(res)
    return {n: tuple(np.concatenate(col) for col in zip(*p)) for n, p in parts.items()}


def _theory(sid: S, n: int) -> float | None:
    try:
        return float(statistic(sid, n))
    except UndefinedAtN:
        return None


def run_experiment(config: ExperimentConfig) -> list[VerificationRow]:
    """Simulate, estimate and compare; also writes any output paths in ``config``."""
    if config.threads > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            samples = _samples(config, pool)
    else:
        samples = _samples(config, None)
    rows = []
    for n in config.n_grid:
        U, t, c = samples[n]
        for sid in config.statistics:
            theory = _theory(sid, n)
            est, se = estimate(sid, U, t, c)
            if theory is None:
                rows.append(VerificationRow(n, sid, math.nan, est, se, math.nan, len(U), config.seed, None))
                continue
            z = _z(est, se, theory)
            rows.append(VerificationRow(n, sid, theory, est, se, z, len(U), config.seed,
                                        bool(abs(z) <= config.z_threshold)))
    if config.csv_path:
        emit_report(rows, "csv", config.csv_path)
    if config.json_path:
        emit_report(rows, "json", config.json_path, config)
    if config.plot_path:
        emit_plot_script(config.csv_path or "report.csv", config.plot_path, rows)
    return rows


def pass_rate(rows: Iterable[VerificationRow]) -> float:
    defined = [r for r in rows if r.passed is not None]
    return sum(r.passed for r in defined) / len(defined) if defined else 1.0


def gate(rows: Iterable[VerificationRow], minimum: float = 0.99) -> bool:
    return pass_rate(rows) >= minimum


# -- reports -----------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def _csv_text(rows: Sequence[VerificationRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([r.n, r.statistic.value, _fmt(r.theory), _fmt(r.estimate), _fmt(r.std_error),
                    _fmt(r.z), r.replicates, r.seed, r.status])
    return buf.getvalue()


def _json_num(x: float):
    return float(x) if math.isfinite(x) else None


def _json_text(rows: Sequence[VerificationRow], config: ExperimentConfig | None) -> str:
    doc = {
        "config": config.header() if config else None,
        "pass_rate": pass_rate(rows),
        "rows": [
            {
                "n": r.n, "statistic": r.statistic.value, "theory": _json_num(r.theory),
                "estimate": _json_num(r.estimate), "std_error": _json_num(r.std_error),
                "z": _json_num(r.z), "replicates": r.replicates, "seed": r.seed,
                "pass": r.passed if r.passed is not None else "skipped",
            }
            for r in rows
        ],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _write(path, text: str) -> None:
    path = Path(path)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc


def emit_report(rows: Sequence[VerificationRow], format: str, path, config: ExperimentConfig | None = None) -> str:
    """Write ``rows`` as CSV or JSON to ``path`` (``None`` or ``"-"``: no file). Returns the text."""
    if not rows:
        raise ValueError("no rows to report")
    if format == "csv":
        text = _csv_text(rows)
    elif format == "json":
        text = _json_text(rows, config)
    else:
        raise ValueError(f"unknown report format {format!r}")
    if path not in (None, "-"):
        _write(path, text)
    return text


def read_csv_report(source) -> list[VerificationRow]:
    """Parse a CSV report (path or text) back into rows."""
    text = source if "\n" in str(source) else Path(source).read_text()
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    status = {"true": True, "false": False, "skipped": None}
    return [
        VerificationRow(int(d["n"]), S(d["statistic"]), float(d["theory"]), float(d["estimate"]),
                        float(d["std_error"]), float(d["z"]), int(d["replicates"]), int(d["seed"]),
                        status[d["pass"]])
        for d in reader
    ]


def report_schema() -> dict:
    return json.loads(resources.files("yuleheights").joinpath("schemas/report.schema.json").read_text())


# -- plotting ----------------------------------------------------------------

FIGURES = {
    "coalescent": (S.VAR_TAU, S.VAR_CONDTAU, S.E_TAURESID2, S.COV_TAU_CONDTAU),
    "shared": (S.VAR_SHARED, S.VAR_CONDSHARED, S.E_CONDSHARED2, S.COV_SHARED_CONDSHARED,
               S.COV_SHARED_TAURESID),
    "correlations": (S.CORR_TAU_CONDTAU, S.CORR_SHARED_CONDSHARED, S.CORR_SHARED_TAURESID),
}


def emit_plot_script(csv_path, out_path, rows: Sequence[VerificationRow] | None = None) -> str:
    """gnuplot script drawing estimates with error bars and exact curves from the CSV alone."""
    present = None if rows is None else {r.statistic for r in rows}
    lines = [
        "# regenerate with: gnuplot <this file>",
        'set datafile separator ","',
        "set terminal pngcairo size 900,600",
        "set logscale x",
        "set xlabel 'number of tips n'",
        "set key outside right",
    ]
    csv_name = str(csv_path)
    for fig, stats in FIGURES.items():
        stats = [s for s in stats if present is None or s in present]
        if not stats:
            continue
        lines.append(f"set output '{fig}.png'")
        plots = []
        for s in stats:
            src = f"\"< awk -F, '$2==\\\"{s.value}\\\"' {csv_name}\""
            plots.append(f"{src} using 1:4:5 with yerrorbars title '{s.value} (simulated)'")
            plots.append(f"{src} using 1:3 with lines title '{s.value} (exact)'")
        lines.append("plot " + ", \\\n     ".join(plots))
    text = "\n".join(lines) + "\n"
    _write(out_path, text)
    return text


def default_output_dir() -> Path:
    return Path(os.environ.get("YULEHEIGHTS_OUTPUT_DIR", "."))
