#!/usr/bin/env python3
"""Draw simulated estimates (with 2 SE bars) against exact curves from a report CSV.

Needs matplotlib, which is not a dependency of the package itself.

    python scripts/plot_report.py results/report.csv --out results/
"""

import argparse
import math
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from yuleheights.closed_forms import asymptote, statistic  # noqa: E402
from yuleheights.harness import FIGURES, read_csv_report  # noqa: E402


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("csv", type=Path)
    p.add_argument("--out", type=Path, default=Path("."))
    args = p.parse_args(argv)
    rows = read_csv_report(args.csv)
    series = defaultdict(list)
    for r in rows:
        if not math.isnan(r.estimate):
            series[r.statistic].append(r)

    args.out.mkdir(parents=True, exist_ok=True)
    for name, stats in FIGURES.items():
        fig, ax = plt.subplots(figsize=(8, 5))
        for sid in stats:
            pts = sorted(series.get(sid, []), key=lambda r: r.n)
            if not pts:
                continue
            ns = [r.n for r in pts]
            line = ax.errorbar(ns, [r.estimate for r in pts], yerr=[2 * r.std_error for r in pts],
                               fmt="o", ms=3, label=f"{sid.value} simulated")
            dense = sorted({*range(2, 11), *range(10, max(ns) + 1, max(1, max(ns) // 200)), max(ns)})
            exact = []
            for n in dense:
                try:
                    exact.append(float(statistic(sid, n)))
                except ValueError:
                    exact.append(math.nan)
            ax.plot(dense, exact, color=line[0].get_color(), lw=1)
            lim = asymptote(sid)
            if lim is not None:
                ax.axhline(lim, color=line[0].get_color(), ls=":", lw=0.8)
        ax.set_xscale("log")
        ax.set_xlabel("number of tips n")
        ax.legend(fontsize=7)
        fig.tight_layout()
        fig.savefig(args.out / f"{name}.png", dpi=120)
        plt.close(fig)
        print(f"wrote {args.out / (name + '.png')}")


if __name__ == "__main__":
    main()
