#!/usr/bin/env python3
"""Exact statistics along the n-grid next to their large-n limits.

Shows how slowly the variance-type statistics approach their limits: the
gap at n=2500 is still about 0.04 for several of them.
"""

from yuleheights.closed_forms import StatisticId, asymptote, statistic
from yuleheights.harness import DEFAULT_GRID


def main():
    grid = [n for n in DEFAULT_GRID if n >= 25] + [10_000, 100_000]
    limited = [s for s in StatisticId if asymptote(s) is not None]
    print("statistic".ljust(26) + "".join(f"{n:>10}" for n in grid) + f"{'limit':>10}")
    for sid in limited:
        vals = "".join(f"{float(statistic(sid, n, 'float')):10.5f}" for n in grid)
        print(sid.value.ljust(26) + vals + f"{asymptote(sid):10.5f}")


if __name__ == "__main__":
    main()
