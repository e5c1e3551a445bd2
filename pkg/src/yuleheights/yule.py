"""Seeded simulation of Yule trees and of per-tree coalescent quantities.

A tree with ``n`` tips is grown from a single origin lineage.  ``T_i``, the
time during which ``i`` lineages exist, is Exp(i).  Speciation event ``k``
(counted from the origin) splits a uniformly chosen one of the ``k``
lineages alive at that moment; event 1 splits the origin lineage.  The tree
is stopped just before event ``n``, leaving ``n`` tips.

Randomness comes from counter-based Philox streams.  Every tree consumes a
fixed block of ``2n - 1`` uniforms from its own stream::

    u[0:n]         branch times, T_i = -log(1 - u[i-1]) / i
    u[n:2n-2]      lineage choice at events 2..n-1, floor(u * k)
    u[2n-2]        draw of the coalescence event of a random tip pair

so a tree depends only on ``(seed, experiment, n, replicate)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "RngStream",
    "YuleTree",
    "TreeBatch",
    "grow_batch",
    "generate_tree",
    "pair_counts",
    "conditional_indicator",
    "conditional_expected_tau",
    "sample_kappa",
    "sample_tau",
    "height",
    "to_newick",
    "simulate",
]


@dataclass(frozen=True)
class RngStream:
    """Identifies one tree's random stream."""

    seed: int
    experiment: int = 0
    n: int = 0
    replicate: int = 0

    def _key(self) -> np.ndarray:
        ss = np.random.SeedSequence([self.seed & (2**64 - 1), self.experiment, self.n])
        return ss.generate_state(2, dtype=np.uint64)

    def generator(self) -> np.random.Generator:
        counter = np.array([0, 0, self.replicate, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=self._key(), counter=counter))

    def uniforms(self, n: int) -> np.ndarray:
        return self.generator().random(2 * n - 1)


def _stream_block(seed: int, experiment: int, n: int, replicates) -> np.ndarray:
    key = RngStream(seed, experiment, n)._key()
    out = np.empty((len(replicates), 2 * n - 1))
    counter = np.zeros(4, dtype=np.uint64)
    for row, r in enumerate(replicates):
        counter[2] = r
        out[row] = np.random.Generator(np.random.Philox(key=key, counter=counter)).random(2 * n - 1)
    return out


@dataclass
class TreeBatch:
    """Arrays describing ``B`` trees of the same size.

    ``children[b, e, side]`` is the child of event ``e + 1``: a positive
    value is an event number, a negative value ``-t`` is tip ``x_t``.
    """

    n: int
    times: np.ndarray  # (B, n)   T_1..T_n
    children: np.ndarray  # (B, n-1, 2)
    ntips: np.ndarray  # (B, n-1) tips below each event
    s: np.ndarray  # (B, n-1) tip pairs coalescing at each event
    kappa_u: np.ndarray  # (B,)

    @property
    def suffix(self) -> np.ndarray:
        """``suffix[:, k] = T_{k+1} + ... + T_n`` for ``k = 0..n-1``."""
        return np.cumsum(self.times[:, ::-1], axis=1)[:, ::-1]

    def heights(self) -> np.ndarray:
        return self.suffix[:, 0]

    def conditional_expected_tau(self) -> np.ndarray:
        pairs = self.n * (self.n - 1) // 2
        return (self.s * self.suffix[:, 1:]).sum(axis=1) / pairs

    def kappas(self) -> np.ndarray:
        pairs = self.n * (self.n - 1) // 2
        cum = np.cumsum(self.s, axis=1)
        target = self.kappa_u * pairs
        return (cum <= target[:, None]).sum(axis=1) + 1

    def taus(self, kappa: np.ndarray | None = None) -> np.ndarray:
        kappa = self.kappas() if kappa is None else kappa
        return self.suffix[np.arange(len(kappa)), kappa]


def grow_batch(n: int, u: np.ndarray) -> TreeBatch:
    """Grow one tree per row of ``u`` (shape ``(B, 2n - 1)``)."""
    if n < 2:
        raise ValueError(f"a Yule tree here needs n >= 2, got {n}")
    u = np.atleast_2d(u)
    if u.shape[1] != 2 * n - 1:
        raise ValueError(f"expected {2 * n - 1} uniforms per tree, got {u.shape[1]}")
    B = u.shape[0]
    rows = np.arange(B)
    times = -np.log1p(-u[:, :n]) / np.arange(1, n + 1)

    children = np.zeros((B, n - 1, 2), dtype=np.int64)
    # each live lineage hangs off (event index, side)
    slot_event = np.zeros((B, n), dtype=np.int64)
    slot_side = np.zeros((B, n), dtype=np.int64)
    slot_side[:, 1] = 1
    for k in range(2, n):
        j = np.minimum((u[:, n + k - 2] * k).astype(np.int64), k - 1)
        children[rows, slot_event[rows, j], slot_side[rows, j]] = k
        slot_event[rows, j] = k - 1
        slot_side[rows, j] = 0
        slot_event[:, k] = k - 1
        slot_side[:, k] = 1
    # label tips by creation: earlier event first, left before right
    order = np.argsort(slot_event * 2 + slot_side, axis=1, kind="stable")
    labels = np.empty((B, n), dtype=np.int64)
    labels[rows[:, None], order] = np.arange(1, n + 1)
    children[rows[:, None], slot_event, slot_side] = -labels

    ntips = np.zeros((B, n - 1), dtype=np.int64)
    s = np.zeros((B, n - 1), dtype=np.int64)
    # children always carry larger event numbers, so sweep from the last event
    for e in range(n - 2, -1, -1):
        left, right = children[:, e, 0], children[:, e, 1]
        cl = np.where(left < 0, 1, ntips[rows, np.maximum(left - 1, 0)])
        cr = np.where(right < 0, 1, ntips[rows, np.maximum(right - 1, 0)])
        ntips[:, e] = cl + cr
        s[:, e] = cl * cr
    pairs = n * (n - 1) // 2
    if not np.all(s.sum(axis=1) == pairs):
        raise AssertionError("pair counts do not sum to C(n, 2)")
    return TreeBatch(n, times, children, ntips, s, u[:, 2 * n - 2].copy())


@dataclass
class YuleTree:
    n: int
    times: np.ndarray
    children: np.ndarray  # (n-1, 2), see TreeBatch
    ntips: np.ndarray
    s: np.ndarray
    kappa_u: float

    @classmethod
    def from_batch(cls, batch: TreeBatch, row: int = 0) -> "YuleTree":
        return cls(batch.n, batch.times[row], batch.children[row], batch.ntips[row],
                   batch.s[row], float(batch.kappa_u[row]))

    @property
    def suffix(self) -> np.ndarray:
        return np.cumsum(self.times[::-1])[::-1]

    def event_time(self, k: int) -> float:
        """Absolute time of event ``k`` measured from the origin."""
        return float(self.times[:k].sum())


def generate_tree(n: int, rng: RngStream) -> YuleTree:
    if rng.n not in (0, n):
        raise ValueError(f"stream was set up for n={rng.n}, not n={n}")
    stream = RngStream(rng.seed, rng.experiment, n, rng.replicate)
    return YuleTree.from_batch(grow_batch(n, stream.uniforms(n)))


def pair_counts(tree: YuleTree) -> np.ndarray:
    """``s[k-1]`` = number of tip pairs coalescing at event ``k``.

    A cherry contributes a single pair.
    """
    return tree.s.copy()


def _check_k(tree: YuleTree, k: int) -> None:
    if not 1 <= k <= tree.n - 1:
        raise ValueError(f"event index must lie in 1..{tree.n - 1}, got {k}")


def conditional_indicator(tree: YuleTree, k: int) -> float:
    """Probability that a uniformly drawn tip pair coalesces at event ``k``."""
    _check_k(tree, k)
    return tree.s[k - 1] / (tree.n * (tree.n - 1) // 2)


def conditional_expected_tau(tree: YuleTree) -> float:
    """``E[tau | tree] = sum_k P(kappa = k | tree) (T_{k+1} + ... + T_n)``."""
    pairs = tree.n * (tree.n - 1) // 2
    return float((tree.s * tree.suffix[1:]).sum() / pairs)


def sample_kappa(tree: YuleTree, rng=None) -> int:
    """Draw the coalescence event of a uniformly chosen tip pair.

    ``rng`` may be a numpy ``Generator`` or an :class:`RngStream` (whose
    reserved uniform is used); by default the tree's own reserved uniform.
    """
    if rng is None:
        u = tree.kappa_u
    elif isinstance(rng, RngStream):
        u = float(RngStream(rng.seed, rng.experiment, tree.n, rng.replicate).uniforms(tree.n)[-1])
    else:
        u = float(rng.random())
    cum = np.cumsum(tree.s)
    return int(np.searchsorted(cum, u * cum[-1], side="right")) + 1


def sample_tau(tree: YuleTree, rng=None) -> float:
    return float(tree.suffix[sample_kappa(tree, rng)])


def height(tree: YuleTree) -> float:
    return float(tree.suffix[0])


def to_newick(tree: YuleTree, digits: int = 6) -> str:
    """Newick text with branch lengths; the origin branch is the root edge."""
    starts = np.concatenate([[0.0], np.cumsum(tree.times)])
    total = starts[-1]

    def node(ref: int, parent_time: float) -> str:
        if ref < 0:
            return f"x{-ref}:{total - parent_time:.{digits}g}"
        t = starts[ref]
        left, right = tree.children[ref - 1]
        return f"({node(left, t)},{node(right, t)}):{t - parent_time:.{digits}g}"

    return node(1, 0.0) + ";"


def simulate(n: int, replicates, seed: int, experiment: int = 0, chunk: int = 1024) -> dict:
    """Per-replicate height, sampled tau, E[tau | tree] and sampled event.

    ``replicates`` is an iterable of replicate indices (e.g. ``range(R)``).
    Results are ordered like ``replicates`` and do not depend on ``chunk``.
    """
    reps = list(replicates)
    out = {key: [] for key in ("height", "tau", "cond_tau", "kappa")}
    step = max(1, min(chunk, (1 << 21) // (2 * n)))
    for lo in range(0, len(reps), step):
        batch = grow_batch(n, _stream_block(seed, experiment, n, reps[lo:lo + step]))
        kappa = batch.kappas()
        out["height"].append(batch.heights())
        out["tau"].append(batch.taus(kappa))
        out["cond_tau"].append(batch.conditional_expected_tau())
        out["kappa"].append(kappa)
    return {key: np.concatenate(v) if v else np.empty(0) for key, v in out.items()}
