"""Maximum-weight matching of bins to single oversize items.

Bin ``i`` may be matched to item ``j`` iff ``s_j > d_i`` and the edge weighs
``p_i``. Two facts make this fast and exact:

* all edges at a bin share one weight, so the matchable bin sets form a
  (transversal) matroid and greedy by non-increasing profit is optimal;
* neighbourhoods are nested (a smaller demand sees a superset of items), so
  Hall's condition reduces to prefix counts over bins sorted by demand,
  which a range-add/range-min segment tree maintains in O(log m).
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import FrozenSet, Iterator, Tuple

from .core import Assignment, Instance, Supply, UsageError


@dataclass(frozen=True)
class BipartiteGraph:
    demands: Tuple[Fraction, ...]
    profits: Tuple[Fraction, ...]
    sizes: Tuple[Fraction, ...]

    def has_edge(self, i: int, j: int) -> bool:
        return self.sizes[j] > self.demands[i]

    def weight(self, i: int) -> Fraction:
        return self.profits[i]

    def edges(self) -> Iterator[Tuple[int, int]]:
        for i, d in enumerate(self.demands):
            for j, s in enumerate(self.sizes):
                if s > d:
                    yield i, j

    def edge_count(self) -> int:
        ordered = sorted(self.sizes)
        return sum(len(ordered) - bisect_right(ordered, d) for d in self.demands)


def build_graph(inst: Instance) -> BipartiteGraph:
    if inst.supply is not Supply.UNIT:
        raise UsageError("the matching branch works on unit-supply instances")
    return BipartiteGraph(tuple(inst.demands()), tuple(inst.profits()), inst.items)


class _MinAddTree:
    """Range add / global-range min over a fixed array."""

    def __init__(self, values):
        size = 1
        while size < max(len(values), 1):
            size *= 2
        self.size = size
        inf = float("inf")
        self.mn = [inf] * (2 * size)
        self.lazy = [0] * (2 * size)
        self.mn[size:size + len(values)] = values
        for k in range(size - 1, 0, -1):
            self.mn[k] = min(self.mn[2 * k], self.mn[2 * k + 1])

    def _apply(self, lo, hi, delta, k, a, b):
        if hi <= a or b <= lo:
            return
        if lo <= a and b <= hi:
            self.mn[k] += delta
            self.lazy[k] += delta
            return
        mid = (a + b) // 2
        self._apply(lo, hi, delta, 2 * k, a, mid)
        self._apply(lo, hi, delta, 2 * k + 1, mid, b)
        self.mn[k] = min(self.mn[2 * k], self.mn[2 * k + 1]) + self.lazy[k]

    def add(self, lo, hi, delta):
        self._apply(lo, hi, delta, 1, 0, self.size)

    def _query(self, lo, hi, k, a, b):
        if hi <= a or b <= lo:
            return float("inf")
        if lo <= a and b <= hi:
            return self.mn[k]
        mid = (a + b) // 2
        return min(self._query(lo, hi, 2 * k, a, mid),
                   self._query(lo, hi, 2 * k + 1, mid, b)) + self.lazy[k]

    def min(self, lo, hi):
        return self._query(lo, hi, 1, 0, self.size)


def max_weight_matching(g: BipartiteGraph) -> FrozenSet[Tuple[int, int]]:
    """Return a maximum-weight matching as ``(bin, item)`` pairs.

    Among optimal matchings the bin set is the greedy one (higher profit
    first, then lower bin index); items are handed out in non-increasing
    demand order, each bin taking the lowest-index free item that exceeds
    its demand.
    """
    m, n = len(g.demands), len(g.sizes)
    if m == 0 or n == 0:
        return frozenset()
    sorted_sizes = sorted(g.sizes)
    # positions: bins by non-increasing demand (ties by index)
    by_demand = sorted(range(m), key=lambda i: (-g.demands[i], i))
    neg_sorted = [-g.demands[i] for i in by_demand]
    # slack[r] = |N(bin at r)| - #accepted bins with demand >= its demand
    slack = [n - bisect_right(sorted_sizes, g.demands[i]) for i in by_demand]
    tree = _MinAddTree(slack)

    accepted = []
    for i in sorted(range(m), key=lambda i: (-g.profits[i], i)):
        # every position whose demand is <= d_i gains one competitor
        lo = bisect_left(neg_sorted, -g.demands[i])
        if tree.min(lo, m) >= 1:
            tree.add(lo, m, -1)
            accepted.append(i)

    pairs = []
    order = sorted(range(n), key=lambda j: g.sizes[j], reverse=True)
    heap = []
    pos = 0
    for i in sorted(accepted, key=lambda i: (-g.demands[i], i)):
        while pos < n and g.sizes[order[pos]] > g.demands[i]:
            heapq.heappush(heap, order[pos])
            pos += 1
        j = heapq.heappop(heap)
        pairs.append((i, j))
    return frozenset(pairs)


def matching_weight(g: BipartiteGraph, pairs) -> Fraction:
    return sum((g.profits[i] for i, _ in pairs), Fraction(0))


def matching_assignment(pairs) -> Assignment:
    return Assignment({i: (j,) for i, j in pairs})


def singular_branch(inst: Instance) -> Tuple[Assignment, Fraction]:
    g = build_graph(inst)
    pairs = max_weight_matching(g)
    return matching_assignment(pairs), matching_weight(g, pairs)
