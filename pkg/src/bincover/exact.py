"""Exact optima for small instances (ground truth for the tests and bench).

Unit supply: a search over bins with the set of still-free items as state.
A bin is only ever given a *minimal* cover (dropping its smallest item would
uncover it); any optimal solution can be trimmed to that form, so nothing is
lost. All sizes are scaled to integers first.

Infinite supply: a subset DP that partitions the items into groups, each
group placed on the most profitable bin type it covers. Using one copy per
group is the same as expanding every type into n copies.
"""

from __future__ import annotations

import os
from itertools import product
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .core import (Assignment, Instance, Refusal, Supply, UsageError,
                   common_denominator, profit, scaled_ints)

CAP_ENV = "BINCOVER_ORACLE_CAP"


@dataclass(frozen=True)
class OracleCaps:
    n: int = 10
    m: int = 6

    @classmethod
    def from_env(cls, environ=None) -> "OracleCaps":
        """Read ``n`` or ``n,m`` from BINCOVER_ORACLE_CAP, else the defaults."""
        raw = (environ if environ is not None else os.environ).get(CAP_ENV, "").strip()
        if not raw:
            return cls()
        parts = [p.strip() for p in raw.split(",")]
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise UsageError(f"{CAP_ENV} must be 'n' or 'n,m', got {raw!r}") from None
        if len(nums) not in (1, 2) or any(v < 0 for v in nums):
            raise UsageError(f"{CAP_ENV} must be 'n' or 'n,m', got {raw!r}")
        return cls(*nums)


def _caps(caps: Optional[OracleCaps]) -> OracleCaps:
    return caps if caps is not None else OracleCaps.from_env()


def _subset_sums(sizes: List[int]) -> List[int]:
    n = len(sizes)
    sums = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        sums[mask] = sums[mask ^ low] + sizes[low.bit_length() - 1]
    return sums


def minimal_covers(sizes: List[int], sums: List[int], demand: int) -> List[int]:
    """Masks C with s(C) >= demand and s(C) - min(C) < demand.

    ``sizes`` must be sorted non-increasingly, so the smallest item of a mask
    is its highest set bit.
    """
    out = []
    for mask in range(1, len(sums)):
        total = sums[mask]
        if total >= demand and total - sizes[mask.bit_length() - 1] < demand:
            out.append(mask)
    return out


def exact_opt_unit(inst: Instance, caps: Optional[OracleCaps] = None
                   ) -> Tuple[Fraction, Assignment]:
    """Maximum profit and one optimal assignment (unit supply)."""
    if inst.supply is not Supply.UNIT:
        raise UsageError("exact_opt_unit needs a unit-supply instance")
    caps = _caps(caps)
    if inst.n > caps.n or inst.m > caps.m:
        raise Refusal(f"exact oracle refuses n={inst.n}, m={inst.m}: caps are "
                      f"n<={caps.n}, m<={caps.m} (set {CAP_ENV}=n,m to raise them)")
    n = inst.n
    if n == 0:
        return Fraction(0), Assignment({})
    order = sorted(range(n), key=lambda j: (-inst.items[j], j))
    scale = common_denominator(list(inst.items) + inst.demands())
    sizes = scaled_ints([inst.items[j] for j in order], scale)
    sums = _subset_sums(sizes)
    pscale = common_denominator(inst.profits())
    profits = scaled_ints(inst.profits(), pscale)

    bins = []
    for i, b in enumerate(inst.bins):
        if profits[i] <= 0:
            continue
        d = b.demand.numerator * (scale // b.demand.denominator)
        covers = minimal_covers(sizes, sums, d)
        if covers:
            bins.append((profits[i], i, covers))
    # most profitable first makes the optimistic bound bite early
    bins.sort(key=lambda t: (-t[0], t[1]))
    suffix = [0] * (len(bins) + 1)
    for k in range(len(bins) - 1, -1, -1):
        suffix[k] = suffix[k + 1] + bins[k][0]

    memo: Dict[int, int] = {}
    choice: Dict[int, int] = {}
    shift = n

    def best(k: int, free: int) -> int:
        if k == len(bins):
            return 0
        key = (k << shift) | free
        hit = memo.get(key)
        if hit is not None:
            return hit
        value = best(k + 1, free)
        pick = 0
        if free:
            p, _, covers = bins[k]
            if value < p + suffix[k + 1] and sums[free] > 0:
                for c in covers:
                    if c & free == c:
                        v = p + best(k + 1, free ^ c)
                        if v > value:
                            value, pick = v, c
                            if value == suffix[k]:
                                break
        memo[key] = value
        choice[key] = pick
        return value

    total = best(0, (1 << n) - 1)
    sets = {}
    free = (1 << n) - 1
    for k in range(len(bins)):
        c = choice.get((k << shift) | free, 0)
        if c:
            sets[bins[k][1]] = tuple(order[t] for t in range(n) if c >> t & 1)
            free ^= c
    return Fraction(total, pscale), Assignment(sets)


def exact_opt_infinite_witness(inst: Instance, caps: Optional[OracleCaps] = None
                               ) -> Tuple[Fraction, Assignment]:
    """Maximum profit with unlimited copies per bin type, plus a witness
    keyed by ``(type, copy)``."""
    if inst.supply is not Supply.INFINITE:
        raise UsageError("exact_opt_infinite needs an infinite-supply instance")
    caps = _caps(caps)
    if inst.n > caps.n:
        raise Refusal(f"exact oracle refuses n={inst.n}: cap is n<={caps.n} "
                      f"(set {CAP_ENV} to raise it)")
    n = inst.n
    if n == 0:
        return Fraction(0), Assignment({})
    scale = common_denominator(list(inst.items) + inst.demands())
    sizes = scaled_ints(inst.items, scale)
    sums = _subset_sums(sizes)
    pscale = common_denominator(inst.profits())
    profits = scaled_ints(inst.profits(), pscale)
    demands = scaled_ints(inst.demands(), scale)

    # best type (by profit, then index) among those with demand <= t
    by_demand = sorted(range(inst.m), key=lambda i: (demands[i], i))
    sorted_d = [demands[i] for i in by_demand]
    prefix_best = []
    cur = None
    for i in by_demand:
        if cur is None or profits[i] > profits[cur] or (
                profits[i] == profits[cur] and i < cur):
            cur = i
        prefix_best.append(cur)

    def best_type(total):
        k = bisect_right(sorted_d, total)
        return prefix_best[k - 1] if k else None

    value = [0] * (1 << n)
    gtype = [None] * (1 << n)
    for mask in range(1, 1 << n):
        t = best_type(sums[mask])
        if t is not None and profits[t] > 0:
            value[mask], gtype[mask] = profits[t], t

    g = [0] * (1 << n)
    pick = [0] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        rest = mask ^ low
        best, bestg = g[rest], 0
        sub = rest
        while True:
            grp = sub | low
            v = value[grp]
            if v:
                v += g[rest ^ sub]
                if v > best:
                    best, bestg = v, grp
            if sub == 0:
                break
            sub = (sub - 1) & rest
        g[mask], pick[mask] = best, bestg

    sets = {}
    copies: Dict[int, int] = {}
    mask = (1 << n) - 1
    while mask:
        grp = pick[mask]
        if grp:
            t = gtype[grp]
            c = copies.get(t, 0)
            copies[t] = c + 1
            sets[t, c] = tuple(j for j in range(n) if grp >> j & 1)
            mask ^= grp
        else:
            mask ^= mask & -mask
    return Fraction(g[(1 << n) - 1], pscale), Assignment(sets)


def exact_opt_infinite(inst: Instance, caps: Optional[OracleCaps] = None) -> Fraction:
    return exact_opt_infinite_witness(inst, caps)[0]


def expand_copies(inst: Instance, copies: int) -> Instance:
    """Unit-supply instance with ``copies`` bins per type (types in order)."""
    bins = tuple(b for b in inst.bins for _ in range(copies))
    return Instance(Supply.UNIT, bins, inst.items, inst.problem_class)


def brute_force_unit(inst: Instance) -> Fraction:
    """Enumerate all (m+1)^n item maps. Only for cross-checking tiny cases."""
    best = Fraction(0)
    for target in product(range(inst.m + 1), repeat=inst.n):
        sets: Dict[int, List[int]] = {}
        for j, i in enumerate(target):
            if i < inst.m:
                sets.setdefault(i, []).append(j)
        best = max(best, profit(inst, Assignment(sets)))
    return best
