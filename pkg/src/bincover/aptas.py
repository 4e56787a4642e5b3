"""Configuration-LP scheme for variable-sized bin covering, infinite supply.

Pipeline::

    prune_small_bins -> classify_and_group -> enumerate_configurations
        -> build_lp2 -> lp_solve -> round_and_fill

Everything after pruning works in normalized units (largest demand = 1);
results are reported in the instance's own units.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .core import (Assignment, BinCoverError, Instance, ProblemClass, Refusal,
                   Supply, UsageError, as_rat, profit)
from .lp import LE, LpProblem, LpSolution, lp_solve

DEFAULT_BUDGET = 10 ** 6


class FillError(BinCoverError, RuntimeError):
    """The greedy fill ran out of items; the LP promised it would not."""


@dataclass(frozen=True)
class AptasParams:
    """``eps`` drives pruning and the L/M/T split; ``k`` (if given) replaces
    the ``ceil(1/eps^4)`` group count."""

    eps: Fraction = Fraction(1, 10)
    k: Optional[int] = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        eps = as_rat(self.eps)
        object.__setattr__(self, "eps", eps)
        if not 0 < eps < 1:
            raise ValueError(f"eps must lie in (0, 1), got {eps}")
        if self.k is not None and self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.budget < 1:
            raise ValueError("budget must be positive")

    @property
    def guarantee_mode(self) -> bool:
        return self.k is None and self.eps <= Fraction(1, 10)

    def group_count(self) -> int:
        if self.k is not None:
            return self.k
        return math.ceil(1 / self.eps ** 4)


@dataclass(frozen=True)
class Pruned:
    scale: Fraction                     # the largest demand d_1
    types: Tuple[int, ...]              # original type per normalized type, demand descending
    demands: Tuple[Fraction, ...]       # normalized, strictly decreasing, demands[0] == 1
    items: Tuple[int, ...]              # remaining item indices, size descending
    sizes: Tuple[Fraction, ...]         # their normalized sizes
    committed: Tuple[int, ...]          # items of size >= d_1, one bin each
    committed_type: int
    restricted: Instance                # original instance minus the pruned types

    @property
    def committed_profit(self) -> Fraction:
        return len(self.committed) * self.scale


def _require(inst: Instance):
    if inst.supply is not Supply.INFINITE:
        raise UsageError("the configuration-LP scheme needs an infinite-supply instance")
    if inst.problem_class is not ProblemClass.VARIABLE:
        raise UsageError("the configuration-LP scheme needs a variable-sized instance")


def prune_small_bins(inst: Instance, eps) -> Pruned:
    """Normalize by the largest demand, drop types with demand <= eps, merge
    equal demands, and commit every item of size >= d_1 to its own bin."""
    _require(inst)
    eps = as_rat(eps)
    scale = max(inst.demands())
    top = min(i for i, b in enumerate(inst.bins) if b.demand == scale)
    keep: Dict[Fraction, int] = {}
    for i, b in enumerate(inst.bins):
        d = b.demand / scale
        if d > eps and d not in keep:
            keep[d] = i
    demands = tuple(sorted(keep, reverse=True))
    types = tuple(keep[d] for d in demands)

    committed = tuple(j for j, s in enumerate(inst.items) if s >= scale)
    rest = sorted((j for j, s in enumerate(inst.items) if s < scale),
                  key=lambda j: (-inst.items[j], j))
    restricted = Instance(inst.supply,
                          tuple(b for b in inst.bins if b.demand / scale > eps),
                          inst.items, inst.problem_class)
    return Pruned(scale, types, demands, tuple(rest),
                  tuple(inst.items[j] / scale for j in rest),
                  committed, top, restricted)


@dataclass(frozen=True)
class GroupedItems:
    large: Tuple[int, ...]              # positions into the sorted item list
    medium: Tuple[int, ...]
    tiny: Tuple[int, ...]
    groups: Tuple[Tuple[int, ...], ...]  # positions per group, nonempty
    rounded: Tuple[Fraction, ...]       # l_g, smallest size in group g
    tiny_volume: Fraction
    requested_k: int

    @property
    def k(self) -> int:
        return len(self.groups)

    @property
    def multiplicity(self) -> Tuple[int, ...]:
        return tuple(len(g) for g in self.groups)


def classify_and_group(sizes, params: AptasParams) -> GroupedItems:
    """Split items (sorted non-increasingly) into L, M, T and group L.

    With ``s`` the total size, L takes the ``ceil(s/eps^3)`` largest items and
    M the next ``floor(s/eps)``; if there are fewer items than that, L takes
    everything. L is cut into groups of near-equal size (the first ``q``
    groups one larger) and each group is rounded down to its smallest size.
    """
    sizes = [as_rat(x) for x in sizes]
    if any(a < b for a, b in zip(sizes, sizes[1:])):
        raise ValueError("sizes must be sorted non-increasingly")
    n = len(sizes)
    eps = params.eps
    s = sum(sizes, Fraction(0))
    n_large = math.ceil(s / eps ** 3)
    n_medium = math.floor(s / eps)
    if n < n_large + n_medium:
        n_large, n_medium = n, 0
    large = tuple(range(n_large))
    medium = tuple(range(n_large, n_large + n_medium))
    tiny = tuple(range(n_large + n_medium, n))

    k = params.group_count()
    p, q = divmod(n_large, k)
    groups = []
    start = 0
    for g in range(k):
        width = p + 1 if g < q else p
        if width == 0:
            break
        groups.append(tuple(range(start, start + width)))
        start += width
    rounded = tuple(sizes[grp[-1]] for grp in groups)
    return GroupedItems(large, medium, tiny, tuple(groups), rounded,
                        sum((sizes[t] for t in tiny), Fraction(0)), k)


@dataclass(frozen=True)
class Configuration:
    counts: Tuple[int, ...]
    total: Fraction
    cover_type: Optional[int]           # normalized type index it covers (C_j), if any
    remainders: Tuple[Tuple[int, Fraction], ...]  # (j, r) for every j with r > 0


def enumerate_configurations(g: GroupedItems, demands, budget: int = DEFAULT_BUDGET
                             ) -> List[Configuration]:
    """All count vectors u with u_g <= n(g) and total rounded size <= 2 d_1.

    Each configuration is classified against the (strictly decreasing)
    demands: it covers the largest type whose demand it reaches, and leaves a
    positive remainder on every larger type.
    """
    demands = list(demands)
    cap = 2 * demands[0] if demands else Fraction(0)
    mult = g.multiplicity
    sizes = g.rounded
    out: List[Configuration] = []

    def classify(counts, total):
        cover = next((j for j, d in enumerate(demands) if total >= d), None)
        rem = tuple((j, d - total) for j, d in enumerate(demands) if d > total)
        return Configuration(tuple(counts), total, cover, rem)

    counts = [0] * len(sizes)

    def walk(pos, total):
        if pos == len(sizes):
            if len(out) >= budget:
                raise Refusal(f"configuration enumeration exceeds the budget of {budget}")
            out.append(classify(counts, total))
            return
        u = 0
        while u <= mult[pos] and total + u * sizes[pos] <= cap:
            counts[pos] = u
            walk(pos + 1, total + u * sizes[pos])
            u += 1
        counts[pos] = 0

    walk(0, Fraction(0))
    return out


@dataclass
class Lp2:
    problem: LpProblem
    y: Dict[int, int] = field(default_factory=dict)               # config -> var
    z: Dict[Tuple[int, int], int] = field(default_factory=dict)   # (config, type) -> var

    @property
    def size(self) -> Tuple[int, int]:
        return self.problem.num_vars, len(self.problem.rows)


def build_lp2(g: GroupedItems, demands, configs: List[Configuration]) -> Lp2:
    """max sum d_j (y over C_j + z over C~_j) s.t. group multiplicities and
    total remainder <= s(T)."""
    obj = []
    lp = Lp2(LpProblem([]))
    for c, conf in enumerate(configs):
        if conf.cover_type is not None:
            lp.y[c] = len(obj)
            obj.append(demands[conf.cover_type])
        for j, _ in conf.remainders:
            lp.z[c, j] = len(obj)
            obj.append(demands[j])
    p = LpProblem(obj)
    uses: Dict[int, List[int]] = {}
    for (c, _), var in lp.z.items():
        uses.setdefault(c, []).append(var)
    for c, var in lp.y.items():
        uses.setdefault(c, []).append(var)
    for grp, n_g in enumerate(g.multiplicity):
        coeffs = {}
        for c, conf in enumerate(configs):
            u = conf.counts[grp]
            if u:
                for var in uses.get(c, ()):
                    coeffs[var] = Fraction(u)
        p.add_row(coeffs, LE, n_g)
    tiny = {}
    for c, conf in enumerate(configs):
        for j, r in conf.remainders:
            tiny[lp.z[c, j]] = r
    p.add_row(tiny, LE, g.tiny_volume)
    lp.problem = p
    return lp


@dataclass
class Rounded:
    assignment: Assignment
    opened: int
    z_bins: int


def round_and_fill(pr: Pruned, g: GroupedItems, configs: List[Configuration],
                   lp: Lp2, sol: LpSolution, first_copy: Optional[Dict[int, int]] = None
                   ) -> Rounded:
    """Floor the LP solution, place the real large items in the configuration
    slots group by group, then cover the remainder bins greedily.

    Remainder bins are served in order of decreasing remainder from a pool of
    every item not used by a slot, largest first, each bin taking items until
    it is covered.
    """
    queues = [deque(grp) for grp in g.groups]
    copies = dict(first_copy or {})
    demands = pr.demands
    bins: List[Tuple[int, List[int]]] = []   # (normalized type, positions)
    z_bins: List[Tuple[Fraction, int, int]] = []

    def open_bin(c, j, how_many):
        for _ in range(how_many):
            slot = []
            for grp, u in enumerate(configs[c].counts):
                for _ in range(u):
                    if not queues[grp]:
                        raise FillError(f"group {grp} ran out of items")
                    slot.append(queues[grp].popleft())
            bins.append((j, slot))

    for c, var in sorted(lp.y.items()):
        open_bin(c, configs[c].cover_type, math.floor(sol.values[var]))
    for (c, j), var in sorted(lp.z.items()):
        count = math.floor(sol.values[var])
        for _ in range(count):
            z_bins.append((dict(configs[c].remainders)[j], c, j))
            open_bin(c, j, 1)
    z_start = len(bins) - len(z_bins)

    used = {pos for _, slot in bins for pos in slot}
    pool = deque(pos for pos in range(len(pr.items)) if pos not in used)
    # z-bins in order of decreasing remainder, ties in opening order
    order = sorted(range(len(z_bins)), key=lambda t: (-z_bins[t][0], t))
    for t in order:
        j, slot = bins[z_start + t]
        load = sum((pr.sizes[pos] for pos in slot), Fraction(0))
        while load < demands[j]:
            if not pool:
                raise FillError(f"no items left to cover a remainder bin of type {j}")
            pos = pool.popleft()
            slot.append(pos)
            load += pr.sizes[pos]

    sets = {}
    for j, slot in bins:
        t = pr.types[j]
        c = copies.get(t, 0)
        copies[t] = c + 1
        sets[t, c] = tuple(sorted(pr.items[pos] for pos in slot))
    a = Assignment(sets)
    return Rounded(a, len(bins), len(z_bins))


@dataclass
class AptasResult:
    assignment: Assignment
    profit: Fraction
    lp_objective: Fraction              # in instance units
    fractional_count: int
    stats: dict


def aptas_detailed(inst: Instance, params: Optional[AptasParams] = None) -> AptasResult:
    params = params or AptasParams()
    pr = prune_small_bins(inst, params.eps)
    g = classify_and_group(pr.sizes, params)
    configs = enumerate_configurations(g, pr.demands, params.budget)
    lp = build_lp2(g, pr.demands, configs)
    sol = lp_solve(lp.problem)

    committed = {(pr.committed_type, c): (j,) for c, j in enumerate(pr.committed)}
    rounded = round_and_fill(pr, g, configs, lp, sol,
                             first_copy={pr.committed_type: len(pr.committed)})
    sets = dict(committed)
    sets.update(rounded.assignment.sets)
    a = Assignment(sets)
    value = profit(inst, a)
    lp_value = sol.objective * pr.scale
    stats = {
        "L": len(g.large), "M": len(g.medium), "T": len(g.tiny),
        "k": g.k, "k_requested": g.requested_k,
        "configurations": len(configs),
        "lp_vars": lp.size[0], "lp_rows": lp.size[1],
        "fractional": sol.fractional_count(),
        "lp_objective": lp_value,
        "committed_items": len(pr.committed),
        "committed_profit": pr.committed_profit,
        "surviving_types": list(pr.types),
        "opened_bins": rounded.opened,
        "remainder_bins": rounded.z_bins,
        "guarantee_mode": params.guarantee_mode,
    }
    return AptasResult(a, value, lp_value, sol.fractional_count(), stats)


def aptas_solve(inst: Instance, params: Optional[AptasParams] = None
                ) -> Tuple[Assignment, Fraction]:
    r = aptas_detailed(inst, params)
    return r.assignment, r.profit
