"""Combinatorial 5-approximation for generalized bin covering (unit supply).

Pipeline of the fractional branch::

    alg_star  ->  merge_splits  ->  maximalize  ->  shift_round

``alg_star`` solves the splittable relaxation exactly (items may be split
among bins whose demand is at least the item size, and a bin earns
``p_i * min(fill / d_i, 1)``). The next three steps turn that into a real
covering while losing at most a factor 2 twice. ``gbc5`` returns the better
of this and the matching of bins to single oversize items.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .core import (Assignment, BinCoverError, Instance, Supply, UsageError,
                   profit)
from .matching import singular_branch


class ContractError(BinCoverError, ValueError):
    """Input does not have the shape an operation relies on."""


class InvariantError(BinCoverError, RuntimeError):
    """A guarantee of the construction failed; indicates a bug."""


@dataclass(frozen=True)
class Part:
    item: int
    bin: int
    amount: Fraction


@dataclass(frozen=True)
class FractionalAssignment:
    """Item mass per (item, bin), with the parts in the order they were made."""

    parts: Tuple[Part, ...] = ()

    def mass(self) -> Dict[Tuple[int, int], Fraction]:
        x: Dict[Tuple[int, int], Fraction] = {}
        for p in self.parts:
            x[p.item, p.bin] = x.get((p.item, p.bin), Fraction(0)) + p.amount
        return x

    def item_mass(self, j: int) -> Fraction:
        return sum((p.amount for p in self.parts if p.item == j), Fraction(0))

    def bin_load(self) -> Dict[int, Fraction]:
        load: Dict[int, Fraction] = {}
        for p in self.parts:
            load[p.bin] = load.get(p.bin, Fraction(0)) + p.amount
        return load

    def fill_levels(self, inst: Instance) -> List[Fraction]:
        load = self.bin_load()
        return [min(load.get(i, Fraction(0)) / b.demand, Fraction(1))
                for i, b in enumerate(inst.bins)]


def fractional_violations(inst: Instance, f: FractionalAssignment) -> list:
    out = []
    per_item: Dict[int, Fraction] = {}
    for p in f.parts:
        if not (0 <= p.item < inst.n and 0 <= p.bin < inst.m):
            out.append(f"part {p} refers to a missing item or bin")
            continue
        if p.amount < 0:
            out.append(f"negative mass on item {p.item}, bin {p.bin}")
        if p.amount > 0 and inst.items[p.item] > inst.bins[p.bin].demand:
            out.append(f"item {p.item} is not admissible to bin {p.bin}")
        per_item[p.item] = per_item.get(p.item, Fraction(0)) + p.amount
    for j, total in per_item.items():
        if 0 <= j < inst.n and total > inst.items[j]:
            out.append(f"item {j} is assigned {total} > its size")
    return out


def efficiency_order(inst: Instance, bins: Optional[Iterable[int]] = None) -> List[int]:
    """Bins by non-increasing efficiency, ties by original index."""
    pool = range(inst.m) if bins is None else bins
    return sorted(pool, key=lambda i: (-inst.bins[i].efficiency, i))


def alg_star(inst: Instance, active: Optional[Sequence[int]] = None) -> FractionalAssignment:
    """Greedy optimum of the splittable relaxation.

    Bins are visited by non-increasing efficiency. Each takes the largest
    admissible item that still has mass left, either all of that remaining
    mass or exactly the amount that completes the bin. ``active`` restricts
    the bins that may receive mass.
    """
    if inst.supply is not Supply.UNIT:
        raise UsageError("alg_star works on unit-supply instances")
    n = inst.n
    order = sorted(range(n), key=lambda j: (-inst.items[j], j))
    neg_sizes = [-inst.items[j] for j in order]
    remaining = list(inst.items)
    # nxt[p]: first sorted position >= p whose item still has mass
    nxt = list(range(n + 1))

    def find(p):
        root = p
        while nxt[root] != root:
            root = nxt[root]
        while nxt[p] != root:
            nxt[p], p = root, nxt[p]
        return root

    parts: List[Part] = []
    for i in efficiency_order(inst, active):
        d = inst.bins[i].demand
        load = Fraction(0)
        pos = find(bisect_left(neg_sizes, -d))
        while load < d and pos < n:
            j = order[pos]
            rest = remaining[j]
            if load + rest <= d:
                parts.append(Part(j, i, rest))
                load += rest
                remaining[j] = Fraction(0)
                nxt[pos] = pos + 1
                pos = find(pos)
            else:
                amount = d - load
                parts.append(Part(j, i, amount))
                remaining[j] -= amount
                load = d
    return FractionalAssignment(tuple(parts))


def modified_profit(inst: Instance, f) -> Fraction:
    """``sum_i p_i * min(load_i / d_i, 1)`` for a fractional or integral solution."""
    if isinstance(f, FractionalAssignment):
        problems = fractional_violations(inst, f)
        if problems:
            raise ContractError("invalid fractional assignment: " + "; ".join(problems))
        load = f.bin_load()
    else:
        sets = f.assignment.sets if isinstance(f, Stage) else f.sets
        load = {i: sum((inst.items[j] for j in items), Fraction(0))
                for i, items in sets.items()}
    total = Fraction(0)
    for i, amount in load.items():
        b = inst.bins[i]
        total += b.profit * min(amount / b.demand, Fraction(1))
    return total


class StageKind(enum.Enum):
    RAW = "raw"
    MERGED = "merged"
    MAXIMAL = "maximal"


@dataclass(frozen=True)
class Stage:
    kind: StageKind
    assignment: Assignment

    def loads(self, inst: Instance) -> Dict[int, Fraction]:
        return {i: sum((inst.items[j] for j in items), Fraction(0))
                for i, items in self.assignment.sets.items()}


def merge_splits(inst: Instance, f: FractionalAssignment) -> Stage:
    """Reassemble every item on the bin that received its first part.

    In a greedy output an item is split only by the part that completes a
    bin, so each bin holds at most one such first part and the merged load
    stays below twice the demand. Mass that was never placed is treated as a
    part on a virtual overflow bin, i.e. the item is merged whole as well.
    """
    load = f.bin_load()
    last_part_of_bin: Dict[int, int] = {}
    first_part: Dict[int, int] = {}
    for k, p in enumerate(f.parts):
        if p.amount <= 0:
            continue
        last_part_of_bin[p.bin] = k
        first_part.setdefault(p.item, k)

    seen_split_first = set()
    sets: Dict[int, List[int]] = {}
    for j, k in sorted(first_part.items()):
        p = f.parts[k]
        if p.amount != inst.items[j]:
            bin_full = load[p.bin] == inst.bins[p.bin].demand
            if not bin_full or last_part_of_bin[p.bin] != k:
                raise ContractError(
                    f"item {j} is split but its first part does not complete bin {p.bin}")
            if p.bin in seen_split_first:
                raise ContractError(f"bin {p.bin} holds first parts of two split items")
            seen_split_first.add(p.bin)
        sets.setdefault(p.bin, []).append(j)
    return Stage(StageKind.MERGED, Assignment(sets))


def maximalize(inst: Instance, s: Stage) -> Stage:
    """Let partially filled bins pull admissible items from less efficient ones.

    Partially filled bins are visited by non-increasing efficiency (ties by
    index); each pulls the largest admissible items held by partially filled
    bins later in that order until it is covered or none remain.
    """
    loads = s.loads(inst)
    sets = {i: list(items) for i, items in s.assignment.sets.items()}
    partial = [i for i in efficiency_order(inst, sets)
               if 0 < loads[i] < inst.bins[i].demand]
    if len(partial) < 2:
        return Stage(StageKind.MAXIMAL, s.assignment)
    rank = {i: r for r, i in enumerate(partial)}
    owner = {}
    pool = []
    for i in partial:
        for j in sets[i]:
            owner[j] = rank[i]
            pool.append(j)
    pool.sort(key=lambda j: (-inst.items[j], j))
    neg_sizes = [-inst.items[j] for j in pool]

    for r, i in enumerate(partial):
        d = inst.bins[i].demand
        if loads[i] >= d:
            continue
        for pos in range(bisect_left(neg_sizes, -d), len(pool)):
            j = pool[pos]
            if owner[j] <= r:
                continue
            src = partial[owner[j]]
            sets[src].remove(j)
            loads[src] -= inst.items[j]
            sets[i].append(j)
            loads[i] += inst.items[j]
            owner[j] = r
            if loads[i] >= d:
                break
    return Stage(StageKind.MAXIMAL, Assignment(sets))


def maximality_violations(inst: Instance, s: Stage) -> list:
    """Pairs (earlier, later, item) of partially filled bins breaking maximality.

    "Earlier" is with respect to the efficiency order used throughout, so a
    violation-free solution is maximal in the strict-efficiency sense too.
    """
    loads = s.loads(inst)
    partial = [i for i in efficiency_order(inst, loads)
               if 0 < loads[i] < inst.bins[i].demand]
    out = []
    for a, early in enumerate(partial):
        d = inst.bins[early].demand
        for late in partial[a + 1:]:
            for j in s.assignment.sets[late]:
                if inst.items[j] <= d:
                    out.append((early, late, j))
    return out


@dataclass(frozen=True)
class ShiftResult:
    assignment: Assignment
    candidate: str
    candidates: Dict[str, Fraction] = field(default_factory=dict)


def _drop_uncovered(inst: Instance, sets: Dict[int, List[int]]) -> Assignment:
    kept = {}
    for i, items in sets.items():
        if items and sum((inst.items[j] for j in items), Fraction(0)) >= inst.bins[i].demand:
            kept[i] = items
    return Assignment(kept)


def shift_round_detailed(inst: Instance, s: Stage) -> ShiftResult:
    loads = s.loads(inst)
    sets = {i: list(items) for i, items in s.assignment.sets.items()}
    partial = [i for i in efficiency_order(inst, sets)
               if 0 < loads[i] < inst.bins[i].demand]
    if not partial:
        a = Assignment(sets)
        return ShiftResult(a, "identity", {"identity": profit(inst, a)})
    last = partial[-1]
    covered = {i: items for i, items in sets.items() if i not in set(partial)}

    everything = {last: list(range(inst.n))}
    shifted = dict(covered)
    for prev, cur in zip(partial, partial[1:]):
        shifted[prev] = sets[cur]
    pooled = dict(covered)
    pooled[last] = [j for i in partial for j in sets[i]]

    options = [("shift", shifted), ("all_on_last", everything), ("pool_partial", pooled)]
    scored = []
    for name, cand in options:
        a = _drop_uncovered(inst, cand)
        scored.append((profit(inst, a), name, a))
    best = max(scored, key=lambda t: t[0])  # first wins on ties
    return ShiftResult(best[2], best[1], {name: p for p, name, _ in scored})


def shift_round(inst: Instance, s: Stage) -> Assignment:
    """Turn a maximal, split-free solution into a feasible covering.

    With R the partially filled bins in efficiency order and l the last one,
    the candidates are: every item on l; each R-bin's items moved one step up
    the order (bin l emptied); and the R-bins' items pooled on l. Covered
    bins are kept in the latter two. The most profitable candidate wins and
    every nonempty bin in it is covered.
    """
    return shift_round_detailed(inst, s).assignment


@dataclass
class Gbc5Result:
    assignment: Assignment
    profit: Fraction
    branch: str
    matching_profit: Fraction
    fractional_profit: Fraction
    raw: FractionalAssignment
    merged: Stage
    maximal: Stage
    raw_value: Fraction
    merged_value: Fraction
    maximal_value: Fraction
    shift_candidate: str
    active_bins: Tuple[int, ...]

    def chain_holds(self) -> bool:
        return (self.raw_value <= 2 * self.maximal_value
                and self.maximal_value <= 2 * self.fractional_profit)


def gbc5_detailed(inst: Instance, check: bool = True) -> Gbc5Result:
    """Run both branches. With ``check`` the chain bounds, maximality and
    coverage of the result are verified and :class:`InvariantError` raised on
    failure."""
    if inst.supply is not Supply.UNIT:
        raise UsageError("gbc5 works on unit-supply instances")
    match_assignment, match_profit = singular_branch(inst)

    # a bin that all items together cannot cover never earns anything
    total = inst.total_size
    active = tuple(i for i, b in enumerate(inst.bins) if b.demand <= total)
    raw = alg_star(inst, active)
    merged = merge_splits(inst, raw)
    maximal = maximalize(inst, merged)
    shifted = shift_round_detailed(inst, maximal)
    frac_assignment = shifted.assignment
    frac_profit = profit(inst, frac_assignment)

    result = Gbc5Result(
        assignment=frac_assignment, profit=frac_profit, branch="fractional",
        matching_profit=match_profit, fractional_profit=frac_profit,
        raw=raw, merged=merged, maximal=maximal,
        raw_value=modified_profit(inst, raw),
        merged_value=modified_profit(inst, merged),
        maximal_value=modified_profit(inst, maximal),
        shift_candidate=shifted.candidate, active_bins=active)
    if match_profit > frac_profit:
        result.assignment, result.profit, result.branch = (
            match_assignment, match_profit, "matching")

    if not check:
        return result
    if not result.chain_holds():
        raise InvariantError(
            f"transformation chain broken: raw {result.raw_value}, "
            f"maximal {result.maximal_value}, final {frac_profit}")
    if maximality_violations(inst, maximal):
        raise InvariantError("maximalize produced a non-maximal solution")
    for i, items in frac_assignment.sets.items():
        if sum((inst.items[j] for j in items), Fraction(0)) < inst.bins[i].demand:
            raise InvariantError(f"bin {i} is nonempty but not covered")
    return result


def gbc5(inst: Instance) -> Tuple[Assignment, Fraction]:
    """Better of the matching branch and the fractional branch."""
    r = gbc5_detailed(inst)
    return r.assignment, r.profit
