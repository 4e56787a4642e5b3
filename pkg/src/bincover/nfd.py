"""Next Fit Decreasing for variable-sized bin covering with unit supply."""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Optional, Tuple

from .core import (Assignment, Instance, ProblemClass, Supply, UsageError,
                   common_denominator, scaled_ints)


@dataclass(frozen=True)
class NfdTrace:
    """What NFD did, in its own processing order.

    ``bin_order[r]`` is the original index of the r-th largest bin and
    ``outcomes[r]`` the original item indices placed on it (``None`` when the
    bin was skipped or never reached). ``fills[r]`` is the assigned size u.
    Items ``item_order[next_item:]`` stayed unassigned.
    """

    bin_order: Tuple[int, ...]
    item_order: Tuple[int, ...]
    outcomes: Tuple[Optional[Tuple[int, ...]], ...]
    fills: Tuple[Fraction, ...]
    next_item: int

    def covered_positions(self):
        return [r for r, o in enumerate(self.outcomes) if o is not None]


def _require_variable_unit(inst: Instance):
    if inst.supply is not Supply.UNIT:
        raise UsageError("NFD needs a unit-supply instance")
    if inst.problem_class is not ProblemClass.VARIABLE and any(
            b.profit != b.demand for b in inst.bins):
        raise UsageError("NFD needs a variable-sized instance (profit == demand)")


def nfd(inst: Instance) -> Tuple[Assignment, NfdTrace]:
    """Run Next Fit Decreasing.

    Bins are taken by non-increasing demand and items by non-increasing size,
    ties broken by original index. A bin is skipped when the unassigned items
    cannot cover it; otherwise it receives the shortest prefix of the
    unassigned items that covers it.
    """
    _require_variable_unit(inst)
    n, m = inst.n, inst.m
    scale = common_denominator(list(inst.items) + inst.demands())
    sizes = scaled_ints(inst.items, scale)
    demands = scaled_ints(inst.demands(), scale)

    neg_d = [-d for d in demands]
    bin_order = sorted(range(m), key=neg_d.__getitem__)
    neg_s = [-s for s in sizes]
    item_order = sorted(range(n), key=neg_s.__getitem__)
    prefix = [0]
    prefix.extend(accumulate(sizes[j] for j in item_order))
    total = prefix[-1]

    outcomes = [None] * m
    fills = [Fraction(0)] * m
    sets = {}
    j = 0
    for r, i in enumerate(bin_order):
        if j >= n:
            break
        d = demands[i]
        if total - prefix[j] < d:
            continue
        t = bisect_left(prefix, prefix[j] + d, lo=j + 1)
        chosen = tuple(item_order[j:t])
        outcomes[r] = chosen
        fills[r] = Fraction(prefix[t] - prefix[j], scale)
        sets[i] = chosen
        j = t
    trace = NfdTrace(tuple(bin_order), tuple(item_order), tuple(outcomes),
                     tuple(fills), j)
    return Assignment(sets), trace


def nfd_profit(inst: Instance) -> Fraction:
    _, trace = nfd(inst)
    return sum((inst.bins[trace.bin_order[r]].demand
                for r in trace.covered_positions()), Fraction(0))


@dataclass(frozen=True)
class Census:
    well_covered: int
    head: Optional[int]
    well_covered_bins: Tuple[int, ...] = ()


def well_covered_census(inst: Instance, trace: NfdTrace) -> Census:
    """Count well-covered bins and locate the head of the instance.

    A filled bin is well-covered when an empty bin follows it and no bin up
    to that empty bin holds more than twice its demand. The head is the last
    bin with fill above twice its demand before the first gap that follows
    the first filled, not well-covered bin. Indices returned are original bin
    indices.
    """
    order = trace.bin_order
    u = trace.fills
    d = [inst.bins[i].demand for i in order]
    m = len(order)
    filled = [u[r] > 0 for r in range(m)]

    well = []
    for r in range(m):
        if not filled[r]:
            continue
        gap = next((q for q in range(r + 1, m) if not filled[q]), None)
        if gap is None:
            continue
        if all(u[q] <= 2 * d[q] for q in range(gap + 1)):
            well.append(r)

    head = None
    well_set = set(well)
    first_bad = next((r for r in range(m) if filled[r] and r not in well_set), None)
    if first_bad is not None:
        i1 = next((q for q in range(first_bad, m - 1) if not filled[q + 1]), m - 1)
        over = [q for q in range(i1 + 1) if u[q] > 2 * d[q]]
        if over:
            head = order[over[-1]]
    return Census(len(well), head, tuple(order[r] for r in well))
