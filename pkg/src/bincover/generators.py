"""Instance generators: the tight NFD family, the Partition gadget and
seeded random instances."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence, Tuple

from .core import BinType, Instance, ProblemClass, Supply, as_rat


def gen_example1(eps) -> Instance:
    """Bins {4, 3-2e, 3-2e, 3-2e}, items {2-e x3, 1-e x3}.

    NFD covers only the demand-4 bin while an optimal solution earns 9-6e.
    """
    eps = as_rat(eps)
    if not 0 < eps < Fraction(2, 3):
        raise ValueError(f"eps must lie in (0, 2/3), got {eps}")
    demands = [Fraction(4)] + [3 - 2 * eps] * 3
    items = [2 - eps] * 3 + [1 - eps] * 3
    return Instance.variable(demands, items)


def gen_partition_reduction(partition_sizes: Sequence[int], m: int) -> Instance:
    """Variable-sized gadget encoding a Partition instance on ``m`` bins.

    Each size is scaled by ``2m``; ``s`` is the total of the scaled sizes. Two
    bins get demand ``s/2``, the other ``m-2`` bins demand 1, and ``m-2`` unit
    items are added. A yes-instance admits profit ``s+m-2``, a no-instance at
    most ``s/2+m-2``.
    """
    sizes = [int(x) for x in partition_sizes]
    if any(x <= 0 for x in sizes):
        raise ValueError("partition sizes must be positive integers")
    if not sizes:
        raise ValueError("need at least one partition size")
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    scaled = [2 * m * x for x in sizes]
    s = sum(scaled)
    demands = [Fraction(s, 2)] * 2 + [Fraction(1)] * (m - 2)
    items = scaled + [1] * (m - 2)
    return Instance.variable(demands, items)


def has_equal_partition(sizes: Sequence[int]) -> bool:
    total = sum(sizes)
    if total % 2:
        return False
    reachable = {0}
    for x in sizes:
        reachable |= {r + x for r in reachable}
    return total // 2 in reachable


def partition_bounds(sizes: Sequence[int], m: int) -> Tuple[Fraction, Fraction, Fraction]:
    """(s, yes-value s+m-2, no-bound s/2+m-2) for the gadget."""
    s = Fraction(2 * m * sum(sizes))
    return s, s + m - 2, s / 2 + m - 2


def inapproximability_ratio(sizes: Sequence[int], m: int) -> Fraction:
    s, _, no = partition_bounds(sizes, m)
    return 2 - Fraction(m - 2) / no


@dataclass(frozen=True)
class RandomSpec:
    n: int
    m: int
    supply: Supply = Supply.UNIT
    problem_class: ProblemClass = ProblemClass.VARIABLE
    demand_range: Tuple[Fraction, Fraction] = (Fraction(1, 4), Fraction(6, 4))
    size_range: Tuple[Fraction, Fraction] = (Fraction(1, 4), Fraction(6, 4))
    profit_range: Tuple[Fraction, Fraction] = (Fraction(1), Fraction(6))
    denominator: int = 4
    seed: int = 0


def _grid(lo, hi, den):
    lo, hi = as_rat(lo), as_rat(hi)
    a = -((-lo.numerator * den) // lo.denominator)  # ceil(lo * den)
    b = (hi.numerator * den) // hi.denominator      # floor(hi * den)
    a = max(a, 1)
    if a > b:
        raise ValueError(f"empty range [{lo}, {hi}] at denominator {den}")
    return a, b


def gen_random(spec: RandomSpec) -> Instance:
    """Random instance with values on the grid ``k/denominator``.

    Deterministic in ``spec.seed``. For variable-sized instances profits are
    set equal to demands; otherwise profits come from ``profit_range``.
    """
    if spec.n < 0 or spec.m < 1:
        raise ValueError("need n >= 0 and m >= 1")
    if spec.denominator < 1:
        raise ValueError("denominator must be positive")
    rng = random.Random(spec.seed & (2 ** 64 - 1))
    den = spec.denominator
    dlo, dhi = _grid(*spec.demand_range, den)
    slo, shi = _grid(*spec.size_range, den)
    demands = [Fraction(rng.randint(dlo, dhi), den) for _ in range(spec.m)]
    if spec.problem_class is ProblemClass.VARIABLE:
        bins = tuple(BinType(d, d) for d in demands)
    else:
        plo, phi = _grid(*spec.profit_range, den)
        bins = tuple(BinType(Fraction(rng.randint(plo, phi), den), d) for d in demands)
    items = tuple(Fraction(rng.randint(slo, shi), den) for _ in range(spec.n))
    return Instance(spec.supply, bins, items, spec.problem_class)


def random_partition_sizes(rng: random.Random, n: int, want_yes: bool,
                           max_size: int = 10, tries: int = 1000) -> list:
    """Draw Partition sizes whose answer matches ``want_yes``."""
    for _ in range(tries):
        sizes = [rng.randint(1, max_size) for _ in range(n)]
        if want_yes:
            total = sum(sizes)
            if total % 2:
                sizes[0] += 1
                if sizes[0] > max_size:
                    sizes[0] -= 2
                if sizes[0] < 1:
                    continue
        if has_equal_partition(sizes) == want_yes:
            return sizes
    raise RuntimeError(f"no {'yes' if want_yes else 'no'}-instance found for n={n}")


def equal_split(sizes: Sequence[int]):
    """One index set with half the total, or None."""
    total = sum(sizes)
    if total % 2:
        return None
    idx = range(len(sizes))
    for r in range(len(sizes) + 1):
        for combo in combinations(idx, r):
            if 2 * sum(sizes[i] for i in combo) == total:
                return set(combo)
    return None
