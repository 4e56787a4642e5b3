"""Domain model for generalized bin covering.

All numeric quantities are :class:`fractions.Fraction` values, so every
comparison made by the algorithms (coverage tests, ratio checks, tie cases in
the hardness gadgets) is exact.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence, Tuple, Union

Rat = Fraction

# Unit supply bins are keyed by their index; infinite supply bins by
# (type index, copy number).
BinKey = Union[int, Tuple[int, int]]


class Supply(enum.Enum):
    UNIT = "unit"
    INFINITE = "infinite"


class ProblemClass(enum.Enum):
    GENERALIZED = "generalized"
    VARIABLE = "variable"


class BinCoverError(Exception):
    """Base class for library errors."""


class ValidationError(BinCoverError, ValueError):
    def __init__(self, message: str, violations: Sequence["Violation"] = ()):
        super().__init__(message)
        self.violations = list(violations)


class UsageError(BinCoverError, ValueError):
    """An algorithm was called on an instance outside its problem class."""


class Refusal(BinCoverError):
    """A configured cap or budget would be exceeded; nothing was approximated."""


def as_rat(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted; pass an int, str or Fraction")
    return Fraction(value)


def format_rat(value: Fraction) -> str:
    """``num/den`` form used in CSV and JSON output (always with a slash)."""
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class BinType:
    profit: Fraction
    demand: Fraction

    def __post_init__(self):
        object.__setattr__(self, "profit", as_rat(self.profit))
        object.__setattr__(self, "demand", as_rat(self.demand))

    @property
    def efficiency(self) -> Fraction:
        return self.profit / self.demand


@dataclass(frozen=True)
class Instance:
    supply: Supply
    bins: Tuple[BinType, ...]
    items: Tuple[Fraction, ...]
    problem_class: ProblemClass = ProblemClass.GENERALIZED

    def __post_init__(self):
        bins = tuple(b if isinstance(b, BinType) else BinType(*b) for b in self.bins)
        items = tuple(as_rat(s) for s in self.items)
        object.__setattr__(self, "bins", bins)
        object.__setattr__(self, "items", items)
        if not bins:
            raise ValidationError("an instance needs at least one bin")
        for i, b in enumerate(bins):
            if b.demand <= 0:
                raise ValidationError(f"bin {i}: demand must be positive, got {b.demand}")
            if b.profit < 0:
                raise ValidationError(f"bin {i}: profit must be non-negative, got {b.profit}")
            if self.problem_class is ProblemClass.VARIABLE and b.profit != b.demand:
                raise ValidationError(
                    f"bin {i}: variable-sized instances need profit == demand")
        for j, s in enumerate(items):
            if s <= 0:
                raise ValidationError(f"item {j}: size must be positive, got {s}")

    @classmethod
    def variable(cls, demands: Iterable, items: Iterable,
                 supply: Supply = Supply.UNIT) -> "Instance":
        """Variable-sized instance (profit equals demand for every bin)."""
        ds = [as_rat(d) for d in demands]
        return cls(supply, tuple(BinType(d, d) for d in ds), tuple(items),
                   ProblemClass.VARIABLE)

    @classmethod
    def generalized(cls, bins: Iterable, items: Iterable,
                    supply: Supply = Supply.UNIT) -> "Instance":
        """Generalized instance from ``(profit, demand)`` pairs."""
        return cls(supply, tuple(BinType(p, d) for p, d in bins), tuple(items),
                   ProblemClass.GENERALIZED)

    @property
    def m(self) -> int:
        return len(self.bins)

    @property
    def n(self) -> int:
        return len(self.items)

    @property
    def total_size(self) -> Fraction:
        return sum(self.items, Fraction(0))

    def demands(self) -> list:
        return [b.demand for b in self.bins]

    def profits(self) -> list:
        return [b.profit for b in self.bins]


@dataclass(frozen=True)
class Violation:
    code: str
    index: object
    message: str = ""

    def __str__(self):
        return f"{self.code}({self.index})"


def DuplicateItem(j) -> Violation:
    return Violation("DuplicateItem", j, f"item {j} is assigned to more than one bin")


def BadItem(j) -> Violation:
    return Violation("BadItem", j, f"item index {j} is out of range")


def BadBin(i) -> Violation:
    return Violation("BadBin", i, f"bin {i} does not exist in this instance")


@dataclass(frozen=True)
class Assignment:
    """Item-index sets per bin. Bins not mentioned are empty."""

    sets: Mapping = field(default_factory=dict)

    def __post_init__(self):
        frozen = {k: tuple(v) for k, v in dict(self.sets).items() if len(v)}
        object.__setattr__(self, "sets", MappingProxyType(frozen))

    def __eq__(self, other):
        return isinstance(other, Assignment) and dict(self.sets) == dict(other.sets)

    def __hash__(self):
        return hash(frozenset(self.sets.items()))

    def items_of(self, key: BinKey) -> tuple:
        return self.sets.get(key, ())

    def assigned_items(self) -> set:
        return {j for items in self.sets.values() for j in items}

    def __iter__(self):
        return iter(self.sets.items())

    def __len__(self):
        return len(self.sets)


def _bin_type(inst: Instance, key) -> int | None:
    n = inst.n
    if inst.supply is Supply.UNIT:
        if isinstance(key, bool) or not isinstance(key, int):
            return None
        return key if 0 <= key < inst.m else None
    if not (isinstance(key, tuple) and len(key) == 2):
        return None
    t, c = key
    if not (isinstance(t, int) and isinstance(c, int)):
        return None
    # n copies per type suffice for any infinite-supply solution
    if 0 <= t < inst.m and 0 <= c < max(n, 1):
        return t
    return None


def validate(inst: Instance, a: Assignment) -> list:
    """List structural problems of ``a``; empty iff it is a valid assignment."""
    out = []
    seen = set()
    reported = set()
    for key, items in a.sets.items():
        if _bin_type(inst, key) is None:
            out.append(BadBin(key))
        for j in items:
            if isinstance(j, bool) or not isinstance(j, int) or not 0 <= j < inst.n:
                out.append(BadItem(j))
            elif j in seen:
                if j not in reported:
                    out.append(DuplicateItem(j))
                    reported.add(j)
            else:
                seen.add(j)
    return out


def check(inst: Instance, a: Assignment) -> None:
    problems = validate(inst, a)
    if problems:
        raise ValidationError(
            "invalid assignment: " + ", ".join(str(v) for v in problems), problems)


def fill(inst: Instance, items: Iterable[int]) -> Fraction:
    sizes = inst.items
    return sum((sizes[j] for j in items), Fraction(0))


def is_covered(inst: Instance, key: BinKey, items: Iterable[int]) -> bool:
    return fill(inst, items) >= inst.bins[_bin_type(inst, key)].demand


def profit(inst: Instance, a: Assignment) -> Fraction:
    """Sum of profits of the bins whose assigned size reaches their demand."""
    check(inst, a)
    total = Fraction(0)
    for key, items in a.sets.items():
        b = inst.bins[_bin_type(inst, key)]
        if fill(inst, items) >= b.demand:
            total += b.profit
    return total


def covered_bins(inst: Instance, a: Assignment) -> list:
    return [k for k, items in a.sets.items() if is_covered(inst, k, items)]


@dataclass(frozen=True)
class RatioReport:
    instance_id: str
    algorithm: str
    profit: Fraction
    oracle: Fraction | None = None
    wall_ns: int = 0
    family: str = ""
    params: str = ""

    @property
    def ratio(self) -> Fraction | None:
        if self.oracle is None or self.profit <= 0:
            return None
        return self.oracle / self.profit


def common_denominator(values: Iterable[Fraction]) -> int:
    lcm = 1
    for v in values:
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    return lcm


def scaled_ints(values: Sequence[Fraction], scale: int) -> list:
    return [v.numerator * (scale // v.denominator) for v in values]
