"""Plain-text instance format and JSON solution output.

Instance files look like::

    # comment lines start with '#'
    mode unit            # or: mode infinite
    class variable       # or: class generalized
    bins 2
    4                    # variable class: demand only (profit := demand)
    5/2 5/2              # or "<profit> <demand>"
    items 3
    1.5
    19/10
    2

Numbers may be integers, decimals or ``num/den`` rationals and are converted
to :class:`~fractions.Fraction` without rounding.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Union

from .core import (Assignment, BinCoverError, BinType, Instance, ProblemClass,
                   Supply, ValidationError, format_rat)

_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+|\d+/\d+)$")


class ParseError(BinCoverError, ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def parse_number(text: str, lineno: int = 0) -> Fraction:
    if not _NUMBER.match(text):
        raise ParseError(lineno, f"not a number: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(lineno, f"zero denominator in {text!r}") from None


def format_number(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return format_rat(value)


def parse_instance(text: Union[str, bytes]) -> Instance:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body))
    pos = 0

    def next_line(what):
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 0
            raise ParseError(last + 1, f"unexpected end of input, expected {what}")
        pos += 1
        return lines[pos - 1]

    def keyword(name, choices=None):
        lineno, body = next_line(f"'{name}'")
        parts = body.split()
        if len(parts) != 2 or parts[0] != name:
            raise ParseError(lineno, f"expected '{name} <value>', got {body!r}")
        if choices is not None and parts[1] not in choices:
            raise ParseError(lineno, f"{name} must be one of {sorted(choices)}")
        return lineno, parts[1]

    def count(name):
        lineno, value = keyword(name)
        if not value.isdigit():
            raise ParseError(lineno, f"{name} count must be a non-negative integer")
        return int(value)

    _, mode = keyword("mode", {"unit", "infinite"})
    _, cls = keyword("class", {"generalized", "variable"})
    problem_class = ProblemClass(cls)
    m = count("bins")
    if m < 1:
        raise ParseError(lines[pos - 1][0], "need at least one bin")
    bins = []
    for _ in range(m):
        lineno, body = next_line("a bin line")
        parts = body.split()
        nums = [parse_number(p, lineno) for p in parts]
        if len(nums) == 1 and problem_class is ProblemClass.VARIABLE:
            p = d = nums[0]
        elif len(nums) == 2:
            p, d = nums
        else:
            raise ParseError(lineno, f"expected '<profit> <demand>', got {body!r}")
        if d <= 0:
            raise ParseError(lineno, f"demand must be positive, got {format_number(d)}")
        if p < 0:
            raise ParseError(lineno, f"profit must be non-negative, got {format_number(p)}")
        if problem_class is ProblemClass.VARIABLE and p != d:
            raise ParseError(lineno, "class variable requires profit == demand")
        bins.append(BinType(p, d))
    n = count("items")
    items = []
    for _ in range(n):
        lineno, body = next_line("an item size")
        if len(body.split()) != 1:
            raise ParseError(lineno, f"expected a single size, got {body!r}")
        s = parse_number(body, lineno)
        if s <= 0:
            raise ParseError(lineno, f"item size must be positive, got {body}")
        items.append(s)
    if pos != len(lines):
        raise ParseError(lines[pos][0], "trailing content after the item list")
    try:
        return Instance(Supply(mode), tuple(bins), tuple(items), problem_class)
    except ValidationError as exc:  # pragma: no cover - guarded above
        raise ParseError(0, str(exc)) from exc


def serialize_instance(inst: Instance) -> str:
    out = [f"mode {inst.supply.value}", f"class {inst.problem_class.value}",
           f"bins {inst.m}"]
    for b in inst.bins:
        if inst.problem_class is ProblemClass.VARIABLE:
            out.append(format_number(b.demand))
        else:
            out.append(f"{format_number(b.profit)} {format_number(b.demand)}")
    out.append(f"items {inst.n}")
    out.extend(format_number(s) for s in inst.items)
    return "\n".join(out) + "\n"


def read_instance(path) -> Instance:
    with open(path, "rb") as fh:
        return parse_instance(fh.read())


def write_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))


def _bin_record(key, items):
    if isinstance(key, tuple):
        return {"bin": key[0], "copy": key[1], "items": sorted(items)}
    return {"bin": key, "items": sorted(items)}


def solution_dict(instance_id: str, algorithm: str, profit: Fraction,
                  assignment: Assignment, wall_ns: int, **extra) -> dict:
    keys = sorted(assignment.sets, key=lambda k: k if isinstance(k, tuple) else (k,))
    record = {
        "instance": instance_id,
        "algorithm": algorithm,
        "profit": format_rat(profit),
        "bins": [_bin_record(k, assignment.sets[k]) for k in keys],
        "wall_ns": wall_ns,
    }
    record.update(extra)
    return record


def solution_json(*args, **kwargs) -> str:
    return json.dumps(solution_dict(*args, **kwargs), indent=2)


def assignment_from_json(record: dict) -> Assignment:
    sets = {}
    for b in record["bins"]:
        key = (b["bin"], b["copy"]) if "copy" in b else b["bin"]
        sets[key] = tuple(b["items"])
    return Assignment(sets)
