"""Exact rational simplex (two phases, Bland's rule) with a dual certificate.

Problems are stated as ``max c.x`` subject to rows ``a.x (<=|>=|=) b`` and
bounds ``lb <= x <= ub`` (``lb`` finite, ``ub`` optional). Everything is a
:class:`~fractions.Fraction`, so optimality is checked by exact equality of
the primal and dual objectives rather than by tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .core import BinCoverError, Instance, Supply, UsageError

LE, GE, EQ = "<=", ">=", "="

ZERO = Fraction(0)
ONE = Fraction(1)


class LpError(BinCoverError, RuntimeError):
    """Infeasible or unbounded LP, or a failed optimality certificate."""


@dataclass
class LpProblem:
    objective: List[Fraction]
    rows: List[Tuple[Dict[int, Fraction], str, Fraction]] = field(default_factory=list)
    lower: Optional[List[Fraction]] = None
    upper: Optional[List[Optional[Fraction]]] = None
    names: Optional[List[str]] = None

    def __post_init__(self):
        nvar = len(self.objective)
        self.objective = [Fraction(c) for c in self.objective]
        if self.lower is None:
            self.lower = [ZERO] * nvar
        if self.upper is None:
            self.upper = [None] * nvar
        if len(self.lower) != nvar or len(self.upper) != nvar:
            raise ValueError("bound vectors must match the number of variables")
        for coeffs, sense, _ in self.rows:
            if sense not in (LE, GE, EQ):
                raise ValueError(f"unknown row sense {sense!r}")
            if any(not 0 <= k < nvar for k in coeffs):
                raise ValueError("row refers to a missing variable")

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add_row(self, coeffs: Dict[int, Fraction], sense: str, rhs) -> int:
        self.rows.append(({k: Fraction(v) for k, v in coeffs.items() if v != 0},
                          sense, Fraction(rhs)))
        return len(self.rows) - 1


@dataclass(frozen=True)
class LpSolution:
    values: Tuple[Fraction, ...]
    objective: Fraction
    basis: Tuple[int, ...]            # basic structural variables
    row_duals: Tuple[Fraction, ...]   # one per problem row
    upper_duals: Tuple[Fraction, ...]  # one per variable (0 without an upper bound)

    def fractional_count(self) -> int:
        return sum(1 for v in self.values if v.denominator != 1)


def _pivot(tab, basis, r, c):
    prow = tab[r]
    pv = prow[c]
    if pv != 1:
        inv = 1 / pv
        for k, v in enumerate(prow):
            if v:
                prow[k] = v * inv
    nz = [k for k, v in enumerate(prow) if v]
    for rr, row in enumerate(tab):
        if rr == r:
            continue
        f = row[c]
        if f:
            for k in nz:
                row[k] -= f * prow[k]
    basis[r] = c


def _simplex(tab, basis, allowed):
    """Maximize the objective held in the last row (as reduced costs)."""
    obj = tab[-1]
    nrows = len(tab) - 1
    while True:
        enter = next((c for c in allowed if obj[c] > 0), None)
        if enter is None:
            return
        best = None
        for r in range(nrows):
            a = tab[r][enter]
            if a > 0:
                ratio = tab[r][-1] / a
                key = (ratio, basis[r])
                if best is None or key < best[0]:
                    best = (key, r)
        if best is None:
            raise LpError("LP is unbounded")
        _pivot(tab, basis, best[1], enter)


def lp_solve(p: LpProblem) -> LpSolution:
    """Solve ``p`` to optimality; raises :class:`LpError` if none exists."""
    nvar = p.num_vars
    lower = p.lower
    # standard-form rows over shifted variables x' = x - lb >= 0
    srows = []  # (coeffs, sense, rhs, origin) ; origin = ("row", r) or ("ub", j)
    for r, (coeffs, sense, rhs) in enumerate(p.rows):
        shift = sum((v * lower[k] for k, v in coeffs.items()), ZERO)
        srows.append((coeffs, sense, rhs - shift, ("row", r)))
    for j, ub in enumerate(p.upper):
        if ub is not None:
            if ub < lower[j]:
                raise LpError(f"variable {j} has upper bound below its lower bound")
            srows.append(({j: ONE}, LE, ub - lower[j], ("ub", j)))

    nrows = len(srows)
    signs = []
    for coeffs, sense, rhs, _ in srows:
        signs.append(-1 if rhs < 0 else 1)
    # column layout: structurals | slack/surplus per row | artificials
    ncols_slack = nrows
    art_of_row = {}
    art_cols = []
    for r, (coeffs, sense, rhs, _) in enumerate(srows):
        eff = sense
        if signs[r] < 0 and sense != EQ:
            eff = GE if sense == LE else LE
        if eff != LE:
            art_of_row[r] = nvar + ncols_slack + len(art_cols)
            art_cols.append(r)
    width = nvar + ncols_slack + len(art_cols)

    tab = []
    basis = []
    for r, (coeffs, sense, rhs, _) in enumerate(srows):
        sg = signs[r]
        row = [ZERO] * (width + 1)
        for k, v in coeffs.items():
            row[k] = sg * v
        if sense == LE:
            row[nvar + r] = Fraction(sg)
        elif sense == GE:
            row[nvar + r] = Fraction(-sg)
        # EQ rows keep a zero slack column so the layout stays uniform
        row[-1] = sg * rhs
        if r in art_of_row:
            row[art_of_row[r]] = ONE
            basis.append(art_of_row[r])
        else:
            basis.append(nvar + r)
        tab.append(row)

    eq_slack = {nvar + r for r, row in enumerate(srows) if row[1] == EQ}
    usable = [c for c in range(nvar + ncols_slack) if c not in eq_slack]

    if art_cols:
        # phase 1: maximize -sum(artificials)
        obj = [ZERO] * (width + 1)
        for r in art_cols:
            for k in range(width + 1):
                obj[k] += tab[r][k]
        for r in art_cols:
            obj[art_of_row[r]] = ZERO
        tab.append(obj)
        _simplex(tab, basis, usable)
        if tab[-1][-1] != 0:
            raise LpError("LP is infeasible")
        tab.pop()
        # drive remaining (zero-valued) artificials out of the basis
        art_set = set(art_of_row.values())
        r = 0
        while r < len(tab):
            if basis[r] in art_set:
                col = next((c for c in usable if tab[r][c] != 0), None)
                if col is not None:
                    _pivot(tab, basis, r, col)
                # a row with no usable nonzero is redundant; it stays with its
                # artificial basic at zero, which never leaves (not allowed to enter)
            r += 1

    # phase 2 objective row: reduced costs c_j - c_B B^-1 A_j, value -z in rhs
    cost = [ZERO] * (width + 1)
    for j in range(nvar):
        cost[j] = p.objective[j]
    obj = cost[:]
    for r, b in enumerate(basis):
        cb = cost[b]
        if cb:
            row = tab[r]
            for k in range(width + 1):
                if row[k]:
                    obj[k] -= cb * row[k]
    tab.append(obj)
    _simplex(tab, basis, usable)
    obj = tab.pop()

    shifted = [ZERO] * nvar
    for r, b in enumerate(basis):
        if b < nvar:
            shifted[b] = tab[r][-1]
    values = tuple(shifted[j] + lower[j] for j in range(nvar))
    objective = sum((p.objective[j] * values[j] for j in range(nvar)), ZERO)

    # duals of standard-form rows from the identity columns
    sduals = []
    for r in range(nrows):
        col = art_of_row.get(r, nvar + r)
        sduals.append(-obj[col] * signs[r])
    row_duals = [ZERO] * len(p.rows)
    upper_duals = [ZERO] * nvar
    for r, (_, _, _, origin) in enumerate(srows):
        kind, idx = origin
        if kind == "row":
            row_duals[idx] = sduals[r]
        else:
            upper_duals[idx] = sduals[r]
    basic = tuple(sorted(b for b in basis if b < nvar))
    sol = LpSolution(values, objective, basic, tuple(row_duals), tuple(upper_duals))
    problems = certificate_violations(p, sol)
    if problems:
        raise LpError("optimality certificate failed: " + "; ".join(problems))
    return sol


def certificate_violations(p: LpProblem, sol: LpSolution) -> List[str]:
    """Check primal feasibility, dual feasibility and equal objectives exactly."""
    out = []
    x = sol.values
    for j in range(p.num_vars):
        if x[j] < p.lower[j]:
            out.append(f"x{j} below its lower bound")
        if p.upper[j] is not None and x[j] > p.upper[j]:
            out.append(f"x{j} above its upper bound")
    for r, (coeffs, sense, rhs) in enumerate(p.rows):
        lhs = sum((v * x[k] for k, v in coeffs.items()), ZERO)
        if (sense == LE and lhs > rhs) or (sense == GE and lhs < rhs) or (
                sense == EQ and lhs != rhs):
            out.append(f"row {r} violated")
        pi = sol.row_duals[r]
        if (sense == LE and pi < 0) or (sense == GE and pi > 0):
            out.append(f"dual of row {r} has the wrong sign")
    reduced = list(p.objective)
    for r, (coeffs, _, _) in enumerate(p.rows):
        pi = sol.row_duals[r]
        if pi:
            for k, v in coeffs.items():
                reduced[k] -= pi * v
    for j in range(p.num_vars):
        mu = sol.upper_duals[j]
        if mu < 0:
            out.append(f"upper-bound dual of x{j} is negative")
        if mu and p.upper[j] is None:
            out.append(f"x{j} has no upper bound but a nonzero bound dual")
        reduced[j] -= mu
        if reduced[j] > 0:
            out.append(f"reduced cost of x{j} is positive")
    primal = sum((c * v for c, v in zip(p.objective, x)), ZERO)
    dual = sum((sol.row_duals[r] * rhs for r, (_, _, rhs) in enumerate(p.rows)), ZERO)
    dual += sum((sol.upper_duals[j] * p.upper[j] for j in range(p.num_vars)
                 if p.upper[j] is not None), ZERO)
    dual += sum((reduced[j] * p.lower[j] for j in range(p.num_vars)), ZERO)
    if primal != sol.objective:
        out.append("reported objective differs from c.x")
    if primal != dual:
        out.append(f"primal {primal} != dual {dual}")
    return out


def dual_objective(p: LpProblem, sol: LpSolution) -> Fraction:
    reduced = list(p.objective)
    for r, (coeffs, _, _) in enumerate(p.rows):
        for k, v in coeffs.items():
            reduced[k] -= sol.row_duals[r] * v
    total = sum((sol.row_duals[r] * rhs for r, (_, _, rhs) in enumerate(p.rows)), ZERO)
    for j in range(p.num_vars):
        reduced[j] -= sol.upper_duals[j]
        if p.upper[j] is not None:
            total += sol.upper_duals[j] * p.upper[j]
        total += reduced[j] * p.lower[j]
    return total


@dataclass
class Lp1:
    problem: LpProblem
    y: List[int]                          # variable index of y_i
    x: Dict[Tuple[int, int], int]         # (item, bin) -> variable index


def build_lp1(inst: Instance) -> Lp1:
    """Splittable relaxation: max sum p_i y_i, y_i d_i <= sum_j x_ji,
    sum_i x_ji <= s_j, y_i <= 1, with x only on admissible pairs."""
    if inst.supply is not Supply.UNIT:
        raise UsageError("the splittable LP is defined for unit supply")
    obj = [b.profit for b in inst.bins]
    y = list(range(inst.m))
    x = {}
    for i, b in enumerate(inst.bins):
        for j, s in enumerate(inst.items):
            if s <= b.demand:
                x[j, i] = len(obj)
                obj.append(ZERO)
    upper = [ONE] * inst.m + [None] * len(x)
    p = LpProblem(obj, upper=upper)
    for i, b in enumerate(inst.bins):
        coeffs = {y[i]: b.demand}
        for j in range(inst.n):
            if (j, i) in x:
                coeffs[x[j, i]] = -ONE
        p.add_row(coeffs, LE, 0)
    for j, s in enumerate(inst.items):
        coeffs = {x[j, i]: ONE for i in range(inst.m) if (j, i) in x}
        if coeffs:
            p.add_row(coeffs, LE, s)
    return Lp1(p, y, x)
