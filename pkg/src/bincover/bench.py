"""Ratio benchmarks: run algorithms over seeded instance grids, compare with
the exact oracle, write one CSV row per (instance, algorithm)."""

from __future__ import annotations

import csv
import hashlib
import itertools
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .aptas import AptasParams, aptas_solve
from .approx import gbc5
from .core import (Instance, ProblemClass, RatioReport, Refusal, Supply,
                   UsageError, format_rat)
from .exact import exact_opt_infinite, exact_opt_unit
from .generators import (RandomSpec, gen_partition_reduction, gen_random,
                         random_partition_sizes)
from .nfd import nfd_profit

log = logging.getLogger(__name__)

COLUMNS = ["instance_id", "family", "params", "algorithm", "profit", "oracle",
           "ratio", "wall_ns"]

FAMILIES = ("uniform", "generalized", "infinite", "partition")
ALGORITHMS = ("nfd", "gbc5", "aptas", "exact")


def parse_grid(text: str) -> Dict[str, List[int]]:
    """``n=4..8,m=2..4`` or ``n=3|5|7`` -> {"n": [...], "m": [...]}."""
    grid: Dict[str, List[int]] = {}
    if not text.strip():
        return grid
    for part in text.split(","):
        key, sep, value = part.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"bad grid entry {part!r}; expected key=a..b")
        try:
            if ".." in value:
                lo, hi = value.split("..", 1)
                values = list(range(int(lo), int(hi) + 1))
            else:
                values = [int(v) for v in value.split("|")]
        except ValueError:
            raise UsageError(f"bad grid values in {part!r}") from None
        if not values:
            raise UsageError(f"empty range in {part!r}")
        grid[key] = values
    return grid


def trial_seed(seed: int, family: str, params: str, trial: int) -> int:
    digest = hashlib.sha256(f"{seed}:{family}:{params}:{trial}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def make_instance(family: str, point: Dict[str, int], seed: int) -> Instance:
    n = point.get("n", 6)
    m = point.get("m", 3)
    if family == "uniform":
        return gen_random(RandomSpec(n, m, seed=seed))
    if family == "generalized":
        return gen_random(RandomSpec(n, m, problem_class=ProblemClass.GENERALIZED,
                                     seed=seed))
    if family == "infinite":
        return gen_random(RandomSpec(n, m, supply=Supply.INFINITE, seed=seed))
    if family == "partition":
        rng = random.Random(seed)
        sizes = random_partition_sizes(rng, max(n, 1), rng.random() < 0.5)
        return gen_partition_reduction(sizes, max(m, 2))
    raise UsageError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def supports(alg: str, inst: Instance) -> bool:
    if alg == "nfd":
        return inst.supply is Supply.UNIT and inst.problem_class is ProblemClass.VARIABLE
    if alg == "gbc5":
        return inst.supply is Supply.UNIT
    if alg == "aptas":
        return inst.supply is Supply.INFINITE and inst.problem_class is ProblemClass.VARIABLE
    return alg == "exact"


def oracle_value(inst: Instance) -> Fraction:
    if inst.supply is Supply.UNIT:
        return exact_opt_unit(inst)[0]
    return exact_opt_infinite(inst)


def run_algorithm(alg: str, inst: Instance, aptas_params: Optional[AptasParams] = None
                  ) -> Fraction:
    if alg == "nfd":
        return nfd_profit(inst)
    if alg == "gbc5":
        return gbc5(inst)[1]
    if alg == "aptas":
        return aptas_solve(inst, aptas_params)[1]
    if alg == "exact":
        return oracle_value(inst)
    raise UsageError(f"unknown algorithm {alg!r}")


@dataclass(frozen=True)
class BenchRun:
    algorithms: Tuple[str, ...]
    family: str
    grid: Dict[str, List[int]]
    trials: int
    seed: int
    oracle: bool = True
    aptas_params: Optional[AptasParams] = None

    def tasks(self) -> List[Tuple[str, str, int]]:
        keys = sorted(self.grid)
        out = []
        index = 0
        for combo in itertools.product(*(self.grid[k] for k in keys)):
            params = ";".join(f"{k}={v}" for k, v in zip(keys, combo))
            for t in range(self.trials):
                out.append((f"{self.family}-{index:06d}", params,
                            trial_seed(self.seed, self.family, params, t)))
                index += 1
        return out


def _point(params: str) -> Dict[str, int]:
    return {k: int(v) for k, v in (p.split("=") for p in params.split(";") if p)}


def _run_task(run: BenchRun, task) -> Tuple[List[RatioReport], bool]:
    instance_id, params, seed = task
    inst = make_instance(run.family, _point(params), seed)
    oracle = None
    refused = False
    if run.oracle:
        try:
            oracle = oracle_value(inst)
        except Refusal:
            refused = True
    reports = []
    for alg in run.algorithms:
        if not supports(alg, inst):
            raise UsageError(f"algorithm {alg} does not apply to family {run.family}")
        start = time.perf_counter_ns()
        value = run_algorithm(alg, inst, run.aptas_params)
        elapsed = time.perf_counter_ns() - start
        reports.append(RatioReport(instance_id, alg, value, oracle, elapsed,
                                   run.family, params))
    return reports, refused


def execute(run: BenchRun, jobs: int = 1) -> Tuple[List[RatioReport], int]:
    """All reports in canonical order and the number of oracle refusals."""
    tasks = run.tasks()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, itertools.repeat(run), tasks))
    else:
        results = [_run_task(run, t) for t in tasks]
    reports = [r for batch, _ in results for r in batch]
    reports.sort(key=lambda r: (r.instance_id, r.algorithm))
    return reports, sum(1 for _, refused in results if refused)


def _cell(value: Optional[Fraction]) -> str:
    return "NA" if value is None else format_rat(value)


def write_csv(reports: Iterable[RatioReport], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in reports:
        w.writerow([r.instance_id, r.family, r.params, r.algorithm, format_rat(r.profit),
                    _cell(r.oracle), _cell(r.ratio), r.wall_ns])


def read_csv(fh) -> List[dict]:
    rows = []
    for row in csv.DictReader(fh):
        for key in ("profit", "oracle", "ratio"):
            row[key] = None if row[key] == "NA" else Fraction(row[key])
        row["wall_ns"] = int(row["wall_ns"])
        rows.append(row)
    return rows


def max_ratios(reports: Sequence[RatioReport]) -> Dict[str, Optional[Fraction]]:
    out: Dict[str, Optional[Fraction]] = {}
    for r in reports:
        cur = out.get(r.algorithm)
        ratio = r.ratio
        if ratio is not None and (cur is None or ratio > cur):
            out[r.algorithm] = ratio
        else:
            out.setdefault(r.algorithm, cur)
    return out
