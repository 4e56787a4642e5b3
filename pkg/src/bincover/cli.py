"""``bincover`` command line: solve, gen, bench.

Exit codes: 0 success, 2 bad input or usage, 3 refusal (oracle cap or
configuration budget exceeded).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from fractions import Fraction

from . import __version__
from .aptas import DEFAULT_BUDGET, AptasParams, aptas_detailed
from .approx import gbc5_detailed
from .bench import (ALGORITHMS, FAMILIES, BenchRun, execute, max_ratios,
                    parse_grid, write_csv)
from .core import (BinCoverError, ProblemClass, Refusal, Supply, UsageError,
                   format_rat, profit)
from .exact import exact_opt_infinite_witness, exact_opt_unit
from .generators import (RandomSpec, gen_example1, gen_partition_reduction,
                         gen_random)
from .io import read_instance, serialize_instance, solution_dict
from .nfd import nfd, well_covered_census

EXIT_OK, EXIT_INPUT, EXIT_REFUSED = 0, 2, 3

log = logging.getLogger("bincover")


def _rat(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None


def _sets_json(assignment):
    out = []
    for key in sorted(assignment.sets, key=lambda k: k if isinstance(k, tuple) else (k,)):
        rec = {"bin": key[0], "copy": key[1]} if isinstance(key, tuple) else {"bin": key}
        rec["items"] = sorted(assignment.sets[key])
        out.append(rec)
    return out


def _solve(args) -> dict:
    inst = read_instance(args.input)
    instance_id = args.id or args.input
    extra = {}
    start = time.perf_counter_ns()
    if args.alg == "nfd":
        assignment, trace = nfd(inst)
        elapsed = time.perf_counter_ns() - start
        value = profit(inst, assignment)
        if args.trace:
            census = well_covered_census(inst, trace)
            extra["trace"] = {
                "bin_order": list(trace.bin_order),
                "item_order": list(trace.item_order),
                "outcomes": [None if o is None else list(o) for o in trace.outcomes],
                "fills": [format_rat(u) for u in trace.fills],
                "unassigned_from": trace.next_item,
                "well_covered": census.well_covered,
                "head": census.head,
            }
    elif args.alg == "gbc5":
        r = gbc5_detailed(inst)
        elapsed = time.perf_counter_ns() - start
        assignment, value = r.assignment, r.profit
        extra["branch"] = r.branch
        if args.dump_stages:
            extra["stages"] = {
                "raw": {"parts": [{"item": p.item, "bin": p.bin, "amount": format_rat(p.amount)}
                                  for p in r.raw.parts],
                        "modified_profit": format_rat(r.raw_value)},
                "merged": {"bins": _sets_json(r.merged.assignment),
                           "modified_profit": format_rat(r.merged_value)},
                "maximal": {"bins": _sets_json(r.maximal.assignment),
                            "modified_profit": format_rat(r.maximal_value)},
                "final": {"profit": format_rat(r.fractional_profit),
                          "candidate": r.shift_candidate},
                "matching_profit": format_rat(r.matching_profit),
            }
    elif args.alg == "aptas":
        params = AptasParams(eps=args.eps if args.eps is not None else Fraction(1, 10),
                             k=args.k, budget=args.budget)
        r = aptas_detailed(inst, params)
        elapsed = time.perf_counter_ns() - start
        assignment, value = r.assignment, r.profit
        extra["stats"] = {k: (format_rat(v) if isinstance(v, Fraction) else v)
                          for k, v in r.stats.items()}
    else:
        if inst.supply is Supply.UNIT:
            value, assignment = exact_opt_unit(inst)
        else:
            value, assignment = exact_opt_infinite_witness(inst)
        elapsed = time.perf_counter_ns() - start
    return solution_dict(instance_id, args.alg, value, assignment, elapsed, **extra)


def cmd_solve(args) -> int:
    record = _solve(args)
    text = json.dumps(record, indent=2) + "\n"
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def parse_params(text: str) -> dict:
    """``sizes=1,2,3;m=4`` -> {"sizes": "1,2,3", "m": "4"}."""
    out = {}
    for part in (text or "").split(";"):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"bad parameter {part!r}; expected key=value")
        out[key.strip()] = value.strip()
    return out


def _int(params, key, default=None):
    if key not in params:
        if default is None:
            raise UsageError(f"missing parameter {key}")
        return default
    try:
        return int(params[key])
    except ValueError:
        raise UsageError(f"parameter {key} must be an integer") from None


def build_generated(family: str, params: dict, seed: int):
    if family == "example1":
        try:
            eps = Fraction(params.get("eps", "1/10"))
        except (ValueError, ZeroDivisionError):
            raise UsageError("eps must be a rational number") from None
        return gen_example1(eps)
    if family == "partition":
        if "sizes" not in params:
            raise UsageError("partition needs sizes=a,b,c")
        try:
            sizes = [int(x) for x in params["sizes"].split(",")]
        except ValueError:
            raise UsageError("sizes must be integers") from None
        return gen_partition_reduction(sizes, _int(params, "m"))
    if family == "uniform":
        supply = Supply(params.get("mode", "unit"))
        cls = ProblemClass(params.get("class", "variable"))
        spec = RandomSpec(_int(params, "n", 6), _int(params, "m", 3), supply, cls,
                          denominator=_int(params, "den", 4), seed=seed)
        return gen_random(spec)
    raise UsageError(f"unknown family {family!r}; choose from example1, partition, uniform")


def cmd_gen(args) -> int:
    inst = build_generated(args.family, parse_params(args.params), args.seed)
    text = serialize_instance(inst)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_bench(args) -> int:
    algs = tuple(a.strip() for a in args.algs.split(",") if a.strip())
    for a in algs:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}")
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    if args.trials < 0:
        raise UsageError("trials must be non-negative")
    aptas_params = None
    if "aptas" in algs:
        aptas_params = AptasParams(eps=args.eps if args.eps is not None else Fraction(1, 10),
                                   k=args.k, budget=args.budget)
    run = BenchRun(algs, args.family, parse_grid(args.grid), args.trials, args.seed,
                   args.oracle == "exact", aptas_params)
    reports, refused = execute(run, args.jobs)
    if refused:
        log.warning("oracle refused %d instance(s); their rows carry oracle=NA", refused)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(reports, fh)
    else:
        write_csv(reports, sys.stdout)
    summary = max_ratios(reports)
    for alg in algs:
        best = summary.get(alg)
        shown = "NA" if best is None else f"{format_rat(best)} ({float(best):.4f})"
        print(f"max ratio {alg}: {shown}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bincover",
                                 description="Generalized bin covering solvers and benchmarks.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("--alg", required=True, choices=["nfd", "gbc5", "aptas", "exact"])
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.add_argument("--id", help="instance id written to the JSON (default: input path)")
    s.add_argument("--trace", action="store_true", help="nfd: include the run trace")
    s.add_argument("--dump-stages", action="store_true",
                   help="gbc5: include the intermediate solutions")
    s.add_argument("--eps", type=_rat, help="aptas: accuracy parameter (default 1/10)")
    s.add_argument("--k", type=int, help="aptas: number of size groups (overrides eps)")
    s.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="aptas: maximum number of configurations")
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("gen", help="write a generated instance")
    g.add_argument("--family", required=True)
    g.add_argument("--params", default="", help="e.g. 'eps=1/10' or 'sizes=1,2,3;m=4'")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="ratio benchmark over a seeded grid")
    b.add_argument("--algs", default="nfd,gbc5")
    b.add_argument("--family", default="uniform")
    b.add_argument("--grid", default="n=4..8,m=2..4")
    b.add_argument("--trials", type=int, default=10)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--oracle", choices=["exact", "none"], default="exact")
    b.add_argument("--out")
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--eps", type=_rat)
    b.add_argument("--k", type=int)
    b.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    b.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (BinCoverError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
