"""Command-line front end.

Exit codes: 0 when every formula holds, 1 when some formula fails, 2 on
usage, parse, validation or resource errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from eslcheck.checker import ModelChecker, Verdict, check_product
from eslcheck.envmodel import EnvironmentFileError, load_environment, validate_environment
from eslcheck.formula import (
    FormulaSyntaxError, check_well_formed, free_variables, parse_formula, parse_formula_file, unparse,
)
from eslcheck.stratspace import (
    CLASSES, DEFAULT_VERTEX_CAP, ProductSystem, ProductTooLarge, build_product,
    count_agent_strategies, count_profiles, dump_product, strategy_to_json,
)

SUBCOMMANDS = ("check", "validate", "count", "oracle")
CLASS_CHOICES = ("all", "det", "unif", "unif-det")


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eslcheck", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    chk = sub.add_parser("check", help="check formulas (default command)")
    chk.add_argument("--env", required=True, help="environment JSON file")
    src = chk.add_mutually_exclusive_group(required=True)
    src.add_argument("--formula", help="formula text")
    src.add_argument("--formula-file", help="file with one formula per line")
    chk.add_argument("--class", dest="cls", choices=CLASS_CHOICES, default="unif-det")
    chk.add_argument("--format", choices=("text", "json"), default="text")
    chk.add_argument("--dump-product", metavar="PATH")
    chk.add_argument("--vertex-cap", type=int, default=DEFAULT_VERTEX_CAP)
    chk.add_argument("--stats", action="store_true")
    chk.add_argument("--complete-self-loops", action="store_true")

    val = sub.add_parser("validate", help="validate an environment file")
    val.add_argument("--env", required=True)
    val.add_argument("--complete-self-loops", action="store_true")
    val.add_argument("--format", choices=("text", "json"), default="text")

    cnt = sub.add_parser("count", help="count strategies per agent and class")
    cnt.add_argument("--env", required=True)
    cnt.add_argument("--class", dest="cls", choices=CLASS_CHOICES)
    cnt.add_argument("--complete-self-loops", action="store_true")
    cnt.add_argument("--format", choices=("text", "json"), default="text")

    orc = sub.add_parser("oracle", help="run the differential suite against the brute-force oracle")
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--cases", type=int, default=200)
    orc.add_argument("--class", dest="cls", choices=CLASS_CHOICES)
    return parser


def _load_env(path: str, complete: bool):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read environment: {exc}") from None
    try:
        return load_environment(text, complete_self_loops=complete)
    except EnvironmentFileError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _vertex_json(ps: ProductSystem, v: int) -> dict:
    prof = ps.profile(v)
    return {
        "vertex": v,
        "state": ps.env.states[ps.vertex_state[v]],
        "profile": {a: strategy_to_json(ps.env, prof[a]) for a in ps.env.agents},
        "text": ps.describe(v),
    }


def verdict_line(n: int, verdict: Verdict, ps: ProductSystem) -> str:
    if verdict.holds:
        line = f"FORMULA {n}: HOLDS"
        if verdict.witness_bindings:
            binds = " ".join(f"{x}={ps.describe(v)}" for x, v in verdict.witness_bindings.items())
            line += f" witness {binds}"
        return line
    return f"FORMULA {n}: FAILS counterexample {ps.describe(verdict.counterexample)}"


def verdict_json(n: int, formula, verdict: Verdict, ps: ProductSystem) -> dict:
    return {
        "index": n,
        "formula": unparse(formula),
        "holds": verdict.holds,
        "counterexample": None if verdict.counterexample is None else _vertex_json(ps, verdict.counterexample),
        "witness_bindings": None
        if not verdict.witness_bindings
        else {x: _vertex_json(ps, v) for x, v in verdict.witness_bindings.items()},
    }


def emit_stats(verdict: Verdict | None, fmt: str = "text"):
    """Statistics block for ``verdict``, or ``None`` when stats are disabled."""
    if verdict is None:
        return None
    stats = verdict.stats
    wall = stats.get("wall_time", stats.get("wall_seconds", stats.get("eval_seconds", 0.0)))
    block = {
        "profiles": stats["profiles"],
        "vertices": stats["vertices"],
        "edges": stats["edges"],
        "cache_hit_rate": round(stats["cache_hit_rate"], 4),
        "wall_time": round(wall, 6),
    }
    if fmt == "json":
        return block
    return (
        f"STATS profiles={block['profiles']} vertices={block['vertices']} edges={block['edges']} "
        f"cache_hit_rate={block['cache_hit_rate']:.2f} wall_time={block['wall_time']:.3f}s"
    )


def _formulas(args) -> list:
    if args.formula is not None:
        return [parse_formula(args.formula)]
    try:
        with open(args.formula_file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read formula file: {exc}") from None
    formulas = parse_formula_file(text)
    if not formulas:
        raise UsageError("formula file contains no formulas")
    return formulas


def cmd_check(args, out) -> int:
    started = time.perf_counter()
    env = _load_env(args.env, args.complete_self_loops)
    report = validate_environment(env)
    if not report.ok:
        raise UsageError(f"invalid environment:\n{report}")
    formulas = _formulas(args)
    for f in formulas:
        wf = check_well_formed(f, env)
        if not wf.ok:
            raise UsageError(f"ill-formed formula {unparse(f)}:\n{wf}")
        free = free_variables(f)
        if free:
            raise UsageError(f"free variables {{{', '.join(sorted(free))}}}: CLI accepts sentences only")

    ps = build_product(env, args.cls, vertex_cap=args.vertex_cap, check_valid=False)
    if args.dump_product:
        dump_product(ps, args.dump_product)
    mc = ModelChecker(ps)
    verdicts = [check_product(ps, f, checker=mc) for f in formulas]
    last = None
    if args.stats:
        # cache counters are shared across formulas, so the last verdict carries the totals
        last = verdicts[-1]
        last.stats["wall_time"] = time.perf_counter() - started

    if args.format == "json":
        doc = {
            "class": args.cls,
            "formulas": [verdict_json(n, f, v, ps) for n, (f, v) in enumerate(zip(formulas, verdicts), start=1)],
        }
        if last is not None:
            doc["stats"] = emit_stats(last, "json")
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        for n, v in enumerate(verdicts, start=1):
            out.write(verdict_line(n, v, ps) + "\n")
        if last is not None:
            out.write(emit_stats(last) + "\n")
    return 0 if all(v.holds for v in verdicts) else 1


def cmd_validate(args, out) -> int:
    env = _load_env(args.env, args.complete_self_loops)
    report = validate_environment(env)
    if args.format == "json":
        doc = {"ok": report.ok, "violations": [{"rule": v.rule, "detail": v.detail} for v in report.violations]}
        out.write(json.dumps(doc, indent=2) + "\n")
    else:
        out.write(str(report) + "\n")
    return 0 if report.ok else 2


def cmd_count(args, out) -> int:
    env = _load_env(args.env, args.complete_self_loops)
    classes = [args.cls] if args.cls else list(CLASS_CHOICES)
    counts = {
        "agents": {a: {c: count_agent_strategies(env, a, c) for c in classes} for a in env.agents},
        "profiles": {c: count_profiles(env, c) for c in classes},
    }
    if args.format == "json":
        out.write(json.dumps(counts, indent=2) + "\n")
    else:
        for a, row in counts["agents"].items():
            out.write(f"agent {a}: " + " ".join(f"{c}={n}" for c, n in row.items()) + "\n")
        out.write("profiles: " + " ".join(f"{c}={n}" for c, n in counts["profiles"].items()) + "\n")
    return 0


def cmd_oracle(args, out) -> int:
    from eslcheck.oracle import run_differential

    classes = [args.cls] if args.cls else list(CLASSES)
    report = run_differential(seed=args.seed, cases=args.cases, classes=classes)
    out.write(report.summary() + "\n")
    return 0 if report.ok else 1


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] not in SUBCOMMANDS and argv[0] not in ("-h", "--help"):
        argv.insert(0, "check")
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    handler = {"check": cmd_check, "validate": cmd_validate, "count": cmd_count, "oracle": cmd_oracle}[args.command]
    try:
        return handler(args, out)
    except (UsageError, FormulaSyntaxError, ProductTooLarge) as exc:
        err.write(f"eslcheck: error: {exc}\n")
        return 2


def main() -> None:
    sys.exit(run_cli())
