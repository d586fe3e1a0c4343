"""Command-line tool: plan, analyze, verify, check.

Exit codes: 0 solution or clean, 1 exhausted or unsound, 2 budget exceeded,
3 input error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .emit import FORMATS, PlanFileError, emit, plan_view_from_dict, report_to_dict
from .intention import classify_effects, informational_structure
from .language import parse_domain, parse_problem
from .model import validate_domain, validate_problem
from .oracle import verify_soundness
from .search import (
    FLAW_POLICIES,
    REUSE_POLICIES,
    Exhausted,
    SearchConfig,
    Solution,
    solve,
)

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_BUDGET = 2
EXIT_INPUT = 3


def _read_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    except OSError as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        return None


def _load(args):
    """Parse and validate domain and problem; None on any input error."""
    domain_text = _read_file(args.domain)
    if domain_text is None:
        return None
    domain, diags = parse_domain(domain_text, args.domain)
    for d in diags:
        print(str(d), file=sys.stderr)
    if domain is None:
        return None
    problem = None
    if getattr(args, "problem", None):
        problem_text = _read_file(args.problem)
        if problem_text is None:
            return None
        problem, pdiags = parse_problem(problem_text, args.problem)
        for d in pdiags:
            print(str(d), file=sys.stderr)
        if problem is None:
            return None
    issues = validate_domain(domain)
    if problem is not None:
        issues += validate_problem(domain, problem)
    for issue in issues:
        print(f"error: {issue}", file=sys.stderr)
    if issues:
        return None
    return domain, problem


def _write_out(text: str, out: str | None) -> bool:
    if out:
        try:
            with open(out, "w", encoding="utf-8") as f:
                f.write(text)
        except OSError as exc:
            print(f"error: cannot write {out}: {exc}", file=sys.stderr)
            return False
    else:
        sys.stdout.write(text)
    return True


def _config(args) -> SearchConfig:
    return SearchConfig(
        max_steps=args.max_steps,
        max_depth=args.max_depth,
        max_nodes=args.max_nodes,
        flaw_policy=args.flaw_policy,
        reuse_policy=args.reuse_policy,
        random_seed=args.seed,
    )


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-steps", type=int, default=64)
    p.add_argument("--max-depth", type=int, default=8)
    p.add_argument("--max-nodes", type=int, default=100_000)
    p.add_argument("--flaw-policy", choices=FLAW_POLICIES, default="threats-first")
    p.add_argument("--reuse-policy", choices=REUSE_POLICIES, default="both-branches")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)


def cmd_plan(args) -> int:
    loaded = _load(args)
    if loaded is None:
        return EXIT_INPUT
    domain, problem = loaded
    outcome = solve(domain, problem, _config(args))
    if isinstance(outcome, Solution):
        report = classify_effects(outcome.plan)
        if not _write_out(emit(outcome.plan, report, args.emit), args.out):
            return EXIT_INPUT
        return EXIT_OK
    if isinstance(outcome, Exhausted):
        print("no solution within bounds", file=sys.stderr)
        return EXIT_NO_SOLUTION
    print("node budget exceeded", file=sys.stderr)
    return EXIT_BUDGET


def cmd_analyze(args) -> int:
    loaded = _load(args)
    if loaded is None:
        return EXIT_INPUT
    domain, problem = loaded
    outcome = solve(domain, problem, _config(args))
    if isinstance(outcome, Solution):
        report = classify_effects(outcome.plan)
        info = informational_structure(outcome.plan)
        doc = report_to_dict(outcome.plan, report, info)
        if not _write_out(json.dumps(doc, indent=2) + "\n", args.out):
            return EXIT_INPUT
        return EXIT_OK
    if isinstance(outcome, Exhausted):
        print("no solution within bounds", file=sys.stderr)
        return EXIT_NO_SOLUTION
    print("node budget exceeded", file=sys.stderr)
    return EXIT_BUDGET


def cmd_verify(args) -> int:
    loaded = _load(args)
    if loaded is None:
        return EXIT_INPUT
    _, problem = loaded
    plan_text = _read_file(args.plan)
    if plan_text is None:
        return EXIT_INPUT
    try:
        data = json.loads(plan_text)
        view = plan_view_from_dict(data)
    except (json.JSONDecodeError, PlanFileError) as exc:
        print(f"error: {args.plan}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = verify_soundness(view, problem)
    if report.ok:
        print(f"sound: {report.linearizations_checked} linearizations checked")
        return EXIT_OK
    for v in report.violations:
        print(f"violation [{v.code}]: {v.message}")
    return EXIT_NO_SOLUTION


def cmd_check(args) -> int:
    loaded = _load(args)
    if loaded is None:
        return EXIT_INPUT
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="discoplan")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plan = sub.add_parser("plan", help="search for a plan and emit it")
    p_plan.add_argument("--domain", required=True)
    p_plan.add_argument("--problem", required=True)
    p_plan.add_argument("--emit", choices=FORMATS, default="json")
    _add_search_flags(p_plan)
    p_plan.set_defaults(func=cmd_plan)

    p_an = sub.add_parser("analyze", help="plan, then emit the intention report")
    p_an.add_argument("--domain", required=True)
    p_an.add_argument("--problem", required=True)
    _add_search_flags(p_an)
    p_an.set_defaults(func=cmd_analyze)

    p_ver = sub.add_parser("verify", help="audit an emitted plan file")
    p_ver.add_argument("--domain", required=True)
    p_ver.add_argument("--problem", required=True)
    p_ver.add_argument("--plan", required=True)
    p_ver.set_defaults(func=cmd_verify)

    p_chk = sub.add_parser("check", help="parse and validate inputs only")
    p_chk.add_argument("--domain", required=True)
    p_chk.add_argument("--problem", default=None)
    p_chk.set_defaults(func=cmd_check)
    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    return args.func(args)


def entry() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    entry()
