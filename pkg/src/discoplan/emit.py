"""Plan serializers: structured json, graphviz dot, and a readable outline.

Output is byte-stable for a fixed plan: every collection is emitted in a
sorted or declaration order, never in hash order. Literals are written in
the same symbolic syntax the corpus uses, with plan bindings applied, so an
emitted plan file can be reloaded and audited on its own.
"""
from __future__ import annotations

import json

from .intention import CausalHop, IntentionReport
from .oracle import PlanView, ViewDecomposition, ViewLink, ViewStep
from .plan import Plan
from .sexp import Diagnostic, read
from .terms import BindingSet, Compound, Literal, Term, apply, apply_term

FORMATS = ("json", "dot", "text")

PLAN_FORMAT_TAG = "plan.json/1"


def functional(t: Term) -> str:
    """name(arg, arg) style used for node labels."""
    if isinstance(t, Compound):
        return "{}({})".format(t.functor, ", ".join(functional(a) for a in t.args))
    return str(t)


def step_label(step, bindings=None) -> str:
    params = step.params
    if bindings is not None:
        params = tuple(apply_term(bindings, a) for a in params)
    if not params:
        return step.name
    return "{}({})".format(step.name, ", ".join(functional(a) for a in params))


def emit(plan: Plan, report: IntentionReport | None, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(plan_to_dict(plan, report), indent=2) + "\n"
    if fmt == "dot":
        return _emit_dot(plan)
    if fmt == "text":
        return _emit_text(plan, report)
    raise ValueError(f"unknown format {fmt}")


def _lit(plan: Plan, l: Literal) -> str:
    return str(apply(plan.bindings, l))


def _hop_dict(hop) -> dict:
    if isinstance(hop, CausalHop):
        return {
            "kind": "causal",
            "producer": hop.producer,
            "condition": str(hop.condition),
            "consumer": hop.consumer,
        }
    return {"kind": "correspondence", "end": hop.end, "parent": hop.parent,
            "effect_index": hop.effect_index}


def plan_to_dict(plan: Plan, report: IntentionReport | None = None) -> dict:
    steps = []
    for s in sorted(plan.steps, key=lambda s: s.sid):
        steps.append(
            {
                "id": s.sid,
                "name": s.name,
                "kind": s.kind,
                "args": [str(apply_term(plan.bindings, a)) for a in s.params],
                "depth": s.depth,
                "preconditions": [_lit(plan, p) for p in s.preconditions],
                "effects": [_lit(plan, e) for e in s.effects],
            }
        )
    links = sorted(
        plan.causal_links, key=lambda l: (l.producer, l.consumer, str(l.condition))
    )
    decos = sorted(plan.decomposition_links, key=lambda d: d.parent)
    out = {
        "format": PLAN_FORMAT_TAG,
        "domain": plan.domain_name,
        "problem": plan.problem_name,
        "steps": steps,
        "orderings": sorted([a, b] for a, b in plan.orderings),
        "causal_links": [
            {"producer": l.producer, "condition": _lit(plan, l.condition), "consumer": l.consumer}
            for l in links
        ],
        "decomposition_links": [
            {
                "parent": d.parent,
                "schema": d.schema,
                "begin": d.begin,
                "end": d.end,
                "members": sorted(d.members),
                "constraints": [_lit(plan, c) for c in d.constraints],
                "correspondence": [list(pair) for pair in d.correspondence],
            }
            for d in decos
        ],
        "bindings": {
            "distinct": sorted(
                [str(plan.bindings.resolve(x)), str(plan.bindings.resolve(y))]
                for x, y in plan.bindings.distinct
            ),
        },
    }
    if report is not None:
        out["intention"] = [
            {
                "step": l.step,
                "effect_index": l.effect_index,
                "effect": str(l.effect),
                "intended": l.intended,
                "chain": [_hop_dict(h) for h in l.chain] if l.chain else [],
            }
            for l in sorted(report.labels, key=lambda l: (l.step, l.effect_index))
        ]
    return out


def _quote(s: str) -> str:
    return '"{}"'.format(s.replace('"', r"\""))


def _emit_dot(plan: Plan) -> str:
    lines = ["digraph plan {", "  rankdir=LR;"]
    for s in sorted(plan.steps, key=lambda s: s.sid):
        lines.append(f"  s{s.sid} [label={_quote(step_label(s, plan.bindings))}];")
    for l in sorted(plan.causal_links, key=lambda l: (l.producer, l.consumer, str(l.condition))):
        lines.append(
            f"  s{l.producer} -> s{l.consumer} [label={_quote(_lit(plan, l.condition))}];"
        )
    for d in sorted(plan.decomposition_links, key=lambda d: d.parent):
        lines.append(f"  s{d.parent} -> s{d.begin} [style=dashed];")
        lines.append(f"  s{d.parent} -> s{d.end} [style=dashed];")
        for m in sorted(d.members):
            lines.append(f"  s{d.parent} -> s{m} [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _emit_text(plan: Plan, report: IntentionReport | None) -> str:
    lines = [f"plan for problem {plan.problem_name} (domain {plan.domain_name})"]
    lines.append("steps:")
    for s in sorted(plan.steps, key=lambda s: s.sid):
        lines.append(f"  [{s.sid}] {step_label(s, plan.bindings)} ({s.kind})")
        for p in s.preconditions:
            lines.append(f"        needs {_lit(plan, p)}")
        for e in s.effects:
            lines.append(f"        gives {_lit(plan, e)}")
    lines.append("orderings:")
    for a, b in sorted(plan.orderings):
        lines.append(f"  {a} < {b}")
    lines.append("causal links:")
    for l in sorted(plan.causal_links, key=lambda l: (l.producer, l.consumer, str(l.condition))):
        lines.append(f"  [{l.producer}] --{_lit(plan, l.condition)}--> [{l.consumer}]")
    lines.append("decomposition links:")
    for d in sorted(plan.decomposition_links, key=lambda d: d.parent):
        members = " ".join(str(m) for m in sorted(d.members))
        lines.append(f"  {d.schema} [{d.parent}]: begin [{d.begin}], end [{d.end}], members [{members}]")
        for c in d.constraints:
            lines.append(f"    constraint {_lit(plan, c)}")
    if report is not None:
        lines.append("effects:")
        for l in sorted(report.labels, key=lambda l: (l.step, l.effect_index)):
            tag = "intended" if l.intended else "side effect"
            lines.append(f"  [{l.step}] {l.effect}: {tag}")
    return "\n".join(lines) + "\n"


def report_to_dict(plan: Plan, report: IntentionReport, info) -> dict:
    return {
        "format": "intention.json/1",
        "domain": plan.domain_name,
        "problem": plan.problem_name,
        "labels": [
            {
                "step": l.step,
                "effect_index": l.effect_index,
                "effect": str(l.effect),
                "intended": l.intended,
                "chain": [_hop_dict(h) for h in l.chain] if l.chain else [],
            }
            for l in sorted(report.labels, key=lambda l: (l.step, l.effect_index))
        ],
        "informational": [
            {
                "parent": e.parent,
                "schema": e.schema,
                "constraints": [str(c) for c in e.constraints],
            }
            for e in info.entries
        ],
    }


class PlanFileError(Exception):
    """Emitted plan file is malformed."""


def _parse_literal_text(text: str) -> Literal:
    from .language import parse_literal

    forms, diags = read(text, "<plan-literal>")
    if diags or len(forms) != 1:
        raise PlanFileError(f"bad literal text {text!r}")
    lit_diags: list[Diagnostic] = []
    lit = parse_literal(forms[0], lit_diags)
    if lit is None or lit_diags:
        raise PlanFileError(f"bad literal text {text!r}")
    return lit


def _parse_term_text(text: str) -> Term:
    from .language import parse_term

    forms, diags = read(text, "<plan-term>")
    if diags or len(forms) != 1:
        raise PlanFileError(f"bad term text {text!r}")
    term_diags: list[Diagnostic] = []
    t = parse_term(forms[0], term_diags)
    if t is None or term_diags:
        raise PlanFileError(f"bad term text {text!r}")
    return t


def plan_view_from_dict(data: dict) -> PlanView:
    """Rebuild an auditable plan view from an emitted json document."""
    try:
        steps = tuple(
            ViewStep(
                sid=s["id"],
                name=s["name"],
                params=tuple(_parse_term_text(a) for a in s["args"]),
                preconditions=tuple(_parse_literal_text(p) for p in s["preconditions"]),
                effects=tuple(_parse_literal_text(e) for e in s["effects"]),
                kind=s["kind"],
            )
            for s in data["steps"]
        )
        orderings = frozenset((a, b) for a, b in data["orderings"])
        links = tuple(
            ViewLink(l["producer"], _parse_literal_text(l["condition"]), l["consumer"])
            for l in data["causal_links"]
        )
        decos = tuple(
            ViewDecomposition(
                parent=d["parent"],
                begin=d["begin"],
                end=d["end"],
                members=tuple(d["members"]),
                schema=d["schema"],
                constraints=tuple(_parse_literal_text(c) for c in d["constraints"]),
            )
            for d in data["decomposition_links"]
        )
        distinct = tuple(
            (_parse_term_text(a), _parse_term_text(b))
            for a, b in data.get("bindings", {}).get("distinct", [])
        )
    except (KeyError, TypeError) as exc:
        raise PlanFileError(f"missing or malformed plan field: {exc}") from exc
    return PlanView(steps, orderings, links, decos, BindingSet({}, distinct))
