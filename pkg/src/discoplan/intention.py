"""Intended-effect classification and informational structure extraction.

An effect is intended when it sits on a causal chain that reaches the plan's
final step, where chains may hop from an end-subplan precondition to the
corresponding effect of the subplan's parent. Everything else a step asserts
is a side effect of the choices that put the step in the plan.
"""
from __future__ import annotations

from dataclasses import dataclass

from .plan import DecompositionLink, Plan, detect_threats
from .terms import Literal, apply


@dataclass(frozen=True)
class CausalHop:
    producer: int
    condition: Literal
    consumer: int


@dataclass(frozen=True)
class CorrespondenceHop:
    end: int
    parent: int
    effect_index: int


Hop = CausalHop | CorrespondenceHop


@dataclass(frozen=True)
class EffectLabel:
    step: int
    effect_index: int
    effect: Literal
    intended: bool
    chain: tuple[Hop, ...] | None


@dataclass(frozen=True)
class IntentionReport:
    labels: tuple[EffectLabel, ...]

    def label(self, step: int, effect_index: int) -> EffectLabel:
        for l in self.labels:
            if l.step == step and l.effect_index == effect_index:
                return l
        raise KeyError((step, effect_index))

    def intended_pairs(self) -> set[tuple[int, int]]:
        return {(l.step, l.effect_index) for l in self.labels if l.intended}

    def side_effect_pairs(self) -> set[tuple[int, int]]:
        return {(l.step, l.effect_index) for l in self.labels if not l.intended}


@dataclass(frozen=True)
class ConstraintRecord:
    parent: int
    schema: str
    constraints: tuple[Literal, ...]


@dataclass(frozen=True)
class InformationalStructure:
    entries: tuple[ConstraintRecord, ...]


def _require_complete(plan: Plan) -> None:
    if plan.flaws or detect_threats(plan):
        raise ValueError("intention analysis requires a complete, flawless plan")


def classify_effects(plan: Plan) -> IntentionReport:
    """Label every (step, effect) pair intended or side effect.

    Backward fixpoint from the final step. An effect is intended when a
    causal link carries it to the final step, into an end-subplan step whose
    corresponding parent effect is intended, or into a step that has some
    intended effect of its own.
    """
    _require_complete(plan)
    final_sid = plan.final.sid
    ends: dict[int, DecompositionLink] = {d.end: d for d in plan.decomposition_links}
    applied = {
        (s.sid, i): apply(plan.bindings, e)
        for s in plan.steps
        for i, e in enumerate(s.effects)
    }
    links_from: dict[int, list] = {}
    for link in plan.causal_links:
        links_from.setdefault(link.producer, []).append(link)

    def uses(sid: int, idx: int, link) -> bool:
        return applied[(sid, idx)] == apply(plan.bindings, link.condition)

    chains: dict[tuple[int, int], tuple[Hop, ...]] = {}
    changed = True
    while changed:
        changed = False
        for (sid, idx) in applied:
            if (sid, idx) in chains:
                continue
            for link in links_from.get(sid, ()):
                if not uses(sid, idx, link):
                    continue
                hop = CausalHop(link.producer, link.condition, link.consumer)
                if link.consumer == final_sid:
                    chains[(sid, idx)] = (hop,)
                    changed = True
                    break
                d = ends.get(link.consumer)
                if d is not None:
                    end_step = plan.step(d.end)
                    k = end_step.preconditions.index(link.condition)
                    j = next(i for i, jj in d.correspondence if jj == k)
                    if (d.parent, j) in chains:
                        corr = CorrespondenceHop(d.end, d.parent, j)
                        chains[(sid, idx)] = (hop, corr) + chains[(d.parent, j)]
                        changed = True
                        break
                consumer_step = plan.step(link.consumer)
                follow = next(
                    (
                        j
                        for j in range(len(consumer_step.effects))
                        if (link.consumer, j) in chains
                    ),
                    None,
                )
                if follow is not None:
                    chains[(sid, idx)] = (hop,) + chains[(link.consumer, follow)]
                    changed = True
                    break

    labels = []
    for s in plan.steps:
        for i in range(len(s.effects)):
            chain = chains.get((s.sid, i))
            labels.append(
                EffectLabel(
                    step=s.sid,
                    effect_index=i,
                    effect=applied[(s.sid, i)],
                    intended=chain is not None,
                    chain=chain,
                )
            )
    return IntentionReport(tuple(labels))


def informational_structure(plan: Plan) -> InformationalStructure:
    """Per decomposition link, the constraint literals with plan bindings applied."""
    entries = tuple(
        ConstraintRecord(
            parent=d.parent,
            schema=d.schema,
            constraints=tuple(apply(plan.bindings, c) for c in d.constraints),
        )
        for d in plan.decomposition_links
    )
    return InformationalStructure(entries)
