"""The plan data structure: steps, partial order, causal links, decomposition links, flaws.

A plan is an immutable snapshot. Operations that would mutate it return a new
plan sharing structure with its parent, so search branches never interfere.

Expanded composite steps are phantom: a composite's temporal extent is the
interval between its begin and end boundary steps. Ordering constraints are
therefore recorded between interval endpoints (end of the earlier step,
begin of the later one), and threat detection asks whether a step's interval
can intersect the protected span of a causal link.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, Mapping

from .model import Problem
from .terms import BindingSet, EMPTY_BINDINGS, Literal, Term, rename_fresh, unify

KIND_INITIAL = "initial"
KIND_FINAL = "final"
KIND_PRIMITIVE = "primitive"
KIND_COMPOSITE = "composite"
KIND_BEGIN = "begin-subplan"
KIND_END = "end-subplan"


class PlanTooLargeError(Exception):
    """Plan exceeds the configured bound for exhaustive linearization."""


@dataclass(frozen=True)
class Step:
    sid: int
    name: str
    params: tuple[Term, ...]
    preconditions: tuple[Literal, ...]
    effects: tuple[Literal, ...]
    kind: str
    depth: int = 0


@dataclass(frozen=True)
class CausalLink:
    """The producer's effect establishes the consumer's precondition `condition`."""

    producer: int
    condition: Literal
    consumer: int


@dataclass(frozen=True)
class DecompositionLink:
    """Binds a composite parent to the boundary steps and members of its subplan.

    `correspondence` pairs each parent effect index with the end-subplan
    precondition index copied from it. A step id may be a member of more than
    one decomposition link (plans are DAGs, not trees).
    """

    parent: int
    begin: int
    end: int
    members: tuple[int, ...]
    schema: str
    constraints: tuple[Literal, ...]
    correspondence: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class OpenCondition:
    consumer: int
    condition: Literal


@dataclass(frozen=True)
class UnexpandedComposite:
    step: int


@dataclass(frozen=True)
class Threat:
    step: int
    link: CausalLink


Flaw = OpenCondition | UnexpandedComposite | Threat


@dataclass(frozen=True)
class Plan:
    steps: tuple[Step, ...]
    orderings: frozenset[tuple[int, int]]
    bindings: BindingSet
    causal_links: tuple[CausalLink, ...]
    decomposition_links: tuple[DecompositionLink, ...]
    flaws: tuple[OpenCondition | UnexpandedComposite, ...]
    intervals: Mapping[int, tuple[int, int]]
    next_sid: int
    next_iid: int
    domain_name: str = ""
    problem_name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "_index", {s.sid: s for s in self.steps})
        object.__setattr__(self, "_reach", _closure(self._index, self.orderings))

    def step(self, sid: int) -> Step:
        try:
            return self._index[sid]
        except KeyError:
            raise ValueError(f"no step with id {sid} in plan") from None

    def has_step(self, sid: int) -> bool:
        return sid in self._index

    def reaches(self, a: int, b: int) -> bool:
        """True iff a is strictly ordered before b."""
        return b in self._reach.get(a, ())

    def begin_of(self, sid: int) -> int:
        return self.intervals.get(sid, (sid, sid))[0]

    def end_of(self, sid: int) -> int:
        return self.intervals.get(sid, (sid, sid))[1]

    @property
    def is_acyclic(self) -> bool:
        return all(sid not in reached for sid, reached in self._reach.items())

    @property
    def initial(self) -> Step:
        return self.steps[0]

    @property
    def final(self) -> Step:
        return self.steps[1]

    def evolve(self, **changes) -> "Plan":
        return replace(self, **changes)


def _closure(index, pairs) -> dict[int, frozenset[int]]:
    succ: dict[int, set[int]] = {sid: set() for sid in index}
    for a, b in pairs:
        if a in succ:
            succ[a].add(b)
    out: dict[int, frozenset[int]] = {}
    for sid in index:
        seen: set[int] = set()
        stack = list(succ.get(sid, ()))
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(succ.get(n, ()))
        out[sid] = frozenset(seen)
    return out


def init_plan(problem: Problem) -> Plan:
    """Null initial step carrying the initial state, null final step carrying the goals."""
    initial = Step(0, "initial", (), (), tuple(problem.init), KIND_INITIAL)
    goals = tuple(rename_fresh(problem.goals, 1))
    final = Step(1, "final", (), goals, (), KIND_FINAL)
    return Plan(
        steps=(initial, final),
        orderings=frozenset({(0, 1)}),
        bindings=EMPTY_BINDINGS,
        causal_links=(),
        decomposition_links=(),
        flaws=tuple(OpenCondition(1, g) for g in goals),
        intervals={},
        next_sid=2,
        next_iid=2,
        domain_name=problem.domain_name,
        problem_name=problem.name,
    )


def possibly_between(plan: Plan, s: int, a: int, b: int) -> bool:
    """True iff some linearization of all steps places s strictly between a and b.

    Equivalent to: s is not forced before a, nor after b, and a may still
    precede b.
    """
    for sid in (s, a, b):
        plan.step(sid)
    if s == a or s == b:
        raise ValueError("step must be distinct from both interval endpoints")
    if a == b:
        return False
    return not plan.reaches(s, a) and not plan.reaches(b, s) and not plan.reaches(b, a)


def cwa_supported(plan: Plan, condition: Literal) -> bool:
    """Closed-world support from the initial step for a negative condition.

    Holds iff no initial effect possibly-unifies with the condition's atom
    under current bindings.
    """
    if condition.positive:
        return False
    atom = condition.atom()
    for e in plan.initial.effects:
        if e.predicate == atom.predicate and unify(atom, e, plan.bindings) is not None:
            return False
    return True


def producer_bindings(plan: Plan, producer: Step, condition: Literal) -> BindingSet | None:
    """Bindings under which `producer` can establish `condition`, or None.

    The first declared effect that unifies is used; the initial step may also
    support a negative condition closed-world without new constraints.
    """
    for e in producer.effects:
        b = unify(e, condition, plan.bindings)
        if b is not None:
            return b
    if producer.kind == KIND_INITIAL and cwa_supported(plan, condition):
        return plan.bindings
    return None


def detect_threats(plan: Plan) -> list[Threat]:
    """Steps whose interval may intersect a link's protected span with a conflicting effect.

    The protected span runs from the producer's establishment point (its end
    boundary if expanded) to the consumer's start point (its begin boundary).
    """
    out = []
    for link in plan.causal_links:
        negated = link.condition.negate()
        p_end = plan.end_of(link.producer)
        c_begin = plan.begin_of(link.consumer)
        for s in plan.steps:
            if s.sid == link.producer or s.sid == link.consumer:
                continue
            s_begin = plan.begin_of(s.sid)
            s_end = plan.end_of(s.sid)
            if s_end == p_end or plan.reaches(s_end, p_end):
                continue
            if c_begin == s_begin or plan.reaches(c_begin, s_begin):
                continue
            for e in s.effects:
                if unify(e, negated, plan.bindings) is not None:
                    out.append(Threat(s.sid, link))
                    break
    return out


def add_ordering(plan: Plan, before: int, after: int) -> Plan | None:
    """Order `before` strictly before `after`; None iff that creates a cycle.

    The constraint is recorded between interval endpoints so that everything
    ordered against an expanded composite is ordered against its whole subplan.
    """
    a = plan.end_of(before)
    b = plan.begin_of(after)
    if a == b or plan.reaches(b, a):
        return None
    if plan.reaches(a, b):
        return plan
    return plan.evolve(orderings=plan.orderings | {(a, b)})


def linearizations(plan: Plan, limit: int = 10) -> Iterator[tuple[int, ...]]:
    """All topological orders of the primitive steps.

    Boundary steps and composite parents never execute; only primitive leaves
    appear. Faults if the primitive count exceeds `limit`.
    """
    prims = [s.sid for s in plan.steps if s.kind == KIND_PRIMITIVE]
    if len(prims) > limit:
        raise PlanTooLargeError(f"{len(prims)} primitive steps exceeds bound {limit}")
    pred = {m: {n for n in prims if n != m and plan.reaches(n, m)} for m in prims}

    def rec(done: list[int], left: set[int]) -> Iterator[tuple[int, ...]]:
        if not left:
            yield tuple(done)
            return
        for m in sorted(left):
            if pred[m] <= set(done):
                done.append(m)
                left.remove(m)
                yield from rec(done, left)
                left.add(m)
                done.pop()

    yield from rec([], set(prims))


def scan_flaws(plan: Plan) -> tuple[set, set]:
    """From-scratch flaw computation: (open conditions, unexpanded composites).

    The maintained agenda must always equal this scan; threats are recomputed
    by detect_threats as needed.
    """
    supported = {(l.consumer, l.condition) for l in plan.causal_links}
    opens = {
        OpenCondition(s.sid, p)
        for s in plan.steps
        for p in s.preconditions
        if (s.sid, p) not in supported
    }
    unexpanded = {
        UnexpandedComposite(s.sid)
        for s in plan.steps
        if s.kind == KIND_COMPOSITE and s.sid not in plan.intervals
    }
    return opens, unexpanded


def check_invariants(plan: Plan) -> list[str]:
    """Structural invariant audit used by tests; empty list means healthy."""
    issues = []
    if not plan.is_acyclic:
        issues.append("ordering closure is cyclic")
    init, final = plan.initial.sid, plan.final.sid
    for s in plan.steps:
        if s.sid != init and not plan.reaches(init, s.sid):
            issues.append(f"initial does not precede step {s.sid}")
        if s.sid != final and not plan.reaches(s.sid, final):
            issues.append(f"step {s.sid} does not precede final")
    for link in plan.causal_links:
        if not plan.reaches(link.producer, link.consumer):
            issues.append(f"link {link.producer}->{link.consumer} not ordered")
        producer = plan.step(link.producer)
        if producer_bindings(plan, producer, link.condition) is None:
            issues.append(f"link condition {link.condition} matches no effect of {link.producer}")
        consumer = plan.step(link.consumer)
        if not any(unify(p, link.condition, plan.bindings) is not None for p in consumer.preconditions):
            issues.append(f"link condition {link.condition} matches no precondition of {link.consumer}")
    for d in plan.decomposition_links:
        for m in d.members:
            if not plan.reaches(d.begin, m):
                issues.append(f"member {m} not after begin {d.begin}")
            if not plan.reaches(m, d.end):
                issues.append(f"member {m} not before end {d.end}")
        parent = plan.step(d.parent)
        end = plan.step(d.end)
        srcs = sorted(i for i, _ in d.correspondence)
        dsts = sorted(j for _, j in d.correspondence)
        if srcs != list(range(len(parent.effects))) or dsts != list(range(len(end.preconditions))):
            issues.append(f"correspondence of parent {d.parent} is not a bijection")
    opens, unexpanded = scan_flaws(plan)
    agenda = set(plan.flaws)
    if agenda != opens | unexpanded:
        issues.append("flaw agenda differs from from-scratch scan")
    return issues
