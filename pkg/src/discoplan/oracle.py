"""Independent checkers: a ground executor, a brute-force planner, a soundness auditor.

This module deliberately shares only the term/literal/binding layer with the
planner. Reachability, linearization enumeration, and threat scanning are
reimplemented here from the raw plan data so that an agreeing answer is
evidence, not an echo.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .model import Domain, Problem
from .terms import (
    BindingSet,
    Compound,
    Constant,
    EMPTY_BINDINGS,
    Literal,
    Term,
    Variable,
    apply,
    is_ground,
    unify,
)


class UniverseTooLargeError(Exception):
    """Ground action universe exceeds the configured bound."""


@dataclass(frozen=True)
class TraceEntry:
    step_id: object
    before: frozenset[Literal]
    after: frozenset[Literal]


@dataclass(frozen=True)
class ExecutionTrace:
    entries: tuple[TraceEntry, ...]
    outcome: str  # "success" | "failed-precondition"
    initial_state: frozenset[Literal] = frozenset()
    failed_step: object = None
    failed_condition: Literal | None = None

    @property
    def ok(self) -> bool:
        return self.outcome == "success"

    @property
    def final_state(self) -> frozenset[Literal]:
        return self.entries[-1].after if self.entries else self.initial_state


def _holds(state: frozenset[Literal], condition: Literal) -> bool:
    if condition.positive:
        return condition in state
    return condition.atom() not in state


def execute(initial_state: Iterable[Literal], steps: Sequence) -> ExecutionTrace:
    """Apply ground primitive steps in order under add/delete semantics.

    Fails at the first step with an unsatisfied precondition: a positive
    literal absent from the state, or a negative one present (closed world).
    """
    initial = frozenset(initial_state)
    state = initial
    entries: list[TraceEntry] = []
    for pos, step in enumerate(steps):
        sid = getattr(step, "sid", pos)
        for lit in tuple(step.preconditions) + tuple(step.effects):
            if not is_ground(lit):
                raise ValueError(f"step {sid} is not ground: {lit}")
        for p in step.preconditions:
            if not _holds(state, p):
                return ExecutionTrace(tuple(entries), "failed-precondition", initial, sid, p)
        deletes = {e.atom() for e in step.effects if not e.positive}
        adds = {e for e in step.effects if e.positive}
        after = (state - deletes) | adds
        entries.append(TraceEntry(sid, state, after))
        state = after
    return ExecutionTrace(tuple(entries), "success", initial)


@dataclass(frozen=True)
class GroundAction:
    sid: str
    name: str
    args: tuple[Term, ...]
    preconditions: tuple[Literal, ...]
    effects: tuple[Literal, ...]


def _substitute(t: Term, env: dict[Variable, Term]) -> Term:
    if isinstance(t, Variable):
        return env[t]
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_substitute(a, env) for a in t.args))
    return t


def _sub_literal(l: Literal, env: dict[Variable, Term]) -> Literal:
    return Literal(l.predicate, tuple(_substitute(a, env) for a in l.args), l.positive)


def _constants_of(obj, pool: set[Constant]) -> None:
    if isinstance(obj, Constant):
        pool.add(obj)
    elif isinstance(obj, Compound):
        for a in obj.args:
            _constants_of(a, pool)
    elif isinstance(obj, Literal):
        for a in obj.args:
            _constants_of(a, pool)


def ground_actions(domain: Domain, problem: Problem, max_ground: int = 10_000) -> list[GroundAction]:
    """All primitive operators instantiated over the constant pool.

    Parameters range over constants only; static neq/eq constraints filter
    combinations. Faults when the universe exceeds `max_ground`.
    """
    pool: set[Constant] = set()
    for lit in problem.init + problem.goals + problem.facts:
        _constants_of(lit, pool)
    for op in domain.operators:
        for lit in op.preconditions + op.effects:
            _constants_of(lit, pool)
    constants = sorted(pool, key=lambda c: c.name)
    out: list[GroundAction] = []
    for op in domain.operators:
        if op.composite:
            continue
        for combo in itertools.product(constants, repeat=len(op.params)):
            env = dict(zip(op.params, combo))
            ok = True
            for c in op.constraints:
                left = _substitute(c.left, env) if not isinstance(c.left, Constant) else c.left
                right = _substitute(c.right, env) if not isinstance(c.right, Constant) else c.right
                if c.kind == "eq" and left != right:
                    ok = False
                if c.kind == "neq" and left == right:
                    ok = False
            if not ok:
                continue
            name = "{}({})".format(op.name, ",".join(str(a) for a in combo))
            out.append(
                GroundAction(
                    sid=name,
                    name=op.name,
                    args=combo,
                    preconditions=tuple(_sub_literal(p, env) for p in op.preconditions),
                    effects=tuple(_sub_literal(e, env) for e in op.effects),
                )
            )
            if len(out) > max_ground:
                raise UniverseTooLargeError(f"more than {max_ground} ground actions")
    return out


def brute_force(
    domain: Domain, problem: Problem, max_len: int, max_ground: int = 10_000
) -> list[tuple[GroundAction, ...]]:
    """Breadth-first enumeration of every executable goal-achieving sequence.

    Exhaustive over sequences of length <= max_len and duplicate-free; a
    sequence qualifies when its own final state satisfies every goal.
    """
    actions = ground_actions(domain, problem, max_ground)
    goals = problem.goals
    results: list[tuple[GroundAction, ...]] = []
    frontier: list[tuple[tuple[GroundAction, ...], frozenset[Literal]]] = [
        ((), frozenset(problem.init))
    ]
    for _ in range(max_len + 1):
        next_frontier = []
        for seq, state in frontier:
            if all(_holds(state, g) for g in goals):
                results.append(seq)
            if len(seq) == max_len:
                continue
            for ga in actions:
                if all(_holds(state, p) for p in ga.preconditions):
                    deletes = {e.atom() for e in ga.effects if not e.positive}
                    adds = {e for e in ga.effects if e.positive}
                    next_frontier.append((seq + (ga,), (state - deletes) | adds))
        frontier = next_frontier
        if not frontier:
            break
    return results


# ---------------------------------------------------------------------------
# Soundness audit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ViewStep:
    sid: int
    name: str
    params: tuple[Term, ...]
    preconditions: tuple[Literal, ...]
    effects: tuple[Literal, ...]
    kind: str


@dataclass(frozen=True)
class ViewLink:
    producer: int
    condition: Literal
    consumer: int


@dataclass(frozen=True)
class ViewDecomposition:
    parent: int
    begin: int
    end: int
    members: tuple[int, ...]
    schema: str
    constraints: tuple[Literal, ...]


@dataclass(frozen=True)
class PlanView:
    """A plan as raw data, e.g. reloaded from an emitted file."""

    steps: tuple[ViewStep, ...]
    orderings: frozenset[tuple[int, int]]
    causal_links: tuple[ViewLink, ...]
    decomposition_links: tuple[ViewDecomposition, ...]
    bindings: BindingSet = EMPTY_BINDINGS


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class AuditReport:
    violations: tuple[Violation, ...]
    linearizations_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _reachability(sids, pairs) -> dict[int, set[int]]:
    succ: dict[int, set[int]] = {s: set() for s in sids}
    for a, b in pairs:
        if a in succ:
            succ[a].add(b)
    out = {}
    for s in sids:
        seen: set[int] = set()
        stack = list(succ[s])
        while stack:
            n = stack.pop()
            if n not in seen and n in succ:
                seen.add(n)
                stack.extend(succ[n])
        out[s] = seen
    return out


def _skolemize(lit: Literal, table: dict[Variable, Constant]) -> Literal:
    def sk(t: Term) -> Term:
        if isinstance(t, Variable):
            if t not in table:
                table[t] = Constant(f"sk:{t.name}:{t.iid}")
            return table[t]
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(sk(a) for a in t.args))
        return t

    return Literal(lit.predicate, tuple(sk(a) for a in lit.args), lit.positive)


def _all_orders(items: list[int], pred: dict[int, set[int]], cap: int):
    orders: list[tuple[int, ...]] = []

    def rec(done: list[int], left: set[int]):
        if len(orders) > cap:
            return
        if not left:
            orders.append(tuple(done))
            return
        for m in sorted(left):
            if pred[m] <= set(done):
                done.append(m)
                left.remove(m)
                rec(done, left)
                left.add(m)
                done.pop()

    rec([], set(items))
    return orders


def verify_soundness(plan, problem: Problem, max_orders: int = 5_000) -> AuditReport:
    """Audit a claimed solution against first principles.

    Checks: unique causal support for every precondition, an empty threat set,
    successful goal-achieving execution of every linearization of the
    primitive steps, and end-subplan preconditions supported from within or
    before their subplan. Violations are report content, never exceptions.
    """
    violations: list[Violation] = []
    bindings = getattr(plan, "bindings", EMPTY_BINDINGS)
    steps = {s.sid: s for s in plan.steps}
    pairs = set(plan.orderings)
    reach = _reachability(steps, pairs)

    for sid, reached in reach.items():
        if sid in reached:
            violations.append(Violation("cycle", f"step {sid} precedes itself"))
            return AuditReport(tuple(violations))

    intervals = {d.parent: (d.begin, d.end) for d in plan.decomposition_links}

    def begin_of(sid):
        return intervals.get(sid, (sid, sid))[0]

    def end_of(sid):
        return intervals.get(sid, (sid, sid))[1]

    initial = next((s for s in plan.steps if s.kind == "initial"), None)
    final = next((s for s in plan.steps if s.kind == "final"), None)
    if initial is None or final is None:
        violations.append(Violation("structure", "missing initial or final step"))
        return AuditReport(tuple(violations))

    def cwa_ok(condition: Literal) -> bool:
        if condition.positive:
            return False
        atom = condition.atom()
        return not any(
            e.predicate == atom.predicate and unify(atom, e, bindings) is not None
            for e in initial.effects
        )

    # Unique support per precondition; producers really produce; orders hold.
    for s in plan.steps:
        for p in s.preconditions:
            supporters = [
                l for l in plan.causal_links
                if l.consumer == s.sid and apply(bindings, l.condition) == apply(bindings, p)
            ]
            if len(supporters) != 1:
                violations.append(
                    Violation(
                        "support",
                        f"precondition {apply(bindings, p)} of step {s.sid} has "
                        f"{len(supporters)} supporting links",
                    )
                )
    for l in plan.causal_links:
        if l.producer not in steps or l.consumer not in steps:
            violations.append(Violation("structure", f"link references missing step: {l}"))
            continue
        if l.consumer not in reach[l.producer]:
            violations.append(
                Violation("order", f"producer {l.producer} not ordered before {l.consumer}")
            )
        producer = steps[l.producer]
        produced = any(unify(e, l.condition, bindings) is not None for e in producer.effects)
        if not produced and not (producer.kind == "initial" and cwa_ok(l.condition)):
            violations.append(
                Violation("produce", f"step {l.producer} does not produce {l.condition}")
            )

    # Threat scan over interval endpoints.
    for l in plan.causal_links:
        negated = l.condition.negate()
        for s in plan.steps:
            if s.sid in (l.producer, l.consumer):
                continue
            s_begin, s_end = begin_of(s.sid), end_of(s.sid)
            if s_end == end_of(l.producer) or end_of(l.producer) in reach[s_end]:
                continue
            if begin_of(l.consumer) == s_begin or s_begin in reach[begin_of(l.consumer)]:
                continue
            if any(unify(e, negated, bindings) is not None for e in s.effects):
                violations.append(
                    Violation("threat", f"step {s.sid} may undo {l.condition} of link "
                                        f"{l.producer}->{l.consumer}")
                )

    # End-subplan preconditions supported from within or before the subplan.
    for d in plan.decomposition_links:
        allowed = set(d.members) | {d.begin}
        for p in steps[d.end].preconditions:
            for l in plan.causal_links:
                if l.consumer != d.end:
                    continue
                if apply(bindings, l.condition) != apply(bindings, p):
                    continue
                if l.producer in allowed:
                    continue
                if d.begin in reach.get(l.producer, set()):
                    continue
                violations.append(
                    Violation(
                        "subplan",
                        f"goal {apply(bindings, p)} of subplan under {d.parent} supported "
                        f"by outside step {l.producer}",
                    )
                )

    # Every linearization of the primitives executes and achieves the goals.
    table: dict[Variable, Constant] = {}

    def ground(lit: Literal) -> Literal:
        return _skolemize(apply(bindings, lit), table)

    prims = [s.sid for s in plan.steps if s.kind == "primitive"]
    pred = {m: {n for n in prims if n != m and m in reach[n]} for m in prims}
    orders = _all_orders(prims, pred, max_orders)
    init_state = [ground(e) for e in initial.effects]
    goals = [ground(g) for g in final.preconditions]
    for order in orders:
        seq = []
        for sid in order:
            s = steps[sid]
            seq.append(
                GroundAction(
                    sid=str(sid),
                    name=s.name,
                    args=tuple(),
                    preconditions=tuple(ground(p) for p in s.preconditions),
                    effects=tuple(ground(e) for e in s.effects),
                )
            )
        trace = execute(init_state, seq)
        if not trace.ok:
            violations.append(
                Violation(
                    "execution",
                    f"linearization {order} fails at step {trace.failed_step} "
                    f"needing {trace.failed_condition}",
                )
            )
            continue
        missing = [g for g in goals if not _holds(trace.final_state, g)]
        for g in missing:
            violations.append(
                Violation("goal", f"linearization {order} ends without goal {g}")
            )
    return AuditReport(tuple(violations), linearizations_checked=len(orders))
