"""Plan-space search: causal refinement, decompositional refinement, threat resolution.

The planner runs depth-first with chronological backtracking over an
explicitly ordered successor list, so a fixed configuration makes the search
a pure function of the domain and problem. Flaw selection is a fixed policy,
never a backtrack point; only the choice of resolver branches.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .model import (
    Domain,
    KnowledgeBase,
    LinkTemplate,
    Problem,
    apply_binding_constraints,
    kb_satisfy,
    knowledge_base,
    validate_domain,
    validate_problem,
    DomainValidationError,
)
from .plan import (
    KIND_BEGIN,
    KIND_COMPOSITE,
    KIND_END,
    KIND_FINAL,
    KIND_PRIMITIVE,
    CausalLink,
    DecompositionLink,
    OpenCondition,
    Plan,
    Step,
    Threat,
    UnexpandedComposite,
    add_ordering,
    detect_threats,
    init_plan,
    producer_bindings,
)
from .terms import (
    BindingSet,
    Compound,
    Literal,
    Term,
    add_noncodesignation,
    rename_fresh,
    rename_term,
    unify,
    unify_terms,
)

FLAW_POLICIES = ("threats-first", "fifo", "lifo")
REUSE_POLICIES = ("both-branches", "prefer-reuse", "prefer-new")


@dataclass(frozen=True)
class SearchConfig:
    max_steps: int = 64
    max_depth: int = 8
    max_nodes: int = 100_000
    flaw_policy: str = "threats-first"
    reuse_policy: str = "both-branches"
    random_seed: int = 0  # reserved for shuffle policies; none is defined

    def __post_init__(self):
        if self.max_steps <= 0 or self.max_depth <= 0 or self.max_nodes <= 0:
            raise ValueError("search bounds must be positive")
        if self.flaw_policy not in FLAW_POLICIES:
            raise ValueError(f"unknown flaw policy {self.flaw_policy}")
        if self.reuse_policy not in REUSE_POLICIES:
            raise ValueError(f"unknown reuse policy {self.reuse_policy}")


@dataclass(frozen=True)
class SearchStats:
    nodes_expanded: int
    backtracks: int
    max_depth: int


@dataclass(frozen=True)
class Solution:
    plan: Plan
    stats: SearchStats


@dataclass(frozen=True)
class Exhausted:
    stats: SearchStats


@dataclass(frozen=True)
class BudgetExceeded:
    stats: SearchStats


SearchOutcome = Solution | Exhausted | BudgetExceeded


def _remove_flaw(flaws, flaw):
    return tuple(f for f in flaws if f != flaw)


def _instantiate_operator(op, sid: int, iid: int, kind: str, depth: int) -> Step:
    return Step(
        sid=sid,
        name=op.name,
        params=tuple(rename_term(v, iid) for v in op.params),
        preconditions=tuple(rename_fresh(op.preconditions, iid)),
        effects=tuple(rename_fresh(op.effects, iid)),
        kind=kind,
        depth=depth,
    )


def _with_membership(plan: Plan, producer: int, consumer: int) -> Plan | None:
    """Pull a producer into the subplan whose goals it establishes.

    When a causal link targets an end-subplan step, the producer joins that
    decomposition link's members unless it is the begin step, already a
    member, or already ordered before the whole subplan.
    """
    consumer_step = plan.step(consumer)
    if consumer_step.kind != KIND_END:
        return plan
    for i, d in enumerate(plan.decomposition_links):
        if d.end != consumer:
            continue
        if producer in d.members or producer == d.begin or producer == d.parent:
            return plan
        if plan.reaches(plan.end_of(producer), d.begin):
            return plan
        plan = add_ordering(plan, d.begin, producer)
        if plan is None:
            return None
        links = list(plan.decomposition_links)
        links[i] = replace(d, members=tuple(sorted(d.members + (producer,))))
        return plan.evolve(decomposition_links=tuple(links))
    return plan


def refine_causal(plan: Plan, flaw: OpenCondition, domain: Domain) -> list[Plan]:
    """One successor per reusable producer plus one per applicable operator.

    Each successor adds the causal link, its unifying binding constraints, the
    producer-before-consumer ordering, and for a fresh step its open
    preconditions (plus an expansion flaw when composite). An empty list is
    the backtrack signal.
    """
    out = []
    consumer = plan.step(flaw.consumer)
    base_flaws = _remove_flaw(plan.flaws, flaw)

    # Reuse, smallest step id first.
    for s in plan.steps:
        if s.sid == flaw.consumer or s.kind == KIND_FINAL:
            continue
        b = producer_bindings(plan, s, flaw.condition)
        if b is None:
            continue
        child = plan.evolve(
            bindings=b,
            causal_links=plan.causal_links + (CausalLink(s.sid, flaw.condition, flaw.consumer),),
            flaws=base_flaws,
        )
        child = add_ordering(child, s.sid, flaw.consumer)
        if child is None:
            continue
        child = _with_membership(child, s.sid, flaw.consumer)
        if child is not None:
            out.append(child)

    # Fresh instantiation per operator, declaration order.
    for op in domain.operators:
        iid = plan.next_iid
        sid = plan.next_sid
        kind = KIND_COMPOSITE if op.composite else KIND_PRIMITIVE
        step = _instantiate_operator(op, sid, iid, kind, consumer.depth)
        b = None
        for e in step.effects:
            b = unify(e, flaw.condition, plan.bindings)
            if b is not None:
                break
        if b is None:
            continue
        new_flaws = base_flaws + tuple(OpenCondition(sid, p) for p in step.preconditions)
        if op.composite:
            new_flaws += (UnexpandedComposite(sid),)
        child = plan.evolve(
            steps=plan.steps + (step,),
            orderings=plan.orderings | {(0, sid), (sid, 1)},
            bindings=b,
            causal_links=plan.causal_links + (CausalLink(sid, flaw.condition, flaw.consumer),),
            flaws=new_flaws,
            next_sid=sid + 1,
            next_iid=iid + 1,
        )
        child = add_ordering(child, sid, flaw.consumer)
        if child is None:
            continue
        child = _with_membership(child, sid, flaw.consumer)
        if child is not None:
            out.append(child)
    return out


def _template_choices(plan: Plan, parent: Step, template, policy: str) -> list[int | None]:
    """Realization choices for one schema step template; None means a fresh step."""
    reusable = [
        s.sid
        for s in plan.steps
        if s.name == template.action
        and s.kind in (KIND_PRIMITIVE, KIND_COMPOSITE)
        and s.sid != parent.sid
    ]
    if policy == "prefer-new":
        return [None]
    if policy == "prefer-reuse" and reusable:
        return list(reusable)
    return list(reusable) + [None]


def _instantiate_links(plan_steps, links, label_sid, bindings, open_map):
    """Assign each link template a producer effect and a consumer open precondition.

    Yields (bindings, causal links, consumed set) for every consistent joint
    assignment, in declaration order. `open_map` maps a step id to the indices
    of its still-open preconditions.
    """

    def rec(i, bs, acc, consumed):
        if i == len(links):
            yield bs, tuple(acc), consumed
            return
        t = links[i]
        producer = label_sid[t.producer]
        consumer = label_sid[t.consumer]
        pstep = plan_steps[producer]
        cstep = plan_steps[consumer]
        for e in pstep.effects:
            b1 = unify(e, t.condition, bs)
            if b1 is None:
                continue
            for j in open_map.get(consumer, ()):
                if (consumer, j) in consumed:
                    continue
                b2 = unify(t.condition, cstep.preconditions[j], b1)
                if b2 is None:
                    continue
                link = CausalLink(producer, cstep.preconditions[j], consumer)
                yield from rec(i + 1, b2, acc + [link], consumed | {(consumer, j)})

    yield from rec(0, bindings, [], frozenset())


def refine_decomposition(
    plan: Plan,
    flaw: UnexpandedComposite,
    domain: Domain,
    kb: KnowledgeBase,
    reuse_policy: str = "both-branches",
) -> list[Plan]:
    """One successor per schema, kb-satisfying binding, and step realization choice.

    Adds the begin/end boundary steps (the begin step's effects copy the
    parent's preconditions; the end step's preconditions copy the parent's
    effects), the schema's internal links, orderings and bindings, and the
    decomposition link carrying the instantiated informational constraints.
    The end step's unsupported preconditions open as flaws. An empty list is
    the backtrack signal.
    """
    parent = plan.step(flaw.step)
    out = []
    for schema in domain.schemata_for(parent.name):
        sigma = plan.next_iid
        header = tuple(rename_term(t, sigma) for t in schema.params)
        b0: BindingSet | None = plan.bindings
        for h, p in zip(header, parent.params):
            b0 = unify_terms(h, p, b0)
            if b0 is None:
                break
        if b0 is None or len(header) != len(parent.params):
            continue
        constraints = rename_fresh(schema.constraints, sigma)
        static = tuple(
            replace(c, left=rename_term(c.left, sigma), right=rename_term(c.right, sigma))
            for c in schema.bindings
        )
        for b1 in kb_satisfy(kb, constraints, b0):
            b2 = apply_binding_constraints(static, b1)
            if b2 is None:
                continue
            choice_lists = [
                _template_choices(plan, parent, t, reuse_policy) for t in schema.steps
            ]
            for combo in itertools.product(*choice_lists):
                chosen = [c for c in combo if c is not None]
                if len(chosen) != len(set(chosen)):
                    continue
                child = _expand(plan, parent, flaw, schema, sigma, b2, combo, constraints, domain)
                if child is not None:
                    out.append(child)
    return out


def _expand(plan, parent, flaw, schema, sigma, bindings, combo, constraints, domain):
    begin_sid = plan.next_sid
    end_sid = begin_sid + 1
    next_sid = end_sid + 1
    next_iid = sigma + 1
    depth = parent.depth + 1

    begin = Step(begin_sid, KIND_BEGIN, parent.params, (), parent.preconditions, KIND_BEGIN, depth)
    end = Step(end_sid, KIND_END, parent.params, parent.effects, (), KIND_END, depth)

    new_steps: list[Step] = []
    label_sid: dict[str, int] = {"start": begin_sid, "final": end_sid}
    members: list[int] = []

    for template, choice in zip(schema.steps, combo):
        targs = tuple(rename_term(a, sigma) for a in template.args)
        if choice is None:
            op = domain.operator(template.action)
            step = _instantiate_operator(
                op,
                next_sid,
                next_iid,
                KIND_COMPOSITE if op.composite else KIND_PRIMITIVE,
                depth,
            )
            next_sid += 1
            next_iid += 1
            new_steps.append(step)
            sid = step.sid
            params = step.params
        else:
            sid = choice
            params = plan.step(choice).params
        for pv, ta in zip(params, targs):
            bindings = unify_terms(pv, ta, bindings)
            if bindings is None:
                return None
        label_sid[template.label] = sid
        members.append(sid)

    all_steps = plan.steps + (begin, end) + tuple(new_steps)
    step_index = {s.sid: s for s in all_steps}

    # Which preconditions are open for link templates to establish: all of a
    # fresh step's or the end step's, only the currently open ones of a reused step.
    open_map: dict[int, list[int]] = {end_sid: list(range(len(end.preconditions)))}
    for s in new_steps:
        open_map[s.sid] = list(range(len(s.preconditions)))
    for sid in members:
        if sid in open_map:
            continue
        reused = plan.step(sid)
        open_map[sid] = [
            j
            for j, p in enumerate(reused.preconditions)
            if any(f.consumer == sid and f.condition == p for f in plan.flaws if isinstance(f, OpenCondition))
        ]

    link_templates = [rename_link(t, sigma) for t in schema.links]
    assignment = next(
        _instantiate_links(step_index, link_templates, label_sid, bindings, open_map), None
    )
    if assignment is None:
        return None
    bindings, schema_links, consumed = assignment

    # Interval bookkeeping: rewrite existing pairs touching the parent onto its
    # boundaries, keep the parent floating inside its own interval.
    intervals = dict(plan.intervals)
    intervals[parent.sid] = (begin_sid, end_sid)
    pairs = set()
    for a, b in plan.orderings:
        if b == parent.sid:
            pairs.add((a, begin_sid))
        elif a == parent.sid:
            pairs.add((end_sid, b))
        else:
            pairs.add((a, b))
    pairs.add((begin_sid, parent.sid))
    pairs.add((parent.sid, end_sid))

    def endpoint(sid):
        return intervals.get(sid, (sid, sid))

    for m in members:
        pairs.add((begin_sid, endpoint(m)[0]))
        pairs.add((endpoint(m)[1], end_sid))
    for a_label, b_label in schema.orderings:
        a, b = label_sid[a_label], label_sid[b_label]
        pairs.add((endpoint(a)[1], endpoint(b)[0]))
    for link in schema_links:
        pairs.add((endpoint(link.producer)[1], endpoint(link.consumer)[0]))
    for s in new_steps:
        pairs.add((0, s.sid))
        pairs.add((s.sid, 1))

    # Flaw agenda: drop the expansion flaw and any open condition a schema link
    # now supports; open the rest of the fresh members' and end's preconditions.
    closed = {(l.consumer, l.condition) for l in schema_links}
    flaws = [
        f
        for f in plan.flaws
        if f != flaw
        and not (isinstance(f, OpenCondition) and (f.consumer, f.condition) in closed)
    ]
    for s in new_steps:
        for p in s.preconditions:
            if (s.sid, p) not in closed:
                flaws.append(OpenCondition(s.sid, p))
        if s.kind == KIND_COMPOSITE:
            flaws.append(UnexpandedComposite(s.sid))
    for p in end.preconditions:
        if (end_sid, p) not in closed:
            flaws.append(OpenCondition(end_sid, p))

    dlink = DecompositionLink(
        parent=parent.sid,
        begin=begin_sid,
        end=end_sid,
        members=tuple(sorted(set(members))),
        schema=schema.action,
        constraints=tuple(constraints),
        correspondence=tuple((i, i) for i in range(len(parent.effects))),
    )
    child = plan.evolve(
        steps=all_steps,
        orderings=frozenset(pairs),
        bindings=bindings,
        causal_links=plan.causal_links + schema_links,
        decomposition_links=plan.decomposition_links + (dlink,),
        flaws=tuple(flaws),
        intervals=intervals,
        next_sid=next_sid,
        next_iid=next_iid,
    )
    if not child.is_acyclic:
        return None
    return child


def rename_link(t, sigma):
    return LinkTemplate(t.producer, rename_fresh([t.condition], sigma)[0], t.consumer)


def _separation_pairs(bindings: BindingSet, effect: Literal, negated: Literal):
    """Argument pairs whose non-codesignation would block the harmful unification."""
    pairs: list[tuple[Term, Term]] = []

    def rec(x: Term, y: Term):
        x = bindings.resolve(x)
        y = bindings.resolve(y)
        if x == y:
            return
        if (
            isinstance(x, Compound)
            and isinstance(y, Compound)
            and x.functor == y.functor
            and len(x.args) == len(y.args)
        ):
            for xa, ya in zip(x.args, y.args):
                rec(xa, ya)
        else:
            if (x, y) not in pairs:
                pairs.append((x, y))

    for xa, ya in zip(effect.args, negated.args):
        rec(xa, ya)
    return pairs


def resolve_threat(plan: Plan, flaw: Threat) -> list[Plan]:
    """Promotion, demotion, then one separation successor per blocking pair.

    Every returned successor provably removes this (step, link) threat;
    an empty list is the backtrack signal.
    """
    out = []
    link = flaw.link
    promoted = add_ordering(plan, link.consumer, flaw.step)
    if promoted is not None:
        out.append(promoted)
    demoted = add_ordering(plan, flaw.step, link.producer)
    if demoted is not None:
        out.append(demoted)
    negated = link.condition.negate()
    threat_step = plan.step(flaw.step)
    for e in threat_step.effects:
        if e.predicate != negated.predicate or e.positive != negated.positive:
            continue
        if unify(e, negated, plan.bindings) is None:
            continue
        for x, y in _separation_pairs(plan.bindings, e, negated):
            b = add_noncodesignation(plan.bindings, x, y)
            if b is None:
                continue
            child = plan.evolve(bindings=b)
            # A single pair may leave another effect of the same step harmful;
            # only keep successors that actually disarm this threat.
            if flaw not in detect_threats(child):
                out.append(child)
    return out


def _elide_vertex(pairs: set, sid: int) -> set:
    """Remove sid from the ordering graph, keeping the order it mediated."""
    into = {a for a, b in pairs if b == sid}
    out_of = {b for a, b in pairs if a == sid}
    kept = {(a, b) for a, b in pairs if sid not in (a, b)}
    kept.update((a, b) for a in into for b in out_of if a != b)
    return kept


def prune_unused(plan: Plan) -> Plan:
    """Drop primitive steps with no outgoing causal link, to fixpoint.

    Boundary steps survive. Removing a step removes its incoming links and
    decomposition memberships; orderings it mediated between surviving steps
    are preserved, so the pruned plan admits no new linearizations.
    """
    while True:
        producers = {l.producer for l in plan.causal_links}
        removable = {
            s.sid for s in plan.steps if s.kind == KIND_PRIMITIVE and s.sid not in producers
        }
        if not removable:
            return plan
        pairs = set(plan.orderings)
        for sid in sorted(removable):
            pairs = _elide_vertex(pairs, sid)
        plan = plan.evolve(
            steps=tuple(s for s in plan.steps if s.sid not in removable),
            orderings=frozenset(pairs),
            causal_links=tuple(l for l in plan.causal_links if l.consumer not in removable),
            decomposition_links=tuple(
                replace(d, members=tuple(m for m in d.members if m not in removable))
                for d in plan.decomposition_links
            ),
            flaws=tuple(
                f
                for f in plan.flaws
                if not (isinstance(f, OpenCondition) and f.consumer in removable)
            ),
        )


def _select_flaw(plan: Plan, threats: list[Threat], policy: str):
    if policy == "threats-first":
        if threats:
            return threats[0]
        return plan.flaws[0] if plan.flaws else None
    if policy == "fifo":
        if plan.flaws:
            return plan.flaws[0]
        return threats[0] if threats else None
    if plan.flaws:
        return plan.flaws[-1]
    return threats[0] if threats else None


def solve(domain: Domain, problem: Problem, config: SearchConfig | None = None) -> SearchOutcome:
    """Depth-first refinement search; deterministic for a fixed configuration.

    Returns Solution when a plan with an empty flaw agenda is reached (after
    pruning unused steps), Exhausted when the bounded space holds no solution,
    and BudgetExceeded when the node budget runs out first.
    """
    config = config or SearchConfig()
    issues = validate_domain(domain) + validate_problem(domain, problem)
    if issues:
        raise DomainValidationError("; ".join(issues))
    kb = knowledge_base(domain, problem)

    nodes = 0
    backtracks = 0
    max_depth_seen = 0
    stack: list = [iter([init_plan(problem)])]
    while stack:
        max_depth_seen = max(max_depth_seen, len(stack))
        plan = next(stack[-1], None)
        if plan is None:
            stack.pop()
            backtracks += 1
            continue
        nodes += 1
        if nodes > config.max_nodes:
            return BudgetExceeded(SearchStats(nodes - 1, backtracks, max_depth_seen))
        threats = detect_threats(plan)
        flaw = _select_flaw(plan, threats, config.flaw_policy)
        if flaw is None:
            return Solution(
                prune_unused(plan), SearchStats(nodes, backtracks, max_depth_seen)
            )
        if isinstance(flaw, Threat):
            successors = resolve_threat(plan, flaw)
        elif isinstance(flaw, OpenCondition):
            successors = refine_causal(plan, flaw, domain)
        else:
            if plan.step(flaw.step).depth + 1 > config.max_depth:
                successors = []
            else:
                successors = refine_decomposition(plan, flaw, domain, kb, config.reuse_policy)
        successors = [p for p in successors if len(p.steps) <= config.max_steps]
        stack.append(iter(successors))
    return Exhausted(SearchStats(nodes, backtracks, max_depth_seen))
