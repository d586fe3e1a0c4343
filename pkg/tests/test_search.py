"""The refinement search: causal, decompositional, threats, pruning, determinism."""
import random

from discoplan.model import (
    ActionOperator,
    BindingConstraint,
    DecompositionSchema,
    Domain,
    LinkTemplate,
    Problem,
    StepTemplate,
    knowledge_base,
    operators_achieving,
)
from discoplan.plan import (
    CausalLink,
    OpenCondition,
    Threat,
    UnexpandedComposite,
    add_ordering,
    check_invariants,
    detect_threats,
    init_plan,
    producer_bindings,
)
from discoplan.search import (
    BudgetExceeded,
    Exhausted,
    SearchConfig,
    Solution,
    prune_unused,
    refine_causal,
    refine_decomposition,
    resolve_threat,
    solve,
)
from discoplan.oracle import verify_soundness
from discoplan.terms import Compound, Constant, Literal, Variable, apply
from _worlds import (
    boundary_steps,
    flat_step,
    lit,
    load_domain,
    load_problem,
    make_plan,
    marks_domain,
    marks_problem,
    step_leftmost,
)

L, B = Constant("l"), Constant("b")
FAIREST = Compound("fairest", (L, B))
MODELED = Compound("modeled", (L, B))
CAUSES = Compound("causes", (FAIREST, MODELED))


def applied_step_names(plan):
    return {
        s.sid: (s.name, tuple(str(apply(plan.bindings, Literal("x", (a,)))) for a in s.params))
        for s in plan.steps
    }


def test_solve_discourse_reproduces_the_supported_subplan():
    domain = load_domain("discourse.dpd")
    problem = load_problem("lucentio.dpp")
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    plan = out.plan
    supports = [s for s in plan.steps if s.name == "support"]
    assert len(supports) == 1
    (deco,) = plan.decomposition_links
    member_sigs = sorted(
        (plan.step(m).name, tuple(str(apply(plan.bindings, lit("x", a)).args[0]) for a in plan.step(m).params))
        for m in deco.members
    )
    assert member_sigs == [
        ("cause-to-believe", (str(CAUSES),)),
        ("cause-to-believe", (str(FAIREST),)),
        ("combine-belief", (str(FAIREST), str(MODELED))),
    ]
    assert any(l.consumer == deco.end for l in plan.causal_links)
    assert check_invariants(plan) == []


def test_solve_trivial_goal_links_initial_to_final():
    domain = load_domain("switches.dpd")
    problem = Problem("t", "switches", init=(lit("on", L),), goals=(lit("on", L),))
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    assert len(out.plan.steps) == 2
    assert out.plan.causal_links == (CausalLink(0, out.plan.final.preconditions[0], 1),)


def test_solve_is_deterministic():
    domain = load_domain("discourse.dpd")
    problem = load_problem("multirole.dpp")
    a = solve(domain, problem)
    b = solve(domain, problem)
    assert a == b


def test_refine_causal_offers_both_operators_for_open_belief():
    domain = load_domain("discourse.dpd")
    problem = load_problem("lucentio.dpp")
    plan = init_plan(problem)
    succ = refine_causal(plan, plan.flaws[0], domain)
    names = [p.steps[-1].name for p in succ]
    assert "support" in names and "cause-to-believe" in names


def test_refine_causal_reuses_initial_with_zero_new_steps():
    domain = load_domain("switches.dpd")
    problem = Problem("t", "switches", init=(lit("on", L),), goals=(lit("on", L),))
    plan = init_plan(problem)
    succ = refine_causal(plan, plan.flaws[0], domain)
    assert len(succ[0].steps) == len(plan.steps)
    assert succ[0].causal_links[0].producer == 0


def test_refine_causal_successor_count_matches_exhaustive_scan():
    domain = load_domain("discourse.dpd")
    problem = load_problem("multirole.dpp")
    visited, successor_sets = step_leftmost(domain, problem)
    for plan, flaw, succ in successor_sets:
        if not isinstance(flaw, OpenCondition):
            continue
        reusable = 0
        for s in plan.steps:
            if s.sid == flaw.consumer or s.kind == "final":
                continue
            if producer_bindings(plan, s, flaw.condition) is None:
                continue
            if add_ordering(plan, s.sid, flaw.consumer) is None:
                continue
            reusable += 1
        applicable = len(operators_achieving(domain, apply(plan.bindings, flaw.condition)))
        assert len(succ) == reusable + applicable


def test_refine_decomposition_single_kb_binding():
    domain = load_domain("discourse.dpd")
    problem = load_problem("lucentio.dpp")
    plan, flaw = step_leftmost(
        domain, problem, stop=lambda p, f: isinstance(f, UnexpandedComposite)
    )
    kb = knowledge_base(domain, problem)
    succ = refine_decomposition(plan, flaw, domain, kb)
    assert len(succ) == 1
    child = succ[0]
    (deco,) = child.decomposition_links
    constraint = apply(child.bindings, deco.constraints[0])
    assert constraint == lit("causes", FAIREST, MODELED)


def test_refine_decomposition_no_schema_backtracks():
    domain = Domain(
        name="d",
        predicates={"g": 0},
        operators=(ActionOperator("top", (), (), (lit("g"),), composite=True),),
    )
    problem = Problem("p", "d", goals=(lit("g"),))
    plan = init_plan(problem)
    succ = refine_causal(plan, plan.flaws[0], domain)
    expansion = next(f for f in succ[0].flaws if isinstance(f, UnexpandedComposite))
    assert refine_decomposition(succ[0], expansion, domain, knowledge_base(domain, problem)) == []


def test_refine_decomposition_can_share_a_member_between_parents():
    domain = load_domain("discourse.dpd")
    problem = load_problem("multirole.dpp")

    def second_expansion(plan, flaw):
        return isinstance(flaw, UnexpandedComposite) and len(plan.decomposition_links) == 1

    plan, flaw = step_leftmost(domain, problem, stop=second_expansion)
    kb = knowledge_base(domain, problem)
    succ = refine_decomposition(plan, flaw, domain, kb)
    existing = set(plan.decomposition_links[0].members)
    sharing = [
        p
        for p in succ
        if set(p.decomposition_links[1].members) & existing
    ]
    assert sharing, "no successor shares a step between both decomposition links"


def _threat_fixture(extra_orderings=()):
    steps = boundary_steps() + (
        flat_step(2, "maker", eff=(lit("on", L),)),
        flat_step(3, "user", pre=(lit("on", L),)),
        flat_step(4, "wrecker", eff=(lit("on", L, positive=False),)),
    )
    orderings = {(0, s) for s in (2, 3, 4)} | {(s, 1) for s in (2, 3, 4)} | {(2, 3)}
    orderings |= set(extra_orderings)
    link = CausalLink(2, lit("on", L), 3)
    plan = make_plan(steps, orderings, (link,))
    return plan, Threat(4, link)


def test_resolve_threat_ground_unordered_promotes_and_demotes():
    plan, threat = _threat_fixture()
    assert [t for t in detect_threats(plan)] == [threat]
    succ = resolve_threat(plan, threat)
    assert len(succ) == 2
    promoted, demoted = succ
    assert promoted.reaches(3, 4)
    assert demoted.reaches(4, 2)
    for child in succ:
        assert threat not in detect_threats(child)


def test_resolve_threat_forced_inside_interval_is_dead():
    plan, threat = _threat_fixture(extra_orderings={(2, 4), (4, 3)})
    assert resolve_threat(plan, threat) == []


def test_resolve_threat_separation_blocks_unification():
    x = Variable("x", 9)
    steps = boundary_steps() + (
        flat_step(2, "maker", eff=(lit("on", L),)),
        flat_step(3, "user", pre=(lit("on", L),)),
        flat_step(4, "wrecker", eff=(lit("on", x, positive=False),)),
    )
    orderings = {(0, s) for s in (2, 3, 4)} | {(s, 1) for s in (2, 3, 4)} | {(2, 3)}
    link = CausalLink(2, lit("on", L), 3)
    plan = make_plan(steps, orderings, (link,))
    threat = Threat(4, link)
    succ = resolve_threat(plan, threat)
    # promotion, demotion, and one separation pair (x vs l)
    assert len(succ) == 3
    separated = succ[-1]
    assert separated.bindings.distinct
    assert threat not in detect_threats(separated)


def test_resolve_threat_successors_strictly_reduce_link_threats():
    rng = random.Random(23)
    for _ in range(40):
        n = rng.randrange(2, 5)
        steps = list(boundary_steps())
        orderings = set()
        for i in range(2, 2 + n):
            pos = rng.random() < 0.5
            steps.append(
                flat_step(
                    i,
                    f"s{i}",
                    eff=(lit("on", rng.choice([L, B]), positive=pos),),
                )
            )
            orderings |= {(0, i), (i, 1)}
        maker, user = 2, 3
        steps[2] = flat_step(2, "maker", eff=(lit("on", L),))
        steps[3] = flat_step(3, "user", pre=(lit("on", L),))
        orderings.add((2, 3))
        link = CausalLink(2, lit("on", L), 3)
        plan = make_plan(tuple(steps), orderings, (link,))
        for threat in detect_threats(plan):
            before = sum(1 for t in detect_threats(plan) if t.link == threat.link)
            for child in resolve_threat(plan, threat):
                after = sum(1 for t in detect_threats(child) if t.link == threat.link)
                assert after < before


def test_prune_removes_step_with_no_outgoing_link():
    domain = load_domain("switches.dpd")
    problem = Problem("t", "switches", init=(lit("on", L),), goals=(lit("on", L),))
    out = solve(domain, problem)
    plan = out.plan
    dangler = flat_step(9, "dangler", eff=(lit("off", B),))
    bloated = plan.evolve(
        steps=plan.steps + (dangler,),
        orderings=plan.orderings | {(0, 9), (9, 1)},
        next_sid=10,
    )
    pruned = prune_unused(bloated)
    assert all(s.sid != 9 for s in pruned.steps)
    assert pruned.causal_links == plan.causal_links


def test_prune_cascades_to_fixpoint():
    # b feeds only a; a feeds nothing; both must go
    steps = boundary_steps((), (lit("g"),)) + (
        flat_step(2, "root", eff=(lit("g"),)),
        flat_step(3, "a", pre=(lit("m"),), eff=(lit("u"),)),
        flat_step(4, "b", eff=(lit("m"),)),
    )
    orderings = {(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1), (4, 3)}
    links = (
        CausalLink(2, lit("g"), 1),
        CausalLink(4, lit("m"), 3),
    )
    plan = make_plan(steps, orderings, links)
    pruned = prune_unused(plan)
    assert {s.sid for s in pruned.steps} == {0, 1, 2}
    assert len(pruned.causal_links) == 1


def test_prune_preserves_orderings_mediated_by_removed_steps():
    # x < m < y with the middle step unused: after pruning, x must still
    # precede y or new linearizations (and threats) could appear
    steps = boundary_steps((), (lit("g"),)) + (
        flat_step(2, "x", eff=(lit("g"),)),
        flat_step(3, "m", eff=(lit("waste"),)),
        flat_step(4, "y", eff=(lit("g2"),)),
    )
    orderings = {(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1), (2, 3), (3, 4)}
    links = (
        CausalLink(2, lit("g"), 1),
        CausalLink(4, lit("g2"), 1),
    )
    final = steps[1].__class__(
        1, "final", (), (lit("g"), lit("g2")), (), "final"
    )
    plan = make_plan((steps[0], final) + steps[2:], orderings, links)
    pruned = prune_unused(plan)
    assert {s.sid for s in pruned.steps} == {0, 1, 2, 4}
    assert pruned.reaches(2, 4)


def test_prune_keeps_fully_linked_solution_unchanged():
    domain = load_domain("discourse.dpd")
    problem = load_problem("lucentio.dpp")
    out = solve(domain, problem)
    assert prune_unused(out.plan) == out.plan


def test_pruned_plan_still_passes_the_audit():
    domain = load_domain("switches.dpd")
    problem = load_problem("switches-demo.dpp")
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    pruned = prune_unused(out.plan)
    assert verify_soundness(pruned, problem).ok


def test_solution_plans_satisfy_solution_invariants():
    for dname, pname in [
        ("discourse.dpd", "lucentio.dpp"),
        ("discourse.dpd", "multirole.dpp"),
        ("sidefx.dpd", "sidefx.dpp"),
        ("switches.dpd", "switches-demo.dpp"),
    ]:
        domain, problem = load_domain(dname), load_problem(pname)
        out = solve(domain, problem)
        assert isinstance(out, Solution)
        plan = out.plan
        assert plan.flaws == ()
        assert detect_threats(plan) == []
        assert check_invariants(plan) == []
        supported = {}
        for l in plan.causal_links:
            supported[(l.consumer, l.condition)] = supported.get((l.consumer, l.condition), 0) + 1
        for s in plan.steps:
            for p in s.preconditions:
                assert supported.get((s.sid, p)) == 1
        for s in plan.steps:
            if s.kind == "composite":
                assert sum(1 for d in plan.decomposition_links if d.parent == s.sid) == 1


def test_invariants_hold_on_every_visited_plan_and_successor():
    for dname, pname in [
        ("discourse.dpd", "multirole.dpp"),
        ("switches.dpd", "switches-demo.dpp"),
    ]:
        domain, problem = load_domain(dname), load_problem(pname)
        visited, successor_sets = step_leftmost(domain, problem)
        for plan in visited:
            assert check_invariants(plan) == []
        for _, _, succ in successor_sets:
            for child in succ:
                assert check_invariants(child) == []


def test_separation_solution_is_sound():
    domain, problem = marks_domain(), marks_problem()
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    assert out.plan.bindings.distinct
    assert verify_soundness(out.plan, problem).ok


def test_nested_composites_expand_with_increasing_depth():
    domain = Domain(
        name="nest",
        predicates={"g": 0},
        operators=(
            ActionOperator("outer", (), (), (lit("g"),), composite=True),
            ActionOperator("inner", (), (), (lit("g"),), composite=True),
            ActionOperator("work", (), (), (lit("g"),)),
        ),
        schemata=(
            DecompositionSchema(
                "outer", (), steps=(StepTemplate("i1", "inner", ()),),
                links=(LinkTemplate("i1", lit("g"), "final"),),
            ),
            DecompositionSchema(
                "inner", (), steps=(StepTemplate("w", "work", ()),),
                links=(LinkTemplate("w", lit("g"), "final"),),
            ),
        ),
    )
    problem = Problem("n", "nest", goals=(lit("g"),))
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    depths = {s.name: s.depth for s in out.plan.steps}
    assert depths["outer"] == 0 and depths["inner"] == 1 and depths["work"] == 2
    assert verify_soundness(out.plan, problem).ok
    # a depth budget of one prunes the nested route; whatever the search
    # returns instead, no step may sit deeper than the bound
    shallow = solve(domain, problem, SearchConfig(max_depth=1))
    assert isinstance(shallow, Solution)
    assert max(s.depth for s in shallow.plan.steps) <= 1


def test_unsolvable_within_bounds_is_exhausted_not_budget():
    domain = load_domain("switches.dpd")
    impossible = Problem(
        "imp", "switches", init=(lit("off", L),), goals=(lit("on", L), lit("off", L))
    )
    out = solve(domain, impossible, SearchConfig(max_steps=6))
    assert isinstance(out, Exhausted)


def test_node_budget_exhaustion_is_reported():
    domain = load_domain("switches.dpd")
    impossible = Problem(
        "imp", "switches", init=(lit("off", L),), goals=(lit("on", L), lit("off", L))
    )
    out = solve(domain, impossible, SearchConfig(max_nodes=2))
    assert isinstance(out, BudgetExceeded)


def test_flaw_policies_all_reach_a_solution():
    domain = load_domain("switches.dpd")
    problem = load_problem("switches-demo.dpp")
    for policy in ("threats-first", "fifo", "lifo"):
        out = solve(domain, problem, SearchConfig(flaw_policy=policy))
        assert isinstance(out, Solution), policy
        assert verify_soundness(out.plan, problem).ok


def test_schema_static_bindings_filter_kb_matches():
    x, y = Constant("x"), Constant("y")
    a, b = Variable("a"), Variable("b")
    domain = Domain(
        name="pairs",
        predicates={"ok": 0, "marked": 1},
        kb_predicates={"rel": 1},
        operators=(
            ActionOperator("pick2", (), (), (lit("ok"),), composite=True),
            ActionOperator("mark", (Variable("m"),), (), (lit("marked", Variable("m")),)),
            ActionOperator("finish", (), (), (lit("ok"),)),
        ),
        schemata=(
            DecompositionSchema(
                "pick2",
                (),
                constraints=(lit("rel", a), lit("rel", b)),
                steps=(
                    StepTemplate("s1", "mark", (a,)),
                    StepTemplate("s2", "mark", (b,)),
                    StepTemplate("s3", "finish", ()),
                ),
                links=(LinkTemplate("s3", lit("ok"), "final"),),
                bindings=(BindingConstraint("neq", a, b),),
            ),
        ),
    )
    problem = Problem("p", "pairs", facts=(lit("rel", x), lit("rel", y)), goals=(lit("ok"),))
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    (deco,) = out.plan.decomposition_links
    instantiated = [apply(out.plan.bindings, c) for c in deco.constraints]
    # without the neq constraint the leftmost kb match would pick x twice
    assert instantiated == [lit("rel", x), lit("rel", y)]


def _relay_domain():
    return Domain(
        name="relay",
        predicates={"thing": 0, "done": 0},
        operators=(
            ActionOperator("top", (), (), (lit("done"),), composite=True),
            ActionOperator("maker", (), (), (lit("thing"),)),
            ActionOperator("user", (), (lit("thing"),), (lit("done"),)),
        ),
        schemata=(
            DecompositionSchema(
                "top",
                (),
                steps=(StepTemplate("x", "maker", ()), StepTemplate("y", "user", ())),
                links=(
                    LinkTemplate("x", lit("thing"), "y"),
                    LinkTemplate("y", lit("done"), "final"),
                ),
            ),
        ),
    )


def _relay_expansion_fixture(user_supported):
    """A plan holding one user step and one unexpanded top composite.

    The user step's precondition is either already causally supported or
    still open, steering whether a schema link may adopt it.
    """
    from discoplan.plan import Step

    thing, done = lit("thing"), lit("done")
    initial = Step(0, "initial", (), (), (thing,), "initial")
    final = Step(1, "final", (), (done,), (), "final")
    user = Step(2, "user", (), (thing,), (done,), "primitive")
    top = Step(3, "top", (), (), (done,), "composite")
    links = [CausalLink(3, done, 1)]
    flaws = [UnexpandedComposite(3)]
    if user_supported:
        links.append(CausalLink(0, thing, 2))
    else:
        flaws.append(OpenCondition(2, thing))
    plan = make_plan(
        (initial, final, user, top),
        orderings={(0, 2), (2, 1), (0, 3), (3, 1)},
        links=tuple(links),
        flaws=tuple(flaws),
    )
    return plan, UnexpandedComposite(3)


def test_internal_link_cannot_resupply_a_supported_reused_step():
    domain = _relay_domain()
    kb = knowledge_base(domain, Problem("p", "relay", goals=(lit("done"),)))

    plan, flaw = _relay_expansion_fixture(user_supported=True)
    succ = refine_decomposition(plan, flaw, domain, kb)
    assert succ, "fresh realizations must still exist"
    for child in succ:
        (deco,) = child.decomposition_links
        assert 2 not in deco.members  # the supported user is never adopted

    open_plan, flaw = _relay_expansion_fixture(user_supported=False)
    succ = refine_decomposition(open_plan, flaw, domain, kb)
    adopting = [c for c in succ if 2 in c.decomposition_links[0].members]
    assert adopting, "an open user step is adoptable"
    child = adopting[0]
    # the schema link now supports the adopted step's precondition
    assert not any(
        isinstance(f, OpenCondition) and f.consumer == 2 for f in child.flaws
    )
    assert any(l.consumer == 2 and l.condition == lit("thing") for l in child.causal_links)


def test_alternative_schemata_are_backtrackable_choice_points():
    # First schema's constraint never holds, so search must fall through to
    # the second schema for the same composite action.
    a = Variable("a")
    domain = Domain(
        name="two-ways",
        predicates={"done": 0, "step-taken": 1},
        kb_predicates={"blessed": 1, "cursed": 1},
        operators=(
            ActionOperator("goal-act", (), (), (lit("done"),), composite=True),
            ActionOperator("move", (Variable("m"),), (), (lit("step-taken", Variable("m")), lit("done"))),
        ),
        schemata=(
            DecompositionSchema(
                "goal-act", (),
                constraints=(lit("cursed", a),),
                steps=(StepTemplate("s1", "move", (a,)),),
                links=(LinkTemplate("s1", lit("done"), "final"),),
            ),
            DecompositionSchema(
                "goal-act", (),
                constraints=(lit("blessed", a),),
                steps=(StepTemplate("s1", "move", (a,)),),
                links=(LinkTemplate("s1", lit("done"), "final"),),
            ),
        ),
    )
    problem = Problem(
        "p", "two-ways", facts=(lit("blessed", Constant("x")),), goals=(lit("done"),)
    )
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    (deco,) = out.plan.decomposition_links
    instantiated = [apply(out.plan.bindings, c) for c in deco.constraints]
    assert instantiated == [lit("blessed", Constant("x"))]
    assert verify_soundness(out.plan, problem).ok


def test_prefer_reuse_commits_to_an_adoptable_step():
    # With an open user step available, prefer-reuse offers only the
    # adopting realization, while the default also keeps a fresh branch.
    domain = _relay_domain()
    kb = knowledge_base(domain, Problem("p", "relay", goals=(lit("done"),)))
    plan, flaw = _relay_expansion_fixture(user_supported=False)
    committed = refine_decomposition(plan, flaw, domain, kb, "prefer-reuse")
    assert committed
    assert all(2 in child.decomposition_links[0].members for child in committed)
    both = refine_decomposition(plan, flaw, domain, kb, "both-branches")
    assert len(both) > len(committed)
    assert any(2 not in child.decomposition_links[0].members for child in both)


def test_prefer_reuse_falls_back_to_fresh_steps():
    # nothing to reuse on the first expansion, so prefer-reuse must still
    # instantiate the schema steps
    domain = load_domain("discourse.dpd")
    problem = load_problem("lucentio.dpp")
    out = solve(domain, problem, SearchConfig(reuse_policy="prefer-reuse"))
    assert isinstance(out, Solution)
    assert verify_soundness(out.plan, problem).ok


def test_dead_schema_branch_backtracks_to_a_nested_composite():
    # Supporting the top proposition directly dead-ends (its cause is not
    # credible), so search must back out of that whole expansion and nest a
    # support one level down instead.
    L, B = Constant("l"), Constant("b")
    deep, mid, top = (Compound(n, (L, B)) for n in ("deep", "mid", "top"))
    domain = load_domain("discourse.dpd")
    problem = Problem(
        "nested",
        "discourse",
        facts=(lit("causes", deep, mid), lit("causes", mid, top)),
        init=(
            lit("credible", deep),
            lit("credible", Compound("causes", (deep, mid))),
            lit("credible", Compound("causes", (mid, top))),
        ),
        goals=(lit("bel", top),),
    )
    out = solve(domain, problem)
    assert isinstance(out, Solution)
    assert out.stats.backtracks > 0
    (deco,) = out.plan.decomposition_links
    assert apply(out.plan.bindings, out.plan.step(deco.parent).effects[0]) == lit("bel", mid)
    assert verify_soundness(out.plan, problem).ok


def test_exploratory_abstract_interleaving():
    # Two composite steps whose subplans interact through a shared resource.
    # Records whether bounded search still finds some plan; the restriction
    # on interleavings of abstract steps is not a gating property here.
    domain = Domain(
        name="inter",
        predicates={"free": 0, "done-a": 0, "done-b": 0},
        operators=(
            ActionOperator("taska", (), (), (lit("done-a"),), composite=True),
            ActionOperator("taskb", (), (), (lit("done-b"),), composite=True),
            ActionOperator("grab-a", (), (lit("free"),), (lit("done-a"), lit("free", positive=False))),
            ActionOperator("grab-b", (), (lit("free"),), (lit("done-b"), lit("free", positive=False))),
            ActionOperator("release", (), (), (lit("free"),)),
        ),
        schemata=(
            DecompositionSchema(
                "taska", (), steps=(StepTemplate("g", "grab-a", ()), StepTemplate("r", "release", ())),
                links=(LinkTemplate("g", lit("done-a"), "final"),),
                orderings=(("g", "r"),),
            ),
            DecompositionSchema(
                "taskb", (), steps=(StepTemplate("g", "grab-b", ()), StepTemplate("r", "release", ())),
                links=(LinkTemplate("g", lit("done-b"), "final"),),
                orderings=(("g", "r"),),
            ),
        ),
    )
    problem = Problem("i", "inter", init=(lit("free"),), goals=(lit("done-a"), lit("done-b")))
    out = solve(domain, problem, SearchConfig(max_steps=24))
    assert isinstance(out, (Solution, Exhausted, BudgetExceeded))
    if isinstance(out, Solution):
        assert verify_soundness(out.plan, problem).ok
