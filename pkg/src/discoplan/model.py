"""Action operators, decomposition schemata, the static knowledge base, and problems.

Each action is described in two parts: the operator (preconditions and
effects, STRIPS style) and zero or more decomposition schemata giving a
single-layer, partially specified subplan for a composite action. The
knowledge base holds static domain relations queried by schema constraints;
it never changes during planning.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .terms import (
    BindingSet,
    Compound,
    Literal,
    Term,
    Variable,
    add_noncodesignation,
    is_ground,
    rename_fresh,
    unify,
    unify_terms,
    variables_in,
)

RESERVED_LABELS = ("start", "final")


class DomainValidationError(Exception):
    """Raised when an operation is given input the validator would reject."""


@dataclass(frozen=True)
class BindingConstraint:
    """Static eq/neq constraint between two terms of one operator or schema."""

    kind: str  # "eq" | "neq"
    left: Term
    right: Term


@dataclass(frozen=True)
class ActionOperator:
    name: str
    params: tuple[Variable, ...]
    preconditions: tuple[Literal, ...]
    effects: tuple[Literal, ...]
    constraints: tuple[BindingConstraint, ...] = ()
    composite: bool = False


@dataclass(frozen=True)
class StepTemplate:
    label: str
    action: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class LinkTemplate:
    producer: str  # local label, or "start"
    condition: Literal
    consumer: str  # local label, or "final"


@dataclass(frozen=True)
class DecompositionSchema:
    """Partial subplan expanding one composite action by one layer.

    The header's variables are the interface; constraints and step templates
    may introduce new variables, existential within the schema and bound by
    knowledge-base matching at expansion time. Link and ordering labels refer
    to step templates or the reserved subplan boundaries "start" and "final".
    """

    action: str
    params: tuple[Term, ...]
    constraints: tuple[Literal, ...] = ()
    steps: tuple[StepTemplate, ...] = ()
    links: tuple[LinkTemplate, ...] = ()
    bindings: tuple[BindingConstraint, ...] = ()
    orderings: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class KnowledgeBase:
    """Ground positive facts over the kb vocabulary; closed world."""

    predicates: dict[str, int] = field(default_factory=dict)
    facts: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class Domain:
    name: str
    predicates: dict[str, int] = field(default_factory=dict)
    kb_predicates: dict[str, int] = field(default_factory=dict)
    operators: tuple[ActionOperator, ...] = ()
    schemata: tuple[DecompositionSchema, ...] = ()

    def operator(self, name: str) -> ActionOperator | None:
        for op in self.operators:
            if op.name == name:
                return op
        return None

    def schemata_for(self, name: str) -> tuple[DecompositionSchema, ...]:
        return tuple(s for s in self.schemata if s.action == name)


@dataclass(frozen=True)
class Problem:
    name: str
    domain_name: str
    facts: tuple[Literal, ...] = ()
    init: tuple[Literal, ...] = ()
    goals: tuple[Literal, ...] = ()


def _literal_arity_issues(lit: Literal, arities: dict[str, int], where: str) -> list[str]:
    issues = []
    declared = arities.get(lit.predicate)
    if declared is None:
        issues.append(f"{where}: undeclared predicate {lit.predicate}")
    elif declared != len(lit.args):
        issues.append(
            f"{where}: predicate {lit.predicate} declared with arity {declared}, used with {len(lit.args)}"
        )
    return issues


def _functor_issues(lit: Literal, functors: dict[str, int], where: str) -> list[str]:
    issues = []

    def walk(t: Term):
        if isinstance(t, Compound):
            seen = functors.get(t.functor)
            if seen is None:
                functors[t.functor] = len(t.args)
            elif seen != len(t.args):
                issues.append(
                    f"{where}: functor {t.functor} used with arities {seen} and {len(t.args)}"
                )
            for a in t.args:
                walk(a)

    for a in lit.args:
        walk(a)
    return issues


def validate_domain(domain: Domain) -> list[str]:
    """Every invariant violation as a one-line diagnostic; empty means valid."""
    issues: list[str] = []
    shared = set(domain.predicates) & set(domain.kb_predicates)
    for name in sorted(shared):
        issues.append(f"domain {domain.name}: predicate {name} declared both as state and kb vocabulary")

    # Functors share the symbol namespace with predicates.
    functors: dict[str, int] = dict(domain.predicates)
    functors.update({k: v for k, v in domain.kb_predicates.items() if k not in functors})

    names = set()
    for op in domain.operators:
        where = f"operator {op.name}"
        if op.name in names:
            issues.append(f"{where}: duplicate operator name")
        names.add(op.name)
        header_vars = set(op.params)
        for c in op.constraints:
            header_vars.update(variables_in_constraint(c))
        for lit in op.preconditions + op.effects:
            issues.extend(_literal_arity_issues(lit, domain.predicates, where))
            issues.extend(_functor_issues(lit, functors, where))
            if lit.predicate in domain.kb_predicates:
                issues.append(f"{where}: kb predicate {lit.predicate} used as a state condition")
            for v in variables_in(lit):
                if v not in header_vars:
                    issues.append(f"{where}: variable ?{v.name} not bound by header or bindings")
        if op.composite and not domain.schemata_for(op.name):
            issues.append(f"{where}: composite operator has no decomposition schema")
        if not op.composite and domain.schemata_for(op.name):
            issues.append(f"{where}: primitive operator has a decomposition schema")

    for i, schema in enumerate(domain.schemata):
        where = f"schema {i} for {schema.action}"
        op = domain.operator(schema.action)
        if op is None:
            issues.append(f"{where}: no such operator")
        elif len(schema.params) != len(op.params):
            issues.append(f"{where}: header arity differs from operator header")
        labels = set()
        for t in schema.steps:
            if t.label in RESERVED_LABELS:
                issues.append(f"{where}: step label {t.label} is reserved")
            if t.label in labels:
                issues.append(f"{where}: duplicate step label {t.label}")
            labels.add(t.label)
            target = domain.operator(t.action)
            if target is None:
                issues.append(f"{where}: step {t.label} names unknown action {t.action}")
            elif len(t.args) != len(target.params):
                issues.append(f"{where}: step {t.label} arity differs from {t.action} header")
        known = labels | set(RESERVED_LABELS)
        for link in schema.links:
            for end in (link.producer, link.consumer):
                if end not in known:
                    issues.append(f"{where}: link references undeclared label {end}")
            issues.extend(_literal_arity_issues(link.condition, domain.predicates, where))
        for a, b in schema.orderings:
            for end in (a, b):
                if end not in known:
                    issues.append(f"{where}: ordering references undeclared label {end}")
        for lit in schema.constraints:
            issues.extend(_literal_arity_issues(lit, domain.kb_predicates, f"{where} constraints"))
    return issues


def variables_in_constraint(c: BindingConstraint) -> Iterator[Variable]:
    yield from variables_in(Literal("_", (c.left, c.right)))


def validate_problem(domain: Domain, problem: Problem) -> list[str]:
    issues: list[str] = []
    if problem.domain_name != domain.name:
        issues.append(
            f"problem {problem.name}: references domain {problem.domain_name}, got {domain.name}"
        )
    for lit in problem.facts:
        where = f"problem {problem.name} facts"
        issues.extend(_literal_arity_issues(lit, domain.kb_predicates, where))
        if not lit.positive:
            issues.append(f"{where}: fact {lit} is negative")
        if not is_ground(lit):
            issues.append(f"{where}: fact {lit} is not ground")
    for lit in problem.init:
        where = f"problem {problem.name} init"
        issues.extend(_literal_arity_issues(lit, domain.predicates, where))
        if not lit.positive:
            issues.append(f"{where}: init literal {lit} is negative")
        if not is_ground(lit):
            issues.append(f"{where}: init literal {lit} is not ground")
    for lit in problem.goals:
        issues.extend(_literal_arity_issues(lit, domain.predicates, f"problem {problem.name} goal"))
    return issues


def knowledge_base(domain: Domain, problem: Problem) -> KnowledgeBase:
    return KnowledgeBase(dict(domain.kb_predicates), tuple(problem.facts))


def apply_binding_constraints(
    constraints: tuple[BindingConstraint, ...], bindings: BindingSet
) -> BindingSet | None:
    for c in constraints:
        if c.kind == "eq":
            bindings = unify_terms(c.left, c.right, bindings)
        else:
            bindings = add_noncodesignation(bindings, c.left, c.right)
        if bindings is None:
            return None
    return bindings


def kb_satisfy(
    kb: KnowledgeBase, constraints: list[Literal], bindings: BindingSet
) -> Iterator[BindingSet]:
    """Every extension of `bindings` under which all constraints match the kb.

    Conjunctive matching with backtracking over facts, in fact declaration
    order. A negative constraint succeeds iff no fact matches under the
    candidate bindings (closed world), adding nothing.
    """
    for c in constraints:
        if c.predicate not in kb.predicates:
            raise DomainValidationError(f"unknown kb predicate {c.predicate}")

    def rec(i: int, bs: BindingSet) -> Iterator[BindingSet]:
        if i == len(constraints):
            yield bs
            return
        c = constraints[i]
        if c.positive:
            for fact in kb.facts:
                if fact.predicate != c.predicate:
                    continue
                nxt = unify(c, fact, bs)
                if nxt is not None:
                    yield from rec(i + 1, nxt)
        else:
            atom = c.atom()
            for fact in kb.facts:
                if fact.predicate == atom.predicate and unify(atom, fact, bs) is not None:
                    return
            yield from rec(i + 1, bs)

    yield from rec(0, bindings)


# Instantiation id reserved for probe renamings that must not collide with
# operator templates (iid 0) or plan step instances (iid >= 1).
_PROBE_IID = -1


def operators_achieving(domain: Domain, goal: Literal) -> list[ActionOperator]:
    """Operators with at least one effect unifiable with `goal` under empty bindings."""
    out = []
    for op in domain.operators:
        for eff in rename_fresh(op.effects, _PROBE_IID):
            if unify(eff, goal) is not None:
                out.append(op)
                break
    return out
