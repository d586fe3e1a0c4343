"""First-order terms, literals, and the binding constraint store.

Variables carry an instantiation id so that two copies of one operator
never share variables. A BindingSet is a persistent value: every
extending operation returns a new store and leaves its input untouched,
so backtracking search never has to undo anything.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping


class ArityMismatchError(Exception):
    """One symbol used with two different arities.

    This is a domain-validation bug, not a unification dead end, so it is
    raised instead of returning failure.
    """


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    name: str
    iid: int = 0

    def __str__(self) -> str:
        if self.iid == 0:
            return f"?{self.name}"
        return f"?{self.name}#{self.iid}"


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __str__(self) -> str:
        if not self.args:
            return f"({self.functor})"
        return "({} {})".format(self.functor, " ".join(str(a) for a in self.args))


Term = Constant | Variable | Compound


@dataclass(frozen=True)
class Literal:
    """A signed atom: predicate applied to terms, positive or negated."""

    predicate: str
    args: tuple[Term, ...] = ()
    positive: bool = True

    def negate(self) -> "Literal":
        return Literal(self.predicate, self.args, not self.positive)

    def atom(self) -> "Literal":
        return self if self.positive else Literal(self.predicate, self.args, True)

    def __str__(self) -> str:
        if self.args:
            body = "({} {})".format(self.predicate, " ".join(str(a) for a in self.args))
        else:
            body = f"({self.predicate})"
        return body if self.positive else f"(not {body})"


def term_key(t: Term):
    """Total order over terms, used for canonical representatives and stable output."""
    if isinstance(t, Constant):
        return (0, t.name)
    if isinstance(t, Variable):
        return (1, t.name, t.iid)
    return (2, t.functor, tuple(term_key(a) for a in t.args))


def variables_in(obj) -> Iterator[Variable]:
    if isinstance(obj, Variable):
        yield obj
    elif isinstance(obj, Compound):
        for a in obj.args:
            yield from variables_in(a)
    elif isinstance(obj, Literal):
        for a in obj.args:
            yield from variables_in(a)


def is_ground(obj) -> bool:
    return next(variables_in(obj), None) is None


def rename_term(t: Term, iid: int) -> Term:
    if isinstance(t, Variable):
        return Variable(t.name, iid)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(rename_term(a, iid) for a in t.args))
    return t


def rename_fresh(literals: Iterable[Literal], iid: int) -> list[Literal]:
    """Stamp every variable with the given instantiation id, keeping structure."""
    return [
        Literal(l.predicate, tuple(rename_term(a, iid) for a in l.args), l.positive)
        for l in literals
    ]


@dataclass(frozen=True)
class BindingSet:
    """Codesignation classes plus non-codesignation pairs.

    `assignments` maps a variable to another term in its class (union-find
    style chains ending at the class representative). `distinct` holds pairs
    of terms forbidden from ever denoting the same object. Instances are
    never mutated; extension happens through the module-level operations.
    """

    assignments: Mapping[Variable, Term] = field(default_factory=dict)
    distinct: tuple[tuple[Term, Term], ...] = ()

    def walk(self, t: Term) -> Term:
        while isinstance(t, Variable) and t in self.assignments:
            t = self.assignments[t]
        return t

    def resolve(self, t: Term) -> Term:
        """Deep walk: substitute through compounds."""
        t = self.walk(t)
        if isinstance(t, Compound):
            return Compound(t.functor, tuple(self.resolve(a) for a in t.args))
        return t

    def canonical(self, v: Variable) -> Variable:
        """Display representative of an unbound class: its smallest member."""
        members = [v] + [k for k in self.assignments if self.walk(k) == v]
        return min(members, key=term_key)


EMPTY_BINDINGS = BindingSet()


def _walk(t: Term, asg: dict) -> Term:
    while isinstance(t, Variable) and t in asg:
        t = asg[t]
    return t


def _resolve(t: Term, asg: dict) -> Term:
    t = _walk(t, asg)
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(_resolve(a, asg) for a in t.args))
    return t


def _occurs(v: Variable, t: Term, asg: dict) -> bool:
    t = _walk(t, asg)
    if t == v:
        return True
    if isinstance(t, Compound):
        return any(_occurs(v, a, asg) for a in t.args)
    return False


def _unify_pairs(pairs: list[tuple[Term, Term]], asg: dict) -> bool:
    stack = list(pairs)
    while stack:
        a, b = stack.pop()
        a = _walk(a, asg)
        b = _walk(b, asg)
        if a == b:
            continue
        if isinstance(a, Variable):
            if _occurs(a, b, asg):
                return False
            asg[a] = b
        elif isinstance(b, Variable):
            if _occurs(b, a, asg):
                return False
            asg[b] = a
        elif isinstance(a, Compound) and isinstance(b, Compound):
            if a.functor != b.functor:
                return False
            if len(a.args) != len(b.args):
                raise ArityMismatchError(
                    f"functor {a.functor} used with arities {len(a.args)} and {len(b.args)}"
                )
            stack.extend(zip(a.args, b.args))
        else:
            return False
    return True


def _finish(bindings: BindingSet, asg: dict) -> BindingSet | None:
    # Eager consistency: reject if any forbidden pair now codesignates.
    for x, y in bindings.distinct:
        if _resolve(x, asg) == _resolve(y, asg):
            return None
    return BindingSet(asg, bindings.distinct)


def unify_terms(x: Term, y: Term, bindings: BindingSet = EMPTY_BINDINGS) -> BindingSet | None:
    asg = dict(bindings.assignments)
    if not _unify_pairs([(x, y)], asg):
        return None
    return _finish(bindings, asg)


def unify(a: Literal, b: Literal, bindings: BindingSet = EMPTY_BINDINGS) -> BindingSet | None:
    """Minimal extension of `bindings` making `a` and `b` codesignate, or None.

    None is a search dead end, not an error. A same-predicate arity clash
    raises ArityMismatchError since validated domains cannot produce one.
    """
    if a.positive != b.positive or a.predicate != b.predicate:
        return None
    if len(a.args) != len(b.args):
        raise ArityMismatchError(
            f"predicate {a.predicate} used with arities {len(a.args)} and {len(b.args)}"
        )
    asg = dict(bindings.assignments)
    if not _unify_pairs(list(zip(a.args, b.args)), asg):
        return None
    return _finish(bindings, asg)


def add_noncodesignation(bindings: BindingSet, x: Term, y: Term) -> BindingSet | None:
    """Forbid x and y from denoting the same object; None if they already do."""
    if bindings.resolve(x) == bindings.resolve(y):
        return None
    pair = tuple(sorted((x, y), key=term_key))
    if pair in bindings.distinct:
        return bindings
    return BindingSet(dict(bindings.assignments), bindings.distinct + (pair,))


def apply_term(bindings: BindingSet, t: Term) -> Term:
    w = bindings.walk(t)
    if isinstance(w, Compound):
        return Compound(w.functor, tuple(apply_term(bindings, a) for a in w.args))
    if isinstance(w, Variable):
        return bindings.canonical(w)
    return w


def apply(bindings: BindingSet, literal: Literal) -> Literal:
    """Substitute each variable by its class representative; idempotent."""
    return Literal(
        literal.predicate,
        tuple(apply_term(bindings, a) for a in literal.args),
        literal.positive,
    )
