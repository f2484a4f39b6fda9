# Copyright 2026 prooforge contributors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Path constraints, constrained terms and constrained substitutions.

Constraints are kept in negation normal form. Integer comparisons become
linear atoms ``sum(c * t) + k (<=|==|!=) 0`` over integer variables and
opaque integer terms, normalized so that equivalent atoms compare equal.
"""
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd
from typing import Dict, Tuple

from prooforge.exceptions import MalformedTermError
from prooforge.lib.syntax import is_function, unparse
from prooforge.lib.term import (App, BOOL, BoolLit, FALSE, INT, IntLit, TRUE, Term,
                                Var, apply_subst, evaluate)

_COMPARISONS = {"_<Int_", "_<=Int_", "_>Int_", "_>=Int_", "_==Int_", "_=/=Int_"}


class Constraint:
    """Base class of constraints."""

    __slots__ = ()

    @cached_property
    def text(self):
        """Canonical text, also the ordering key among conjuncts."""
        return unparse(to_term(self))

    def __str__(self):
        return self.text

    @property
    def vars(self):
        """Names of the variables the constraint mentions."""
        return to_term(self).vars


@dataclass(frozen=True)
class Top(Constraint):
    """The constraint ``true``."""

    def __repr__(self):
        return "TOP"


@dataclass(frozen=True)
class Bottom(Constraint):
    """The constraint ``false``."""

    def __repr__(self):
        return "BOTTOM"


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class Linear(Constraint):
    """``sum(coeff * key) + const  op  0`` with ``op`` one of ``<=``, ``==``, ``!=``."""

    coeffs: Tuple[Tuple[Term, int], ...]
    const: int
    op: str

    @property
    def keys(self):
        """Integer unknowns of the atom."""
        return tuple(key for key, _ in self.coeffs)


@dataclass(frozen=True)
class BoolAtom(Constraint):
    """A boolean term asserted true (or false when not positive)."""

    term: Term
    positive: bool = True


@dataclass(frozen=True)
class TermEq(Constraint):
    """Syntactic (dis)equality of two non-integer terms."""

    left: Term
    right: Term
    positive: bool = True


@dataclass(frozen=True)
class And(Constraint):
    """Conjunction of at least two constraints."""

    items: Tuple[Constraint, ...]


@dataclass(frozen=True)
class Or(Constraint):
    """Disjunction of at least two constraints."""

    items: Tuple[Constraint, ...]


def _key(term):
    return unparse(term)


def linear(coeffs, const, op):
    """Build a normalized linear atom.

    :param coeffs: Mapping from integer unknown to coefficient.
    :type coeffs: dict
    :param const: Constant term.
    :type const: int
    :param op: One of ``<=``, ``==`` and ``!=``.
    :type op: str
    :rtype: :obj:`Constraint`
    """
    coeffs = {key: value for key, value in coeffs.items() if value}
    if not coeffs:
        holds = {"<=": const <= 0, "==": const == 0, "!=": const != 0}[op]
        return TOP if holds else BOTTOM
    divisor = reduce(gcd, (abs(value) for value in coeffs.values()))
    if op == "<=":
        const = -((-const) // divisor)
    elif const % divisor:
        return BOTTOM if op == "==" else TOP
    else:
        const //= divisor
    ordered = sorted(coeffs.items(), key=lambda item: _key(item[0]))
    items = [(key, value // divisor) for key, value in ordered]
    if op != "<=" and items[0][1] < 0:
        items = [(key, -value) for key, value in items]
        const = -const
    return Linear(tuple(items), const, op)


def linearize(term):
    """Read an integer term as ``(coeffs, const)``.

    Sums, differences and products by a constant are interpreted, every other
    integer term is an opaque unknown.

    :rtype: tuple
    """
    kind = type(term)
    if kind is IntLit:
        return {}, term.value
    if kind is App and len(term.args) == 2 and term.ctor in ("_+Int_", "_-Int_", "_*Int_"):
        left, left_const = linearize(term.args[0])
        right, right_const = linearize(term.args[1])
        if term.ctor == "_*Int_":
            if not left:
                return {k: v * left_const for k, v in right.items()}, left_const * right_const
            if not right:
                return {k: v * right_const for k, v in left.items()}, left_const * right_const
            return {term: 1}, 0
        sign = 1 if term.ctor == "_+Int_" else -1
        merged = dict(left)
        for key, value in right.items():
            merged[key] = merged.get(key, 0) + sign * value
        return merged, left_const + sign * right_const
    return {term: 1}, 0


def _difference(left, right):
    left_coeffs, left_const = linearize(left)
    right_coeffs, right_const = linearize(right)
    merged = dict(left_coeffs)
    for key, value in right_coeffs.items():
        merged[key] = merged.get(key, 0) - value
    return merged, left_const - right_const


def compare(ctor, left, right):
    """Linear atom for an integer comparison ``left ctor right``."""
    if ctor in ("_<Int_", "_<=Int_", "_==Int_", "_=/=Int_"):
        coeffs, const = _difference(left, right)
    else:
        coeffs, const = _difference(right, left)
    if ctor in ("_<Int_", "_>Int_"):
        return linear(coeffs, const + 1, "<=")
    if ctor in ("_<=Int_", "_>=Int_"):
        return linear(coeffs, const, "<=")
    return linear(coeffs, const, "==" if ctor == "_==Int_" else "!=")


def term_eq(left, right, positive=True):
    """(Dis)equality of two terms, decomposed by constructor injectivity."""
    # pylint:disable=too-many-return-statements
    if left == right:
        return TOP if positive else BOTTOM
    if left.sort == INT or right.sort == INT:
        return compare("_==Int_" if positive else "_=/=Int_", left, right)
    if type(left) is BoolLit and type(right) is BoolLit:
        return BOTTOM if positive else TOP
    if type(right) is BoolLit or type(left) is BoolLit:
        literal, other = (right, left) if type(right) is BoolLit else (left, right)
        if other.sort == BOOL:
            inner = from_term(other)
            return inner if literal.value == positive else negate(inner)
    if _rigid(left) and _rigid(right):
        if type(left) is not App or type(right) is not App or left.ctor != right.ctor \
                or len(left.args) != len(right.args):
            return BOTTOM if positive else TOP
        parts = [term_eq(a, b, True) for a, b in zip(left.args, right.args)]
        return conj(*parts) if positive else negate(conj(*parts))
    if _key(right) < _key(left):
        left, right = right, left
    return TermEq(left, right, positive)


def _rigid(term):
    # Literals and constructor applications, which compare by structure.
    if type(term) in (IntLit, BoolLit):
        return True
    return type(term) is App and not is_function(term.ctor)


def _flatten(kind, items):
    for item in items:
        if type(item) is kind:
            yield from item.items
        else:
            yield item


def _bounds_clash(atoms):
    """Whether linear atoms sharing a left hand side bound it to no integer."""
    bounds = {}
    for atom in atoms:
        sign = 1 if atom.coeffs[0][1] > 0 else -1
        side = tuple((key, sign * value) for key, value in atom.coeffs)
        lower, upper, equal, unequal = bounds.setdefault(side, [None, None, set(), set()])
        if atom.op == "==":
            equal.add(-sign * atom.const)
        elif atom.op == "!=":
            unequal.add(-sign * atom.const)
        elif sign > 0:
            bounds[side][1] = -atom.const if upper is None else min(upper, -atom.const)
        else:
            bounds[side][0] = atom.const if lower is None else max(lower, atom.const)
    for lower, upper, equal, unequal in bounds.values():
        if len(equal) > 1 or equal & unequal:
            return True
        if lower is not None and upper is not None:
            if lower > upper or (lower == upper and lower in unequal):
                return True
        for value in equal:
            if (lower is not None and value < lower) or (upper is not None and value > upper):
                return True
    return False


def conj(*items):
    """Conjunction, flattened, sorted and without duplicates.

    Linear atoms over the same unknowns that admit no common integer value
    collapse the conjunction to ``BOTTOM``.
    """
    seen = {}
    for item in _flatten(And, items):
        if item is BOTTOM or type(item) is Bottom:
            return BOTTOM
        if type(item) is not Top:
            seen.setdefault(item, None)
    if not seen:
        return TOP
    if len(seen) == 1:
        return next(iter(seen))
    ordered = tuple(sorted(seen, key=lambda c: c.text))
    if any(negate(item) in seen for item in ordered if type(item) is not Or):
        return BOTTOM
    if _bounds_clash(item for item in ordered if type(item) is Linear):
        return BOTTOM
    return And(ordered)


def disj(*items):
    """Disjunction, flattened, sorted and without duplicates."""
    seen = {}
    for item in _flatten(Or, items):
        if type(item) is Top:
            return TOP
        if type(item) is not Bottom:
            seen.setdefault(item, None)
    if not seen:
        return BOTTOM
    if len(seen) == 1:
        return next(iter(seen))
    return Or(tuple(sorted(seen, key=lambda c: c.text)))


def negate(constraint):
    """Negation, pushed to the atoms."""
    # pylint:disable=too-many-return-statements
    kind = type(constraint)
    if kind is Top:
        return BOTTOM
    if kind is Bottom:
        return TOP
    if kind is Linear:
        if constraint.op == "<=":
            return linear({k: -v for k, v in constraint.coeffs}, 1 - constraint.const, "<=")
        return Linear(constraint.coeffs, constraint.const,
                      "!=" if constraint.op == "==" else "==")
    if kind is BoolAtom:
        return BoolAtom(constraint.term, not constraint.positive)
    if kind is TermEq:
        return TermEq(constraint.left, constraint.right, not constraint.positive)
    if kind is And:
        return disj(*(negate(item) for item in constraint.items))
    return conj(*(negate(item) for item in constraint.items))


def from_term(term):
    """Read a boolean term as a constraint.

    :param term: Term of sort Bool.
    :type term: :obj:`prooforge.lib.term.Term`
    :rtype: :obj:`Constraint`
    :raises MalformedTermError: If the term is not boolean.
    """
    # pylint:disable=too-many-return-statements
    if type(term) is BoolLit:
        return TOP if term.value else BOTTOM
    if term.sort != BOOL and not (type(term) is Var):
        raise MalformedTermError("constraint is not boolean: %s" % unparse(term))
    if type(term) is App:
        if term.ctor == "_andBool_":
            return conj(*(from_term(arg) for arg in term.args))
        if term.ctor == "_orBool_":
            return disj(*(from_term(arg) for arg in term.args))
        if term.ctor == "notBool_":
            return negate(from_term(term.args[0]))
        if term.ctor in _COMPARISONS:
            return compare(term.ctor, *term.args)
        if term.ctor in ("_==K_", "_=/=K_"):
            return term_eq(term.args[0], term.args[1], term.ctor == "_==K_")
    return BoolAtom(term, True)


def _sum(terms):
    result = None
    for term in terms:
        result = term if result is None else App("_+Int_", (result, term), INT)
    return result


def _scaled(key, value):
    return key if value == 1 else App("_*Int_", (IntLit(value), key), INT)


def to_term(constraint):
    """Boolean term of a constraint, the inverse of :func:`from_term`."""
    # pylint:disable=too-many-return-statements
    kind = type(constraint)
    if kind is Top:
        return TRUE
    if kind is Bottom:
        return FALSE
    if kind is BoolAtom:
        if constraint.positive:
            return constraint.term
        return App("notBool_", (constraint.term,), BOOL)
    if kind is TermEq:
        return App("_==K_" if constraint.positive else "_=/=K_",
                   (constraint.left, constraint.right), BOOL)
    if kind in (And, Or):
        ctor = "_andBool_" if kind is And else "_orBool_"
        return reduce(lambda left, right: App(ctor, (left, right), BOOL),
                      (to_term(item) for item in constraint.items))
    ctor = {"<=": "_<=Int_", "==": "_==Int_", "!=": "_=/=Int_"}[constraint.op]
    positive = _sum(_scaled(k, v) for k, v in constraint.coeffs if v > 0)
    negative = _sum(_scaled(k, -v) for k, v in constraint.coeffs if v < 0)
    const = constraint.const
    if positive is None:
        ctor = {"_<=Int_": "_>=Int_"}.get(ctor, ctor)
        return App(ctor, (negative, IntLit(const)), BOOL)
    if negative is None:
        right = IntLit(-const)
    elif const > 0:
        right = App("_-Int_", (negative, IntLit(const)), INT)
    elif const < 0:
        right = App("_+Int_", (negative, IntLit(-const)), INT)
    else:
        right = negative
    return App(ctor, (positive, right), BOOL)


def conjuncts(constraint):
    """Top level conjuncts of a constraint."""
    if type(constraint) is And:
        return constraint.items
    if type(constraint) is Top:
        return ()
    return (constraint,)


def substitute(constraint, subst, normalize=evaluate):
    """Apply a substitution to a constraint and renormalize it.

    :param constraint: Constraint to rewrite.
    :type constraint: :obj:`Constraint`
    :param subst: Substitution to apply.
    :type subst: :obj:`prooforge.lib.term.Subst`
    :param normalize: Term normalizer run on every substituted atom.
    :type normalize: callable
    :rtype: :obj:`Constraint`
    """
    if not subst or type(constraint) in (Top, Bottom):
        return constraint
    term = to_term(constraint)
    if term.vars.isdisjoint(subst.keys()):
        return constraint
    return from_term(normalize(apply_subst(subst, term)))


def simplify(constraint, normalize=evaluate):
    """Fold ground atoms and renormalize, returning an equivalent constraint."""
    if type(constraint) in (Top, Bottom):
        return constraint
    return from_term(normalize(to_term(constraint)))


def common_constraints(left, right):
    """Conjuncts present in both constraints."""
    shared = set(conjuncts(right))
    return conj(*(item for item in conjuncts(left) if item in shared))


@dataclass(frozen=True)
class CTerm:
    """A configuration together with its path constraint."""

    config: Term
    constraint: Constraint = TOP

    def __str__(self):
        if type(self.constraint) is Top:
            return unparse(self.config)
        return "%s requires %s" % (unparse(self.config), self.constraint)

    @property
    def vars(self):
        """Variables of the configuration and the constraint."""
        return self.config.vars | self.constraint.vars


@dataclass(frozen=True)
class CSubst:
    """A substitution paired with a constraint to conjoin."""

    subst: Dict[str, Term]
    constraint: Constraint = TOP

    def __hash__(self):
        return hash((frozenset(self.subst.items()), self.constraint))

    def __str__(self):
        bindings = ", ".join("%s |-> %s" % (name, unparse(image))
                             for name, image in sorted(self.subst.items()))
        return "{%s} /\\ %s" % (bindings, self.constraint)


def csubst_apply(csubst, cterm, normalize=evaluate):
    """Specialize a constrained term.

    :param csubst: The constrained substitution.
    :type csubst: :obj:`CSubst`
    :param cterm: The constrained term.
    :type cterm: :obj:`CTerm`
    :param normalize: Term normalizer for the configuration and constraint.
    :type normalize: callable
    :rtype: :obj:`CTerm`
    """
    config = cterm.config
    if csubst.subst and not config.vars.isdisjoint(csubst.subst.keys()):
        config = normalize(apply_subst(csubst.subst, config))
    constraint = conj(substitute(cterm.constraint, csubst.subst, normalize), csubst.constraint)
    return CTerm(config, constraint)
