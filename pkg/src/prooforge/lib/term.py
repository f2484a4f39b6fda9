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
"""Sorted first-order terms, substitutions, matching and anti-unification.

Terms are immutable. Every term caches its hash and its set of free variable
names at construction, so equality checks and groundness tests stay cheap on
the large configurations produced during execution.
"""
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, Tuple

from prooforge.exceptions import MalformedTermError


@dataclass(frozen=True)
class Sort:
    """A sort name."""

    name: str

    def __str__(self):
        return self.name


INT = Sort("Int")
BOOL = Sort("Bool")
K = Sort("K")
CELL = Sort("Cell")
BAG = Sort("Bag")

BUILTIN_SORTS = (INT, BOOL, K)

KSEQ = "_~>_"
KEMPTY = ".K"


def sort_leq(sub, sup):
    """Subsort check. Every sort is below ``K``, otherwise sorts are flat.

    :param sub: Candidate subsort.
    :type sub: :obj:`Sort`
    :param sup: Candidate supersort.
    :type sup: :obj:`Sort`
    :rtype: bool
    """
    return sub == sup or (sup == K and sub not in (CELL, BAG))


def sorts_compatible(left, right):
    """Whether two sorts can meet at the same position."""
    return sort_leq(left, right) or sort_leq(right, left)


_EMPTY = frozenset()


class Term:
    """Base class for terms."""

    __slots__ = ()

    sort = K
    vars = _EMPTY

    @property
    def ground(self):
        """True if the term contains no variables."""
        return not self.vars

    def __str__(self):
        # Local import, syntax depends on this module.
        from prooforge.lib.syntax import unparse
        return unparse(self)


@dataclass(frozen=True, eq=False)
class Var(Term):
    """A sorted variable."""

    name: str
    sort: Sort = K
    _hash: int = field(init=False, repr=False)
    vars: FrozenSet[str] = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("var", self.name, self.sort)))
        object.__setattr__(self, "vars", frozenset((self.name,)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is Var and other._hash == self._hash
                                 and other.name == self.name and other.sort == self.sort)


@dataclass(frozen=True, eq=False)
class IntLit(Term):
    """An arbitrary precision integer literal."""

    value: int
    _hash: int = field(init=False, repr=False)

    sort = INT
    vars = _EMPTY

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("int", self.value)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is IntLit and other.value == self.value)


@dataclass(frozen=True, eq=False)
class BoolLit(Term):
    """A boolean literal."""

    value: bool
    _hash: int = field(init=False, repr=False)

    sort = BOOL
    vars = _EMPTY

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("bool", self.value)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is BoolLit and other.value == self.value)


TRUE = BoolLit(True)
FALSE = BoolLit(False)


@dataclass(frozen=True, eq=False)
class App(Term):
    """Constructor (or function symbol) application."""

    ctor: str
    args: Tuple[Term, ...] = ()
    sort: Sort = K
    _hash: int = field(init=False, repr=False)
    vars: FrozenSet[str] = field(init=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        object.__setattr__(self, "_hash", hash(("app", self.ctor, self.sort, self.args)))
        if not self.args:
            names = _EMPTY
        elif len(self.args) == 1:
            names = self.args[0].vars
        else:
            names = frozenset().union(*(arg.vars for arg in self.args))
        object.__setattr__(self, "vars", names)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is App and other._hash == self._hash
                                 and other.ctor == self.ctor and other.sort == self.sort
                                 and other.args == self.args)


@dataclass(frozen=True, eq=False)
class Cell(Term):
    """A labeled configuration cell."""

    label: str
    body: Term
    _hash: int = field(init=False, repr=False)
    vars: FrozenSet[str] = field(init=False, repr=False)

    sort = CELL

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash(("cell", self.label, self.body)))
        object.__setattr__(self, "vars", self.body.vars)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is Cell and other._hash == self._hash
                                 and other.label == self.label and other.body == self.body)


@dataclass(frozen=True, eq=False)
class CellBag(Term):
    """A bag of cells keyed by label, kept sorted by label."""

    cells: Tuple[Cell, ...] = ()
    _hash: int = field(init=False, repr=False)
    vars: FrozenSet[str] = field(init=False, repr=False)
    _index: Dict[str, Cell] = field(init=False, repr=False)

    sort = BAG

    def __post_init__(self):
        for cell in self.cells:
            if not isinstance(cell, Cell):
                raise MalformedTermError("cell bag member is not a cell: %r" % (cell,))
        cells = tuple(sorted(self.cells, key=lambda cell: cell.label))
        index = {}
        for cell in cells:
            if cell.label in index:
                raise MalformedTermError("duplicate cell label %r" % cell.label)
            index[cell.label] = cell
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_hash", hash(("bag", cells)))
        object.__setattr__(self, "vars", frozenset().union(*(c.vars for c in cells)))

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (type(other) is CellBag and other._hash == self._hash
                                 and other.cells == self.cells)

    @property
    def labels(self):
        """Labels of the cells, sorted."""
        return tuple(self._index)

    def get(self, label):
        """Body of the cell with this label, or None."""
        cell = self._index.get(label)
        return None if cell is None else cell.body

    def replace(self, bodies):
        """Return a bag where the given cells have new bodies.

        :param bodies: Mapping from label to new body.
        :type bodies: dict
        :rtype: :obj:`CellBag`
        """
        if not bodies:
            return self
        return CellBag(tuple(Cell(c.label, bodies[c.label]) if c.label in bodies else c
                             for c in self.cells))


def cells(**bodies):
    """Shorthand to build a cell bag from keyword arguments."""
    return CellBag(tuple(Cell(label, body) for label, body in bodies.items()))


def kseq(*items):
    """Build a right-nested K sequence. The last item is the tail."""
    result = items[-1]
    for item in reversed(items[:-1]):
        result = App(KSEQ, (item, result), K)
    return result


def k_head(term):
    """First item of a K sequence, or the term itself."""
    if type(term) is App and term.ctor == KSEQ:
        return term.args[0]
    return term


def free_vars(term):
    """Exact set of variable names occurring in a term.

    :param term: Term to inspect.
    :type term: :obj:`Term`
    :rtype: frozenset
    """
    return term.vars


def variables(term):
    """Iterate variables of a term left to right, first occurrences only."""
    seen = set()
    stack = [term]
    while stack:
        node = stack.pop()
        if not node.vars:
            continue
        if type(node) is Var:
            if node.name not in seen:
                seen.add(node.name)
                yield node
        elif type(node) is App:
            stack.extend(reversed(node.args))
        elif type(node) is Cell:
            stack.append(node.body)
        elif type(node) is CellBag:
            stack.extend(reversed(node.cells))


class Subst(Mapping):
    """A substitution from variable names to terms.

    Substitutions are applied simultaneously, so a binding whose image mentions
    a bound variable is still well defined.
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings=None):
        self._bindings = dict(bindings or {})

    def __getitem__(self, name):
        return self._bindings[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._bindings)

    def __len__(self):
        return len(self._bindings)

    def __eq__(self, other):
        if isinstance(other, Mapping):
            return self._bindings == dict(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._bindings.items()))

    def __repr__(self):
        return "Subst({%s})" % ", ".join("%s: %s" % (k, v) for k, v in sorted(self.items()))

    def without_identities(self):
        """Drop bindings of the form ``X -> X``."""
        return Subst({k: v for k, v in self._bindings.items()
                      if not (type(v) is Var and v.name == k)})

    def compose(self, other):
        """Substitution that applies ``self`` first and then ``other``."""
        bindings = {k: apply_subst(other, v) for k, v in self._bindings.items()}
        for name, image in other.items():
            bindings.setdefault(name, image)
        return Subst(bindings)


EMPTY_SUBST = Subst()


def apply_subst(subst, term):
    """Replace every bound variable of a term by its image.

    :param subst: Substitution to apply.
    :type subst: :obj:`Subst` or dict
    :param term: Term to rewrite.
    :type term: :obj:`Term`
    :rtype: :obj:`Term`
    """
    if not subst or not term.vars:
        return term
    if term.vars.isdisjoint(subst.keys()):
        return term
    kind = type(term)
    if kind is Var:
        return subst.get(term.name, term)
    if kind is App:
        return App(term.ctor, tuple(apply_subst(subst, arg) for arg in term.args), term.sort)
    if kind is Cell:
        return Cell(term.label, apply_subst(subst, term.body))
    if kind is CellBag:
        return CellBag(tuple(apply_subst(subst, cell) for cell in term.cells))
    return term


def match(pattern, subject, rigid=_EMPTY):
    """One-way syntactic matching.

    Variables of ``pattern`` bind to subterms of ``subject``; variables of the
    subject are treated as constants. Cell bags match by label and a pattern
    bag may mention a subset of the subject's cells.

    :param pattern: The pattern term.
    :type pattern: :obj:`Term`
    :param subject: The term to match against.
    :type subject: :obj:`Term`
    :param rigid: Pattern variable names that may only match themselves.
    :type rigid: frozenset
    :return: The matching substitution or None.
    :rtype: :obj:`Subst`
    :raises MalformedTermError: If the root sorts cannot meet.
    """
    if not sorts_compatible(pattern.sort, subject.sort):
        raise MalformedTermError("cannot match %s against %s: sort mismatch"
                                 % (pattern.sort, subject.sort))
    bindings = {}
    if _match(pattern, subject, bindings, rigid):
        return Subst(bindings)
    return None


def _match(pattern, subject, bindings, rigid):
    # pylint:disable=too-many-return-statements
    kind = type(pattern)
    if kind is Var:
        if pattern.name in rigid:
            return subject == pattern
        if not sort_leq(subject.sort, pattern.sort):
            return False
        bound = bindings.get(pattern.name)
        if bound is None:
            bindings[pattern.name] = subject
            return True
        return bound == subject
    if not pattern.vars:
        return pattern == subject
    if kind is App:
        if type(subject) is not App or subject.ctor != pattern.ctor \
                or len(subject.args) != len(pattern.args):
            return False
        return all(_match(p, s, bindings, rigid) for p, s in zip(pattern.args, subject.args))
    if kind is Cell:
        return type(subject) is Cell and subject.label == pattern.label \
            and _match(pattern.body, subject.body, bindings, rigid)
    if kind is CellBag:
        if type(subject) is not CellBag:
            return False
        for cell in pattern.cells:
            body = subject.get(cell.label)
            if body is None or not _match(cell.body, body, bindings, rigid):
                return False
        return True
    return False


def is_renaming(subst):
    """True if the substitution maps variables injectively onto variables."""
    images = set()
    for image in subst.values():
        if type(image) is not Var or image.name in images:
            return False
        images.add(image.name)
    return True


class VariableSupply:
    """Monotone supply of fresh variables named ``V#<counter>``."""

    prefix = "V#"

    def __init__(self, start=0):
        """Initialize the counter.

        :param start: First counter value handed out.
        :type start: int
        """
        self.counter = start

    @classmethod
    def after(cls, *terms):
        """A supply whose names do not clash with those in ``terms``."""
        highest = -1
        for term in terms:
            for name in term.vars:
                if name.startswith(cls.prefix) and name[len(cls.prefix):].isdigit():
                    highest = max(highest, int(name[len(cls.prefix):]))
        return cls(highest + 1)

    def fresh(self, sort=K):
        """Return a fresh variable of the given sort."""
        var = Var("%s%d" % (self.prefix, self.counter), sort)
        self.counter += 1
        return var


def cau(left, right, fresh):
    """Least general generalization (anti-unification) of two terms.

    Equal subterms are kept, differing positions become fresh variables and a
    repeated pair of differing subterms reuses the same variable.

    :param left: First term.
    :type left: :obj:`Term`
    :param right: Second term.
    :type right: :obj:`Term`
    :param fresh: Supply of fresh variables.
    :type fresh: :obj:`VariableSupply`
    :return: Generalization and the substitutions back to each input.
    :rtype: tuple
    :raises MalformedTermError: If the sorts differ.
    """
    if not sorts_compatible(left.sort, right.sort):
        raise MalformedTermError("cannot generalize %s with %s" % (left.sort, right.sort))
    memo = {}

    def generalize(one, two):
        if one == two:
            return one
        kind = type(one)
        if kind is type(two):
            if kind is App and one.ctor == two.ctor and len(one.args) == len(two.args) \
                    and one.sort == two.sort:
                return App(one.ctor, tuple(generalize(a, b) for a, b in zip(one.args, two.args)),
                           one.sort)
            if kind is Cell and one.label == two.label:
                return Cell(one.label, generalize(one.body, two.body))
            if kind is CellBag and one.labels == two.labels:
                return CellBag(tuple(generalize(a, b) for a, b in zip(one.cells, two.cells)))
        key = (one, two)
        var = memo.get(key)
        if var is None:
            var = fresh.fresh(one.sort if one.sort == two.sort else K)
            memo[key] = var
        return var

    general = generalize(left, right)
    left_subst = Subst({var.name: one for (one, _), var in memo.items()})
    right_subst = Subst({var.name: two for (_, two), var in memo.items()})
    return general, left_subst, right_subst


def _int_args(args):
    if all(type(arg) is IntLit for arg in args):
        return [arg.value for arg in args]
    return None


def _div(left, right):
    if right == 0:
        return None
    quotient = abs(left) // abs(right)
    return quotient if (left >= 0) == (right >= 0) else -quotient


def _mod(left, right):
    if right == 0:
        return None
    return left - right * _div(left, right)


_INT_FUNCTIONS = {
    "_+Int_": lambda a, b: IntLit(a + b),
    "_-Int_": lambda a, b: IntLit(a - b),
    "_*Int_": lambda a, b: IntLit(a * b),
    "_/Int_": lambda a, b: None if b == 0 else IntLit(_div(a, b)),
    "_%Int_": lambda a, b: None if b == 0 else IntLit(_mod(a, b)),
    "_<Int_": lambda a, b: BoolLit(a < b),
    "_<=Int_": lambda a, b: BoolLit(a <= b),
    "_>Int_": lambda a, b: BoolLit(a > b),
    "_>=Int_": lambda a, b: BoolLit(a >= b),
    "_==Int_": lambda a, b: BoolLit(a == b),
    "_=/=Int_": lambda a, b: BoolLit(a != b),
}


def fold(ctor, args):
    """Evaluate a builtin operator application when its arguments allow.

    :param ctor: Operator name.
    :type ctor: str
    :param args: Already folded arguments.
    :type args: tuple
    :return: The folded term or None when it does not reduce.
    :rtype: :obj:`Term`
    """
    # pylint:disable=too-many-return-statements
    function = _INT_FUNCTIONS.get(ctor)
    if function is not None:
        values = _int_args(args)
        return function(*values) if values is not None else None
    if ctor == "_andBool_":
        left, right = args
        if left == FALSE or right == FALSE:
            return FALSE
        if left == TRUE:
            return right
        if right == TRUE:
            return left
        return None
    if ctor == "_orBool_":
        left, right = args
        if left == TRUE or right == TRUE:
            return TRUE
        if left == FALSE:
            return right
        if right == FALSE:
            return left
        return None
    if ctor == "notBool_":
        (arg,) = args
        return BoolLit(not arg.value) if type(arg) is BoolLit else None
    if ctor in ("_==K_", "_=/=K_"):
        left, right = args
        if left.ground and right.ground:
            return BoolLit((left == right) == (ctor == "_==K_"))
        if left == right:
            return BoolLit(ctor == "_==K_")
        return None
    return None


def evaluate(term):
    """Fold every builtin operator application in a term, bottom-up."""
    kind = type(term)
    if kind is App:
        args = tuple(evaluate(arg) for arg in term.args)
        folded = fold(term.ctor, args)
        if folded is not None:
            return folded
        if all(a is b for a, b in zip(args, term.args)):
            return term
        return App(term.ctor, args, term.sort)
    if kind is Cell:
        return Cell(term.label, evaluate(term.body))
    if kind is CellBag:
        return CellBag(tuple(evaluate(cell) for cell in term.cells))
    return term
