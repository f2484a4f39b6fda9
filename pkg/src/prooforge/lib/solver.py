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
"""Bundled decision procedure for path constraints.

Each disjunct of the constraint is decided on its own. Linear atoms go
through Fourier-Motzkin elimination with integer tightening, which refutes
unsatisfiable conjunctions. Satisfiable ones get an integer witness by back
substitution, or by a bounded search when back substitution falls into a gap
between integers. Anything left undecided is reported as unknown.
"""
import enum
import itertools
import logging
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Dict, Optional

from prooforge.lib.constraint import (And, BOTTOM, BoolAtom, Bottom, Linear, Or, TermEq,
                                      Top, conj, conjuncts, negate)
from prooforge.lib.syntax import unparse
from prooforge.lib.term import Var

_LOG = logging.getLogger(__name__)

SEARCH_RADIUS = 2 ** 16


class Status(enum.Enum):
    """Outcome of a satisfiability query."""

    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


class Verdict(enum.Enum):
    """Outcome of an entailment query."""

    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass
class SatResult:
    """Answer of :func:`is_sat`, with a witness when satisfiable.

    Witness keys are variable names, or the canonical text of an opaque term.
    """

    status: Status
    witness: Dict[str, object] = field(default_factory=dict)

    def __bool__(self):
        return self.status is not Status.UNSAT


@dataclass
class Entailment:
    """Answer of :func:`entails`, with a counterexample when it fails."""

    verdict: Verdict
    counterexample: Optional[Dict[str, object]] = None

    def __bool__(self):
        return self.verdict is Verdict.YES


class Budget:  # pylint:disable=too-few-public-methods
    """Limits of the decision procedure."""

    cubes = 256
    rows = 4000
    search_tries = 4000
    exhaustive = 40000
    narrow = 64


def _cubes(constraint, limit):
    """Disjunctive normal form, lazily, as lists of atoms."""
    kind = type(constraint)
    if kind is Top:
        yield []
    elif kind is Bottom:
        return
    elif kind is Or:
        count = 0
        for item in constraint.items:
            for cube in _cubes(item, limit):
                count += 1
                if count > limit:
                    raise _OverBudget()
                yield cube
    elif kind is And:
        parts = [list(itertools.islice(_cubes(item, limit), limit + 1))
                 for item in constraint.items]
        for part in parts:
            if len(part) > limit:
                raise _OverBudget()
        for count, combination in enumerate(itertools.product(*parts)):
            if count >= limit:
                raise _OverBudget()
            yield [atom for cube in combination for atom in cube]
    else:
        yield [constraint]


class _OverBudget(Exception):
    pass


def _name(key):
    return key.name if type(key) is Var else unparse(key)


def _tighten(coeffs, const):
    """Divide an inequality row by the gcd of its coefficients."""
    divisor = 0
    for value in coeffs.values():
        divisor = gcd(divisor, abs(value))
    if divisor > 1:
        coeffs = {k: v // divisor for k, v in coeffs.items()}
        const = -((-const) // divisor)
    return coeffs, const


def _row_key(coeffs, const):
    return frozenset(coeffs.items()), const


def _eliminate(rows, var):
    """Project rows ``sum + const <= 0`` onto the remaining variables.

    :return: New rows or None when a contradiction shows up.
    """
    upper, lower, rest = [], [], {}
    for coeffs, const in rows:
        value = coeffs.get(var, 0)
        if value > 0:
            upper.append((coeffs, const))
        elif value < 0:
            lower.append((coeffs, const))
        else:
            rest[_row_key(coeffs, const)] = (coeffs, const)
    for up_coeffs, up_const in upper:
        for low_coeffs, low_const in lower:
            up_factor = -low_coeffs[var]
            low_factor = up_coeffs[var]
            combined = {}
            for key, value in up_coeffs.items():
                combined[key] = combined.get(key, 0) + up_factor * value
            for key, value in low_coeffs.items():
                combined[key] = combined.get(key, 0) + low_factor * value
            combined = {k: v for k, v in combined.items() if v}
            const = up_factor * up_const + low_factor * low_const
            if not combined:
                if const > 0:
                    return None
                continue
            combined, const = _tighten(combined, const)
            rest[_row_key(combined, const)] = (combined, const)
            if len(rest) > Budget.rows:
                raise _OverBudget()
    return list(rest.values())


def _bounds(rows, var, assignment):
    """Integer interval for ``var`` given values of the other variables."""
    low, high = None, None
    for coeffs, const in rows:
        value = coeffs.get(var, 0)
        if not value:
            continue
        rest = const + sum(c * assignment[k] for k, c in coeffs.items() if k != var)
        if value > 0:
            bound = (-rest) // value
            high = bound if high is None else min(high, bound)
        else:
            bound = -((-rest) // (-value))
            low = bound if low is None else max(low, bound)
    return low, high


def _pick(low, high, avoid):
    """Integer in ``[low, high]`` closest to zero that is not in ``avoid``."""
    start = 0
    if low is not None and start < low:
        start = low
    if high is not None and start > high:
        start = high
    for distance in range(0, len(avoid) + 2):
        for candidate in (start + distance, start - distance):
            if (low is None or candidate >= low) and (high is None or candidate <= high) \
                    and candidate not in avoid:
                return candidate
    return None


def _holds(atom, assignment):
    total = atom.const + sum(c * assignment[k] for k, c in atom.coeffs)
    if atom.op == "<=":
        return total <= 0
    if atom.op == "==":
        return total == 0
    return total != 0


class _Cube:
    """One conjunction of atoms."""

    def __init__(self, atoms, seed):
        self.linear = [a for a in atoms if type(a) is Linear]
        self.booleans = [a for a in atoms if type(a) is BoolAtom]
        self.equations = [a for a in atoms if type(a) is TermEq]
        self.keys = sorted({k for atom in self.linear for k in atom.keys}, key=unparse)
        self.random = random.Random(seed)
        self.rows = []
        for atom in self.linear:
            coeffs = dict(atom.coeffs)
            if atom.op in ("<=", "=="):
                self.rows.append((coeffs, atom.const))
            if atom.op == "==":
                self.rows.append(({k: -v for k, v in coeffs.items()}, -atom.const))

    def propositional(self):
        """Witness for boolean atoms, None if two of them clash."""
        values = {}
        for atom in self.booleans:
            if values.setdefault(atom.term, atom.positive) != atom.positive:
                return None
        for atom in self.equations:
            pair = (atom.left, atom.right)
            if values.setdefault(pair, atom.positive) != atom.positive:
                return None
        return {unparse(term) if type(term) is not Var else term.name: value
                for term, value in values.items() if type(term) is not tuple}

    @property
    def exact(self):
        """True if a witness for the linear part witnesses the whole cube."""
        return not self.equations and all(type(a.term) is Var for a in self.booleans)

    def solve(self):
        """Decide the linear part, returning a status and an assignment."""
        try:
            levels = [self.rows]
            for key in self.keys:
                projected = _eliminate(levels[-1], key)
                if projected is None:
                    return Status.UNSAT, None
                levels.append(projected)
        except _OverBudget:
            _LOG.debug("elimination over budget with %d unknowns", len(self.keys))
            return self.search(None)
        assignment = {}
        for index in reversed(range(len(self.keys))):
            key = self.keys[index]
            low, high = _bounds(levels[index], key, assignment)
            avoid = self._avoid(key, assignment)
            value = None if low is not None and high is not None and low > high \
                else _pick(low, high, avoid)
            if value is None:
                return self.search(levels)
            assignment[key] = value
        if all(_holds(atom, assignment) for atom in self.linear):
            return Status.SAT, assignment
        return self.search(levels)

    def _avoid(self, key, assignment):
        avoid = set()
        for atom in self.linear:
            if atom.op != "!=" or key not in atom.keys:
                continue
            if all(k == key or k in assignment for k in atom.keys):
                coeff = dict(atom.coeffs)[key]
                rest = atom.const + sum(c * assignment[k] for k, c in atom.coeffs if k != key)
                if rest % coeff == 0:
                    avoid.add(-rest // coeff)
        return avoid

    def _domain(self, key, levels):
        if levels is not None:
            index = self.keys.index(key)
            projected = levels[-1]
            # Bounds of the variable alone, from eliminating all the others.
            rows = levels[index]
            try:
                for other in self.keys:
                    if other != key and any(other in coeffs for coeffs, _ in rows):
                        rows = _eliminate(rows, other)
                        if rows is None:
                            return [], True
            except _OverBudget:
                rows = projected
            low, high = _bounds([r for r in rows if set(r[0]) <= {key}], key, {})
            if low is not None and high is not None and high - low <= Budget.narrow:
                return list(range(low, high + 1)), True
        candidates = set(range(-8, 9))
        for atom in self.linear:
            coeffs = dict(atom.coeffs)
            if key in coeffs:
                edge = -atom.const // coeffs[key]
                candidates.update((edge - 1, edge, edge + 1))
        candidates.update(self.random.randint(-SEARCH_RADIUS, SEARCH_RADIUS) for _ in range(8))
        return sorted(candidates), False

    def search(self, levels):
        """Bounded model search over candidate values."""
        domains = []
        complete = True
        for key in self.keys:
            domain, full = self._domain(key, levels)
            if not domain:
                return Status.UNSAT, None
            complete = complete and full
            domains.append(domain)
        size = 1
        for domain in domains:
            size *= len(domain)
        if size <= Budget.exhaustive:
            for values in itertools.product(*domains):
                assignment = dict(zip(self.keys, values))
                if all(_holds(atom, assignment) for atom in self.linear):
                    return Status.SAT, assignment
            return (Status.UNSAT if complete else Status.UNKNOWN), None
        for _ in range(Budget.search_tries):
            assignment = {key: self.random.choice(domain)
                          for key, domain in zip(self.keys, domains)}
            if all(_holds(atom, assignment) for atom in self.linear):
                return Status.SAT, assignment
        _LOG.debug("bounded search gave up over %d unknowns", len(self.keys))
        return Status.UNKNOWN, None


def is_sat(constraint, seed=0):
    """Decide satisfiability of a constraint.

    :param constraint: Constraint to decide.
    :type constraint: :obj:`prooforge.lib.constraint.Constraint`
    :param seed: Seed of the bounded search.
    :type seed: int
    :rtype: :obj:`SatResult`
    """
    if type(constraint) is Top:
        return SatResult(Status.SAT)
    if constraint is BOTTOM or type(constraint) is Bottom:
        return SatResult(Status.UNSAT)
    undecided = False
    try:
        for atoms in _cubes(constraint, Budget.cubes):
            cube = _Cube(atoms, seed)
            booleans = cube.propositional()
            if booleans is None:
                continue
            status, assignment = cube.solve()
            if status is Status.UNSAT:
                continue
            if status is Status.UNKNOWN or not cube.exact:
                undecided = True
                continue
            witness = {_name(key): value for key, value in assignment.items()}
            witness.update(booleans)
            return SatResult(Status.SAT, witness)
    except _OverBudget:
        _LOG.debug("disjunctive normal form over budget")
        return SatResult(Status.UNKNOWN)
    return SatResult(Status.UNKNOWN if undecided else Status.UNSAT)


def entails(premise, conclusion):
    """Decide whether every model of ``premise`` satisfies ``conclusion``.

    :param premise: The assumed constraint.
    :type premise: :obj:`prooforge.lib.constraint.Constraint`
    :param conclusion: The constraint to establish.
    :type conclusion: :obj:`prooforge.lib.constraint.Constraint`
    :rtype: :obj:`Entailment`
    """
    if type(conclusion) is Top or type(premise) is Bottom:
        return Entailment(Verdict.YES)
    if set(conjuncts(conclusion)) <= set(conjuncts(premise)):
        return Entailment(Verdict.YES)
    result = is_sat(conj(premise, negate(conclusion)))
    if result.status is Status.UNSAT:
        return Entailment(Verdict.YES)
    if result.status is Status.SAT:
        return Entailment(Verdict.NO, result.witness)
    return Entailment(Verdict.UNKNOWN)


def satisfiable(constraint):
    """True unless the constraint is proven unsatisfiable."""
    return is_sat(constraint).status is not Status.UNSAT
