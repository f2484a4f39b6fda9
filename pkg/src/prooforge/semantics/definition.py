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
"""Rules, equations and the semantics holding them."""
import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from prooforge.exceptions import ValidationError
from prooforge.lib.constraint import CTerm, from_term
from prooforge.lib.syntax import Signature, unparse
from prooforge.lib.term import (App, Cell, CellBag, EMPTY_SUBST, TRUE, Term, Var, fold,
                                k_head, match)

_LOG = logging.getLogger(__name__)

HANDWRITTEN = "handwritten"
DEFAULT_PRIORITY = 50
COMPILED_PRIORITY = 10
MAIN_CELL = "k"


@dataclass(frozen=True)
class Rule:
    """A conditional rewrite rule over partial configurations.

    ``lhs`` and ``rhs`` carry the same cells. Cells whose bodies differ are
    the ones the rule rewrites, all others are only read.
    """

    name: str
    lhs: CellBag
    rhs: CellBag
    requires: Term = TRUE
    priority: int = DEFAULT_PRIORITY
    provenance: str = HANDWRITTEN
    consolidated: int = 1
    path: Tuple[str, ...] = ()
    index: int = field(default=0, compare=False)

    @cached_property
    def condition(self):
        """The side condition as a constraint."""
        return from_term(self.requires)

    @cached_property
    def rewrites(self):
        """Labels of the cells this rule changes."""
        return tuple(label for label in self.lhs.labels
                     if self.lhs.get(label) != self.rhs.get(label))

    @property
    def compiled(self):
        """True if the rule came out of a proof."""
        return self.provenance.startswith("compiled")

    @property
    def proof_id(self):
        """Proof the rule was compiled from, or None."""
        if self.compiled:
            return self.provenance[len("compiled("):-1]
        return None

    @cached_property
    def head(self):
        """Constructor at the head of the main cell, None if any head may match."""
        body = self.lhs.get(MAIN_CELL)
        if body is None:
            return None
        first = k_head(body)
        return first.ctor if type(first) is App else None


@dataclass(frozen=True)
class Equation:
    """A defining equation of a function symbol."""

    lhs: App
    rhs: Term
    requires: Term = TRUE


@dataclass(frozen=True)
class ProofSpec:
    """A reachability claim: every run from ``init`` reaches ``final``."""

    name: str
    init: CTerm
    final: CTerm
    sameloop: Tuple[str, ...] = ()
    terminal: str = "final-or-stuck"


class Semantics:
    """A rewrite theory: signature, configuration, equations and rules."""

    cache_size = 200000

    def __init__(self, name, signature=None):
        """Initialize an empty semantics.

        :param name: Module name.
        :type name: str
        :param signature: Signature to extend, the builtin one by default.
        :type signature: :obj:`prooforge.lib.syntax.Signature`
        """
        self.name = name
        self.signature = signature or Signature.builtin()
        self.declarations = []
        self.equations: Dict[str, List[Equation]] = {}
        self.rules: List[Rule] = []
        self._index: Dict[Optional[str], List[Rule]] = {}
        self._candidates = {}
        self._cache = {}

    def __repr__(self):
        return "<Semantics %s: %d rules, %d equations>" % (
            self.name, len(self.rules), sum(len(e) for e in self.equations.values()))

    @property
    def cells(self):
        """Cell labels and sorts of the configuration, in declaration order."""
        return self.signature.cells

    def declare(self, decl):
        """Declare an operator."""
        self.signature.declare(decl)
        self.declarations.append(decl)

    def add_equation(self, equation):
        """Add a defining equation, marking its head as a function.

        :raises ValidationError: If the equation does not define a declared symbol.
        """
        decl = self.signature.ops.get(equation.lhs.ctor) if type(equation.lhs) is App else None
        if decl is None or decl.builtin:
            raise ValidationError("equation does not define a user function: %s"
                                  % unparse(equation.lhs))
        extra = (equation.rhs.vars | equation.requires.vars) - equation.lhs.vars
        if extra:
            raise ValidationError("equation for %s uses unbound variables %s"
                                  % (decl.token, ", ".join(sorted(extra))))
        if not decl.function:
            decl = replace(decl, function=True)
            self.signature.ops[decl.name] = decl
            self.signature.by_token[decl.token] = decl
            self.signature.declare(decl)
            self.declarations = [decl if d.name == decl.name else d for d in self.declarations]
        self.equations.setdefault(equation.lhs.ctor, []).append(equation)
        self._cache.clear()

    def add_rule(self, rule):
        """Add a rule, checking it against the configuration.

        :param rule: Rule to add.
        :type rule: :obj:`Rule`
        :return: The rule as stored, with its declaration index.
        :rtype: :obj:`Rule`
        :raises ValidationError: On a missing main cell, unknown cells, unbound
                                 variables or a duplicate name.
        """
        if any(existing.name == rule.name for existing in self.rules):
            raise ValidationError("duplicate rule name %r" % rule.name)
        if MAIN_CELL not in rule.lhs.labels:
            raise ValidationError("rule %s: no %s cell" % (rule.name, MAIN_CELL))
        if rule.lhs.labels != rule.rhs.labels:
            raise ValidationError("rule %s: sides mention different cells" % rule.name)
        if self.cells:
            unknown = [label for label in rule.lhs.labels if label not in self.cells]
            if unknown:
                raise ValidationError("rule %s: unknown cells %s" % (rule.name, ", ".join(unknown)))
        extra = (rule.rhs.vars | rule.requires.vars) - rule.lhs.vars
        if extra:
            raise ValidationError("rule %s: unbound variables %s"
                                  % (rule.name, ", ".join(sorted(extra))))
        rule = replace(rule, index=len(self.rules))
        self.rules.append(rule)
        self._index.setdefault(rule.head, []).append(rule)
        self._candidates.clear()
        return rule

    def candidates(self, config):
        """Rules that may match ``config``, by priority then declaration order."""
        body = config.get(MAIN_CELL) if type(config) is CellBag else None
        first = k_head(body) if body is not None else None
        key = first.ctor if type(first) is App else None
        rules = self._candidates.get(key)
        if rules is None:
            rules = list(self._index.get(None, ()))
            if key is not None:
                rules += self._index.get(key, ())
            rules.sort(key=lambda rule: (rule.priority, rule.index))
            self._candidates[key] = rules
        return rules

    def matching(self, config):
        """Pairs of rule and match for every rule whose lhs matches ``config``."""
        found = []
        for rule in self.candidates(config):
            subst = match(rule.lhs, config)
            if subst is not None:
                found.append((rule, subst))
        return found

    def instantiate(self, term, subst=EMPTY_SUBST):
        """Apply ``subst`` and reduce functions in the resulting skeleton.

        Images of ``subst`` are taken to be in normal form already.

        :param term: Rule or equation right-hand side.
        :type term: :obj:`prooforge.lib.term.Term`
        :param subst: Bindings of the variables of ``term``.
        :type subst: :obj:`prooforge.lib.term.Subst`
        :rtype: :obj:`prooforge.lib.term.Term`
        """
        kind = type(term)
        if kind is Var:
            return subst.get(term.name, term)
        if not term.vars:
            return self._ground(term)
        if kind is App:
            args = tuple(self.instantiate(arg, subst) for arg in term.args)
            return self._reduce(App(term.ctor, args, term.sort))
        if kind is Cell:
            return Cell(term.label, self.instantiate(term.body, subst))
        if kind is CellBag:
            return CellBag(tuple(self.instantiate(cell, subst) for cell in term.cells))
        return term

    def normalize(self, term):
        """Normal form of a term under the equations and builtins."""
        return self.instantiate(term, EMPTY_SUBST)

    def _ground(self, term):
        kind = type(term)
        if kind is App:
            cached = self._cache.get(term)
            if cached is None:
                args = tuple(self._ground(arg) for arg in term.args)
                cached = self._reduce(App(term.ctor, args, term.sort))
                if len(self._cache) > self.cache_size:
                    self._cache.clear()
                self._cache[term] = cached
            return cached
        if kind is Cell:
            return Cell(term.label, self._ground(term.body))
        if kind is CellBag:
            return CellBag(tuple(self._ground(cell) for cell in term.cells))
        return term

    def _reduce(self, term):
        """Reduce an application whose arguments are normal."""
        folded = fold(term.ctor, term.args)
        if folded is not None:
            return folded
        for equation in self.equations.get(term.ctor, ()):
            subst = match(equation.lhs, term)
            if subst is None:
                continue
            if equation.requires != TRUE and self.instantiate(equation.requires, subst) != TRUE:
                continue
            return self.instantiate(equation.rhs, subst)
        return term

    def apply(self, rule, subst, config):
        """Configuration after rewriting ``config`` with ``rule`` under ``subst``."""
        return config.replace({label: self.instantiate(rule.rhs.get(label), subst)
                               for label in rule.rewrites})

    def with_rules(self, rules, name=None):
        """A copy of this semantics with ``rules`` appended."""
        other = Semantics(name or self.name, self.signature.copy())
        other.declarations = list(self.declarations)
        other.equations = {ctor: list(eqs) for ctor, eqs in self.equations.items()}
        for rule in list(self.rules) + list(rules):
            other.add_rule(rule)
        return other

    def rule(self, name):
        """Look up a rule by name.

        :raises KeyError: If there is no such rule.
        """
        for rule in self.rules:
            if rule.name == name:
                return rule
        raise KeyError(name)
