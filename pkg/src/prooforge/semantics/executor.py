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
"""Concrete interpretation and symbolic execution of a semantics."""
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from prooforge.exceptions import FuelExhaustedError, ProofError, SemanticsBugError
from prooforge.lib.constraint import (BOTTOM, CSubst, CTerm, TOP, conj, conjuncts, from_term,
                                      negate, substitute)
from prooforge.lib.solver import Status, Verdict, entails, is_sat
from prooforge.lib.term import App, BoolLit, CellBag, TRUE, k_head, match
from prooforge.semantics.definition import MAIN_CELL

_LOG = logging.getLogger(__name__)


@dataclass
class Run:
    """Outcome of a concrete run."""

    config: object
    steps: int
    counts: Dict[str, int] = field(default_factory=Counter)
    trace: List[str] = field(default_factory=list)


@dataclass
class StepResult:
    """Outcome of :func:`execute`.

    ``applied`` counts rewrites. A result with no rewrites and no branches is
    stuck.
    """

    next: CTerm
    branches: Tuple[CSubst, ...] = ()
    applied: int = 0
    path: Tuple[str, ...] = ()

    @property
    def stuck(self):
        """True if nothing could be applied."""
        return self.applied == 0 and not self.branches


def _main_head(config):
    body = config.get(MAIN_CELL) if type(config) is CellBag else None
    first = k_head(body) if body is not None else None
    return first.ctor if type(first) is App else str(first)


def step_concrete(semantics, config):
    """Apply the first applicable rule to a ground configuration.

    :param semantics: The semantics to interpret.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :param config: A ground configuration.
    :type config: :obj:`prooforge.lib.term.CellBag`
    :return: The next configuration and the rule name, or None when stuck.
    :rtype: tuple
    :raises SemanticsBugError: If a side condition does not reduce to a boolean.
    """
    for rule in semantics.candidates(config):
        subst = match(rule.lhs, config)
        if subst is None:
            continue
        if rule.requires != TRUE:
            condition = semantics.instantiate(rule.requires, subst)
            if type(condition) is not BoolLit:
                if condition.vars:
                    raise SemanticsBugError("rule %s: condition %s has unbound variables"
                                            % (rule.name, condition))
                _LOG.debug("rule %s: condition %s does not reduce", rule.name, condition)
                continue
            if not condition.value:
                continue
        return semantics.apply(rule, subst, config), rule.name
    return None


def run_concrete(semantics, config, fuel=None, trace=False):
    """Rewrite a ground configuration until it is stuck.

    :param semantics: The semantics to interpret.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :param config: A ground configuration.
    :type config: :obj:`prooforge.lib.term.CellBag`
    :param fuel: Maximum number of rewrites, unbounded if None.
    :type fuel: int
    :param trace: Record one ``<step> <rule> <k head>`` line per rewrite in ``Run.trace``.
    :type trace: bool
    :rtype: :obj:`Run`
    :raises FuelExhaustedError: If the fuel runs out first.
    """
    if fuel is not None and fuel <= 0:
        raise ValueError("fuel must be positive")
    counts = Counter()
    lines = []
    steps = 0
    while True:
        result = step_concrete(semantics, config)
        if result is None:
            return Run(config, steps, counts, lines)
        if fuel is not None and steps >= fuel:
            raise FuelExhaustedError(config, steps)
        config, name = result
        steps += 1
        counts[name] += 1
        if trace:
            lines.append("%d %s %s" % (steps, name, _main_head(config)))
            _LOG.debug("%s", lines[-1])


def _guard(semantics, rule, subst):
    if rule.requires == TRUE:
        return TOP
    return from_term(semantics.instantiate(rule.requires, subst))


def execute(semantics, cterm, steps):
    """Symbolically rewrite a constrained term.

    Rules are tried by priority. The guard of a rule is its instantiated side
    condition together with the negated guards of the rules tried before it.
    A step is taken only when exactly one rule is feasible and the path
    constraint entails its guard. Otherwise execution stops and reports one
    branch per feasible rule, possibly a single one.

    :param semantics: The semantics to run.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :param cterm: Start state.
    :type cterm: :obj:`prooforge.lib.constraint.CTerm`
    :param steps: Maximum number of rewrites.
    :type steps: int
    :rtype: :obj:`StepResult`
    :raises ProofError: If the start state is unsatisfiable.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    config, constraint = cterm.config, cterm.constraint
    if is_sat(constraint).status is Status.UNSAT:
        raise ProofError("cannot execute from an unsatisfiable state: %s" % cterm)
    applied = 0
    path = []
    while applied < steps:
        feasible = []
        earlier = []
        for rule, subst in semantics.matching(config):
            guard = _guard(semantics, rule, subst)
            effective = conj(guard, *(negate(previous) for previous in earlier))
            earlier.append(guard)
            if effective != BOTTOM:
                combined = conj(constraint, effective)
                if combined != BOTTOM and is_sat(combined).status is not Status.UNSAT:
                    feasible.append((rule, subst, effective))
            if guard == TOP:
                break
        if not feasible:
            break
        if len(feasible) == 1:
            rule, subst, effective = feasible[0]
            if effective == TOP or entails(constraint, effective).verdict is Verdict.YES:
                config = semantics.apply(rule, subst, config)
                applied += 1
                path.append(rule.name)
                continue
        _LOG.debug("branching on %s after %d steps", ", ".join(r.name for r, _, _ in feasible),
                   applied)
        branches = tuple(CSubst({}, effective) for _, _, effective in feasible)
        return StepResult(CTerm(config, constraint), branches, applied, tuple(path))
    return StepResult(CTerm(config, constraint), (), applied, tuple(path))


def implies(specific, general, rigid=frozenset(), normalize=None) -> Optional[CSubst]:
    """Show that ``general`` subsumes ``specific``.

    :param specific: The state to cover.
    :type specific: :obj:`prooforge.lib.constraint.CTerm`
    :param general: The covering state.
    :type general: :obj:`prooforge.lib.constraint.CTerm`
    :param rigid: Variables of ``general`` that may only match themselves.
    :type rigid: frozenset
    :param normalize: Term normalizer used on the instantiated constraint.
    :type normalize: callable
    :return: A substitution with ``general`` instantiated to ``specific``
             and the part of the specific constraint it does not entail.
    :rtype: :obj:`prooforge.lib.constraint.CSubst`
    """
    subst = match(general.config, specific.config, rigid)
    if subst is None:
        return None
    subst = subst.without_identities()
    if normalize is None:
        target = substitute(general.constraint, subst)
    else:
        target = substitute(general.constraint, subst, normalize)
    if entails(specific.constraint, target).verdict is not Verdict.YES:
        return None
    covered = set(conjuncts(target))
    residual = conj(*(item for item in conjuncts(specific.constraint) if item not in covered))
    return CSubst(dict(subst), residual)
