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
"""Turn the step edges of a proof into rewrite rules."""
import logging
from dataclasses import dataclass
from fractions import Fraction

from prooforge.exceptions import CompilationError
from prooforge.lib.constraint import simplify, to_term
from prooforge.lib.solver import Status, is_sat
from prooforge.lib.term import Subst, Var, apply_subst, variables
from prooforge.semantics.definition import COMPILED_PRIORITY, Rule

_LOG = logging.getLogger(__name__)


@dataclass(frozen=True)
class CompiledRule:
    """A rule emitted from one step edge of a proof."""

    rule: Rule
    proof_id: str
    source: int
    target: int

    @property
    def consolidated(self):
        """Number of original rewrites the rule replaces."""
        return self.rule.consolidated


def _canonical(config, constraint_term, result):
    renaming = Subst({var.name: Var("V%d" % index, var.sort)
                      for index, var in enumerate(variables(config))})
    return (apply_subst(renaming, config), apply_subst(renaming, constraint_term),
            apply_subst(renaming, result))


def emit_rules(graph, semantics=None):
    """One compiled rule per step edge of a proof graph.

    The left-hand side is the source configuration, the right-hand side the
    target configuration and the side condition the source constraint.
    Variables are renamed ``V0``, ``V1``... in order of first occurrence.

    :param graph: A normalized proof graph.
    :type graph: :obj:`prooforge.proofs.aprp.AprpGraph`
    :param semantics: Semantics used to simplify side conditions.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :rtype: list
    :raises CompilationError: If a step edge starts from an unsatisfiable state.
    """
    compiled = []
    edges = sorted(graph.steps, key=lambda edge: (edge.source, edge.target))
    for edge in edges:
        source = graph.vertex(edge.source).cterm
        target = graph.vertex(edge.target).cterm
        if is_sat(source.constraint).status is Status.UNSAT:
            raise CompilationError("step %d -> %d of %s starts from an unsatisfiable state"
                                   % (edge.source, edge.target, graph.proof_id))
        constraint = simplify(source.constraint, semantics.normalize) if semantics \
            else simplify(source.constraint)
        lhs, requires, rhs = _canonical(source.config, to_term(constraint), target.config)
        if not requires.vars <= lhs.vars or not rhs.vars <= lhs.vars:
            _LOG.warning("%s: step %d -> %d mentions variables outside its left-hand side, "
                         "no rule emitted", graph.proof_id, edge.source, edge.target)
            continue
        rule = Rule("%s-%d" % (graph.proof_id, len(compiled)), lhs, rhs, requires,
                    priority=COMPILED_PRIORITY, provenance="compiled(%s)" % graph.proof_id,
                    consolidated=edge.depth, path=edge.rules)
        compiled.append(CompiledRule(rule, graph.proof_id, edge.source, edge.target))
    _LOG.info("%s: emitted %d rules", graph.proof_id, len(compiled))
    return compiled


def integrate(semantics, compiled, name=None):
    """Semantics extended with compiled rules at priority 10.

    Rule names already taken get a ``-2``, ``-3``... suffix.

    :param semantics: Semantics the proofs were built against.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :param compiled: Rules from :func:`emit_rules`, or plain rules.
    :type compiled: list
    :param name: Module name of the result.
    :type name: str
    :rtype: :obj:`prooforge.semantics.definition.Semantics`
    """
    taken = {rule.name for rule in semantics.rules}
    rules = []
    for item in compiled:
        rule = item.rule if isinstance(item, CompiledRule) else item
        rule_name = rule.name
        suffix = 2
        while rule_name in taken:
            rule_name = "%s-%d" % (rule.name, suffix)
            suffix += 1
        taken.add(rule_name)
        rules.append(Rule(rule_name, rule.lhs, rule.rhs, rule.requires,
                          priority=COMPILED_PRIORITY, provenance=rule.provenance,
                          consolidated=rule.consolidated, path=rule.path))
    return semantics.with_rules(rules, name or "%s-COMPILED" % semantics.name)


def delta_steps(original, compiled):
    """Fraction of rewrites saved: ``1 - compiled / original``.

    :raises ValueError: If ``original`` is not positive.
    """
    if original <= 0:
        raise ValueError("original step count must be positive, got %d" % original)
    return 1 - Fraction(compiled, original)
