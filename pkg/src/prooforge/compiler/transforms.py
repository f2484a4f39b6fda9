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
"""Proof graph rewrites that lengthen step edges.

Every transformation works on a copy of the graph and keeps it valid: the
rewrite count along each root to leaf path is unchanged and every edge still
replays against the semantics the graph was built with.
"""
import logging

from prooforge.lib.constraint import CSubst, conj, csubst_apply, substitute
from prooforge.lib.solver import Status, is_sat
from prooforge.lib.term import Subst, evaluate
from prooforge.proofs.aprp import REACHED, BranchEdge, StepEdge

_LOG = logging.getLogger(__name__)

DEFAULT_BUDGET = 100


def _in_degree(graph, vertex_id):
    return (len(graph.in_steps(vertex_id)) + len(graph.in_branches(vertex_id))
            + len(graph.in_covers(vertex_id)))


def _inner(graph, vertex_id):
    """Whether a vertex may disappear from the graph."""
    return vertex_id not in (graph.root, graph.final) and _in_degree(graph, vertex_id) == 1


def _compress_once(graph):
    for first in graph.steps:
        middle = first.target
        if not _inner(graph, middle):
            continue
        second = graph.out_step(middle)
        if second is None or second.target == middle:
            continue
        graph.steps = [e for e in graph.steps if e is not first and e is not second]
        graph.steps.append(StepEdge(first.source, second.target, first.depth + second.depth,
                                    first.rules + second.rules))
        graph.remove_vertex(middle)
        return True
    return False


def _lift_step_branch_once(graph, normalize):
    for step in graph.steps:
        middle = step.target
        branch = graph.out_branch(middle)
        if branch is None or not _inner(graph, middle):
            continue
        source = graph.vertex(step.source).cterm
        arms = []
        lifted_steps = []
        for csubst, target in branch.arms:
            lifted = csubst_apply(csubst, source, normalize)
            if is_sat(lifted.constraint).status is Status.UNSAT:
                graph.log.append("lift: dropped infeasible arm %s of vertex %d"
                                 % (csubst, step.source))
                continue
            lifted_id = graph.add_vertex(lifted, REACHED)
            arms.append((csubst, lifted_id))
            lifted_steps.append(StepEdge(lifted_id, target, step.depth, step.rules))
        graph.steps = [e for e in graph.steps if e is not step] + lifted_steps
        graph.branches = [e for e in graph.branches if e is not branch]
        graph.branches.append(BranchEdge(step.source, tuple(arms)))
        graph.remove_vertex(middle)
        graph.prune()
        return True
    return False


def compose(outer, inner, normalize=evaluate):
    """Constrained substitution applying ``outer`` and then ``inner``."""
    subst = Subst(outer.subst).compose(Subst(inner.subst))
    constraint = conj(substitute(outer.constraint, Subst(inner.subst), normalize),
                      inner.constraint)
    return CSubst(dict(subst), constraint)


def _lift_branch_branch_once(graph, normalize):
    for outer in graph.branches:
        nested = [(csubst, target) for csubst, target in outer.arms
                  if graph.out_branch(target) is not None and _inner(graph, target)]
        if not nested:
            continue
        csubst, middle = nested[0]
        inner = graph.out_branch(middle)
        source = graph.vertex(outer.source).cterm
        arms = []
        for arm, target in outer.arms:
            if target != middle:
                arms.append((arm, target))
                continue
            for inner_arm, inner_target in inner.arms:
                composed = compose(csubst, inner_arm, normalize)
                if is_sat(conj(source.constraint, composed.constraint)).status is Status.UNSAT:
                    graph.log.append("lift: dropped infeasible arm %s of vertex %d"
                                     % (composed, outer.source))
                    continue
                arms.append((composed, inner_target))
        graph.branches = [e for e in graph.branches if e is not outer and e is not inner]
        graph.branches.append(BranchEdge(outer.source, tuple(arms)))
        graph.remove_vertex(middle)
        graph.prune()
        return True
    return False


def _fixpoint(graph, once):
    graph = graph.copy()
    while once(graph):
        pass
    return graph


def compress_steps(graph):
    """Merge step edges through vertices with a single in and out edge.

    A vertex with any other incidence, such as the target of a cover edge,
    is kept so loops stay visible.

    :param graph: A valid proof graph.
    :type graph: :obj:`prooforge.proofs.aprp.AprpGraph`
    :rtype: :obj:`prooforge.proofs.aprp.AprpGraph`
    """
    return _fixpoint(graph, _compress_once)


def lift_step_branch(graph, normalize=evaluate):
    """Move branches in front of the step edge leading to them.

    ``A -M-> B -[a1..an]-> [C1..Cn]`` becomes ``A -[a1..an]-> [ai(A) -M-> Ci]``.
    Lifted arms that turn out unsatisfiable are dropped and logged.
    """
    return _fixpoint(graph, lambda g: _lift_step_branch_once(g, normalize))


def lift_branch_branch(graph, normalize=evaluate):
    """Flatten a branch nested right under another branch arm."""
    return _fixpoint(graph, lambda g: _lift_branch_branch_once(g, normalize))


def normalize(graph, budget=DEFAULT_BUDGET, term_normalize=evaluate):
    """Apply all transformations until none applies.

    Each single rewrite uses one unit of ``budget``. When the budget runs
    out the graph is returned as is with ``normalized`` cleared; it is
    still a valid proof.

    :param graph: A valid proof graph.
    :type graph: :obj:`prooforge.proofs.aprp.AprpGraph`
    :param budget: Maximum number of rewrites.
    :type budget: int
    :param term_normalize: Term normalizer for specialized vertices.
    :type term_normalize: callable
    :rtype: :obj:`prooforge.proofs.aprp.AprpGraph`
    """
    graph = graph.copy()
    passes = (lambda g: _lift_branch_branch_once(g, term_normalize),
              lambda g: _lift_step_branch_once(g, term_normalize),
              _compress_once)
    used = 0
    while used < budget:
        if not any(once(graph) for once in passes):
            graph.normalized = True
            _LOG.debug("normalized %s with %d rewrites", graph.proof_id, used)
            return graph
        used += 1
    remaining = any(once(graph.copy()) for once in passes)
    graph.normalized = not remaining
    if remaining:
        _LOG.warning("normalizing %s stopped after %d rewrites", graph.proof_id, used)
        graph.log.append("normalize: budget of %d rewrites exhausted" % budget)
    return graph
