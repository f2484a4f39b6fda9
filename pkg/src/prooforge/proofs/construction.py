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
"""Build all-path reachability proofs by symbolic execution."""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from prooforge.exceptions import ProofError
from prooforge.lib.constraint import CTerm, common_constraints, conjuncts, csubst_apply, substitute
from prooforge.lib.solver import Status, is_sat
from prooforge.lib.term import App, CellBag, VariableSupply, cau, is_renaming, k_head, match
from prooforge.proofs.aprp import FINAL, PENDING, REACHED, STUCK, AprpGraph, reachable_up
from prooforge.semantics.definition import MAIN_CELL
from prooforge.semantics.executor import execute, implies

_LOG = logging.getLogger(__name__)

PC_CELL = "pc"


@dataclass(frozen=True)
class ProofConfig:
    """Knobs of :func:`construct_aprp`.

    ``n`` bounds the rewrites of one execute call and ``i_max`` the number of
    worklist iterations. ``terminal`` and ``sameloop`` replace the predicates
    derived from the proof spec when given.
    """

    n: int = 1
    i_max: int = 1000
    precise: bool = False
    terminal: Optional[Callable] = None
    sameloop: Optional[Callable] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1, got %d" % self.n)
        if self.i_max < 1:
            raise ValueError("i_max must be at least 1, got %d" % self.i_max)


def abstract(first, second, fresh):
    """Generalize two constrained terms.

    The configuration is the anti-unifier of both configurations and the
    constraint keeps only the conjuncts the two constraints share.

    :param first: First constrained term.
    :type first: :obj:`prooforge.lib.constraint.CTerm`
    :param second: Second constrained term.
    :type second: :obj:`prooforge.lib.constraint.CTerm`
    :param fresh: Supply for the variables introduced at differing positions.
    :type fresh: :obj:`prooforge.lib.term.VariableSupply`
    :rtype: :obj:`prooforge.lib.constraint.CTerm`
    :raises MalformedTermError: If the configurations have different sorts.
    """
    if first == second:
        return first
    config, _, _ = cau(first.config, second.config, fresh)
    return CTerm(config, common_constraints(first.constraint, second.constraint))


def is_variant(first, second):
    """Whether two constrained terms are equal up to renaming of variables."""
    subst = match(second.config, first.config)
    if subst is None or not is_renaming(subst) or match(first.config, second.config) is None:
        return False
    renamed = substitute(second.constraint, subst)
    return set(conjuncts(renamed)) == set(conjuncts(first.constraint))


def main_head(cterm):
    """Constructor at the head of the main cell, or None."""
    config = cterm.config
    body = config.get(MAIN_CELL) if type(config) is CellBag else None
    if body is None:
        return None
    first = k_head(body)
    return first.ctor if type(first) is App else None


def same_head_and_pc(current, previous):
    """Default loop detection: same main cell head and same program counter."""
    head = main_head(current)
    if head is None or head != main_head(previous):
        return False
    pc = current.config.get(PC_CELL) if type(current.config) is CellBag else None
    return pc is None or pc == previous.config.get(PC_CELL)


def heads_in(ctors):
    """Loop detection on states whose main cell starts with one of ``ctors``."""
    ctors = frozenset(ctors)

    def sameloop(current, previous):
        head = main_head(current)
        return head in ctors and head == main_head(previous)

    return sameloop


def never(current, previous):  # pylint:disable=unused-argument
    """Loop detection that never fires, for straight-line claims."""
    return False


def stepped_ancestors(graph, vertex_id):
    """Ancestors that reach a vertex through at least one step edge."""
    parents = {}
    for edge in graph.steps:
        parents.setdefault(edge.target, []).append((edge.source, True))
    for edge in graph.branches:
        for target in edge.targets:
            parents.setdefault(target, []).append((edge.source, False))
    found = set()
    seen = {(vertex_id, False)}
    queue = deque(seen)
    while queue:
        current, stepped = queue.popleft()
        for parent, is_step in parents.get(current, ()):
            state = (parent, stepped or is_step)
            if state in seen or parent == graph.final:
                continue
            seen.add(state)
            if state[1]:
                found.add(parent)
            queue.append(state)
    return found


def spec_sameloop(semantics, spec):
    """Loop predicate of a proof spec, from its ``sameloop`` tokens if any.

    ``sameloop none`` turns loop abstraction off.
    """
    if not spec.sameloop:
        return same_head_and_pc
    if spec.sameloop == ("none",):
        return never
    ctors = []
    for token in spec.sameloop:
        decl = semantics.signature.by_token.get(token) or semantics.signature.ops.get(token)
        if decl is None:
            raise ProofError("sameloop names unknown constructor %r" % token)
        ctors.append(decl.name)
    return heads_in(ctors)


class _Construction:  # pylint:disable=too-few-public-methods
    """State of one run of the worklist algorithm."""

    def __init__(self, semantics, spec, config):
        self.semantics = semantics
        self.spec = spec
        self.config = config
        self.graph = AprpGraph(spec.name, semantics.name)
        self.rigid = spec.init.vars & spec.final.vars
        self.fresh = VariableSupply.after(spec.init.config, spec.final.config)
        self.sameloop = config.sameloop or spec_sameloop(semantics, spec)
        self.worklist = deque()
        self.abstractions = set()
        self.notes = []

    def note(self, message, *args):
        text = message % args
        self.notes.append(text)
        _LOG.debug("%s: %s", self.spec.name, text)

    def flush(self):
        """Write the notes of one iteration as a single log record."""
        if self.notes:
            self.graph.log.append("; ".join(self.notes))
        self.notes = []

    def push(self, cterm):
        vertex_id = self.graph.add_vertex(cterm, PENDING)
        self.worklist.append(vertex_id)
        return vertex_id

    def terminal(self, vertex_id):
        """Close a vertex that satisfies the terminal predicate."""
        cterm = self.graph.vertex(vertex_id).cterm
        if self.config.terminal is not None:
            if self.config.terminal(cterm):
                self.graph.vertex(vertex_id).status = REACHED
                self.note("vertex %d: terminal", vertex_id)
                return True
            return False
        final = self.graph.vertex(self.graph.final).cterm
        csubst = implies(cterm, final, self.rigid, self.semantics.normalize)
        if csubst is not None:
            self.graph.add_cover(vertex_id, self.graph.final, csubst)
            self.graph.vertex(vertex_id).status = REACHED
            self.note("vertex %d: reaches the final state", vertex_id)
            return True
        if self.spec.terminal == "final-or-stuck" and vertex_id not in self.abstractions \
                and not self.semantics.matching(cterm.config):
            self.graph.vertex(vertex_id).status = STUCK
            self.note("vertex %d: terminal stuck state", vertex_id)
            return True
        return False

    def subsume(self, vertex_id):
        """Cover a vertex by an ancestor or by a loop abstraction."""
        cterm = self.graph.vertex(vertex_id).cterm
        normalize = self.semantics.normalize
        abstraction = cterm
        loop_ancestors = []
        stepped = stepped_ancestors(self.graph, vertex_id)
        for previous_id in reachable_up(self.graph, vertex_id):
            if previous_id not in stepped:
                continue
            previous = self.graph.vertex(previous_id).cterm
            if self.config.precise:
                csubst = implies(cterm, previous, self.rigid, normalize)
                if csubst is not None:
                    self.graph.add_cover(vertex_id, previous_id, csubst)
                    self.graph.vertex(vertex_id).status = REACHED
                    self.note("vertex %d: covered by %d", vertex_id, previous_id)
                    return True
            if self.sameloop(cterm, previous):
                abstraction = abstract(abstraction, previous, self.fresh)
                loop_ancestors.append(previous_id)
        if abstraction == cterm:
            return False
        for previous_id in loop_ancestors:
            previous = self.graph.vertex(previous_id).cterm
            if is_variant(abstraction, previous):
                csubst = implies(cterm, previous, self.rigid, normalize)
                if csubst is not None:
                    self.graph.add_cover(vertex_id, previous_id, csubst)
                    self.graph.vertex(vertex_id).status = REACHED
                    self.note("vertex %d: loops back to %d", vertex_id, previous_id)
                    return True
        if is_variant(abstraction, cterm):
            self.note("vertex %d: abstraction is a variant of itself", vertex_id)
            return False
        csubst = implies(cterm, abstraction, self.rigid, normalize)
        if csubst is None:
            self.note("vertex %d: abstraction does not cover it", vertex_id)
            return False
        target = self.push(abstraction)
        self.abstractions.add(target)
        self.graph.add_cover(vertex_id, target, csubst)
        self.graph.vertex(vertex_id).status = REACHED
        self.note("vertex %d: abstracted into %d", vertex_id, target)
        return True

    def advance(self, vertex_id):
        """Symbolically execute a vertex and add its successors."""
        vertex = self.graph.vertex(vertex_id)
        result = execute(self.semantics, vertex.cterm, self.config.n)
        if result.stuck:
            vertex.status = STUCK
            self.note("vertex %d: stuck", vertex_id)
            if self.spec.terminal == "final" or vertex_id in self.abstractions:
                self.graph.partial = True
            return
        vertex.status = REACHED
        source = vertex_id
        if result.applied:
            if result.branches:
                source = self.graph.add_vertex(result.next, REACHED)
            else:
                source = self.push(result.next)
            self.graph.add_step(vertex_id, source, result.applied, result.path)
            self.note("vertex %d: %d rewrites to %d", vertex_id, result.applied, source)
        if result.branches:
            arms = []
            for arm in result.branches:
                target = csubst_apply(arm, result.next, self.semantics.normalize)
                if is_sat(target.constraint).status is Status.UNSAT:
                    continue
                arms.append((arm, self.push(target)))
            if not arms:
                self.graph.vertex(source).status = STUCK
                self.note("vertex %d: no feasible branch", source)
                return
            self.graph.add_branch(source, arms)
            self.note("vertex %d: branches into %s", source,
                      ", ".join(str(target) for _, target in arms))

    def run(self):
        graph = self.graph
        graph.final = graph.add_vertex(self.spec.final, FINAL)
        graph.root = self.push(self.spec.init)
        iterations = 0
        while self.worklist and iterations < self.config.i_max:
            vertex_id = self.worklist.popleft()
            if graph.vertex(vertex_id).status != PENDING:
                continue
            iterations += 1
            if not (self.terminal(vertex_id) or self.subsume(vertex_id)):
                self.advance(vertex_id)
            self.flush()
        if graph.pending:
            graph.partial = True
            _LOG.warning("proof %s is partial: %d vertices pending after %d iterations",
                         self.spec.name, len(graph.pending), iterations)
        return graph


def construct_aprp(semantics, spec, config=None):
    """Build a proof graph for a reachability claim.

    Pending vertices are taken in insertion order. Each one is first checked
    against the terminal predicate, then against its ancestors for subsumption
    (precise mode) or loop abstraction, and otherwise executed for up to
    ``config.n`` rewrites. Vertices still pending after ``config.i_max``
    iterations are left pending and the graph is marked partial.

    Loop detection only compares a vertex with ancestors it is reached from
    through at least one step edge. A stuck loop abstraction marks the graph
    partial. Each iteration writes one record to ``graph.log``.

    :param semantics: Semantics to execute with.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :param spec: The claim to prove.
    :type spec: :obj:`prooforge.semantics.definition.ProofSpec`
    :param config: Construction settings, defaults if None.
    :type config: :obj:`ProofConfig`
    :rtype: :obj:`prooforge.proofs.aprp.AprpGraph`
    :raises ProofError: If the initial state is unsatisfiable.
    """
    config = config or ProofConfig()
    if is_sat(spec.init.constraint).status is Status.UNSAT:
        raise ProofError("initial state of %s is unsatisfiable" % spec.name)
    _LOG.info("proving %s with n=%d i_max=%d precise=%s", spec.name, config.n, config.i_max,
              config.precise)
    graph = _Construction(semantics, spec, config).run()
    _LOG.info("proved %s: %r", spec.name, graph)
    return graph
