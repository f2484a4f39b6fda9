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
"""All-path reachability proof graphs and their JSON documents."""
import copy
import json
import logging
import os
import time
import uuid
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from jsonschema import validate

from prooforge import BASE_PATH
from prooforge.exceptions import ProofError
from prooforge.lib.constraint import (CSubst, CTerm, TOP, conjuncts, csubst_apply, from_term,
                                      to_term)
from prooforge.lib.solver import Status, Verdict, entails, is_sat
from prooforge.lib.syntax import SortHints, TermParser, finish, unparse
from prooforge.lib.term import BOOL, Cell, CellBag
from prooforge.semantics.executor import execute

_LOG = logging.getLogger(__name__)

PENDING = "pending"
REACHED = "reached"
STUCK = "stuck"
FINAL = "final"
STATUSES = (PENDING, REACHED, STUCK, FINAL)


@dataclass
class Vertex:
    """A node of the proof graph."""

    id: int
    cterm: CTerm
    status: str = PENDING


@dataclass(frozen=True)
class StepEdge:
    """``depth`` rewrites from ``source`` reach ``target``."""

    source: int
    target: int
    depth: int
    rules: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CoverEdge:
    """``target`` instantiated by ``csubst`` is ``source``."""

    source: int
    target: int
    csubst: CSubst


@dataclass(frozen=True)
class BranchEdge:
    """Case split of ``source``; each arm pairs a constraint with a target vertex."""

    source: int
    arms: Tuple[Tuple[CSubst, int], ...]

    @property
    def targets(self):
        """Arm target vertex ids."""
        return tuple(target for _, target in self.arms)


class AprpGraph:
    """A proof graph with step, cover and branch edges.

    Documents have the shape ``{"meta": {...}, "data": {...}}`` and are
    validated against ``schemas/AprpGraph/<version>.json``.
    """

    version = "1.0.0"
    schema_file = None
    __schema = None

    def __init__(self, proof_id=None, semantics_name="", version=None):
        """Initialize an empty graph.

        :param proof_id: Identifier of the proof, a uuid by default.
        :type proof_id: str
        :param semantics_name: Name of the semantics the proof is about.
        :type semantics_name: str
        :param version: If not None use this version when loading json schemas.
        :type version: str
        """
        if version is not None:
            self.version = version
        self.proof_id = proof_id or str(uuid.uuid4())
        self.semantics_name = semantics_name
        self.created = int(round(time.time() * 1000))
        self.vertices: Dict[int, Vertex] = {}
        self.steps: List[StepEdge] = []
        self.covers: List[CoverEdge] = []
        self.branches: List[BranchEdge] = []
        self.root: Optional[int] = None
        self.final: Optional[int] = None
        self.partial = False
        self.normalized = True
        self.log: List[str] = []
        self._next_id = 0
        self.load_schema(self.version)

    def __repr__(self):
        return "<AprpGraph %s: %d vertices, %d steps, %d covers, %d branches>" % (
            self.proof_id, len(self.vertices), len(self.steps), len(self.covers),
            len(self.branches))

    def add_vertex(self, cterm, status=PENDING):
        """Add a vertex and return its id."""
        vertex = Vertex(self._next_id, cterm, status)
        self.vertices[vertex.id] = vertex
        self._next_id += 1
        return vertex.id

    def vertex(self, vertex_id):
        """Vertex by id.

        :raises ProofError: On an unknown id.
        """
        try:
            return self.vertices[vertex_id]
        except KeyError:
            raise ProofError("unknown vertex %r" % vertex_id) from None

    def add_step(self, source, target, depth, rules=()):
        """Add a step edge."""
        if depth < 1:
            raise ProofError("step edge %d -> %d has depth %d" % (source, target, depth))
        self.steps.append(StepEdge(source, target, depth, tuple(rules)))

    def add_cover(self, source, target, csubst):
        """Add a cover edge."""
        self.covers.append(CoverEdge(source, target, csubst))

    def add_branch(self, source, arms):
        """Add a branch edge from ``(csubst, target)`` pairs."""
        self.branches.append(BranchEdge(source, tuple(arms)))

    def out_step(self, vertex_id):
        """Outgoing step edge of a vertex, or None."""
        return next((edge for edge in self.steps if edge.source == vertex_id), None)

    def out_branch(self, vertex_id):
        """Outgoing branch edge of a vertex, or None."""
        return next((edge for edge in self.branches if edge.source == vertex_id), None)

    def out_cover(self, vertex_id):
        """Outgoing cover edge of a vertex, or None."""
        return next((edge for edge in self.covers if edge.source == vertex_id), None)

    def in_steps(self, vertex_id):
        """Step edges into a vertex."""
        return [edge for edge in self.steps if edge.target == vertex_id]

    def in_branches(self, vertex_id):
        """Branch edges with an arm into a vertex."""
        return [edge for edge in self.branches if vertex_id in edge.targets]

    def in_covers(self, vertex_id):
        """Cover edges into a vertex."""
        return [edge for edge in self.covers if edge.target == vertex_id]

    @property
    def pending(self):
        """Ids of the vertices still waiting to be explored."""
        return [v.id for v in self.vertices.values() if v.status == PENDING]

    def remove_vertex(self, vertex_id):
        """Drop a vertex that no edge mentions any more."""
        del self.vertices[vertex_id]

    def prune(self):
        """Remove vertices that are no longer reachable from the root."""
        if self.root is None:
            return
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            current = queue.popleft()
            successors = [e.target for e in self.steps if e.source == current]
            successors += [e.target for e in self.covers if e.source == current]
            for edge in self.branches:
                if edge.source == current:
                    successors += edge.targets
            for successor in successors:
                if successor not in seen:
                    seen.add(successor)
                    queue.append(successor)
        if self.final is not None:
            seen.add(self.final)
        for vertex_id in [v for v in self.vertices if v not in seen]:
            del self.vertices[vertex_id]
        self.steps = [e for e in self.steps if e.source in seen]
        self.covers = [e for e in self.covers if e.source in seen]
        self.branches = [e for e in self.branches if e.source in seen]

    def copy(self):
        """Independent copy sharing the (immutable) terms."""
        other = copy.copy(self)
        other.vertices = {k: Vertex(v.id, v.cterm, v.status) for k, v in self.vertices.items()}
        other.steps = list(self.steps)
        other.covers = list(self.covers)
        other.branches = list(self.branches)
        other.log = list(self.log)
        return other

    def load_schema(self, version):
        """Load a schema file path based on the document type and version.

        :param version: Version of the document schema to validate against.
        :type version: str
        """
        self.schema_file = os.path.join(BASE_PATH, "schemas", self.__class__.__name__,
                                        "{}.json".format(version))

    @property
    def schema(self):
        """Json schema for the current graph document."""
        if not self.__schema:
            with open(self.schema_file, encoding="utf-8") as schema_file:
                self.__schema = json.load(schema_file)
        return self.__schema

    @property
    def json(self):
        """Json serializable proof document."""
        vertices = []
        for vertex in sorted(self.vertices.values(), key=lambda v: v.id):
            config, constraint = write_cterm(vertex.cterm)
            vertices.append({"id": vertex.id, "status": vertex.status,
                             "config": config, "constraint": constraint})
        return {
            "meta": {
                "type": self.__class__.__name__,
                "version": self.version,
                "id": self.proof_id,
                "time": self.created,
                "semantics": self.semantics_name,
                "partial": self.partial,
                "normalized": self.normalized,
            },
            "data": {
                "root": self.root,
                "final": self.final,
                "vertices": vertices,
                "steps": [{"source": e.source, "target": e.target, "depth": e.depth,
                           "rules": list(e.rules)} for e in self.steps],
                "covers": [dict(write_csubst(e.csubst), source=e.source, target=e.target)
                           for e in self.covers],
                "branches": [{"source": e.source,
                              "arms": [dict(write_csubst(csubst), target=target)
                                       for csubst, target in e.arms]}
                             for e in self.branches],
                "log": list(self.log),
            },
        }

    def validate(self):
        """Validate the json document against its schema.

        :raises: ValidationError.
        """
        validate(self.json, self.schema)

    @property
    def serialized(self):
        """Json data serialized to string.

        :return: Json string.
        :rtype: str
        """
        return json.dumps(self.json)

    @property
    def pretty(self):
        """Pretty version of the json data.

        :return: Pretty formatted json.
        :rtype: str
        """
        return json.dumps(self.json, indent=4, sort_keys=True)

    @classmethod
    def rebuild(cls, json_data, semantics):
        """Rebuild a graph from its json document.

        :param json_data: Document as produced by :attr:`json`.
        :type json_data: dict
        :param semantics: Semantics whose signature the terms are read with.
        :type semantics: :obj:`prooforge.semantics.definition.Semantics`
        :rtype: :obj:`AprpGraph`
        :raises: ValidationError.
        """
        meta = json_data.get("meta", {})
        data = json_data.get("data", {})
        graph = cls(meta.get("id"), meta.get("semantics", ""), meta.get("version"))
        validate(json_data, graph.schema)
        graph.created = meta.get("time", graph.created)
        graph.partial = meta.get("partial", False)
        graph.normalized = meta.get("normalized", True)
        for item in data["vertices"]:
            cterm = read_cterm(item["config"], item["constraint"], semantics)
            graph.vertices[item["id"]] = Vertex(item["id"], cterm, item["status"])
        graph._next_id = max(graph.vertices, default=-1) + 1
        graph.root = data.get("root")
        graph.final = data.get("final")
        for item in data["steps"]:
            graph.add_step(item["source"], item["target"], item["depth"], item.get("rules", ()))
        for item in data["covers"]:
            graph.add_cover(item["source"], item["target"], read_csubst(item, semantics))
        for item in data["branches"]:
            graph.add_branch(item["source"], [(read_csubst(arm, semantics), arm["target"])
                                              for arm in item["arms"]])
        graph.log = list(data.get("log", []))
        return graph


def write_cterm(cterm, signature=None):
    """Config and constraint text, variables annotated once across both."""
    seen = set()
    config = unparse(cterm.config, signature, annotate=True, seen=seen)
    if cterm.constraint == TOP:
        return config, "true"
    return config, unparse(to_term(cterm.constraint), signature, annotate=True,
                           seen=seen)


def read_cterm(config_text, constraint_text, semantics):
    """Inverse of :func:`write_cterm`."""
    hints = SortHints()
    parser = TermParser(semantics.signature, config_text, hints=hints)
    cells = parser.cells()
    if not parser.at_end():
        raise parser.error("unexpected %r" % parser.current.text)
    config = CellBag(tuple(Cell(label, body) for label, body, _ in cells))
    parser = TermParser(semantics.signature, constraint_text, hints=hints)
    condition = parser.top(BOOL)
    config, condition = finish([config, condition], hints)
    return CTerm(config, from_term(condition))


def write_csubst(csubst, signature=None):
    """Json fields of a constrained substitution."""
    seen = set()
    bindings = {name: unparse(image, signature, annotate=True, seen=seen)
                for name, image in sorted(csubst.subst.items())}
    constraint = "true" if csubst.constraint == TOP else \
        unparse(to_term(csubst.constraint), signature, annotate=True, seen=seen)
    return {"subst": bindings, "constraint": constraint}


def read_csubst(item, semantics):
    """Inverse of :func:`write_csubst`."""
    hints = SortHints()
    images = {}
    for name, text in item.get("subst", {}).items():
        parser = TermParser(semantics.signature, text, hints=hints)
        images[name] = parser.top()
    parser = TermParser(semantics.signature, item.get("constraint", "true"), hints=hints)
    condition = parser.top(BOOL)
    names = list(images)
    resolved = finish([images[name] for name in names] + [condition], hints)
    return CSubst(dict(zip(names, resolved[:-1])), from_term(resolved[-1]))


def reachable_up(graph, vertex_id):
    """Ancestors of a vertex through step and branch edges, nearest first.

    The final vertex is never an ancestor.

    :param graph: The proof graph.
    :type graph: :obj:`AprpGraph`
    :param vertex_id: Vertex to start from.
    :type vertex_id: int
    :rtype: list
    """
    graph.vertex(vertex_id)
    parents: Dict[int, List[int]] = {}
    for edge in graph.steps:
        parents.setdefault(edge.target, []).append(edge.source)
    for edge in graph.branches:
        for target in edge.targets:
            parents.setdefault(target, []).append(edge.source)
    order = []
    seen = {vertex_id}
    queue = deque([vertex_id])
    while queue:
        current = queue.popleft()
        for parent in parents.get(current, ()):
            if parent in seen or parent == graph.final:
                continue
            seen.add(parent)
            order.append(parent)
            queue.append(parent)
    return order


def equivalent(left, right):
    """Whether two constraints are equivalent as far as the solver can tell."""
    if left == right or set(conjuncts(left)) == set(conjuncts(right)):
        return True
    return entails(left, right).verdict is Verdict.YES \
        and entails(right, left).verdict is Verdict.YES


def _restricts(pattern, config):
    """Whether ``config`` agrees with ``pattern`` on every cell ``pattern`` has."""
    if type(pattern) is CellBag and type(config) is CellBag:
        return all(config.get(label) == pattern.get(label) for label in pattern.labels)
    return pattern == config


def check_graph(graph, semantics):
    """Check a proof graph against the semantics it claims to describe.

    Step edges are replayed with :func:`prooforge.semantics.executor.execute`,
    cover and branch edges are re-derived with their substitutions.

    :param graph: The proof graph.
    :type graph: :obj:`AprpGraph`
    :param semantics: The semantics to replay with.
    :type semantics: :obj:`prooforge.semantics.definition.Semantics`
    :return: Human readable violations, empty if the graph is valid.
    :rtype: list
    """
    # pylint:disable=too-many-branches
    violations = []
    known = graph.vertices
    outgoing = {}
    for kind, edges in (("step", graph.steps), ("cover", graph.covers),
                        ("branch", graph.branches)):
        for edge in edges:
            targets = edge.targets if kind == "branch" else (edge.target,)
            missing = [v for v in (edge.source,) + tuple(targets) if v not in known]
            if missing:
                violations.append("%s edge from %s mentions unknown vertices %s"
                                  % (kind, edge.source, missing))
                continue
            outgoing.setdefault(edge.source, []).append(kind)
    for source, kinds in outgoing.items():
        if len(kinds) > 1:
            violations.append("vertex %d has several outgoing edges: %s"
                              % (source, ", ".join(kinds)))
    if violations:
        return violations
    normalize = semantics.normalize
    for edge in graph.steps:
        source, target = known[edge.source].cterm, known[edge.target].cterm
        result = execute(semantics, source, edge.depth)
        if result.applied != edge.depth:
            violations.append("step %d -> %d: replay applied %d of %d rewrites"
                              % (edge.source, edge.target, result.applied, edge.depth))
        elif result.next.config != target.config:
            violations.append("step %d -> %d: replay reached a different configuration"
                              % (edge.source, edge.target))
        elif not equivalent(result.next.constraint, target.constraint):
            violations.append("step %d -> %d: constraints differ" % (edge.source, edge.target))
    for edge in graph.covers:
        source, target = known[edge.source].cterm, known[edge.target].cterm
        instance = csubst_apply(edge.csubst, target, normalize)
        if not _restricts(instance.config, source.config):
            violations.append("cover %d -> %d: substitution does not reproduce the source"
                              % (edge.source, edge.target))
        elif entails(source.constraint, instance.constraint).verdict is not Verdict.YES:
            violations.append("cover %d -> %d: source constraint does not entail the target"
                              % (edge.source, edge.target))
    for edge in graph.branches:
        source = known[edge.source].cterm
        for csubst, target_id in edge.arms:
            target = known[target_id].cterm
            instance = csubst_apply(csubst, source, normalize)
            if instance.config != target.config \
                    or not equivalent(instance.constraint, target.constraint):
                violations.append("branch %d -> %d: arm target is not the specialized source"
                                  % (edge.source, target_id))
            elif is_sat(target.constraint).status is Status.UNSAT:
                violations.append("branch %d -> %d: arm is unsatisfiable"
                                  % (edge.source, target_id))
    _LOG.debug("checked %r: %d violations", graph, len(violations))
    return violations
