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
"""Graphviz rendering of proof graphs.

Render a proof with ``dot -Tsvg -O proof.gv``.
"""
from prooforge.lib.constraint import TOP
from prooforge.proofs.aprp import FINAL, STUCK

SHAPES = {FINAL: "doublecircle", STUCK: "octagon"}
MAX_LABEL = 60


def _escape(text):
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def _short(text):
    if len(text) > MAX_LABEL:
        return text[:MAX_LABEL - 3] + "..."
    return text


def to_dot(graph, details=False):
    """DOT text of a proof graph.

    Step edges are labeled with their rewrite count, branch edges with the
    guard of the arm and cover edges are dashed.

    :param graph: Graph to render.
    :type graph: :obj:`prooforge.proofs.aprp.AprpGraph`
    :param details: Put each vertex configuration in its label.
    :type details: bool
    :rtype: str
    """
    lines = ['digraph "%s" {' % _escape(graph.proof_id), "\tnode [shape=box];"]
    for vertex in sorted(graph.vertices.values(), key=lambda v: v.id):
        label = "%d: %s" % (vertex.id, vertex.status)
        if details:
            label += "\n" + str(vertex.cterm)
        attributes = ['label="%s"' % _escape(label)]
        if vertex.status in SHAPES:
            attributes.append("shape=%s" % SHAPES[vertex.status])
        if vertex.id == graph.root:
            attributes.append("style=bold")
        lines.append('\t"%d" [%s];' % (vertex.id, ", ".join(attributes)))
    for edge in graph.steps:
        lines.append('\t"%d" -> "%d" [label="%d"];' % (edge.source, edge.target, edge.depth))
    for edge in graph.branches:
        for csubst, target in edge.arms:
            guard = "true" if csubst.constraint == TOP else str(csubst.constraint)
            lines.append('\t"%d" -> "%d" [label="%s", style=bold];'
                         % (edge.source, target, _escape(_short(guard))))
    for edge in graph.covers:
        lines.append('\t"%d" -> "%d" [style=dashed];' % (edge.source, edge.target))
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(graph, path, details=False):
    """Write :func:`to_dot` output to ``path``."""
    with open(path, "w", encoding="utf-8") as dot_file:
        dot_file.write(to_dot(graph, details))
