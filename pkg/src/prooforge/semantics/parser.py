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
"""Readers and writers for semantics (.sem), proof spec (.spec) and program (.pgm) files.

A statement starts at column 0. Indented lines continue the statement above.
Comments start with ``//``; a ``// compiled:`` comment line annotates the rule
that follows it.
"""
import logging
import re
from dataclasses import dataclass
from typing import List

from prooforge.exceptions import ParseError, ValidationError
from prooforge.lib.constraint import CTerm, TOP, from_term, to_term
from prooforge.lib.syntax import (OpDecl, SortHints, TermParser, finish, infix_name,
                                  parse_config, unparse)
from prooforge.lib.term import BOOL, CellBag, Cell, TRUE, Term
from prooforge.semantics.definition import (COMPILED_PRIORITY, DEFAULT_PRIORITY, HANDWRITTEN,
                                            Equation, ProofSpec, Rule, Semantics)

_LOG = logging.getLogger(__name__)

_PROVENANCE = re.compile(r"//\s*compiled:\s*proof=(\S+)\s+consolidated=(\d+)\s+path=(\S*)")
_OP = re.compile(r"op\s+(\S+)\s*:\s*((?:\S+\s+)*?)->\s*(\S+)\s*(?:\[([^\]]*)\])?\s*\Z", re.S)
_RULE = re.compile(r"rule\s+([#A-Za-z0-9_.\-]+)\s*:\s*(.*)\Z", re.S)
_PRIORITY = re.compile(r"\bpriority\s+(-?\d+)\s*\Z")
_REQUIRES = re.compile(r"\brequires\b")
_EQ_SIGN = re.compile(r"(?<![=<>/!])=(?![=>/])")
_CELL_DECL = re.compile(r"<([A-Za-z][A-Za-z0-9]*)>\s*(\S+)\s*</\1>")


@dataclass
class Statement:
    """One logical statement of a source file."""

    keyword: str
    text: str
    line: int
    comment: str = ""


def statements(text):
    """Split source text into statements.

    :param text: File contents.
    :type text: str
    :rtype: list
    """
    found: List[Statement] = []
    pending_comment = ""
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        if raw[0].isspace():
            if stripped.startswith("//"):
                continue
            if not found:
                raise ParseError("continuation line before any statement", number, 1)
            found[-1].text += "\n" + _strip_comment(raw)
            continue
        if stripped.startswith("//"):
            if _PROVENANCE.match(stripped):
                pending_comment = stripped
            continue
        keyword = stripped.split(None, 1)[0]
        found.append(Statement(keyword, _strip_comment(raw), number, pending_comment))
        pending_comment = ""
    return found


def _strip_comment(line):
    position = line.find("//")
    return line if position < 0 else line[:position]


def _split_tail(text):
    """Split ``body [requires C] [priority N]`` into its parts."""
    priority = None
    found = _PRIORITY.search(text)
    if found:
        priority = int(found.group(1))
        text = text[:found.start()]
    parts = _REQUIRES.split(text, maxsplit=1)
    return parts[0], (parts[1] if len(parts) > 1 else None), priority


class SemanticsReader:
    """Build a :obj:`Semantics` from .sem text."""

    def __init__(self, text, origin="<string>"):
        self.text = text
        self.origin = origin
        self.semantics = None

    def read(self):
        """Parse everything.

        :rtype: :obj:`Semantics`
        :raises ParseError: On malformed statements.
        :raises ValidationError: On ill-formed rules or equations.
        """
        for statement in statements(self.text):
            handler = getattr(self, "_" + statement.keyword, None)
            if handler is None:
                raise ParseError("unknown statement %r" % statement.keyword, statement.line, 1)
            try:
                handler(statement)
            except (ParseError, ValidationError) as exception:
                if isinstance(exception, ParseError) and not exception.line:
                    exception.line = statement.line
                raise
        if self.semantics is None:
            raise ParseError("no module in %s" % self.origin)
        _LOG.info("Loaded semantics %s from %s: %d rules", self.semantics.name, self.origin,
                  len(self.semantics.rules))
        return self.semantics

    def _require_module(self, statement):
        if self.semantics is None:
            raise ParseError("%s outside of a module" % statement.keyword, statement.line, 1)
        return self.semantics

    def _module(self, statement):
        parts = statement.text.split()
        if len(parts) != 2:
            raise ParseError("expected 'module NAME'", statement.line, 1)
        self.semantics = Semantics(parts[1])

    def _endmodule(self, statement):
        self._require_module(statement)

    def _sort(self, statement):
        semantics = self._require_module(statement)
        for name in statement.text.split()[1:]:
            semantics.signature.declare_sort(name)

    def _op(self, statement):
        semantics = self._require_module(statement)
        found = _OP.match(statement.text.strip())
        if found is None:
            raise ParseError("expected 'op NAME : SORTS -> SORT [ATTRS]'", statement.line, 1)
        name, args, result, attributes = found.groups()
        signature = semantics.signature
        arg_sorts = tuple(signature.sort(arg) for arg in args.split())
        sort = signature.sort(result)
        attributes = (attributes or "").split()
        function = "function" in attributes
        if name.startswith("_") and name.endswith("_") and len(name) > 2:
            if len(arg_sorts) != 2:
                raise ParseError("infix operator %s needs two arguments" % name, statement.line, 1)
            assoc, prec = "left", 50
            for attribute in attributes:
                if attribute in ("left", "right"):
                    assoc = attribute
                elif attribute.lstrip("-").isdigit():
                    prec = int(attribute)
            token = name[1:-1]
            decl = OpDecl(infix_name(token), arg_sorts, sort, token, infix=True, assoc=assoc,
                          prec=prec, function=function)
        else:
            decl = OpDecl(name, arg_sorts, sort, name, function=function)
        semantics.declare(decl)

    def _configuration(self, statement):
        semantics = self._require_module(statement)
        body = statement.text.split(None, 1)[1] if " " in statement.text.strip() else ""
        cells = _CELL_DECL.findall(body)
        if not cells:
            raise ParseError("configuration declares no cells", statement.line, 1)
        for label, sort in cells:
            semantics.signature.cells[label] = semantics.signature.sort(sort)

    def _eq(self, statement):
        semantics = self._require_module(statement)
        body, requires, _ = _split_tail(statement.text.split(None, 1)[1])
        sides = _EQ_SIGN.split(body, maxsplit=1)
        if len(sides) != 2:
            raise ParseError("expected 'eq LHS = RHS'", statement.line, 1)
        hints = SortHints()
        left = _expression(semantics, sides[0], statement.line, hints)
        right = _expression(semantics, sides[1], statement.line, hints, left.sort)
        condition = _expression(semantics, requires, statement.line, hints, BOOL) \
            if requires else TRUE
        left, right, condition = finish([left, right, condition], hints)
        semantics.add_equation(Equation(left, right, condition))

    def _rule(self, statement):
        semantics = self._require_module(statement)
        found = _RULE.match(statement.text.strip())
        if found is None:
            raise ParseError("expected 'rule NAME: CELLS'", statement.line, 1)
        name, rest = found.groups()
        body, requires, priority = _split_tail(rest)
        hints = SortHints()
        parser = TermParser(semantics.signature, body, statement.line, hints)
        cells = parser.cells(rewrites=True)
        if not cells or not parser.at_end():
            raise parser.error("expected cells")
        condition = _expression(semantics, requires, statement.line, hints, BOOL) \
            if requires else TRUE
        lhs = CellBag(tuple(Cell(label, left) for label, left, _ in cells))
        rhs = CellBag(tuple(Cell(label, left if right is None else right)
                            for label, left, right in cells))
        lhs, rhs, condition = finish([lhs, rhs, condition], hints)
        provenance, consolidated, path = HANDWRITTEN, 1, ()
        annotation = _PROVENANCE.match(statement.comment) if statement.comment else None
        if annotation:
            provenance = "compiled(%s)" % annotation.group(1)
            consolidated = int(annotation.group(2))
            path = tuple(p for p in annotation.group(3).split(",") if p)
        if priority is None:
            priority = COMPILED_PRIORITY if annotation else DEFAULT_PRIORITY
        semantics.add_rule(Rule(name, lhs, rhs, condition, priority, provenance,
                                consolidated, path))


def _expression(semantics, text, line, hints, expected=None):
    parser = TermParser(semantics.signature, text, line, hints)
    term = parser.top(expected) if expected is not None else parser.top()
    if not parser.at_end():
        raise parser.error("unexpected %r" % parser.current.text)
    return term


def read_semantics(text, origin="<string>"):
    """Parse .sem text into a :obj:`Semantics`."""
    return SemanticsReader(text, origin).read()


def load_semantics(path):
    """Read a .sem file."""
    with open(path, encoding="utf-8") as handle:
        return read_semantics(handle.read(), str(path))


def read_spec(text, semantics, origin="<string>"):
    """Parse .spec text against a semantics.

    :param text: Spec file contents.
    :type text: str
    :param semantics: Semantics the configurations are written in.
    :type semantics: :obj:`Semantics`
    :rtype: :obj:`prooforge.semantics.definition.ProofSpec`
    :raises ParseError: On malformed input.
    """
    name, sameloop, terminal = None, (), "final-or-stuck"
    sides = {}
    hints = SortHints()
    for statement in statements(text):
        rest = statement.text.split(None, 1)[1] if len(statement.text.split(None, 1)) > 1 else ""
        if statement.keyword == "spec":
            name = rest.strip()
        elif statement.keyword in ("init", "final"):
            body, requires, _ = _split_tail(rest)
            parser = TermParser(semantics.signature, body, statement.line, hints)
            cells = parser.cells()
            if not cells or not parser.at_end():
                raise parser.error("expected a configuration")
            config = CellBag(tuple(Cell(label, left) for label, left, _ in cells))
            condition = _expression(semantics, requires, statement.line, hints, BOOL) \
                if requires else TRUE
            sides[statement.keyword] = (config, condition)
        elif statement.keyword == "sameloop":
            sameloop = tuple(rest.split())
        elif statement.keyword == "terminal":
            terminal = rest.strip()
            if terminal not in ("final", "final-or-stuck"):
                raise ParseError("unknown terminal mode %r" % terminal, statement.line, 1)
        else:
            raise ParseError("unknown statement %r" % statement.keyword, statement.line, 1)
    if not name or "init" not in sides or "final" not in sides:
        raise ParseError("%s: a spec needs 'spec', 'init' and 'final'" % origin)
    init_config, init_requires, final_config, final_requires = finish(
        [*sides["init"], *sides["final"]], hints)
    init = CTerm(semantics.normalize(init_config),
                 from_term(semantics.normalize(init_requires)))
    final = CTerm(semantics.normalize(final_config),
                  from_term(semantics.normalize(final_requires)))
    return ProofSpec(name, init, final, sameloop, terminal)


def load_spec(path, semantics):
    """Read a .spec file."""
    with open(path, encoding="utf-8") as handle:
        return read_spec(handle.read(), semantics, str(path))


def read_program(text, semantics):
    """Parse a .pgm file: one ground configuration."""
    config = parse_config(text, semantics.signature)
    if not config.ground:
        raise ValidationError("program configuration has variables: %s"
                              % ", ".join(sorted(config.vars)))
    return semantics.normalize(config)


def load_program(path, semantics):
    """Read a .pgm file."""
    with open(path, encoding="utf-8") as handle:
        return read_program(handle.read(), semantics)


def write_rule(rule, signature=None):
    """Text of a rule statement, with its provenance comment when compiled."""
    cells = []
    annotated = set()
    for cell in rule.lhs.cells:
        left = _show(cell.body, signature, annotated)
        right = rule.rhs.get(cell.label)
        if right != cell.body:
            left = "%s => %s" % (left, _show(right, signature, annotated))
        cells.append("<%s> %s </%s>" % (cell.label, left, cell.label))
    text = "rule %s:\n    %s" % (rule.name, "\n    ".join(cells))
    if rule.requires != TRUE:
        text += "\n    requires %s" % _show(rule.requires, signature, annotated)
    if rule.priority != DEFAULT_PRIORITY:
        text += "\n    priority %d" % rule.priority
    if rule.compiled:
        text = "// compiled: proof=%s consolidated=%d path=%s\n%s" % (
            rule.proof_id, rule.consolidated, ",".join(rule.path), text)
    return text


def _show(term, signature, annotated):
    return unparse(term, signature, annotate=True, seen=annotated)


def write_semantics(semantics):
    """Text of a whole semantics, readable by :func:`read_semantics`."""
    lines = ["module %s" % semantics.name]
    sorts = [name for name in semantics.signature.sorts if name not in ("Int", "Bool", "K")]
    if sorts:
        lines.append("sort %s" % " ".join(sorts))
    for decl in semantics.declarations:
        args = " ".join(sort.name for sort in decl.arg_sorts)
        attributes = []
        if decl.infix:
            attributes += [decl.assoc, str(decl.prec)]
        if decl.function:
            attributes.append("function")
        name = decl.name
        lines.append("op %s : %s-> %s%s" % (name, args + " " if args else "", decl.sort,
                                             " [%s]" % " ".join(attributes) if attributes else ""))
    if semantics.cells:
        lines.append("configuration " + " ".join(
            "<%s> %s </%s>" % (label, sort, label) for label, sort in semantics.cells.items()))
    for equations in semantics.equations.values():
        for equation in equations:
            annotated = set()
            text = "eq %s = %s" % (_show(equation.lhs, semantics.signature, annotated),
                                   _show(equation.rhs, semantics.signature, annotated))
            if equation.requires != TRUE:
                text += " requires %s" % _show(equation.requires, semantics.signature, annotated)
            lines.append(text)
    for rule in semantics.rules:
        lines.append(write_rule(rule, semantics.signature))
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def write_config(term: Term, signature=None):
    """Text of a configuration, annotating variable sorts."""
    return unparse(term, signature, annotate=True)


def constraint_text(constraint, signature=None):
    """Text of a constraint as a requires clause."""
    if constraint == TOP:
        return "true"
    return unparse(to_term(constraint), signature, annotate=True)
