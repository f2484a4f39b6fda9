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
"""Concrete term syntax: operator signatures, a lexer, a parser and a printer.

The printer is canonical: a term printed and read back with the same
signature yields an equal term.
"""
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from prooforge.exceptions import ParseError
from prooforge.lib.term import (App, BOOL, BoolLit, Cell, CellBag, INT, IntLit, K,
                                KEMPTY, Sort, Var, apply_subst, sort_leq)


@dataclass(frozen=True)
class OpDecl:
    """Declaration of a constructor, function or operator."""

    name: str
    arg_sorts: Tuple[Sort, ...]
    sort: Sort
    token: str
    infix: bool = False
    prefix: bool = False
    assoc: str = "left"
    prec: int = 50
    builtin: bool = False
    function: bool = False

    @property
    def arity(self):
        """Number of arguments."""
        return len(self.arg_sorts)


def infix_name(token):
    """Constructor name of an infix operator spelled ``token``."""
    return "_%s_" % token


_BUILTIN_INFIX = (
    ("~>", (K, K), K, "right", 5),
    ("orBool", (BOOL, BOOL), BOOL, "left", 15),
    ("andBool", (BOOL, BOOL), BOOL, "left", 20),
    ("<Int", (INT, INT), BOOL, "left", 30),
    ("<=Int", (INT, INT), BOOL, "left", 30),
    (">Int", (INT, INT), BOOL, "left", 30),
    (">=Int", (INT, INT), BOOL, "left", 30),
    ("==Int", (INT, INT), BOOL, "left", 30),
    ("=/=Int", (INT, INT), BOOL, "left", 30),
    ("==K", (K, K), BOOL, "left", 30),
    ("=/=K", (K, K), BOOL, "left", 30),
    ("+Int", (INT, INT), INT, "left", 40),
    ("-Int", (INT, INT), INT, "left", 40),
    ("*Int", (INT, INT), INT, "left", 45),
    ("/Int", (INT, INT), INT, "left", 45),
    ("%Int", (INT, INT), INT, "left", 45),
)

ALIASES = {"<": "<Int", "<=": "<=Int", ">": ">Int", ">=": ">=Int",
           "==": "==K", "=/=": "=/=K"}

NOT_BOOL = OpDecl("notBool_", (BOOL,), BOOL, "notBool", prefix=True, prec=25, builtin=True,
                  function=True)

_IDENT = re.compile(r"[#.A-Za-z_][A-Za-z0-9_#.]*\Z")


class Signature:
    """Sorts, operators and cells known to a semantics."""

    def __init__(self):
        self.sorts: Dict[str, Sort] = {}
        self.ops: Dict[str, OpDecl] = {}
        self.by_token: Dict[str, OpDecl] = {}
        self.cells: Dict[str, Sort] = {}
        self._lexer = None

    @classmethod
    def builtin(cls):
        """A signature holding only the builtin sorts and operators."""
        signature = cls()
        for sort in (INT, BOOL, K):
            signature.sorts[sort.name] = sort
        for token, args, sort, assoc, prec in _BUILTIN_INFIX:
            signature.declare(OpDecl(infix_name(token), args, sort, token, infix=True,
                                     assoc=assoc, prec=prec, builtin=True,
                                     function=token != "~>"))
        signature.declare(NOT_BOOL)
        signature.declare(OpDecl(KEMPTY, (), K, KEMPTY, builtin=True))
        return signature

    def copy(self):
        """Shallow copy that can be extended independently."""
        other = Signature()
        other.sorts = dict(self.sorts)
        other.ops = dict(self.ops)
        other.by_token = dict(self.by_token)
        other.cells = dict(self.cells)
        return other

    def sort(self, name):
        """Look up a sort by name.

        :raises ParseError: If the sort is not declared.
        """
        try:
            return self.sorts[name]
        except KeyError:
            raise ParseError("unknown sort %r" % name) from None

    def declare_sort(self, name):
        """Declare a sort, returning it."""
        return self.sorts.setdefault(name, Sort(name))

    def declare(self, decl):
        """Add an operator declaration.

        :raises ParseError: If the spelling is already taken by another operator.
        """
        existing = self.by_token.get(decl.token)
        if existing is not None and existing != decl:
            raise ParseError("operator %r declared twice" % decl.token)
        self.ops[decl.name] = decl
        self.by_token[decl.token] = decl
        self._lexer = None
        _NOTATIONS[decl.name] = decl

    def operator(self, token):
        """Declaration of an infix or prefix operator spelled ``token``."""
        decl = self.by_token.get(ALIASES.get(token, token))
        if decl is not None and (decl.infix or decl.prefix):
            return decl
        return None

    @property
    def lexer(self):
        """Lexer recognizing this signature's operator spellings."""
        if self._lexer is None:
            symbolic = sorted((d.token for d in self.by_token.values()
                               if (d.infix or d.prefix) and not _IDENT.match(d.token)),
                              key=len, reverse=True)
            symbolic += sorted(ALIASES, key=len, reverse=True)
            self._lexer = Lexer(symbolic)
        return self._lexer


# Notations of every declared operator, for printing without a signature.
_NOTATIONS: Dict[str, OpDecl] = {}


def is_function(ctor):
    """Whether ``ctor`` is a function symbol rather than a free constructor.

    Builtin operators other than ``~>`` and symbols defined by equations are
    functions. Unknown symbols are treated as constructors.
    """
    decl = _NOTATIONS.get(ctor)
    return decl is not None and decl.function


Signature.builtin()


@dataclass(frozen=True)
class Token:
    """A lexical token."""

    kind: str
    text: str
    line: int
    column: int
    space_before: bool = False


class Lexer:
    """Split term text into tokens."""

    def __init__(self, operators):
        """Compile the token pattern.

        :param operators: Symbolic operator spellings, longest first.
        :type operators: list
        """
        ops = "|".join(re.escape(op) for op in operators) or r"(?!x)x"
        self.pattern = re.compile(
            r"(?P<space>\s+)|(?P<comment>//[^\n]*)"
            r"|(?P<close></[A-Za-z][A-Za-z0-9]*>)|(?P<open><[A-Za-z][A-Za-z0-9]*>)"
            r"|(?P<arrow>=>)|(?P<op>%s)|(?P<int>-?\d+)"
            r"|(?P<id>[#.A-Za-z_][A-Za-z0-9_#.]*)|(?P<punct>[(),:])" % ops)

    def tokenize(self, text, line=1):
        """Tokenize ``text``.

        :raises ParseError: On an unexpected character.
        """
        tokens: List[Token] = []
        position = 0
        line_start = 0
        space = True
        while position < len(text):
            found = self.pattern.match(text, position)
            if found is None:
                raise ParseError("unexpected character %r" % text[position],
                                 line, position - line_start + 1)
            kind = found.lastgroup
            if kind in ("space", "comment"):
                newlines = found.group().count("\n")
                if newlines:
                    line += newlines
                    line_start = found.start() + found.group().rfind("\n") + 1
                space = True
            else:
                tokens.append(Token(kind, found.group(), line, position - line_start + 1, space))
                space = False
            position = found.end()
        tokens.append(Token("eof", "", line, position - line_start + 1, True))
        return tokens


@dataclass
class SortHints:
    """Sort evidence for the variables of one statement."""

    annotations: Dict[str, Sort] = field(default_factory=dict)
    hints: Dict[str, set] = field(default_factory=dict)

    def hint(self, name, sort):
        """Record that variable ``name`` occurs where ``sort`` is expected."""
        self.hints.setdefault(name, set()).add(sort)

    def annotate(self, name, sort, token):
        """Record an explicit ``X:Sort`` annotation."""
        previous = self.annotations.setdefault(name, sort)
        if previous != sort:
            raise ParseError("variable %s annotated with %s and %s" % (name, previous, sort),
                             token.line, token.column)

    def resolve(self):
        """Substitution giving every variable its inferred sort.

        :raises ParseError: If a variable has conflicting sort evidence.
        """
        bindings = {}
        for name in set(self.annotations) | set(self.hints):
            sort = self.annotations.get(name)
            if sort is None:
                candidates = {hint for hint in self.hints.get(name, ()) if hint != K}
                if len(candidates) > 1:
                    raise ParseError("variable %s used at sorts %s"
                                     % (name, ", ".join(sorted(s.name for s in candidates))))
                sort = candidates.pop() if candidates else K
            bindings[name] = Var(name, sort)
        return bindings


class TermParser:  # pylint:disable=too-few-public-methods
    """Precedence climbing parser for one piece of term text."""

    def __init__(self, signature, text, line=1, hints=None):
        self.signature = signature
        self.tokens = signature.lexer.tokenize(text, line)
        self.position = 0
        self.hints = hints if hints is not None else SortHints()

    @property
    def current(self):
        """Token under the cursor."""
        return self.tokens[self.position]

    def peek(self, offset=1):
        """Token ``offset`` positions ahead."""
        return self.tokens[min(self.position + offset, len(self.tokens) - 1)]

    def advance(self):
        """Consume the current token and return it."""
        token = self.tokens[self.position]
        self.position += 1
        return token

    def error(self, message, token=None):
        """Build a :obj:`ParseError` located at ``token``."""
        token = token or self.current
        return ParseError(message, token.line, token.column)

    def expect(self, kind, text=None):
        """Consume a token of the given kind (and text) or fail."""
        token = self.current
        if token.kind != kind or (text is not None and token.text != text):
            raise self.error("expected %s, found %r" % (text or kind, token.text or "end of input"))
        return self.advance()

    def at_end(self):
        """True at end of input."""
        return self.current.kind == "eof"

    def expression(self, expected=K, min_prec=0):
        """Parse an expression whose operators bind at least ``min_prec``."""
        left = self.primary(expected)
        while True:
            token = self.current
            decl = self.signature.operator(token.text) if token.kind in ("op", "id", "punct") \
                else None
            if decl is None or not decl.infix or decl.prec < min_prec:
                return left
            self.advance()
            next_prec = decl.prec if decl.assoc == "right" else decl.prec + 1
            right = self.expression(decl.arg_sorts[1], next_prec)
            left = self.apply(decl, (left, right), token)

    def apply(self, decl, args, token):
        """Build an application, checking and recording argument sorts."""
        for arg, sort in zip(args, decl.arg_sorts):
            if type(arg) is Var:
                self.hints.hint(arg.name, sort)
            elif not sort_leq(arg.sort, sort):
                raise self.error("%s expects %s, got %s" % (decl.token, sort, arg.sort), token)
        return App(decl.name, tuple(args), decl.sort)

    def primary(self, expected):
        """Parse a literal, variable, application or parenthesized term."""
        # pylint:disable=too-many-return-statements
        token = self.advance()
        if token.kind == "int":
            return IntLit(int(token.text))
        if token.kind == "punct" and token.text == "(":
            inner = self.expression(expected)
            self.expect("punct", ")")
            return inner
        decl = self.signature.operator(token.text)
        if decl is not None and decl.prefix:
            operand = self.expression(decl.arg_sorts[0], decl.prec + 1)
            return self.apply(decl, (operand,), token)
        if token.kind != "id":
            raise self.error("unexpected %r" % (token.text or "end of input"), token)
        if token.text in ("true", "false"):
            return BoolLit(token.text == "true")
        decl = self.signature.by_token.get(token.text)
        if self.current.text == "(" and not self.current.space_before:
            if decl is None or decl.infix or decl.prefix:
                raise self.error("unknown function %r" % token.text, token)
            self.advance()
            args = []
            if self.current.text != ")":
                args.append(self.expression(decl.arg_sorts[0] if decl.arg_sorts else K))
                while self.current.text == ",":
                    self.advance()
                    args.append(self.expression(
                        decl.arg_sorts[len(args)] if len(args) < decl.arity else K))
            self.expect("punct", ")")
            if len(args) != decl.arity:
                raise self.error("%s expects %d arguments, got %d"
                                 % (token.text, decl.arity, len(args)), token)
            return self.apply(decl, args, token)
        if decl is not None and not decl.infix and not decl.prefix:
            if decl.arity:
                raise self.error("%s expects %d arguments" % (token.text, decl.arity), token)
            return App(decl.name, (), decl.sort)
        if token.text[0].isupper():
            var = Var(token.text, K)
            if self.current.text == ":" and not self.current.space_before \
                    and self.peek().kind == "id" and not self.peek().space_before \
                    and self.peek().text in self.signature.sorts:
                self.advance()
                sort_token = self.advance()
                self.hints.annotate(var.name, self.signature.sorts[sort_token.text], sort_token)
            return var
        raise self.error("unknown symbol %r" % token.text, token)

    def top(self, expected=K):
        """Parse a whole expression in a position expecting ``expected``."""
        term = self.expression(expected)
        if type(term) is Var:
            self.hints.hint(term.name, expected)
        return term

    def cells(self, rewrites=False):
        """Parse a sequence of cells.

        :param rewrites: Accept ``L => R`` bodies.
        :type rewrites: bool
        :return: Triples of label, left body and right body (None if no rewrite).
        :rtype: list
        """
        parsed = []
        while self.current.kind == "open":
            opening = self.advance()
            label = opening.text[1:-1]
            sort = self.signature.cells.get(label, K) if self.signature.cells else K
            if self.signature.cells and label not in self.signature.cells:
                raise self.error("unknown cell <%s>" % label, opening)
            left = self.top(sort)
            right = None
            if self.current.kind == "arrow":
                if not rewrites:
                    raise self.error("rewrite arrow outside of a rule")
                self.advance()
                right = self.top(sort)
            closing = self.expect("close")
            if closing.text[2:-1] != label:
                raise self.error("cell <%s> closed by %s" % (label, closing.text), closing)
            parsed.append((label, left, right))
        return parsed


def finish(terms, hints):
    """Give the variables of ``terms`` their inferred sorts."""
    bindings = hints.resolve()
    return [None if term is None else apply_subst(bindings, term) for term in terms]


def parse_term(text, signature=None, expected=K):
    """Parse a single term.

    :param text: Term text.
    :type text: str
    :param signature: Signature to read with, builtins only by default.
    :type signature: :obj:`Signature`
    :param expected: Sort expected at the root.
    :type expected: :obj:`Sort`
    :rtype: :obj:`prooforge.lib.term.Term`
    :raises ParseError: On malformed input.
    """
    signature = signature or BUILTINS
    parser = TermParser(signature, text)
    term = parser.top(expected)
    if not parser.at_end():
        raise parser.error("unexpected %r" % parser.current.text)
    return finish([term], parser.hints)[0]


def parse_config(text, signature, line=1):
    """Parse a configuration, a bag of cells with no rewrites."""
    parser = TermParser(signature, text, line)
    parsed = parser.cells()
    if not parsed or not parser.at_end():
        raise parser.error("expected a configuration")
    bag = CellBag(tuple(Cell(label, body) for label, body, _ in parsed))
    return finish([bag], parser.hints)[0]


def unparse(term, signature=None, annotate=False, seen=None):
    """Canonical text of a term.

    :param term: Term to print.
    :type term: :obj:`prooforge.lib.term.Term`
    :param signature: Signature supplying operator notations.
    :type signature: :obj:`Signature`
    :param annotate: Annotate the first occurrence of each variable whose
                     sort is not K with ``:Sort``.
    :type annotate: bool
    :param seen: Variables already annotated earlier in the same statement,
                 updated in place.
    :type seen: set
    :rtype: str
    """
    return _Printer(signature, annotate, seen).show(term)


class _Printer:  # pylint:disable=too-few-public-methods

    def __init__(self, signature, annotate, seen):
        self.signature = signature
        self.annotated = None
        if annotate:
            self.annotated = seen if seen is not None else set()

    def notation(self, ctor) -> Optional[OpDecl]:
        if self.signature is not None and ctor in self.signature.ops:
            return self.signature.ops[ctor]
        return _NOTATIONS.get(ctor)

    def show(self, term, context_prec=0, side=None, parent=None):
        # pylint:disable=too-many-return-statements
        kind = type(term)
        if kind is Var:
            if self.annotated is not None and term.sort != K and term.name not in self.annotated:
                self.annotated.add(term.name)
                return "%s:%s" % (term.name, term.sort)
            return term.name
        if kind is IntLit:
            return str(term.value)
        if kind is BoolLit:
            return "true" if term.value else "false"
        if kind is Cell:
            return "<%s> %s </%s>" % (term.label, self.show(term.body), term.label)
        if kind is CellBag:
            return " ".join(self.show(cell) for cell in term.cells)
        decl = self.notation(term.ctor)
        if decl is None and term.ctor.startswith("_") and term.ctor.endswith("_") \
                and len(term.ctor) > 2 and len(term.args) == 2:
            decl = OpDecl(term.ctor, (K, K), term.sort, term.ctor[1:-1], infix=True)
        if decl is not None and decl.infix and len(term.args) == 2:
            text = "%s %s %s" % (self.show(term.args[0], decl.prec, "left", decl),
                                 decl.token,
                                 self.show(term.args[1], decl.prec, "right", decl))
            if decl.prec < context_prec or (decl.prec == context_prec and parent is not None
                                            and side != parent.assoc):
                return "(%s)" % text
            return text
        if decl is not None and decl.prefix and len(term.args) == 1:
            text = "%s %s" % (decl.token, self.show(term.args[0], decl.prec + 1))
            return "(%s)" % text if decl.prec < context_prec else text
        if not term.args:
            return term.ctor
        return "%s(%s)" % (term.ctor, ", ".join(self.show(arg) for arg in term.args))


BUILTINS = Signature.builtin()
