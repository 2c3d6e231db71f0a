"""Concrete syntax: theory files and formula rendering.

A theory file holds up to four kinds of sections, in any order::

    domain: eve, adam.
    prob 0.2::ecar ; 0.3::jcar.
    prob 0.8::ich(eve).
    theory:
      forall X. ms(X) -> (h(X) & t(X)).
      fcar -> (ecar | jcar).
    forget: ecar, jcar.

Connectives are ``~ & | -> <->`` with ``~`` binding tightest and ``<->``
loosest; ``->`` is right-associative, ``<->`` non-associative, and
quantifier scope extends maximally to the right.  Variables start with an
uppercase letter, constants and predicates with a lowercase one.  ``%``
starts a comment.  ``domain``, ``prob``, ``theory``, ``forget``,
``forall``, ``exists``, ``true`` and ``false`` are reserved words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .errors import ParseError
from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Equiv,
    Exists,
    Forall,
    Formula,
    FalseConst,
    Implies,
    Not,
    Or,
    TrueConst,
    Var,
    conj,
    disj,
    ground_atom_name,
)

SECTION_WORDS = ("domain", "prob", "theory", "forget")
FORMULA_WORDS = ("forall", "exists", "true", "false")
RESERVED = SECTION_WORDS + FORMULA_WORDS

_SYMBOLS = ("<->", "->", "::", ";", ",", ".", "(", ")", "&", "|", "~", ":")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword | lident | uident | number | symbol | eof
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word in RESERVED:
                kind = "keyword"
            elif word[0].isupper() or word[0] == "_":
                kind = "uident"
            else:
                kind = "lident"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            tokens.append(Token("number", text[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token("symbol", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


@dataclass
class TheoryFile:
    """Parsed contents of one theory file."""

    domain: tuple[str, ...] = ()
    facts: list[tuple[str, Fraction]] = field(default_factory=list)
    disjunctions: list[list[tuple[str, Fraction]]] = field(default_factory=list)
    formulas: list[Formula] = field(default_factory=list)
    policy: Optional[tuple[str, ...]] = None


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str, tok: Token | None = None):
        tok = tok or self.peek()
        shown = tok.text or "end of input"
        raise ParseError(f"expected {expected}, found {shown!r}", tok.line, tok.column)

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind not in ("symbol", "keyword"):
            self.fail(f"{text!r}")
        return self.next()

    # -- sections ---------------------------------------------------------

    def parse_file(self) -> TheoryFile:
        out = TheoryFile()
        seen: set[str] = set()
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind != "keyword" or tok.text not in SECTION_WORDS:
                self.fail("a section ('domain:', 'prob', 'theory:' or 'forget:')")
            if tok.text in ("domain", "forget") and tok.text in seen:
                raise ParseError(f"duplicate {tok.text!r} section", tok.line, tok.column)
            seen.add(tok.text)
            self.next()
            if tok.text == "domain":
                self.expect(":")
                out.domain = tuple(self.ident_list())
            elif tok.text == "forget":
                self.expect(":")
                out.policy = tuple(self.ident_list())
            elif tok.text == "prob":
                self.prob_statement(out)
            else:
                self.expect(":")
                self.theory_section(out)
        return out

    def ident_list(self) -> list[str]:
        names = [self.lident()]
        while self.peek().text == ",":
            self.next()
            names.append(self.lident())
        self.expect(".")
        return names

    def lident(self) -> str:
        tok = self.peek()
        if tok.kind != "lident":
            self.fail("a lowercase identifier")
        return self.next().text

    def prob_statement(self, out: TheoryFile):
        terms = [self.prob_term()]
        while self.peek().text == ";":
            self.next()
            terms.append(self.prob_term())
        self.expect(".")
        if len(terms) == 1:
            out.facts.append(terms[0])
        else:
            out.disjunctions.append(terms)

    def prob_term(self) -> tuple[str, Fraction]:
        tok = self.peek()
        if tok.kind != "number":
            self.fail("a probability")
        weight = Fraction(self.next().text)
        if not 0 <= weight <= 1:
            raise ParseError(f"probability {tok.text} outside [0,1]", tok.line, tok.column)
        self.expect("::")
        tok = self.peek()
        atom = self.parse_atom()
        if any(isinstance(t, Var) for t in atom.args):
            raise ParseError(f"probability atom {atom} is not ground", tok.line, tok.column)
        return ground_atom_name(atom), weight

    def theory_section(self, out: TheoryFile):
        first = True
        while True:
            tok = self.peek()
            if tok.kind == "eof" or (tok.kind == "keyword" and tok.text in SECTION_WORDS):
                if first:
                    self.fail("a formula")
                return
            out.formulas.append(self.parse_formula())
            self.expect(".")
            first = False

    # -- formulas ---------------------------------------------------------

    def parse_formula(self) -> Formula:
        return self.parse_equiv()

    def parse_equiv(self) -> Formula:
        lhs = self.parse_implies()
        if self.peek().text == "<->":
            self.next()
            rhs = self.parse_implies()
            if self.peek().text == "<->":
                tok = self.peek()
                raise ParseError(
                    "'<->' is non-associative; parenthesize", tok.line, tok.column
                )
            return Equiv(lhs, rhs)
        return lhs

    def parse_implies(self) -> Formula:
        lhs = self.parse_or()
        if self.peek().text == "->":
            self.next()
            return Implies(lhs, self.parse_implies())
        return lhs

    def parse_or(self) -> Formula:
        parts = [self.parse_and()]
        while self.peek().text == "|":
            self.next()
            parts.append(self.parse_and())
        return disj(parts) if len(parts) > 1 else parts[0]

    def parse_and(self) -> Formula:
        parts = [self.parse_unary()]
        while self.peek().text == "&":
            self.next()
            parts.append(self.parse_unary())
        return conj(parts) if len(parts) > 1 else parts[0]

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "~":
            self.next()
            return Not(self.parse_unary())
        if tok.kind == "keyword" and tok.text in ("forall", "exists"):
            self.next()
            var = self.peek()
            if var.kind != "uident":
                self.fail("a variable (uppercase identifier)")
            self.next()
            self.expect(".")
            body = self.parse_formula()
            return Forall(var.text, body) if tok.text == "forall" else Exists(var.text, body)
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if tok.kind == "keyword" and tok.text == "true":
            self.next()
            return TRUE
        if tok.kind == "keyword" and tok.text == "false":
            self.next()
            return FALSE
        if tok.kind == "lident":
            return self.parse_atom()
        self.fail("a formula")

    def parse_atom(self) -> Atom:
        name = self.lident()
        if self.peek().text != "(":
            return Atom(name)
        self.next()
        args: list = [self.parse_term()]
        while self.peek().text == ",":
            self.next()
            args.append(self.parse_term())
        self.expect(")")
        return Atom(name, tuple(args))

    def parse_term(self):
        tok = self.peek()
        if tok.kind == "lident":
            return Const(self.next().text)
        if tok.kind == "uident":
            return Var(self.next().text)
        self.fail("a term")


def parse_theory_file(text: str) -> TheoryFile:
    """Parse a complete theory file; raises :class:`ParseError` with a
    position on malformed input."""
    return _Parser(tokenize(text)).parse_file()


def parse_formula(text: str) -> Formula:
    """Parse a single formula (no trailing period)."""
    parser = _Parser(tokenize(text))
    f = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "eof":
        parser.fail("end of formula")
    return f


# ---------------------------------------------------------------------------
# rendering


def _wrap_operand(f: Formula) -> str:
    if isinstance(f, (Atom, TrueConst, FalseConst)):
        return render(f)
    if isinstance(f, Not):
        return render(f)
    return f"({render(f)})"


def render(f: Formula) -> str:
    """Formula as concrete syntax; ``parse_formula(render(f))`` returns a
    formula structurally equal to the flattened form of ``f``."""
    if isinstance(f, Atom):
        return str(f)
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Not):
        return "~" + _wrap_operand(f.child)
    if isinstance(f, And):
        return " & ".join(_wrap_operand(c) for c in f.children)
    if isinstance(f, Or):
        return " | ".join(_wrap_operand(c) for c in f.children)
    if isinstance(f, Implies):
        return f"{_wrap_operand(f.lhs)} -> {_wrap_operand(f.rhs)}"
    if isinstance(f, Equiv):
        return f"{_wrap_operand(f.lhs)} <-> {_wrap_operand(f.rhs)}"
    if isinstance(f, Forall):
        return f"forall {f.var}. {render(f.body)}"
    if isinstance(f, Exists):
        return f"exists {f.var}. {render(f.body)}"
    raise TypeError(f"unexpected node {f!r}")
