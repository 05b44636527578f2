"""Textual format for knowledge bases: lexer, parser, and canonical printer.

A `.dlrp` document has up to three sections, in this order:

    signature:
      concept Student
      relation Person(firstname, lastname, age, height)
      attribute spare
    renaming:
      rename firstname lastname -> fn ln
    tbox:
      exists[firstname,lastname] Student isa exists[firstname,lastname] Person

Expression syntax: ``top bot not and or isa`` keywords, ``exists>=q[...]``,
``exists<=q[...]`` and ``exists[...]`` (short for ``exists>=1``),
``sigma[U: C] R`` for selection, ``reify(R)`` / ``lreify(RN)`` for global and
local objectification, ``R1 \\ R2`` for difference.  ``not`` binds tighter
than ``and``, which binds tighter than ``or``; ``\\`` binds tighter than
``and``; the prefix operators bind tighter than all binary ones.  Comments
run from ``#`` to end of line.  Identifiers may use any word characters.

The printer emits a canonical form: declarations sorted by name, renaming
groups and axioms in input order, minimal parentheses.  Parsing the printed
form yields a structurally equal knowledge base.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    Axiom,
    Bot,
    Cmp,
    ConceptAnd,
    ConceptExpr,
    ConceptIncl,
    ConceptName,
    ConceptOr,
    DlrError,
    ExistsAttr,
    Expr,
    GlobalReify,
    KnowledgeBase,
    LocalReify,
    Not,
    Project,
    RelAnd,
    RelDiff,
    RelIncl,
    RelOr,
    RelationExpr,
    RelationName,
    RenamingGroup,
    RenamingSchema,
    Select,
    Signature,
    SourceSpan,
    Top,
    is_concept,
    is_relation,
)

KEYWORDS = frozenset(
    {
        "signature", "renaming", "tbox",
        "concept", "relation", "attribute", "rename",
        "top", "bot", "not", "and", "or", "isa",
        "exists", "sigma", "reify", "lreify",
    }
)

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>\#[^\n]*)
    | (?P<int>\d+)
    | (?P<name>[^\W\d]\w*)
    | (?P<op>->|>=|<=|[()\[\],:\\])
    """,
    re.VERBOSE | re.UNICODE,
)


class ParseError(DlrError):
    """A lexical or syntactic problem, located by a source span."""

    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span.line}:{span.column}: {message}")
        self.message = message
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "name", "kw", "op", "eof"
    text: str
    span: SourceSpan


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    line = 1
    col = 1
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            span = SourceSpan(line, col, pos, pos + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", span)
        lexeme = m.group(0)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            span = SourceSpan(line, col, pos, m.end())
            if kind == "name" and lexeme in KEYWORDS:
                kind = "kw"
            tokens.append(Token(kind, lexeme, span))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(line, col, n, n)))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.text == text and tok.kind in ("kw", "op")

    def eat(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        tok = self.eat(text)
        if tok is None:
            got = self.peek()
            raise ParseError(f"expected {text!r}, found {got.text!r}" if got.text else f"expected {text!r}", got.span)
        return tok

    def expect_name(self, what: str = "identifier") -> Token:
        tok = self.peek()
        if tok.kind != "name":
            raise ParseError(f"expected {what}, found {tok.text!r}" if tok.text else f"expected {what}", tok.span)
        return self.advance()

    def fail(self, message: str) -> ParseError:
        return ParseError(message, self.peek().span)


# ---------------------------------------------------------------------------
# Knowledge base parsing
# ---------------------------------------------------------------------------


def parse(text: str) -> KnowledgeBase:
    """Parse a full document; raises ParseError with a span on any problem."""
    p = _Parser(tokenize(text))
    concepts: dict[str, Token] = {}
    relations: dict[str, tuple[str, ...]] = {}
    extra_attrs: dict[str, Token] = {}

    if p.eat("signature"):
        p.expect(":")
        while True:
            if p.eat("concept"):
                tok = p.expect_name("concept name")
                _check_fresh(tok, concepts, relations)
                concepts[tok.text] = tok
            elif p.eat("relation"):
                tok = p.expect_name("relation name")
                _check_fresh(tok, concepts, relations)
                p.expect("(")
                attrs = [p.expect_name("attribute")]
                while p.eat(","):
                    attrs.append(p.expect_name("attribute"))
                p.expect(")")
                if len(attrs) < 2:
                    raise ParseError("relations need at least two attributes", tok.span)
                seen: set[str] = set()
                for a in attrs:
                    if a.text in seen:
                        raise ParseError(f"duplicate attribute {a.text}", a.span)
                    seen.add(a.text)
                relations[tok.text] = tuple(a.text for a in attrs)
            elif p.eat("attribute"):
                tok = p.expect_name("attribute name")
                extra_attrs[tok.text] = tok
                while p.eat(","):
                    tok = p.expect_name("attribute name")
                    extra_attrs[tok.text] = tok
            else:
                break

    sig = Signature.build(concepts, relations, extra_attrs)

    groups: list[RenamingGroup] = []
    if p.eat("renaming"):
        p.expect(":")
        while p.at("rename"):
            p.expect("rename")
            sources = [p.expect_name("attribute")]
            while p.peek().kind == "name":
                sources.append(p.advance())
            p.expect("->")
            targets = [p.expect_name("attribute")]
            for _ in range(len(sources) - 1):
                targets.append(p.expect_name("attribute"))
            for tok in sources + targets:
                if tok.text not in sig.attributes:
                    raise ParseError(f"undeclared attribute {tok.text}", tok.span)
            groups.append(
                RenamingGroup(tuple(t.text for t in sources), tuple(t.text for t in targets))
            )

    axioms: list[Axiom] = []
    if p.eat("tbox"):
        p.expect(":")
        while p.peek().kind != "eof":
            axioms.append(_parse_axiom(p, sig))

    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {tok.text!r}", tok.span)
    return KnowledgeBase(sig, tuple(axioms), RenamingSchema(tuple(groups)))


def parse_axiom(text: str, sig: Signature) -> Axiom:
    """Parse a single inclusion axiom against an existing signature."""
    p = _Parser(tokenize(text))
    axiom = _parse_axiom(p, sig)
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {tok.text!r} after axiom", tok.span)
    return axiom


def parse_concept(text: str, sig: Signature) -> ConceptExpr:
    expr = _parse_standalone(text, sig)
    if not is_concept(expr):
        raise DlrError("expected a concept expression, found a relation expression")
    return expr


def parse_relation(text: str, sig: Signature) -> RelationExpr:
    expr = _parse_standalone(text, sig)
    if not is_relation(expr):
        raise DlrError("expected a relation expression, found a concept expression")
    return expr


def _parse_standalone(text: str, sig: Signature) -> Expr:
    p = _Parser(tokenize(text))
    expr = _parse_or(p, sig)
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"unexpected {tok.text!r} after expression", tok.span)
    return expr


def _check_fresh(tok: Token, concepts: dict[str, Token], relations: dict[str, tuple[str, ...]]) -> None:
    if tok.text in concepts or tok.text in relations:
        raise ParseError(f"duplicate declaration of {tok.text}", tok.span)


def _parse_axiom(p: _Parser, sig: Signature) -> Axiom:
    lhs = _parse_or(p, sig)
    isa = p.expect("isa")
    rhs = _parse_or(p, sig)
    if is_concept(lhs) and is_concept(rhs):
        return ConceptIncl(lhs, rhs, span=isa.span)
    if is_relation(lhs) and is_relation(rhs):
        return RelIncl(lhs, rhs, span=isa.span)
    raise ParseError("inclusion sides must both be concepts or both be relations", isa.span)


def _parse_or(p: _Parser, sig: Signature) -> Expr:
    expr = _parse_and(p, sig)
    while p.at("or"):
        op = p.advance()
        rhs = _parse_and(p, sig)
        expr = _combine(expr, rhs, op, ConceptOr, RelOr, "or")
    return expr


def _parse_and(p: _Parser, sig: Signature) -> Expr:
    expr = _parse_diff(p, sig)
    while p.at("and"):
        op = p.advance()
        rhs = _parse_diff(p, sig)
        expr = _combine(expr, rhs, op, ConceptAnd, RelAnd, "and")
    return expr


def _parse_diff(p: _Parser, sig: Signature) -> Expr:
    expr = _parse_unary(p, sig)
    while p.at("\\"):
        op = p.advance()
        rhs = _parse_unary(p, sig)
        if not (is_relation(expr) and is_relation(rhs)):
            raise ParseError("difference applies to relations only", op.span)
        expr = RelDiff(expr, rhs, span=op.span)
    return expr


def _combine(lhs: Expr, rhs: Expr, op: Token, cc, rc, name: str) -> Expr:
    if is_concept(lhs) and is_concept(rhs):
        return cc(lhs, rhs, span=op.span)
    if is_relation(lhs) and is_relation(rhs):
        return rc(lhs, rhs, span=op.span)
    raise ParseError(f"operands of '{name}' must both be concepts or both relations", op.span)


def _parse_unary(p: _Parser, sig: Signature) -> Expr:
    tok = p.peek()
    if p.eat("not"):
        arg = _parse_unary(p, sig)
        if not is_concept(arg):
            raise ParseError("negation applies to concepts only", tok.span)
        return Not(arg, span=tok.span)
    if p.eat("exists"):
        cmp: Cmp = ">="
        count = 1
        if p.at(">=") or p.at("<="):
            cmp = p.advance().text  # type: ignore[assignment]
            num = p.peek()
            if num.kind != "int":
                raise ParseError("expected a cardinality after the comparison", num.span)
            p.advance()
            count = int(num.text)
            if count < 1:
                raise ParseError("cardinality must be a positive integer", num.span)
        p.expect("[")
        attrs = [p.expect_name("attribute")]
        while p.eat(","):
            attrs.append(p.expect_name("attribute"))
        p.expect("]")
        seen: set[str] = set()
        for a in attrs:
            if a.text in seen:
                raise ParseError(f"duplicate attribute {a.text}", a.span)
            seen.add(a.text)
        operand = _parse_unary(p, sig)
        if not is_relation(operand):
            raise ParseError("projection applies to a relation", tok.span)
        if len(attrs) == 1:
            return ExistsAttr(cmp, count, attrs[0].text, operand, span=tok.span)
        return Project(cmp, count, tuple(a.text for a in attrs), operand, span=tok.span)
    if p.eat("sigma"):
        p.expect("[")
        attr = p.expect_name("attribute")
        p.expect(":")
        concept = _parse_or(p, sig)
        if not is_concept(concept):
            raise ParseError("selection condition must be a concept", attr.span)
        p.expect("]")
        operand = _parse_unary(p, sig)
        if not is_relation(operand):
            raise ParseError("selection applies to a relation", tok.span)
        return Select(attr.text, concept, operand, span=tok.span)
    if p.eat("reify"):
        p.expect("(")
        operand = _parse_or(p, sig)
        if not is_relation(operand):
            raise ParseError("reify applies to a relation", tok.span)
        p.expect(")")
        return GlobalReify(operand, span=tok.span)
    if p.eat("lreify"):
        p.expect("(")
        name = p.expect_name("relation name")
        if name.text not in sig.relations:
            raise ParseError(f"undeclared relation {name.text}", name.span)
        p.expect(")")
        return LocalReify(name.text, span=tok.span)
    if p.eat("top"):
        return Top(span=tok.span)
    if p.eat("bot"):
        return Bot(span=tok.span)
    if p.eat("("):
        expr = _parse_or(p, sig)
        p.expect(")")
        return expr
    if tok.kind == "name":
        p.advance()
        if tok.text in sig.concepts:
            return ConceptName(tok.text, span=tok.span)
        if tok.text in sig.relations:
            return RelationName(tok.text, span=tok.span)
        raise ParseError(f"undeclared name {tok.text}", tok.span)
    raise ParseError(
        f"expected an expression, found {tok.text!r}" if tok.text else "expected an expression",
        tok.span,
    )


# ---------------------------------------------------------------------------
# Canonical printer
# ---------------------------------------------------------------------------

_OR, _AND, _DIFF, _UNARY, _ATOM = 1, 2, 3, 4, 5


def format_kb(kb: KnowledgeBase) -> str:
    """Deterministic canonical text; `parse(format_kb(kb))` equals `kb` structurally."""
    sig = kb.signature
    lines = ["signature:"]
    for c in sorted(sig.concepts):
        lines.append(f"  concept {c}")
    for rn in sorted(sig.relations):
        attrs = ", ".join(sig.relations[rn])
        lines.append(f"  relation {rn}({attrs})")
    loose = sig.attributes - {a for attrs in sig.relations.values() for a in attrs}
    for a in sorted(loose):
        lines.append(f"  attribute {a}")
    if kb.renaming.groups:
        lines.append("")
        lines.append("renaming:")
        for g in kb.renaming.groups:
            lines.append(f"  rename {' '.join(g.sources)} -> {' '.join(g.targets)}")
    lines.append("")
    lines.append("tbox:")
    for ax in kb.tbox:
        lines.append(f"  {format_axiom(ax)}")
    return "\n".join(lines) + "\n"


def format_axiom(axiom: Axiom) -> str:
    return f"{format_expr(axiom.lhs)} isa {format_expr(axiom.rhs)}"


def format_expr(expr: Expr) -> str:
    return _fmt(expr, _OR)


def _fmt(expr: Expr, level: int) -> str:
    text, own = _render(expr)
    if own < level:
        return f"({text})"
    return text


def _render(expr: Expr) -> tuple[str, int]:
    if isinstance(expr, Top):
        return "top", _ATOM
    if isinstance(expr, Bot):
        return "bot", _ATOM
    if isinstance(expr, (ConceptName, RelationName)):
        return expr.name, _ATOM
    if isinstance(expr, Not):
        return f"not {_fmt(expr.arg, _UNARY)}", _UNARY
    if isinstance(expr, (ConceptAnd, RelAnd)):
        return f"{_fmt(expr.left, _AND)} and {_fmt(expr.right, _AND + 1)}", _AND
    if isinstance(expr, (ConceptOr, RelOr)):
        return f"{_fmt(expr.left, _OR)} or {_fmt(expr.right, _OR + 1)}", _OR
    if isinstance(expr, RelDiff):
        return f"{_fmt(expr.left, _DIFF)} \\ {_fmt(expr.right, _DIFF + 1)}", _DIFF
    if isinstance(expr, ExistsAttr):
        return f"exists{_card(expr.cmp, expr.count)}[{expr.attr}] {_fmt(expr.rel, _UNARY)}", _UNARY
    if isinstance(expr, Project):
        attrs = ",".join(expr.attrs)
        return f"exists{_card(expr.cmp, expr.count)}[{attrs}] {_fmt(expr.rel, _UNARY)}", _UNARY
    if isinstance(expr, Select):
        return (
            f"sigma[{expr.attr}: {format_expr(expr.concept)}] {_fmt(expr.rel, _UNARY)}",
            _UNARY,
        )
    if isinstance(expr, GlobalReify):
        return f"reify({format_expr(expr.rel)})", _ATOM
    if isinstance(expr, LocalReify):
        return f"lreify({expr.relname})", _ATOM
    raise TypeError(f"unknown expression node {expr!r}")


def _card(cmp: Cmp, count: int) -> str:
    if cmp == ">=" and count == 1:
        return ""
    return f"{cmp}{count}"
