"""The ALCQI target language: concepts, roles with inverses, TBoxes.

Includes negation normal form, the role-chain shortcuts used by the
translator, a deterministic text serialization with a matching parser, and
direct evaluation over finite interpretations (the semantic ground truth for
the tableau and the bounded model search).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Union

from .model import DlrError


_INVERSES: dict["Role", "Role"] = {}


@dataclass(frozen=True)
class Role:
    name: str
    inverted: bool = False

    def inverse(self) -> "Role":
        inv = _INVERSES.get(self)
        if inv is None:
            inv = Role(self.name, not self.inverted)
            _INVERSES[self] = inv
            _INVERSES[inv] = self
        return inv

    def __str__(self) -> str:
        return f"inv({self.name})" if self.inverted else self.name


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Name:
    name: str


@dataclass(frozen=True)
class Not:
    arg: "Concept"


@dataclass(frozen=True)
class And:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True)
class Or:
    left: "Concept"
    right: "Concept"


@dataclass(frozen=True)
class AtLeast:
    count: int
    role: Role
    arg: "Concept"

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("at-least restrictions need a positive count")


@dataclass(frozen=True)
class AtMost:
    count: int
    role: Role
    arg: "Concept"

    def __post_init__(self) -> None:
        if self.count < 0:
            raise ValueError("at-most restrictions need a non-negative count")


@dataclass(frozen=True)
class Exists:
    role: Role
    arg: "Concept"


@dataclass(frozen=True)
class Forall:
    role: Role
    arg: "Concept"


Concept = Union[Top, Bot, Name, Not, And, Or, AtLeast, AtMost, Exists, Forall]

Gci = tuple[Concept, Concept]


@dataclass(frozen=True)
class TBox:
    axioms: tuple[Gci, ...]
    concept_names: frozenset[str]
    role_names: frozenset[str]

    def __post_init__(self) -> None:
        used_c: set[str] = set()
        used_r: set[str] = set()
        for lhs, rhs in self.axioms:
            for c in (lhs, rhs):
                used_c.update(n.name for n in iter_concepts(c) if isinstance(n, Name))
                used_r.update(r.name for r in iter_roles(c))
        missing = (used_c - self.concept_names) | (used_r - self.role_names)
        if missing:
            raise ValueError(f"axioms use undeclared names: {sorted(missing)}")

    @classmethod
    def of(
        cls,
        axioms: Iterable[Gci],
        extra_concepts: Iterable[str] = (),
        extra_roles: Iterable[str] = (),
    ) -> "TBox":
        """Build a TBox, inferring declarations from the axioms themselves."""
        axioms = tuple(axioms)
        concepts = set(extra_concepts)
        roles = set(extra_roles)
        for lhs, rhs in axioms:
            for c in (lhs, rhs):
                concepts.update(n.name for n in iter_concepts(c) if isinstance(n, Name))
                roles.update(r.name for r in iter_roles(c))
        return cls(axioms, frozenset(concepts), frozenset(roles))


EMPTY_TBOX = TBox((), frozenset(), frozenset())


def iter_concepts(c: Concept) -> Iterator[Concept]:
    yield c
    if isinstance(c, Not):
        yield from iter_concepts(c.arg)
    elif isinstance(c, (And, Or)):
        yield from iter_concepts(c.left)
        yield from iter_concepts(c.right)
    elif isinstance(c, (AtLeast, AtMost, Exists, Forall)):
        yield from iter_concepts(c.arg)


def iter_roles(c: Concept) -> Iterator[Role]:
    for sub in iter_concepts(c):
        if isinstance(sub, (AtLeast, AtMost, Exists, Forall)):
            yield sub.role


# ---------------------------------------------------------------------------
# Negation normal form and role-chain shortcuts
# ---------------------------------------------------------------------------


def _and(a: Concept, b: Concept) -> Concept:
    if isinstance(a, Bot) or isinstance(b, Bot):
        return Bot()
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    return And(a, b)


def _or(a: Concept, b: Concept) -> Concept:
    if isinstance(a, Top) or isinstance(b, Top):
        return Top()
    if isinstance(a, Bot):
        return b
    if isinstance(b, Bot):
        return a
    return Or(a, b)


def _at_least(count: int, role: Role, arg: Concept) -> Concept:
    if isinstance(arg, Bot):
        return Bot()
    return AtLeast(count, role, arg)


def _at_most(count: int, role: Role, arg: Concept) -> Concept:
    if isinstance(arg, Bot):
        return Top()
    return AtMost(count, role, arg)


@lru_cache(maxsize=None)
def nnf(c: Concept) -> Concept:
    """Push negation onto concept names; desugar Exists/Forall into counts.

    At-most with count 0 serves as the universal restriction: AtMost(0, r, C)
    states that no r-neighbour satisfies C.  Obvious constant cases are
    simplified away (a counting restriction over the bottom concept is
    vacuous or impossible), which keeps tautological axiom parts from
    turning into search branches downstream.
    """
    if isinstance(c, (Top, Bot, Name)):
        return c
    if isinstance(c, And):
        return _and(nnf(c.left), nnf(c.right))
    if isinstance(c, Or):
        return _or(nnf(c.left), nnf(c.right))
    if isinstance(c, Exists):
        return _at_least(1, c.role, nnf(c.arg))
    if isinstance(c, Forall):
        return _at_most(0, c.role, nnf(Not(c.arg)))
    if isinstance(c, AtLeast):
        return _at_least(c.count, c.role, nnf(c.arg))
    if isinstance(c, AtMost):
        return _at_most(c.count, c.role, nnf(c.arg))
    arg = c.arg
    if isinstance(arg, Top):
        return Bot()
    if isinstance(arg, Bot):
        return Top()
    if isinstance(arg, Name):
        return c
    if isinstance(arg, Not):
        return nnf(arg.arg)
    if isinstance(arg, And):
        return _or(nnf(Not(arg.left)), nnf(Not(arg.right)))
    if isinstance(arg, Or):
        return _and(nnf(Not(arg.left)), nnf(Not(arg.right)))
    if isinstance(arg, Exists):
        return _at_most(0, arg.role, nnf(arg.arg))
    if isinstance(arg, Forall):
        return _at_least(1, arg.role, nnf(Not(arg.arg)))
    if isinstance(arg, AtLeast):
        return _at_most(arg.count - 1, arg.role, nnf(arg.arg))
    if isinstance(arg, AtMost):
        return _at_least(arg.count + 1, arg.role, nnf(arg.arg))
    raise TypeError(f"unknown concept {c!r}")


@lru_cache(maxsize=None)
def neg(c: Concept) -> Concept:
    """NNF complement of a concept already in NNF."""
    return nnf(Not(c))


def inverse_chain(roles: tuple[Role, ...]) -> tuple[Role, ...]:
    """Inverse of a role chain: reverse the order and invert every role."""
    return tuple(r.inverse() for r in reversed(roles))


def chain_exists(cmp: str, roles: Iterable[Role], tail: Concept) -> Concept:
    """Expand a cardinality-1 restriction over a role chain into nested restrictions.

    For ">=": nested existentials.  For "<=": nested at-most-1 restrictions,
    the outermost over the first role.  Correct in the reified TBoxes built
    here, where every chained role is functional.
    """
    roles = tuple(roles)
    if not roles:
        return tail
    out = tail
    for role in reversed(roles):
        out = Exists(role, out) if cmp == ">=" else AtMost(1, role, out)
    return out


def chain_forall(roles: Iterable[Role], tail: Concept) -> Concept:
    """Nested universal restrictions over a role chain; identity on the empty chain."""
    out = tail
    for role in reversed(tuple(roles)):
        out = Forall(role, out)
    return out


# ---------------------------------------------------------------------------
# Text serialization
# ---------------------------------------------------------------------------

_OR, _AND, _UNARY, _ATOM = 1, 2, 3, 4


def format_concept(c: Concept) -> str:
    return _fmt(c, _OR)


def _fmt(c: Concept, level: int) -> str:
    text, own = _render(c)
    return f"({text})" if own < level else text


def _render(c: Concept) -> tuple[str, int]:
    if isinstance(c, Top):
        return "top", _ATOM
    if isinstance(c, Bot):
        return "bot", _ATOM
    if isinstance(c, Name):
        return c.name, _ATOM
    if isinstance(c, Not):
        return f"not {_fmt(c.arg, _UNARY)}", _UNARY
    if isinstance(c, And):
        return f"{_fmt(c.left, _AND)} and {_fmt(c.right, _AND + 1)}", _AND
    if isinstance(c, Or):
        return f"{_fmt(c.left, _OR)} or {_fmt(c.right, _OR + 1)}", _OR
    if isinstance(c, Exists):
        return f"exists {c.role}.{_fmt(c.arg, _UNARY)}", _UNARY
    if isinstance(c, Forall):
        return f"forall {c.role}.{_fmt(c.arg, _UNARY)}", _UNARY
    if isinstance(c, AtLeast):
        return f">={c.count} {c.role}.{_fmt(c.arg, _UNARY)}", _UNARY
    if isinstance(c, AtMost):
        return f"<={c.count} {c.role}.{_fmt(c.arg, _UNARY)}", _UNARY
    raise TypeError(f"unknown concept {c!r}")


def format_tbox(tbox: TBox) -> str:
    """Sorted declarations, axioms in order; reparses to an equal TBox."""
    lines = [f"concept {n}" for n in sorted(tbox.concept_names)]
    lines.extend(f"role {n}" for n in sorted(tbox.role_names))
    lines.extend(
        f"axiom {format_concept(lhs)} isa {format_concept(rhs)}" for lhs, rhs in tbox.axioms
    )
    return "\n".join(lines) + "\n"


_ALCQI_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>\#[^\n]*)
    | (?P<int>\d+)
    | (?P<name>[^\W\d]\w*(\{[^{}]*\})?(\^(l|\{[^{}]*\}))?)
    | (?P<op>>=|<=|[().])
    """,
    re.VERBOSE | re.UNICODE,
)

_ALCQI_KEYWORDS = frozenset({"top", "bot", "not", "and", "or", "exists", "forall",
                             "isa", "axiom", "concept", "role", "inv"})


class AlcqiSyntaxError(DlrError):
    pass


def _alcqi_tokens(text: str) -> list[tuple[str, str]]:
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _ALCQI_TOKEN_RE.match(text, pos)
        if m is None:
            raise AlcqiSyntaxError(f"unexpected character {text[pos]!r} at offset {pos}")
        kind = m.lastgroup
        lexeme = m.group(0)
        if kind not in ("ws", "comment"):
            if kind == "name" and lexeme in _ALCQI_KEYWORDS:
                kind = "kw"
            tokens.append((kind, lexeme))
        pos = m.end()
    tokens.append(("eof", ""))
    return tokens


class _CParser:
    def __init__(self, tokens: list[tuple[str, str]]):
        self.toks = tokens
        self.pos = 0

    def peek(self) -> tuple[str, str]:
        return self.toks[self.pos]

    def advance(self) -> tuple[str, str]:
        tok = self.toks[self.pos]
        if tok[0] != "eof":
            self.pos += 1
        return tok

    def eat(self, text: str) -> bool:
        kind, lexeme = self.peek()
        if lexeme == text and kind in ("kw", "op"):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.eat(text):
            raise AlcqiSyntaxError(f"expected {text!r}, found {self.peek()[1]!r}")

    def name(self) -> str:
        kind, lexeme = self.peek()
        if kind != "name":
            raise AlcqiSyntaxError(f"expected a name, found {lexeme!r}")
        self.advance()
        return lexeme


def parse_concept(text: str) -> Concept:
    p = _CParser(_alcqi_tokens(text))
    c = _parse_c_or(p)
    if p.peek()[0] != "eof":
        raise AlcqiSyntaxError(f"unexpected {p.peek()[1]!r} after concept")
    return c


def parse_tbox(text: str) -> TBox:
    """Parse the serialized TBox form: concept/role declarations then axiom lines."""
    concepts: set[str] = set()
    roles: set[str] = set()
    axioms: list[Gci] = []
    p = _CParser(_alcqi_tokens(text))
    while p.peek()[0] != "eof":
        if p.eat("concept"):
            concepts.add(p.name())
        elif p.eat("role"):
            roles.add(p.name())
        elif p.eat("axiom"):
            lhs = _parse_c_or(p)
            p.expect("isa")
            rhs = _parse_c_or(p)
            axioms.append((lhs, rhs))
        else:
            raise AlcqiSyntaxError(f"expected a declaration or axiom, found {p.peek()[1]!r}")
    return TBox(tuple(axioms), frozenset(concepts), frozenset(roles))


def _parse_c_or(p: _CParser) -> Concept:
    c = _parse_c_and(p)
    while p.eat("or"):
        c = Or(c, _parse_c_and(p))
    return c


def _parse_c_and(p: _CParser) -> Concept:
    c = _parse_c_unary(p)
    while p.eat("and"):
        c = And(c, _parse_c_unary(p))
    return c


def _parse_role(p: _CParser) -> Role:
    if p.eat("inv"):
        p.expect("(")
        name = p.name()
        p.expect(")")
        return Role(name, inverted=True)
    return Role(p.name())


def _parse_c_unary(p: _CParser) -> Concept:
    if p.eat("not"):
        return Not(_parse_c_unary(p))
    if p.eat("exists"):
        role = _parse_role(p)
        p.expect(".")
        return Exists(role, _parse_c_unary(p))
    if p.eat("forall"):
        role = _parse_role(p)
        p.expect(".")
        return Forall(role, _parse_c_unary(p))
    for marker, cls in ((">=", AtLeast), ("<=", AtMost)):
        if p.eat(marker):
            kind, lexeme = p.peek()
            if kind != "int":
                raise AlcqiSyntaxError(f"expected a count after {marker}")
            p.advance()
            role = _parse_role(p)
            p.expect(".")
            return cls(int(lexeme), role, _parse_c_unary(p))
    if p.eat("top"):
        return Top()
    if p.eat("bot"):
        return Bot()
    if p.eat("("):
        c = _parse_c_or(p)
        p.expect(")")
        return c
    kind, lexeme = p.peek()
    if kind == "name":
        p.advance()
        return Name(lexeme)
    raise AlcqiSyntaxError(f"expected a concept, found {lexeme!r}")


# ---------------------------------------------------------------------------
# Finite interpretations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interp:
    """Finite interpretation over domain {0..size-1}."""

    size: int
    concepts: dict[str, frozenset[int]]
    roles: dict[str, frozenset[tuple[int, int]]]

    def domain(self) -> range:
        return range(self.size)

    def successors(self, role: Role, d: int) -> frozenset[int]:
        pairs = self.roles.get(role.name, frozenset())
        if role.inverted:
            return frozenset(a for a, b in pairs if b == d)
        return frozenset(b for a, b in pairs if a == d)


def eval_concept(c: Concept, i: Interp) -> frozenset[int]:
    if isinstance(c, Top):
        return frozenset(i.domain())
    if isinstance(c, Bot):
        return frozenset()
    if isinstance(c, Name):
        return i.concepts.get(c.name, frozenset())
    if isinstance(c, Not):
        return frozenset(i.domain()) - eval_concept(c.arg, i)
    if isinstance(c, And):
        return eval_concept(c.left, i) & eval_concept(c.right, i)
    if isinstance(c, Or):
        return eval_concept(c.left, i) | eval_concept(c.right, i)
    if isinstance(c, Exists):
        return eval_concept(AtLeast(1, c.role, c.arg), i)
    if isinstance(c, Forall):
        return eval_concept(AtMost(0, c.role, Not(c.arg)), i)
    if isinstance(c, (AtLeast, AtMost)):
        arg_ext = eval_concept(c.arg, i)
        out = []
        for d in i.domain():
            hits = len(i.successors(c.role, d) & arg_ext)
            keep = hits >= c.count if isinstance(c, AtLeast) else hits <= c.count
            if keep:
                out.append(d)
        return frozenset(out)
    raise TypeError(f"unknown concept {c!r}")


def satisfies_tbox(i: Interp, tbox: TBox) -> bool:
    return all(eval_concept(lhs, i) <= eval_concept(rhs, i) for lhs, rhs in tbox.axioms)
