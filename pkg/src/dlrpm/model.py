"""Abstract syntax for knowledge bases over attribute-labelled n-ary relations.

The grammar is two-sorted: concept expressions denote sets of domain
elements, relation expressions denote sets of attribute-labelled tuples.
A knowledge base couples a TBox (inclusion axioms of either sort) with a
renaming schema that declares which attribute names are interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Iterator, Literal, Union

Cmp = Literal[">=", "<="]

GE: Cmp = ">="
LE: Cmp = "<="


class DlrError(Exception):
    """Base class for errors raised by this package."""


@dataclass(frozen=True)
class SourceSpan:
    """Location of a token in source text: 1-based line/column, byte offsets."""

    line: int
    column: int
    start: int
    end: int


def _span() -> SourceSpan | None:
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Concept expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Top:
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Bot:
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ConceptName:
    name: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Not:
    arg: "ConceptExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ConceptAnd:
    left: "ConceptExpr"
    right: "ConceptExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ConceptOr:
    left: "ConceptExpr"
    right: "ConceptExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class ExistsAttr:
    """Elements related through one attribute to at least/at most `count` tuples."""

    cmp: Cmp
    count: int
    attr: str
    rel: "RelationExpr"
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("cardinality must be a positive integer")


@dataclass(frozen=True)
class GlobalReify:
    """Identifiers assigned to the tuples of a relation, unique across the model."""

    rel: "RelationExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class LocalReify:
    """Identifiers unique only within one named relation; the argument must be a name."""

    relname: str
    span: SourceSpan | None = _span()


# ---------------------------------------------------------------------------
# Relation expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RelationName:
    name: str
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RelDiff:
    left: "RelationExpr"
    right: "RelationExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RelAnd:
    left: "RelationExpr"
    right: "RelationExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RelOr:
    left: "RelationExpr"
    right: "RelationExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Select:
    """Tuples whose value under one attribute belongs to a concept."""

    attr: str
    concept: "ConceptExpr"
    rel: "RelationExpr"
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class Project:
    """Tuples over `attrs` matched by at least/at most `count` tuples of `rel`."""

    cmp: Cmp
    count: int
    attrs: tuple[str, ...]
    rel: "RelationExpr"
    span: SourceSpan | None = _span()

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError("cardinality must be a positive integer")
        if len(self.attrs) < 2:
            raise ValueError("relation projections need at least two attributes")
        if len(set(self.attrs)) != len(self.attrs):
            raise ValueError("projection attributes must be pairwise distinct")


ConceptExpr = Union[
    Top, Bot, ConceptName, Not, ConceptAnd, ConceptOr, ExistsAttr, GlobalReify, LocalReify
]
RelationExpr = Union[RelationName, RelDiff, RelAnd, RelOr, Select, Project]
Expr = Union[ConceptExpr, RelationExpr]

_CONCEPT_CLASSES = (
    Top, Bot, ConceptName, Not, ConceptAnd, ConceptOr, ExistsAttr, GlobalReify, LocalReify
)
_RELATION_CLASSES = (RelationName, RelDiff, RelAnd, RelOr, Select, Project)


def is_concept(expr: Expr) -> bool:
    return isinstance(expr, _CONCEPT_CLASSES)


def is_relation(expr: Expr) -> bool:
    return isinstance(expr, _RELATION_CLASSES)


# ---------------------------------------------------------------------------
# Axioms, renaming schema, signature, knowledge base
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConceptIncl:
    lhs: ConceptExpr
    rhs: ConceptExpr
    span: SourceSpan | None = _span()


@dataclass(frozen=True)
class RelIncl:
    lhs: RelationExpr
    rhs: RelationExpr
    span: SourceSpan | None = _span()


Axiom = Union[ConceptIncl, RelIncl]


@dataclass(frozen=True)
class RenamingGroup:
    """A grouped renaming axiom: sources[i] is interchangeable with targets[i]."""

    sources: tuple[str, ...]
    targets: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.sources or len(self.sources) != len(self.targets):
            raise ValueError("renaming groups pair equally many source and target attributes")


@dataclass(frozen=True)
class RenamingSchema:
    groups: tuple[RenamingGroup, ...] = ()

    @property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(
            (s, t) for g in self.groups for s, t in zip(g.sources, g.targets)
        )

    def attributes(self) -> frozenset[str]:
        return frozenset(a for p in self.pairs for a in p)

    def __bool__(self) -> bool:
        return bool(self.groups)


@dataclass(frozen=True)
class Signature:
    """Declared concept names, relation names with attribute lists, and attributes.

    Relation signatures are kept as ordered tuples so grouped renamings can be
    written positionally, but all semantics below treat them as sets.
    """

    concepts: frozenset[str]
    relations: dict[str, tuple[str, ...]]
    attributes: frozenset[str]

    def __post_init__(self) -> None:
        clash = self.concepts & set(self.relations)
        if clash:
            raise ValueError(f"names declared both as concept and relation: {sorted(clash)}")
        for rn, attrs in self.relations.items():
            if len(attrs) < 2:
                raise ValueError(f"relation {rn} needs at least two attributes")
            if len(set(attrs)) != len(attrs):
                raise ValueError(f"relation {rn} repeats an attribute")
            missing = set(attrs) - self.attributes
            if missing:
                raise ValueError(f"relation {rn} uses undeclared attributes {sorted(missing)}")

    @classmethod
    def build(
        cls,
        concepts: Iterable[str] = (),
        relations: dict[str, tuple[str, ...]] | None = None,
        extra_attributes: Iterable[str] = (),
    ) -> "Signature":
        relations = dict(relations or {})
        attrs = {a for sig in relations.values() for a in sig} | set(extra_attributes)
        return cls(frozenset(concepts), relations, frozenset(attrs))

    def tau_name(self, rn: str) -> tuple[str, ...]:
        return self.relations[rn]


@dataclass(frozen=True)
class KnowledgeBase:
    signature: Signature
    tbox: tuple[Axiom, ...] = ()
    renaming: RenamingSchema = RenamingSchema()


# ---------------------------------------------------------------------------
# Structural walkers
# ---------------------------------------------------------------------------


def children(expr: Expr) -> tuple[Expr, ...]:
    """Direct subexpressions, crossing the concept/relation boundary."""
    if isinstance(expr, Not):
        return (expr.arg,)
    if isinstance(expr, (ConceptAnd, ConceptOr, RelDiff, RelAnd, RelOr)):
        return (expr.left, expr.right)
    if isinstance(expr, (ExistsAttr, Project, GlobalReify)):
        return (expr.rel,)
    if isinstance(expr, Select):
        return (expr.concept, expr.rel)
    return ()


def iter_expr(expr: Expr) -> Iterator[Expr]:
    """Pre-order traversal of an expression tree."""
    yield expr
    for child in children(expr):
        yield from iter_expr(child)


def axiom_sides(axiom: Axiom) -> tuple[Expr, Expr]:
    return axiom.lhs, axiom.rhs


def iter_kb_exprs(kb: KnowledgeBase) -> Iterator[tuple[int, Expr]]:
    """Every subexpression of every TBox axiom, tagged with its axiom index."""
    for i, axiom in enumerate(kb.tbox):
        for side in axiom_sides(axiom):
            for sub in iter_expr(side):
                yield i, sub


def map_attrs(expr: Expr, f: Callable[[str], str]) -> Expr:
    """Rebuild an expression with every attribute occurrence replaced by f."""
    if isinstance(expr, (Top, Bot, ConceptName, LocalReify, RelationName)):
        return expr
    if isinstance(expr, Not):
        return replace(expr, arg=map_attrs(expr.arg, f))
    if isinstance(expr, (ConceptAnd, ConceptOr, RelDiff, RelAnd, RelOr)):
        return replace(expr, left=map_attrs(expr.left, f), right=map_attrs(expr.right, f))
    if isinstance(expr, ExistsAttr):
        return replace(expr, attr=f(expr.attr), rel=map_attrs(expr.rel, f))
    if isinstance(expr, GlobalReify):
        return replace(expr, rel=map_attrs(expr.rel, f))
    if isinstance(expr, Select):
        return replace(
            expr, attr=f(expr.attr), concept=map_attrs(expr.concept, f), rel=map_attrs(expr.rel, f)
        )
    if isinstance(expr, Project):
        return replace(
            expr, attrs=tuple(f(a) for a in expr.attrs), rel=map_attrs(expr.rel, f)
        )
    raise TypeError(f"unknown expression node {expr!r}")


def map_axiom_attrs(axiom: Axiom, f: Callable[[str], str]) -> Axiom:
    return replace(axiom, lhs=map_attrs(axiom.lhs, f), rhs=map_attrs(axiom.rhs, f))
