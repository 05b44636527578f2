"""Signature computation and structural validation for knowledge bases.

`tau` extends relation signatures to composite relation expressions; it is
computed on canonical attributes so that boolean combinations and inclusions
compare signatures up to renaming.  Side-condition failures are not errors:
`tau` returns None (the distinguished ill-formed marker) and `validate`
reports them as diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .model import (
    ConceptAnd,
    ConceptExpr,
    ConceptIncl,
    ConceptName,
    ConceptOr,
    ExistsAttr,
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
    RenamingSchema,
    Select,
    Signature,
    SourceSpan,
    is_relation,
    iter_expr,
)
from .renaming import check_well_founded, induce_partition


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; `axiom_index` is None for schema-level issues."""

    code: str
    message: str
    axiom_index: int | None = None
    span: SourceSpan | None = None

    def __str__(self) -> str:
        where = "" if self.axiom_index is None else f"axiom {self.axiom_index}: "
        return f"[{self.code}] {where}{self.message}"


NOT_WELL_FOUNDED = "not-well-founded"
UNDECLARED_NAME = "undeclared-name"
UNDECLARED_ATTRIBUTE = "undeclared-attribute"
ILL_FORMED = "ill-formed"
ATTRIBUTE_NOT_IN_RELATION = "attribute-not-in-relation"
UNION_INCOMPATIBLE = "union-incompatible"


def tau(
    expr: RelationExpr,
    sig: Signature,
    ren: RenamingSchema | None = None,
) -> frozenset[str] | None:
    """Signature of a relation expression over canonical attributes.

    Returns None when any side condition fails: boolean combinations of
    relations whose signatures differ up to renaming, selection on an
    attribute outside the operand signature, or a projection whose attribute
    set is not a proper subset of the operand signature.
    """
    canon: Callable[[str], str]
    if ren is None or not ren:
        canon = lambda a: a
    else:
        canon = induce_partition(ren, sig).canonical
    return _tau(expr, sig, canon)


def _tau(
    expr: RelationExpr, sig: Signature, canon: Callable[[str], str]
) -> frozenset[str] | None:
    if isinstance(expr, RelationName):
        attrs = sig.relations.get(expr.name)
        if attrs is None:
            return None
        out = frozenset(canon(a) for a in attrs)
        return out if len(out) == len(attrs) else None
    if isinstance(expr, (RelDiff, RelAnd, RelOr)):
        t1 = _tau(expr.left, sig, canon)
        t2 = _tau(expr.right, sig, canon)
        if t1 is None or t1 != t2:
            return None
        return t1
    if isinstance(expr, Select):
        t = _tau(expr.rel, sig, canon)
        if t is None or canon(expr.attr) not in t:
            return None
        return t
    if isinstance(expr, Project):
        t = _tau(expr.rel, sig, canon)
        if t is None:
            return None
        attrs = frozenset(canon(a) for a in expr.attrs)
        if len(attrs) != len(expr.attrs) or not attrs < t:
            return None
        return attrs
    raise TypeError(f"not a relation expression: {expr!r}")


def arity(expr: RelationExpr, sig: Signature, ren: RenamingSchema | None = None) -> int:
    """Number of attributes in the expression signature; 0 when ill-formed."""
    t = tau(expr, sig, ren)
    return 0 if t is None else len(t)


def union_compatible(
    r1: RelationExpr, r2: RelationExpr, sig: Signature, ren: RenamingSchema | None = None
) -> bool:
    t1 = tau(r1, sig, ren)
    t2 = tau(r2, sig, ren)
    return t1 is not None and t1 == t2


def validate(kb: KnowledgeBase) -> list[Diagnostic]:
    """All structural problems in a knowledge base; empty list means well-formed.

    Checks, in order: renaming attributes declared, renaming well-founded,
    names and attributes of every axiom declared, every relation subexpression
    well-formed, single-attribute projections inside their operand signature,
    and relation inclusions union compatible.  When the schema is not well
    founded the expression-level checks are skipped, since canonical
    signatures are meaningless in that case.
    """
    sig = kb.signature
    diags: list[Diagnostic] = []

    undeclared_ren = sorted(kb.renaming.attributes() - sig.attributes)
    for a in undeclared_ren:
        diags.append(Diagnostic(UNDECLARED_ATTRIBUTE, f"renaming mentions undeclared attribute {a}"))
    part = induce_partition(kb.renaming, sig)
    violation = check_well_founded(part, sig)
    if violation is not None:
        diags.append(Diagnostic(NOT_WELL_FOUNDED, str(violation)))
        return diags
    if undeclared_ren:
        return diags

    for i, axiom in enumerate(kb.tbox):
        diags.extend(_check_sides(axiom.lhs, axiom.rhs, i, kb))
        if any(d.axiom_index == i for d in diags):
            continue
        if isinstance(axiom, RelIncl):
            t1 = tau(axiom.lhs, sig, kb.renaming)
            t2 = tau(axiom.rhs, sig, kb.renaming)
            if t1 != t2:
                diags.append(
                    Diagnostic(
                        UNION_INCOMPATIBLE,
                        "sides of the relation inclusion have different signatures "
                        f"({_fmt(t1)} vs {_fmt(t2)})",
                        axiom_index=i,
                        span=axiom.span,
                    )
                )
    return diags


def validate_expr(kb: KnowledgeBase, expr: ConceptExpr | RelationExpr) -> list[Diagnostic]:
    """Diagnostics for a stand-alone expression over the knowledge base signature."""
    return _check_sides(expr, None, None, kb)


def _fmt(attrs: frozenset[str] | None) -> str:
    if attrs is None:
        return "ill-formed"
    return "{" + ",".join(sorted(attrs)) + "}"


def _check_sides(
    lhs: ConceptExpr | RelationExpr,
    rhs: ConceptExpr | RelationExpr | None,
    index: int | None,
    kb: KnowledgeBase,
) -> list[Diagnostic]:
    sig = kb.signature
    canon = induce_partition(kb.renaming, sig).canonical
    diags: list[Diagnostic] = []
    sides = (lhs,) if rhs is None else (lhs, rhs)

    for side in sides:
        for sub in iter_expr(side):
            if isinstance(sub, ConceptName) and sub.name not in sig.concepts:
                diags.append(
                    Diagnostic(UNDECLARED_NAME, f"undeclared concept {sub.name}", index, sub.span)
                )
            elif isinstance(sub, RelationName) and sub.name not in sig.relations:
                diags.append(
                    Diagnostic(UNDECLARED_NAME, f"undeclared relation {sub.name}", index, sub.span)
                )
            elif isinstance(sub, LocalReify) and sub.relname not in sig.relations:
                diags.append(
                    Diagnostic(UNDECLARED_NAME, f"undeclared relation {sub.relname}", index, sub.span)
                )
            for attr in _expr_attrs(sub):
                if attr not in sig.attributes:
                    diags.append(
                        Diagnostic(
                            UNDECLARED_ATTRIBUTE, f"undeclared attribute {attr}", index, sub.span
                        )
                    )
    if diags:
        return diags

    for side in sides:
        for sub in iter_expr(side):
            if is_relation(sub):
                if _tau(sub, sig, canon) is None and not _has_ill_formed_child(sub, sig, canon):
                    diags.append(
                        Diagnostic(
                            ILL_FORMED,
                            f"relation expression has no signature: {_describe(sub)}",
                            index,
                            sub.span,
                        )
                    )
            elif isinstance(sub, ExistsAttr):
                t = _tau(sub.rel, sig, canon)
                if t is not None and canon(sub.attr) not in t:
                    diags.append(
                        Diagnostic(
                            ATTRIBUTE_NOT_IN_RELATION,
                            f"attribute {sub.attr} is not in the operand signature {_fmt(t)}",
                            index,
                            sub.span,
                        )
                    )
    return diags


def _expr_attrs(expr: ConceptExpr | RelationExpr) -> tuple[str, ...]:
    if isinstance(expr, (ExistsAttr, Select)):
        return (expr.attr,)
    if isinstance(expr, Project):
        return expr.attrs
    return ()


def _has_ill_formed_child(
    expr: RelationExpr, sig: Signature, canon: Callable[[str], str]
) -> bool:
    if isinstance(expr, (RelDiff, RelAnd, RelOr)):
        kids: tuple[RelationExpr, ...] = (expr.left, expr.right)
    elif isinstance(expr, (Select, Project)):
        kids = (expr.rel,)
    else:
        kids = ()
    return any(_tau(k, sig, canon) is None for k in kids)


def _describe(expr: ConceptExpr | RelationExpr) -> str:
    # Deferred import: the printer lives with the parser.
    from .parser import format_expr

    return format_expr(expr)
