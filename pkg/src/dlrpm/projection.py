"""Projection signature: the containment graph of attribute sets and its checks.

The node set collects every relation signature, one singleton per attribute,
and the attribute set of every relation-level projection written anywhere in
the TBox.  Edges are the covering relation of strict containment, so path
lengths count immediate-containment steps.  The decidable fragment accepted
downstream requires the graph to be a multitree (the nodes reachable from any
node form a tree) and restricts cardinalities above 1 to projections one edge
away from their operand signature.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ExistsAttr,
    Expr,
    KnowledgeBase,
    Project,
    SourceSpan,
    iter_expr,
    iter_kb_exprs,
    map_attrs,
)
from .renaming import canonicalize, induce_partition
from .wellformed import Diagnostic, tau, validate

Node = frozenset[str]


class FragmentError(Exception):
    """A knowledge base (or query extension) falls outside the decidable fragment."""

    def __init__(self, report: "DlrPmReport"):
        super().__init__(report.summary())
        self.report = report


def fmt_node(node: Node) -> str:
    return "{" + ",".join(sorted(node)) + "}"


@dataclass(frozen=True)
class ProjectionSignature:
    nodes: frozenset[Node]
    children: dict[Node, tuple[Node, ...]]
    parents: dict[Node, tuple[Node, ...]]

    @property
    def roots(self) -> tuple[Node, ...]:
        return tuple(n for n in _sorted_nodes(self.nodes) if not self.parents[n])

    def edges(self) -> tuple[tuple[Node, Node], ...]:
        return tuple(
            (parent, child)
            for parent in _sorted_nodes(self.nodes)
            for child in self.children[parent]
        )

    def descendants(self, node: Node) -> frozenset[Node]:
        """All nodes strictly below `node` along covering edges."""
        seen: set[Node] = set()
        stack = list(self.children[node])
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(self.children[cur])
        return frozenset(seen)

    def dominated(self, node: Node) -> frozenset[Node]:
        """`node` together with everything reachable from it."""
        return self.descendants(node) | {node}


@dataclass(frozen=True)
class PathResult:
    """Covering-edge path between two nodes, endpoints included; empty if none."""

    steps: tuple[Node, ...]

    def __bool__(self) -> bool:
        return bool(self.steps)

    @property
    def length(self) -> int:
        return max(len(self.steps) - 1, 0)


EMPTY_PATH = PathResult(())


@dataclass(frozen=True)
class MultitreeViolation:
    """Two distinct covering-edge paths from `top` down to `bottom`."""

    top: Node
    bottom: Node
    path_a: tuple[Node, ...]
    path_b: tuple[Node, ...]

    def __str__(self) -> str:
        a = " > ".join(fmt_node(n) for n in self.path_a)
        b = " > ".join(fmt_node(n) for n in self.path_b)
        return (
            f"node {fmt_node(self.top)} reaches {fmt_node(self.bottom)} along "
            f"two paths: {a} and {b}"
        )


@dataclass(frozen=True)
class CardinalityOffender:
    """A projection with cardinality above 1 whose path is not a single edge."""

    axiom_index: int
    expr: ExistsAttr | Project
    path_length: int
    span: SourceSpan | None

    def __str__(self) -> str:
        from .parser import format_expr

        return (
            f"axiom {self.axiom_index}: cardinality {self.expr.count} needs a path of "
            f"length 1, found {self.path_length}: {format_expr(self.expr)}"
        )


@dataclass(frozen=True)
class DlrPmReport:
    validation: tuple[Diagnostic, ...]
    multitree: MultitreeViolation | None
    cardinality: tuple[CardinalityOffender, ...]

    @property
    def ok(self) -> bool:
        return not self.validation and self.multitree is None and not self.cardinality

    def summary(self) -> str:
        if self.ok:
            return "DLR±: ok (multitree, cardinality paths ok)"
        lines = ["DLR±: rejected"]
        lines.extend(f"  {d}" for d in self.validation)
        if self.multitree is not None:
            lines.append(f"  not a multitree: {self.multitree}")
        lines.extend(f"  {o}" for o in self.cardinality)
        return "\n".join(lines)


def _sorted_nodes(nodes: frozenset[Node]) -> list[Node]:
    return sorted(nodes, key=lambda n: (len(n), tuple(sorted(n))))


def build(kb: KnowledgeBase, extra_exprs: tuple[Expr, ...] = ()) -> ProjectionSignature:
    """Projection signature of a canonicalized knowledge base.

    `extra_exprs` lets reasoning tasks contribute the projection nodes of a
    query expression without touching the TBox.
    """
    if kb.renaming:
        raise ValueError("build expects a canonicalized knowledge base")
    sig = kb.signature
    nodes: set[Node] = {frozenset(attrs) for attrs in sig.relations.values()}
    nodes.update(frozenset({a}) for a in sig.attributes)
    exprs = [sub for _, sub in iter_kb_exprs(kb)]
    for extra in extra_exprs:
        exprs.extend(iter_expr(extra))
    for sub in exprs:
        if isinstance(sub, Project):
            nodes.add(frozenset(sub.attrs))

    children: dict[Node, list[Node]] = {n: [] for n in nodes}
    parents: dict[Node, list[Node]] = {n: [] for n in nodes}
    ordered = _sorted_nodes(frozenset(nodes))
    for child in ordered:
        for parent in ordered:
            if child < parent and not any(
                child < mid < parent for mid in ordered
            ):
                children[parent].append(child)
                parents[child].append(parent)
    return ProjectionSignature(
        nodes=frozenset(nodes),
        children={n: tuple(_sorted_nodes(frozenset(children[n]))) for n in nodes},
        parents={n: tuple(_sorted_nodes(frozenset(parents[n]))) for n in nodes},
    )


def is_multitree(ps: ProjectionSignature) -> MultitreeViolation | None:
    """None when the descendants of every node form a tree, else a witness diamond."""
    for top in _sorted_nodes(ps.nodes):
        reach = ps.dominated(top)
        for below in _sorted_nodes(ps.descendants(top)):
            ins = [p for p in ps.parents[below] if p in reach]
            if len(ins) > 1:
                path_a = _first_path(ps, top, ins[0]) + (below,)
                path_b = _first_path(ps, top, ins[1]) + (below,)
                return MultitreeViolation(top, below, path_a, path_b)
    return None


def _first_path(ps: ProjectionSignature, frm: Node, to: Node) -> tuple[Node, ...]:
    """Some covering-edge path from `frm` to `to` (DFS order), endpoints included."""
    if frm == to:
        return (frm,)
    for child in ps.children[frm]:
        if child == to or to < child:
            tail = _first_path(ps, child, to)
            if tail:
                return (frm,) + tail
    return ()


def path(ps: ProjectionSignature, frm: Node, to: Node) -> PathResult:
    """The unique covering-edge path from `frm` down to `to`.

    Empty when `frm` is contained in `to` or no path exists.  Uniqueness holds
    under the multitree condition; callers check it first.
    """
    frm = frozenset(frm)
    to = frozenset(to)
    if frm <= to or frm not in ps.nodes or to not in ps.nodes:
        return EMPTY_PATH
    return PathResult(_first_path(ps, frm, to))


def all_paths(ps: ProjectionSignature, frm: Node, to: Node) -> list[tuple[Node, ...]]:
    """Every covering-edge path between two nodes; for uniqueness cross-checks."""
    frm = frozenset(frm)
    to = frozenset(to)
    if frm == to:
        return [(frm,)]
    out: list[tuple[Node, ...]] = []
    for child in ps.children.get(frm, ()):
        if child == to or to < child:
            out.extend((frm,) + tail for tail in all_paths(ps, child, to))
    return out


def check_cardinality_restriction(
    kb: KnowledgeBase, ps: ProjectionSignature
) -> tuple[CardinalityOffender, ...]:
    """Projections with cardinality above 1 whose covering path is longer than one edge."""
    if kb.renaming:
        raise ValueError("expected a canonicalized knowledge base")
    offenders: list[CardinalityOffender] = []
    for i, sub in iter_kb_exprs(kb):
        off = _cardinality_offender(kb, ps, i, sub)
        if off is not None:
            offenders.append(off)
    return tuple(offenders)


def _cardinality_offender(
    kb: KnowledgeBase, ps: ProjectionSignature, index: int, sub: Expr
) -> CardinalityOffender | None:
    if not isinstance(sub, (ExistsAttr, Project)) or sub.count <= 1:
        return None
    source = tau(sub.rel, kb.signature)
    if source is None:
        return None
    target = frozenset({sub.attr}) if isinstance(sub, ExistsAttr) else frozenset(sub.attrs)
    length = path(ps, source, target).length
    if length != 1:
        return CardinalityOffender(index, sub, length, sub.span)
    return None


def is_dlr_pm(kb: KnowledgeBase, extra_exprs: tuple[Expr, ...] = ()) -> DlrPmReport:
    """Full fragment gate: validation, multitree condition, cardinality paths."""
    diags = validate(kb)
    if diags:
        return DlrPmReport(tuple(diags), None, ())
    kbc = canonicalize(kb)
    canon = induce_partition(kb.renaming, kb.signature).canonical
    extras = tuple(map_attrs(e, canon) for e in extra_exprs)
    ps = build(kbc, extras)
    violation = is_multitree(ps)
    if violation is not None:
        return DlrPmReport((), violation, ())
    offenders = check_cardinality_restriction(kbc, ps)
    extra_offenders: list[CardinalityOffender] = []
    for e in extras:
        for sub in iter_expr(e):
            off = _cardinality_offender(kbc, ps, -1, sub)
            if off is not None:
                extra_offenders.append(off)
    return DlrPmReport((), None, offenders + tuple(extra_offenders))


def format_graph(ps: ProjectionSignature) -> str:
    """Sorted adjacency text of the graph, for golden comparisons."""
    lines = ["nodes:"]
    lines.extend(f"  {fmt_node(n)}" for n in _sorted_nodes(ps.nodes))
    lines.append("edges:")
    edge_lines = sorted(
        f"  {fmt_node(p)} -> {fmt_node(c)}"
        for p in ps.nodes
        for c in ps.children[p]
    )
    lines.extend(edge_lines)
    return "\n".join(lines) + "\n"
