"""Compilation of a knowledge base into an ALCQI TBox by reifying projections.

Every node of the projection signature is reified: a relation contributes one
concept name per node its signature dominates, and every non-root node gets a
functional role linking a reified tuple to its immediate sub-projection.  The
generated TBox has four parts:

  * disjointness axioms between reifications of different non-singleton nodes,
  * reification axioms walking each relation's dominated subtree,
  * four axioms per relation tying global and local objectification together,
  * the translated TBox axioms themselves.

Cardinalities above 1 compile to qualified number restrictions over a single
role, which the fragment gate guarantees; cardinality-1 constraints over
longer paths expand to nested restrictions along the role chain.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import alcqi
from .model import (
    Bot,
    ConceptAnd,
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
    RelOr,
    RelationExpr,
    RelationName,
    Select,
    Top,
    map_attrs,
)
from .projection import (
    FragmentError,
    Node,
    ProjectionSignature,
    build,
    fmt_node,
    is_dlr_pm,
    path,
)
from .renaming import canonicalize, induce_partition
from .wellformed import tau, validate


class TranslationError(DlrError):
    pass


def _node_suffix(node: Node) -> str:
    return "{" + ",".join(sorted(node)) + "}"


@dataclass(frozen=True)
class NameTable:
    """Generated ALCQI names for a projection signature.

    The reification concept of a relation at its own signature node is the
    relation concept itself; roles exist only for non-root nodes.
    """

    sig_nodes: dict[str, Node]
    dominated: dict[str, frozenset[Node]]
    non_roots: frozenset[Node]

    def rel_concept(self, rn: str) -> str:
        return f"A_{rn}"

    def node_concept(self, rn: str, node: Node) -> str:
        if node == self.sig_nodes[rn]:
            return self.rel_concept(rn)
        if node not in self.dominated[rn]:
            raise TranslationError(
                f"no reification of {rn} at {fmt_node(node)}: node not dominated"
            )
        return f"A_{rn}^{_node_suffix(node)}"

    def local_concept(self, rn: str) -> str:
        return f"A_{rn}^l"

    def local_role(self, rn: str) -> str:
        return f"Q_{rn}"

    def node_role(self, node: Node) -> str:
        if node not in self.non_roots:
            raise TranslationError(f"no role for root node {fmt_node(node)}")
        return f"Q_{_node_suffix(node)}"

    def attr_role(self, attr: str) -> str:
        return self.node_role(frozenset({attr}))

    def inventory(self) -> dict[Node, tuple[str, ...]]:
        """Reification concept labels per node, sorted; mirrors the generated signature."""
        out: dict[Node, list[str]] = {}
        for rn in sorted(self.dominated):
            for node in self.dominated[rn]:
                out.setdefault(node, []).append(self.node_concept(rn, node))
        return {node: tuple(sorted(labels)) for node, labels in out.items()}


def make_name_table(kb_canonical: KnowledgeBase, ps: ProjectionSignature) -> NameTable:
    sig = kb_canonical.signature
    sig_nodes = {rn: frozenset(attrs) for rn, attrs in sig.relations.items()}
    dominated = {rn: ps.dominated(node) for rn, node in sig_nodes.items()}
    non_roots = frozenset(n for n in ps.nodes if ps.parents[n])
    reserved = {f"A_{rn}" for rn in sig.relations} | {f"Q_{rn}" for rn in sig.relations}
    clash = reserved & (sig.concepts | set(sig.relations))
    if clash:
        raise TranslationError(f"declared names collide with generated ones: {sorted(clash)}")
    return NameTable(sig_nodes, dominated, non_roots)


def map_path(
    ps: ProjectionSignature, frm: Node, to: Node, nt: NameTable
) -> tuple[alcqi.Role, ...] | None:
    """Role chain along the unique path, one role per node strictly below `frm`.

    None when the path is empty (containment or no connection).
    """
    p = path(ps, frm, to)
    if not p:
        return None
    return tuple(alcqi.Role(nt.node_role(n)) for n in p.steps[1:])


class Translation:
    """One compiled knowledge base: fragment-checked, with query translation support.

    `extra_exprs` contribute their projection nodes to the graph so that
    reasoning tasks can translate query expressions over the same name table.
    Raises FragmentError when the (extended) knowledge base leaves the
    decidable fragment, and TranslationError on malformed input.
    """

    def __init__(self, kb: KnowledgeBase, extra_exprs: tuple[Expr, ...] = ()):
        diags = validate(kb)
        if diags:
            raise TranslationError(
                "knowledge base does not validate:\n" + "\n".join(f"  {d}" for d in diags)
            )
        report = is_dlr_pm(kb, extra_exprs)
        if not report.ok:
            raise FragmentError(report)
        self.kb = kb
        self.canon = induce_partition(kb.renaming, kb.signature).canonical
        self.kbc = canonicalize(kb)
        self.extra = tuple(map_attrs(e, self.canon) for e in extra_exprs)
        self.ps = build(self.kbc, self.extra)
        self.names = make_name_table(self.kbc, self.ps)
        self._tbox: alcqi.TBox | None = None
        self._counts: dict[str, int] = {}

    # -- expression mapping -------------------------------------------------

    def dagger(self, expr: Expr) -> alcqi.Concept:
        """Translate a concept or relation expression over the original attributes."""
        return self._dagger(map_attrs(expr, self.canon))

    def _tau(self, rel: RelationExpr) -> Node:
        t = tau(rel, self.kbc.signature)
        if t is None:
            raise TranslationError("cannot translate an ill-formed relation expression")
        return t

    def _dagger(self, expr: Expr) -> alcqi.Concept:
        if isinstance(expr, Top):
            return alcqi.Top()
        if isinstance(expr, Bot):
            return alcqi.Bot()
        if isinstance(expr, ConceptName):
            return alcqi.Name(expr.name)
        if isinstance(expr, Not):
            return alcqi.Not(self._dagger(expr.arg))
        if isinstance(expr, (ConceptAnd, RelAnd)):
            return alcqi.And(self._dagger(expr.left), self._dagger(expr.right))
        if isinstance(expr, (ConceptOr, RelOr)):
            return alcqi.Or(self._dagger(expr.left), self._dagger(expr.right))
        if isinstance(expr, RelDiff):
            return alcqi.And(self._dagger(expr.left), alcqi.Not(self._dagger(expr.right)))
        if isinstance(expr, GlobalReify):
            return self._dagger(expr.rel)
        if isinstance(expr, LocalReify):
            return alcqi.Name(self.names.local_concept(expr.relname))
        if isinstance(expr, RelationName):
            return alcqi.Name(self.names.rel_concept(expr.name))
        if isinstance(expr, Select):
            chain = map_path(self.ps, self._tau(expr.rel), frozenset({expr.attr}), self.names)
            if chain is None:
                return alcqi.Bot()
            return alcqi.And(
                self._dagger(expr.rel),
                alcqi.chain_forall(chain, self._dagger(expr.concept)),
            )
        if isinstance(expr, (ExistsAttr, Project)):
            target = (
                frozenset({expr.attr}) if isinstance(expr, ExistsAttr) else frozenset(expr.attrs)
            )
            chain = map_path(self.ps, self._tau(expr.rel), target, self.names)
            if chain is None:
                return alcqi.Bot()
            inv = alcqi.inverse_chain(chain)
            body = self._dagger(expr.rel)
            if expr.count == 1:
                return alcqi.chain_exists(expr.cmp, inv, body)
            if len(inv) != 1:
                raise TranslationError(
                    "cardinality above 1 over a multi-edge path; the fragment gate "
                    "should have rejected this knowledge base"
                )
            cls = alcqi.AtLeast if expr.cmp == ">=" else alcqi.AtMost
            return cls(expr.count, inv[0], body)
        raise TypeError(f"unknown expression {expr!r}")

    # -- TBox assembly ------------------------------------------------------

    @property
    def tbox(self) -> alcqi.TBox:
        if self._tbox is None:
            self._build_tbox()
        return self._tbox

    @property
    def counts(self) -> dict[str, int]:
        """Axiom counts per component after deduplication."""
        if self._tbox is None:
            self._build_tbox()
        return dict(self._counts)

    def _build_tbox(self) -> None:
        nt = self.names
        ps = self.ps
        sig = self.kbc.signature
        rel_names = sorted(sig.relations)
        seen: set[alcqi.Gci] = set()
        axioms: list[alcqi.Gci] = []
        counts = {"dsj": 0, "rel": 0, "lobj": 0, "axioms": 0}

        def emit(part: str, lhs: alcqi.Concept, rhs: alcqi.Concept) -> None:
            gci = (lhs, rhs)
            if gci not in seen:
                seen.add(gci)
                axioms.append(gci)
                counts[part] += 1

        def big(rn: str) -> list[Node]:
            return [n for n in _node_order(nt.dominated[rn]) if len(n) >= 2]

        for rn1 in rel_names:
            for rn2 in rel_names:
                for n1 in big(rn1):
                    for n2 in big(rn2):
                        if n1 != n2:
                            emit(
                                "dsj",
                                alcqi.Name(nt.node_concept(rn1, n1)),
                                alcqi.Not(alcqi.Name(nt.node_concept(rn2, n2))),
                            )

        for rn in rel_names:
            for node in _node_order(nt.dominated[rn]):
                for child in ps.children[node]:
                    role = alcqi.Role(nt.node_role(child))
                    emit(
                        "rel",
                        alcqi.Name(nt.node_concept(rn, node)),
                        alcqi.Exists(role, alcqi.Name(nt.node_concept(rn, child))),
                    )
                    emit("rel", alcqi.AtLeast(2, role, alcqi.Top()), alcqi.Bot())

        for rn in rel_names:
            q = alcqi.Role(nt.local_role(rn))
            a = alcqi.Name(nt.rel_concept(rn))
            al = alcqi.Name(nt.local_concept(rn))
            emit("lobj", a, alcqi.Exists(q, al))
            emit("lobj", alcqi.AtLeast(2, q, alcqi.Top()), alcqi.Bot())
            emit("lobj", al, alcqi.Exists(q.inverse(), a))
            emit("lobj", alcqi.AtLeast(2, q.inverse(), alcqi.Top()), alcqi.Bot())

        for axiom in self.kbc.tbox:
            emit("axioms", self._dagger(axiom.lhs), self._dagger(axiom.rhs))

        concept_names = set(sig.concepts)
        for rn in rel_names:
            concept_names.add(nt.rel_concept(rn))
            concept_names.add(nt.local_concept(rn))
            concept_names.update(nt.node_concept(rn, n) for n in nt.dominated[rn])
        role_names = {nt.local_role(rn) for rn in rel_names}
        role_names.update(nt.node_role(n) for n in nt.non_roots)

        self._counts = counts
        self._tbox = alcqi.TBox(
            tuple(axioms), frozenset(concept_names), frozenset(role_names)
        )


def _node_order(nodes: frozenset[Node]) -> list[Node]:
    return sorted(nodes, key=lambda n: (len(n), tuple(sorted(n))))


def gamma(kb: KnowledgeBase) -> alcqi.TBox:
    """The compiled ALCQI TBox of a knowledge base."""
    return Translation(kb).tbox


def gamma_counts(kb: KnowledgeBase) -> dict[str, int]:
    return Translation(kb).counts


def gamma_size(kb: KnowledgeBase) -> int:
    return len(gamma(kb).axioms)
