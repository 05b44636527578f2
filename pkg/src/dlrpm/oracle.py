"""Brute-force finite-model search over the labelled-tuple semantics.

This is the independent ground truth for the rest of the pipeline: concepts
evaluate to sets of domain elements, relations to sets of attribute-labelled
tuples, and `find_model` enumerates interpretations over small domains
directly from the definitions.  Search order is deterministic (domain size,
then relation extensions by total cardinality, then concept extensions, then
objectification tables), so the first model found is reproducible.

Objectification tables are instantiated lazily: the global table covers
exactly the tuples that some reification subexpression can produce, and each
local table covers the extension of its relation when local objectification
occurs.  Injectivity is enforced within each table by construction.  A
knowledge base that never objectifies needs no identifier elements at all,
which keeps countermodels small.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, permutations, product
from typing import Iterable, Iterator

from .model import (
    Bot,
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
    Select,
    Top,
    is_concept,
    iter_expr,
    map_attrs,
)
from .renaming import canonicalize, induce_partition
from .wellformed import validate


class OracleError(DlrError):
    pass


@dataclass(frozen=True, order=True)
class LabelledTuple:
    """Partial map from attributes to domain elements, stored sorted by attribute."""

    items: tuple[tuple[str, int], ...]

    @classmethod
    def make(cls, mapping: dict[str, int] | Iterable[tuple[str, int]]) -> "LabelledTuple":
        pairs = tuple(sorted(dict(mapping).items()))
        return cls(pairs)

    def __getitem__(self, attr: str) -> int:
        for a, v in self.items:
            if a == attr:
                return v
        raise KeyError(attr)

    @property
    def attrs(self) -> frozenset[str]:
        return frozenset(a for a, _ in self.items)

    def project(self, attrs: Iterable[str]) -> "LabelledTuple":
        keep = set(attrs)
        return LabelledTuple(tuple((a, v) for a, v in self.items if a in keep))

    def __len__(self) -> int:
        return len(self.items)

    def __str__(self) -> str:
        inside = ",".join(f"{a}:{v}" for a, v in self.items)
        return f"<{inside}>"


@dataclass
class Interpretation:
    """Finite labelled-tuple structure over domain {0..size-1}.

    `rho` renames attributes to class representatives; `iota` assigns global
    identifiers to the (non-singleton) tuples that reification evaluates, and
    `ell` holds one local identifier table per relation.
    """

    size: int
    concepts: dict[str, frozenset[int]] = field(default_factory=dict)
    relations: dict[str, frozenset[LabelledTuple]] = field(default_factory=dict)
    rho: dict[str, str] = field(default_factory=dict)
    iota: dict[LabelledTuple, int] = field(default_factory=dict)
    ell: dict[str, dict[LabelledTuple, int]] = field(default_factory=dict)

    def domain(self) -> range:
        return range(self.size)

    def rename(self, attr: str) -> str:
        return self.rho.get(attr, attr)

    def reify(self, t: LabelledTuple) -> int:
        """Global identifier of a tuple; singleton tuples stand for their value."""
        if len(t) == 1:
            return t.items[0][1]
        if t not in self.iota:
            raise OracleError(f"no global identifier assigned to {t}")
        return self.iota[t]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_concept(expr: ConceptExpr, kb: KnowledgeBase, i: Interpretation) -> frozenset[int]:
    if isinstance(expr, Top):
        return frozenset(i.domain())
    if isinstance(expr, Bot):
        return frozenset()
    if isinstance(expr, ConceptName):
        return i.concepts.get(expr.name, frozenset())
    if isinstance(expr, Not):
        return frozenset(i.domain()) - eval_concept(expr.arg, kb, i)
    if isinstance(expr, ConceptAnd):
        return eval_concept(expr.left, kb, i) & eval_concept(expr.right, kb, i)
    if isinstance(expr, ConceptOr):
        return eval_concept(expr.left, kb, i) | eval_concept(expr.right, kb, i)
    if isinstance(expr, ExistsAttr):
        base = eval_relation(expr.rel, kb, i)
        key = i.rename(expr.attr)
        counts = Counter(t[key] for t in base)
        if expr.cmp == ">=":
            return frozenset(d for d in i.domain() if counts.get(d, 0) >= expr.count)
        return frozenset(d for d in i.domain() if counts.get(d, 0) <= expr.count)
    if isinstance(expr, GlobalReify):
        return frozenset(i.reify(t) for t in eval_relation(expr.rel, kb, i))
    if isinstance(expr, LocalReify):
        table = i.ell.get(expr.relname, {})
        out = []
        for t in i.relations.get(expr.relname, frozenset()):
            if t not in table:
                raise OracleError(f"no local identifier for {t} in {expr.relname}")
            out.append(table[t])
        return frozenset(out)
    raise TypeError(f"not a concept expression: {expr!r}")


def eval_relation(
    expr: RelationExpr, kb: KnowledgeBase, i: Interpretation
) -> frozenset[LabelledTuple]:
    if isinstance(expr, RelationName):
        return i.relations.get(expr.name, frozenset())
    if isinstance(expr, RelDiff):
        return eval_relation(expr.left, kb, i) - eval_relation(expr.right, kb, i)
    if isinstance(expr, RelAnd):
        return eval_relation(expr.left, kb, i) & eval_relation(expr.right, kb, i)
    if isinstance(expr, RelOr):
        if _rho_tau(expr.left, kb, i) != _rho_tau(expr.right, kb, i):
            return frozenset()
        return eval_relation(expr.left, kb, i) | eval_relation(expr.right, kb, i)
    if isinstance(expr, Select):
        base = eval_relation(expr.rel, kb, i)
        allowed = eval_concept(expr.concept, kb, i)
        key = i.rename(expr.attr)
        return frozenset(t for t in base if t[key] in allowed)
    if isinstance(expr, Project):
        base = eval_relation(expr.rel, kb, i)
        keys = tuple(i.rename(a) for a in expr.attrs)
        counts = Counter(t.project(keys) for t in base)
        if expr.cmp == ">=":
            return frozenset(p for p, c in counts.items() if c >= expr.count)
        return frozenset(
            p for p in all_tuples(keys, i.size) if counts.get(p, 0) <= expr.count
        )
    raise TypeError(f"not a relation expression: {expr!r}")


def all_tuples(attrs: Iterable[str], size: int) -> list[LabelledTuple]:
    """Every labelled tuple over the given attributes and domain, in sorted order."""
    attrs = tuple(sorted(set(attrs)))
    return [
        LabelledTuple(tuple(zip(attrs, values)))
        for values in product(range(size), repeat=len(attrs))
    ]


def _rho_tau(rel: RelationExpr, kb: KnowledgeBase, i: Interpretation) -> frozenset[str] | None:
    from .wellformed import tau

    t = tau(rel, kb.signature, kb.renaming)
    if t is None:
        return None
    return frozenset(i.rename(a) for a in t)


# ---------------------------------------------------------------------------
# Model checking
# ---------------------------------------------------------------------------


def satisfies(kb: KnowledgeBase, i: Interpretation) -> bool:
    """Direct check of every axiom plus the structural side conditions."""
    part = induce_partition(kb.renaming, kb.signature)
    for u in kb.signature.attributes:
        image = i.rename(u)
        cls = part.class_of(u)
        if image not in cls:
            return False
        if any(i.rename(v) != image for v in cls):
            return False
    for rn, attrs in kb.signature.relations.items():
        want = frozenset(i.rename(a) for a in attrs)
        for t in i.relations.get(rn, frozenset()):
            if t.attrs != want:
                return False
            if any(not 0 <= v < i.size for _, v in t.items):
                return False
    values = list(i.iota.values())
    if len(set(values)) != len(values):
        return False
    for table in i.ell.values():
        vals = list(table.values())
        if len(set(vals)) != len(vals):
            return False
    for axiom in kb.tbox:
        if isinstance(axiom, ConceptIncl):
            if not eval_concept(axiom.lhs, kb, i) <= eval_concept(axiom.rhs, kb, i):
                return False
        else:
            if not eval_relation(axiom.lhs, kb, i) <= eval_relation(axiom.rhs, kb, i):
                return False
    return True


# ---------------------------------------------------------------------------
# Model search
# ---------------------------------------------------------------------------


def find_model(
    kb: KnowledgeBase,
    max_size: int,
    *,
    max_total_tuples: int = 4,
    require_nonempty: Expr | None = None,
) -> Interpretation | None:
    """First interpretation satisfying the knowledge base, or None.

    Domains are searched in increasing size, relation extensions in increasing
    total cardinality (capped by `max_total_tuples`).  `require_nonempty`
    additionally demands a non-empty extension for the given concept or
    relation expression, which turns the search into a satisfiability witness
    or countermodel finder.  Failure to find a model is not a proof that none
    exists: the language does not have the finite model property.
    """
    diags = validate(kb)
    if diags:
        raise OracleError(
            "knowledge base does not validate:\n" + "\n".join(f"  {d}" for d in diags)
        )
    part = induce_partition(kb.renaming, kb.signature)
    kbc = canonicalize(kb)
    rho = {a: part.canonical(a) for a in kb.signature.attributes}
    witness = map_attrs(require_nonempty, part.canonical) if require_nonempty is not None else None

    exprs: list[Expr] = []
    for axiom in kbc.tbox:
        exprs.extend((axiom.lhs, axiom.rhs))
    if witness is not None:
        exprs.append(witness)
    subs = [sub for e in exprs for sub in iter_expr(e)]

    concept_names = sorted({s.name for s in subs if isinstance(s, ConceptName)})
    rel_names = sorted(
        {s.name for s in subs if isinstance(s, RelationName)}
        | {s.relname for s in subs if isinstance(s, LocalReify)}
    )
    reified = [s.rel for s in subs if isinstance(s, GlobalReify)]
    localized = sorted({s.relname for s in subs if isinstance(s, LocalReify)})

    for size in range(1, max_size + 1):
        found = _search_size(
            kbc, size, rho, concept_names, rel_names, reified, localized,
            max_total_tuples, witness,
        )
        if found is not None:
            return found
    return None


def _search_size(
    kbc: KnowledgeBase,
    size: int,
    rho: dict[str, str],
    concept_names: list[str],
    rel_names: list[str],
    reified: list[RelationExpr],
    localized: list[str],
    max_total: int,
    witness: Expr | None,
) -> Interpretation | None:
    universes = {
        rn: all_tuples(kbc.signature.relations[rn], size) for rn in rel_names
    }
    caps = [len(universes[rn]) for rn in rel_names]
    limit = min(max_total, sum(caps))
    for total in range(0, limit + 1):
        for split in _compositions(total, caps):
            for extensions in _extension_combos(rel_names, universes, split):
                if not _contiguous(extensions):
                    continue
                for concepts in _concept_combos(concept_names, size):
                    base = Interpretation(
                        size=size, concepts=concepts, relations=extensions, rho=dict(rho)
                    )
                    for iota in _iota_tables(base, kbc, reified, size):
                        for ell in _ell_tables(base, localized, size):
                            cand = Interpretation(
                                size=size,
                                concepts=concepts,
                                relations=extensions,
                                rho=dict(rho),
                                iota=iota,
                                ell=ell,
                            )
                            if witness is not None and not _witness_holds(witness, kbc, cand):
                                continue
                            if _axioms_hold(kbc, cand):
                                return cand
    return None


def _axioms_hold(kbc: KnowledgeBase, i: Interpretation) -> bool:
    try:
        for axiom in kbc.tbox:
            if isinstance(axiom, ConceptIncl):
                if not eval_concept(axiom.lhs, kbc, i) <= eval_concept(axiom.rhs, kbc, i):
                    return False
            else:
                if not eval_relation(axiom.lhs, kbc, i) <= eval_relation(axiom.rhs, kbc, i):
                    return False
    except OracleError:
        return False
    return True


def _witness_holds(witness: Expr, kbc: KnowledgeBase, i: Interpretation) -> bool:
    try:
        if is_concept(witness):
            return bool(eval_concept(witness, kbc, i))
        return bool(eval_relation(witness, kbc, i))
    except OracleError:
        return False


def _compositions(total: int, caps: list[int]) -> Iterator[tuple[int, ...]]:
    """All ways to split `total` across slots with per-slot caps, lexicographically."""
    if not caps:
        if total == 0:
            yield ()
        return
    head_cap = min(caps[0], total)
    for head in range(head_cap + 1):
        for tail in _compositions(total - head, caps[1:]):
            yield (head,) + tail


def _extension_combos(
    rel_names: list[str],
    universes: dict[str, list[LabelledTuple]],
    split: tuple[int, ...],
) -> Iterator[dict[str, frozenset[LabelledTuple]]]:
    pools = [combinations(universes[rn], k) for rn, k in zip(rel_names, split)]
    for chosen in product(*pools):
        yield {rn: frozenset(ts) for rn, ts in zip(rel_names, chosen)}


def _contiguous(extensions: dict[str, frozenset[LabelledTuple]]) -> bool:
    # Symmetry breaking: elements used by tuples must form a prefix of the domain.
    used = {v for ts in extensions.values() for t in ts for _, v in t.items}
    return used == set(range(len(used)))


def _concept_combos(names: list[str], size: int) -> Iterator[dict[str, frozenset[int]]]:
    subsets = [frozenset(s) for k in range(size + 1) for s in combinations(range(size), k)]
    for chosen in product(subsets, repeat=len(names)):
        yield dict(zip(names, chosen))


def _iota_tables(
    base: Interpretation,
    kbc: KnowledgeBase,
    reified: list[RelationExpr],
    size: int,
) -> Iterator[dict[LabelledTuple, int]]:
    if not reified:
        yield {}
        return
    cands: set[LabelledTuple] = set()
    for rel in reified:
        cands.update(t for t in _upper(rel, base, size) if len(t) >= 2)
    ordered = sorted(cands)
    if len(ordered) > size:
        return
    for values in permutations(range(size), len(ordered)):
        yield dict(zip(ordered, values))


def _upper(rel: RelationExpr, i: Interpretation, size: int) -> frozenset[LabelledTuple]:
    """Superset of every tuple the expression can evaluate to."""
    if isinstance(rel, RelationName):
        return i.relations.get(rel.name, frozenset())
    if isinstance(rel, (RelDiff, RelAnd)):
        return _upper(rel.left, i, size)
    if isinstance(rel, RelOr):
        return _upper(rel.left, i, size) | _upper(rel.right, i, size)
    if isinstance(rel, Select):
        return _upper(rel.rel, i, size)
    if isinstance(rel, Project):
        keys = tuple(i.rename(a) for a in rel.attrs)
        if rel.cmp == ">=":
            return frozenset(t.project(keys) for t in _upper(rel.rel, i, size))
        return frozenset(all_tuples(keys, size))
    raise TypeError(f"not a relation expression: {rel!r}")


def _ell_tables(
    base: Interpretation, localized: list[str], size: int
) -> Iterator[dict[str, dict[LabelledTuple, int]]]:
    if not localized:
        yield {}
        return
    per_rel: list[list[dict[LabelledTuple, int]]] = []
    for rn in localized:
        ext = sorted(base.relations.get(rn, frozenset()))
        if len(ext) > size:
            return
        per_rel.append([dict(zip(ext, values)) for values in permutations(range(size), len(ext))])
    for chosen in product(*per_rel):
        yield dict(zip(localized, chosen))


# ---------------------------------------------------------------------------
# Presentation
# ---------------------------------------------------------------------------


def format_model(i: Interpretation) -> str:
    lines = [f"domain size: {i.size}"]
    for name in sorted(i.concepts):
        inside = ", ".join(str(d) for d in sorted(i.concepts[name]))
        lines.append(f"concept {name} = {{{inside}}}")
    for name in sorted(i.relations):
        inside = ", ".join(str(t) for t in sorted(i.relations[name]))
        lines.append(f"relation {name} = {{{inside}}}")
    renamed = sorted((a, b) for a, b in i.rho.items() if a != b)
    for a, b in renamed:
        lines.append(f"rho: {a} -> {b}")
    for t in sorted(i.iota):
        lines.append(f"iota: {t} -> {i.iota[t]}")
    for rn in sorted(i.ell):
        for t in sorted(i.ell[rn]):
            lines.append(f"ell[{rn}]: {t} -> {i.ell[rn][t]}")
    return "\n".join(lines) + "\n"
