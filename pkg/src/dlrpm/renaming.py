"""Attribute renaming: equivalence classes, well-foundedness, canonical rewriting.

A renaming schema induces an equivalence relation over the attribute set.
Rewriting every attribute to the representative of its class removes the
schema from play; the representative is the lexicographically least member
so the rewrite is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import DlrError, KnowledgeBase, RenamingSchema, Signature, map_axiom_attrs


@dataclass(frozen=True)
class AttributePartition:
    """Partition of the attribute set with a canonical representative per class."""

    classes: tuple[frozenset[str], ...]
    canon: dict[str, str]

    def class_of(self, attr: str) -> frozenset[str]:
        for cls in self.classes:
            if attr in cls:
                return cls
        return frozenset({attr})

    def canonical(self, attr: str) -> str:
        return self.canon.get(attr, attr)


@dataclass(frozen=True)
class WellFoundedViolation:
    """An equivalence class that hits one relation signature twice."""

    attrs: frozenset[str]
    relation: str

    def __str__(self) -> str:
        inside = ",".join(sorted(self.attrs))
        return f"attributes {{{inside}}} are identified but both label relation {self.relation}"


def induce_partition(ren: RenamingSchema, sig: Signature) -> AttributePartition:
    """Smallest equivalence relation over the declared attributes containing all pairs."""
    parent: dict[str, str] = {a: a for a in sig.attributes}
    for a, b in ren.pairs:
        parent.setdefault(a, a)
        parent.setdefault(b, b)

    def find(x: str) -> str:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for a, b in ren.pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    groups: dict[str, set[str]] = {}
    for a in parent:
        groups.setdefault(find(a), set()).add(a)
    classes = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    canon = {a: min(cls) for cls in classes for a in cls}
    return AttributePartition(classes, canon)


def check_well_founded(part: AttributePartition, sig: Signature) -> WellFoundedViolation | None:
    """None when no class contains two attributes of one relation signature."""
    for rn in sorted(sig.relations):
        seen: dict[str, str] = {}
        for attr in sig.relations[rn]:
            rep = part.canonical(attr)
            if rep in seen:
                return WellFoundedViolation(part.class_of(attr), rn)
            seen[rep] = attr
    return None


def canonicalize(kb: KnowledgeBase) -> KnowledgeBase:
    """Rewrite every attribute occurrence to its class representative.

    The result carries an empty renaming schema; relation signatures keep their
    attribute order with each position substituted.  Requires a well-founded
    schema, otherwise a signature would collapse onto fewer attributes.
    """
    part = induce_partition(kb.renaming, kb.signature)
    violation = check_well_founded(part, kb.signature)
    if violation is not None:
        raise DlrError(f"cannot canonicalize: {violation}")
    sig = kb.signature
    new_sig = Signature(
        concepts=sig.concepts,
        relations={rn: tuple(part.canonical(a) for a in attrs) for rn, attrs in sig.relations.items()},
        attributes=frozenset(part.canonical(a) for a in sig.attributes),
    )
    new_tbox = tuple(map_axiom_attrs(ax, part.canonical) for ax in kb.tbox)
    return KnowledgeBase(signature=new_sig, tbox=new_tbox, renaming=RenamingSchema())
