"""Seeded random knowledge-base generator for corpus-style tests.

Drawn shapes stay desk-scale on purpose: up to two relations of arity 2-3
over a small shared attribute pool, up to two concept names, and a handful
of axioms drawn from templates (inclusions, keys, functional-dependency
style projections, selections, objectification).  Generated bases are
filtered through validation and the fragment gate, so every returned base
is ready for the full pipeline.
"""

from __future__ import annotations

import random

from dlrpm.model import (
    Axiom,
    Bot,
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
    RenamingGroup,
    RenamingSchema,
    Select,
    Signature,
    Top,
)
from dlrpm.projection import is_dlr_pm
from dlrpm.wellformed import validate


def random_kb(seed: int) -> KnowledgeBase:
    """A valid, fragment-accepted knowledge base derived from the seed."""
    rng = random.Random(seed)
    for _ in range(200):
        kb = _draw(rng)
        if not validate(kb) and is_dlr_pm(kb).ok:
            return kb
    raise AssertionError(f"no valid knowledge base after 200 draws (seed {seed})")


def _draw(rng: random.Random) -> KnowledgeBase:
    n_rel = rng.choice((1, 1, 2))
    pool = ["a", "b", "c", "d", "e"]
    relations: dict[str, tuple[str, ...]] = {}
    for idx in range(n_rel):
        arity = rng.choice((2, 2, 3))
        attrs = rng.sample(pool, arity)
        relations[f"R{idx}"] = tuple(attrs)
    concepts = tuple(f"C{i}" for i in range(rng.choice((0, 1, 2, 2))))
    sig = Signature.build(concepts, relations)

    renaming = RenamingSchema()
    if rng.random() < 0.25:
        # Rename one relation onto fresh attribute names, positionally.
        rn = rng.choice(sorted(relations))
        attrs = relations[rn]
        fresh = tuple(f"{a}{rn.lower()}" for a in attrs)
        relations = dict(relations)
        relations[rn] = fresh
        sig = Signature.build(concepts, relations)
        renaming = RenamingSchema((RenamingGroup(fresh, attrs),))
        sig = Signature(sig.concepts, sig.relations, sig.attributes | frozenset(attrs))

    axioms: list[Axiom] = []
    for _ in range(rng.randint(1, 4)):
        axioms.append(_draw_axiom(rng, sig))
    return KnowledgeBase(sig, tuple(axioms), renaming)


def _draw_axiom(rng: random.Random, sig: Signature) -> Axiom:
    kind = rng.random()
    rels = sorted(sig.relations)
    if kind < 0.25 and len(rels) >= 1:
        lhs = _draw_relation(rng, sig)
        rhs = _draw_relation(rng, sig)
        return RelIncl(lhs, rhs)
    return ConceptIncl(_draw_concept(rng, sig, 2), _draw_concept(rng, sig, 2))


def _draw_relation(rng: random.Random, sig: Signature) -> RelationExpr:
    rn = rng.choice(sorted(sig.relations))
    base: RelationExpr = RelationName(rn)
    attrs = sig.relations[rn]
    roll = rng.random()
    if roll < 0.3 and len(attrs) > 2:
        k = rng.randint(2, len(attrs) - 1)
        chosen = tuple(rng.sample(attrs, k))
        cmp = ">=" if rng.random() < 0.8 else "<="
        return Project(cmp, 1, chosen, base)
    if roll < 0.45 and sig.concepts:
        attr = rng.choice(attrs)
        return Select(attr, _draw_concept(rng, sig, 1), base)
    if roll < 0.55:
        other = RelationName(rng.choice(sorted(sig.relations)))
        op = rng.choice((RelAnd, RelOr, RelDiff))
        return op(base, other)
    return base


def _draw_concept(rng: random.Random, sig: Signature, depth: int) -> ConceptExpr:
    roll = rng.random()
    if depth <= 0 or roll < 0.25:
        if sig.concepts and rng.random() < 0.7:
            return ConceptName(rng.choice(sorted(sig.concepts)))
        return Top() if rng.random() < 0.5 else Bot()
    if roll < 0.45:
        rn = rng.choice(sorted(sig.relations))
        attr = rng.choice(sig.relations[rn])
        cmp = ">=" if rng.random() < 0.7 else "<="
        count = rng.choice((1, 1, 1, 2))
        return ExistsAttr(cmp, count, attr, RelationName(rn))
    if roll < 0.55:
        return GlobalReify(_draw_relation(rng, sig))
    if roll < 0.62:
        return LocalReify(rng.choice(sorted(sig.relations)))
    if roll < 0.72:
        return Not(_draw_concept(rng, sig, depth - 1))
    op = ConceptAnd if rng.random() < 0.5 else ConceptOr
    return op(_draw_concept(rng, sig, depth - 1), _draw_concept(rng, sig, depth - 1))


def corpus(count: int, *, start_seed: int = 0) -> list[KnowledgeBase]:
    return [random_kb(seed) for seed in range(start_seed, start_seed + count)]
