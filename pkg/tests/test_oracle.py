from __future__ import annotations

import random

import pytest

from dlrpm.model import KnowledgeBase, Signature
from dlrpm.oracle import (
    Interpretation,
    LabelledTuple,
    OracleError,
    all_tuples,
    eval_concept,
    eval_relation,
    find_model,
    format_model,
    satisfies,
)
from dlrpm.parser import parse, parse_concept, parse_relation
from dlrpm.renaming import induce_partition


def lt(**kwargs: int) -> LabelledTuple:
    return LabelledTuple.make(kwargs)


@pytest.fixture()
def simple_kb() -> KnowledgeBase:
    return parse(
        "signature:\n  concept C\n  relation R(a, b)\n  relation S(a, b, c)\n"
    )


def interp_of(kb: KnowledgeBase, size: int, **extensions) -> Interpretation:
    rho = {a: a for a in kb.signature.attributes}
    concepts = {k: frozenset(v) for k, v in extensions.pop("concepts", {}).items()}
    relations = {k: frozenset(v) for k, v in extensions.pop("relations", {}).items()}
    return Interpretation(
        size=size, concepts=concepts, relations=relations, rho=rho, **extensions
    )


def test_top_bottom(simple_kb):
    i = interp_of(simple_kb, 3)
    assert eval_concept(parse_concept("top", simple_kb.signature), simple_kb, i) == frozenset({0, 1, 2})
    assert eval_concept(parse_concept("bot", simple_kb.signature), simple_kb, i) == frozenset()


def test_attribute_counting(simple_kb):
    i = interp_of(
        simple_kb, 4, relations={"R": {lt(a=1, b=2), lt(a=1, b=3)}}
    )
    expr = parse_concept("exists>=2[a] R", simple_kb.signature)
    assert eval_concept(expr, simple_kb, i) == frozenset({1})
    at_most_zero = parse_concept("exists<=1[a] R", simple_kb.signature)
    # Elements with zero matching tuples satisfy any at-most bound.
    assert eval_concept(at_most_zero, simple_kb, i) == frozenset({0, 2, 3})


def test_global_reification_counts_tuples(simple_kb):
    tuples = {lt(a=0, b=1), lt(a=1, b=0), lt(a=1, b=1)}
    iota = {t: k for k, t in enumerate(sorted(tuples))}
    i = interp_of(simple_kb, 3, relations={"R": tuples}, iota=iota)
    out = eval_concept(parse_concept("reify(R)", simple_kb.signature), simple_kb, i)
    assert len(out) == len(tuples)


def test_reify_requires_identifier(simple_kb):
    i = interp_of(simple_kb, 2, relations={"R": {lt(a=0, b=1)}})
    with pytest.raises(OracleError):
        eval_concept(parse_concept("reify(R)", simple_kb.signature), simple_kb, i)


def test_local_reification(simple_kb):
    tuples = {lt(a=0, b=1)}
    i = interp_of(
        simple_kb, 2, relations={"R": tuples}, ell={"R": {lt(a=0, b=1): 0}}
    )
    out = eval_concept(parse_concept("lreify(R)", simple_kb.signature), simple_kb, i)
    assert out == frozenset({0})


def test_difference_with_itself_is_empty(simple_kb):
    i = interp_of(simple_kb, 2, relations={"R": {lt(a=0, b=1)}})
    expr = parse_relation("R \\ R", simple_kb.signature)
    assert eval_relation(expr, simple_kb, i) == frozenset()


def test_selection_filters_by_concept(simple_kb):
    i = interp_of(
        simple_kb, 3,
        concepts={"C": {1}},
        relations={"R": {lt(a=0, b=1), lt(a=0, b=2)}},
    )
    expr = parse_relation("sigma[b: C] R", simple_kb.signature)
    assert eval_relation(expr, simple_kb, i) == frozenset({lt(a=0, b=1)})


def test_projection_merges_matching_tuples(simple_kb):
    i = interp_of(
        simple_kb, 3,
        relations={"S": {lt(a=0, b=1, c=0), lt(a=0, b=1, c=2)}},
    )
    expr = parse_relation("exists[a,b] S", simple_kb.signature)
    assert eval_relation(expr, simple_kb, i) == frozenset({lt(a=0, b=1)})
    at_most = parse_relation("exists<=1[a,b] S", simple_kb.signature)
    # All nine pairs have at most one matching triple except <a:0,b:1>.
    assert len(eval_relation(at_most, simple_kb, i)) == 8


def test_projection_count_duality(simple_kb):
    rng = random.Random(7)
    for _ in range(30):
        size = rng.randint(1, 3)
        tuples = {
            t for t in all_tuples(("a", "b"), size) if rng.random() < 0.4
        }
        i = interp_of(simple_kb, size, relations={"R": tuples})
        for q in (1, 2):
            le = parse_concept(f"exists<={q}[a] R", simple_kb.signature)
            ge = parse_concept(f"exists>={q + 1}[a] R", simple_kb.signature)
            le_ext = eval_concept(le, simple_kb, i)
            ge_ext = eval_concept(ge, simple_kb, i)
            for d in range(size):
                assert (d in le_ext) == (d not in ge_ext)


def test_eval_monotone_for_negation_free(simple_kb):
    rng = random.Random(9)
    concept_texts = ["exists>=1[a] R", "exists>=2[b] R", "exists>=1[c] S"]
    relation_texts = [
        "exists[a,b] S",
        "sigma[a: C] R",
        "R and R",
        "R or R",
        "sigma[b: exists>=1[a] R] R",
    ]
    for _ in range(20):
        size = 3
        small = {t for t in all_tuples(("a", "b"), size) if rng.random() < 0.3}
        extra = {t for t in all_tuples(("a", "b"), size) if rng.random() < 0.3}
        small_s = {t for t in all_tuples(("a", "b", "c"), size) if rng.random() < 0.2}
        extra_s = {t for t in all_tuples(("a", "b", "c"), size) if rng.random() < 0.2}
        small_i = interp_of(
            simple_kb, size,
            concepts={"C": {0, 1}},
            relations={"R": small, "S": small_s},
        )
        big_i = interp_of(
            simple_kb, size,
            concepts={"C": {0, 1}},
            relations={"R": small | extra, "S": small_s | extra_s},
        )
        for text in concept_texts:
            expr = parse_concept(text, simple_kb.signature)
            assert eval_concept(expr, simple_kb, small_i) <= eval_concept(expr, simple_kb, big_i)
        for text in relation_texts:
            expr = parse_relation(text, simple_kb.signature)
            assert eval_relation(expr, simple_kb, small_i) <= eval_relation(expr, simple_kb, big_i)


def test_satisfies_empty_kb_any_interpretation():
    kb = parse("")
    assert satisfies(kb, Interpretation(size=1))


def test_hand_built_model_of_running_example(paper_kb):
    part = induce_partition(paper_kb.renaming, paper_kb.signature)
    rho = {a: part.canonical(a) for a in paper_kb.signature.attributes}
    shared = lt(U1=0, U2=1, U3=2, U4=3, U5=0)
    r3 = lt(U3=2, U4=3, U5=0, W4=1)
    model = Interpretation(
        size=4,
        relations={"R1": frozenset({shared}), "R2": frozenset({shared}), "R3": frozenset({r3})},
        rho=rho,
    )
    assert satisfies(paper_kb, model)
    # Two R1 tuples sharing the first two attributes violate the key.
    clash = lt(U1=0, U2=1, U3=2, U4=3, U5=1)
    broken = Interpretation(
        size=4,
        relations={
            "R1": frozenset({shared, clash}),
            "R2": frozenset(),
            "R3": frozenset(),
        },
        rho=rho,
    )
    assert not satisfies(paper_kb, broken)


def test_satisfies_rejects_wrong_rho(paper_kb):
    rho = {a: a for a in paper_kb.signature.attributes}
    model = Interpretation(size=1, rho=rho)
    assert not satisfies(paper_kb, model)


def test_find_model_propositionally_unsat():
    kb = parse("signature:\n  concept A\ntbox:\n  A isa bot\n  top isa A\n")
    assert find_model(kb, 3) is None


def test_find_model_running_example(paper_kb):
    model = find_model(paper_kb, 2)
    assert model is not None
    assert satisfies(paper_kb, model)


def test_find_model_nonempty_witness(paper_kb):
    witness = parse_relation("R2", paper_kb.signature)
    model = find_model(paper_kb, 2, require_nonempty=witness)
    assert model is not None
    assert model.relations["R2"]
    assert satisfies(paper_kb, model)


def test_find_model_respects_identifier_injectivity():
    # Every element owns two tuples, so distinct tuples always outnumber the
    # domain and no injective identifier table exists at any size.
    kb = parse(
        "signature:\n  concept D\n  relation P(x, y)\n"
        "tbox:\n"
        "  top isa exists>=2[x] P\n"
        "  top isa reify(P)\n"
    )
    assert find_model(kb, 3) is None


def test_find_model_allows_reification_when_it_fits():
    kb = parse(
        "signature:\n  concept D\n  relation P(x, y)\n"
        "tbox:\n  D isa reify(P)\n"
    )
    model = find_model(kb, 2)
    assert model is not None
    assert satisfies(kb, model)


def test_format_model_stable(paper_kb):
    model = find_model(paper_kb, 2)
    assert format_model(model) == format_model(model)
    assert format_model(model).startswith("domain size:")
