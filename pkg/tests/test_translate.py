from __future__ import annotations

import pytest

from dlrpm import alcqi
from dlrpm.model import KnowledgeBase, Signature
from dlrpm.parser import parse, parse_concept, parse_relation
from dlrpm.projection import FragmentError
from dlrpm.renaming import canonicalize
from dlrpm.translate import (
    Translation,
    gamma,
    gamma_counts,
    gamma_size,
    make_name_table,
    map_path,
)
from dlrpm.projection import build


def node(*attrs: str) -> frozenset[str]:
    return frozenset(attrs)


@pytest.fixture(scope="module")
def paper_tr(paper_kb):
    return Translation(paper_kb)


def test_map_path_of_running_example(paper_tr):
    roles = map_path(
        paper_tr.ps, node("U3", "U4", "U5", "W4"), node("U4"), paper_tr.names
    )
    assert [str(r) for r in roles] == ["Q_{U3,U4,U5}", "Q_{U3,U4}", "Q_{U4}"]


def test_map_path_empty_cases(paper_tr):
    assert map_path(paper_tr.ps, node("U1", "U2"), node("U1", "U2"), paper_tr.names) is None
    assert map_path(paper_tr.ps, node("U1", "U2"), node("U3"), paper_tr.names) is None
    assert [str(r) for r in map_path(paper_tr.ps, node("U1", "U2"), node("U2"), paper_tr.names)] == ["Q_{U2}"]


def test_dagger_selection_matches_published_expansion(paper_kb):
    sig = Signature(
        concepts=paper_kb.signature.concepts | {"C"},
        relations=paper_kb.signature.relations,
        attributes=paper_kb.signature.attributes,
    )
    kb = KnowledgeBase(sig, paper_kb.tbox, paper_kb.renaming)
    tr = Translation(kb)
    expr = parse_relation("sigma[U4: C] R3", sig)
    out = alcqi.format_concept(tr.dagger(expr))
    assert out == "A_R3 and forall Q_{U3,U4,U5}.forall Q_{U3,U4}.forall Q_{U4}.C"


def test_dagger_global_reification_of_name(paper_tr, paper_kb):
    expr = parse_concept("reify(R1)", paper_kb.signature)
    assert paper_tr.dagger(expr) == alcqi.Name("A_R1")


def test_dagger_local_reification(paper_tr, paper_kb):
    expr = parse_concept("lreify(R3)", paper_kb.signature)
    assert paper_tr.dagger(expr) == alcqi.Name("A_R3^l")


def test_dagger_projection_single_edge(paper_tr, paper_kb):
    expr = parse_relation("exists[U1,U2] R1", paper_kb.signature)
    expected = alcqi.Exists(alcqi.Role("Q_{U1,U2}", True), alcqi.Name("A_R1"))
    assert paper_tr.dagger(expr) == expected


def test_dagger_translates_renamed_attributes(paper_tr, paper_kb):
    # V1,V2 are written over R2's own attribute names; the chain uses the
    # canonical node names.
    expr = parse_relation("exists[V1,V2] R2", paper_kb.signature)
    expected = alcqi.Exists(alcqi.Role("Q_{U1,U2}", True), alcqi.Name("A_R2"))
    assert paper_tr.dagger(expr) == expected


def test_dagger_single_attribute_projection_over_depth_one():
    kb = parse("signature:\n  relation R(a, b)\n")
    tr = Translation(kb)
    expr = parse_concept("exists>=3[a] R", kb.signature)
    assert tr.dagger(expr) == alcqi.AtLeast(3, alcqi.Role("Q_{a}", True), alcqi.Name("A_R"))


def test_dagger_cardinality_one_over_long_path(paper_tr, paper_kb):
    # The chain from tau(R3) down to {U4} inverts in reverse order.
    expr = parse_concept("exists[U4] R3", paper_kb.signature)
    expected = alcqi.Exists(
        alcqi.Role("Q_{U4}", True),
        alcqi.Exists(
            alcqi.Role("Q_{U3,U4}", True),
            alcqi.Exists(alcqi.Role("Q_{U3,U4,U5}", True), alcqi.Name("A_R3")),
        ),
    )
    assert paper_tr.dagger(expr) == expected


def test_name_inventory_matches_generated_signature(paper_tr):
    inventory = paper_tr.names.inventory()
    expected = {
        node("U1", "U2", "U3", "U4", "U5"): ("A_R1", "A_R2"),
        node("U3", "U4", "U5", "W4"): ("A_R3",),
        node("U1", "U2"): ("A_R1^{U1,U2}", "A_R2^{U1,U2}"),
        node("U3", "U4", "U5"): (
            "A_R1^{U3,U4,U5}", "A_R2^{U3,U4,U5}", "A_R3^{U3,U4,U5}",
        ),
        node("U3", "U4"): ("A_R1^{U3,U4}", "A_R2^{U3,U4}", "A_R3^{U3,U4}"),
        node("W4"): ("A_R3^{W4}",),
        node("U1"): ("A_R1^{U1}", "A_R2^{U1}"),
        node("U2"): ("A_R1^{U2}", "A_R2^{U2}"),
        node("U3"): ("A_R1^{U3}", "A_R2^{U3}", "A_R3^{U3}"),
        node("U4"): ("A_R1^{U4}", "A_R2^{U4}", "A_R3^{U4}"),
        node("U5"): ("A_R1^{U5}", "A_R2^{U5}", "A_R3^{U5}"),
    }
    assert inventory == expected


def test_roles_exist_for_non_roots_only(paper_tr):
    from dlrpm.translate import TranslationError

    names = paper_tr.names
    with pytest.raises(TranslationError):
        names.node_role(node("U1", "U2", "U3", "U4", "U5"))
    assert names.node_role(node("U1", "U2")) == "Q_{U1,U2}"
    assert names.local_role("R1") == "Q_R1"


def test_single_binary_relation_counts():
    kb = parse("signature:\n  relation R(a, b)\n")
    counts = gamma_counts(kb)
    # Two children contribute one step axiom and one functionality axiom each.
    assert counts == {"dsj": 0, "rel": 4, "lobj": 4, "axioms": 0}
    assert gamma_size(kb) == 8


def test_empty_kb_translates_to_empty_tbox():
    assert gamma(parse("")).axioms == ()
    assert gamma_size(parse("")) == 0


def test_depth_one_relation_rel_count_is_twice_arity():
    for arity in (2, 3, 4):
        attrs = ", ".join(f"a{i}" for i in range(arity))
        kb = parse(f"signature:\n  relation R({attrs})\n")
        assert gamma_counts(kb)["rel"] == 2 * arity


def test_disjointness_count_closed_form(paper_kb):
    tr = Translation(paper_kb)
    nt = tr.names
    big = {rn: [n for n in nt.dominated[rn] if len(n) >= 2] for rn in nt.dominated}
    expected = sum(
        1
        for rn1 in big
        for rn2 in big
        for n1 in big[rn1]
        for n2 in big[rn2]
        if n1 != n2
    )
    assert tr.counts["dsj"] == expected == 94


def test_every_generated_role_has_a_functionality_axiom(paper_tr):
    tbox = paper_tr.tbox
    functional = set()
    for lhs, rhs in tbox.axioms:
        if isinstance(rhs, alcqi.Bot) and isinstance(lhs, alcqi.AtLeast) and lhs.count == 2:
            role = lhs.role
            functional.add(role.name if not role.inverted else f"{role.name}^-")
    for role_name in tbox.role_names:
        assert role_name in functional
    # Local roles are functional in both directions.
    for rn in ("R1", "R2", "R3"):
        assert f"Q_{rn}" in functional
        assert f"Q_{rn}^-" in functional


def test_gamma_deterministic_serialization(paper_kb):
    text1 = alcqi.format_tbox(Translation(paper_kb).tbox)
    text2 = alcqi.format_tbox(Translation(parse(open("demos/paper.dlrp").read())).tbox)
    assert text1 == text2


def test_counts_sum_to_total(paper_tr):
    assert sum(paper_tr.counts.values()) == len(paper_tr.tbox.axioms)


def test_translation_rejects_non_multitree():
    kb = parse(
        "signature:\n  relation R(a, b, c)\n"
        "tbox:\n"
        "  exists[a,b] R isa exists<=1[a,b] R\n"
        "  exists[a,c] R isa exists<=1[a,c] R\n"
    )
    with pytest.raises(FragmentError):
        Translation(kb)


def test_translation_rejects_query_breaking_fragment(paper_kb):
    probe = parse_concept("exists>=2[U4] R3", paper_kb.signature)
    with pytest.raises(FragmentError):
        Translation(paper_kb, (probe,))


def test_query_extension_adds_reified_nodes():
    kb = parse("signature:\n  relation R(a, b, c, d)\n")
    expr = parse_relation("exists[a,b] R", kb.signature)
    tr = Translation(kb, (expr,))
    assert node("a", "b") in tr.ps.nodes
    assert "A_R^{a,b}" in tr.tbox.concept_names
    out = tr.dagger(expr)
    assert out == alcqi.Exists(alcqi.Role("Q_{a,b}", True), alcqi.Name("A_R"))
    # Without the query extension the node would not exist.
    assert node("a", "b") not in Translation(kb).ps.nodes
