from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from dlrpm.alcqi import (
    And,
    AtLeast,
    AtMost,
    Bot,
    Exists,
    Forall,
    Interp,
    Name,
    Not,
    Or,
    Role,
    TBox,
    Top,
    chain_exists,
    chain_forall,
    eval_concept,
    format_concept,
    format_tbox,
    inverse_chain,
    neg,
    nnf,
    parse_concept,
    parse_tbox,
    satisfies_tbox,
)

names = st.sampled_from(["A", "B", "C"])
roles = st.builds(Role, st.sampled_from(["r", "s"]), st.booleans())


def concepts(depth: int = 3) -> st.SearchStrategy:
    base = st.one_of(st.builds(Top), st.builds(Bot), st.builds(Name, names))
    return st.recursive(
        base,
        lambda sub: st.one_of(
            st.builds(Not, sub),
            st.builds(And, sub, sub),
            st.builds(Or, sub, sub),
            st.builds(Exists, roles, sub),
            st.builds(Forall, roles, sub),
            st.builds(AtLeast, st.integers(1, 3), roles, sub),
            st.builds(AtMost, st.integers(0, 3), roles, sub),
        ),
        max_leaves=8,
    )


def random_interp(rng: random.Random, size: int = 3) -> Interp:
    concepts_ext = {
        n: frozenset(d for d in range(size) if rng.random() < 0.5) for n in ("A", "B", "C")
    }
    roles_ext = {
        n: frozenset(
            (d, e) for d in range(size) for e in range(size) if rng.random() < 0.4
        )
        for n in ("r", "s")
    }
    return Interp(size, concepts_ext, roles_ext)


def test_role_double_inversion():
    r = Role("r")
    assert r.inverse().inverse() == r
    assert str(r.inverse()) == "inv(r)"


def test_nnf_de_morgan():
    a, b = Name("A"), Name("B")
    assert nnf(Not(And(a, b))) == Or(Not(a), Not(b))


def test_nnf_counting_duality():
    r = Role("r")
    assert nnf(Not(AtLeast(2, r, Name("A")))) == AtMost(1, r, Name("A"))
    assert nnf(Not(AtMost(2, r, Name("A")))) == AtLeast(3, r, Name("A"))


def test_nnf_desugars_quantifiers():
    r = Role("r")
    assert nnf(Exists(r, Name("A"))) == AtLeast(1, r, Name("A"))
    assert nnf(Forall(r, Name("A"))) == AtMost(0, r, Not(Name("A")))


@settings(max_examples=1000, deadline=None)
@given(concepts())
def test_nnf_idempotent(c):
    once = nnf(c)
    assert nnf(once) == once


@settings(max_examples=200, deadline=None)
@given(concepts(), st.integers(0, 10_000))
def test_nnf_preserves_semantics_on_finite_interpretations(c, seed):
    interp = random_interp(random.Random(seed))
    assert eval_concept(c, interp) == eval_concept(nnf(c), interp)


@settings(max_examples=200, deadline=None)
@given(concepts(), st.integers(0, 10_000))
def test_neg_complements_pointwise(c, seed):
    interp = random_interp(random.Random(seed))
    full = frozenset(range(interp.size))
    assert eval_concept(neg(nnf(c)), interp) == full - eval_concept(c, interp)


def test_chain_exists_single_role():
    r = Role("r")
    assert chain_exists(">=", [r], Name("C")) == Exists(r, Name("C"))
    assert chain_exists("<=", [r], Name("C")) == AtMost(1, r, Name("C"))


def test_chain_exists_nests_left_to_right():
    r, s = Role("r"), Role("s")
    assert chain_exists(">=", [r, s], Name("C")) == Exists(r, Exists(s, Name("C")))
    assert chain_exists("<=", [r, s], Name("C")) == AtMost(1, r, AtMost(1, s, Name("C")))


def test_inverse_chain_reverses_and_inverts():
    r, s = Role("r"), Role("s")
    assert inverse_chain((r, s)) == (s.inverse(), r.inverse())
    assert inverse_chain(inverse_chain((r, s))) == (r, s)


def test_chain_forall():
    r, s, t = Role("q1"), Role("q2"), Role("q3")
    expected = Forall(r, Forall(s, Forall(t, Name("C"))))
    assert chain_forall([r, s, t], Name("C")) == expected
    assert chain_forall([], Name("C")) == Name("C")


@settings(max_examples=300, deadline=None)
@given(concepts())
def test_concept_serialization_round_trip(c):
    assert parse_concept(format_concept(c)) == c


def test_tbox_serialization_round_trip():
    tbox = TBox.of(
        [
            (Name("A_R1"), Exists(Role("Q_R1"), Name("A_R1^l"))),
            (AtLeast(2, Role("Q_{U1,U2}", True), Top()), Bot()),
            (Name("A_R1^{U1,U2}"), Not(Name("A_R2^{U1,U2}"))),
        ]
    )
    text = format_tbox(tbox)
    assert parse_tbox(text) == tbox
    assert format_tbox(parse_tbox(text)) == text


def test_tbox_requires_declared_names():
    with pytest.raises(ValueError):
        TBox((((Name("A"), Top())),), frozenset(), frozenset())


def test_eval_counting():
    interp = Interp(
        3,
        {"B": frozenset({1, 2})},
        {"r": frozenset({(0, 1), (0, 2), (1, 2)})},
    )
    assert eval_concept(AtLeast(2, Role("r"), Name("B")), interp) == frozenset({0})
    assert eval_concept(AtMost(0, Role("r"), Name("B")), interp) == frozenset({2})
    # Inverse direction counts predecessors.
    assert eval_concept(AtLeast(2, Role("r", True), Top()), interp) == frozenset({2})


def test_satisfies_tbox():
    tbox = TBox.of([(Name("A"), Exists(Role("r"), Name("A")))])
    good = Interp(1, {"A": frozenset({0})}, {"r": frozenset({(0, 0)})})
    bad = Interp(1, {"A": frozenset({0})}, {"r": frozenset()})
    assert satisfies_tbox(good, tbox)
    assert not satisfies_tbox(bad, tbox)
