from __future__ import annotations

import random

import pytest

from dlrpm.alcqi import (
    And,
    AtLeast,
    AtMost,
    Bot,
    EMPTY_TBOX,
    Exists,
    Forall,
    Interp,
    Name,
    Not,
    Or,
    Role,
    TBox,
    Top,
    eval_concept,
    satisfies_tbox,
)
from dlrpm.alcqi_models import find_alcqi_model, model_at_size
from dlrpm.tableau import ResourceLimitError, check_tbox_satisfiable, is_satisfiable, solve

A, B, C = Name("A"), Name("B"), Name("C")
r, s = Role("r"), Role("s")


def test_atomic_concept_satisfiable():
    assert is_satisfiable(A, EMPTY_TBOX)


def test_propositional_clash():
    assert not is_satisfiable(And(A, Not(A)), EMPTY_TBOX)


def test_empty_tbox_satisfiable():
    assert check_tbox_satisfiable(EMPTY_TBOX)


def test_top_isa_bot_unsatisfiable():
    assert not check_tbox_satisfiable(TBox.of([(Top(), Bot())]))


def test_infinite_model_instance_answers_satisfiable():
    # Every element needs an r-successor in B, at most one r-predecessor, and
    # the query element refuses predecessors entirely: only infinite chains
    # qualify, so the answer must come from blocking.
    tbox = TBox.of(
        [
            (Top(), Exists(r, B)),
            (Top(), AtMost(1, r.inverse(), Top())),
            (B, Not(A)),
        ]
    )
    query = And(A, AtMost(0, r.inverse(), Top()))
    result = solve(query, tbox)
    assert result.satisfiable
    assert result.used_blocking
    assert result.model is None
    # The bounded searcher confirms there is no finite model up to size 6.
    assert find_alcqi_model(tbox, query, 6) is None


def test_counting_conflicts():
    assert not is_satisfiable(And(AtLeast(2, r, A), AtMost(1, r, A)), EMPTY_TBOX)
    assert is_satisfiable(And(AtLeast(2, r, A), AtMost(2, r, A)), EMPTY_TBOX)
    assert not is_satisfiable(
        And(AtLeast(1, r, A), AtMost(0, r, Top())), EMPTY_TBOX
    )


def test_merge_with_inverse_propagation():
    # x has two r-successors in A that must merge under the at-most bound;
    # their labels conflict only after merging.
    tbox = TBox.of([(A, B), (B, Not(C))])
    query = And(
        AtLeast(1, r, And(A, C)),
        And(AtLeast(1, r, And(A, Not(C))), AtMost(1, r, A)),
    )
    assert not is_satisfiable(query, tbox)


def test_universal_propagates_through_inverse():
    query = And(A, Exists(r, Forall(r.inverse(), Not(A))))
    assert not is_satisfiable(query, EMPTY_TBOX)
    assert is_satisfiable(And(A, Exists(r, Forall(r.inverse(), A))), EMPTY_TBOX)


def test_extracted_models_verify():
    cases = [
        And(A, Exists(r, And(B, Exists(s, C)))),
        Or(And(A, Not(B)), And(B, Not(A))),
        And(AtLeast(3, r, A), AtMost(3, r, Top())),
        And(Exists(r, A), Forall(r, B)),
    ]
    for query in cases:
        result = solve(query, EMPTY_TBOX)
        assert result.satisfiable
        if result.model is not None:
            assert eval_concept(query, result.model)


def test_extracted_model_satisfies_tbox():
    tbox = TBox.of([(A, Exists(r, B)), (B, C)])
    result = solve(A, tbox)
    assert result.satisfiable
    assert result.model is not None
    assert satisfies_tbox(result.model, tbox)
    assert eval_concept(A, result.model)


def test_budget_exhaustion_raises():
    # A pyramid of distinct levels defeats blocking and must exhaust a tiny budget.
    levels = [Name(f"L{i}") for i in range(12)]
    tbox = TBox.of([(a, AtLeast(2, r, b)) for a, b in zip(levels, levels[1:])])
    with pytest.raises(ResourceLimitError):
        is_satisfiable(levels[0], tbox, node_budget=50)
    # A shallow pyramid is decided within an ordinary budget.
    shallow = TBox.of([(a, AtLeast(2, r, b)) for a, b in zip(levels[:4], levels[1:4])])
    assert is_satisfiable(levels[0], shallow)


def _random_tbox(rng: random.Random) -> tuple[TBox, "Name"]:
    def concept(depth: int):
        roll = rng.random()
        if depth <= 0 or roll < 0.3:
            return rng.choice((A, B, C, Top()))
        if roll < 0.45:
            return Not(concept(0))
        if roll < 0.6:
            return rng.choice((And, Or))(concept(depth - 1), concept(depth - 1))
        role = Role(rng.choice(("r", "s")), rng.random() < 0.3)
        if roll < 0.75:
            return Exists(role, concept(depth - 1))
        if roll < 0.85:
            return Forall(role, concept(depth - 1))
        if roll < 0.93:
            return AtLeast(rng.randint(1, 2), role, concept(depth - 1))
        return AtMost(rng.randint(0, 2), role, concept(depth - 1))

    axioms = [(concept(1), concept(2)) for _ in range(rng.randint(1, 3))]
    return TBox.of(axioms, extra_concepts=("A", "B", "C")), rng.choice((A, B, C))


def test_agreement_with_bounded_model_search():
    # One-sided agreement: a finite model certifies satisfiability, and an
    # unsatisfiable verdict forbids finite models.  (The converse directions
    # do not hold: the logic lacks the finite model property.)
    finite_models = 0
    unsat = 0
    for seed in range(120):
        rng = random.Random(seed)
        tbox, query = _random_tbox(rng)
        verdict = is_satisfiable(query, tbox, node_budget=200_000)
        witness = find_alcqi_model(tbox, query, 3)
        if witness is not None:
            finite_models += 1
            assert verdict, f"seed {seed}: finite model found but tableau says unsat"
        if not verdict:
            unsat += 1
            assert witness is None, f"seed {seed}: tableau unsat but finite model exists"
    assert finite_models >= 40
    assert unsat >= 5


def test_answers_stable_across_rule_order_seeds():
    cases = []
    for seed in range(25):
        rng = random.Random(1000 + seed)
        cases.append(_random_tbox(rng))
    for tbox, query in cases:
        baseline = is_satisfiable(query, tbox, node_budget=200_000)
        for order_seed in (1, 2, 3):
            assert (
                is_satisfiable(query, tbox, node_budget=200_000, seed=order_seed)
                == baseline
            )


def test_model_at_size_verifies_internally():
    tbox = TBox.of([(A, Exists(r, B))])
    interp = model_at_size(tbox, A, 2)
    assert interp is not None
    assert satisfies_tbox(interp, tbox)
    assert 0 in eval_concept(A, interp)
