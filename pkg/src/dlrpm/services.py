"""Knowledge-base level reasoning: satisfiability and entailment tasks.

Every task reduces to concept satisfiability, which in turn is decided on the
compiled ALCQI TBox: a concept is satisfiable w.r.t. the knowledge base iff
its translation is satisfiable w.r.t. the compiled TBox (the compilation
preserves pointwise membership in both directions).  Relation-level tasks
pick the least attribute of the relation signature as the witnessing
projection; any attribute works, one is fixed for determinism.

`cross_check_reductions` recomputes a task along independent reduction
routes, including the route through a fresh binary helper relation, and
reports whether all routes agree.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tableau
from .model import (
    Bot,
    ConceptAnd,
    ConceptExpr,
    ConceptIncl,
    ExistsAttr,
    KnowledgeBase,
    Not,
    RelAnd,
    RelDiff,
    RelationExpr,
    RelationName,
    Select,
    Signature,
    Top,
)
from .projection import FragmentError, is_dlr_pm
from .translate import Translation, TranslationError
from .wellformed import tau, validate_expr


class TaskRejected(Exception):
    """The task or its reduction falls outside what the pipeline can decide."""


@dataclass(frozen=True)
class KbSat:
    pass


@dataclass(frozen=True)
class ConceptSat:
    concept: ConceptExpr


@dataclass(frozen=True)
class RelSat:
    rel: RelationExpr


@dataclass(frozen=True)
class EntailsConceptIncl:
    lhs: ConceptExpr
    rhs: ConceptExpr


@dataclass(frozen=True)
class EntailsRelIncl:
    lhs: RelationExpr
    rhs: RelationExpr


ReasoningTask = KbSat | ConceptSat | RelSat | EntailsConceptIncl | EntailsRelIncl


@dataclass(frozen=True)
class ReductionReport:
    routes: dict[str, bool]

    @property
    def agree(self) -> bool:
        return len(set(self.routes.values())) <= 1


def solve(
    kb: KnowledgeBase,
    task: ReasoningTask,
    *,
    node_budget: int = 10**6,
    seed: int = 0,
) -> bool:
    """Boolean answer to a reasoning task.

    Raises TaskRejected when the knowledge base (or the task's reduction)
    leaves the decidable fragment, with the violated condition attached.
    """
    _gate(kb)
    if isinstance(task, KbSat):
        tr = _translate(kb)
        return tableau.is_satisfiable(
            _alcqi_top(), tr.tbox, node_budget=node_budget, seed=seed
        )
    if isinstance(task, ConceptSat):
        return _concept_sat(kb, task.concept, node_budget, seed)
    if isinstance(task, RelSat):
        witness = _some_attr_projection(kb, task.rel)
        return _concept_sat(kb, witness, node_budget, seed)
    if isinstance(task, EntailsConceptIncl):
        probe = ConceptAnd(task.lhs, Not(task.rhs))
        return not _concept_sat(kb, probe, node_budget, seed)
    if isinstance(task, EntailsRelIncl):
        diff = RelDiff(task.lhs, task.rhs)
        witness = _some_attr_projection(kb, diff)
        return not _concept_sat(kb, witness, node_budget, seed)
    raise TypeError(f"unknown task {task!r}")


def cross_check_reductions(
    kb: KnowledgeBase,
    task: ReasoningTask,
    *,
    node_budget: int = 10**6,
    seed: int = 0,
) -> ReductionReport:
    """The same task computed along independent reduction routes."""
    _gate(kb)
    kw = {"node_budget": node_budget, "seed": seed}
    routes: dict[str, bool] = {}
    if isinstance(task, KbSat):
        routes["gamma-top"] = solve(kb, KbSat(), **kw)
        routes["not-entails-top-isa-bot"] = not solve(
            kb, EntailsConceptIncl(Top(), Bot()), **kw
        )
    elif isinstance(task, ConceptSat):
        routes.update(_concept_sat_routes(kb, task.concept, kw))
    elif isinstance(task, RelSat):
        t = _rel_tau(kb, task.rel)
        for attr in sorted(t):
            probe = ExistsAttr(">=", 1, attr, task.rel)
            routes[f"attr-{attr}"] = _concept_sat(kb, probe, **kw)
        first = ExistsAttr(">=", 1, min(t), task.rel)
        for name, value in _concept_sat_routes(kb, first, kw).items():
            routes[f"least-{name}"] = value
    elif isinstance(task, EntailsConceptIncl):
        probe = ConceptAnd(task.lhs, Not(task.rhs))
        for name, value in _concept_sat_routes(kb, probe, kw).items():
            routes[name] = not value
    elif isinstance(task, EntailsRelIncl):
        diff = RelDiff(task.lhs, task.rhs)
        t = _rel_tau(kb, diff)
        for attr in sorted(t):
            probe = ExistsAttr(">=", 1, attr, diff)
            routes[f"attr-{attr}"] = not _concept_sat(kb, probe, **kw)
        first = ExistsAttr(">=", 1, min(t), diff)
        for name, value in _concept_sat_routes(kb, first, kw).items():
            routes[f"least-{name}"] = not value
    else:
        raise TypeError(f"unknown task {task!r}")
    return ReductionReport(routes)


# ---------------------------------------------------------------------------
# Reduction machinery
# ---------------------------------------------------------------------------


def _alcqi_top():
    from . import alcqi

    return alcqi.Top()


def _gate(kb: KnowledgeBase) -> None:
    report = is_dlr_pm(kb)
    if not report.ok:
        raise TaskRejected(report.summary())


def _translate(kb: KnowledgeBase, extra: tuple = ()) -> Translation:
    try:
        return Translation(kb, extra)
    except FragmentError as err:
        raise TaskRejected(
            "the reduction leaves the decidable fragment:\n" + err.report.summary()
        ) from err
    except TranslationError as err:
        raise TaskRejected(str(err)) from err


def _concept_sat(
    kb: KnowledgeBase, concept: ConceptExpr, node_budget: int, seed: int
) -> bool:
    diags = validate_expr(kb, concept)
    if diags:
        raise TaskRejected(
            "task expression does not validate:\n" + "\n".join(f"  {d}" for d in diags)
        )
    tr = _translate(kb, (concept,))
    return tableau.is_satisfiable(
        tr.dagger(concept), tr.tbox, node_budget=node_budget, seed=seed
    )


def _concept_sat_routes(
    kb: KnowledgeBase, concept: ConceptExpr, kw: dict
) -> dict[str, bool]:
    routes = {"direct": _concept_sat(kb, concept, **kw)}
    extended, p_name, attrs = _with_fresh_helper(kb)
    p = RelationName(p_name)
    a1, a2 = attrs
    selected = Select(a2, concept, p)
    forced = KnowledgeBase(
        extended.signature,
        extended.tbox + (ConceptIncl(Top(), ExistsAttr(">=", 1, a1, RelAnd(p, selected))),),
        extended.renaming,
    )
    routes["fresh-helper-global"] = solve(forced, KbSat(), **kw)
    routes["fresh-helper-select"] = _concept_sat(
        extended, ExistsAttr(">=", 1, a1, selected), **kw
    )
    return routes


def _with_fresh_helper(kb: KnowledgeBase) -> tuple[KnowledgeBase, str, tuple[str, str]]:
    """Extend the signature with a fresh binary relation over fresh attributes."""
    sig = kb.signature
    taken = sig.concepts | set(sig.relations)
    name = "_P"
    k = 0
    while name in taken:
        k += 1
        name = f"_P{k}"
    attrs = (f"_{name.lower()}_1", f"_{name.lower()}_2")
    while attrs[0] in sig.attributes or attrs[1] in sig.attributes:
        k += 1
        attrs = (f"_{name.lower()}_{k}a", f"_{name.lower()}_{k}b")
    new_sig = Signature(
        concepts=sig.concepts,
        relations={**sig.relations, name: attrs},
        attributes=sig.attributes | frozenset(attrs),
    )
    return KnowledgeBase(new_sig, kb.tbox, kb.renaming), name, attrs


def _rel_tau(kb: KnowledgeBase, rel: RelationExpr) -> frozenset[str]:
    diags = validate_expr(kb, rel)
    if diags:
        raise TaskRejected(
            "task expression does not validate:\n" + "\n".join(f"  {d}" for d in diags)
        )
    t = tau(rel, kb.signature, kb.renaming)
    if t is None:
        raise TaskRejected("task relation expression has no signature")
    return t


def _some_attr_projection(kb: KnowledgeBase, rel: RelationExpr) -> ExistsAttr:
    """Projection onto the least attribute of the relation signature."""
    return ExistsAttr(">=", 1, min(_rel_tau(kb, rel)), rel)
