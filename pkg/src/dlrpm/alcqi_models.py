"""Bounded model search for ALCQI TBoxes via a propositional encoding.

Plain enumeration of role extensions is hopeless beyond tiny domains (there
are 2^(n^2) candidate extensions per role), so interpretations of a fixed
size are encoded into CNF: one variable per (subconcept, element) with
definitional clauses, one per (role, element pair), and counting
restrictions expanded over subsets of the domain.  A small DPLL solver with
unit propagation decides the encoding; decoded models are re-verified
against the direct semantics before being returned.

This searcher is deliberately independent of the tableau: agreement between
the two on small instances is one of the package's acceptance checks.  ALCQI
lacks the finite model property, so exhausting all sizes refutes nothing.
"""

from __future__ import annotations

from itertools import combinations

from .alcqi import (
    And,
    AtLeast,
    AtMost,
    Bot,
    Concept,
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

Clause = tuple[int, ...]


def dpll(clauses: list[Clause], nvars: int) -> dict[int, bool] | None:
    """Satisfying assignment for a CNF over variables 1..nvars, or None.

    Depth-first search with unit propagation; assignments are snapshotted per
    decision, which is plenty at the instance sizes used here.
    """
    def propagate(assign: dict[int, bool]) -> bool:
        changed = True
        while changed:
            changed = False
            for clause in clauses:
                unassigned = 0
                open_count = 0
                satisfied = False
                for lit in clause:
                    val = assign.get(abs(lit))
                    if val is None:
                        open_count += 1
                        unassigned = lit
                    elif val == (lit > 0):
                        satisfied = True
                        break
                if satisfied:
                    continue
                if open_count == 0:
                    return False
                if open_count == 1:
                    assign[abs(unassigned)] = unassigned > 0
                    changed = True
        return True

    stack: list[dict[int, bool]] = [{}]
    while stack:
        assign = stack.pop()
        if not propagate(assign):
            continue
        var = next((v for v in range(1, nvars + 1) if v not in assign), None)
        if var is None:
            return assign
        for choice in (False, True):
            branch = dict(assign)
            branch[var] = choice
            stack.append(branch)
    return None


class _Encoder:
    def __init__(self, size: int):
        self.size = size
        self.nvars = 0
        self.clauses: list[Clause] = []
        self.cvars: dict[tuple[Concept, int], int] = {}
        self.rvars: dict[tuple[str, int, int], int] = {}

    def fresh(self) -> int:
        self.nvars += 1
        return self.nvars

    def add(self, *lits: int) -> None:
        self.clauses.append(tuple(lits))

    def role_var(self, role: Role, d: int, e: int) -> int:
        if role.inverted:
            d, e = e, d
        key = (role.name, d, e)
        if key not in self.rvars:
            self.rvars[key] = self.fresh()
        return self.rvars[key]

    def concept_var(self, c: Concept, d: int) -> int:
        c = _desugar(c)
        key = (c, d)
        if key in self.cvars:
            return self.cvars[key]
        v = self.fresh()
        self.cvars[key] = v
        self._define(c, d, v)
        return v

    def _define(self, c: Concept, d: int, v: int) -> None:
        if isinstance(c, Top):
            self.add(v)
        elif isinstance(c, Bot):
            self.add(-v)
        elif isinstance(c, Name):
            pass
        elif isinstance(c, Not):
            a = self.concept_var(c.arg, d)
            self.add(-v, -a)
            self.add(v, a)
        elif isinstance(c, And):
            a = self.concept_var(c.left, d)
            b = self.concept_var(c.right, d)
            self.add(-v, a)
            self.add(-v, b)
            self.add(v, -a, -b)
        elif isinstance(c, Or):
            a = self.concept_var(c.left, d)
            b = self.concept_var(c.right, d)
            self.add(-v, a, b)
            self.add(v, -a)
            self.add(v, -b)
        elif isinstance(c, AtLeast):
            self._define_at_least(c, d, v)
        elif isinstance(c, AtMost):
            w = self.concept_var(AtLeast(c.count + 1, c.role, c.arg), d)
            self.add(-v, -w)
            self.add(v, w)
        else:
            raise TypeError(f"unexpected concept {c!r}")

    def _define_at_least(self, c: AtLeast, d: int, v: int) -> None:
        if c.count > self.size:
            self.add(-v)
            return
        hits = []
        for e in range(self.size):
            y = self.fresh()
            r = self.role_var(c.role, d, e)
            a = self.concept_var(c.arg, e)
            self.add(-y, r)
            self.add(-y, a)
            self.add(y, -r, -a)
            hits.append(y)
        subset_vars = []
        for subset in combinations(hits, c.count):
            z = self.fresh()
            for y in subset:
                self.add(-z, y)
            self.add(z, *(-y for y in subset))
            subset_vars.append(z)
        self.add(-v, *subset_vars)
        for z in subset_vars:
            self.add(v, -z)


def _desugar(c: Concept) -> Concept:
    if isinstance(c, Exists):
        return AtLeast(1, c.role, _desugar(c.arg))
    if isinstance(c, Forall):
        return AtMost(0, c.role, Not(_desugar(c.arg)))
    if isinstance(c, Not):
        return Not(_desugar(c.arg))
    if isinstance(c, And):
        return And(_desugar(c.left), _desugar(c.right))
    if isinstance(c, Or):
        return Or(_desugar(c.left), _desugar(c.right))
    if isinstance(c, AtLeast):
        return AtLeast(c.count, c.role, _desugar(c.arg))
    if isinstance(c, AtMost):
        return AtMost(c.count, c.role, _desugar(c.arg))
    return c


def model_at_size(tbox: TBox, concept: Concept | None, size: int) -> Interp | None:
    """A model of exactly this domain size, with the concept non-empty when given."""
    enc = _Encoder(size)
    for lhs, rhs in tbox.axioms:
        for d in range(size):
            enc.add(-enc.concept_var(lhs, d), enc.concept_var(rhs, d))
    if concept is not None:
        # The witness element can be element 0: models are closed under renaming.
        enc.add(enc.concept_var(concept, 0))
    assignment = dpll(enc.clauses, enc.nvars)
    if assignment is None:
        return None
    concepts: dict[str, set[int]] = {}
    for (c, d), v in enc.cvars.items():
        if isinstance(c, Name) and assignment.get(v, False):
            concepts.setdefault(c.name, set()).add(d)
    roles: dict[str, set[tuple[int, int]]] = {}
    for (name, d, e), v in enc.rvars.items():
        if assignment.get(v, False):
            roles.setdefault(name, set()).add((d, e))
    interp = Interp(
        size=size,
        concepts={k: frozenset(vs) for k, vs in concepts.items()},
        roles={k: frozenset(vs) for k, vs in roles.items()},
    )
    if not satisfies_tbox(interp, tbox):
        raise AssertionError("encoder produced a structure violating the TBox")
    if concept is not None and 0 not in eval_concept(concept, interp):
        raise AssertionError("encoder produced a structure missing the witness")
    return interp


def find_alcqi_model(
    tbox: TBox, concept: Concept | None = None, max_size: int = 4
) -> Interp | None:
    """Smallest-domain model up to `max_size`, with a non-empty witness when given."""
    for size in range(1, max_size + 1):
        interp = model_at_size(tbox, concept, size)
        if interp is not None:
            return interp
    return None
