"""Tableau decision procedure for ALCQI concept satisfiability w.r.t. a TBox.

Completion-tree calculus with qualified number restrictions and inverse
roles.  Termination uses pairwise blocking — a node is blocked by an older
unblocked node when both node and predecessor labels and the connecting edge
label match.  The pair condition is required for completeness in the
presence of inverses and counting; allowing any older node as the blocker
(rather than ancestors only) caps the tree by the number of distinct label
patterns instead of per-path repetition.

Axioms with an atomic left-hand side are absorbed and unfolded lazily into
node labels; the remaining general inclusions are internalized as universal
disjunctions added to every node.  Branching (disjunctions, the choose rule
on at-most restrictions, merge choices) is explored depth-first with
chronological backtracking.

The implementation is event-driven: every primitive state change lands on an
undo trail and queues the affected nodes for deterministic saturation, branch
search, and successor generation.  Blocking depends on labels along the whole
ancestor path, so label changes at interior nodes re-queue their subtree for
generation.  Before declaring a completion clash-free, one full sweep
re-checks every node, so queue bookkeeping is never trusted for the final
verdict.  Backtracking rewinds the trail (including queue removals), which
restores the exact saturated state of the branch point.

The node budget caps total work; exceeding it raises ResourceLimitError.
"""

from __future__ import annotations

import random
from itertools import combinations
from typing import Callable

from .alcqi import (
    And,
    AtLeast,
    AtMost,
    Bot,
    Concept,
    Interp,
    Name,
    Not,
    Or,
    Role,
    TBox,
    Top,
    neg,
    nnf,
)
from .model import DlrError


class ResourceLimitError(DlrError):
    """The tableau exceeded its work budget before reaching an answer."""


class _Clash(Exception):
    pass


class _Node:
    __slots__ = ("nid", "parent", "edge", "label", "alive", "_fp")

    def __init__(self, nid: int, parent: int | None, edge: frozenset[Role]):
        self.nid = nid
        self.parent = parent
        self.edge = edge
        self.label: dict[Concept, None] = {}
        self.alive = True
        self._fp: frozenset[Concept] | None = None

    def fingerprint(self) -> frozenset[Concept]:
        if self._fp is None:
            self._fp = frozenset(self.label)
        return self._fp


def _absorb(tbox: TBox) -> tuple[tuple[Concept, ...], dict[str, tuple[Concept, ...]]]:
    """Split the TBox into lazily-unfolded atomic axioms and universal constraints."""
    unfold: dict[str, list[Concept]] = {}
    universal: list[Concept] = []
    for lhs, rhs in tbox.axioms:
        if isinstance(lhs, Name):
            unfold.setdefault(lhs.name, []).append(nnf(rhs))
            continue
        if isinstance(lhs, Bot):
            continue
        if isinstance(lhs, Top):
            universal.append(nnf(rhs))
            continue
        disjuncts = [d for d in (neg(nnf(lhs)), nnf(rhs)) if not isinstance(d, Bot)]
        if any(isinstance(d, Top) for d in disjuncts):
            continue
        if not disjuncts:
            universal.append(Bot())
        elif len(disjuncts) == 1:
            universal.append(disjuncts[0])
        else:
            universal.append(Or(disjuncts[0], disjuncts[1]))
    return tuple(universal), {k: tuple(v) for k, v in unfold.items()}


class _Engine:
    def __init__(self, query: Concept, tbox: TBox, node_budget: int, seed: int):
        self.universal, self.unfold = _absorb(tbox)
        self.query = nnf(query)
        self.budget = node_budget
        self.work = 0
        self.rng = random.Random(seed)
        self.seed = seed
        self.nodes: dict[int, _Node] = {}
        self.children: dict[int, list[int]] = {}
        self.ineq: set[frozenset[int]] = set()
        self.trail: list[tuple] = []
        self.dirty: dict[int, None] = {}
        self.branch_queue: dict[int, None] = {}
        self.gen_queue: dict[int, None] = {}
        self.next_id = 0

    def spend(self, amount: int = 1) -> None:
        self.work += amount
        if self.work > self.budget:
            raise ResourceLimitError(f"tableau exceeded its budget of {self.budget}")

    # -- primitive, trailed state changes --------------------------------------

    def new_node(self, parent: int | None, edge: frozenset[Role]) -> _Node:
        self.spend()
        node = _Node(self.next_id, parent, edge)
        self.nodes[node.nid] = node
        self.children[node.nid] = []
        if parent is not None:
            self.children[parent].append(node.nid)
        self.next_id += 1
        self.trail.append(("node", node.nid))
        self.mark(node.nid)
        return node

    def add_concept(self, nid: int, c: Concept) -> bool:
        node = self.nodes[nid]
        if c in node.label:
            return False
        node.label[c] = None
        node._fp = None
        self.trail.append(("label", nid, c))
        self.mark(nid)
        if self.children[nid]:
            self.gen_mark_subtree(nid)
        return True

    def set_edge(self, nid: int, edge: frozenset[Role]) -> None:
        node = self.nodes[nid]
        self.trail.append(("edge", nid, node.edge))
        node.edge = edge
        self.mark(nid)
        if self.children[nid]:
            self.gen_mark_subtree(nid)

    def set_dead(self, nid: int) -> None:
        node = self.nodes[nid]
        if not node.alive:
            return
        node.alive = False
        self.trail.append(("dead", nid))
        if node.parent is not None:
            self.mark(node.parent)

    def add_ineq(self, a: int, b: int) -> None:
        pair = frozenset((a, b))
        if pair in self.ineq:
            return
        self.ineq.add(pair)
        self.trail.append(("ineq+", pair))
        self.mark(a)
        self.mark(b)

    def del_ineq(self, pair: frozenset[int]) -> None:
        if pair in self.ineq:
            self.ineq.remove(pair)
            self.trail.append(("ineq-", pair))

    def rewind(self, mark: int) -> None:
        while len(self.trail) > mark:
            op = self.trail.pop()
            kind = op[0]
            if kind == "label":
                _, nid, c = op
                node = self.nodes[nid]
                del node.label[c]
                node._fp = None
            elif kind == "node":
                nid = op[1]
                node = self.nodes.pop(nid)
                del self.children[nid]
                self.branch_queue.pop(nid, None)
                self.gen_queue.pop(nid, None)
                if node.parent is not None:
                    self.children[node.parent].remove(nid)
                self.next_id = nid
            elif kind == "edge":
                _, nid, old = op
                self.nodes[nid].edge = old
            elif kind == "dead":
                self.nodes[op[1]].alive = True
            elif kind == "ineq+":
                self.ineq.remove(op[1])
            elif kind == "ineq-":
                self.ineq.add(op[1])
            elif kind == "bq":
                self.branch_queue[op[1]] = None
            elif kind == "gq":
                self.gen_queue[op[1]] = None
        self.dirty.clear()

    # -- queue bookkeeping -------------------------------------------------------

    def mark(self, nid: int) -> None:
        """Queue a node and its tree neighbours after a local state change."""
        for target in (nid, self.nodes[nid].parent, *self.children.get(nid, ())):
            if target is not None:
                self.dirty[target] = None
                self.branch_queue[target] = None
                self.gen_queue[target] = None

    def gen_mark_subtree(self, nid: int) -> None:
        # Label changes can unblock descendants whose blocker pattern involved
        # this node; remote unblocking is caught by the final full sweep.
        stack = list(self.children[nid])
        while stack:
            cur = stack.pop()
            self.gen_queue[cur] = None
            stack.extend(self.children[cur])

    def pop_queue(self, queue: dict[int, None], tag: str) -> int | None:
        while queue:
            nid = next(iter(queue))
            del queue[nid]
            self.trail.append((tag, nid))
            node = self.nodes.get(nid)
            if node is not None and node.alive:
                return nid
        return None

    # -- structure accessors -------------------------------------------------------

    def alive_nodes(self) -> list[_Node]:
        return [n for n in self.nodes.values() if n.alive]

    def distinct(self, a: int, b: int) -> bool:
        return frozenset((a, b)) in self.ineq

    def neighbours(self, x: _Node, role: Role) -> list[_Node]:
        out: list[_Node] = []
        if x.parent is not None and role.inverse() in x.edge:
            parent = self.nodes[x.parent]
            if parent.alive:
                out.append(parent)
        for cid in self.children[x.nid]:
            child = self.nodes[cid]
            if child.alive and role in child.edge:
                out.append(child)
        return out

    def prune(self, nid: int) -> None:
        self.set_dead(nid)
        for cid in list(self.children[nid]):
            if self.nodes[cid].alive:
                self.prune(cid)

    def merge(self, src: int, tgt: int) -> None:
        """Merge successor `src` into co-neighbour `tgt` and prune its subtree."""
        s = self.nodes[src]
        t = self.nodes[tgt]
        for c in list(s.label):
            self.add_concept(tgt, c)
        if t.parent is not None and t.parent == s.parent:
            self.set_edge(tgt, t.edge | s.edge)
        elif s.parent is not None and t.nid == self.nodes[s.parent].parent:
            x = self.nodes[s.parent]
            self.set_edge(x.nid, x.edge | frozenset(r.inverse() for r in s.edge))
        else:
            raise AssertionError("merge of non-co-neighbouring nodes")
        for pair in [p for p in self.ineq if src in p]:
            other = next(iter(pair - {src}), tgt)
            self.del_ineq(pair)
            self.add_ineq(tgt, other)
        self.prune(src)
        self.mark(tgt)

    # -- deterministic saturation ---------------------------------------------

    def saturate(self) -> None:
        while self.dirty:
            nid = next(iter(self.dirty))
            del self.dirty[nid]
            node = self.nodes.get(nid)
            if node is None or not node.alive:
                continue
            self.spend()
            self.process(node)

    def process(self, node: _Node) -> None:
        label = node.label
        for c in list(label):
            if isinstance(c, Bot):
                raise _Clash
            if isinstance(c, Not) and c.arg in label:
                raise _Clash
            if isinstance(c, And):
                self.add_concept(node.nid, c.left)
                self.add_concept(node.nid, c.right)
            elif isinstance(c, Name):
                for u in self.unfold.get(c.name, ()):
                    self.add_concept(node.nid, u)
            elif isinstance(c, Or):
                if c.left in label or c.right in label:
                    continue
                blocked_l = neg(c.left) in label
                blocked_r = neg(c.right) in label
                if blocked_l and blocked_r:
                    raise _Clash
                if blocked_l:
                    self.add_concept(node.nid, c.right)
                elif blocked_r:
                    self.add_concept(node.nid, c.left)
            elif isinstance(c, AtMost):
                if c.count == 0:
                    complement = neg(c.arg)
                    for y in self.neighbours(node, c.role):
                        self.add_concept(y.nid, complement)
                holders = [y for y in self.neighbours(node, c.role) if c.arg in y.label]
                if len(holders) > c.count and self.distinct_subset(holders, c.count + 1):
                    raise _Clash

    def distinct_subset(self, nodes: list[_Node], size: int) -> bool:
        if len(nodes) < size:
            return False
        for combo in combinations(nodes, size):
            if all(self.distinct(a.nid, b.nid) for a, b in combinations(combo, 2)):
                return True
        return False

    # -- branching ------------------------------------------------------------------

    def branch_at(self, node: _Node) -> list[Callable[[], None]] | None:
        """Branch alternatives rooted at this node: disjunction, choose, merge."""
        choose_hit: list[Callable[[], None]] | None = None
        merge_hit: list[Callable[[], None]] | None = None
        for c in node.label:
            if isinstance(c, Or) and c.left not in node.label and c.right not in node.label:
                nid = node.nid
                return [
                    lambda nid=nid, k=c.left: self.add_concept(nid, k),
                    lambda nid=nid, k=c.right: self.add_concept(nid, k),
                ]
            if isinstance(c, AtMost):
                if choose_hit is None and c.count >= 1:
                    complement = neg(c.arg)
                    for y in self.neighbours(node, c.role):
                        if c.arg not in y.label and complement not in y.label:
                            yid = y.nid
                            choose_hit = [
                                lambda yid=yid, k=c.arg: self.add_concept(yid, k),
                                lambda yid=yid, k=complement: self.add_concept(yid, k),
                            ]
                            break
                if merge_hit is None:
                    holders = [y for y in self.neighbours(node, c.role) if c.arg in y.label]
                    if len(holders) > c.count:
                        pairs = [
                            (a, b)
                            for a, b in combinations(holders, 2)
                            if not self.distinct(a.nid, b.nid)
                        ]
                        if pairs:
                            merge_hit = [self._merge_action(node, a, b) for a, b in pairs]
        return choose_hit or merge_hit

    def find_branch(self, full: bool = False) -> list[Callable[[], None]] | None:
        if full:
            for node in self.alive_nodes():
                alts = self.branch_at(node)
                if alts is not None:
                    return alts
            return None
        while True:
            nid = self.pop_queue(self.branch_queue, "bq")
            if nid is None:
                return None
            alts = self.branch_at(self.nodes[nid])
            if alts is not None:
                return alts

    def _merge_action(self, x: _Node, a: _Node, b: _Node) -> Callable[[], None]:
        # Merge into the predecessor when one side is x's parent, else into
        # the older node; the source must be a successor of x.
        if a.nid == x.parent:
            src, tgt = b.nid, a.nid
        elif b.nid == x.parent:
            src, tgt = a.nid, b.nid
        else:
            src, tgt = (b.nid, a.nid) if a.nid < b.nid else (a.nid, b.nid)
        return lambda: self.merge(src, tgt)

    # -- generation -------------------------------------------------------------------

    def generate_at(self, node: _Node, status: dict[int, bool]) -> bool:
        for c in node.label:
            if not isinstance(c, AtLeast):
                continue
            holders = [y for y in self.neighbours(node, c.role) if c.arg in y.label]
            if self.distinct_subset(holders, c.count):
                continue
            if status[node.nid]:
                return False
            fresh = []
            for _ in range(c.count):
                y = self.new_node(node.nid, frozenset({c.role}))
                self.add_concept(y.nid, Top())
                self.add_concept(y.nid, c.arg)
                for u in self.universal:
                    self.add_concept(y.nid, u)
                fresh.append(y.nid)
            for a, b in combinations(fresh, 2):
                self.add_ineq(a, b)
            return True
        return False

    def generate(self, full: bool = False) -> bool:
        status: dict[int, bool] | None = None
        if full:
            status = self.blocked_map()
            return any(self.generate_at(node, status) for node in self.alive_nodes())
        while True:
            nid = self.pop_queue(self.gen_queue, "gq")
            if nid is None:
                return False
            if status is None:
                status = self.blocked_map()
            if self.generate_at(self.nodes[nid], status):
                return True

    def blocked_map(self) -> dict[int, bool]:
        """Blocked status of every alive node, oldest-first anywhere blocking.

        A node is directly blocked when an older unblocked node carries the
        same label, predecessor label, and incoming edge label; descendants of
        blocked nodes are blocked too.  Only unblocked nodes may serve as
        blockers, which the oldest-first pass guarantees.
        """
        status: dict[int, bool] = {}
        patterns: set[tuple] = set()
        for nid in sorted(self.nodes):
            node = self.nodes[nid]
            if not node.alive:
                continue
            if node.parent is None:
                status[nid] = False
                continue
            parent = self.nodes[node.parent]
            pattern = (node.edge, node.fingerprint(), parent.fingerprint())
            here = status.get(node.parent, False) or pattern in patterns
            status[nid] = here
            if not here:
                patterns.add(pattern)
        return status

    # -- driver ---------------------------------------------------------------------

    def run(self) -> bool:
        root = self.new_node(None, frozenset())
        self.add_concept(root.nid, Top())
        self.add_concept(root.nid, self.query)
        for c in self.universal:
            self.add_concept(root.nid, c)
        frames: list[tuple[int, list[Callable[[], None]], int]] = []

        def backtrack() -> bool:
            while frames:
                mark, alts, nxt = frames.pop()
                self.rewind(mark)
                if nxt < len(alts):
                    frames.append((mark, alts, nxt + 1))
                    alts[nxt]()
                    return True
            return False

        def attempt() -> bool | None:
            """One expansion step; True when complete, None to continue."""
            self.saturate()
            alts = self.find_branch()
            if alts is not None:
                if self.seed:
                    self.rng.shuffle(alts)
                frames.append((len(self.trail), alts, 1))
                alts[0]()
                return None
            if self.generate():
                return None
            # Queues are empty: verify completion with one full sweep before
            # trusting the bookkeeping.
            alts = self.find_branch(full=True)
            if alts is not None:
                frames.append((len(self.trail), alts, 1))
                alts[0]()
                return None
            if self.generate(full=True):
                return None
            return True

        while True:
            self.spend()
            try:
                if attempt():
                    return True
            except _Clash:
                self.dirty.clear()
                if not backtrack():
                    return False


# ---------------------------------------------------------------------------
# Public interface
# ---------------------------------------------------------------------------


class TableauResult:
    """Outcome of a satisfiability call.

    `model` is a finite interpretation extracted from the completion tree when
    no blocking was involved; blocked completions stand for infinite models
    and carry no finite witness.
    """

    def __init__(self, satisfiable: bool, model: Interp | None, used_blocking: bool):
        self.satisfiable = satisfiable
        self.model = model
        self.used_blocking = used_blocking


def solve(
    concept: Concept,
    tbox: TBox,
    *,
    node_budget: int = 10**6,
    seed: int = 0,
) -> TableauResult:
    engine = _Engine(concept, tbox, node_budget, seed)
    if not engine.run():
        return TableauResult(False, None, False)
    blocked = any(engine.blocked_map().values())
    model = None if blocked else _extract_model(engine)
    return TableauResult(True, model, blocked)


def is_satisfiable(
    concept: Concept,
    tbox: TBox,
    *,
    node_budget: int = 10**6,
    seed: int = 0,
) -> bool:
    """True iff some model of the TBox gives the concept a non-empty extension."""
    return solve(concept, tbox, node_budget=node_budget, seed=seed).satisfiable


def check_tbox_satisfiable(tbox: TBox, *, node_budget: int = 10**6, seed: int = 0) -> bool:
    return is_satisfiable(Top(), tbox, node_budget=node_budget, seed=seed)


def _extract_model(engine: _Engine) -> Interp:
    alive = engine.alive_nodes()
    index = {n.nid: i for i, n in enumerate(alive)}
    concepts: dict[str, set[int]] = {}
    roles: dict[str, set[tuple[int, int]]] = {}
    for n in alive:
        for c in n.label:
            if isinstance(c, Name):
                concepts.setdefault(c.name, set()).add(index[n.nid])
        if n.parent is not None:
            p = index[n.parent]
            for r in n.edge:
                pair = (p, index[n.nid]) if not r.inverted else (index[n.nid], p)
                roles.setdefault(r.name, set()).add(pair)
    return Interp(
        size=len(alive),
        concepts={k: frozenset(v) for k, v in concepts.items()},
        roles={k: frozenset(v) for k, v in roles.items()},
    )
