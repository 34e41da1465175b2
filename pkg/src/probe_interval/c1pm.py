"""Consecutive-ones probe matrices.

An instance is a matrix whose unknown entries form one block: ``m_r`` holds
the rows R that are fully known, over all columns, and ``m_c`` holds the
columns C that are fully known, over all rows.  A solution is a column order
that makes ``m_r`` consecutive-ones ordered and whose restriction to C makes
``m_c`` consecutive-ones ordered.  The taut completion sets an unknown entry
to 1 exactly when it lies between 1's of its row.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from . import pq_tree
from .errors import InvalidInput
from .pq_tree import PQNode, PQTree, LEAF, Q
from .sparse_matrix import BinaryMatrix


@dataclass(frozen=True)
class C1PMInstance:
    m_r: BinaryMatrix
    m_c: BinaryMatrix

    def __post_init__(self):
        cols_r = set(self.m_r.columns)
        cols_c = set(self.m_c.columns)
        if not cols_c <= cols_r:
            raise InvalidInput("columns of m_c must be columns of m_r")
        for r in self.m_r.rows:
            if r not in self.m_c:
                raise InvalidInput(f"row {r!r} of m_r is missing from m_c")
            if self.m_r.row(r) & cols_c != self.m_c.row(r):
                raise InvalidInput(f"row {r!r} disagrees between m_r and m_c")

    @property
    def R(self) -> frozenset:
        return frozenset(self.m_r.rows)

    @property
    def C(self) -> frozenset:
        return frozenset(self.m_c.columns)


@dataclass
class C1PMSolution:
    """A solution order with the taut endpoint table and the trees it came from."""

    order: tuple
    endpoints: dict
    t1: PQTree | None
    t2: PQTree
    t3: PQTree | None
    t4: PQTree | None
    tau: tuple
    labels: dict = field(repr=False, default_factory=dict)

    def position(self, col) -> int:
        return self.order.index(col)


def solve(inst: C1PMInstance) -> C1PMSolution | None:
    """A solution of the instance, or None when none exists."""
    t2 = pq_tree.build(inst.m_r)
    if t2 is None:
        return None
    cols_c = list(inst.m_c.columns)
    if cols_c:
        t1 = pq_tree.build(inst.m_c)
        if t1 is None:
            return None
        t3 = pq_tree.restrict(t2, cols_c)
        t4 = pq_tree.intersect(t1, t3)
        if t4 is None:
            return None
        tau = t4.canonical_ordering()
    else:
        t1 = t3 = t4 = None
        tau = ()
    rank = {c: i for i, c in enumerate(tau)}
    order, labels = _order_by_labels(t2, rank)
    endpoints = _taut_endpoints(inst, order)
    return C1PMSolution(order, endpoints, t1, t2, t3, t4, tau, labels)


def _order_by_labels(t2: PQTree, rank: dict):
    """Arrange T2 so that its C-leaves appear in ``rank`` order."""
    if t2.root is None:
        return (), {}
    label: dict[int, int | None] = {}
    arranged: dict[int, PQNode] = {}
    for x in t2.nodes():
        if x.kind == LEAF:
            label[id(x)] = rank.get(x.leaf)
            arranged[id(x)] = x
            continue
        kids = [arranged[id(c)] for c in x.children]
        labs = [label[id(c)] for c in x.children]
        present = [l for l in labs if l is not None]
        label[id(x)] = min(present) if present else None
        if x.kind == Q:
            if len(present) >= 2 and present[0] > present[-1]:
                kids.reverse()
        else:
            # labelled children by label, then the rest in stored order
            idx = sorted(range(len(kids)),
                         key=lambda i: (0, labs[i]) if labs[i] is not None else (1, i))
            kids = [kids[i] for i in idx]
        arranged[id(x)] = PQNode(x.kind, kids)
    leaf_labels = {x.leaf: label[id(x)] for x in t2.nodes() if x.kind == LEAF}
    return PQTree(arranged[id(t2.root)]).frontier(), leaf_labels


def _taut_endpoints(inst: C1PMInstance, order) -> dict:
    pos = {c: i for i, c in enumerate(order)}
    ends = {}
    in_r = set(inst.m_r.rows)
    for r in inst.m_c.rows:
        cols = inst.m_r.row(r) if r in in_r else inst.m_c.row(r)
        if not cols:
            ends[r] = None
            continue
        ps = [pos[c] for c in cols]
        ends[r] = (min(ps), max(ps))
    return ends


def taut_lookup(sol: C1PMSolution, row: Hashable, position: int) -> int:
    """Entry of the taut matrix at ``row`` and 0-based column ``position``."""
    if row not in sol.endpoints:
        raise InvalidInput(f"unknown row {row!r}")
    if not 0 <= position < len(sol.order):
        raise InvalidInput(f"position {position} out of range")
    e = sol.endpoints[row]
    return int(e is not None and e[0] <= position <= e[1])


def taut_matrix(sol: C1PMSolution) -> BinaryMatrix:
    """The taut completion as a sparse matrix in solution column order."""
    order = sol.order
    rows = []
    for r, e in sol.endpoints.items():
        rows.append((r, order[e[0]:e[1] + 1] if e is not None else ()))
    return BinaryMatrix(rows, order)


def is_unique(inst: C1PMInstance, sol: C1PMSolution) -> bool:
    """Whether ``sol`` is the only solution up to reversal.

    The checks run in a fixed order and the first one that applies decides.
    """
    t2 = sol.t2
    if len(inst.m_r.columns) <= 2:
        return True
    if pq_tree.single_q(t2):
        return True
    if len(inst.m_c.columns) >= 3 and not pq_tree.single_q(sol.t4):
        return False
    cset = inst.C
    labelled = {}
    for x in t2.nodes():
        if x.kind == LEAF:
            labelled[id(x)] = x.leaf in cset
        else:
            labelled[id(x)] = any(labelled[id(c)] for c in x.children)
    for x in t2.internal_nodes():
        if x.is_p and not all(labelled[id(c)] for c in x.children):
            return False
    for x in t2.internal_nodes():
        if x.is_q and sum(labelled[id(c)] for c in x.children) < 2:
            return False
    return True
