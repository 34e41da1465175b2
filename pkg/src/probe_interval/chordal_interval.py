"""Maximal cliques of chordal graphs and clique orderings of interval graphs.

The int-indexed functions take an adjacency list over ``0..n-1`` and are what
the recognition pipeline calls.  :func:`chordal_cliques` and
:func:`interval_clique_order` accept any mapping ``vertex -> neighbours`` and
return a :class:`BinaryMatrix` with one row per vertex and one column per
maximal clique.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

from .errors import InvalidInput
from .pq_tree import PQBuilder
from .sparse_matrix import BinaryMatrix


def mcs_order(adj: Sequence[Sequence[int]]) -> tuple[list[int], list[int]]:
    """Maximum cardinality search.

    Returns the visit order and, per visited position, the number of
    already-visited neighbours at the time of the visit.
    """
    n = len(adj)
    label = [0] * n
    visited = [False] * n
    buckets: list[dict] = [dict() for _ in range(n + 1)]
    for v in range(n):
        buckets[0][v] = None
    top = 0
    order = []
    labels = []
    for _ in range(n):
        while not buckets[top]:
            top -= 1
        # smallest-inserted first keeps the search deterministic
        v = next(iter(buckets[top]))
        del buckets[top][v]
        visited[v] = True
        order.append(v)
        labels.append(label[v])
        for w in adj[v]:
            if not visited[w]:
                k = label[w]
                del buckets[k][w]
                label[w] = k + 1
                buckets[k + 1][w] = None
                if k + 1 > top:
                    top = k + 1
    return order, labels


def is_perfect_elimination(adj: Sequence[Sequence[int]], order: Sequence[int]) -> bool:
    """True iff the reverse of ``order`` is a perfect elimination ordering.

    For each vertex v, its earlier neighbours minus the latest of them (its
    parent) must all be adjacent to the parent.
    """
    n = len(adj)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    need: list[list[int]] = [[] for _ in range(n)]
    for v in order:
        earlier = [w for w in adj[v] if pos[w] < pos[v]]
        if len(earlier) < 2:
            continue
        parent = max(earlier, key=pos.__getitem__)
        need[parent].extend(w for w in earlier if w != parent)
    mark = [-1] * n
    for u in range(n):
        if not need[u]:
            continue
        for w in adj[u]:
            mark[w] = u
        for w in need[u]:
            if mark[w] != u:
                return False
    return True


def maximal_cliques_int(adj: Sequence[Sequence[int]]) -> list[list[int]] | None:
    """Maximal cliques of a chordal graph, or None when it is not chordal."""
    order, labels = mcs_order(adj)
    if not is_perfect_elimination(adj, order):
        return None
    n = len(adj)
    pos = [0] * n
    for i, v in enumerate(order):
        pos[v] = i
    cliques = []
    for i, v in enumerate(order):
        if i + 1 == n or labels[i + 1] <= labels[i]:
            cliques.append([w for w in adj[v] if pos[w] < i] + [v])
    return cliques


def clique_order_int(adj: Sequence[Sequence[int]]):
    """Cliques of an interval graph in a consecutive-ones order.

    Returns ``(cliques, reason)``: the ordered clique list and None, or None
    and one of ``"not-chordal"`` / ``"not-interval"``.
    """
    cliques = maximal_cliques_int(adj)
    if cliques is None:
        return None, "not-chordal"
    rows: list[list[int]] = [[] for _ in range(len(adj))]
    for j, c in enumerate(cliques):
        for v in c:
            rows[v].append(j)
    b = PQBuilder(range(len(cliques)))
    if not b.add_rows(rows):
        return None, "not-interval"
    return [cliques[j] for j in b.frontier()], None


def _index(graph: Mapping[Hashable, Iterable[Hashable]]):
    names = list(graph)
    idx = {v: i for i, v in enumerate(names)}
    adj: list[list[int]] = [[] for _ in names]
    for v, nbrs in graph.items():
        i = idx[v]
        seen = set()
        for w in nbrs:
            if w not in idx:
                raise InvalidInput(f"neighbour {w!r} of {v!r} is not a vertex")
            if w == v:
                raise InvalidInput(f"self-loop at {v!r}")
            j = idx[w]
            if j not in seen:
                seen.add(j)
                adj[i].append(j)
    for i, nb in enumerate(adj):
        for j in nb:
            if i not in adj[j]:
                raise InvalidInput("adjacency is not symmetric")
    return names, adj


def _clique_matrix(names, cliques) -> BinaryMatrix:
    rows = {v: [] for v in names}
    for j, c in enumerate(cliques):
        for i in c:
            rows[names[i]].append(j)
    return BinaryMatrix(rows, list(range(len(cliques))))


def chordal_cliques(graph: Mapping[Hashable, Iterable[Hashable]]) -> BinaryMatrix | None:
    """Clique matrix of a chordal graph, or None if the graph is not chordal.

    Rows are vertices and columns ``0..k-1`` are the maximal cliques.
    """
    names, adj = _index(graph)
    cliques = maximal_cliques_int(adj)
    if cliques is None:
        return None
    return _clique_matrix(names, cliques)


def interval_clique_order(graph: Mapping[Hashable, Iterable[Hashable]]) -> BinaryMatrix | None:
    """Consecutive-ones ordered clique matrix, or None if the graph is not interval."""
    names, adj = _index(graph)
    cliques, _ = clique_order_int(adj)
    if cliques is None:
        return None
    return _clique_matrix(names, cliques)
