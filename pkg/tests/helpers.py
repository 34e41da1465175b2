"""Reference implementations and instance builders shared by the tests."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

from probe_interval.c1pm import C1PMInstance
from probe_interval.pq_tree import LEAF, P, Q, PQNode, PQTree
from probe_interval.recognition import PartitionedGraph, ProbeIntervalModel, load_graph
from probe_interval.sparse_matrix import BinaryMatrix

DATA = Path(__file__).parent / "data"


def data_graph(name: str) -> PartitionedGraph:
    return load_graph(DATA / name)


def model_from_columns(cols) -> ProbeIntervalModel:
    iv = {}
    for j, vs in enumerate(cols):
        for v in vs:
            iv.setdefault(v, [j, j])[1] = j
    return ProbeIntervalModel([""] * len(cols), {v: tuple(s) for v, s in iv.items()})


# -- PQ references -------------------------------------------------------------


def brute_orderings(columns, rows) -> set[tuple]:
    """Column permutations under which every row is consecutive."""
    rows = [frozenset(r) for r in rows if len(r) > 1]
    out = set()
    for perm in itertools.permutations(columns):
        pos = {c: i for i, c in enumerate(perm)}
        if all(max(pos[c] for c in r) - min(pos[c] for c in r) + 1 == len(r) for r in rows):
            out.add(perm)
    return out


def project(orders, keep) -> set[tuple]:
    keep = set(keep)
    return {tuple(c for c in o if c in keep) for o in orders}


def random_tree(rng: random.Random, leaves) -> PQTree:
    """A random PQ tree over ``leaves`` (every internal node has 2+ children)."""
    nodes = [PQNode(LEAF, leaf=c) for c in leaves]
    rng.shuffle(nodes)
    while len(nodes) > 1:
        k = rng.randint(2, min(len(nodes), 4))
        kids, nodes = nodes[:k], nodes[k:]
        kind = rng.choice([P, Q]) if k > 2 else P
        nodes.append(PQNode(kind, kids))
        rng.shuffle(nodes)
    return PQTree(nodes[0])


def random_rows(rng: random.Random, columns, nrows: int):
    cols = list(columns)
    return [frozenset(rng.sample(cols, rng.randint(0, len(cols)))) for _ in range(nrows)]


def random_c1_matrix(rng: random.Random, ncols: int, nrows: int, prefix="r") -> BinaryMatrix:
    """A consecutive-ones ordered matrix with random intervals."""
    cols = [f"c{i}" for i in range(ncols)]
    rows = []
    for i in range(nrows):
        a = rng.randrange(ncols)
        b = rng.randrange(a, ncols)
        rows.append((f"{prefix}{i}", cols[a:b + 1]))
    return BinaryMatrix(rows, cols)


def planted_c1pm(rng: random.Random, ncols: int, nrows: int) -> tuple[C1PMInstance, BinaryMatrix]:
    """Erase a random row block times column block of a shuffled C1-ordered matrix."""
    m = random_c1_matrix(rng, ncols, nrows)
    order = list(m.columns)
    rng.shuffle(order)
    m = m.reorder(order)
    star_rows = set(rng.sample(list(m.rows), rng.randint(0, nrows)))
    star_cols = set(rng.sample(order, rng.randint(0, ncols - 1)))
    r_rows = [r for r in m.rows if r not in star_rows]
    c_cols = [c for c in order if c not in star_cols]
    m_r = m.submatrix(rows=r_rows)
    m_c = m.submatrix(cols=c_cols)
    return C1PMInstance(m_r, m_c), m


# -- graphs --------------------------------------------------------------------


def labelled_graphs(n: int, connected: bool = True):
    """Every partitioned graph on ``n`` labelled vertices (probes first)."""
    for k in range(n + 1):
        pairs = [(a, b) for a, b in itertools.combinations(range(n), 2) if a < k]
        for mask in range(1 << len(pairs)):
            g = PartitionedGraph([f"p{i}" for i in range(k)], [f"x{i}" for i in range(n - k)])
            for i, (a, b) in enumerate(pairs):
                if mask >> i & 1:
                    g.add_edge(g.names[a], g.names[b])
            if connected and len(g.components()) > 1:
                continue
            yield g


def atlas_graphs(max_n: int):
    """Partitioned graphs up to isomorphism of the underlying graph, n <= max_n.

    Each unlabelled graph of the networkx atlas is paired with every
    independent set as its non-probes.
    """
    import networkx as nx

    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if n == 0 or n > max_n:
            continue
        verts = list(h.nodes())
        for mask in range(1 << n):
            non = [v for v in verts if mask >> v & 1]
            if any(h.has_edge(a, b) for a, b in itertools.combinations(non, 2)):
                continue
            g = PartitionedGraph([f"v{v}" for v in verts if not mask >> v & 1],
                                 [f"v{v}" for v in non])
            for a, b in h.edges():
                g.add_edge(f"v{a}", f"v{b}")
            yield g


def random_partitioned(rng: random.Random, n: int, density: float) -> PartitionedGraph:
    k = rng.randint(1, n)
    g = PartitionedGraph([f"p{i}" for i in range(k)], [f"x{i}" for i in range(n - k)])
    for a, b in itertools.combinations(range(n), 2):
        if a < k and rng.random() < density:
            g.add_edge(g.names[a], g.names[b])
    return g


def shuffled(g: PartitionedGraph, rng: random.Random) -> PartitionedGraph:
    """Same graph, vertices and edges declared in a random order."""
    order = list(range(g.n))
    rng.shuffle(order)
    h = PartitionedGraph()
    for v in order:
        h.add_vertex(g.names[v], g.probe[v])
    edges = g.edges()
    rng.shuffle(edges)
    for u, v in edges:
        h.add_edge(u, v)
    return h
