"""Brute-force references and random instance generators.

Everything here is exponential or quadratic on purpose: these routines are
the independent side of the property tests and must not share logic with the
recognition pipeline beyond the model checkers.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Hashable, Sequence

from .c1pm import C1PMInstance
from .errors import InvalidInput, RefusedParams, RefusedTooLarge
from .recognition import (
    CLIQUE, SEMI_CLIQUE, SIMPLICIAL, PartitionedGraph, ProbeIntervalModel, _normal_int,
    _verify_int,
)
from .sparse_matrix import BinaryMatrix

RECOGNIZE_LIMIT = 16
ENUMERATE_LIMIT = 7


# ---------------------------------------------------------------------------
# Consecutive-ones references


def c1p_orderings(rows: Sequence[frozenset], columns: Sequence[Hashable]) -> set[tuple]:
    """All column permutations under which every row is consecutive."""
    rows = [r for r in rows if len(r) > 1]
    out = set()
    for perm in itertools.permutations(columns):
        pos = {c: i for i, c in enumerate(perm)}
        if all(max(pos[c] for c in r) - min(pos[c] for c in r) + 1 == len(r) for r in rows):
            out.add(perm)
    return out


def brute_force_c1pm(inst: C1PMInstance) -> list[tuple]:
    """Every solution order of a C1PM instance (small instances only)."""
    cols = inst.m_r.columns
    if len(cols) > 8:
        raise RefusedTooLarge("C1PM brute force is limited to 8 columns")
    r_rows = [inst.m_r.row(r) for r in inst.m_r.rows]
    c_rows = [inst.m_c.row(r) for r in inst.m_c.rows]
    cset = set(inst.m_c.columns)
    out = []
    for perm in c1p_orderings(r_rows, cols):
        sub = [c for c in perm if c in cset]
        pos = {c: i for i, c in enumerate(sub)}
        if all(not r or max(pos[c] for c in r) - min(pos[c] for c in r) + 1 == len(r)
               for r in c_rows):
            out.append(perm)
    return sorted(out, key=lambda p: [str(c) for c in p])


def solution_classes(orders) -> set[tuple]:
    """Orders modulo reversal."""
    return {min(o, o[::-1], key=lambda p: [str(c) for c in p]) for o in orders}


# ---------------------------------------------------------------------------
# Model search


def _model_from_columns(g: PartitionedGraph, cols: Sequence[frozenset]) -> ProbeIntervalModel:
    first: dict = {}
    last: dict = {}
    for j, col in enumerate(cols):
        for v in col:
            first.setdefault(v, j)
            last[v] = j
    intervals = {g.names[v]: (first[v], last[v]) for v in range(g.n)}
    model = ProbeIntervalModel([""] * len(cols), intervals)
    model.classes = classify_columns(g, model)
    return model


def brute_force_recognize(g: PartitionedGraph, max_cols: int | None = None) -> ProbeIntervalModel | None:
    """Any model of ``g``, or None when none exists.

    Vertices are started one at a time; a started vertex stays open exactly
    until all of its neighbours have started.  Starting a vertex is allowed
    when it may meet every open vertex.  Each start contributes one column,
    so models use at most ``n`` columns, within the ``max_cols`` grid (2n by
    default).  Columns contained in a neighbouring column are dropped.
    """
    n = g.n
    if n > RECOGNIZE_LIMIT:
        raise RefusedTooLarge(f"{n} vertices exceed the brute-force limit {RECOGNIZE_LIMIT}")
    if max_cols is None:
        max_cols = 2 * n
    if n and max_cols < n:
        raise InvalidInput("the column grid must allow at least n columns")
    if n == 0:
        return ProbeIntervalModel([], {})
    probe = g.probe
    nbmask = [0] * n
    for v in range(n):
        for w in g.adj[v]:
            nbmask[v] |= 1 << w
    full = (1 << n) - 1

    def open_set(started: int) -> int:
        return sum(1 << v for v in range(n)
                   if started >> v & 1 and nbmask[v] & ~started)

    @lru_cache(maxsize=None)
    def search(started: int):
        if started == full:
            return ()
        active = open_set(started)
        for u in range(n):
            if started >> u & 1:
                continue
            ok = True
            for v in range(n):
                if active >> v & 1 and (probe[u] or probe[v]) and not nbmask[u] >> v & 1:
                    ok = False
                    break
            if not ok:
                continue
            rest = search(started | 1 << u)
            if rest is not None:
                return (u,) + rest
        return None

    order = search(0)
    search.cache_clear()
    if order is None:
        return None
    cols = []
    started = 0
    for u in order:
        col = open_set(started) | 1 << u
        cols.append(frozenset(v for v in range(n) if col >> v & 1))
        started |= 1 << u
    # a column inside a neighbouring column carries no vertex or meeting of its own
    cols = [c for j, c in enumerate(cols)
            if not (j > 0 and c <= cols[j - 1]) and not (j + 1 < len(cols) and c < cols[j + 1])]
    model = _model_from_columns(g, cols)
    iv = [model.intervals[name] for name in g.names]
    assert _verify_int(g.probe, g.adj, iv, model.n_columns)
    return model


def _canonical_cols(cols: Sequence[frozenset]) -> tuple:
    fwd = tuple(tuple(sorted(c)) for c in cols)
    return min(fwd, fwd[::-1])


def brute_force_normal_models(g: PartitionedGraph, bound: int = ENUMERATE_LIMIT) -> list[ProbeIntervalModel]:
    """All normal models of ``g`` up to reversal.

    Columns are swept left to right.  Between two columns a nonempty set of
    open vertices closes and a nonempty set of new vertices starts, with a
    probe among them; a vertex may close only once all its neighbours have
    started.
    """
    n = g.n
    if n > bound:
        raise RefusedTooLarge(f"{n} vertices exceed the enumeration bound {bound}")
    if n == 0:
        return [ProbeIntervalModel([], {})]
    probe = g.probe
    nb = [set(a) for a in g.adj]
    found: dict = {}

    def can_meet(u, v):
        return v in nb[u] or not (probe[u] or probe[v])

    def closable(v, started):
        return nb[v] <= started

    def subsets(items):
        items = list(items)
        for r in range(1, len(items) + 1):
            yield from itertools.combinations(items, r)

    def extend(cols, started, active, prev_closed):
        unstarted = [v for v in range(n) if v not in started]
        closable_now = [v for v in active if closable(v, started)]
        if not unstarted:
            if set(closable_now) == active:
                # every open vertex ends in the last column
                if _normal_int(probe, _intervals(cols), len(cols)):
                    key = _canonical_cols(cols)
                    found.setdefault(key, list(cols))
            return
        for close in subsets(closable_now):
            close = set(close)
            carried = active - close
            for start in subsets(unstarted):
                if not any(probe[v] for v in close) and not any(probe[v] for v in start):
                    continue
                ok = all(can_meet(u, v) for u in start for v in carried)
                ok = ok and all(can_meet(u, v) for u, v in itertools.combinations(start, 2))
                if not ok:
                    continue
                new_active = carried | set(start)
                extend(cols + [frozenset(new_active)], started | set(start), new_active, close)

    def _intervals(cols):
        first, last = {}, {}
        for j, col in enumerate(cols):
            for v in col:
                first.setdefault(v, j)
                last[v] = j
        return [(first[v], last[v]) for v in range(n)]

    for start in subsets(range(n)):
        if all(can_meet(u, v) for u, v in itertools.combinations(start, 2)):
            extend([frozenset(start)], set(start), set(start), set())
    models = [_model_from_columns(g, cols) for _, cols in sorted(found.items())]
    return models


def equivalent_models(a: ProbeIntervalModel, b: ProbeIntervalModel) -> bool:
    """Equal as labelled matrices, or equal after reversing one of them."""
    ca = [frozenset(c) for c in a.column_sets()]
    cb = [frozenset(c) for c in b.column_sets()]
    return ca == cb or ca == cb[::-1]


def classify_columns(g: PartitionedGraph, model: ProbeIntervalModel) -> list[str]:
    """Clique, semi-clique or simplicial for every column of a normal model.

    The classes can overlap: a semi-clique column whose probe set is ``N(x)``
    for a simplicial ``x`` placed there is reported as simplicial.
    """
    cols = model.column_sets()
    idx = g.index
    out = []
    for col in cols:
        vs = [idx[v] for v in col]
        ps = [v for v in vs if g.probe[v]]
        pset = set(ps)
        is_clique = all(pset - {v} <= set(g.adj[v]) for v in ps)
        if is_clique and ps:
            common = None
            for v in ps:
                s = {w for w in g.adj[v] if g.probe[w]}
                common = s if common is None else common & s
            if not (common - pset):
                out.append(CLIQUE)
                continue
        single = [v for v in vs if not g.probe[v]
                  and model.intervals[g.names[v]][0] == model.intervals[g.names[v]][1]
                  and set(g.adj[v]) == pset]
        out.append(SIMPLICIAL if single else SEMI_CLIQUE)
    return out


# ---------------------------------------------------------------------------
# Generator


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of :func:`random_normal_model`.

    ``probes`` and ``nonprobes`` are the vertex budgets drawn at random;
    repairs that keep the model normal may add a few extra probes.
    ``span`` is the mean number of columns a multi-column probe covers,
    ``nonprobe_span`` the same for non-probes, and ``single`` the chance
    that a new non-probe occupies one column only.  ``gap`` is the chance
    per column of starting a lone non-probe that spans two columns
    without a clique column, which yields non-probes meeting no maximal
    probe clique.
    """

    probes: int = 10
    nonprobes: int = 5
    span: float = 3.0
    nonprobe_span: float = 2.0
    single: float = 0.3
    starters: int = 2
    gap: float = 0.15
    seed: int = 0


def random_normal_model(params: GeneratorParams) -> tuple[ProbeIntervalModel, PartitionedGraph]:
    """A random connected normal model and the graph it represents."""
    if params.probes < 1:
        raise RefusedParams("at least one probe is required")
    if params.nonprobes < 0 or min(params.span, params.nonprobe_span) < 1 or params.starters < 1:
        raise RefusedParams("nonprobes >= 0, spans >= 1 and starters >= 1 are required")
    if not (0 <= params.single <= 1 and 0 <= params.gap <= 1):
        raise RefusedParams("single and gap must be probabilities")
    rng = random.Random(params.seed)
    budget = [params.probes, params.nonprobes]
    probe: list[bool] = []
    lo: list[int] = []
    hi: list[int] = []
    p_close = (1.0 / params.nonprobe_span, 1.0 / params.span)
    active: list[int] = []
    prev_closed: list[int] = []
    j = 0

    def new_vertex(is_probe):
        probe.append(is_probe)
        lo.append(j)
        hi.append(-1)
        if is_probe and budget[0] > 0:
            budget[0] -= 1
        elif not is_probe:
            budget[1] -= 1
        return len(probe) - 1

    def draw_kind():
        total = budget[0] + budget[1]
        return rng.random() * total < budget[0]

    gap_z = None
    while True:
        exhausted = budget[0] + budget[1] == 0
        follow, gap_z = gap_z, None
        starters: list[int] = []
        if follow is not None:
            # close the gap non-probe next to a fresh probe; no probe ends here
            starters.append(new_vertex(True))
        elif (j > 0 and not exhausted and budget[1] > 0 and rng.random() < params.gap
              and any(probe[v] for v in prev_closed) and any(probe[v] for v in active)):
            # start only a non-probe: neither this column nor the next is a clique column
            gap_z = new_vertex(False)
            starters.append(gap_z)
        elif j == 0 or not exhausted:
            for _ in range(1 + rng.randrange(params.starters)):
                if budget[0] + budget[1] == 0:
                    break
                starters.append(new_vertex(draw_kind()))
        if j == 0 and not any(probe[v] for v in starters):
            starters.append(new_vertex(True))
        if j > 0 and not (any(probe[v] for v in prev_closed) or any(probe[v] for v in starters)):
            # minimality with the previous column
            starters.append(new_vertex(True))
        if not starters:
            starters.append(new_vertex(True))
        singles = {v for v in starters if not probe[v] and v != gap_z and rng.random() < params.single}
        column = active + starters

        if gap_z is not None:
            closers = [v for v in active if probe[v] and rng.random() < p_close[1]]
            if not closers:
                closers = [rng.choice([v for v in active if probe[v]])]
        elif follow is not None:
            closers = [follow] + [v for v in active if v != follow and not probe[v]
                                  and rng.random() < p_close[0]]
        elif exhausted and (not active or rng.random() < 0.5):
            closers = list(column)
        else:
            closers = [v for v in column if v in singles or rng.random() < p_close[probe[v]]]
            if len(closers) == len(column):
                keep = [v for v in closers if v not in singles] or closers
                closers.remove(rng.choice(keep))
            if not closers:
                closers.append(rng.choice(column))

        def close_new_probe():
            extra = new_vertex(True)
            starters.append(extra)
            column.append(extra)
            closers.append(extra)

        if len(closers) == len(column) and budget[0] + budget[1] > 0:
            # keep the sweep going until the budget is spent
            closers.remove(closers[-1])
            if not closers:
                close_new_probe()
        old = [v for v in closers if lo[v] < j]
        if old and not starters:
            close_new_probe()
        if any(not probe[v] for v in old) and not any(probe[v] for v in starters):
            # taut right ends of old non-probes need a starting probe
            close_new_probe()
        going_on = [v for v in starters if v not in closers]
        if going_on and not closers:
            close_new_probe()
        if any(not probe[v] for v in going_on) and not any(probe[v] for v in closers):
            # taut left ends of new non-probes need a closing probe
            close_new_probe()
        if not any(probe[v] for v in column):
            close_new_probe()
        cset = set(closers)
        for v in closers:
            hi[v] = j
        active = [v for v in column if v not in cset]
        prev_closed = closers
        j += 1
        if not active:
            break
    n = len(probe)
    ncols = j
    # shuffle the vertex declaration order so that input order carries no hint
    perm = list(range(n))
    rng.shuffle(perm)
    names = {}
    pc = nc = 0
    for v in perm:
        if probe[v]:
            names[v] = f"p{pc}"
            pc += 1
        else:
            names[v] = f"x{nc}"
            nc += 1
    g = PartitionedGraph()
    for v in perm:
        g.add_vertex(names[v], probe[v])
    by_start: list[list[int]] = [[] for _ in range(ncols)]
    for v in range(n):
        by_start[lo[v]].append(v)
    edges = []
    open_now: list[int] = []
    for c in range(ncols):
        open_now = [v for v in open_now if hi[v] >= c]
        for u in by_start[c]:
            for w in open_now:
                if probe[u] or probe[w]:
                    edges.append((names[u], names[w]))
            open_now.append(u)
    rng.shuffle(edges)
    for u, w in edges:
        g.add_edge(u, w)
    model = ProbeIntervalModel([""] * ncols, {names[v]: (lo[v], hi[v]) for v in perm})
    model.classes = classify_columns(g, model)
    return model, g


def random_graph(n_probes: int, n_nonprobes: int, p: float, rng: random.Random) -> PartitionedGraph:
    """Erdos-Renyi style partitioned graph with independent non-probes."""
    g = PartitionedGraph([f"p{i}" for i in range(n_probes)], [f"x{i}" for i in range(n_nonprobes)])
    names = g.names
    for a, b in itertools.combinations(range(g.n), 2):
        if (g.probe[a] or g.probe[b]) and rng.random() < p:
            g.add_edge(names[a], names[b])
    return g


def log_uniform_int(rng: random.Random, lo: int, hi: int) -> int:
    return int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))


# ---------------------------------------------------------------------------
# Column deletion with constraint rows


def column_delete_with_constraints(m: BinaryMatrix, c) -> BinaryMatrix:
    """Delete column ``c`` from a consecutive-ones ordered matrix, keeping its PQ tree.

    Every pair of a row with a proper right endpoint at ``c`` and a row with a
    proper left endpoint at ``c`` contributes the union of the two rows as a
    constraint row ``("constraint", l, r)``; then ``c`` is removed.
    """
    if not m.is_c1_ordered():
        raise InvalidInput("matrix is not consecutive-ones ordered")
    j = m.position(c)
    left_ends, right_ends = [], []
    for r in m.rows:
        ps = m.row_positions(r)
        if len(ps) < 2:
            continue
        if ps[-1] == j:
            right_ends.append(r)
        if ps[0] == j:
            left_ends.append(r)
    if not right_ends or not left_ends:
        raise InvalidInput(f"column {c!r} lacks a proper left or right endpoint")
    extra = [(("constraint", l, r), m.row(l) | m.row(r)) for l in right_ends for r in left_ends]
    keep = [x for x in m.columns if x != c]
    grown = m.with_rows(extra)
    return grown.submatrix(cols=keep)
