"""Recognition of partitioned probe interval graphs.

:func:`recognize` splits the graph into connected components and runs a
:class:`ComponentPipeline` on each one.  The pipeline goes through these
matrices, each a column ordering of the previous one or an extension of it:

* ``M_K``: clique matrix of the probe subgraph, consecutive-ones ordered;
* ``M_K+``: ``M_K`` plus a row ``Q(x)`` for every non-probe in N1;
* ``M_K'`` / ``M_K*``: reordered so that representative binding pairs are
  consecutive;
* ``M_N``: semi-clique columns inserted into the gaps, a normal model of the
  graph without its simplicial non-probes;
* ``M_P``: probe rows of ``M_N`` plus one column per simplicial neighbourhood
  not already present;
* the final model, from the consecutive-ones probe matrix solution on
  ``(M_P, M_N)`` with every simplicial non-probe dropped into its column.

Vertices are integers ``0..n-1`` inside the pipeline; names appear only at
the boundaries.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from . import c1pm
from .chordal_interval import maximal_cliques_int
from .errors import InvalidInput, MalformedInput, NonIndependentNonProbes, Rejected
from .pq_tree import PQBuilder
from .sparse_matrix import BinaryMatrix, group_radix_sort, is_chain

CLIQUE = "clique"
SEMI_CLIQUE = "semi_clique"
SIMPLICIAL = "simplicial"

STAGES = (
    "not-chordal",
    "not-interval-GP",
    "MK-plus-not-C1P",
    "binding-structure",
    "constraints-not-C1P",
    "chain-structure",
    "c1pm-no-solution",
    "model-check",
)


# ---------------------------------------------------------------------------
# Graphs


class PartitionedGraph:
    """Simple graph whose vertices are labelled probe or non-probe.

    Vertices keep their insertion order; ``index`` maps a name to its
    position and ``adj`` holds neighbour positions.
    """

    def __init__(self, probes: Iterable[Hashable] = (), nonprobes: Iterable[Hashable] = (),
                 edges: Iterable[tuple] = ()):
        self.names: list = []
        self.index: dict = {}
        self.probe: list[bool] = []
        self.adj: list[list[int]] = []
        self._edges: set = set()
        for v in probes:
            self.add_vertex(v, True)
        for v in nonprobes:
            self.add_vertex(v, False)
        for u, v in edges:
            self.add_edge(u, v)

    def add_vertex(self, name, probe: bool) -> int:
        if name in self.index:
            raise MalformedInput(f"vertex {name!r} declared twice")
        i = len(self.names)
        self.names.append(name)
        self.index[name] = i
        self.probe.append(bool(probe))
        self.adj.append([])
        return i

    def add_edge(self, u, v):
        for w in (u, v):
            if w not in self.index:
                raise MalformedInput(f"edge uses undeclared vertex {w!r}")
        a, b = self.index[u], self.index[v]
        if a == b:
            raise MalformedInput(f"self-loop at {u!r}")
        key = (a, b) if a < b else (b, a)
        if key in self._edges:
            raise MalformedInput(f"duplicate edge {u!r} {v!r}")
        if not self.probe[a] and not self.probe[b]:
            raise NonIndependentNonProbes(f"edge joins non-probes {u!r} and {v!r}")
        self._edges.add(key)
        self.adj[a].append(b)
        self.adj[b].append(a)

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def m(self) -> int:
        return len(self._edges)

    def edges(self) -> list[tuple]:
        return [(self.names[a], self.names[b]) for a, b in sorted(self._edges)]

    def is_probe(self, name) -> bool:
        return self.probe[self.index[name]]

    def neighbours(self, name) -> list:
        return [self.names[w] for w in self.adj[self.index[name]]]

    @property
    def probes(self) -> list:
        return [v for v, p in zip(self.names, self.probe) if p]

    @property
    def nonprobes(self) -> list:
        return [v for v, p in zip(self.names, self.probe) if not p]

    def components(self) -> list[list[int]]:
        """Vertex positions of each connected component, in input order."""
        seen = [False] * self.n
        out = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                v = queue.popleft()
                for w in self.adj[v]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comp.sort()
            out.append(comp)
        return out

    def subgraph(self, verts: Sequence[int]) -> "PartitionedGraph":
        h = PartitionedGraph()
        keep = set(verts)
        for v in verts:
            h.add_vertex(self.names[v], self.probe[v])
        for v in verts:
            for w in self.adj[v]:
                if w in keep and v < w:
                    h._add_edge_idx(h.index[self.names[v]], h.index[self.names[w]])
        return h

    def _add_edge_idx(self, a: int, b: int):
        self._edges.add((a, b) if a < b else (b, a))
        self.adj[a].append(b)
        self.adj[b].append(a)

    def __repr__(self) -> str:
        return f"PartitionedGraph(n={self.n}, m={self.m}, probes={sum(self.probe)})"


def parse_graph(text: str) -> PartitionedGraph:
    """Parse the line format: ``p name``, ``n name``, ``e u v``; ``#`` starts a comment."""
    g = PartitionedGraph()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kind = toks[0]
        try:
            if kind in ("p", "n") and len(toks) == 2:
                g.add_vertex(toks[1], kind == "p")
            elif kind == "e" and len(toks) == 3:
                g.add_edge(toks[1], toks[2])
            else:
                raise MalformedInput(f"cannot parse {line!r}")
        except NonIndependentNonProbes as exc:
            raise NonIndependentNonProbes(f"line {lineno}: {exc}") from None
        except MalformedInput as exc:
            raise MalformedInput(f"line {lineno}: {exc}") from None
    return g


def load_graph(source) -> PartitionedGraph:
    """Read a graph from a path or an open text file."""
    if hasattr(source, "read"):
        return parse_graph(source.read())
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8") as fh:
            return parse_graph(fh.read())
    raise InvalidInput(f"cannot load a graph from {type(source).__name__}")


def format_graph(g: PartitionedGraph, header: str | None = None) -> str:
    lines = [f"# {header}"] if header else []
    for v, p in zip(g.names, g.probe):
        lines.append(f"{'p' if p else 'n'} {v}")
    for u, v in g.edges():
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Models


@dataclass
class ProbeIntervalModel:
    """Column classes left to right and each vertex's ``(first, last)`` column."""

    classes: list
    intervals: dict

    @property
    def n_columns(self) -> int:
        return len(self.classes)

    @property
    def ones(self) -> int:
        return sum(b - a + 1 for a, b in self.intervals.values())

    def column_sets(self) -> list[list]:
        cols: list[list] = [[] for _ in self.classes]
        for v, (a, b) in self.intervals.items():
            for j in range(a, b + 1):
                cols[j].append(v)
        return cols

    @property
    def matrix(self) -> BinaryMatrix:
        return BinaryMatrix(((v, range(a, b + 1)) for v, (a, b) in self.intervals.items()),
                            range(len(self.classes)))

    def reversed(self) -> "ProbeIntervalModel":
        k = len(self.classes) - 1
        return ProbeIntervalModel(self.classes[::-1],
                                  {v: (k - b, k - a) for v, (a, b) in self.intervals.items()})

    def to_dict(self) -> dict:
        cols = self.column_sets()
        return {
            "verdict": "accepted",
            "columns": [{"index": j, "class": c, "vertices": [str(v) for v in cols[j]]}
                        for j, c in enumerate(self.classes)],
            "rows": [{"vertex": str(v), "first": a, "last": b}
                     for v, (a, b) in self.intervals.items()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProbeIntervalModel":
        """Rebuild a model from its column list (the row table is ignored)."""
        try:
            columns = sorted(data["columns"], key=lambda c: c["index"])
            classes = [c.get("class", "") for c in columns]
            spans: dict = {}
            for j, c in enumerate(columns):
                if c["index"] != j:
                    raise MalformedInput("column indices are not 0..k-1")
                for v in c["vertices"]:
                    spans.setdefault(v, []).append(j)
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"bad model record: {exc}") from None
        intervals = {}
        for v, js in spans.items():
            if js[-1] - js[0] + 1 != len(js):
                raise MalformedInput(f"row {v!r} is not consecutive")
            intervals[v] = (js[0], js[-1])
        return cls(classes, intervals)


def _intervals_of(g: PartitionedGraph, m) -> tuple[list | None, int]:
    """Per-vertex ``(lo, hi)`` from a model or matrix; None if a row is not an interval."""
    if isinstance(m, ProbeIntervalModel):
        spans = m.intervals
        ncols = m.n_columns
        if set(spans) != set(g.names) or len(spans) != g.n:
            raise InvalidInput("model rows do not match the graph's vertices")
        out = [spans[v] for v in g.names]
        return out, ncols
    if isinstance(m, BinaryMatrix):
        if set(m.rows) != set(g.names) or len(m.rows) != g.n:
            raise InvalidInput("matrix rows do not match the graph's vertices")
        out = []
        for v in g.names:
            ps = m.row_positions(v)
            if not ps or ps[-1] - ps[0] + 1 != len(ps):
                return None, len(m.columns)
            out.append((ps[0], ps[-1]))
        return out, len(m.columns)
    raise InvalidInput(f"not a model: {type(m).__name__}")


def _verify_int(probe: Sequence[bool], adj: Sequence[Sequence[int]], iv, ncols: int) -> bool:
    n = len(probe)
    if len(iv) != n:
        return False
    start_all = [0] * (ncols + 1)
    start_p = [0] * (ncols + 1)
    end_all = [0] * (ncols + 1)
    end_p = [0] * (ncols + 1)
    for v in range(n):
        a, b = iv[v]
        if not 0 <= a <= b < ncols:
            return False
        start_all[a + 1] += 1
        end_all[b + 1] += 1
        if probe[v]:
            start_p[a + 1] += 1
            end_p[b + 1] += 1
    for j in range(ncols):
        start_all[j + 1] += start_all[j]
        start_p[j + 1] += start_p[j]
        end_all[j + 1] += end_all[j]
        end_p[j + 1] += end_p[j]
    tot_all, tot_p = n, start_p[ncols]
    for v in range(n):
        a, b = iv[v]
        # intersecting = all - (start after b) - (end before a)
        if probe[v]:
            meet = tot_all - (tot_all - start_all[b + 1]) - end_all[a] - 1
        else:
            meet = tot_p - (tot_p - start_p[b + 1]) - end_p[a]
        if meet != len(adj[v]):
            return False
        for w in adj[v]:
            c, d = iv[w]
            if d < a or b < c:
                return False
    return True


def verify_model(g: PartitionedGraph, m) -> bool:
    """True iff ``m`` is consecutive-ones ordered and represents exactly the edges of ``g``."""
    iv, ncols = _intervals_of(g, m)
    if iv is None:
        return False
    return _verify_int(g.probe, g.adj, iv, ncols)


def _normal_int(probe: Sequence[bool], iv, ncols: int) -> bool:
    close_all = [0] * ncols
    close_p = [0] * ncols
    open_all = [0] * ncols
    open_p = [0] * ncols
    for v, (a, b) in enumerate(iv):
        close_all[b] += 1
        open_all[a] += 1
        if probe[v]:
            close_p[b] += 1
            open_p[a] += 1
    for j in range(ncols - 1):
        # columns j and j+1 merge unless a closer at j meets a starter at j+1
        # with a probe among them
        if not (close_all[j] and open_all[j + 1] and (close_p[j] or open_p[j + 1])):
            return False
    for v, (a, b) in enumerate(iv):
        if a == b:
            continue
        if not (close_all[a] if probe[v] else close_p[a]):
            return False
        if not (open_all[b] if probe[v] else open_p[b]):
            return False
    return True


def is_normal_model(g: PartitionedGraph, m) -> bool:
    """True iff ``m`` is taut and minimal.

    Taut: shrinking any endpoint of a row that spans two or more columns
    would lose a represented neighbour.  A row in a single column cannot be
    shrunk and counts as taut.  Minimal: no two consecutive columns can be
    merged without changing the represented graph.
    """
    iv, ncols = _intervals_of(g, m)
    if iv is None:
        return False
    return _normal_int(g.probe, iv, ncols)


# ---------------------------------------------------------------------------
# Pipeline


@dataclass
class NonProbeClassification:
    """Class ``P``, ``N1``, ``N2`` or ``NS`` per vertex and the clique sets ``Q(v)``."""

    cls: list
    q: dict
    simplicial: list


@dataclass
class ConstraintPair:
    kind: str
    u: int
    v: int
    row: list


@dataclass
class GapFill:
    """Semi-clique columns inserted between ``M_K*`` positions ``i`` and ``i+1``."""

    i: int
    w_probes: int
    x: list
    y: list
    z: list
    descending: list
    ascending: list


class ComponentPipeline:
    """Recognition of one connected component; attributes hold every stage's output.

    Call :meth:`run`, or the stage methods one after another.  Each stage
    raises :class:`Rejected` when the graph is not a probe interval graph.
    """

    def __init__(self, g: PartitionedGraph):
        self.g = g
        self.probes = [v for v in range(g.n) if g.probe[v]]
        self.nonprobes = [v for v in range(g.n) if not g.probe[v]]
        if not self.probes:
            raise InvalidInput("a component pipeline needs at least one probe")
        self.cliques: list[list[int]] = []
        self.q: dict[int, list[int]] = {}
        self.lo = [-1] * g.n
        self.hi = [-1] * g.n
        self.classification: NonProbeClassification | None = None
        self.pairs: list[ConstraintPair] = []
        self.gaps: list[GapFill] = []
        self.model: ProbeIntervalModel | None = None

    def run(self) -> ProbeIntervalModel:
        self.build_mk()
        self.classify_nonprobes()
        self.build_mk_plus()
        self.representative_pairs()
        self.order_with_constraints()
        self.insert_semicliques()
        self.build_mp()
        return self.assemble_model()

    def _name(self, v) -> str:
        return str(self.g.names[v])

    def _place(self, order: Sequence[int], verts: Iterable[int]):
        pos = [0] * len(order)
        for i, c in enumerate(order):
            pos[c] = i
        for v in verts:
            ps = [pos[c] for c in self.q[v]]
            self.lo[v] = min(ps)
            self.hi[v] = max(ps)

    # -- M_K ---------------------------------------------------------------

    def build_mk(self):
        g = self.g
        probes = self.probes
        local = {p: i for i, p in enumerate(probes)}
        padj = [[local[w] for w in g.adj[p] if g.probe[w]] for p in probes]
        cl = maximal_cliques_int(padj)
        if cl is None:
            raise Rejected("not-chordal", "the probe subgraph is not chordal")
        self.cliques = [[probes[i] for i in c] for c in cl]
        member: dict[int, list[int]] = {p: [] for p in probes}
        for j, c in enumerate(self.cliques):
            for p in c:
                member[p].append(j)
        self.q = member
        self.builder = PQBuilder(range(len(self.cliques)))
        for p in probes:
            if not self.builder.add_row(member[p]):
                raise Rejected("not-interval-GP", "the probe subgraph is not an interval graph")
        self.mk_order = self.builder.frontier()
        self._place(self.mk_order, probes)

    @property
    def m_k(self) -> BinaryMatrix:
        return BinaryMatrix([(self._name(p), self.q[p]) for p in self.probes], self.mk_order)

    # -- classification ------------------------------------------------------

    def classify_nonprobes(self) -> NonProbeClassification:
        g = self.g
        order = self.mk_order
        lo, hi = self.lo, self.hi
        cls = ["P" if p else "" for p in g.probe]
        simp = [False] * g.n
        for x in self.nonprobes:
            nb = g.adj[x]
            events = []
            for p in nb:
                events.append((lo[p], 0))
                events.append((hi[p], 1))
            events.sort()
            count = best = 0
            after_left = False
            qx = []
            for pos, side in events:
                if side == 0:
                    count += 1
                    if count > best:
                        best = count
                    after_left = True
                else:
                    if after_left and count == len(self.cliques[order[pos]]):
                        qx.append(order[pos])
                    count -= 1
                    after_left = False
            self.q[x] = qx
            if best == len(nb):
                simp[x] = True
                cls[x] = "NS"
            else:
                cls[x] = "N1" if qx else "N2"
        self.cls = cls
        self.n1 = [x for x in self.nonprobes if cls[x] == "N1"]
        self.n2 = [x for x in self.nonprobes if cls[x] == "N2"]
        self.ns = [x for x in self.nonprobes if cls[x] == "NS"]
        self.classification = NonProbeClassification(
            cls, {v: self.q[v] for v in range(g.n) if cls[v] != "NS"}, simp)
        return self.classification

    # -- M_K+ ----------------------------------------------------------------

    def build_mk_plus(self):
        for x in self.n1:
            if not self.builder.add_row(self.q[x]):
                raise Rejected("MK-plus-not-C1P", f"no clique order keeps Q({self._name(x)}) consecutive")
        self.mkp_order = self.builder.frontier()
        self._place(self.mkp_order, self.probes)
        self._place(self.mkp_order, self.n1)

    @property
    def m_k_plus(self) -> BinaryMatrix:
        rows = [(self._name(v), self.q[v]) for v in self.probes + self.n1 + self.n2]
        return BinaryMatrix(rows, self.mkp_order)

    # -- binding constraints ----------------------------------------------

    def _minima(self, v: int, cands: Sequence[int]) -> list[int]:
        """The at most two minimal members of ``cands`` under containment of Q-sets.

        Candidates must split into two groups, each nested around its minimum
        and disjoint from the other group's minimum.
        """
        lo, hi = self.lo, self.hi
        mins = []
        rest = list(cands)
        for _ in range(2):
            if not rest:
                break
            w = rest[0]
            nxt = []
            for u in rest[1:]:
                lu, hu, lw, hw = lo[u], hi[u], lo[w], hi[w]
                if hu < lw or hw < lu:
                    nxt.append(u)
                elif lu <= lw and hw <= hu:
                    if lu == lw and hu == hw and u < w:
                        w = u
                elif lw <= lu and hu <= hw:
                    w = u
                else:
                    raise Rejected("binding-structure",
                                   f"bound neighbours of {self._name(v)} overlap properly")
            mins.append(w)
            rest = nxt
        if rest:
            raise Rejected("binding-structure",
                           f"bound neighbours of {self._name(v)} need more than two sides")
        return mins

    def representative_pairs(self) -> list[ConstraintPair]:
        g = self.g
        lo, hi, cls = self.lo, self.hi, self.cls
        bound: dict[int, list[int]] = {}
        for v in self.probes:
            cands = [x for x in g.adj[v] if cls[x] == "N1" and (hi[x] < lo[v] or hi[v] < lo[x])]
            if cands:
                bound[v] = self._minima(v, cands)
        for x in self.n1:
            cands = [p for p in g.adj[x] if hi[x] < lo[p] or hi[p] < lo[x]]
            if cands:
                bound[x] = self._minima(x, cands)
        pairs = []
        for v in self.probes:
            for w in bound.get(v, ()):
                if v in bound.get(w, ()):
                    pairs.append(ConstraintPair("np_p", v, w, self.q[v] + self.q[w]))
        partners: dict[int, list[int]] = {}
        for x in self.n2:
            # neighbours meeting every other neighbour lie on both sides of x's gap
            min_hi = min(hi[p] for p in g.adj[x])
            max_lo = max(lo[p] for p in g.adj[x])
            sides = [p for p in g.adj[x] if lo[p] > min_hi or hi[p] < max_lo]
            mins = self._minima(x, sides)
            if len(mins) != 2:
                raise Rejected("binding-structure",
                               f"neighbours of {self._name(x)} do not split into two sides")
            a, b = mins
            partners.setdefault(a, []).append(b)
            partners.setdefault(b, []).append(a)
        best = {p: self._minima(p, lst) for p, lst in partners.items()}
        for p, mins in best.items():
            for q in mins:
                if p < q and p in best.get(q, ()):
                    pairs.append(ConstraintPair("p_p", p, q, self.q[p] + self.q[q]))
        self.bound_np = bound
        self.bound_pp = best
        self.pairs = pairs
        return pairs

    def named_pairs(self) -> list[tuple[str, frozenset]]:
        return [(c.kind, frozenset((self._name(c.u), self._name(c.v)))) for c in self.pairs]

    def order_with_constraints(self):
        for c in self.pairs:
            if not self.builder.add_row(c.row):
                raise Rejected("constraints-not-C1P",
                               f"constraint {self._name(c.u)}-{self._name(c.v)} cannot be met")
        self.mstar_order = self.builder.frontier()
        self._place(self.mstar_order, self.probes)
        self._place(self.mstar_order, self.n1)

    @property
    def m_prime(self) -> BinaryMatrix:
        rows = [(self._name(v), self.q[v]) for v in self.probes + self.n1 + self.n2]
        rows += [(("constraint", self._name(c.u), self._name(c.v)), c.row) for c in self.pairs]
        return BinaryMatrix(rows, self.mstar_order)

    @property
    def m_star(self) -> BinaryMatrix:
        rows = [(self._name(v), self.q[v]) for v in self.probes + self.n1 + self.n2]
        return BinaryMatrix(rows, self.mstar_order)

    # -- semi-clique columns ------------------------------------------------

    def insert_semicliques(self):
        g = self.g
        adj, lo, hi = g.adj, self.lo, self.hi
        order = self.mstar_order
        k = len(order)
        ends_at: list[list[int]] = [[] for _ in range(k)]
        starts_after: list[list[int]] = [[] for _ in range(k)]
        spanning = self.probes + self.n1
        for v in spanning:
            ends_at[hi[v]].append(v)
            if lo[v] >= 1:
                starts_after[lo[v] - 1].append(v)
        zgap: dict[int, int] = {}
        in_z: list[list[int]] = [[] for _ in range(k)]
        for z in self.n2:
            i = min(hi[p] for p in adj[z])
            if max(lo[p] for p in adj[z]) != i + 1:
                raise Rejected("chain-structure",
                               f"{self._name(z)} fits no gap between clique columns")
            zgap[z] = i
            in_z[i].append(z)
        # probes spanning each gap, by prefix counts
        opened = [0] * k
        closed = [0] * k
        for p in self.probes:
            opened[lo[p]] += 1
            closed[hi[p]] += 1
        w_count = [0] * k
        run = 0
        for i in range(k):
            run += opened[i] - closed[i]
            w_count[i] = run

        plans = []
        groups = []
        for i in range(k - 1):
            if not in_z[i] and not (ends_at[i] and starts_after[i]):
                continue
            zs = in_z[i]
            xs = [v for v in ends_at[i]
                  if any(lo[w] == i + 1 or zgap.get(w) == i for w in adj[v])]
            ys = [v for v in starts_after[i]
                  if any(hi[w] == i and lo[w] >= 0 or zgap.get(w) == i for w in adj[v])]
            if not xs and not ys and not zs:
                continue
            desc = {}
            for x in [y for y in ys if not g.probe[y]] + zs:
                s = [p for p in adj[x] if lo[p] <= i <= hi[p]]
                if sum(1 for p in s if hi[p] > i) != w_count[i]:
                    raise Rejected("chain-structure",
                                   f"{self._name(x)} misses a probe spanning gap {i}")
                desc[x] = s
            asc = {}
            for x in [v for v in xs if not g.probe[v]] + zs:
                s = [p for p in adj[x] if lo[p] <= i + 1 <= hi[p]]
                if sum(1 for p in s if lo[p] <= i) != w_count[i]:
                    raise Rejected("chain-structure",
                                   f"{self._name(x)} misses a probe spanning gap {i}")
                asc[x] = s
            plans.append((i, xs, ys, zs, desc, asc))
            groups.append((("D", i), list(desc.values())))
            groups.append((("A", i), list(asc.values())))
        sorted_groups = dict(group_radix_sort(groups, by="length", dedupe=True))

        # lay out the columns of M_N
        classes = []
        clique_at = []
        gap_cols = {}
        plan_at = {p[0]: p for p in plans}
        for i in range(k):
            clique_at.append(len(classes))
            classes.append(CLIQUE)
            if i in plan_at:
                _, xs, ys, zs, desc, asc = plan_at[i]
                d_chain = sorted_groups[("D", i)]
                a_chain = sorted_groups[("A", i)]
                for chain, clique in ((d_chain, order[i]), (a_chain, order[i + 1])):
                    if not is_chain(chain):
                        raise Rejected("chain-structure", f"endpoint sets at gap {i} are not nested")
                    if chain and len(chain[-1]) >= len(self.cliques[clique]):
                        raise Rejected("chain-structure", f"endpoint set at gap {i} fills a clique")
                d_chain = d_chain[::-1]
                first = len(classes)
                classes.extend([SEMI_CLIQUE] * (len(d_chain) + len(a_chain)))
                gap_cols[i] = (first, d_chain, a_chain)
                self.gaps.append(GapFill(
                    i, w_count[i], [self._name(v) for v in xs], [self._name(v) for v in ys],
                    [self._name(v) for v in zs],
                    [[self._name(p) for p in s] for s in d_chain],
                    [[self._name(p) for p in s] for s in a_chain]))

        nlo = [-1] * g.n
        nhi = [-1] * g.n
        for v in spanning:
            nlo[v] = clique_at[lo[v]]
            nhi[v] = clique_at[hi[v]]
        for i, xs, ys, zs, desc, asc in plans:
            first, d_chain, a_chain = gap_cols[i]
            d_at = {frozenset(s): first + j for j, s in enumerate(d_chain)}
            a0 = first + len(d_chain)
            a_at = {frozenset(s): a0 + j for j, s in enumerate(a_chain)}
            last_d = {}
            for j, s in enumerate(d_chain):
                for p in s:
                    last_d[p] = first + j
            first_a = {}
            for j in range(len(a_chain) - 1, -1, -1):
                for p in a_chain[j]:
                    first_a[p] = a0 + j
            for v in xs:
                if g.probe[v]:
                    if v not in last_d:
                        raise Rejected("chain-structure", f"{self._name(v)} reaches no new column")
                    nhi[v] = last_d[v]
                else:
                    nhi[v] = a_at[frozenset(asc[v])]
            for v in ys:
                if g.probe[v]:
                    if v not in first_a:
                        raise Rejected("chain-structure", f"{self._name(v)} reaches no new column")
                    nlo[v] = first_a[v]
                else:
                    nlo[v] = d_at[frozenset(desc[v])]
            for z in zs:
                nlo[z] = d_at[frozenset(desc[z])]
                nhi[z] = a_at[frozenset(asc[z])]
        self.mn_classes = classes
        self.mn_clique_at = clique_at
        self.nlo = nlo
        self.nhi = nhi

    @property
    def m_n(self) -> BinaryMatrix:
        rows = [(self._name(v), range(self.nlo[v], self.nhi[v] + 1))
                for v in range(self.g.n) if self.cls[v] != "NS"]
        return BinaryMatrix(rows, range(len(self.mn_classes)))

    # -- M_P and the final model -------------------------------------------

    def build_mp(self):
        g = self.g
        nlo, nhi = self.nlo, self.nhi
        kn = len(self.mn_classes)
        col_probes: list[list[int]] = [[] for _ in range(kn)]
        for p in self.probes:
            for j in range(nlo[p], nhi[p] + 1):
                col_probes[j].append(p)
        first_with = {}
        for j in range(kn):
            first_with.setdefault(frozenset(col_probes[j]), j)
        extra: dict[frozenset, int] = {}
        ns_col = {}
        for x in self.ns:
            key = frozenset(g.adj[x])
            if key in first_with:
                ns_col[x] = first_with[key]
            else:
                if key not in extra:
                    extra[key] = kn + len(extra)
                ns_col[x] = extra[key]
        self.simplicial_sets = list(extra)
        self.ns_col = ns_col
        mp_rows: dict[int, list[int]] = {p: list(range(nlo[p], nhi[p] + 1)) for p in self.probes}
        for key, j in extra.items():
            for p in key:
                mp_rows[p].append(j)
        ncols = kn + len(extra)
        m_r = BinaryMatrix(mp_rows, range(ncols))
        m_c = BinaryMatrix(((v, range(nlo[v], nhi[v] + 1))
                            for v in range(g.n) if self.cls[v] != "NS"), range(kn))
        self.instance = c1pm.C1PMInstance(m_r, m_c)
        return self.instance

    @property
    def m_p(self) -> BinaryMatrix:
        m = self.instance.m_r
        return BinaryMatrix(((self._name(r), m.row(r)) for r in m.rows), m.columns)

    def assemble_model(self) -> ProbeIntervalModel:
        g = self.g
        sol = c1pm.solve(self.instance)
        if sol is None:
            raise Rejected("c1pm-no-solution", "no column order fits both M_P and M_N")
        self.solution = sol
        kn = len(self.mn_classes)
        pos = {c: i for i, c in enumerate(sol.order)}
        classes = [self.mn_classes[c] if c < kn else SIMPLICIAL for c in sol.order]
        iv = [None] * g.n
        for v in range(g.n):
            if self.cls[v] == "NS":
                j = pos[self.ns_col[v]]
                iv[v] = (j, j)
            else:
                iv[v] = sol.endpoints[v]
        if not _verify_int(g.probe, g.adj, iv, len(classes)):
            raise Rejected("model-check", "assembled matrix does not represent the graph")
        self.intervals = iv
        self.column_ids = list(sol.order)
        self.model = ProbeIntervalModel(classes, {g.names[v]: iv[v] for v in range(g.n)})
        return self.model

    def column_of(self, name) -> int:
        """Final column position of a simplicial non-probe."""
        v = self.g.index[name]
        return self.intervals[v][0]


@dataclass
class RecognitionTrace:
    """Per-component pipelines and how their models were concatenated."""

    components: list = field(default_factory=list)
    offsets: list = field(default_factory=list)
    isolated_nonprobes: list = field(default_factory=list)
    n_components: int = 0

    @property
    def connected(self) -> bool:
        return self.n_components <= 1

    def pipeline(self) -> ComponentPipeline:
        """The single component pipeline of a connected graph with a probe."""
        if len(self.components) != 1 or self.isolated_nonprobes:
            raise InvalidInput("the graph does not consist of one component with probes")
        return self.components[0]


def recognize(g: PartitionedGraph) -> tuple[ProbeIntervalModel, RecognitionTrace]:
    """A normal probe interval model of ``g`` and the pipeline trace.

    Raises
    ------
    Rejected
        When ``g`` has no probe interval model; ``stage`` says which step failed.
    """
    trace = RecognitionTrace()
    comps = g.components()
    trace.n_components = len(comps)
    classes: list[str] = []
    intervals: dict = {}
    iso_col = None
    for comp in comps:
        if len(comp) == 1 and not g.probe[comp[0]]:
            name = g.names[comp[0]]
            if iso_col is None:
                iso_col = len(classes)
                classes.append(SIMPLICIAL)
            intervals[name] = (iso_col, iso_col)
            trace.isolated_nonprobes.append(name)
            continue
        h = g.subgraph(comp) if len(comps) > 1 else g
        pipe = ComponentPipeline(h)
        m = pipe.run()
        off = len(classes)
        trace.components.append(pipe)
        trace.offsets.append(off)
        classes.extend(m.classes)
        for v, (a, b) in m.intervals.items():
            intervals[v] = (a + off, b + off)
    model = ProbeIntervalModel(classes, {v: intervals[v] for v in g.names})
    return model, trace

