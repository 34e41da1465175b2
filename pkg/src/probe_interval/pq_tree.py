"""PQ trees over column identities.

Construction uses the template reduction of Booth and Lueker.  Children of Q
nodes are kept in an unoriented doubly linked list, so reversing or splicing a
Q node costs O(1); their parent pointers go through a union-find forest so
that absorbing one Q node into another never rewrites the absorbed children.

The public value type :class:`PQTree` is immutable.  :class:`PQBuilder`
exposes the incremental reduction so that a caller can add rows in stages and
read the current frontier between stages.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Hashable, Iterable, Sequence

from .errors import InvalidInput, MalformedInput, RefusedTooLarge
from .sparse_matrix import BinaryMatrix

P = "P"
Q = "Q"
BOTH = "PQ"
LEAF = "leaf"

ENUMERATION_BOUND = 8


def _id_key(v):
    return (0, v, "") if isinstance(v, int) else (1, 0, str(v))


class PQNode:
    """Node of an immutable PQ tree.

    Internal nodes with exactly two children have kind ``BOTH`` and answer
    true to both :attr:`is_p` and :attr:`is_q`.
    """

    __slots__ = ("kind", "children", "leaf", "_leaves", "_min")

    def __init__(self, kind: str, children: Sequence["PQNode"] = (), leaf=None):
        if kind != LEAF:
            if len(children) < 2:
                raise InvalidInput("internal PQ node needs at least two children")
            if len(children) == 2:
                kind = BOTH
            elif kind == BOTH:
                raise InvalidInput("a node with three or more children is P or Q")
        self.kind = kind
        self.children = tuple(children)
        self.leaf = leaf
        self._leaves = None
        self._min = None

    @property
    def is_leaf(self) -> bool:
        return self.kind == LEAF

    @property
    def is_p(self) -> bool:
        return self.kind in (P, BOTH)

    @property
    def is_q(self) -> bool:
        return self.kind in (Q, BOTH)

    def leaves(self) -> frozenset:
        """The set of columns denoted by this node."""
        if self._leaves is None:
            self._leaves = frozenset(_frontier(self))
        return self._leaves

    def min_leaf(self):
        if self._min is None:
            self._min = min((l for l in self.leaves()), key=_id_key)
        return self._min

    def __repr__(self) -> str:
        return f"PQNode({_emit(self)})"


def _frontier(node: PQNode) -> list:
    out = []
    stack = [node]
    while stack:
        x = stack.pop()
        if x.kind == LEAF:
            out.append(x.leaf)
        else:
            stack.extend(reversed(x.children))
    return out


def _postorder(node: PQNode) -> list[PQNode]:
    out = []
    stack = [(node, False)]
    while stack:
        x, done = stack.pop()
        if done or x.kind == LEAF:
            out.append(x)
        else:
            stack.append((x, True))
            for c in reversed(x.children):
                stack.append((c, False))
    return out


class PQTree:
    """A PQ tree: the set of column orderings it admits is :meth:`orderings`.

    Two trees compare equal when they admit the same orderings, which is
    decided on the canonical form (P children sorted by minimum leaf, each Q
    node oriented so its lexicographically smaller end comes first).
    """

    __slots__ = ("root", "_leafset", "_key")

    def __init__(self, root: PQNode | None):
        self.root = root
        self._leafset = root.leaves() if root is not None else frozenset()
        self._key = None

    @property
    def leaves(self) -> frozenset:
        return self._leafset

    def __len__(self) -> int:
        return len(self._leafset)

    def frontier(self) -> tuple:
        """Leaves in stored left-to-right order (one valid ordering)."""
        return tuple(_frontier(self.root)) if self.root is not None else ()

    def nodes(self) -> list[PQNode]:
        return _postorder(self.root) if self.root is not None else []

    def internal_nodes(self) -> list[PQNode]:
        return [x for x in self.nodes() if x.kind != LEAF]

    def parent_map(self) -> dict[int, PQNode]:
        """``id(child) -> parent`` for every non-root node."""
        out = {}
        for x in self.nodes():
            for c in x.children:
                out[id(c)] = x
        return out

    def canonical(self) -> "PQTree":
        return PQTree(_canon_node(self.root)) if self.root is not None else self

    def canonical_key(self):
        if self._key is None:
            self._key = _canon_key(self.root) if self.root is not None else None
        return self._key

    def canonical_ordering(self) -> tuple:
        return self.canonical().frontier()

    def __eq__(self, other) -> bool:
        if not isinstance(other, PQTree):
            return NotImplemented
        return self.canonical_key() == other.canonical_key()

    def __hash__(self):
        return hash(self.canonical_key())

    def to_text(self) -> str:
        return _emit(_canon_node(self.root)) if self.root is not None else ""

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"PQTree({self.to_text()})"

    @classmethod
    def from_text(cls, text: str) -> "PQTree":
        return parse_tree(text)

    # convenience wrappers around the module functions
    def is_valid(self, order) -> bool:
        return is_valid(self, order)

    def restrict(self, cols) -> "PQTree":
        return restrict(self, cols)

    def orderings(self, bound: int = ENUMERATION_BOUND) -> set:
        return enumerate_orderings(self, bound)


def _canon_node(node: PQNode) -> PQNode:
    built = {}
    for x in _postorder(node):
        if x.kind == LEAF:
            built[id(x)] = x
            continue
        kids = [built[id(c)] for c in x.children]
        if x.is_p:
            kids.sort(key=lambda c: _id_key(c.min_leaf()))
        else:
            fwd = [_id_key(c.min_leaf()) for c in kids]
            if fwd[::-1] < fwd:
                kids.reverse()
        built[id(x)] = PQNode(x.kind, kids)
    return built[id(node)]


def _canon_key(node: PQNode):
    canon = _canon_node(node)
    keys = {}
    for x in _postorder(canon):
        if x.kind == LEAF:
            keys[id(x)] = _id_key(x.leaf)
        else:
            keys[id(x)] = ("P" if x.is_p else "Q", tuple(keys[id(c)] for c in x.children))
    return keys[id(canon)]


def _emit(node: PQNode) -> str:
    out = {}
    for x in _postorder(node):
        if x.kind == LEAF:
            out[id(x)] = str(x.leaf)
        else:
            tag = "Q" if x.kind == Q else "P"
            out[id(x)] = tag + "(" + " ".join(out[id(c)] for c in x.children) + ")"
    return out[id(node)]


def parse_tree(text: str, leaf_type=str) -> PQTree:
    """Parse ``P(a b Q(c d e))``; leaves are converted with ``leaf_type``."""
    toks = []
    buf = ""
    for ch in text:
        if ch in "() \t\n,":
            if buf:
                toks.append(buf)
                buf = ""
            if ch in "()":
                toks.append(ch)
        else:
            buf += ch
    if buf:
        toks.append(buf)
    if not toks:
        raise MalformedInput("empty tree text")
    stack: list[tuple[str, list]] = []
    result = None
    i = 0
    while i < len(toks):
        t = toks[i]
        if t in ("P", "Q") and i + 1 < len(toks) and toks[i + 1] == "(":
            stack.append((t, []))
            i += 2
            continue
        if t == ")":
            if not stack:
                raise MalformedInput("unbalanced ')'")
            kind, kids = stack.pop()
            try:
                node = PQNode(kind, kids)
            except InvalidInput as exc:
                raise MalformedInput(str(exc)) from None
        elif t == "(":
            raise MalformedInput("unexpected '('")
        else:
            node = PQNode(LEAF, leaf=leaf_type(t))
        if stack:
            stack[-1][1].append(node)
        elif result is None:
            result = node
        else:
            raise MalformedInput("trailing tokens after tree")
        i += 1
    if stack or result is None:
        raise MalformedInput("unbalanced tree text")
    tree = PQTree(result)
    if len(tree.leaves) != len(_frontier(result)):
        raise MalformedInput("repeated leaf in tree text")
    return tree


# ---------------------------------------------------------------------------
# Template reduction engine

_EMPTY, _PARTIAL, _FULL = 0, 1, 2
_L, _P, _Q = 0, 1, 2


class _Fail(Exception):
    pass


class _N:
    __slots__ = ("kind", "leaf", "parent", "children", "sibs", "ends", "absorbed",
                 "stamp", "label", "pchild", "pleaves", "fullk", "partk", "full_end")

    def __init__(self, kind, leaf=None):
        self.kind = kind
        self.leaf = leaf
        self.parent = None
        self.children = {} if kind == _P else None
        self.sibs = [None, None]
        self.ends = None
        self.absorbed = None
        self.stamp = -1
        self.label = _EMPTY
        self.pchild = 0
        self.pleaves = 0
        self.fullk = None
        self.partk = None
        self.full_end = None


def _parent(x: _N):
    p = x.parent
    if p is None or p.absorbed is None:
        return p
    r = p
    while r.absorbed is not None:
        r = r.absorbed
    while p.absorbed is not None and p.absorbed is not r:
        nxt = p.absorbed
        p.absorbed = r
        p = nxt
    x.parent = r
    return r


def _swap_sib(node: _N, old, new):
    s = node.sibs
    if s[0] is old:
        s[0] = new
    else:
        s[1] = new


def _other_end(q: _N, e: _N) -> _N:
    return q.ends[1] if q.ends[0] is e else q.ends[0]


def _q_kids(q: _N) -> list:
    out = []
    prev = None
    cur = q.ends[0]
    while cur is not None:
        out.append(cur)
        a, b = cur.sibs
        nxt = b if a is prev else a
        prev, cur = cur, nxt
    return out


class PQBuilder:
    """Incremental PQ tree over a fixed column set.

    ``add_row`` reduces the tree by one row and returns False when no
    consecutive-ones ordering survives; the builder is then unusable.
    """

    def __init__(self, columns: Iterable[Hashable]):
        cols = list(columns)
        self.leaves = {}
        for c in cols:
            if c in self.leaves:
                raise InvalidInput(f"duplicate column id {c!r}")
            self.leaves[c] = _N(_L, c)
        self.ok = True
        self._stamp = 0
        if len(cols) == 0:
            self.root = None
        elif len(cols) == 1:
            self.root = self.leaves[cols[0]]
        else:
            root = _N(_P)
            for c in cols:
                lf = self.leaves[c]
                lf.parent = root
                root.children[lf] = None
            self.root = root

    # -- public ----------------------------------------------------------

    def add_row(self, cols: Iterable[Hashable]) -> bool:
        if not self.ok:
            return False
        try:
            leaves = [self.leaves[c] for c in set(cols)]
        except KeyError as exc:
            raise InvalidInput(f"unknown column {exc.args[0]!r}") from None
        if len(leaves) <= 1:
            return True
        try:
            self._reduce(leaves)
        except _Fail:
            self.ok = False
        return self.ok

    def add_rows(self, rows: Iterable[Iterable[Hashable]]) -> bool:
        for r in rows:
            if not self.add_row(r):
                return False
        return True

    def frontier(self) -> list:
        if self.root is None:
            return []
        out = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            if x.kind == _L:
                out.append(x.leaf)
            elif x.kind == _P:
                stack.extend(reversed(list(x.children)))
            else:
                stack.extend(reversed(_q_kids(x)))
        return out

    def tree(self) -> PQTree | None:
        if not self.ok:
            return None
        if self.root is None:
            return PQTree(None)
        built = {}
        order = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            order.append(x)
            if x.kind == _P:
                stack.extend(x.children)
            elif x.kind == _Q:
                stack.extend(_q_kids(x))
        for x in reversed(order):
            if x.kind == _L:
                built[id(x)] = PQNode(LEAF, leaf=x.leaf)
            else:
                kids = list(x.children) if x.kind == _P else _q_kids(x)
                built[id(x)] = PQNode(P if x.kind == _P else Q, [built[id(c)] for c in kids])
        return PQTree(built[id(self.root)])

    # -- reduction -------------------------------------------------------

    def _touch(self, x: _N):
        x.stamp = self._stamp
        x.label = _EMPTY
        x.pchild = 0
        x.pleaves = 0
        x.fullk = []
        x.partk = []

    def _label(self, x: _N) -> int:
        return x.label if x.stamp == self._stamp else _EMPTY

    def _reduce(self, leaves: list):
        self._stamp += 1
        size = len(leaves)
        # bubble: count pertinent children of every node below the pertinent root
        queue = deque(leaves)
        for lf in leaves:
            self._touch(lf)
        at_top = False
        while queue and (len(queue) > 1 or at_top):
            x = queue.popleft()
            p = _parent(x)
            if p is None:
                at_top = True
                continue
            if p.stamp != self._stamp:
                self._touch(p)
                queue.append(p)
            p.pchild += 1
        # reduce bottom-up
        queue = deque(leaves)
        for lf in leaves:
            lf.pleaves = 1
        while queue:
            x = queue.popleft()
            if x.pleaves == size:
                self._template(x, True)
                return
            y = self._template(x, False)
            p = _parent(y)
            if p is None:
                raise _Fail
            p.pleaves += x.pleaves
            p.pchild -= 1
            if y.label == _FULL:
                p.fullk.append(y)
            else:
                p.partk.append(y)
            if p.pchild == 0:
                queue.append(p)
        raise _Fail

    def _template(self, x: _N, root: bool) -> _N:
        if x.kind == _L:
            x.label = _FULL
            return x
        if x.kind == _P:
            return self._p_templates(x, root)
        return self._q_templates(x, root)

    # -- structural helpers --------------------------------------------------

    def _replace(self, old: _N, new: _N):
        par = _parent(old)
        new.parent = par
        if par is None:
            self.root = new
            new.sibs = [None, None]
        elif par.kind == _P:
            del par.children[old]
            par.children[new] = None
        else:
            new.sibs = old.sibs[:]
            for s in new.sibs:
                if s is not None:
                    _swap_sib(s, old, new)
            if par.ends[0] is old:
                par.ends[0] = new
            if par.ends[1] is old:
                par.ends[1] = new
        old.parent = None

    def _group(self, nodes: list) -> _N:
        if len(nodes) == 1:
            return nodes[0]
        g = _N(_P)
        for c in nodes:
            c.parent = g
            g.children[c] = None
        return g

    def _fill_q(self, q: _N, nodes: list):
        last = len(nodes) - 1
        for i, c in enumerate(nodes):
            c.parent = q
            c.sibs = [nodes[i - 1] if i else None, nodes[i + 1] if i < last else None]
        q.ends = [nodes[0], nodes[-1]]

    def _attach(self, q: _N, end: _N, y: _N):
        """Put ``y`` next to ``end``, which must be an end child of ``q``."""
        y.parent = q
        y.sibs = [end, None]
        _swap_sib(end, None, y)
        if q.ends[0] is end:
            q.ends[0] = y
        else:
            q.ends[1] = y

    def _empty_part(self, x: _N) -> _N:
        if len(x.children) == 1:
            ch = next(iter(x.children))
            del x.children[ch]
            return ch
        return x

    def _splice(self, p: _N, x: _N, empty_nb):
        """Replace partial Q child ``p`` of ``x`` by its children, empty end toward ``empty_nb``."""
        a, b = p.sibs
        full_nb = b if a is empty_nb else a
        pf = p.full_end
        pe = _other_end(p, pf)
        _swap_sib(pf, None, full_nb)
        if full_nb is not None:
            _swap_sib(full_nb, p, pf)
        elif x.ends[0] is p:
            x.ends[0] = pf
        else:
            x.ends[1] = pf
        _swap_sib(pe, None, empty_nb)
        if empty_nb is not None:
            _swap_sib(empty_nb, p, pe)
        elif x.ends[0] is p:
            x.ends[0] = pe
        else:
            x.ends[1] = pe
        p.absorbed = x
        p.parent = None

    def _merge(self, c1: _N, c2: _N):
        """Join two partial Q nodes at their full ends; ``c2`` is absorbed."""
        f1, f2 = c1.full_end, c2.full_end
        e2 = _other_end(c2, f2)
        _swap_sib(f1, None, f2)
        _swap_sib(f2, None, f1)
        if c1.ends[0] is f1:
            c1.ends[0] = e2
        else:
            c1.ends[1] = e2
        c2.absorbed = c1
        c2.parent = None

    # -- templates -------------------------------------------------------

    def _p_templates(self, x: _N, root: bool) -> _N:
        full, partial = x.fullk, x.partk
        if not partial and len(full) == len(x.children):
            x.label = _FULL
            return x
        if len(partial) > 2 or (len(partial) == 2 and not root):
            raise _Fail
        for c in full:
            del x.children[c]
        for c in partial:
            del x.children[c]
        n_empty = len(x.children)
        if not partial:
            g = self._group(full)
            if root:
                g.parent = x
                x.children[g] = None
                return x
            q = _N(_Q)
            self._replace(x, q)
            self._fill_q(q, [self._empty_part(x), g])
            q.full_end = g
            q.stamp = self._stamp
            q.label = _PARTIAL
            return q
        if len(partial) == 1:
            c = partial[0]
            if full:
                g = self._group(full)
                self._attach(c, c.full_end, g)
                c.full_end = g
            if root:
                if n_empty == 0:
                    self._replace(x, c)
                else:
                    c.parent = x
                    x.children[c] = None
                return c
            self._replace(x, c)
            if n_empty:
                e = self._empty_part(x)
                self._attach(c, _other_end(c, c.full_end), e)
            c.label = _PARTIAL
            return c
        c1, c2 = partial
        if full:
            g = self._group(full)
            self._attach(c1, c1.full_end, g)
            c1.full_end = g
        self._merge(c1, c2)
        if n_empty == 0:
            self._replace(x, c1)
        else:
            c1.parent = x
            x.children[c1] = None
        return c1

    def _q_templates(self, x: _N, root: bool) -> _N:
        full, partial = x.fullk, x.partk
        if len(partial) > 2:
            raise _Fail
        npert = len(full) + len(partial)
        start = full[0] if full else partial[0]
        block_ends = []
        count = 1
        for d in (0, 1):
            prev = start
            cur = start.sibs[d]
            last = start
            while cur is not None and self._label(cur) != _EMPTY:
                count += 1
                last = cur
                a, b = cur.sibs
                nxt = b if a is prev else a
                prev, cur = cur, nxt
            block_ends.append(last)
        if count != npert:
            raise _Fail
        b0, b1 = block_ends
        for c in partial:
            if c is not b0 and c is not b1:
                raise _Fail
        if len(partial) == 2 and b0 is b1:
            raise _Fail
        ends = x.ends
        if not partial and (b0 is ends[0] or b0 is ends[1]) and (b1 is ends[0] or b1 is ends[1]) \
                and (b0 is not b1):
            x.label = _FULL
            return x

        def empty_nb(c):
            # the neighbour outside the pertinent block; None at an end of x
            a, b = c.sibs
            if a is None or self._label(a) == _EMPTY:
                return a
            return b

        if root:
            outside = [empty_nb(c) for c in partial]
            for c, e in zip(partial, outside):
                self._splice(c, x, e)
            return x
        if len(partial) > 1:
            raise _Fail
        pset = set(map(id, partial))
        outs = [b for b in ((b0,) if b0 is b1 else (b0, b1))
                if (b is ends[0] or b is ends[1]) and id(b) not in pset]
        if outs:
            b_out = outs[0]
            b_in = b1 if b_out is b0 else b0
            if partial:
                p = partial[0]
                if p is not b_in or b_in is b_out:
                    raise _Fail
                self._splice(p, x, empty_nb(p))
            x.full_end = b_out
        else:
            if not (partial and b0 is b1 and (b0 is ends[0] or b0 is ends[1])):
                raise _Fail
            p = partial[0]
            pf = p.full_end
            a, b = p.sibs
            self._splice(p, x, a if a is not None else b)
            x.full_end = pf
        x.label = _PARTIAL
        return x


# ---------------------------------------------------------------------------
# Public operations


def build(m: BinaryMatrix) -> PQTree | None:
    """PQ tree of all consecutive-ones orderings of ``m``, or None if there are none."""
    return build_from_rows(m.columns, (m.row(r) for r in m.rows))


def build_from_rows(columns: Iterable[Hashable], rows: Iterable[Iterable[Hashable]]) -> PQTree | None:
    b = PQBuilder(columns)
    if not b.add_rows(rows):
        return None
    return b.tree()


def is_valid(t: PQTree, order: Sequence[Hashable]) -> bool:
    """True iff ``order`` is one of the orderings admitted by ``t``."""
    order = tuple(order)
    if len(order) != len(t.leaves) or set(order) != t.leaves:
        raise InvalidInput("ordering does not cover exactly the tree's leaves")
    if t.root is None:
        return True
    pos = {c: i for i, c in enumerate(order)}
    span = {}
    for x in t.nodes():
        if x.kind == LEAF:
            p = pos[x.leaf]
            span[id(x)] = (p, p)
            continue
        spans = [span[id(c)] for c in x.children]
        lo = min(s[0] for s in spans)
        hi = max(s[1] for s in spans)
        if hi - lo + 1 != len(x.leaves()):
            return False
        if x.kind == Q:
            firsts = [s[0] for s in spans]
            inc = all(firsts[i] < firsts[i + 1] for i in range(len(firsts) - 1))
            dec = all(firsts[i] > firsts[i + 1] for i in range(len(firsts) - 1))
            if not (inc or dec):
                return False
        span[id(x)] = (lo, hi)
    return True


def restrict(t: PQTree, cols: Iterable[Hashable]) -> PQTree:
    """The tree ``t[X]`` admitting exactly the orderings of ``t`` restricted to ``X``."""
    keep = set(cols)
    if not keep:
        raise InvalidInput("restriction to an empty column set")
    if not keep <= t.leaves:
        raise InvalidInput("restriction set is not a subset of the leaves")
    built: dict[int, PQNode | None] = {}
    for x in t.nodes():
        if x.kind == LEAF:
            built[id(x)] = x if x.leaf in keep else None
            continue
        kids = [built[id(c)] for c in x.children]
        kids = [k for k in kids if k is not None]
        if not kids:
            built[id(x)] = None
        elif len(kids) == 1:
            built[id(x)] = kids[0]
        else:
            built[id(x)] = PQNode(Q if x.kind == Q else P, kids)
    return PQTree(built[id(t.root)])


def canonical_matrix(t: PQTree) -> BinaryMatrix:
    """Matrix whose consecutive-ones orderings are exactly those of ``t``.

    One row per non-root P node (its leaf set) and one row per pair of
    consecutive children of every Q node (their union).
    """
    rows = []
    root = t.root
    for x in t.nodes():
        if x.kind == LEAF:
            continue
        if x.kind in (P, BOTH) and x is not root:
            rows.append(x.leaves())
        if x.kind == Q:
            kids = x.children
            for i in range(len(kids) - 1):
                rows.append(kids[i].leaves() | kids[i + 1].leaves())
    return BinaryMatrix(list(enumerate(rows)), t.frontier())


def intersect(t1: PQTree, t2: PQTree) -> PQTree | None:
    """Tree admitting the orderings common to both, or None when there are none."""
    if t1.leaves != t2.leaves:
        raise InvalidInput("intersection needs identical leaf sets")
    m1 = canonical_matrix(t1)
    m2 = canonical_matrix(t2)
    rows = [m1.row(r) for r in m1.rows] + [m2.row(r) for r in m2.rows]
    return build_from_rows(t1.frontier(), rows)


def enumerate_orderings(t: PQTree, bound: int = ENUMERATION_BOUND) -> set[tuple]:
    """Every ordering admitted by ``t`` (small trees only)."""
    if len(t.leaves) > bound:
        raise RefusedTooLarge(f"{len(t.leaves)} leaves exceed the enumeration bound {bound}")
    if t.root is None:
        return {()}
    sets = {}
    for x in t.nodes():
        if x.kind == LEAF:
            sets[id(x)] = [(x.leaf,)]
            continue
        kid_sets = [sets[id(c)] for c in x.children]
        if x.is_p:
            arrangements = itertools.permutations(range(len(kid_sets)))
        else:
            n = len(kid_sets)
            arrangements = [tuple(range(n)), tuple(range(n - 1, -1, -1))]
        out = []
        for arr in arrangements:
            for combo in itertools.product(*(kid_sets[i] for i in arr)):
                out.append(tuple(itertools.chain.from_iterable(combo)))
        sets[id(x)] = out
    return set(sets[id(t.root)])


def single_q(t: PQTree) -> bool:
    """True iff the only internal node of ``t`` is a Q node (three or more leaves)."""
    r = t.root
    return r is not None and r.kind == Q and all(c.kind == LEAF for c in r.children)
