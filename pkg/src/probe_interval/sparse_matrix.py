"""Sparse 0-1 matrices with stable row and column identities.

A :class:`BinaryMatrix` stores, for every row, the set of columns holding a 1.
Row and column identities are arbitrary hashable values that survive
reordering and submatrix extraction.  Matrices are never mutated in place;
every transformation returns a new matrix.

The module also hosts the bucket-sort toolkit used by the recognition
pipeline: sorting groups of integer lists lexicographically or by length,
removing duplicate lists and testing whether a group is a subset chain.
"""

from __future__ import annotations

from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import InvalidInput, MalformedInput


class BinaryMatrix:
    """Immutable sparse 0-1 matrix.

    Parameters
    ----------
    rows : mapping or sequence of pairs
        Row id to the collection of column ids holding a 1.  Row order follows
        the iteration order of ``rows``.
    columns : sequence
        Column ids in left-to-right order.
    """

    __slots__ = ("_columns", "_pos", "_row_ids", "_rows", "_colsets", "_ones")

    def __init__(self, rows, columns: Sequence[Hashable]):
        cols = tuple(columns)
        pos = {}
        for i, c in enumerate(cols):
            if c in pos:
                raise InvalidInput(f"duplicate column id {c!r}")
            pos[c] = i
        items = rows.items() if isinstance(rows, Mapping) else rows
        row_ids = []
        row_sets = {}
        ones = 0
        for r, cs in items:
            if r in row_sets:
                raise InvalidInput(f"duplicate row id {r!r}")
            s = frozenset(cs)
            for c in s:
                if c not in pos:
                    raise InvalidInput(f"row {r!r} references unknown column {c!r}")
            row_ids.append(r)
            row_sets[r] = s
            ones += len(s)
        self._columns = cols
        self._pos = pos
        self._row_ids = tuple(row_ids)
        self._rows = row_sets
        self._colsets = None
        self._ones = ones

    # -- basic accessors -------------------------------------------------

    @property
    def columns(self) -> tuple:
        return self._columns

    @property
    def rows(self) -> tuple:
        return self._row_ids

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._row_ids), len(self._columns)

    @property
    def ones_count(self) -> int:
        return self._ones

    def row(self, r) -> frozenset:
        """Columns holding a 1 in row ``r``."""
        try:
            return self._rows[r]
        except KeyError:
            raise InvalidInput(f"unknown row {r!r}") from None

    def column(self, c) -> frozenset:
        """Rows holding a 1 in column ``c``."""
        if self._colsets is None:
            acc = {col: [] for col in self._columns}
            for r in self._row_ids:
                for col in self._rows[r]:
                    acc[col].append(r)
            self._colsets = {col: frozenset(v) for col, v in acc.items()}
        try:
            return self._colsets[c]
        except KeyError:
            raise InvalidInput(f"unknown column {c!r}") from None

    def position(self, c) -> int:
        try:
            return self._pos[c]
        except KeyError:
            raise InvalidInput(f"unknown column {c!r}") from None

    def row_positions(self, r) -> list[int]:
        """Sorted positions of the 1's of row ``r``."""
        pos = self._pos
        return sorted(pos[c] for c in self.row(r))

    def span(self, r):
        """``(first, last)`` positions of the 1's in row ``r``, or ``None``."""
        p = self.row_positions(r)
        return (p[0], p[-1]) if p else None

    def items(self) -> Iterator[tuple]:
        for r in self._row_ids:
            yield r, self._rows[r]

    def __contains__(self, r) -> bool:
        return r in self._rows

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return (self._columns == other._columns
                and self._row_ids == other._row_ids
                and self._rows == other._rows)

    def __hash__(self):
        return hash((self._columns, self._row_ids))

    def __repr__(self) -> str:
        return f"BinaryMatrix(rows={len(self._row_ids)}, cols={len(self._columns)}, ones={self._ones})"

    # -- derived matrices ------------------------------------------------

    def reorder(self, order: Sequence[Hashable]) -> "BinaryMatrix":
        """Same rows, columns permuted into ``order``."""
        order = tuple(order)
        if len(order) != len(self._columns) or set(order) != set(self._columns):
            raise InvalidInput("order is not a permutation of the columns")
        return BinaryMatrix(self.items(), order)

    def submatrix(self, rows: Iterable | None = None, cols: Iterable | None = None) -> "BinaryMatrix":
        """Copy restricted to ``rows`` and ``cols`` (``None`` keeps all).

        Relative row and column order is preserved, as are all identities.
        """
        if rows is None:
            keep_rows = self._row_ids
        else:
            rs = set(rows)
            bad = rs.difference(self._rows)
            if bad:
                raise InvalidInput(f"unknown rows {sorted(map(str, bad))}")
            keep_rows = [r for r in self._row_ids if r in rs]
        if cols is None:
            keep_cols = self._columns
            return BinaryMatrix(((r, self._rows[r]) for r in keep_rows), keep_cols)
        cs = set(cols)
        bad = cs.difference(self._pos)
        if bad:
            raise InvalidInput(f"unknown columns {sorted(map(str, bad))}")
        keep_cols = [c for c in self._columns if c in cs]
        return BinaryMatrix(((r, self._rows[r] & cs) for r in keep_rows), keep_cols)

    def with_rows(self, extra) -> "BinaryMatrix":
        """A copy with additional rows appended."""
        extra = extra.items() if isinstance(extra, Mapping) else extra
        return BinaryMatrix(list(self.items()) + list(extra), self._columns)

    def is_c1_ordered(self) -> bool:
        return is_c1_ordered(self)

    def to_dense(self) -> list[list[int]]:
        pos = self._pos
        out = []
        for r in self._row_ids:
            line = [0] * len(self._columns)
            for c in self._rows[r]:
                line[pos[c]] = 1
            out.append(line)
        return out

    # -- text format -------------------------------------------------------

    def to_text(self) -> str:
        lines = [f"rows {len(self._row_ids)} cols {len(self._columns)}"]
        for r in self._row_ids:
            cs = sorted(self._rows[r], key=self._pos.__getitem__)
            lines.append(f"{r}: " + " ".join(str(c) for c in cs) if cs else f"{r}:")
        lines.append("order: " + " ".join(str(c) for c in self._columns))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BinaryMatrix":
        return parse_matrix(text)


def from_row_sets(rows, column_order: Sequence[Hashable]) -> BinaryMatrix:
    """Build a matrix from ``(row_id, column_set)`` pairs and a column order."""
    return BinaryMatrix(rows, column_order)


def submatrix(m: BinaryMatrix, row_subset=None, col_subset=None) -> BinaryMatrix:
    return m.submatrix(row_subset, col_subset)


def is_c1_ordered(m: BinaryMatrix) -> bool:
    """True iff every row's 1's are contiguous in the current column order."""
    pos = m._pos
    for r in m.rows:
        s = m._rows[r]
        if len(s) < 2:
            continue
        lo = hi = None
        for c in s:
            p = pos[c]
            if lo is None or p < lo:
                lo = p
            if hi is None or p > hi:
                hi = p
        if hi - lo + 1 != len(s):
            return False
    return True


def parse_matrix(text: str) -> BinaryMatrix:
    """Parse the ``rows r cols c`` / ``name: cols`` / ``order:`` format."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedInput("empty matrix text")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "rows" or head[2] != "cols":
        raise MalformedInput(f"bad header line: {lines[0]!r}")
    try:
        nrows, ncols = int(head[1]), int(head[3])
    except ValueError:
        raise MalformedInput(f"bad header line: {lines[0]!r}") from None
    rows = []
    order = None
    for ln in lines[1:]:
        if ":" not in ln:
            raise MalformedInput(f"bad line: {ln!r}")
        name, _, rest = ln.partition(":")
        name = name.strip()
        toks = rest.split()
        if name == "order":
            if order is not None:
                raise MalformedInput("duplicate order line")
            order = toks
        else:
            rows.append((name, toks))
    if order is None:
        raise MalformedInput("missing order line")
    if len(order) != ncols or len(rows) != nrows:
        raise MalformedInput("header counts do not match the body")
    try:
        return BinaryMatrix(rows, order)
    except InvalidInput as exc:
        raise MalformedInput(str(exc)) from None


# ---------------------------------------------------------------------------
# Bucket-sort toolkit


def _sort_within(lists: list[list[int]], top: int, stats) -> list[list[int]]:
    buckets = [[] for _ in range(top + 1)]
    for i, lst in enumerate(lists):
        for v in lst:
            buckets[v].append(i)
    out = [[] for _ in lists]
    for v in range(top + 1):
        for i in buckets[v]:
            out[i].append(v)
    if stats is not None:
        stats["ops"] = stats.get("ops", 0) + 2 * sum(len(x) for x in lists) + top + 1
    return out


def _lex_order(lists: list[list[int]], top: int, stats) -> list[int]:
    """Indices of ``lists`` in lexicographic order (stable, shorter prefix first)."""
    if not lists:
        return []
    maxlen = max(len(x) for x in lists)
    by_sym = [[] for _ in range(top + 1)]
    for lst in lists:
        for p, a in enumerate(lst):
            by_sym[a].append(p)
    present = [[] for _ in range(maxlen)]
    for a in range(top + 1):
        for p in by_sym[a]:
            col = present[p]
            if not col or col[-1] != a:
                col.append(a)
    by_len = [[] for _ in range(maxlen + 1)]
    for i, lst in enumerate(lists):
        by_len[len(lst)].append(i)
    buckets = [[] for _ in range(top + 1)]
    queue: list[int] = []
    ops = 0
    for p in range(maxlen - 1, -1, -1):
        queue = by_len[p + 1] + queue
        for i in queue:
            buckets[lists[i][p]].append(i)
        ops += 2 * len(queue)
        queue = []
        for a in present[p]:
            queue.extend(buckets[a])
            buckets[a] = []
    if stats is not None:
        stats["ops"] = stats.get("ops", 0) + ops + 2 * sum(len(x) for x in lists) + top + 1
    return by_len[0] + queue


def group_radix_sort(groups, by: str = "lex", dedupe: bool = False, stats: dict | None = None):
    """Sort every group of integer lists with bucket passes only.

    Parameters
    ----------
    groups : sequence of ``(group_id, lists)``
        Each list holds positive integers; its elements are sorted first.
    by : {"lex", "length"}
        Lexicographic order, or nondecreasing length (stable).
    dedupe : bool
        Drop repeated lists inside each group.
    stats : dict, optional
        Receives an ``"ops"`` count of element operations.

    Returns
    -------
    list of ``(group_id, sorted_lists)`` in the input group order.
    """
    if by not in ("lex", "length"):
        raise InvalidInput(f"unknown sort key {by!r}")
    groups = list(groups)
    flat: list[list[int]] = []
    owner: list[int] = []
    for g, (_, lists) in enumerate(groups):
        for lst in lists:
            flat.append(list(lst))
            owner.append(g)
    top = max((v for lst in flat for v in lst), default=0)
    if any(v < 0 for lst in flat for v in lst):
        raise InvalidInput("list elements must be nonnegative integers")
    flat = _sort_within(flat, top, stats)
    if by == "lex" or dedupe:
        order = _lex_order(flat, top, stats)
    else:
        order = list(range(len(flat)))
    if by == "length":
        maxlen = max((len(x) for x in flat), default=0)
        lb = [[] for _ in range(maxlen + 1)]
        for i in order:
            lb[len(flat[i])].append(i)
        order = [i for b in lb for i in b]
        if stats is not None:
            stats["ops"] = stats.get("ops", 0) + 2 * len(order) + maxlen + 1
    # equal lists stay adjacent: the length pass is stable over a lex order
    per_group: list[list[list[int]]] = [[] for _ in groups]
    for i in order:
        bucket = per_group[owner[i]]
        if dedupe and bucket and bucket[-1] == flat[i]:
            continue
        bucket.append(flat[i])
    if stats is not None:
        stats["ops"] = stats.get("ops", 0) + len(order)
    return [(gid, per_group[g]) for g, (gid, _) in enumerate(groups)]


def is_chain(lists: Sequence[Sequence[int]]) -> bool:
    """True iff ``lists`` (sorted by length) satisfy X1 <= X2 <= ... as sets."""
    mark: dict[int, int] = {}
    for i in range(1, len(lists)):
        for v in lists[i]:
            mark[v] = i
        for v in lists[i - 1]:
            if mark.get(v) != i:
                return False
    return True


def chain_check(groups) -> list[tuple]:
    """For each group, whether its lists form a subset chain."""
    return [(gid, is_chain(lists)) for gid, lists in group_radix_sort(groups, by="length")]
