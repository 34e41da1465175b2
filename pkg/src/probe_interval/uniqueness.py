"""Is the model returned by recognition the only normal model, up to reversal?"""

from __future__ import annotations

from dataclasses import dataclass

from . import c1pm
from .errors import InvalidInput
from .recognition import CLIQUE, SEMI_CLIQUE, SIMPLICIAL, PartitionedGraph, RecognitionTrace

TEST_A = "A"
TEST_B = "B"
TEST_C = "C"
DISCONNECTED = "disconnected"


@dataclass(frozen=True)
class UniquenessVerdict:
    """``unique`` is true exactly when ``failing_test`` is None.

    ``failing_test`` is ``"A"``, ``"B"``, ``"C"`` or ``"disconnected"``, and
    ``hint`` names what to change to get a second normal model.
    """

    unique: bool
    failing_test: str | None = None
    hint: str = ""

    def __post_init__(self):
        if self.unique != (self.failing_test is None):
            raise InvalidInput("a verdict is unique exactly when no test fails")


def _total_columns(trace: RecognitionTrace) -> int:
    n = sum(p.model.n_columns for p in trace.components)
    return n + (1 if trace.isolated_nonprobes else 0)


def _ns_columns(pipe, classes_allowed):
    """Positions of columns of an allowed class that hold a simplicial non-probe."""
    classes = pipe.model.classes
    out = {}
    for x in pipe.ns:
        j = pipe.intervals[x][0]
        if classes[j] in classes_allowed:
            out.setdefault(j, []).append(pipe.g.names[x])
    return out


def _test_a(pipe) -> UniquenessVerdict | None:
    if not c1pm.is_unique(pipe.instance, pipe.solution):
        return UniquenessVerdict(False, TEST_A, "the probe matrix problem has another solution")
    return None


def _test_b(pipe) -> UniquenessVerdict | None:
    for j, xs in sorted(_ns_columns(pipe, (SIMPLICIAL,)).items()):
        if len(xs) >= 2:
            return UniquenessVerdict(
                False, TEST_B,
                f"move {xs[0]} from column {j} to a copy on the other side of the clique column")
    return None


def _test_c(pipe, classes_allowed) -> UniquenessVerdict | None:
    t2 = pipe.solution.t2
    parent = t2.parent_map()
    leaf_node = {x.leaf: x for x in t2.nodes() if x.is_leaf}
    for j, xs in sorted(_ns_columns(pipe, classes_allowed).items()):
        par = parent.get(id(leaf_node[pipe.column_ids[j]]))
        if par is not None and par.is_p:
            return UniquenessVerdict(
                False, TEST_C, f"column {j} holding {xs[0]} can move among its P-node siblings")
    return None


def _full(pipe) -> UniquenessVerdict:
    k = pipe.model.n_columns
    if k == 1:
        return UniquenessVerdict(True)
    v = _test_a(pipe)
    if v is None and k == 2:
        v = _test_b(pipe)
    if v is None and k >= 3:
        v = _test_c(pipe, (SEMI_CLIQUE, SIMPLICIAL))
    return v or UniquenessVerdict(True)


def _simplified(pipe) -> UniquenessVerdict:
    k = pipe.model.n_columns
    if k == 1:
        return UniquenessVerdict(True)
    if k == 2:
        return _test_b(pipe) or UniquenessVerdict(True)
    return _test_a(pipe) or _test_c(pipe, (SEMI_CLIQUE,)) or UniquenessVerdict(True)


def is_unique_normal_model(g: PartitionedGraph, trace: RecognitionTrace | None) -> UniquenessVerdict:
    """Decide whether ``g`` has exactly one normal model up to reversal.

    Parameters
    ----------
    g : PartitionedGraph
        The graph that was accepted.
    trace : RecognitionTrace
        The trace returned by :func:`recognize` for ``g``.
    """
    if trace is None:
        raise InvalidInput("uniqueness needs the recognition trace")
    if any(p.model is None for p in trace.components):
        raise InvalidInput("the trace holds an unfinished pipeline")
    ncols = _total_columns(trace)
    if not trace.connected:
        # components can be ordered freely; two one-column components are a mirror pair
        if ncols <= 1 or (ncols == 2 and trace.n_components == 2):
            return UniquenessVerdict(True)
        return UniquenessVerdict(False, DISCONNECTED, "the components can be reordered")
    if not trace.components:
        return UniquenessVerdict(True)
    pipe = trace.pipeline()
    full = _full(pipe)
    fast = _simplified(pipe)
    assert full.unique == fast.unique, (full, fast)
    return full
