"""Recognition of partitioned probe interval graphs.

Given a graph whose vertices are split into probes and non-probes, find an
interval model in which probes meet exactly their neighbours and
non-probes meet exactly their probe neighbours, or reject.  The model found
is normal, and the package can also decide whether it is the only normal
model up to reversal.
"""

from .c1pm import C1PMInstance, C1PMSolution, solve as solve_c1pm
from .chordal_interval import chordal_cliques, interval_clique_order
from .errors import (
    InvalidInput, MalformedInput, NonIndependentNonProbes, RefusedParams, RefusedTooLarge,
    Rejected,
)
from .pq_tree import PQNode, PQTree, parse_tree
from .recognition import (
    PartitionedGraph, ProbeIntervalModel, RecognitionTrace, is_normal_model, load_graph,
    parse_graph, recognize, verify_model,
)
from .sparse_matrix import BinaryMatrix, parse_matrix
from .uniqueness import UniquenessVerdict, is_unique_normal_model

__version__ = "0.1.0"
