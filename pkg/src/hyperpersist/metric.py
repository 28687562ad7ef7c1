"""
Bottleneck distances between persistence diagrams.

The ground metric on the plane is l-infinity. A point may be matched to
its nearest diagonal point at cost (death - birth) / 2. Points with
infinite death are matched only among themselves; if the two diagrams
have different numbers of them the distance is infinite.
"""

import logging

import networkx as nx
import numpy as np
from networkx.algorithms import bipartite
from scipy import optimize

from .hypercore import align_filtration
from .persist import VARIANTS, build_persistence_module, default_field, module_diagram

log = logging.getLogger("hyperpersist.metric")

INF = float("inf")


def _ground(x, y):
    return max(abs(x[0] - y[0]), abs(x[1] - y[1]))


def _half_persistence(x):
    return (x[1] - x[0]) / 2


def _essential_costs(d1, d2):
    """Costs of the sorted matching of infinite-death points, or None."""
    a, b = sorted(d1.essential), sorted(d2.essential)
    if len(a) != len(b):
        return None
    return [abs(x - y) for x, y in zip(a, b)]


def _matching_graph(a, b, delta):
    graph = nx.Graph()
    left = [("a", i) for i in range(len(a))] + [("a_diag", j) for j in range(len(b))]
    right = [("b", j) for j in range(len(b))] + [("b_diag", i) for i in range(len(a))]
    graph.add_nodes_from(left, bipartite=0)
    graph.add_nodes_from(right, bipartite=1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if _ground(x, y) <= delta:
                graph.add_edge(("a", i), ("b", j))
        if _half_persistence(x) <= delta:
            graph.add_edge(("a", i), ("b_diag", i))
    for j, y in enumerate(b):
        if _half_persistence(y) <= delta:
            graph.add_edge(("a_diag", j), ("b", j))
        for i in range(len(a)):
            graph.add_edge(("a_diag", j), ("b_diag", i))
    return graph, left


def _feasible(a, b, delta):
    graph, left = _matching_graph(a, b, delta)
    matching = bipartite.hopcroft_karp_matching(graph, top_nodes=left)
    return len(matching) // 2 == len(a) + len(b)


def bottleneck_infinity(d1, d2):
    """Exact L-infinity bottleneck distance.

    The optimum is one of the pairwise ground distances or half
    persistences, so the smallest feasible candidate is found by binary
    search with a perfect-matching test at each step.
    """
    essential = _essential_costs(d1, d2)
    if essential is None:
        return INF
    a, b = list(d1.finite), list(d2.finite)
    finite = 0.0
    if a or b:
        candidates = {0.0}
        candidates.update(_half_persistence(x) for x in a)
        candidates.update(_half_persistence(y) for y in b)
        candidates.update(_ground(x, y) for x in a for y in b)
        ordered = sorted(candidates)
        lo, hi = 0, len(ordered) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if _feasible(a, b, ordered[mid]):
                hi = mid
            else:
                lo = mid + 1
        finite = ordered[lo]
    return float(max([finite] + essential))


def bottleneck_p(d1, d2, order):
    """L^p bottleneck distance by min-cost perfect matching.

    Each diagram is padded with the diagonal projections of the other's
    finite points; diagonal-to-diagonal pairs cost nothing.

    Raises:
        ValueError: order is below 1.
    """
    if order == INF:
        return bottleneck_infinity(d1, d2)
    if order < 1:
        raise ValueError(f"bottleneck order must be at least 1, got {order}")
    essential = _essential_costs(d1, d2)
    if essential is None:
        return INF
    total = sum(c ** order for c in essential)
    a, b = list(d1.finite), list(d2.finite)
    m, n = len(a), len(b)
    if m + n:
        cost = np.zeros((m + n, n + m))
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                cost[i, j] = _ground(x, y) ** order
        forbidden = cost.sum() + sum(_half_persistence(x) ** order for x in a + b) + 1.0
        cost[:m, n:] = forbidden
        cost[m:, :n] = forbidden
        for i, x in enumerate(a):
            cost[i, n + i] = _half_persistence(x) ** order
        for j, y in enumerate(b):
            cost[m + j, j] = _half_persistence(y) ** order
        rows, cols = optimize.linear_sum_assignment(cost)
        total += float(cost[rows, cols].sum())
    return float(total ** (1.0 / order))


def hypergraph_distance(f, g, n, order=INF, field=None):
    """Largest of the three variant distances between two filtrations of one hypergraph.

    ``g`` is first reindexed onto the vertex order of ``f``.

    Raises:
        HypergraphError: the filtrations live on different hypergraphs.
    """
    g = align_filtration(g, f.base)
    field = field or default_field()
    distances = {}
    for variant in VARIANTS:
        df = module_diagram(build_persistence_module(f, variant, n, field))
        dg = module_diagram(build_persistence_module(g, variant, n, field))
        distances[variant] = bottleneck_p(df, dg, order)
    log.info(
        "Distance in degree %d (p=%s): %s",
        n, order, ", ".join(f"{k}={v:g}" for k, v in distances.items()),
    )
    return max(distances.values())


def map_distance(t1, t2, order=INF):
    """Largest componentwise distance between two diagram triples.

    With ``order`` below infinity this is an L^p extension of the
    l-infinity map distance.
    """
    return max(
        bottleneck_p(t1.ker, t2.ker, order),
        bottleneck_p(t1.im, t2.im, order),
        bottleneck_p(t1.coker, t2.coker, order),
    )

