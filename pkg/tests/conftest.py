"""Shared hypergraph builders, random instance generators and reference oracles."""

import itertools
import math

import numpy as np
import pytest

from src.hyperpersist.fieldlin import PrimeField
from src.hyperpersist.hypercore import (
    FilteredHypergraph,
    Hypergraph,
    HypergraphMorphism,
    associated_complex,
)
from src.hyperpersist.persist import PersistenceDiagram

INF = float("inf")


@pytest.fixture
def f2():
    return PrimeField(2)


@pytest.fixture
def f3():
    return PrimeField(3)


@pytest.fixture(params=[2, 3], ids=["F2", "F3"])
def field(request):
    return PrimeField(request.param)


# ---------------------------------------------------------------------------
# Named hypergraphs
# ---------------------------------------------------------------------------


def triangle_boundary():
    """Three edges of a triangle, no vertices."""
    return Hypergraph.from_names(("v0", "v1", "v2"), [("v0", "v1"), ("v1", "v2"), ("v0", "v2")])


def wedge_of_triangles(k, a=0, eps=1):
    """k hollow triangles glued at v0, vertices included.

    Returns (hypergraph, f, g) with f raised by eps on v0 and g constant.
    """
    vertices = ["v0"]
    edges = [("v0",)]
    for i in range(k):
        x, y = f"x{i}", f"y{i}"
        vertices += [x, y]
        edges += [(x,), (y,), ("v0", x), (x, y), ("v0", y)]
    h = Hypergraph.from_names(vertices, edges)
    v0 = (vertices.index("v0"),)
    f = FilteredHypergraph(h, {e: (a + eps if e == v0 else a) for e in h.hyperedges})
    return h, f, FilteredHypergraph.constant(h, a)


def simplex_with_edges(m, a=0, eps=1):
    """The m-simplex together with its 1-faces and nothing else.

    Returns (hypergraph, f, g) with the edges raised by eps under f.
    """
    vertices = [f"v{i}" for i in range(m + 1)]
    edges = [tuple(range(m + 1))] + list(itertools.combinations(range(m + 1), 2))
    h = Hypergraph(tuple(vertices), frozenset(edges))
    f = FilteredHypergraph(h, {e: (a + eps if len(e) == 2 else a) for e in h.hyperedges})
    return h, f, FilteredHypergraph.constant(h, a)


def triangle_blocks(k, a=0, eps=1):
    """k disjoint blocks of one 3-vertex hyperedge and two 2-vertex hyperedges.

    Returns (hypergraph, f, g) with f constant a and g constant a + eps.
    """
    vertices = [f"v{i}" for i in range(4 * k)]
    edges = []
    for i in range(k):
        b = 4 * i
        edges += [(b, b + 1, b + 2), (b + 1, b + 3), (b + 2, b + 3)]
    h = Hypergraph(tuple(vertices), frozenset(edges))
    return h, FilteredHypergraph.constant(h, a), FilteredHypergraph.constant(h, a + eps)


def full_simplex(m):
    return associated_complex(Hypergraph(tuple(f"v{i}" for i in range(m + 1)), frozenset([tuple(range(m + 1))])))


# Coauthorship snapshots: one coauthored article per year, never retracted.
COAUTHOR_SNAPSHOTS = {
    "2009": ["u"],
    "2010": ["u", "u v"],
    "2011": ["u", "u v", "v w"],
    "2013": ["u", "u v", "v w", "u v w"],
}


def snapshot_text(records, weight=0):
    return "".join(f"{weight} : {r}\n" for r in records)


# ---------------------------------------------------------------------------
# Random instances
# ---------------------------------------------------------------------------


def random_hypergraph(rng, max_vertices=7, max_edges=20, max_size=4):
    n = int(rng.integers(2, max_vertices + 1))
    vertices = tuple(f"v{i}" for i in range(n))
    count = int(rng.integers(1, max_edges + 1))
    edges = set()
    for _ in range(count):
        size = int(rng.integers(1, min(max_size, n) + 1))
        edges.add(tuple(sorted(int(v) for v in rng.choice(n, size=size, replace=False))))
    return Hypergraph(vertices, frozenset(edges))


def random_weights(rng, h, low=0, high=4):
    return FilteredHypergraph(h, {e: int(rng.integers(low, high + 1)) for e in h.hyperedges})


def perturb(rng, f, eps):
    """An integer perturbation of f moving every weight by at most eps."""
    return FilteredHypergraph(
        f.base, {e: w + int(rng.integers(-eps, eps + 1)) for e, w in f.weights.items()}
    )


def random_simplicial_filtration(rng, max_vertices=7, max_size=4):
    """Downward-closed random complex with weights that never drop onto a face."""
    k = associated_complex(random_hypergraph(rng, max_vertices, 6, max_size))
    raw = {e: int(rng.integers(0, 5)) for e in k.hyperedges}
    weights = {}
    for e in sorted(k.hyperedges, key=len):
        faces = [e[:i] + e[i + 1:] for i in range(len(e))] if len(e) > 1 else []
        weights[e] = max([raw[e]] + [weights[face] for face in faces])
    return FilteredHypergraph(k, weights)


def random_morphism(rng, max_domain=5, max_codomain=4, max_size=3, extra_edges=2):
    """A random domain hypergraph mapped into a codomain containing its image."""
    domain = random_hypergraph(rng, max_domain, 8, max_size)
    m = int(rng.integers(1, max_codomain + 1))
    vertex_map = tuple(int(rng.integers(0, m)) for _ in domain.vertices)
    edges = {tuple(sorted({vertex_map[v] for v in e})) for e in domain.hyperedges}
    for _ in range(extra_edges):
        size = int(rng.integers(1, min(max_size, m) + 1))
        edges.add(tuple(sorted(int(v) for v in rng.choice(m, size=size, replace=False))))
    codomain = Hypergraph(tuple(f"w{i}" for i in range(m)), frozenset(edges))
    return HypergraphMorphism(domain, codomain, vertex_map)


def random_diagram(rng, max_points=4, essential=0):
    points = []
    for _ in range(int(rng.integers(0, max_points + 1))):
        b = int(rng.integers(0, 8))
        points.append((b, b + int(rng.integers(1, 6))))
    points += [(int(rng.integers(0, 8)), INF) for _ in range(essential)]
    return PersistenceDiagram(tuple(points))


# ---------------------------------------------------------------------------
# Exhaustive matching oracle
# ---------------------------------------------------------------------------


def _ground(x, y):
    return max(abs(x[0] - y[0]), abs(x[1] - y[1]))


def _partial_matchings(m, n):
    """Every injective partial map from range(m) into range(n)."""
    if m == 0:
        yield ()
        return
    for rest in _partial_matchings(m - 1, n):
        used = set(j for j in rest if j is not None)
        yield rest + (None,)
        for j in range(n):
            if j not in used:
                yield rest + (j,)


def brute_force_distance(d1, d2, order=INF):
    """Minimum over every matching, by exhaustive enumeration."""
    e1, e2 = sorted(d1.essential), sorted(d2.essential)
    if len(e1) != len(e2):
        return INF
    a, b = list(d1.finite), list(d2.finite)
    best = INF
    for perm in itertools.permutations(range(len(e2))):
        essential = [abs(e1[i] - e2[j]) for i, j in enumerate(perm)]
        for matching in _partial_matchings(len(a), len(b)):
            costs = list(essential)
            for i, j in enumerate(matching):
                costs.append((a[i][1] - a[i][0]) / 2 if j is None else _ground(a[i], b[j]))
            matched = set(j for j in matching if j is not None)
            costs += [(y[1] - y[0]) / 2 for j, y in enumerate(b) if j not in matched]
            if order == INF:
                value = max(costs, default=0.0)
            else:
                value = math.fsum(c ** order for c in costs) ** (1.0 / order)
            best = min(best, value)
    return float(best)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
