"""Hand-computed homology and distances on small named hypergraphs.

Each family separates the three variants: raising a single weight by eps
moves exactly one of the embedded, associated-complex and
lower-associated-complex diagrams.
"""

import math

import pytest

from conftest import INF, simplex_with_edges, triangle_blocks, triangle_boundary, wedge_of_triangles

from src.hyperpersist.chains import ambient_chains, embedded_homology, homology, hypergraph_complex
from src.hyperpersist.fieldlin import PrimeField
from src.hyperpersist.hypercore import associated_complex, count_simplices, linf_function_distance
from src.hyperpersist.metric import bottleneck_p, hypergraph_distance
from src.hyperpersist.persist import VARIANTS, build_persistence_module, module_diagram

EPS = 1


def _variant_distances(f, g, n, order, field):
    return {
        variant: bottleneck_p(
            module_diagram(build_persistence_module(f, variant, n, field)),
            module_diagram(build_persistence_module(g, variant, n, field)),
            order,
        )
        for variant in VARIANTS
    }


def _expect(distances, moved, value, tolerance):
    for variant, got in distances.items():
        want = value if variant == moved else 0.0
        assert got == pytest.approx(want, abs=tolerance), variant


@pytest.mark.parametrize("p", [2, 3])
def test_hollow_triangle_homology(p):
    field = PrimeField(p)
    h = triangle_boundary()
    ambient = ambient_chains(associated_complex(h), field)
    assert [embedded_homology(h, n, field, ambient).dim for n in (0, 1)] == [0, 1]
    upper = hypergraph_complex(h, "upper", field, ambient)
    lower = hypergraph_complex(h, "lower", field, ambient)
    assert [homology(upper, n).dim for n in (0, 1)] == [1, 1]
    assert [homology(lower, n).dim for n in (0, 1)] == [0, 0]
    assert len(hypergraph_complex(h, "lower", field, ambient).generators(0)) == 0


class TestWedgeOfTriangles:
    """Raising the wedge point only delays the lower-associated cycles."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_distances(self, k):
        field = PrimeField(2)
        h, f, g = wedge_of_triangles(k, eps=EPS)
        assert linf_function_distance(f, g) == EPS
        assert count_simplices(associated_complex(h), 1) == 3 * k
        _expect(_variant_distances(f, g, 1, INF, field), "delta_lower", EPS, 0)
        _expect(_variant_distances(f, g, 1, 1, field), "delta_lower", k * EPS, 0)
        _expect(_variant_distances(f, g, 1, 2, field), "delta_lower", math.sqrt(k) * EPS, 1e-9)
        assert hypergraph_distance(f, g, 1, INF, field) == EPS


class TestSimplexWithEdges:
    """Raising the 1-faces only delays the embedded cycles."""

    @pytest.mark.parametrize("m", [3, 4])
    def test_distances(self, m):
        field = PrimeField(2)
        h, f, g = simplex_with_edges(m, eps=EPS)
        cycles = m * (m - 1) // 2
        assert count_simplices(associated_complex(h), 1) == math.comb(m + 1, 2)
        _expect(_variant_distances(f, g, 1, INF, field), "embedded", EPS, 0)
        _expect(_variant_distances(f, g, 1, 1, field), "embedded", cycles * EPS, 0)
        _expect(_variant_distances(f, g, 1, 2, field), "embedded", math.sqrt(cycles) * EPS, 1e-9)
        assert hypergraph_distance(f, g, 1, 1, field) == cycles * EPS


class TestTriangleBlocks:
    """A uniform shift of the blocks is seen only through the associated complex."""

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_distances(self, k):
        field = PrimeField(3)
        h, f, g = triangle_blocks(k, eps=EPS)
        assert count_simplices(associated_complex(h), 1) == 5 * k
        _expect(_variant_distances(f, g, 1, INF, field), "delta_upper", EPS, 0)
        _expect(_variant_distances(f, g, 1, 1, field), "delta_upper", k * EPS, 0)
        _expect(_variant_distances(f, g, 1, 2, field), "delta_upper", math.sqrt(k) * EPS, 1e-9)
        assert hypergraph_distance(f, g, 1, 1, field) == k * EPS
