"""Persistence modules, diagrams, persistent maps and interleavings."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from conftest import (
    INF,
    random_hypergraph,
    random_simplicial_filtration,
    random_weights,
    triangle_boundary,
    wedge_of_triangles,
)

from src.hyperpersist.errors import HypergraphError, PersistenceError
from src.hyperpersist.fieldlin import PrimeField, rank
from src.hyperpersist.hypercore import FilteredHypergraph, Hypergraph, HypergraphMorphism
from src.hyperpersist.persist import (
    ARROWS,
    SURFACED_ARROWS,
    VARIANTS,
    PersistenceDiagram,
    PersistenceModule,
    PersistentMap,
    build_morphism_diagram,
    build_persistence_module,
    build_persistent_map,
    commutative_diagram_triples,
    inclusion_shift,
    map_diagram_triple,
    module_diagram,
    rank_table,
    simplexwise_diagram,
    submodules,
    verify_strong_interleaving,
)


def _module(field, dims, transitions, values=None):
    values = tuple(range(len(dims))) if values is None else values
    return PersistenceModule(
        values, tuple(dims), tuple(np.array(t, dtype=np.int64).reshape(b, a)
                                   for t, a, b in zip(transitions, dims, dims[1:])), field
    )


class TestDiagram:
    def test_points_sorted_and_validated(self):
        d = PersistenceDiagram(((2, INF), (0, 1), (0, INF)))
        assert d.points == ((0, 1), (0, INF), (2, INF))
        assert d.essential == (0, 2)
        assert d.finite == ((0, 1),)
        with pytest.raises(PersistenceError):
            PersistenceDiagram(((1, 1),))

    def test_module_needs_increasing_values(self, f2):
        with pytest.raises(PersistenceError):
            PersistenceModule((1, 1), (0, 0), (np.zeros((0, 0), dtype=np.int64),), f2)

    def test_transition_shape_checked(self, f2):
        with pytest.raises(PersistenceError):
            PersistenceModule((0, 1), (1, 2), (np.zeros((1, 1), dtype=np.int64),), f2)

    def test_interval_module(self, f2):
        # k --1--> k --0--> 0 : one bar [0, 2)
        module = _module(f2, (1, 1, 0), ([1], []))
        assert module_diagram(module).points == ((0, 2),)
        assert module.dim_at(-1) == 0
        assert module.dim_at(1.5) == 1

    def test_rank_table(self, f2):
        module = _module(f2, (1, 2, 1), ([1, 0], [1, 1]))
        r = rank_table(module)
        assert r[1, 1] == 1 and r[2, 2] == 2 and r[3, 3] == 1
        assert r[1, 2] == 1 and r[2, 3] == 1 and r[1, 3] == 1
        assert module_diagram(module).points == ((0, INF), (1, 2))

    def test_empty_module(self, f2):
        assert len(module_diagram(PersistenceModule.zero((), f2))) == 0


class TestFiltrationModules:
    def test_triangle_boundary_variants(self, field):
        f = FilteredHypergraph.constant(triangle_boundary(), 0)
        embedded = module_diagram(build_persistence_module(f, "embedded", 1, field))
        upper = module_diagram(build_persistence_module(f, "delta_upper", 1, field))
        lower = module_diagram(build_persistence_module(f, "delta_lower", 1, field))
        assert embedded.points == ((0, INF),)
        assert upper.points == ((0, INF),)
        assert len(lower) == 0
        assert len(module_diagram(build_persistence_module(f, "embedded", 0, field))) == 0
        assert module_diagram(build_persistence_module(f, "delta_upper", 0, field)).points == ((0, INF),)

    def test_wedge_lower_variant(self, f2):
        _, f, g = wedge_of_triangles(2)
        assert module_diagram(build_persistence_module(f, "delta_lower", 1, f2)).points == ((1, INF),) * 2
        assert module_diagram(build_persistence_module(g, "delta_lower", 1, f2)).points == ((0, INF),) * 2

    def test_unknown_variant(self, f2):
        with pytest.raises(PersistenceError):
            build_persistence_module(FilteredHypergraph.constant(triangle_boundary()), "upper", 1, f2)

    def test_empty_hypergraph(self, f2):
        f = FilteredHypergraph.constant(Hypergraph(("a",), frozenset()))
        assert len(module_diagram(build_persistence_module(f, "embedded", 0, f2))) == 0

    def test_bars_cover_each_index_by_its_dimension(self, rng, field):
        for trial in range(30):
            f = random_weights(rng, random_hypergraph(rng, max_size=3))
            variant = VARIANTS[trial % 3]
            for n in (0, 1):
                module = build_persistence_module(f, variant, n, field)
                diagram = module_diagram(module)
                for t, d in zip(module.critical_values, module.dims):
                    assert sum(1 for b, e in diagram if b <= t < e) == d, (trial, variant, n, t)

    def test_composite_ranks_never_grow(self, rng, field):
        for trial in range(30):
            f = random_weights(rng, random_hypergraph(rng, max_size=3))
            module = build_persistence_module(f, VARIANTS[trial % 3], 1, field)
            r = rank_table(module)
            for i, j, k in itertools.combinations_with_replacement(range(1, len(module) + 1), 3):
                assert r[i, k] <= min(r[i, j], r[j, k])
                assert r[i, k] == rank(module.transition(i - 1, k - 1), field)

    def test_rank_formula_matches_column_reduction(self, rng, field):
        for _ in range(50):
            f = random_simplicial_filtration(rng)
            for n in range(3):
                expected = simplexwise_diagram(f, n, field)
                for variant in ("delta_upper", "embedded", "delta_lower"):
                    got = module_diagram(build_persistence_module(f, variant, n, field))
                    assert got == expected, (variant, n, dict(f.weights))

    def test_column_reduction_needs_a_complex(self, f2):
        with pytest.raises(HypergraphError):
            simplexwise_diagram(FilteredHypergraph.constant(triangle_boundary()), 1, f2)
        k = Hypergraph(("a", "b"), frozenset([(0,), (1,), (0, 1)]))
        with pytest.raises(HypergraphError):
            simplexwise_diagram(FilteredHypergraph(k, {(0,): 2, (1,): 0, (0, 1): 1}), 0, f2)

    def test_multiplicities_are_counted(self, f2):
        # Two vertices born at 0 merging at 1, a third vertex born at 2.
        k = Hypergraph(("a", "b", "c"), frozenset([(0,), (1,), (2,), (0, 1)]))
        f = FilteredHypergraph(k, {(0,): 0, (1,): 0, (2,): 2, (0, 1): 1})
        assert module_diagram(build_persistence_module(f, "delta_upper", 0, f2)).points == (
            (0, 1), (0, INF), (2, INF),
        )


class TestPersistentMaps:
    def test_commutation_checked(self, f2):
        source = _module(f2, (1, 1), ([1],))
        target = _module(f2, (1, 1), ([0],))
        with pytest.raises(PersistenceError):
            PersistentMap(source, target, (np.eye(1, dtype=np.int64), np.eye(1, dtype=np.int64)))

    def test_identity_and_zero_triples(self, f3):
        module = _module(f3, (1, 2, 1), ([1, 0], [1, 1]))
        whole = module_diagram(module)
        triple = map_diagram_triple(PersistentMap.identity(module))
        assert len(triple.ker) == 0 and len(triple.coker) == 0
        assert triple.im == whole
        triple = map_diagram_triple(PersistentMap.zero(module, module))
        assert triple.ker == whole and triple.coker == whole and len(triple.im) == 0

    def test_submodules_against_enumeration(self, rng):
        """Ranks of Ker, Im and Coker transitions match brute force over F_2."""
        f2 = PrimeField(2)

        def vectors(d):
            return [np.array(v, dtype=np.int64) for v in itertools.product((0, 1), repeat=d)]

        def log2_size(points):
            size = len({tuple(p) for p in points})
            return size.bit_length() - 1

        for _ in range(40):
            dims = tuple(int(d) for d in rng.integers(0, 4, size=4))
            steps = [rng.integers(0, 2, size=(b, a)) for a, b in zip(dims, dims[1:])]
            # The shift map M_i : V_i -> V_{i+1} is a morphism from V[0:3] to V[1:4].
            source = PersistenceModule((0, 1, 2), dims[:3], tuple(steps[:2]), f2)
            target = PersistenceModule((0, 1, 2), dims[1:], tuple(steps[1:]), f2)
            phi = PersistentMap(source, target, tuple(steps))
            ker, im, coker = submodules(phi)
            for i in range(3):
                kernel = [x for x in vectors(dims[i]) if not f2.matmul(steps[i], x).any()]
                image = [f2.matmul(steps[i], x) for x in vectors(dims[i])]
                assert ker.dims[i] == log2_size(kernel)
                assert im.dims[i] == log2_size(image)
                assert coker.dims[i] == dims[i + 1] - im.dims[i]
            for i in range(2):
                kernel = [x for x in vectors(dims[i]) if not f2.matmul(steps[i], x).any()]
                image = [f2.matmul(steps[i], x) for x in vectors(dims[i])]
                next_image = [f2.matmul(steps[i + 1], x) for x in vectors(dims[i + 1])]
                moved_kernel = [f2.matmul(steps[i], x) for x in kernel]
                moved_image = [f2.matmul(steps[i + 1], y) for y in image]
                cosets = [
                    (f2.matmul(steps[i + 1], y) + z) % 2
                    for y in vectors(dims[i + 1]) for z in next_image
                ]
                assert rank(ker.transitions[i], f2) == log2_size(moved_kernel)
                assert rank(im.transitions[i], f2) == log2_size(moved_image)
                assert rank(coker.transitions[i], f2) == log2_size(cosets) - im.dims[i + 1]


@pytest.fixture
def wedge_collapse():
    """Two triangles glued at a point, folded onto one of them."""
    vertices = ("o", "a", "b", "c", "d")
    records = [("o",), ("a",), ("b",), ("c",), ("d",),
               ("o", "a"), ("a", "b"), ("o", "b"), ("o", "c"), ("c", "d"), ("o", "d")]
    domain = Hypergraph.from_names(vertices, records)
    codomain = Hypergraph.from_names(("o", "a", "b"), [("o",), ("a",), ("b",), ("o", "a"), ("a", "b"), ("o", "b")])
    phi = HypergraphMorphism.from_names(domain, codomain, {"o": "o", "a": "a", "b": "b", "c": "a", "d": "b"})
    weights = {e: 0 for e in domain.hyperedges}
    weights[(3, 4)] = 1  # c-d closes the second triangle
    return phi, FilteredHypergraph(domain, weights)


class TestMorphismDiagrams:
    def test_arrow_catalogue(self):
        assert len(ARROWS) == 24
        assert set(SURFACED_ARROWS) <= set(ARROWS)
        assert ARROWS["inf.map"] == (("source", "inf"), ("target", "inf"), True)
        assert ARROWS["target.inf_sup"] == (("target", "inf"), ("target", "sup"), False)

    def test_identity_morphism_has_no_kernel_or_cokernel(self, rng, f2):
        for _ in range(10):
            f = random_weights(rng, random_hypergraph(rng, max_vertices=5, max_edges=8, max_size=3))
            phi = HypergraphMorphism.identity(f.base)
            for direction in ("pushforward", "pullback"):
                triples = commutative_diagram_triples(phi, f, direction, 1, f2, SURFACED_ARROWS)
                for name in ("upper.map", "sup.map", "inf.map", "lower.map"):
                    assert len(triples[name].ker) == 0
                    assert len(triples[name].coker) == 0

    def test_fold_kills_one_cycle(self, wedge_collapse, f2):
        phi, f = wedge_collapse
        triple = build_morphism_diagram(phi, f, "pushforward", 1, f2).triple("upper.map")
        # The second triangle closes at 1 and maps onto the first.
        assert triple.im.points == ((0, INF),)
        assert triple.ker.points == ((1, INF),)
        assert len(triple.coker) == 0

    def test_every_arrow_builds(self, wedge_collapse, f3):
        phi, f = wedge_collapse
        diagram = build_morphism_diagram(phi, f, "pushforward", 1, f3)
        for name in ARROWS:
            pmap = diagram.persistent_map(name)
            assert len(pmap.matrices) == len(diagram.grid)

    def test_pullback_on_collapse(self, f2):
        domain = Hypergraph.from_names(("a", "b", "c"), [("a", "b"), ("b", "c"), ("a", "c")])
        codomain = Hypergraph.from_names(("x", "y"), [("x", "y"), ("y",)])
        phi = HypergraphMorphism.from_names(domain, codomain, {"a": "x", "b": "y", "c": "y"})
        f = FilteredHypergraph(codomain, {(0, 1): 0, (1,): 1})
        pmap = build_persistent_map(phi, f, "pullback", "embedded", 1, f2)
        assert pmap.source.dims == (0, 1)
        assert pmap.target.dims == (0, 0)
        triple = map_diagram_triple(pmap)
        assert len(triple.im) == 0
        assert triple.ker.points == ((1, INF),)

    def test_direction_checks_base(self, wedge_collapse, f2):
        phi, f = wedge_collapse
        with pytest.raises(HypergraphError):
            build_morphism_diagram(phi, f, "pullback", 1, f2)
        with pytest.raises(PersistenceError):
            build_morphism_diagram(phi, f, "sideways", 1, f2)
        with pytest.raises(PersistenceError):
            build_morphism_diagram(phi, f, "pushforward", 1, f2).persistent_map("inf.sideways")


class TestInterleaving:
    def test_identity_shift_interleaves(self, rng, f2):
        for _ in range(10):
            f = random_weights(rng, random_hypergraph(rng, max_vertices=5, max_edges=8))
            module = build_persistence_module(f, "embedded", 1, f2)
            shift = inclusion_shift(module, module, 0)
            assert verify_strong_interleaving(module, module, 0, shift, shift) == (True, "")

    def test_detects_too_small_shift(self, f2):
        # One bar born at 0 against one born at 2; a shift of 1 is not enough.
        k = Hypergraph(("a",), frozenset([(0,)]))
        early = build_persistence_module(FilteredHypergraph(k, {(0,): 0}), "embedded", 0, f2)
        late = build_persistence_module(FilteredHypergraph(k, {(0,): 2}), "embedded", 0, f2)
        eps = Fraction(1)

        def zero_like(source, target):
            return lambda t: np.zeros((target.dim_at(t + eps), source.dim_at(t)), dtype=np.int64)

        ok, message = verify_strong_interleaving(
            early, late, eps, zero_like(early, late), inclusion_shift(late, early, eps)
        )
        assert not ok
        assert message.startswith("condition")

    def test_shift_into_empty_module_rejected(self, f2):
        k = Hypergraph(("a",), frozenset([(0,)]))
        early = build_persistence_module(FilteredHypergraph(k, {(0,): 0}), "embedded", 0, f2)
        late = build_persistence_module(FilteredHypergraph(k, {(0,): 5}), "embedded", 0, f2)
        with pytest.raises(PersistenceError):
            inclusion_shift(early, late, 1)(0)
