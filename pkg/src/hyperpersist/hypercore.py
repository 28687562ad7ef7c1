"""
Hypergraph combinatorics.

Hyperedges are tuples of vertex indices in strictly ascending order; the
vertex order is the declaration order and fixes every orientation sign
downstream. All types are frozen and operations return new objects.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from types import MappingProxyType
from typing import Mapping

from .errors import HypergraphError

log = logging.getLogger("hyperpersist.hypercore")


def edge_order(edge):
    """Canonical listing order: by cardinality, then lexicographic."""
    return (len(edge), edge)


@dataclass(frozen=True)
class Hypergraph:
    """A finite ordered vertex list and a set of nonempty vertex subsets."""

    vertices: tuple
    hyperedges: frozenset = frozenset()

    def __post_init__(self):
        vertices = tuple(self.vertices)
        if len(set(vertices)) != len(vertices):
            raise HypergraphError("vertex labels must be distinct")
        edges = frozenset(tuple(e) for e in self.hyperedges)
        n = len(vertices)
        for e in edges:
            if not e:
                raise HypergraphError("hyperedges must be nonempty")
            if any(not 0 <= v < n for v in e):
                raise HypergraphError(f"hyperedge {e} references a vertex outside 0..{n - 1}")
            if any(a >= b for a, b in zip(e, e[1:])):
                raise HypergraphError(f"hyperedge {e} is not strictly ascending")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "hyperedges", edges)

    @classmethod
    def from_names(cls, vertices, edges):
        """Build from vertex labels and hyperedges given as label collections."""
        vertices = tuple(vertices)
        position = {v: i for i, v in enumerate(vertices)}
        canonical = set()
        for names in edges:
            try:
                edge = tuple(sorted({position[v] for v in names}))
            except KeyError as exc:
                raise HypergraphError(f"unknown vertex {exc.args[0]!r}") from None
            if edge in canonical:
                raise HypergraphError(f"duplicate hyperedge {sorted(names)}")
            canonical.add(edge)
        return cls(vertices, frozenset(canonical))

    def with_edges(self, edges):
        """Same vertex list, different hyperedges."""
        return Hypergraph(self.vertices, frozenset(edges))

    def sorted_edges(self):
        return sorted(self.hyperedges, key=edge_order)

    def names(self, edge):
        return tuple(self.vertices[v] for v in edge)

    @property
    def dimension(self):
        """Largest hyperedge cardinality minus one; -1 when empty."""
        return max((len(e) for e in self.hyperedges), default=0) - 1

    def __len__(self):
        return len(self.hyperedges)

    def __contains__(self, edge):
        return tuple(edge) in self.hyperedges


@dataclass(frozen=True, eq=False)
class FilteredHypergraph:
    """A hypergraph with a finite real weight on every hyperedge."""

    base: Hypergraph
    weights: Mapping = field(default_factory=dict)

    def __post_init__(self):
        weights = {tuple(e): w for e, w in dict(self.weights).items()}
        missing = self.base.hyperedges - weights.keys()
        if missing:
            raise HypergraphError(f"no weight for hyperedge {min(missing, key=edge_order)}")
        extra = weights.keys() - self.base.hyperedges
        if extra:
            raise HypergraphError(f"weight given for non-hyperedge {min(extra, key=edge_order)}")
        for e, w in weights.items():
            if w != w or w in (float("inf"), float("-inf")):
                raise HypergraphError(f"weight of hyperedge {e} must be finite, got {w}")
        object.__setattr__(self, "weights", MappingProxyType(weights))

    @classmethod
    def constant(cls, base, value=0):
        return cls(base, {e: value for e in base.hyperedges})

    def weight(self, edge):
        return self.weights[tuple(edge)]

    def __hash__(self):
        return hash((self.base, frozenset(self.weights.items())))

    def __eq__(self, other):
        if not isinstance(other, FilteredHypergraph):
            return NotImplemented
        return self.base == other.base and dict(self.weights) == dict(other.weights)


@dataclass(frozen=True)
class HypergraphMorphism:
    """A vertex map sending every domain hyperedge onto a codomain hyperedge.

    ``vertex_map[i]`` is the codomain index of domain vertex ``i``.
    """

    domain: Hypergraph
    codomain: Hypergraph
    vertex_map: tuple

    def __post_init__(self):
        vertex_map = tuple(int(v) for v in self.vertex_map)
        object.__setattr__(self, "vertex_map", vertex_map)
        if len(vertex_map) != len(self.domain.vertices):
            raise HypergraphError(
                f"vertex map covers {len(vertex_map)} of {len(self.domain.vertices)} domain vertices"
            )
        n = len(self.codomain.vertices)
        for i, v in enumerate(vertex_map):
            if not 0 <= v < n:
                raise HypergraphError(
                    f"vertex {self.domain.vertices[i]!r} maps outside the codomain"
                )
        for edge in self.domain.sorted_edges():
            image = self._image(edge)
            if image not in self.codomain.hyperedges:
                raise HypergraphError(
                    f"image of hyperedge {self.domain.names(edge)} is "
                    f"{self.codomain.names(image)}, which is not a hyperedge of the codomain"
                )

    def _image(self, edge):
        return tuple(sorted({self.vertex_map[v] for v in edge}))

    @classmethod
    def from_names(cls, domain, codomain, mapping):
        """Build from a label-to-label mapping, validating it first."""
        ok, message = validate_morphism(mapping, domain, codomain)
        if not ok:
            raise HypergraphError(message)
        position = {v: i for i, v in enumerate(codomain.vertices)}
        return cls(domain, codomain, tuple(position[mapping[v]] for v in domain.vertices))

    @classmethod
    def identity(cls, hypergraph):
        return cls(hypergraph, hypergraph, tuple(range(len(hypergraph.vertices))))

    @classmethod
    def inclusion(cls, small, large):
        """Inclusion of ``small`` into ``large`` matching vertices by label."""
        mapping = {v: v for v in small.vertices}
        return cls.from_names(small, large, mapping)


def is_simplicial(h):
    """True when every nonempty subset of a hyperedge is a hyperedge."""
    edges = h.hyperedges
    for e in edges:
        if len(e) > 1:
            for face in combinations(e, len(e) - 1):
                if face not in edges:
                    return False
    return True


def associated_complex(h):
    """The smallest simplicial complex containing ``h``."""
    closure = set()
    for e in h.hyperedges:
        if e in closure:
            continue
        for k in range(1, len(e) + 1):
            closure.update(combinations(e, k))
    return h.with_edges(closure)


def lower_associated_complex(h):
    """The largest simplicial complex contained in ``h``."""
    edges = h.hyperedges
    kept = set()
    for e in sorted(edges, key=edge_order):
        if len(e) == 1 or all(face in kept for face in combinations(e, len(e) - 1)):
            kept.add(e)
    return h.with_edges(kept)


def sublevel(f, t):
    """Hyperedges of weight at most ``t``. No closure is applied."""
    return f.base.with_edges(e for e, w in f.weights.items() if w <= t)


def critical_values(f):
    return sorted(set(f.weights.values()))


def count_simplices(k, n):
    """Number of hyperedges with exactly n + 1 vertices."""
    return sum(1 for e in k.hyperedges if len(e) == n + 1)


def map_hyperedge(phi, edge):
    edge = tuple(edge)
    if edge not in phi.domain.hyperedges:
        raise HypergraphError(f"{edge} is not a hyperedge of the domain")
    return phi._image(edge)


def image_hypergraph(phi):
    """phi(H) as a hypergraph on the codomain's vertex list."""
    return phi.codomain.with_edges(phi._image(e) for e in phi.domain.hyperedges)


def validate_morphism(vertex_map, domain, codomain):
    """Check a label-to-label vertex map against two hypergraphs.

    Args:
        vertex_map: mapping from domain vertex labels to codomain labels.
        domain: the source hypergraph.
        codomain: the target hypergraph.

    Returns:
        tuple: (ok, message). ``message`` is empty on success and names the
        first violation otherwise.
    """
    position = {v: i for i, v in enumerate(codomain.vertices)}
    for v in domain.vertices:
        if v not in vertex_map:
            return False, f"vertex {v!r} of the domain has no image"
    for v, w in vertex_map.items():
        if v not in domain.vertices:
            return False, f"{v!r} is not a vertex of the domain"
        if w not in position:
            return False, f"{w!r} is not a vertex of the codomain"
    for edge in domain.sorted_edges():
        names = domain.names(edge)
        image = tuple(sorted({position[vertex_map[v]] for v in names}))
        if image not in codomain.hyperedges:
            return False, (
                f"hyperedge {{{', '.join(map(str, names))}}} maps to "
                f"{{{', '.join(map(str, codomain.names(image)))}}}, which is not a hyperedge"
            )
    return True, ""


def restrict_morphism(phi, source, target):
    """phi as a morphism between sub-hypergraphs of its domain and codomain."""
    if source.vertices != phi.domain.vertices or target.vertices != phi.codomain.vertices:
        raise HypergraphError("restriction must keep the vertex lists of the morphism")
    return HypergraphMorphism(source, target, phi.vertex_map)


def pullback_filtration(phi, f_codomain):
    """Weight each domain hyperedge by the weight of its image."""
    if f_codomain.base != phi.codomain:
        raise HypergraphError("pull-back needs a filtration on the morphism's codomain")
    weights = {e: f_codomain.weight(phi._image(e)) for e in phi.domain.hyperedges}
    return FilteredHypergraph(phi.domain, weights)


def pushforward_filtration(phi, f_domain):
    """Filtration on phi(H): each image hyperedge takes its earliest preimage weight."""
    if f_domain.base != phi.domain:
        raise HypergraphError("push-forward needs a filtration on the morphism's domain")
    weights = {}
    for e, w in f_domain.weights.items():
        image = phi._image(e)
        if image not in weights or w < weights[image]:
            weights[image] = w
    return FilteredHypergraph(image_hypergraph(phi), weights)


def align_filtration(g, base):
    """``g`` re-expressed on the vertex order of ``base``.

    Two files listing the same labeled hyperedges in a different order
    declare their vertices in a different order; this reindexes one onto
    the other.

    Raises:
        HypergraphError: the vertex labels or labeled hyperedges differ.
    """
    if g.base == base:
        return g
    if set(g.base.vertices) != set(base.vertices):
        raise HypergraphError("filtrations live on different hypergraphs")
    position = {v: i for i, v in enumerate(base.vertices)}
    weights = {
        tuple(sorted(position[v] for v in g.base.names(e))): w for e, w in g.weights.items()
    }
    if weights.keys() != base.hyperedges:
        raise HypergraphError("filtrations live on different hypergraphs")
    return FilteredHypergraph(base, weights)


def linf_function_distance(f, g):
    """max |f(sigma) - g(sigma)| over the shared hyperedges."""
    g = align_filtration(g, f.base)
    return max((abs(f.weights[e] - g.weights[e]) for e in f.base.hyperedges), default=0)
