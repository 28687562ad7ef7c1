"""
Chain complexes for hypergraphs.

Every complex here is a subquotient V/W of the simplicial chain complex of
one ambient simplicial complex. Generators are stored as ambient chains
(``lift``) and ambient cycles are read back into a complex's own
coordinates (``readout``), so maps between complexes with different
bases compose without re-basing. Inf, Sup, C(Delta H), C(delta H) and
kernel complexes are subcomplexes (W = 0); cokernel complexes are proper
quotients.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import ChainError, FieldError, HypergraphError
from .fieldlin import (
    PrimeField,
    Subspace,
    image_basis,
    kernel_basis,
    preimage_subspace,
    quotient_map,
    solve,
    subspace_sum,
)
from .hypercore import (
    Hypergraph,
    associated_complex,
    edge_order,
    is_simplicial,
    lower_associated_complex,
)

log = logging.getLogger("hyperpersist.chains")

# Rows of the ladder, top to bottom: C(Delta H), Sup, Inf, C(delta H).
ROWS = ("upper", "sup", "inf", "lower")
# Vertical inclusions between neighbouring rows, named lower-to-upper.
VERTICALS = {
    "lower_inf": ("lower", "inf"),
    "inf_sup": ("inf", "sup"),
    "sup_upper": ("sup", "upper"),
}


@dataclass(frozen=True, eq=False)
class AmbientChains:
    """Oriented simplicial chains of a simplicial complex.

    ``simplices[n]`` lists the n-simplices lexicographically and
    ``boundaries[n]`` is the signed matrix from n-chains to (n-1)-chains.
    """

    complex: Hypergraph
    field: PrimeField
    simplices: tuple
    boundaries: tuple
    positions: tuple

    @property
    def top(self):
        return len(self.simplices) - 1

    def size(self, n):
        if 0 <= n <= self.top:
            return len(self.simplices[n])
        return 0

    def boundary(self, n):
        if 0 <= n <= self.top:
            return self.boundaries[n]
        return np.zeros((self.size(n - 1), self.size(n)), dtype=np.int64)

    def index(self, n, simplex):
        return self.positions[n][simplex]

    def vectors(self, n, simplices):
        """Standard basis columns for the given n-simplices, in listed order."""
        out = np.zeros((self.size(n), len(simplices)), dtype=np.int64)
        for k, s in enumerate(simplices):
            out[self.positions[n][s], k] = 1
        return out


def ambient_chains(k, field):
    """Chains of the simplicial complex ``k`` with alternating-sign boundaries.

    Raises:
        ChainError: ``k`` is not closed under taking faces.
    """
    if not is_simplicial(k):
        raise ChainError("ambient complex must be downward closed")
    by_dim = {}
    for e in k.hyperedges:
        by_dim.setdefault(len(e) - 1, []).append(e)
    top = max(by_dim, default=-1)
    simplices = tuple(tuple(sorted(by_dim.get(n, ()))) for n in range(top + 1))
    positions = tuple({s: i for i, s in enumerate(level)} for level in simplices)
    p = field.p
    boundaries = []
    for n in range(top + 1):
        rows = len(simplices[n - 1]) if n else 0
        d = np.zeros((rows, len(simplices[n])), dtype=np.int64)
        if n:
            for j, s in enumerate(simplices[n]):
                for i in range(len(s)):
                    face = s[:i] + s[i + 1:]
                    d[positions[n - 1][face], j] = 1 if i % 2 == 0 else p - 1
        boundaries.append(d)
    return AmbientChains(
        complex=k,
        field=field,
        simplices=simplices,
        boundaries=tuple(boundaries),
        positions=positions,
    )


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """A graded subquotient V_n / W_n of an ambient chain complex."""

    ambient: AmbientChains
    numerators: tuple
    denominators: tuple
    quotients: tuple
    boundaries: tuple
    labels: tuple = None

    @property
    def field(self):
        return self.ambient.field

    @property
    def top(self):
        return self.ambient.top

    def dim(self, n):
        if 0 <= n <= self.top:
            return self.quotients[n].dim
        return 0

    @property
    def dims(self):
        return tuple(self.dim(n) for n in range(self.top + 1))

    def boundary(self, n):
        if 0 <= n <= self.top:
            return self.boundaries[n]
        return np.zeros((self.dim(n - 1), self.dim(n)), dtype=np.int64)

    def lift(self, n):
        """Ambient representatives of the degree-n generators."""
        if 0 <= n <= self.top:
            return self.quotients[n].complement
        return np.zeros((self.ambient.size(n), 0), dtype=np.int64)

    def numerator(self, n):
        return self.numerators[n]

    def denominator(self, n):
        return self.denominators[n]

    def readout(self, n, chains):
        """Own coordinates of ambient chains lying in V_n.

        Raises:
            ChainError: some column is not in V_n.
        """
        chains = np.asarray(chains, dtype=np.int64)
        if not 0 <= n <= self.top:
            if chains.size and np.any(chains % self.field.p):
                raise ChainError(f"degree {n} chains outside the complex")
            return np.zeros((0, chains.shape[1] if chains.ndim == 2 else 0), dtype=np.int64)
        return _readout(self.numerators[n], self.quotients[n], chains, n)

    def generators(self, n):
        if self.labels is None or not 0 <= n <= self.top:
            return ()
        return self.labels[n]


def _readout(numerator, quotient, chains, n):
    try:
        coords = solve(numerator.basis, chains, numerator.field)
    except FieldError:
        raise ChainError(f"degree {n} chain does not lie in the complex") from None
    return numerator.field.matmul(quotient.projection, coords)


def _assemble(ambient, numerators, denominators=None, labels=None):
    field = ambient.field
    if denominators is None:
        denominators = [Subspace.zero(ambient.size(n), field) for n in range(ambient.top + 1)]
    quotients = []
    for n, (v, w) in enumerate(zip(numerators, denominators)):
        try:
            quotients.append(quotient_map(v, w))
        except FieldError as exc:
            raise ChainError(f"degree {n}: {exc}") from None
    boundaries = []
    for n in range(ambient.top + 1):
        if n == 0:
            boundaries.append(np.zeros((0, quotients[0].dim), dtype=np.int64))
            continue
        d = ambient.boundary(n)
        image = field.matmul(d, quotients[n].complement)
        boundaries.append(_readout(numerators[n - 1], quotients[n - 1], image, n - 1))
        w = denominators[n]
        if w.dim:
            leak = _readout(numerators[n - 1], quotients[n - 1], field.matmul(d, w.basis), n - 1)
            if np.any(leak):
                raise ChainError(f"degree {n}: boundary does not descend to the quotient")
    for n in range(2, ambient.top + 1):
        if np.any(field.matmul(boundaries[n - 1], boundaries[n])):
            raise ChainError(f"boundary does not square to zero at degree {n}")
    return ChainComplex(
        ambient=ambient,
        numerators=tuple(numerators),
        denominators=tuple(denominators),
        quotients=tuple(quotients),
        boundaries=tuple(boundaries),
        labels=labels,
    )


def _resolve_ambient(h, field, ambient):
    if ambient is None:
        return ambient_chains(associated_complex(h), field)
    if h.vertices != ambient.complex.vertices:
        raise HypergraphError("hypergraph and ambient complex have different vertex lists")
    if not h.hyperedges <= ambient.complex.hyperedges:
        stray = min(h.hyperedges - ambient.complex.hyperedges, key=edge_order)
        raise HypergraphError(f"hyperedge {stray} is not a simplex of the ambient complex")
    return ambient


def _hyperedge_chains(h, ambient):
    """Per degree, the ambient standard vectors of the hyperedges of ``h``."""
    out = []
    for n in range(ambient.top + 1):
        chosen = [s for s in ambient.simplices[n] if s in h.hyperedges]
        out.append(ambient.vectors(n, chosen))
    return out


def simplicial_chain_complex(k, field, ambient=None):
    """Chains of a simplicial complex, optionally as a subcomplex of ``ambient``.

    Generators are the simplices of ``k`` in lexicographic order.

    Raises:
        ChainError: ``k`` is not downward closed.
    """
    if not is_simplicial(k):
        raise ChainError("simplicial chain complex needs a downward closed hypergraph")
    ambient = _resolve_ambient(k, field, ambient)
    numerators = []
    labels = []
    for n in range(ambient.top + 1):
        chosen = [s for s in ambient.simplices[n] if s in k.hyperedges]
        numerators.append(Subspace(ambient.size(n), ambient.vectors(n, chosen), field))
        labels.append(tuple(chosen))
    return _assemble(ambient, numerators, labels=tuple(labels))


def infimum_complex(h, field, ambient=None):
    """Largest subcomplex of C(Delta H) inside the span of the hyperedges."""
    ambient = _resolve_ambient(h, field, ambient)
    spans = _hyperedge_chains(h, ambient)
    numerators = []
    for n in range(ambient.top + 1):
        here = spans[n]
        if n == 0 or here.shape[1] == 0:
            numerators.append(Subspace(ambient.size(n), here, field))
            continue
        below = Subspace(ambient.size(n - 1), spans[n - 1], field)
        closed = preimage_subspace(field.matmul(ambient.boundary(n), here), below)
        numerators.append(Subspace(ambient.size(n), field.matmul(here, closed.basis), field))
    return _assemble(ambient, numerators)


def supremum_complex(h, field, ambient=None):
    """Smallest subcomplex of C(Delta H) containing the span of the hyperedges."""
    ambient = _resolve_ambient(h, field, ambient)
    spans = _hyperedge_chains(h, ambient)
    numerators = []
    for n in range(ambient.top + 1):
        here = Subspace(ambient.size(n), spans[n], field)
        if n < ambient.top:
            above = image_basis(field.matmul(ambient.boundary(n + 1), spans[n + 1]), field)
            here = subspace_sum(here, above)
        numerators.append(here)
    return _assemble(ambient, numerators)


def hypergraph_complex(h, row, field, ambient=None):
    """The chain complex of ``h`` on one row of the ladder."""
    if row == "upper":
        return simplicial_chain_complex(associated_complex(h), field, ambient)
    if row == "sup":
        return supremum_complex(h, field, ambient)
    if row == "inf":
        return infimum_complex(h, field, ambient)
    if row == "lower":
        return simplicial_chain_complex(lower_associated_complex(h), field, ambient)
    raise ValueError(f"unknown row {row!r}")


@dataclass(frozen=True, eq=False)
class ChainMap:
    """Degree-wise matrices between two complexes commuting with the boundaries."""

    source: ChainComplex
    target: ChainComplex
    components: tuple

    def __post_init__(self):
        field = self.source.field
        for n in range(len(self.components)):
            shape = (self.target.dim(n), self.source.dim(n))
            if self.components[n].shape != shape:
                raise ChainError(
                    f"degree {n} component has shape {self.components[n].shape}, expected {shape}"
                )
        for n in range(1, len(self.components) + 1):
            left = field.matmul(self.target.boundary(n), self.component(n))
            right = field.matmul(self.component(n - 1), self.source.boundary(n))
            if not np.array_equal(left, right):
                raise ChainError(f"chain map does not commute with the boundary at degree {n}")

    @property
    def degrees(self):
        return len(self.components)

    def component(self, n):
        if 0 <= n < len(self.components):
            return self.components[n]
        return np.zeros((self.target.dim(n), self.source.dim(n)), dtype=np.int64)


def _ambient_component(ambient_map, n, source, target):
    if 0 <= n < len(ambient_map):
        return ambient_map[n]
    return np.zeros((target.ambient.size(n), source.ambient.size(n)), dtype=np.int64)


def canonical_map(source, target, ambient_map=None):
    """The chain map induced between two subquotients by an ambient chain map.

    With ``ambient_map`` None the two complexes must share an ambient and
    the map is induced by the identity (inclusions, quotient maps).

    Raises:
        ChainError: the ambient map does not carry V into V' or W into W'.
    """
    if ambient_map is None and source.ambient is not target.ambient:
        if source.ambient.complex != target.ambient.complex:
            raise ChainError("identity-induced map needs a shared ambient complex")
    field = source.field
    components = []
    for n in range(max(source.top, target.top) + 1):
        lift = source.lift(n)
        if ambient_map is None:
            image = lift
        else:
            image = field.matmul(_ambient_component(ambient_map, n, source, target), lift)
        try:
            components.append(target.readout(n, image))
        except ChainError:
            raise ChainError(f"degree {n}: restriction does not land in the target complex") from None
        if 0 <= n <= source.top and source.denominator(n).dim:
            w = source.denominator(n).basis
            moved = w if ambient_map is None else field.matmul(
                _ambient_component(ambient_map, n, source, target), w
            )
            if np.any(target.readout(n, moved)):
                raise ChainError(f"degree {n}: map does not descend to the quotient")
    return ChainMap(source, target, tuple(components))


def compose(g, f):
    """g after f."""
    if f.target is not g.source:
        raise ChainError("cannot compose: target of the first map is not the source of the second")
    field = f.source.field
    degrees = max(f.degrees, g.degrees)
    return ChainMap(
        f.source,
        g.target,
        tuple(field.matmul(g.component(n), f.component(n)) for n in range(degrees)),
    )


def identity_map(c):
    return ChainMap(c, c, tuple(c.field.identity(c.dim(n)) for n in range(c.top + 1)))


def zero_map(source, target):
    return ChainMap(
        source,
        target,
        tuple(
            np.zeros((target.dim(n), source.dim(n)), dtype=np.int64)
            for n in range(max(source.top, target.top) + 1)
        ),
    )


def simplicial_chain_map(phi, source, target):
    """Ambient matrices of Delta(phi)_# between two ambient chain groups.

    A simplex goes to its image simplex with the sign of the sorting
    permutation, or to zero when two of its vertices collapse.
    """
    field = source.field
    matrices = []
    for n in range(source.top + 1):
        m = np.zeros((target.size(n), source.size(n)), dtype=np.int64)
        for j, s in enumerate(source.simplices[n]):
            image = [phi.vertex_map[v] for v in s]
            if len(set(image)) < len(image):
                continue
            inversions = sum(1 for a, b in combinations(image, 2) if a > b)
            key = tuple(sorted(image))
            if n > target.top or key not in target.positions[n]:
                raise ChainError(f"image of simplex {s} is not a simplex of the target")
            m[target.index(n, key), j] = 1 if inversions % 2 == 0 else field.p - 1
        matrices.append(m)
    return tuple(matrices)


@dataclass(frozen=True, eq=False)
class HomologySpace:
    """H_n of a chain complex with explicit representatives.

    ``cycles`` is a basis of ker d_n and ``boundaries`` the subspace im
    d_{n+1}, both in the complex's own coordinates.
    """

    complex: ChainComplex
    degree: int
    dim: int
    cycles: Subspace
    boundaries: Subspace
    quotient: object

    @property
    def representatives(self):
        """Own-coordinate cycles whose classes form the homology basis."""
        return self.quotient.complement

    def classify(self, chains):
        """Homology coordinates of own-coordinate cycles.

        Raises:
            ChainError: some column is not a cycle.
        """
        try:
            coords = self.cycles.coordinates(chains)
        except FieldError:
            raise ChainError(f"degree {self.degree} chain is not a cycle") from None
        return self.complex.field.matmul(self.quotient.projection, coords)


def homology(c, n):
    field = c.field
    cycles = kernel_basis(c.boundary(n), field)
    boundaries = image_basis(c.boundary(n + 1), field)
    quotient = quotient_map(cycles, boundaries)
    return HomologySpace(
        complex=c,
        degree=n,
        dim=quotient.dim,
        cycles=cycles,
        boundaries=boundaries,
        quotient=quotient,
    )


def betti_numbers(c):
    return tuple(homology(c, n).dim for n in range(c.top + 1))


def induced_homology_map(f, n, source_homology=None, target_homology=None):
    """Matrix of H_n(f) in the homology bases of source and target.

    Raises:
        ChainError: f sends a cycle to a non-cycle.
    """
    hs = source_homology if source_homology is not None else homology(f.source, n)
    ht = target_homology if target_homology is not None else homology(f.target, n)
    image = f.source.field.matmul(f.component(n), hs.representatives)
    try:
        return ht.classify(image)
    except ChainError:
        raise ChainError(f"degree {n}: image of a cycle is not a cycle") from None


def embedded_homology(h, n, field, ambient=None):
    """H_n of the infimum complex, cross-checked against the supremum complex.

    Raises:
        ChainError: Inf and Sup homology dimensions disagree.
    """
    ambient = _resolve_ambient(h, field, ambient)
    inf_h = homology(infimum_complex(h, field, ambient), n)
    sup_h = homology(supremum_complex(h, field, ambient), n)
    if inf_h.dim != sup_h.dim:
        raise ChainError(
            f"embedded homology mismatch in degree {n}: Inf gives {inf_h.dim}, Sup gives {sup_h.dim}"
        )
    return inf_h


def kernel_complex(f):
    """ker f as a subcomplex of the source."""
    source = f.source
    field = source.field
    numerators = []
    for n in range(source.top + 1):
        null = kernel_basis(f.component(n), field)
        chains = field.matmul(source.lift(n), null.basis)
        numerators.append(subspace_sum(source.denominator(n), Subspace(source.ambient.size(n), chains, field)))
    return _assemble(source.ambient, numerators, list(source.denominators))


def cokernel_complex(f):
    """target / im f as a quotient complex of the target."""
    target = f.target
    field = target.field
    denominators = []
    for n in range(target.top + 1):
        chains = field.matmul(target.lift(n), f.component(n))
        denominators.append(subspace_sum(target.denominator(n), Subspace(target.ambient.size(n), chains, field)))
    return _assemble(target.ambient, list(target.numerators), denominators)


@dataclass(frozen=True, eq=False)
class MorphismLadder:
    """The four row maps induced by a morphism and the inclusions between rows.

    ``maps[row]`` goes from ``source_rows[row]`` to ``target_rows[row]``;
    ``source_inclusions[name]`` and ``target_inclusions[name]`` follow
    ``VERTICALS``.
    """

    source_rows: dict
    target_rows: dict
    maps: dict
    source_inclusions: dict
    target_inclusions: dict


def morphism_chain_maps(phi, field, source_ambient=None, target_ambient=None):
    """Chain maps of phi on all four rows plus the commuting inclusion ladder.

    Raises:
        ChainError: a restriction leaves its target or a square fails to commute.
    """
    source_ambient = _resolve_ambient(phi.domain, field, source_ambient)
    target_ambient = _resolve_ambient(phi.codomain, field, target_ambient)
    delta_phi = simplicial_chain_map(phi, source_ambient, target_ambient)

    source_rows = {row: hypergraph_complex(phi.domain, row, field, source_ambient) for row in ROWS}
    target_rows = {row: hypergraph_complex(phi.codomain, row, field, target_ambient) for row in ROWS}
    maps = {}
    for row in ROWS:
        try:
            maps[row] = canonical_map(source_rows[row], target_rows[row], delta_phi)
        except ChainError as exc:
            raise ChainError(f"{row} row: {exc}") from None

    source_inclusions = {
        name: canonical_map(source_rows[lo], source_rows[hi]) for name, (lo, hi) in VERTICALS.items()
    }
    target_inclusions = {
        name: canonical_map(target_rows[lo], target_rows[hi]) for name, (lo, hi) in VERTICALS.items()
    }
    for name, (lo, hi) in VERTICALS.items():
        down_then_across = compose(maps[hi], source_inclusions[name])
        across_then_up = compose(target_inclusions[name], maps[lo])
        for n in range(max(down_then_across.degrees, across_then_up.degrees)):
            if not np.array_equal(down_then_across.component(n), across_then_up.component(n)):
                raise ChainError(f"square {name} does not commute in degree {n}")
    log.debug(
        "Built chain ladder for a morphism with %d domain and %d codomain hyperedges",
        len(phi.domain), len(phi.codomain),
    )
    return MorphismLadder(
        source_rows=source_rows,
        target_rows=target_rows,
        maps=maps,
        source_inclusions=source_inclusions,
        target_inclusions=target_inclusions,
    )
