"""
Persistence modules over sublevel filtrations of hypergraphs.

A module is sampled at the critical values t_1 < ... < t_m of a
filtration; below t_1 it is the zero space. Diagrams come from the rank
inclusion-exclusion formula on composite transition ranks, which works
for filtrations of subspaces (Inf, kernel and cokernel complexes) where a
simplexwise reduction does not apply.
"""

from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

import numpy as np

from . import config
from .chains import (
    ROWS,
    VERTICALS,
    ambient_chains,
    canonical_map,
    cokernel_complex,
    homology,
    hypergraph_complex,
    induced_homology_map,
    kernel_complex,
    morphism_chain_maps,
    simplicial_chain_map,
)
from .errors import FieldError, HypergraphError, PersistenceError
from .fieldlin import (
    PrimeField,
    Subspace,
    image_basis,
    kernel_basis,
    left_inverse,
    quotient_map,
    rank,
    solve,
)
from .hypercore import (
    associated_complex,
    critical_values,
    is_simplicial,
    pullback_filtration,
    pushforward_filtration,
    restrict_morphism,
    sublevel,
)

log = logging.getLogger("hyperpersist.persist")

INF = float("inf")

VARIANTS = ("embedded", "delta_upper", "delta_lower")
VARIANT_ROWS = {"embedded": "inf", "delta_upper": "upper", "delta_lower": "lower"}
DIRECTIONS = ("pushforward", "pullback")
COLUMNS = ("kernel", "source", "target", "cokernel")


def _build_arrows():
    arrows = {}
    for row in ROWS:
        arrows[f"{row}.kernel"] = (("kernel", row), ("source", row), False)
        arrows[f"{row}.map"] = (("source", row), ("target", row), True)
        arrows[f"{row}.cokernel"] = (("target", row), ("cokernel", row), False)
    for column in COLUMNS:
        for name, (lo, hi) in VERTICALS.items():
            arrows[f"{column}.{name}"] = ((column, lo), (column, hi), False)
    return arrows


# name -> (source node, target node, whether the arrow crosses the morphism)
ARROWS = _build_arrows()
SURFACED_ARROWS = (
    "upper.map",
    "sup.map",
    "inf.map",
    "lower.map",
    "source.inf_sup",
    "target.inf_sup",
)


def default_field():
    return PrimeField(config.HYPERPERSIST_FIELD)


def _row_for(variant):
    try:
        return VARIANT_ROWS[variant]
    except KeyError:
        raise PersistenceError(
            f"unknown variant {variant!r}; expected one of {', '.join(VARIANTS)}"
        ) from None


@dataclass(frozen=True, eq=False)
class PersistenceModule:
    """Dimensions and transitions of a module at its critical values.

    ``transitions[i]`` maps index i to index i + 1. ``complexes`` and
    ``homologies`` keep the chain-level data the matrices are written in,
    when the module came from a filtration.
    """

    critical_values: tuple
    dims: tuple
    transitions: tuple
    field: PrimeField
    complexes: tuple = ()
    homologies: tuple = ()
    _composites: dict = dataclass_field(default_factory=dict, repr=False)

    def __post_init__(self):
        m = len(self.critical_values)
        if len(self.dims) != m:
            raise PersistenceError(f"{len(self.dims)} dimensions for {m} critical values")
        if len(self.transitions) != max(m - 1, 0):
            raise PersistenceError(f"{len(self.transitions)} transitions for {m} critical values")
        if any(a >= b for a, b in zip(self.critical_values, self.critical_values[1:])):
            raise PersistenceError("critical values must be strictly increasing")
        for i, t in enumerate(self.transitions):
            if t.shape != (self.dims[i + 1], self.dims[i]):
                raise PersistenceError(
                    f"transition {i} has shape {t.shape}, expected {(self.dims[i + 1], self.dims[i])}"
                )

    @classmethod
    def zero(cls, critical_values, field):
        m = len(critical_values)
        return cls(
            tuple(critical_values),
            (0,) * m,
            tuple(np.zeros((0, 0), dtype=np.int64) for _ in range(max(m - 1, 0))),
            field,
        )

    def __len__(self):
        return len(self.critical_values)

    def index_at(self, t):
        """Index of the last critical value <= t, or -1 below all of them."""
        return bisect.bisect_right(self.critical_values, t) - 1

    def dim_at(self, t):
        i = self.index_at(t)
        return self.dims[i] if i >= 0 else 0

    def transition(self, i, j):
        """Composite transition from index i to index j >= i."""
        if j < i:
            raise PersistenceError(f"transition from {i} back to {j}")
        key = (i, j)
        if key not in self._composites:
            composite = self.field.identity(self.dims[i])
            for k in range(i, j):
                composite = self.field.matmul(self.transitions[k], composite)
            self._composites[key] = composite
        return self._composites[key]

    def map_at(self, s, t):
        """The structure map from scale s to scale t >= s."""
        i, j = self.index_at(s), self.index_at(t)
        if i < 0:
            return np.zeros((self.dim_at(t), 0), dtype=np.int64)
        return self.transition(i, j)


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) points with birth < death; death may be inf."""

    points: tuple = ()

    def __post_init__(self):
        points = tuple(sorted((b, d) for b, d in self.points))
        for b, d in points:
            if not b < d:
                raise PersistenceError(f"diagram point ({b}, {d}) is not above the diagonal")
        object.__setattr__(self, "points", points)

    @property
    def essential(self):
        """Births of the points with infinite death."""
        return tuple(b for b, d in self.points if d == INF)

    @property
    def finite(self):
        return tuple((b, d) for b, d in self.points if d != INF)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


@dataclass(frozen=True)
class DiagramTriple:
    ker: PersistenceDiagram
    im: PersistenceDiagram
    coker: PersistenceDiagram

    def components(self):
        return {"ker": self.ker, "im": self.im, "coker": self.coker}


def rank_table(module):
    """r[i, j] = rank of the transition t_i -> t_j, 1-based, zero at index 0."""
    m = len(module)
    field = module.field
    r = np.zeros((m + 1, m + 1), dtype=np.int64)
    for i in range(1, m + 1):
        r[i, i] = module.dims[i - 1]
        composite = field.identity(module.dims[i - 1])
        for j in range(i + 1, m + 1):
            if r[i, j - 1] == 0:
                break
            composite = field.matmul(module.transitions[j - 2], composite)
            r[i, j] = rank(composite, field)
    return r


def module_diagram(module):
    """Barcode of a module from the rank inclusion-exclusion formula.

    Raises:
        PersistenceError: a multiplicity comes out negative.
    """
    r = rank_table(module)
    m = len(module)
    cv = module.critical_values
    points = []
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            mu = r[i, j - 1] - r[i, j] - r[i - 1, j - 1] + r[i - 1, j]
            if mu < 0:
                raise PersistenceError(f"negative multiplicity {mu} at ({cv[i - 1]}, {cv[j - 1]})")
            points.extend([(cv[i - 1], cv[j - 1])] * int(mu))
        mu = r[i, m] - r[i - 1, m]
        if mu < 0:
            raise PersistenceError(f"negative multiplicity {mu} at ({cv[i - 1]}, inf)")
        points.extend([(cv[i - 1], INF)] * int(mu))
    return PersistenceDiagram(tuple(points))


def _module_from_complexes(grid, complexes, n, field):
    homologies = [homology(c, n) for c in complexes]
    transitions = []
    for k in range(len(complexes) - 1):
        chain = canonical_map(complexes[k], complexes[k + 1])
        transitions.append(
            induced_homology_map(chain, n, homologies[k], homologies[k + 1])
        )
    return PersistenceModule(
        critical_values=tuple(grid),
        dims=tuple(h.dim for h in homologies),
        transitions=tuple(transitions),
        field=field,
        complexes=tuple(complexes),
        homologies=tuple(homologies),
    )


def build_persistence_module(f, variant, n, field=None, grid=None):
    """Degree-n persistence module of one homology variant of a filtration.

    Args:
        f: the filtered hypergraph.
        variant: ``embedded``, ``delta_upper`` or ``delta_lower``.
        n: homology degree.
        field: coefficient field, defaults to HYPERPERSIST_FIELD.
        grid: scales to sample at; defaults to the critical values of ``f``.

    Returns:
        PersistenceModule: carries its complexes and homology bases.
    """
    return build_persistence_modules(f, variant, (n,), field, grid)[n]


def build_persistence_modules(f, variant, degrees, field=None, grid=None):
    """Modules for several degrees sharing one pass over the sublevel complexes.

    Returns:
        dict: degree -> PersistenceModule.
    """
    row = _row_for(variant)
    field = field or default_field()
    grid = tuple(critical_values(f)) if grid is None else tuple(grid)
    ambient = ambient_chains(associated_complex(f.base), field)
    complexes = [hypergraph_complex(sublevel(f, t), row, field, ambient) for t in grid]
    modules = {}
    for n in degrees:
        modules[n] = _module_from_complexes(grid, complexes, n, field)
        log.debug(
            "Built %s module in degree %d: %d critical values, dims %s",
            variant, n, len(grid), modules[n].dims,
        )
    return modules


@dataclass(frozen=True, eq=False)
class PersistentMap:
    """Matrices Phi_i from source to target commuting with the transitions."""

    source: PersistenceModule
    target: PersistenceModule
    matrices: tuple

    def __post_init__(self):
        if tuple(self.source.critical_values) != tuple(self.target.critical_values):
            raise PersistenceError("persistent map needs source and target on the same critical values")
        field = self.source.field
        for i, phi in enumerate(self.matrices):
            shape = (self.target.dims[i], self.source.dims[i])
            if phi.shape != shape:
                raise PersistenceError(f"map {i} has shape {phi.shape}, expected {shape}")
        for i in range(len(self.matrices) - 1):
            left = field.matmul(self.matrices[i + 1], self.source.transitions[i])
            right = field.matmul(self.target.transitions[i], self.matrices[i])
            if not np.array_equal(left, right):
                raise PersistenceError(f"ladder does not commute between indices {i} and {i + 1}")

    @classmethod
    def identity(cls, module):
        return cls(module, module, tuple(module.field.identity(d) for d in module.dims))

    @classmethod
    def zero(cls, source, target):
        return cls(
            source,
            target,
            tuple(np.zeros((b, a), dtype=np.int64) for a, b in zip(source.dims, target.dims)),
        )


@dataclass(frozen=True, eq=False)
class MapSubmodules:
    """Ker, Im and Coker of a persistent map with the bases they are written in.

    Unpacks as the triple (kernel, image, cokernel).
    """

    kernel: PersistenceModule
    image: PersistenceModule
    cokernel: PersistenceModule
    kernel_bases: tuple
    image_bases: tuple
    cokernel_quotients: tuple

    def __iter__(self):
        return iter((self.kernel, self.image, self.cokernel))


def submodules(phi):
    """Kernel, image and cokernel modules of a persistent map."""
    field = phi.source.field
    cv = phi.source.critical_values
    kernels = [kernel_basis(m, field).basis for m in phi.matrices]
    images = [image_basis(m, field).basis for m in phi.matrices]
    quotients = [
        quotient_map(Subspace.full(d, field), Subspace(d, img, field))
        for d, img in zip(phi.target.dims, images)
    ]
    kernel_steps, image_steps, coker_steps = [], [], []
    for i in range(len(cv) - 1):
        moved = field.matmul(phi.source.transitions[i], kernels[i])
        kernel_steps.append(field.matmul(left_inverse(kernels[i + 1], field), moved))
        moved = field.matmul(phi.target.transitions[i], images[i])
        image_steps.append(field.matmul(left_inverse(images[i + 1], field), moved))
        moved = field.matmul(phi.target.transitions[i], quotients[i].complement)
        coker_steps.append(field.matmul(quotients[i + 1].projection, moved))
    return MapSubmodules(
        kernel=PersistenceModule(cv, tuple(k.shape[1] for k in kernels), tuple(kernel_steps), field),
        image=PersistenceModule(cv, tuple(b.shape[1] for b in images), tuple(image_steps), field),
        cokernel=PersistenceModule(cv, tuple(q.dim for q in quotients), tuple(coker_steps), field),
        kernel_bases=tuple(kernels),
        image_bases=tuple(images),
        cokernel_quotients=tuple(quotients),
    )


def map_diagram_triple(phi):
    ker, im, coker = submodules(phi)
    return DiagramTriple(module_diagram(ker), module_diagram(im), module_diagram(coker))


class MorphismDiagram:
    """The ladder of persistent maps induced by a morphism and a filtration pair.

    Nodes are (column, row) pairs with columns kernel, source, target,
    cokernel and rows upper, sup, inf, lower. Modules and maps are built
    on first use and cached, so every arrow is written in one consistent
    set of homology bases.
    """

    def __init__(self, morphism, source_filtration, target_filtration, n, field, grid):
        self.morphism = morphism
        self.source_filtration = source_filtration
        self.target_filtration = target_filtration
        self.n = n
        self.field = field
        self.grid = tuple(grid)
        self.source_ambient = ambient_chains(associated_complex(source_filtration.base), field)
        self.target_ambient = ambient_chains(associated_complex(target_filtration.base), field)
        self.delta_phi = simplicial_chain_map(morphism, self.source_ambient, self.target_ambient)
        self._ladders = {}
        self._derived = {}
        self._modules = {}

    def ladder(self, i):
        if i not in self._ladders:
            t = self.grid[i]
            phi_t = restrict_morphism(
                self.morphism,
                sublevel(self.source_filtration, t),
                sublevel(self.target_filtration, t),
            )
            self._ladders[i] = morphism_chain_maps(
                phi_t, self.field, self.source_ambient, self.target_ambient
            )
        return self._ladders[i]

    def complex(self, node, i):
        column, row = node
        if column == "source":
            return self.ladder(i).source_rows[row]
        if column == "target":
            return self.ladder(i).target_rows[row]
        key = (column, row, i)
        if key not in self._derived:
            row_map = self.ladder(i).maps[row]
            if column == "kernel":
                self._derived[key] = kernel_complex(row_map)
            elif column == "cokernel":
                self._derived[key] = cokernel_complex(row_map)
            else:
                raise PersistenceError(f"unknown column {column!r}")
        return self._derived[key]

    def module(self, node):
        if node not in self._modules:
            complexes = [self.complex(node, i) for i in range(len(self.grid))]
            self._modules[node] = _module_from_complexes(self.grid, complexes, self.n, self.field)
        return self._modules[node]

    def persistent_map(self, arrow):
        try:
            source_node, target_node, across = ARROWS[arrow]
        except KeyError:
            raise PersistenceError(f"unknown arrow {arrow!r}") from None
        source = self.module(source_node)
        target = self.module(target_node)
        ambient_map = self.delta_phi if across else None
        matrices = []
        for i in range(len(self.grid)):
            chain = canonical_map(source.complexes[i], target.complexes[i], ambient_map)
            matrices.append(
                induced_homology_map(chain, self.n, source.homologies[i], target.homologies[i])
            )
        try:
            return PersistentMap(source, target, tuple(matrices))
        except PersistenceError as exc:
            raise PersistenceError(f"arrow {arrow}: {exc}") from None

    def triple(self, arrow):
        return map_diagram_triple(self.persistent_map(arrow))


def build_morphism_diagram(phi, filtration, direction, n, field=None):
    """Set up the persistent ladder for a morphism.

    For ``pushforward`` the filtration lives on the domain and the target
    side is its push-forward; for ``pullback`` it lives on the codomain and
    the source side is its pull-back. Both sides share the critical values
    of the given filtration.
    """
    field = field or default_field()
    if direction == "pushforward":
        if filtration.base != phi.domain:
            raise HypergraphError("push-forward needs a filtration on the morphism's domain")
        source, target = filtration, pushforward_filtration(phi, filtration)
    elif direction == "pullback":
        if filtration.base != phi.codomain:
            raise HypergraphError("pull-back needs a filtration on the morphism's codomain")
        source, target = pullback_filtration(phi, filtration), filtration
    else:
        raise PersistenceError(f"unknown direction {direction!r}; expected pushforward or pullback")
    grid = critical_values(filtration)
    log.debug("Morphism diagram (%s) in degree %d over %d critical values", direction, n, len(grid))
    return MorphismDiagram(phi, source, target, n, field, grid)


def build_persistent_map(phi, filtration, direction, variant, n, field=None):
    """The persistent map phi_t on one homology variant."""
    row = _row_for(variant)
    return build_morphism_diagram(phi, filtration, direction, n, field).persistent_map(f"{row}.map")


def commutative_diagram_triples(phi, filtration, direction, n, field=None, arrows=None):
    """Diagram triples of every arrow of the ladder, keyed by arrow name.

    ``arrows`` restricts the computation to a subset of ``ARROWS``.
    """
    diagram = build_morphism_diagram(phi, filtration, direction, n, field)
    names = tuple(ARROWS) if arrows is None else tuple(arrows)
    triples = {}
    for name in names:
        triples[name] = diagram.triple(name)
    return triples


def _scale_grid(p, q, eps):
    values = {Fraction(c) for c in p.critical_values} | {Fraction(c) for c in q.critical_values}
    return sorted({c + k * eps for c in values for k in (-1, 0, 1)})


def verify_strong_interleaving(p, q, eps, phi, psi):
    """Check the four strong interleaving identities at every scale pair.

    Args:
        p, q: the two modules.
        eps: the shift.
        phi: callable t -> matrix from p at t to q at t + eps.
        psi: callable t -> matrix from q at t to p at t + eps.

    Returns:
        tuple: (ok, message); ``message`` names the first failing identity.
    """
    eps = Fraction(eps)
    field = p.field
    mul = field.matmul

    def same(a, b):
        return a.shape == b.shape and np.array_equal(a % field.p, b % field.p)

    scales = _scale_grid(p, q, eps)
    for k, t in enumerate(scales):
        for s in scales[k:]:
            checks = (
                ("a", mul(psi(s), mul(q.map_at(t, s), phi(t - eps))), p.map_at(t - eps, s + eps)),
                ("b", mul(p.map_at(t + eps, s + eps), psi(t)), mul(psi(s), q.map_at(t, s))),
                ("c", mul(phi(s), mul(p.map_at(t, s), psi(t - eps))), q.map_at(t - eps, s + eps)),
                ("d", mul(q.map_at(t + eps, s + eps), phi(t)), mul(phi(s), p.map_at(t, s))),
            )
            for label, left, right in checks:
                if not same(left, right):
                    message = f"condition ({label}) fails at t={float(t):g}, s={float(s):g}"
                    log.warning("Interleaving check: %s", message)
                    return False, message
    return True, ""


def inclusion_shift(source, target, eps):
    """Inclusion-induced maps source_t -> target_{t+eps}.

    Both modules must come from filtrations of one hypergraph whose
    sublevels satisfy F_t inside G_{t+eps}.
    """
    cache = {}

    def shift(t):
        i = source.index_at(t)
        j = target.index_at(t + eps)
        if (i, j) not in cache:
            if i < 0:
                cache[(i, j)] = np.zeros((target.dim_at(t + eps), 0), dtype=np.int64)
            elif j < 0:
                if source.dims[i]:
                    raise PersistenceError(f"no shift from scale {t} into an empty module")
                cache[(i, j)] = np.zeros((0, 0), dtype=np.int64)
            else:
                n = source.homologies[i].degree
                chain = canonical_map(source.complexes[i], target.complexes[j])
                cache[(i, j)] = induced_homology_map(
                    chain, n, source.homologies[i], target.homologies[j]
                )
        return cache[(i, j)]

    return shift


def submodule_shifts(first, second, eps, source_shift, target_shift):
    """Shift maps between the Ker, Im and Coker modules of two persistent maps.

    The kernel and image shifts restrict ``source_shift`` and
    ``target_shift``; the cokernel shift is the induced quotient map.

    Returns:
        tuple: (kernel_shift, image_shift, cokernel_shift) callables.
    """
    field = first.kernel.field

    def restricted(module_a, module_b, bases_a, bases_b, ambient_shift):
        def shift(t):
            i, j = module_a.index_at(t), module_b.index_at(t + eps)
            if i < 0 or j < 0:
                return np.zeros((module_b.dim_at(t + eps), module_a.dim_at(t)), dtype=np.int64)
            moved = field.matmul(ambient_shift(t), bases_a[i])
            try:
                return solve(bases_b[j], moved, field)
            except FieldError:
                raise PersistenceError(f"shift at scale {t} leaves the submodule") from None
        return shift

    def cokernel_shift(t):
        a, b = first.cokernel, second.cokernel
        i, j = a.index_at(t), b.index_at(t + eps)
        if i < 0 or j < 0:
            return np.zeros((b.dim_at(t + eps), a.dim_at(t)), dtype=np.int64)
        moved = field.matmul(target_shift(t), first.cokernel_quotients[i].complement)
        return field.matmul(second.cokernel_quotients[j].projection, moved)

    return (
        restricted(first.kernel, second.kernel, first.kernel_bases, second.kernel_bases, source_shift),
        restricted(first.image, second.image, first.image_bases, second.image_bases, target_shift),
        cokernel_shift,
    )


def simplexwise_diagram(f, n, field=None):
    """Degree-n diagram of a filtered simplicial complex by column reduction.

    Simplices are ordered by (weight, dimension, vertices). Used as an
    independent check on ``module_diagram``.

    Raises:
        HypergraphError: the base is not simplicial or a face outweighs its coface.
    """
    field = field or default_field()
    base = f.base
    if not is_simplicial(base):
        raise HypergraphError("simplexwise reduction needs a simplicial complex")
    for e in base.hyperedges:
        for i in range(len(e)):
            face = e[:i] + e[i + 1:]
            if face and f.weights[face] > f.weights[e]:
                raise HypergraphError(f"face {face} enters after simplex {e}")

    order = sorted(base.hyperedges, key=lambda e: (f.weights[e], len(e), e))
    position = {s: k for k, s in enumerate(order)}
    size = len(order)
    p = field.p
    reduced = np.zeros((size, size), dtype=np.int64)
    for j, s in enumerate(order):
        if len(s) > 1:
            for i in range(len(s)):
                reduced[position[s[:i] + s[i + 1:]], j] = 1 if i % 2 == 0 else p - 1

    low_owner = {}
    for j in range(size):
        column = reduced[:, j].copy()
        while True:
            nonzero = np.nonzero(column)[0]
            if nonzero.size == 0:
                break
            low = int(nonzero[-1])
            if low not in low_owner:
                low_owner[low] = j
                break
            i = low_owner[low]
            factor = (int(column[low]) * field.inverse(reduced[low, i])) % p
            column = (column - factor * reduced[:, i]) % p
        reduced[:, j] = column

    points = []
    killed = set(low_owner)
    for low, j in low_owner.items():
        s = order[low]
        if len(s) == n + 1:
            birth, death = f.weights[s], f.weights[order[j]]
            if birth < death:
                points.append((birth, death))
    for k, s in enumerate(order):
        if len(s) == n + 1 and k not in killed and not np.any(reduced[:, k]):
            points.append((f.weights[s], INF))
    return PersistenceDiagram(tuple(points))
