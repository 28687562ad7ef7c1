"""
Exact linear algebra over a prime field F_p.

Matrices are dense ``numpy.int64`` arrays whose entries are residues in
[0, p). Every routine reduces its inputs, so callers may pass signed
integers. Nothing here touches floating point.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FieldError

log = logging.getLogger("hyperpersist.fieldlin")

# Largest modulus for which p*p*n stays inside int64 for desk-scale matrices.
MAX_MODULUS = 1 << 20


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p. Scalars are plain ints reduced mod ``p``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, (int, np.integer)) or isinstance(self.p, bool):
            raise FieldError(f"field modulus must be an integer, got {self.p!r}")
        if not is_prime(int(self.p)):
            raise FieldError(f"field modulus {self.p} is not prime")
        if self.p >= MAX_MODULUS:
            raise FieldError(f"field modulus {self.p} is too large (limit {MAX_MODULUS})")
        object.__setattr__(self, "p", int(self.p))

    def scalar(self, value):
        return int(value) % self.p

    def inverse(self, value):
        value = self.scalar(value)
        if value == 0:
            raise FieldError("zero has no inverse")
        return pow(value, -1, self.p)

    def reduce(self, matrix):
        return np.asarray(matrix, dtype=np.int64) % self.p

    def matmul(self, a, b):
        return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % self.p

    def zeros(self, rows, cols):
        return np.zeros((rows, cols), dtype=np.int64)

    def identity(self, size):
        return np.eye(size, dtype=np.int64)


def _as_matrix(matrix, field):
    m = field.reduce(matrix)
    if m.ndim != 2:
        raise FieldError(f"expected a 2-D matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class RowReduceResult:
    """Reduced row echelon form and its pivot columns."""

    rref: np.ndarray
    pivots: tuple

    @property
    def rank(self):
        return len(self.pivots)


def row_reduce(matrix, field):
    """Gauss-Jordan elimination with first-nonzero pivoting."""
    r_mat = _as_matrix(matrix, field).copy()
    rows, cols = r_mat.shape
    p = field.p
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nonzero = np.nonzero(r_mat[r:, c])[0]
        if nonzero.size == 0:
            continue
        k = r + int(nonzero[0])
        if k != r:
            r_mat[[r, k]] = r_mat[[k, r]]
        inv = pow(int(r_mat[r, c]), -1, p)
        r_mat[r] = (r_mat[r] * inv) % p
        others = np.nonzero(r_mat[:, c])[0]
        others = others[others != r]
        if others.size:
            r_mat[others] = (r_mat[others] - np.outer(r_mat[others, c], r_mat[r])) % p
        pivots.append(c)
        r += 1
    return RowReduceResult(rref=r_mat, pivots=tuple(pivots))


def rank(matrix, field):
    m = _as_matrix(matrix, field)
    if m.size == 0:
        return 0
    return row_reduce(m, field).rank


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^ambient_dim held as a canonical column basis.

    The basis is the transpose of the reduced row echelon form of the
    spanning vectors, so two equal subspaces have identical bases.
    """

    ambient_dim: int
    basis: np.ndarray
    field: PrimeField

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=np.int64)
        if basis.size == 0:
            basis = np.zeros((self.ambient_dim, 0), dtype=np.int64)
        elif basis.ndim != 2:
            basis = basis.reshape(self.ambient_dim, -1)
        basis = self.field.reduce(basis)
        if basis.shape[0] != self.ambient_dim:
            raise FieldError(
                f"basis has {basis.shape[0]} rows but ambient dimension is {self.ambient_dim}"
            )
        if basis.shape[1]:
            reduced = row_reduce(basis.T, self.field)
            basis = reduced.rref[: reduced.rank].T.copy()
        object.__setattr__(self, "basis", basis)

    @classmethod
    def span(cls, vectors, field, ambient_dim=None):
        """Subspace spanned by the columns of ``vectors``."""
        vectors = np.asarray(vectors, dtype=np.int64)
        if ambient_dim is None:
            ambient_dim = vectors.shape[0]
        if vectors.ndim != 2:
            vectors = vectors.reshape(ambient_dim, -1)
        return cls(ambient_dim=ambient_dim, basis=vectors, field=field)

    @classmethod
    def zero(cls, ambient_dim, field):
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=np.int64), field)

    @classmethod
    def full(cls, ambient_dim, field):
        return cls(ambient_dim, np.eye(ambient_dim, dtype=np.int64), field)

    @property
    def dim(self):
        return self.basis.shape[1]

    def coordinates(self, vectors):
        """Coordinates of ambient column vectors in this basis."""
        return solve(self.basis, vectors, self.field)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.field == other.field
            and np.array_equal(self.basis, other.basis)
        )

    __hash__ = None

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim}, p={self.field.p})"


def kernel_basis(matrix, field):
    """Null space of ``matrix`` as a subspace of its column space F_p^cols."""
    m = _as_matrix(matrix, field)
    rows, cols = m.shape
    if rows == 0:
        return Subspace.full(cols, field)
    reduced = row_reduce(m, field)
    pivots = reduced.pivots
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    vectors = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        vectors[f, k] = 1
        for r, c in enumerate(pivots):
            vectors[c, k] = (-reduced.rref[r, f]) % field.p
    return Subspace(cols, vectors, field)


def image_basis(matrix, field):
    """Column space of ``matrix`` as a subspace of F_p^rows."""
    m = _as_matrix(matrix, field)
    return Subspace(m.shape[0], m, field)


def solve(a, b, field):
    """Return X with A X = B, free variables set to zero.

    Raises:
        FieldError: shapes disagree or some column of B is not in the
            column space of A.
    """
    a = _as_matrix(a, field)
    b = _as_matrix(b, field)
    if a.shape[0] != b.shape[0]:
        raise FieldError(f"cannot solve: A has {a.shape[0]} rows, B has {b.shape[0]}")
    n = a.shape[1]
    if b.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.int64)
    if a.shape[0] == 0:
        return np.zeros((n, b.shape[1]), dtype=np.int64)
    reduced = row_reduce(np.hstack([a, b]), field)
    x = np.zeros((n, b.shape[1]), dtype=np.int64)
    for r, c in enumerate(reduced.pivots):
        if c >= n:
            raise FieldError("linear system is inconsistent: vector outside the column space")
        x[c] = reduced.rref[r, n:]
    return x


def contains(outer, inner):
    """True when ``inner`` is a subspace of ``outer``."""
    _check_ambient(outer, inner)
    if inner.dim == 0:
        return True
    return rank(np.hstack([outer.basis, inner.basis]), outer.field) == outer.dim


def same_subspace(a, b):
    return contains(a, b) and contains(b, a)


def subspace_sum(a, b):
    _check_ambient(a, b)
    return Subspace(a.ambient_dim, np.hstack([a.basis, b.basis]), a.field)


def subspace_intersection(a, b):
    _check_ambient(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.ambient_dim, a.field)
    null = kernel_basis(np.hstack([a.basis, -b.basis]), a.field)
    return Subspace(a.ambient_dim, a.field.matmul(a.basis, null.basis[: a.dim]), a.field)


def _check_ambient(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise FieldError(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")
    if a.field != b.field:
        raise FieldError(f"fields differ: F_{a.field.p} vs F_{b.field.p}")


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """The quotient V/W.

    ``projection`` takes V-coordinates to quotient coordinates and has
    kernel exactly W. ``complement`` holds ambient vectors in V whose
    classes form the quotient basis.
    """

    dim: int
    projection: np.ndarray
    complement: np.ndarray


def quotient_map(v, w):
    """Build the projection V -> V/W.

    Raises:
        FieldError: W is not contained in V.
    """
    _check_ambient(v, w)
    field = v.field
    if not contains(v, w):
        raise FieldError("quotient requires W to be contained in V")
    reduced = row_reduce(np.hstack([w.basis, v.basis]), field)
    picked = [c - w.dim for c in reduced.pivots if c >= w.dim]
    complement = v.basis[:, picked]
    adapted = np.hstack([w.basis, complement])
    change = solve(adapted, v.basis, field)
    projection = change[w.dim:, :]
    return QuotientMap(
        dim=len(picked),
        projection=projection,
        complement=complement,
    )


def preimage_subspace(matrix, w):
    """{x : M x in W} as a subspace of the column space of M."""
    m = _as_matrix(matrix, w.field)
    if w.ambient_dim != m.shape[0]:
        raise FieldError(
            f"subspace lives in dimension {w.ambient_dim} but the matrix has {m.shape[0]} rows"
        )
    q = quotient_map(Subspace.full(w.ambient_dim, w.field), w)
    return kernel_basis(w.field.matmul(q.projection, m), w.field)


def left_inverse(basis, field):
    """A matrix L with L @ basis = I for a basis with independent columns."""
    b = _as_matrix(basis, field)
    k = b.shape[1]
    if k == 0:
        return np.zeros((0, b.shape[0]), dtype=np.int64)
    reduced = row_reduce(b.T, field)
    if reduced.rank != k:
        raise FieldError("left inverse requires linearly independent columns")
    rows = list(reduced.pivots)
    square_inverse = solve(b[rows, :], np.eye(k, dtype=np.int64), field)
    left = np.zeros((k, b.shape[0]), dtype=np.int64)
    left[:, rows] = square_inverse
    return left
