"""Linear relations between finite-dimensional Hilbert spaces.

A relation ``T`` from ``H = F^n`` into ``K = F^m`` is a subspace of
``H ⊕ K``.  Its graph basis is stored as an ``(n + m, r)`` matrix whose
first ``n`` rows are the H-components.  In finite dimensions every
relation is closed.

Compositions and pointwise sums are formed in an explicit triple space
by intersecting two embedded graphs and projecting out one coordinate
block, which is exactly the set-theoretic definition.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NotInDomainError, PreconditionError
from .subspace import (
    ANGLE_TOL,
    DEFAULT_TOL,
    Subspace,
    complement,
    contains,
    default_tol,
    equals,
    intersect,
    orthonormalize,
    residual,
    span,
    sum_span,
)

FIELDS = ("real", "complex")


def _join_field(*fields) -> str:
    return "complex" if "complex" in fields else "real"


def _field_of(array) -> str:
    return "complex" if np.iscomplexobj(array) else "real"


@dataclass(frozen=True, eq=False)
class LinearRelation:
    """A linear subspace of ``H ⊕ K`` with ``dim H = dim_H``, ``dim K = dim_K``."""

    graph: Subspace
    dim_H: int
    dim_K: int
    field: str = "real"

    def __post_init__(self):
        if self.dim_H < 1 or self.dim_K < 1:
            raise ValueError(f"dimensions must be positive, got ({self.dim_H}, {self.dim_K})")
        if self.graph.ambient_dim != self.dim_H + self.dim_K:
            raise ValueError(
                f"graph lives in dimension {self.graph.ambient_dim}, "
                f"expected dim_H + dim_K = {self.dim_H + self.dim_K}"
            )
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}, got {self.field!r}")
        if self.field == "real" and np.iscomplexobj(self.graph.basis):
            if np.abs(self.graph.basis.imag).max(initial=0.0) > 0:
                raise ValueError("real relation with a complex graph basis")
            object.__setattr__(self, "graph", Subspace(self.graph.basis.real, self.graph.tol))

    def __repr__(self):
        return (
            f"LinearRelation(dim_H={self.dim_H}, dim_K={self.dim_K}, field={self.field!r}, "
            f"dim_graph={self.graph.rank})"
        )

    @property
    def tol(self) -> float:
        return self.graph.tol

    @property
    def dtype(self):
        return np.complex128 if self.field == "complex" else np.float64

    @property
    def h_block(self) -> np.ndarray:
        return self.graph.basis[: self.dim_H]

    @property
    def k_block(self) -> np.ndarray:
        return self.graph.basis[self.dim_H :]

    @cached_property
    def _h_svd(self):
        # graph basis is orthonormal, so the H-block has unit reference scale
        P, s, Wh = np.linalg.svd(self.h_block, full_matrices=True)
        k = int(np.sum(s > self.tol))
        return P, s, Wh.conj().T, k

    @cached_property
    def _k_svd(self):
        P, s, Wh = np.linalg.svd(self.k_block, full_matrices=True)
        k = int(np.sum(s > self.tol))
        return P, s, Wh.conj().T, k

    @cached_property
    def domain(self) -> Subspace:
        P, _, _, k = self._h_svd
        return Subspace(P[:, :k], self.tol)

    @cached_property
    def mulpart(self) -> Subspace:
        _, _, W, k = self._h_svd
        return _orth(self.k_block @ W[:, k:], self.tol)

    @cached_property
    def range(self) -> Subspace:
        P, _, _, k = self._k_svd
        return Subspace(P[:, :k], self.tol)

    @cached_property
    def kernel(self) -> Subspace:
        _, _, W, k = self._k_svd
        return _orth(self.h_block @ W[:, k:], self.tol)

    @property
    def part_dims(self) -> tuple[int, int, int, int]:
        """``(dim D, dim R, dim N, dim M)``."""
        return self.domain.rank, self.range.rank, self.kernel.rank, self.mulpart.rank


def _orth(M: np.ndarray, tol: float) -> Subspace:
    if M.shape[1] == 0:
        return Subspace(M, tol)
    q, _ = np.linalg.qr(M)
    return Subspace(q, tol)


def domain(T: LinearRelation) -> Subspace:
    return T.domain


def range_(T: LinearRelation) -> Subspace:
    return T.range


def kernel(T: LinearRelation) -> Subspace:
    return T.kernel


def mulpart(T: LinearRelation) -> Subspace:
    return T.mulpart


# ---------------------------------------------------------------- builders


def from_generators(pairs, dim_H: int, dim_K: int, tol: float | None = None, field: str | None = None) -> LinearRelation:
    """Relation spanned by the pairs ``(h, k)``."""
    cols = []
    for i, (h, k) in enumerate(pairs):
        h, k = np.atleast_1d(np.asarray(h)), np.atleast_1d(np.asarray(k))
        if h.shape != (dim_H,) or k.shape != (dim_K,):
            raise ValueError(
                f"pair {i} has shapes {h.shape}, {k.shape}; expected ({dim_H},), ({dim_K},)"
            )
        cols.append(np.concatenate([h, k]))
    S = orthonormalize(cols, tol=tol, ambient_dim=dim_H + dim_K)
    if field is None:
        field = _field_of(S.basis)
    return LinearRelation(S, dim_H, dim_K, field)


def from_stacked(G: np.ndarray, dim_H: int, tol: float | None = None, field: str | None = None) -> LinearRelation:
    """Relation spanned by the columns of ``G`` (H-rows first)."""
    G = np.asarray(G)
    S = orthonormalize(G, tol=tol)
    return LinearRelation(S, dim_H, G.shape[0] - dim_H, field or _field_of(G))


def from_graph(A, tol: float | None = None) -> LinearRelation:
    """Graph ``{(x, Ax)}`` of an everywhere-defined ``m x n`` matrix."""
    A = np.atleast_2d(np.asarray(A))
    m, n = A.shape
    G = np.vstack([np.eye(n, dtype=A.dtype), A])
    return from_stacked(G, n, tol=tol)


def from_parts(A_op, domain_basis, mul_generators=(), tol: float | None = None) -> LinearRelation:
    """``graph(A_op on span(domain_basis)) ∔ ({0} × span(mul_generators))``.

    Parameters
    ----------
    A_op : (m, d) array
        Image of each domain basis vector.
    domain_basis : (n, d) array
        Columns span the domain; they need not be orthonormal.
    mul_generators : sequence of length-m vectors, or an (m, k) array
    """
    A_op = np.atleast_2d(np.asarray(A_op))
    Dom = np.atleast_2d(np.asarray(domain_basis))
    if A_op.shape[1] != Dom.shape[1]:
        raise ValueError(
            f"operator has {A_op.shape[1]} columns but the domain basis has {Dom.shape[1]} vectors"
        )
    n, m = Dom.shape[0], A_op.shape[0]
    if isinstance(mul_generators, np.ndarray) and mul_generators.ndim == 2:
        Mg = mul_generators
    else:
        gens = [np.atleast_1d(np.asarray(g)) for g in mul_generators]
        for g in gens:
            if g.shape != (m,):
                raise ValueError(f"multivalued generator of shape {g.shape}, expected ({m},)")
        Mg = np.column_stack(gens) if gens else np.zeros((m, 0))
    if Mg.shape[0] != m:
        raise ValueError(f"multivalued generators have length {Mg.shape[0]}, expected {m}")
    G = np.hstack(
        [
            np.vstack([Dom, A_op]),
            np.vstack([np.zeros((n, Mg.shape[1]), dtype=Mg.dtype), Mg]),
        ]
    )
    return from_stacked(G, n, tol=tol)


def identity(n: int, field: str = "real") -> LinearRelation:
    dtype = np.complex128 if field == "complex" else np.float64
    return LinearRelation(Subspace(np.vstack([np.eye(n), np.eye(n)]).astype(dtype) / np.sqrt(2)), n, n, field)


def zero_relation(dim_H: int, dim_K: int, field: str = "real") -> LinearRelation:
    """The trivial relation ``{(0, 0)}``."""
    dtype = np.complex128 if field == "complex" else np.float64
    return LinearRelation(Subspace.zero(dim_H + dim_K, dtype), dim_H, dim_K, field)


def multivalued(M: Subspace, dim_H: int, field: str | None = None) -> LinearRelation:
    """``{0} × M`` as a relation from ``F^dim_H``."""
    B = np.vstack([np.zeros((dim_H, M.rank), dtype=M.dtype), M.basis])
    return LinearRelation(Subspace(B, M.tol), dim_H, M.ambient_dim, field or _field_of(B))


def product_space(S1: Subspace, S2: Subspace) -> Subspace:
    """``S1 × S2`` inside the direct sum of the ambient spaces."""
    n1, n2 = S1.ambient_dim, S2.ambient_dim
    dtype = np.result_type(S1.dtype, S2.dtype)
    B = np.zeros((n1 + n2, S1.rank + S2.rank), dtype)
    B[:n1, : S1.rank] = S1.basis
    B[n1:, S1.rank :] = S2.basis
    return Subspace(B, max(S1.tol, S2.tol))


# -------------------------------------------------------------- operations


def _embed(T: LinearRelation, total: int, h_rows, k_rows) -> Subspace:
    """Graph of T placed on rows (h_rows, k_rows); all other coordinates free."""
    used = list(h_rows) + list(k_rows)
    free = [i for i in range(total) if i not in set(used)]
    B = np.zeros((total, T.graph.rank + len(free)), dtype=T.dtype)
    B[list(h_rows), : T.graph.rank] = T.h_block
    B[list(k_rows), : T.graph.rank] = T.k_block
    for j, i in enumerate(free):
        B[i, T.graph.rank + j] = 1.0
    return Subspace(B, T.tol)


def inverse(T: LinearRelation) -> LinearRelation:
    """``T^{-1} = {(k, h) : (h, k) ∈ T}``."""
    B = np.vstack([T.k_block, T.h_block])
    return LinearRelation(Subspace(B, T.tol), T.dim_K, T.dim_H, T.field)


def adjoint(T: LinearRelation) -> LinearRelation:
    """``T*``: complement in ``K ⊕ H`` of the flipped graph ``{(k, -h)}``."""
    flipped = Subspace(np.vstack([T.k_block, -T.h_block]), T.tol)
    return LinearRelation(complement(flipped), T.dim_K, T.dim_H, T.field)


def _check_same_dims(T: LinearRelation, S: LinearRelation):
    if (T.dim_H, T.dim_K) != (S.dim_H, S.dim_K):
        raise ValueError(f"dimension mismatch: ({T.dim_H}, {T.dim_K}) vs ({S.dim_H}, {S.dim_K})")


def minkowski_sum(T: LinearRelation, S: LinearRelation) -> LinearRelation:
    """``T ∔ S = {(x + v, y + w)}``, the span sum of the graphs."""
    _check_same_dims(T, S)
    return LinearRelation(sum_span(T.graph, S.graph), T.dim_H, T.dim_K, _join_field(T.field, S.field))


def sum(T: LinearRelation, S: LinearRelation) -> LinearRelation:  # noqa: A001
    """Pointwise sum ``T + S = {(x, y + z) : (x, y) ∈ T, (x, z) ∈ S}``."""
    _check_same_dims(T, S)
    n, m = T.dim_H, T.dim_K
    total = n + 2 * m
    xs, ys, zs = range(n), range(n, n + m), range(n + m, total)
    tol = max(T.tol, S.tol)
    inter = intersect(_embed(T, total, xs, ys), _embed(S, total, xs, zs), tol)
    B = inter.basis
    image = np.vstack([B[:n], B[n : n + m] + B[n + m :]])
    return LinearRelation(span(image, tol), n, m, _join_field(T.field, S.field))


def compose(T: LinearRelation, S: LinearRelation) -> LinearRelation:
    """``TS = {(x, y) : (x, z) ∈ S, (z, y) ∈ T}`` (S first, then T)."""
    if S.dim_K != T.dim_H:
        raise ValueError(f"cannot compose: S maps into dimension {S.dim_K}, T starts from {T.dim_H}")
    n1, n2, n3 = S.dim_H, S.dim_K, T.dim_K
    total = n1 + n2 + n3
    xs, zs, ys = range(n1), range(n1, n1 + n2), range(n1 + n2, total)
    tol = max(T.tol, S.tol)
    inter = intersect(_embed(S, total, xs, zs), _embed(T, total, zs, ys), tol)
    B = inter.basis
    image = np.vstack([B[:n1], B[n1 + n2 :]])
    return LinearRelation(span(image, tol), n1, n3, _join_field(T.field, S.field))


def cartesian_product(T: LinearRelation, S: LinearRelation) -> LinearRelation:
    """``T × S`` from ``H1 × H2`` into ``K1 × K2``."""
    n1, m1, n2, m2 = T.dim_H, T.dim_K, S.dim_H, S.dim_K
    r1, r2 = T.graph.rank, S.graph.rank
    dtype = np.result_type(T.dtype, S.dtype)
    B = np.zeros((n1 + n2 + m1 + m2, r1 + r2), dtype)
    B[:n1, :r1] = T.h_block
    B[n1 : n1 + n2, r1:] = S.h_block
    B[n1 + n2 : n1 + n2 + m1, :r1] = T.k_block
    B[n1 + n2 + m1 :, r1:] = S.k_block
    return LinearRelation(Subspace(B, max(T.tol, S.tol)), n1 + n2, m1 + m2, _join_field(T.field, S.field))


def scalar_mul(c, T: LinearRelation) -> LinearRelation:
    """``cT = {(x, c y) : (x, y) ∈ T}``; in particular ``0T = D(T) × {0}``."""
    B = np.vstack([T.h_block, c * T.k_block])
    field = _join_field(T.field, _field_of(np.asarray(c)))
    return LinearRelation(span(B, T.tol), T.dim_H, T.dim_K, field)


def shift(T: LinearRelation, lam) -> LinearRelation:
    """``T - lam I = {(x, y - lam x)}``."""
    if T.dim_H != T.dim_K:
        raise ValueError(f"shift needs a relation in one space, got ({T.dim_H}, {T.dim_K})")
    B = np.vstack([T.h_block, T.k_block - lam * T.h_block])
    field = _join_field(T.field, _field_of(np.asarray(lam)))
    return LinearRelation(span(B, T.tol), T.dim_H, T.dim_K, field)


def restrict(T: LinearRelation, W: Subspace) -> LinearRelation:
    """``T|_W`` with domain ``D(T) ∩ W``: graph ``T ∩ (W × K)``."""
    if W.ambient_dim != T.dim_H:
        raise ValueError(f"restriction space lives in dimension {W.ambient_dim}, expected {T.dim_H}")
    WK = product_space(W, Subspace.full(T.dim_K, T.dtype, T.tol))
    field = _join_field(T.field, _field_of(W.basis))
    return LinearRelation(intersect(WK, T.graph, max(T.tol, W.tol)), T.dim_H, T.dim_K, field)


def recoordinatize(T: LinearRelation, W_in: Subspace, W_out: Subspace) -> LinearRelation:
    """Express ``T ∩ (W_in × W_out)`` as a relation from ``F^dim W_in`` into ``F^dim W_out``.

    Coordinates are taken in the orthonormal bases of ``W_in`` and ``W_out``.
    """
    if W_in.rank == 0 or W_out.rank == 0:
        raise ValueError("cannot re-coordinatize onto a zero space")
    box = product_space(W_in, W_out)
    G = intersect(box, T.graph, T.tol)
    B = np.vstack([W_in.basis.conj().T @ G.basis[: T.dim_H], W_out.basis.conj().T @ G.basis[T.dim_H :]])
    field = _join_field(T.field, _field_of(W_in.basis), _field_of(W_out.basis))
    return LinearRelation(_orth(B, T.tol), W_in.rank, W_out.rank, field)


# ----------------------------------------------------------------- cosets


@dataclass(frozen=True, eq=False)
class CosetElement:
    """The affine set ``particular + direction``."""

    particular: np.ndarray
    direction: Subspace

    def contains(self, v, tol: float = ANGLE_TOL) -> bool:
        d = np.asarray(v) - self.particular
        return bool(np.linalg.norm(residual(self.direction, d)) <= tol * max(1.0, np.linalg.norm(v)))

    def equals(self, other: CosetElement, tol: float = ANGLE_TOL) -> bool:
        return equals(self.direction, other.direction, tol) and self.contains(other.particular, tol)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.standard_normal(self.direction.rank)
        return self.particular + self.direction.basis @ c


def _min_norm_image(T: LinearRelation, x, what: str) -> CosetElement:
    x = np.asarray(x)
    if x.shape != (T.dim_H,):
        raise ValueError(f"point of shape {x.shape}, expected ({T.dim_H},)")
    res = float(np.linalg.norm(residual(T.domain, x)))
    if res > ANGLE_TOL * max(1.0, float(np.linalg.norm(x))):
        raise NotInDomainError(what, res)
    P, s, W, k = T._h_svd
    c = W[:, :k] @ ((P[:, :k].conj().T @ x) / s[:k])
    y = residual(T.mulpart, T.k_block @ c)
    return CosetElement(y, T.mulpart)


def image_of(T: LinearRelation, x) -> CosetElement:
    """``Tx`` as the coset (minimum-norm element) ``+ M(T)``."""
    return _min_norm_image(T, x, "point is not in the domain")


def preimage_of(T: LinearRelation, y) -> CosetElement:
    """``T^{-1} y`` as the coset (minimum-norm solution) ``+ N(T)``."""
    return _min_norm_image(inverse(T), y, "point is not in the range")


# ------------------------------------------------------------- predicates


def relations_equal(T: LinearRelation, S: LinearRelation, tol: float = ANGLE_TOL) -> bool:
    return (T.dim_H, T.dim_K) == (S.dim_H, S.dim_K) and equals(T.graph, S.graph, tol)


def is_operator(T: LinearRelation) -> bool:
    return T.mulpart.rank == 0


def is_everywhere_defined(T: LinearRelation) -> bool:
    return T.domain.rank == T.dim_H


def _require_square(T: LinearRelation, what: str):
    if T.dim_H != T.dim_K:
        raise PreconditionError(f"{what} needs a relation in one space, got ({T.dim_H}, {T.dim_K})")


def is_symmetric(T: LinearRelation, tol: float = ANGLE_TOL) -> bool:
    _require_square(T, "symmetry")
    return contains(adjoint(T).graph, T.graph, tol)


def is_selfadjoint(T: LinearRelation, tol: float = ANGLE_TOL) -> bool:
    _require_square(T, "self-adjointness")
    return equals(adjoint(T).graph, T.graph, tol)


def is_nonnegative(T: LinearRelation, tol: float = ANGLE_TOL) -> bool:
    """``Re <k, h> >= 0`` on the graph, tested on the Hermitian form ``c -> <Vc, Uc>``."""
    _require_square(T, "non-negativity")
    if T.graph.rank == 0:
        return True
    G = T.h_block.conj().T @ T.k_block
    form = (G + G.conj().T) / 2
    lo = np.linalg.eigvalsh(form)[0]
    return bool(lo >= -tol * max(1.0, np.linalg.norm(G, 2)))


__all__ = [
    "DEFAULT_TOL",
    "CosetElement",
    "LinearRelation",
    "NotInDomainError",
    "adjoint",
    "cartesian_product",
    "compose",
    "default_tol",
    "domain",
    "from_generators",
    "from_graph",
    "from_parts",
    "from_stacked",
    "identity",
    "image_of",
    "inverse",
    "is_everywhere_defined",
    "is_nonnegative",
    "is_operator",
    "is_selfadjoint",
    "is_symmetric",
    "kernel",
    "minkowski_sum",
    "mulpart",
    "multivalued",
    "preimage_of",
    "product_space",
    "range_",
    "recoordinatize",
    "relations_equal",
    "restrict",
    "scalar_mul",
    "shift",
    "sum",
    "zero_relation",
]
