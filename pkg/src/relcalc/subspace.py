"""Orthonormal-basis arithmetic of subspaces of C^n / R^n.

Inner products are conjugate-linear in the second argument,
``inner(a, b) = sum(a_i * conj(b_i))``.

Every subspace is stored as a matrix whose columns form an orthonormal
basis.  The zero subspace has an ``(n, 0)`` basis.  Rank decisions are
made from singular values; see :func:`orthonormalize` for the rule.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10
ANGLE_TOL = 1e-8


def inner(a, b):
    """Inner product, linear in ``a`` and conjugate-linear in ``b``."""
    return np.vdot(b, a)


def default_tol(shape) -> float:
    return DEFAULT_TOL * max(max(shape), 1)


def _result_dtype(*arrays):
    return np.result_type(np.float64, *arrays)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Immutable subspace given by an orthonormal basis (columns)."""

    basis: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        b = np.asarray(self.basis)
        if b.ndim != 2:
            raise ValueError("basis must be a 2-d array of column vectors")
        if b.shape[0] < 1:
            raise ValueError("ambient dimension must be at least 1")
        b = b.astype(_result_dtype(b), copy=True)
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    @property
    def dtype(self):
        return self.basis.dtype

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def __repr__(self):
        return f"Subspace(ambient_dim={self.ambient_dim}, rank={self.rank})"

    @classmethod
    def zero(cls, n: int, dtype=np.float64, tol: float = DEFAULT_TOL) -> Subspace:
        return cls(np.zeros((n, 0), dtype=dtype), tol)

    @classmethod
    def full(cls, n: int, dtype=np.float64, tol: float = DEFAULT_TOL) -> Subspace:
        return cls(np.eye(n, dtype=dtype), tol)

    @classmethod
    def coordinate(cls, n: int, indices, dtype=np.float64, tol: float = DEFAULT_TOL) -> Subspace:
        """Span of the standard basis vectors ``e_i`` for ``i`` in ``indices``."""
        return cls(np.eye(n, dtype=dtype)[:, list(indices)], tol)


def orthonormalize(vectors, tol: float | None = None, ambient_dim: int | None = None) -> Subspace:
    """Span of ``vectors`` as a :class:`Subspace`.

    Parameters
    ----------
    vectors : sequence of 1-d arrays, or a 2-d array whose columns are vectors
    tol : float, optional
        Relative rank threshold: singular values ``> tol * sigma_max`` count.
        Defaults to ``1e-10 * max(rows, cols)``.
    ambient_dim : int, optional
        Required when ``vectors`` is empty.
    """
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        M = vectors
    else:
        vecs = [np.asarray(v) for v in vectors]
        if not vecs:
            if ambient_dim is None:
                raise ValueError("ambient_dim is required for an empty list of vectors")
            M = np.zeros((ambient_dim, 0))
        else:
            lengths = {v.shape for v in vecs}
            if len(lengths) != 1 or vecs[0].ndim != 1:
                raise ValueError(f"vectors have mixed ambient dimensions: {sorted(lengths)}")
            M = np.column_stack(vecs)
    if ambient_dim is not None and M.shape[0] != ambient_dim:
        raise ValueError(f"vectors have length {M.shape[0]}, expected {ambient_dim}")
    if M.shape[0] < 1:
        raise ValueError("ambient dimension must be at least 1")
    if tol is None:
        tol = default_tol(M.shape)
    M = M.astype(_result_dtype(M))
    if M.shape[1] == 0:
        return Subspace(M, tol)
    W, s, _ = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > tol * s[0])) if s[0] > 0 else 0
    return Subspace(W[:, :r], tol)


def span(M: np.ndarray, tol: float) -> Subspace:
    """Column span of ``M`` with an absolute singular-value threshold.

    Used internally on images of orthonormal bases under O(1) maps, where
    the reference scale is 1 and a vanishing image must stay rank 0.
    """
    M = np.asarray(M)
    M = M.astype(_result_dtype(M))
    if M.shape[1] == 0:
        return Subspace(M, tol)
    W, s, _ = np.linalg.svd(M, full_matrices=False)
    return Subspace(W[:, : int(np.sum(s > tol))], tol)


def _check_pair(S1: Subspace, S2: Subspace):
    if S1.ambient_dim != S2.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {S1.ambient_dim} vs {S2.ambient_dim}")


def _reorthonormalize(Q: np.ndarray) -> np.ndarray:
    if Q.shape[1] == 0:
        return Q
    q, _ = np.linalg.qr(Q)
    return q


def complement(S: Subspace) -> Subspace:
    """Orthogonal complement of ``S`` in its ambient space."""
    n, r = S.basis.shape
    if r == 0:
        return Subspace.full(n, S.dtype, S.tol)
    if r == n:
        return Subspace.zero(n, S.dtype, S.tol)
    W, _, _ = np.linalg.svd(S.basis, full_matrices=True)
    C = W[:, r:]
    # one projection pass keeps the complement orthogonal to 1e-15
    C = C - S.basis @ (S.basis.conj().T @ C)
    return Subspace(_reorthonormalize(C), S.tol)


def _principal_split(S1: Subspace, S2: Subspace, tol: float | None):
    """Split S2 against S1 by principal sines.

    Returns ``(intersection_basis, extra_basis)`` where the intersection is
    spanned by the principal vectors of S2 whose sine to S1 is ``<= tol``
    and ``extra`` is the orthonormal part of S2 orthogonal to S1.  The two
    counts add up to ``rank(S2)``.
    """
    _check_pair(S1, S2)
    tol = max(S1.tol, S2.tol) if tol is None else tol
    dtype = np.result_type(S1.dtype, S2.dtype)
    n, k = S2.basis.shape
    if k == 0:
        return np.zeros((n, 0), dtype), np.zeros((n, 0), dtype)
    R = S2.basis - S1.basis @ (S1.basis.conj().T @ S2.basis)
    W, s, Vh = np.linalg.svd(R, full_matrices=False)
    small = s <= tol
    inter = S2.basis @ Vh[small].conj().T
    extra = W[:, ~small]
    extra = extra - S1.basis @ (S1.basis.conj().T @ extra)
    return _reorthonormalize(inter), _reorthonormalize(extra)


def intersect(S1: Subspace, S2: Subspace, tol: float | None = None) -> Subspace:
    """``S1 ∩ S2`` via principal vectors of S2 at zero angle to S1."""
    inter, _ = _principal_split(S1, S2, tol)
    return Subspace(inter, max(S1.tol, S2.tol))


def sum_span(S1: Subspace, S2: Subspace, tol: float | None = None) -> Subspace:
    """``S1 + S2``; shares its rank decision with :func:`intersect`.

    ``rank(S1) + rank(S2) == rank(sum) + rank(intersection)`` holds exactly.
    """
    _, extra = _principal_split(S1, S2, tol)
    B = np.hstack([S1.basis.astype(np.result_type(S1.dtype, extra.dtype)), extra])
    return Subspace(B, max(S1.tol, S2.tol))


def project(S: Subspace, v) -> np.ndarray:
    """Orthogonal projection of ``v`` onto ``S``."""
    v = np.asarray(v)
    if v.shape[0] != S.ambient_dim:
        raise ValueError(f"vector of length {v.shape[0]} in ambient dimension {S.ambient_dim}")
    return S.basis @ (S.basis.conj().T @ v)


def residual(S: Subspace, v) -> np.ndarray:
    """Component of ``v`` orthogonal to ``S``."""
    return np.asarray(v) - project(S, v)


def member(S: Subspace, v, tol: float = ANGLE_TOL) -> bool:
    """``v`` lies in ``S`` up to ``tol * max(1, |v|)``."""
    v = np.asarray(v)
    return bool(np.linalg.norm(residual(S, v)) <= tol * max(1.0, np.linalg.norm(v)))


def max_angle_sine(S1: Subspace, S2: Subspace) -> float:
    """Largest sine of the angle between a unit vector of S2 and S1.

    Zero iff ``S2 ⊆ S1``; equals the sine of the largest principal angle
    when the ranks agree.
    """
    _check_pair(S1, S2)
    if S2.rank == 0:
        return 0.0
    R = S2.basis - S1.basis @ (S1.basis.conj().T @ S2.basis)
    return float(np.linalg.norm(R, 2))


def principal_angles(S1: Subspace, S2: Subspace) -> np.ndarray:
    """Principal angles in ascending order, ``min(rank1, rank2)`` of them."""
    _check_pair(S1, S2)
    if S1.rank == 0 or S2.rank == 0:
        return np.zeros(0)
    if S1.rank < S2.rank:
        S1, S2 = S2, S1
    # sines from the residual are accurate for small angles
    R = S2.basis - S1.basis @ (S1.basis.conj().T @ S2.basis)
    sines = np.linalg.svd(R, compute_uv=False)
    return np.sort(np.arcsin(np.clip(sines, 0.0, 1.0)))


def contains(S1: Subspace, S2: Subspace, tol: float = ANGLE_TOL) -> bool:
    """``S2 ⊆ S1`` within angle ``tol``."""
    return bool(max_angle_sine(S1, S2) < tol)


def equals(S1: Subspace, S2: Subspace, tol: float = ANGLE_TOL) -> bool:
    """Equal rank and largest principal angle below ``tol``."""
    _check_pair(S1, S2)
    return bool(S1.rank == S2.rank and np.arcsin(min(max_angle_sine(S1, S2), 1.0)) < tol)


def distance(S1: Subspace, S2: Subspace) -> float:
    """Largest principal angle, or ``pi/2`` when the ranks differ."""
    _check_pair(S1, S2)
    if S1.rank != S2.rank:
        return float(np.pi / 2)
    return float(np.arcsin(min(max(max_angle_sine(S1, S2), max_angle_sine(S2, S1)), 1.0)))


def coset_distance(v1, v2, N: Subspace) -> float:
    """Distance between the parallel cosets ``v1 + N`` and ``v2 + N``."""
    d = np.asarray(v1) - np.asarray(v2)
    return float(np.linalg.norm(residual(N, d)))


def random_subspace(rng: np.random.Generator, n: int, k: int, field: str = "real") -> Subspace:
    """Haar-like random ``k``-dimensional subspace of the ``n``-space."""
    G = rng.standard_normal((n, k))
    if field == "complex":
        G = G + 1j * rng.standard_normal((n, k))
    if k == 0:
        return Subspace(G)
    q, _ = np.linalg.qr(G)
    return Subspace(q)
