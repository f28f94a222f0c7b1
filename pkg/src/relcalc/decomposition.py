"""Operator part, Moore-Penrose inverse, reduced minimum modulus and friends.

For a relation ``T`` the operator part ``T_op = P_{M(T)^⊥} T`` is a
single-valued map on ``D(T)`` and ``T = T_op ∔ ({0} × M(T))``.  Every
numeric invariant here (``gamma``, the HUS constant, ``|Q_T T|``) is read
off the singular values of ``T_op``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import NumericalInconsistencyError, PreconditionError
from .relation import (
    LinearRelation,
    adjoint,
    compose,
    from_graph,
    from_parts,
    inverse,
    is_nonnegative,
    is_selfadjoint,
    minkowski_sum,
    multivalued,
    shift,
)
from .subspace import Subspace, residual

DUAL_ROUTE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class OperatorPart:
    """Single-valued map ``D(T) -> K`` given on an orthonormal basis of ``D(T)``.

    ``matrix[:, i]`` is the image of ``domain.basis[:, i]``.
    """

    domain: Subspace
    matrix: np.ndarray
    dim_H: int
    dim_K: int

    @property
    def full_matrix(self) -> np.ndarray:
        """``dim_K x dim_H`` matrix, zero on ``D(T)^⊥``."""
        return self.matrix @ self.domain.basis.conj().T

    @cached_property
    def singular_values(self) -> np.ndarray:
        if self.matrix.size == 0:
            return np.zeros(0)
        return np.linalg.svd(self.matrix, compute_uv=False)

    @property
    def norm(self) -> float:
        s = self.singular_values
        return float(s[0]) if s.size else 0.0

    @cached_property
    def as_relation(self) -> LinearRelation:
        A = self.matrix
        if A.shape[1] == 0:
            A = np.zeros((self.dim_K, 0))
        return from_parts(A, self.domain.basis, tol=self.domain.tol)


def regular_part(T: LinearRelation) -> OperatorPart:
    """``T_op``, computed from the SVD of the H-block of the graph basis.

    For ``x = P_k e_i`` in ``D(T)`` the graph coefficient is
    ``c = W_k e_i / s_i``; its K-part projected off ``M(T)`` is ``T_op x``.
    """
    P, s, W, k = T._h_svd
    Y = T.k_block @ (W[:, :k] / s[:k])
    A = residual(T.mulpart, Y) if k else np.zeros((T.dim_K, 0), T.dtype)
    return OperatorPart(Subspace(P[:, :k], T.tol), A, T.dim_H, T.dim_K)


def regular_part_by_composition(T: LinearRelation) -> LinearRelation:
    """``graph(P_{M(T)^⊥}) ∘ T``; an independent route to ``T_op``."""
    Pm = np.eye(T.dim_K) - T.mulpart.projector
    return compose(from_graph(Pm, tol=T.tol), T)


def moore_penrose(T: LinearRelation) -> OperatorPart:
    """``T^† = (T^{-1})_op = P_{N(T)^⊥} T^{-1}`` on ``D(T^†) = R(T)``."""
    return regular_part(inverse(T))


def quotient_operator_norm(T: LinearRelation) -> float:
    """``|Q_T T|``: the operator norm of ``T_op``."""
    return regular_part(T).norm


def _op_rank(T: LinearRelation) -> int:
    # N(T_op) = N(T), so the graph's own rank decisions fix rank(T_op)
    return T.domain.rank - T.kernel.rank


def gamma(T: LinearRelation) -> float:
    """Reduced minimum modulus: smallest nonzero singular value of ``T_op``.

    ``+inf`` when ``T_op`` vanishes identically (infimum over an empty set).
    """
    r = _op_rank(T)
    if r <= 0:
        return float("inf")
    return float(regular_part(T).singular_values[r - 1])


def hus_constant(T: LinearRelation) -> float:
    """Smallest Hyers-Ulam constant ``M_T = |T^†|``; 0 when ``T^† = 0``."""
    # T^† vanishes exactly when T_op does; its computed matrix is then pure rounding
    if _op_rank(T) == 0:
        return 0.0
    return moore_penrose(T).norm


def psd_sqrt(B: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Principal square root of a Hermitian positive semidefinite matrix.

    Eigenvalues in ``[-tol * max(1, |B|), 0)`` are clamped to zero, and so
    are positive ones inside the same band: the square root would lift
    ``1e-17`` rounding noise to ``3e-9``, enough to leave a subspace.
    """
    B = (B + B.conj().T) / 2
    if B.size == 0:
        return B
    w, Q = np.linalg.eigh(B)
    floor = -tol * max(1.0, float(np.abs(w).max()))
    if w[0] < floor:
        raise PreconditionError(f"matrix is not positive semidefinite (eigenvalue {w[0]:.3e})")
    w = np.where(w > -floor, w, 0.0)
    return (Q * np.sqrt(w)) @ Q.conj().T


def sqrt_nonneg(T: LinearRelation) -> LinearRelation:
    """``T^{1/2} = (T_op)^{1/2} ∔ ({0} × M(T))`` for non-negative self-adjoint ``T``."""
    if T.dim_H != T.dim_K or not is_selfadjoint(T) or not is_nonnegative(T):
        raise PreconditionError("not a nonnegative self-adjoint relation")
    op = regular_part(T)
    Q = op.domain.basis
    B = Q.conj().T @ op.matrix
    R = psd_sqrt(B, tol=max(T.tol, 1e-10))
    return from_parts(Q @ R, Q, T.mulpart.basis, tol=T.tol)


def gram(T: LinearRelation) -> LinearRelation:
    """``T*T``."""
    return compose(adjoint(T), T)


def cogram(T: LinearRelation) -> LinearRelation:
    """``TT*``."""
    return compose(T, adjoint(T))


def abs_relation(T: LinearRelation) -> LinearRelation:
    """``|T| = (T*T)^{1/2}``."""
    return sqrt_nonneg(gram(T))


def resolvent_contraction_routes(T: LinearRelation) -> tuple[np.ndarray, np.ndarray]:
    """``C_T = (I + T*T)^{-1}`` by two independent routes.

    Returns ``(inverse_route, projector_route)``: the first inverts the
    relation ``I + T*T`` through its Moore-Penrose inverse, the second
    takes the H-H block of the orthogonal projector onto ``graph(T)``.
    """
    IpTT = shift(gram(T), -1.0)
    inv_route = moore_penrose(IpTT).full_matrix
    U = T.h_block
    return inv_route, U @ U.conj().T


def resolvent_contraction(T: LinearRelation) -> np.ndarray:
    a, b = resolvent_contraction_routes(T)
    err = float(np.abs(a - b).max(initial=0.0))
    if err > DUAL_ROUTE_TOL:
        raise NumericalInconsistencyError("resolvent contraction routes", err, DUAL_ROUTE_TOL)
    return b


def z_transform_parts(T: LinearRelation) -> tuple[LinearRelation, np.ndarray, np.ndarray]:
    """``(Z_T, (Z_T)_op, Z_{T_op})`` with the last two as full matrices."""
    Z = compose(T, from_graph(psd_sqrt(resolvent_contraction(T)), tol=T.tol))
    Top = regular_part(T).as_relation
    Zop_route = compose(Top, from_graph(psd_sqrt(resolvent_contraction(Top)), tol=T.tol))
    return Z, regular_part(Z).full_matrix, regular_part(Zop_route).full_matrix


def z_transform(T: LinearRelation, check: bool = True) -> LinearRelation:
    """``Z_T = T (I + T*T)^{-1/2}``.

    With ``check`` the identity ``(Z_T)_op = Z_{T_op}`` and the contraction
    bound ``|Q Z_T| <= 1`` are enforced.
    """
    if not check:
        return compose(T, from_graph(psd_sqrt(resolvent_contraction(T)), tol=T.tol))
    Z, zop, z_of_op = z_transform_parts(T)
    err = float(np.abs(zop - z_of_op).max(initial=0.0))
    if err > DUAL_ROUTE_TOL:
        raise NumericalInconsistencyError("operator part of Z_T vs Z of T_op", err, DUAL_ROUTE_TOL)
    nrm = quotient_operator_norm(Z)
    if nrm > 1 + 1e-10:
        raise NumericalInconsistencyError("Z_T is not a contraction", nrm - 1, 1e-10)
    return Z


def reconstruct(T: LinearRelation) -> LinearRelation:
    """``T_op ∔ ({0} × M(T))``; equals ``T``."""
    return minkowski_sum(regular_part(T).as_relation, multivalued(T.mulpart, T.dim_H, T.field))
