"""Spectra of relations in one space and the ``T*T`` restriction identities.

``lam`` is in the resolvent set of ``T`` iff ``(T - lam)^{-1}`` is an
everywhere-defined operator, i.e. ``N(T - lam) = {0}`` and
``R(T - lam) = H``.  With graph basis ``[U; V]`` (r columns, ``dim H = n``)
this can only happen when ``r == n``; the finite spectrum is then that of
the square pencil ``V c = lam U c``.  Directions with ``U c = 0`` (the
multivalued part) show up as infinite pencil eigenvalues and are
counted separately, never as spectral points.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .decomposition import gamma, gram
from .errors import PreconditionError
from .relation import LinearRelation, is_selfadjoint, recoordinatize, shift
from .subspace import complement

ZERO_BAND = 1e-8
MATCH_TOL = 1e-6


def _lex_sort(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values)
    if values.size == 0:
        return values
    order = np.lexsort((values.imag, values.real)) if np.iscomplexobj(values) else np.argsort(values)
    return values[order]


@dataclass
class SpectrumReport:
    """Finite spectrum with multiplicities plus diagnostic flags.

    ``whole_plane`` is set when no ``lam`` is in the resolvent set (graph
    dimension differs from ``dim H`` or the pencil is singular); in that
    case ``eigenvalues`` is empty.
    """

    eigenvalues: np.ndarray
    infinite_count: int = 0
    whole_plane: bool = False
    gamma_spectral: float = float("inf")
    identity_holds: bool | None = None
    max_distance: float = 0.0
    restricted_eigenvalues: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    def multiplicities(self, tol: float = 1e-8) -> list[tuple[complex, int]]:
        out: list[tuple[complex, int]] = []
        for lam in self.eigenvalues:
            if out and abs(lam - out[-1][0]) <= tol * (1 + abs(lam)):
                out[-1] = (out[-1][0], out[-1][1] + 1)
            else:
                out.append((lam, 1))
        return out

    @property
    def spectral_radius(self) -> float:
        return float(np.abs(self.eigenvalues).max(initial=0.0))


def _require_square(T: LinearRelation):
    if T.dim_H != T.dim_K:
        raise PreconditionError(f"spectrum needs a relation in one space, got ({T.dim_H}, {T.dim_K})")


def point_spectrum(T: LinearRelation, inf_tol: float = 1e-10) -> SpectrumReport:
    _require_square(T)
    n, r = T.dim_H, T.graph.rank
    if r != n:
        why = "range of T - lam is a proper subspace" if r < n else "T - lam has a kernel"
        return SpectrumReport(np.zeros(0), whole_plane=True, notes=[f"graph dimension {r} != {n}: {why} for every lam"])
    U, V = T.h_block, T.k_block
    w = scipy.linalg.eigvals(V, U, homogeneous_eigvals=True)
    alpha, beta = w[0], w[1]
    scale = np.hypot(np.abs(alpha), np.abs(beta))
    if np.any(scale <= inf_tol):
        return SpectrumReport(np.zeros(0), whole_plane=True, notes=["singular pencil: every lam is an eigenvalue"])
    finite = np.abs(beta) > inf_tol * scale
    lam = alpha[finite] / beta[finite]
    if is_selfadjoint(T):
        lam = lam.real
    elif np.all(np.abs(lam.imag) <= 1e-12 * (1 + np.abs(lam))) and T.field == "real":
        lam = lam.real
    return SpectrumReport(_lex_sort(lam), infinite_count=int(np.sum(~finite)))


def resolvent_member(T: LinearRelation, lam) -> bool:
    """``(T - lam)^{-1}`` is a single-valued, everywhere-defined map."""
    _require_square(T)
    S = shift(T, lam)
    return S.kernel.rank == 0 and S.range.rank == T.dim_H


def _strip_zeros(values: np.ndarray, radius: float) -> np.ndarray:
    return values[np.abs(values) > ZERO_BAND * (1 + radius)]


def match_multisets(a: np.ndarray, b: np.ndarray) -> float:
    """Largest pairing distance under the optimal one-to-one matching.

    ``inf`` when the sizes differ.
    """
    a, b = np.asarray(a), np.asarray(b)
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def gram_restriction(T: LinearRelation) -> LinearRelation | None:
    """``T*T|_{N(T)^⊥}`` as a relation on the Hilbert space ``N(T)^⊥``.

    ``None`` when ``N(T) = H``.
    """
    W = complement(T.kernel)
    if W.rank == 0:
        return None
    return recoordinatize(gram(T), W, W)


def verify_spectral_identity(T: LinearRelation) -> SpectrumReport:
    """Compare the nonzero spectra of ``T*T`` and ``T*T|_{N(T)^⊥}``."""
    G = gram(T)
    full = point_spectrum(G)
    R = gram_restriction(T)
    restricted = point_spectrum(R) if R is not None else SpectrumReport(np.zeros(0))
    radius = max(full.spectral_radius, restricted.spectral_radius)
    a = _strip_zeros(full.eigenvalues, radius)
    b = _strip_zeros(restricted.eigenvalues, radius)
    dist = match_multisets(a, b)
    if full.whole_plane or restricted.whole_plane:
        dist = float("inf")
    full.restricted_eigenvalues = restricted.eigenvalues
    full.max_distance = dist
    full.identity_holds = bool(dist <= MATCH_TOL * (1 + radius))
    full.gamma_spectral = float(np.abs(a).min()) if a.size else float("inf")
    return full


def gamma_via_spectrum(S: LinearRelation) -> float:
    """``min |lam|`` over the nonzero spectrum of a self-adjoint relation."""
    _require_square(S)
    if not is_selfadjoint(S):
        raise PreconditionError("relation is not self-adjoint")
    rep = point_spectrum(S)
    nz = _strip_zeros(rep.eigenvalues, rep.spectral_radius)
    return float(np.abs(nz).min()) if nz.size else float("inf")


def gamma_identities(T: LinearRelation) -> dict[str, float]:
    """``gamma(T)^2`` next to ``gamma`` of ``T*T`` and of its restriction, by both routes."""
    G = gram(T)
    R = gram_restriction(T)
    g = gamma(T)
    return {
        "gamma(T)^2": g * g,
        "gamma(T*T)": gamma(G),
        "gamma_spectral(T*T)": gamma_via_spectrum(G),
        "gamma(T*T|N(T)perp)": gamma(R) if R is not None else float("inf"),
        "gamma_spectral(T*T|N(T)perp)": gamma_via_spectrum(R) if R is not None else float("inf"),
    }
