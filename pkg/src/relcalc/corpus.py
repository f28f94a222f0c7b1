"""Seeded random relations for property checks and corpus verification.

Item ``i`` of a corpus draws from its own child of
``SeedSequence(seed)``, so results do not depend on evaluation order.
"""
from __future__ import annotations

import numpy as np

from .decomposition import regular_part
from .relation import LinearRelation, from_graph, from_parts, from_stacked
from .subspace import complement, random_subspace

KINDS = ("parts", "operator", "generic")


def _field_rng(rng, field):
    if field == "both":
        return "complex" if rng.random() < 0.5 else "real"
    return field


def _gaussian(rng, shape, field):
    G = rng.standard_normal(shape)
    if field == "complex":
        G = G + 1j * rng.standard_normal(shape)
    return G


def _subspace_inside(rng, S, k, field):
    """Random ``k``-dimensional subspace of ``S`` (as a basis matrix)."""
    if k == 0:
        return S.basis[:, :0]
    return S.basis @ random_subspace(rng, S.rank, k, field).basis


def random_relation(
    rng: np.random.Generator,
    dim_H: int,
    dim_K: int,
    field: str = "real",
    kind: str | None = None,
    sv_range: tuple[float, float] = (0.2, 5.0),
) -> LinearRelation:
    """Random relation with a prescribed structure.

    ``parts`` draws dim D, dim M, rank T_op and the kernel independently
    with singular values log-uniform in ``sv_range``; ``operator`` is a
    possibly rank-deficient everywhere-defined matrix; ``generic`` is a
    Gaussian span of random pairs.
    """
    field = _field_rng(rng, field)
    if kind is not None and kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    kind = kind or rng.choice(KINDS, p=[0.7, 0.15, 0.15])
    n, m = dim_H, dim_K
    lo, hi = np.log(sv_range[0]), np.log(sv_range[1])
    if kind == "generic":
        r = int(rng.integers(0, n + m + 1))
        return from_stacked(_gaussian(rng, (n + m, r), field), n)
    if kind == "operator":
        r = int(rng.integers(0, min(n, m) + 1))
        L = random_subspace(rng, m, r, field).basis
        R = random_subspace(rng, n, r, field).basis
        s = np.exp(rng.uniform(lo, hi, r))
        return from_graph((L * s) @ R.conj().T)
    d = int(rng.integers(0, n + 1))
    mdim = int(rng.integers(0, m + 1))
    D = random_subspace(rng, n, d, field)
    M = random_subspace(rng, m, mdim, field)
    r = int(rng.integers(0, min(d, m - mdim) + 1))
    row = _subspace_inside(rng, D, r, field)
    out = _subspace_inside(rng, complement(M), r, field)
    s = np.exp(rng.uniform(lo, hi, r))
    A = (out * s) @ row.conj().T
    return from_parts(A @ D.basis, D.basis, M.basis)


def corpus(count: int, seed: int, max_dim: int = 8, field: str = "both", kind: str | None = None):
    """``count`` relations with dims in ``1..max_dim``, one child seed per item."""
    out = []
    for child in np.random.SeedSequence(seed).spawn(count):
        rng = np.random.default_rng(child)
        n, m = (int(v) for v in rng.integers(1, max_dim + 1, size=2))
        out.append(random_relation(rng, n, m, field, kind))
    return out


def item_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for auxiliary draws tied to corpus item ``index``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index, 1)))


def admissible_perturbation(rng: np.random.Generator, T: LinearRelation, bound: float = 0.8) -> LinearRelation:
    """Random ``S`` with ``M(S) ⊆ M(T)``, ``D(T) ⊆ D(S)`` and ``|Sx| <= bound |Tx|`` on ``D(T)``.

    On ``D(T)``, ``S_op = (c I + e R) T_op`` with ``|c| + e <= bound`` and
    ``|R| = 1``; ``S`` acts arbitrarily on extra domain directions.
    """
    field = T.field
    n, m = T.dim_H, T.dim_K
    op = regular_part(T)
    c = rng.uniform(-0.6, 0.6) * bound / 0.8
    e = bound - abs(c)
    R = _gaussian(rng, (m, m), field)
    R /= np.linalg.norm(R, 2)
    A_on_D = (c * np.eye(m) + e * R) @ op.matrix
    Dperp = complement(T.domain)
    extra = _subspace_inside(rng, Dperp, int(rng.integers(0, Dperp.rank + 1)), field)
    A_extra = _gaussian(rng, (m, extra.shape[1]), field)
    dom = np.hstack([op.domain.basis.astype(np.result_type(op.domain.basis, extra)), extra])
    A = np.hstack([A_on_D.astype(np.result_type(A_on_D, A_extra)), A_extra])
    Ms = _subspace_inside(rng, T.mulpart, int(rng.integers(0, T.mulpart.rank + 1)), field)
    if dom.shape[1] == 0:
        A = np.zeros((m, 0))
        dom = np.zeros((n, 0))
    return from_parts(A, dom, Ms)
