"""Hyers-Ulam stability: certification, brute-force oracle and theorem checks.

In finite dimensions every relation has closed range and is therefore
Hyers-Ulam stable; the content is quantitative.  The smallest constant
is ``M_T = |T^†| = 1/gamma(T)``, and a small ``gamma`` is the
finite-dimensional shadow of a range that fails to be closed.
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, field

import numpy as np

from .decomposition import (
    abs_relation,
    cogram,
    gamma,
    gram,
    hus_constant,
    moore_penrose,
    reconstruct,
    regular_part,
)
from .errors import PreconditionError
from .relation import (
    LinearRelation,
    _embed,
    adjoint,
    cartesian_product,
    from_graph,
    from_parts,
    image_of,
    inverse,
    product_space,
    relations_equal,
    sum as relation_sum,
)
from .spectral import gram_restriction
from .subspace import Subspace, complement, contains, coset_distance, equals, intersect, span

RTOL = 1e-8
TIGHTNESS = 1e-6
SAMPLE_SLACK = 1e-9


@dataclass
class Verdict:
    holds: bool
    margin: float = 0.0
    detail: str = ""


def _rel_gap(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b):
        return 0.0
    if math.isinf(a) or math.isinf(b):
        return float("inf")
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def _close(name: str, a: float, b: float, rtol: float = RTOL) -> Verdict:
    gap = _rel_gap(a, b)
    return Verdict(gap <= rtol, gap, f"{name}: {a:.12e} vs {b:.12e}")


def _same(name: str, S1: Subspace, S2: Subspace, tol: float = RTOL) -> Verdict:
    ok = equals(S1, S2, tol)
    return Verdict(ok, 0.0 if ok else 1.0, f"{name}: ranks {S1.rank}, {S2.rank}")


def _unit_vectors(rng: np.random.Generator, count: int, dim: int, complex_: bool) -> np.ndarray:
    Z = rng.standard_normal((dim, count))
    if complex_:
        Z = Z + 1j * rng.standard_normal((dim, count))
    return Z / np.linalg.norm(Z, axis=0)


# ------------------------------------------------------------------ oracle


@dataclass
class OracleResult:
    sup_ratio: float
    witness: tuple[np.ndarray, np.ndarray]
    samples: int
    max_sampled_ratio: float
    extremal_ratio: float


def hus_oracle(T: LinearRelation, n_samples: int = 256, seed: int = 0) -> OracleResult:
    """Empirical ``sup dist(T^{-1}y, T^{-1}y0) / |y - y0|`` over ``y, y0 ∈ R(T)``.

    Random pairs are drawn uniformly from the unit sphere of ``R(T)``; the
    extremal pair (top singular direction of ``T^†`` against ``y0 = 0``)
    is always evaluated, so the supremum is attained.
    """
    R = T.range
    if R.rank == 0:
        raise PreconditionError("relation has zero range")
    rng = np.random.default_rng(seed)
    Tinv = inverse(T)
    N = T.kernel
    cplx = T.field == "complex"

    def representative(y):
        # any element of the solution coset, not just the minimal one
        x = image_of(Tinv, y).particular
        return x + N.basis @ rng.standard_normal(N.rank)

    best, witness, max_sampled = 0.0, (np.zeros(T.dim_K), np.zeros(T.dim_K)), 0.0
    Y = R.basis @ _unit_vectors(rng, n_samples, R.rank, cplx)
    Y0 = R.basis @ _unit_vectors(rng, n_samples, R.rank, cplx)
    Y0 *= rng.uniform(0.0, 1.0, n_samples)
    for y, y0 in zip(Y.T, Y0.T):
        denom = np.linalg.norm(y - y0)
        if denom == 0:
            continue
        ratio = coset_distance(representative(y), representative(y0), N) / denom
        if ratio > max_sampled:
            max_sampled = ratio
        if ratio > best:
            best, witness = ratio, (y, y0)
    mp = moore_penrose(T)
    extremal = 0.0
    if mp.matrix.size:
        _, s, Vh = np.linalg.svd(mp.matrix)
        y = mp.domain.basis @ Vh[0].conj()
        y0 = np.zeros_like(y)
        extremal = coset_distance(representative(y), representative(y0), N) / np.linalg.norm(y)
        if extremal >= best:
            best, witness = extremal, (y, y0)
    return OracleResult(float(best), witness, n_samples, float(max_sampled), float(extremal))


# ----------------------------------------------------------- certification


@dataclass
class StabilityReport:
    gamma: float
    hus_constant: float
    part_dims: tuple[int, int, int, int]
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    oracle: OracleResult | None = None
    flags: list[str] = field(default_factory=list)

    @property
    def all_hold(self) -> bool:
        return all(v.holds for v in self.verdicts.values())


def certify_hus(T: LinearRelation, tol: float = 1e-8, n_samples: int = 0, seed: int = 0) -> StabilityReport:
    """Hyers-Ulam certificate: ``gamma``, ``M_T`` and a near-instability flag.

    With ``n_samples > 0`` the brute-force oracle is run and its tightness
    against ``M_T`` is added to the verdicts.
    """
    g = gamma(T)
    M = hus_constant(T)
    rep = StabilityReport(g, M, T.part_dims)
    rep.verdicts["closed_range"] = Verdict(True, 0.0, "finite dimension: every range is closed, T is stable")
    if math.isfinite(g):
        rep.verdicts["M_T*gamma=1"] = _close("M_T * gamma", M * g, 1.0, 1e-10)
    else:
        rep.verdicts["M_T*gamma=1"] = Verdict(M == 0.0, M, "T_op = 0, so M_T = 0")
    if g < tol:
        rep.flags.append(f"near-unstable: gamma {g:.3e} < {tol:.1e}")
    if n_samples > 0 and T.range.rank > 0:
        orc = hus_oracle(T, n_samples, seed)
        rep.oracle = orc
        gap = abs(orc.sup_ratio - M) / (1 + M)
        rep.verdicts["oracle_tight"] = Verdict(gap <= TIGHTNESS, gap, f"sup ratio {orc.sup_ratio:.12e}, M_T {M:.12e}")
        # relative slack, floored at an absolute one: with M_T = 0 sampled ratios are rounding noise
        excess = max(0.0, orc.max_sampled_ratio - M - SAMPLE_SLACK * max(1.0, M))
        rep.verdicts["M_T_is_constant"] = Verdict(excess == 0.0, excess, "no sampled ratio exceeds M_T")
    return rep


# -------------------------------------------------------- equivalences


def equivalence_gammas(T: LinearRelation) -> dict[str, float]:
    R = gram_restriction(T)
    return {
        "T": gamma(T),
        "T_op": gamma(regular_part(T).as_relation),
        "T*": gamma(adjoint(T)),
        "T*T": gamma(gram(T)),
        "TT*": gamma(cogram(T)),
        "|T|": gamma(abs_relation(T)),
        "T*T|N(T)perp": gamma(R) if R is not None else float("inf"),
    }


def verify_equivalences(T: LinearRelation, rtol: float = RTOL) -> dict[str, Verdict]:
    """Stability of T, T_op, T*, T*T, TT*, |T| and T*T|N(T)^⊥ via their gammas."""
    g = equivalence_gammas(T)
    g2 = g["T"] ** 2
    positive = [k for k, v in g.items() if v > 0]
    out = {
        "hus_sign_pattern": Verdict(len(positive) == len(g), 0.0, "gamma > 0 for " + ", ".join(positive)),
        "gamma(T_op)=gamma(T)": _close("gamma(T_op)", g["T_op"], g["T"], rtol),
        "gamma(T*)=gamma(T)": _close("gamma(T*)", g["T*"], g["T"], rtol),
        "gamma(T*T)=gamma(T)^2": _close("gamma(T*T)", g["T*T"], g2, rtol),
        "gamma(TT*)=gamma(T)^2": _close("gamma(TT*)", g["TT*"], g2, rtol),
        "gamma(|T|)=gamma(T)": _close("gamma(|T|)", g["|T|"], g["T"], rtol),
        "gamma(T*T|N(T)perp)=gamma(T)^2": _close("gamma(T*T|N(T)perp)", g["T*T|N(T)perp"], g2, rtol),
    }
    return out


def verify_algebra(T: LinearRelation, tol: float = RTOL, adjoint_fn=adjoint) -> dict[str, Verdict]:
    """Graph identities of the relation calculus.

    ``adjoint_fn`` is a test hook for fault injection.
    """
    A = adjoint_fn(T)
    return {
        "(T*)*=T": _same("(T*)*", adjoint_fn(A).graph, T.graph, tol),
        "(T^-1)*=(T*)^-1": _same("(T^-1)*", adjoint_fn(inverse(T)).graph, inverse(A).graph, tol),
        "N(T*)=R(T)perp": _same("N(T*)", A.kernel, complement(T.range), tol),
        "M(T*)=D(T)perp": _same("M(T*)", A.mulpart, complement(T.domain), tol),
        "T=T_op+(0xM(T))": _same("reconstruction", reconstruct(T).graph, T.graph, tol),
    }


# --------------------------------------------------- sum / product / block


def domination_ratio(T: LinearRelation, S: LinearRelation, tol: float = 1e-8) -> float:
    """``sup |Sx| / |Tx|`` over ``x ∈ D(T)`` with ``Tx ≠ 0`` (quotient norms).

    Exact: on ``D(T) ⊖ N(T)`` the ratio is the largest singular value of
    ``S_op T_op^†``.  ``inf`` when ``S`` is nonzero somewhere ``T`` vanishes.
    Requires ``D(T) ⊆ D(S)``.
    """
    if not contains(S.domain, T.domain, tol):
        raise PreconditionError("D(T) is not contained in D(S)")
    op_T = regular_part(T)
    Q = op_T.domain.basis
    A_T = op_T.matrix
    A_S = regular_part(S).full_matrix @ Q
    if Q.shape[1] == 0:
        return 0.0
    r = T.domain.rank - T.kernel.rank
    _, s, Wh = np.linalg.svd(A_T)
    W = Wh.conj().T
    scale = max(1.0, float(np.linalg.norm(A_S, 2)))
    if W.shape[1] > r and np.linalg.norm(A_S @ W[:, r:], 2) > tol * scale:
        return float("inf")
    if r == 0:
        return 0.0
    return float(np.linalg.norm((A_S @ W[:, :r]) / s[:r], 2))


@dataclass
class SumReport:
    applicable: bool
    b_star: float
    violated: str | None = None
    hus_T: float = float("nan")
    hus_sum: float = float("nan")
    bound: float = float("nan")
    hypotheses: dict[str, bool] = field(default_factory=dict)
    verdicts: dict[str, Verdict] = field(default_factory=dict)
    relation: LinearRelation | None = None


def check_sum_stability(T: LinearRelation, S: LinearRelation, n_samples: int = 200, seed: int = 0) -> SumReport:
    """Stability of ``S + T`` under ``M(S) ⊆ M(T)``, ``D(T) ⊆ D(S)``, ``|Sx| <= b|Tx|``, ``b < 1``.

    Outside the hypotheses the report is marked inapplicable and names the
    first violated one; nothing is asserted about ``S + T`` then.
    """
    if (T.dim_H, T.dim_K) != (S.dim_H, S.dim_K):
        raise ValueError(f"dimension mismatch: ({T.dim_H}, {T.dim_K}) vs ({S.dim_H}, {S.dim_K})")
    hyp = {
        "M(S)⊆M(T)": contains(T.mulpart, S.mulpart, RTOL),
        "D(T)⊆D(S)": contains(S.domain, T.domain, RTOL),
    }
    for name, ok in hyp.items():
        if not ok:
            return SumReport(False, float("nan"), name, hypotheses=hyp)
    b = domination_ratio(T, S)
    hyp["b<1"] = b < 1
    if not b < 1:
        return SumReport(False, b, "b<1", hypotheses=hyp)

    ST = relation_sum(S, T)
    rng = np.random.default_rng(seed)
    op_T = regular_part(T)
    op_ST = regular_part(ST)
    X = op_T.domain.basis @ rng.standard_normal((T.domain.rank, n_samples))
    if T.field == "complex":
        X = X + 1j * (op_T.domain.basis @ rng.standard_normal((T.domain.rank, n_samples)))
    tx = np.linalg.norm(op_T.full_matrix @ X, axis=0)
    stx = np.linalg.norm(op_ST.full_matrix @ X, axis=0)
    slack = SAMPLE_SLACK * np.maximum(1.0, tx)
    excess = np.maximum((1 - b) * tx - stx, stx - (1 + b) * tx) - slack
    worst = float(excess.max(initial=-np.inf))

    M_T, M_ST = hus_constant(T), hus_constant(ST)
    bound = M_T / (1 - b)
    verdicts = {
        "sum_sandwich": Verdict(worst <= 0, max(worst, 0.0), f"{n_samples} samples in D(T)"),
        "N(S+T)=N(T)": _same("N(S+T)", ST.kernel, T.kernel),
        "D(S+T)=D(T)": _same("D(S+T)", ST.domain, T.domain),
        "M_{S+T}<=M_T/(1-b)": Verdict(
            M_ST <= bound * (1 + SAMPLE_SLACK), max(0.0, M_ST - bound), f"{M_ST:.12e} <= {bound:.12e}"
        ),
    }
    return SumReport(True, b, None, M_T, M_ST, bound, hyp, verdicts, ST)


@dataclass
class ProductReport:
    hus_T: float
    hus_S: float
    hus_product: float
    verdicts: dict[str, Verdict]
    relation: LinearRelation


def check_product_stability(T: LinearRelation, S: LinearRelation) -> ProductReport:
    P = cartesian_product(T, S)
    M_T, M_S, M_P = hus_constant(T), hus_constant(S), hus_constant(P)
    verdicts = {
        "R(TxS)=R(T)xR(S)": _same("R(TxS)", P.range, product_space(T.range, S.range)),
        "D(TxS)=D(T)xD(S)": _same("D(TxS)", P.domain, product_space(T.domain, S.domain)),
        "M_{TxS}=max(M_T,M_S)": _close("M_{TxS}", M_P, max(M_T, M_S), 1e-9),
    }
    return ProductReport(M_T, M_S, M_P, verdicts, P)


def _swap_output(T: LinearRelation, k1: int) -> LinearRelation:
    """Reorder the K-coordinates ``(k1 | k2) -> (k2 | k1)``."""
    n = T.dim_H
    K = T.k_block
    B = np.vstack([T.h_block, K[k1:], K[:k1]])
    return LinearRelation(Subspace(B, T.tol), n, T.dim_K, T.field)


def block_relation(A: LinearRelation, B: LinearRelation, C: LinearRelation, F: LinearRelation) -> LinearRelation:
    """``[[A, B], [C, F]] = {((x, y), (x_a + y_b, x_c + y_f))}``.

    Formed from the set definition: the four graphs are embedded in the
    space of ``(x, y, x_a, x_c, y_b, y_f)``, intersected, then mapped.
    """
    n, m = A.dim_H, F.dim_H
    if (A.dim_K, C.dim_H, C.dim_K, B.dim_H, B.dim_K, F.dim_K) != (n, n, m, m, n, m):
        raise ValueError(
            "block shapes do not conform: need A: n->n, B: m->n, C: n->m, F: m->m, got "
            f"A {A.dim_H}->{A.dim_K}, B {B.dim_H}->{B.dim_K}, C {C.dim_H}->{C.dim_K}, F {F.dim_H}->{F.dim_K}"
        )
    sizes = [n, m, n, m, n, m]
    offs = np.cumsum([0] + sizes)
    blk = [range(offs[i], offs[i + 1]) for i in range(6)]
    total = int(offs[-1])
    x, y, xa, xc, yb, yf = blk
    tol = max(R.tol for R in (A, B, C, F))
    W = _embed(A, total, x, xa)
    for R, h, k in ((C, x, xc), (B, y, yb), (F, y, yf)):
        W = intersect(W, _embed(R, total, h, k), tol)
    G = W.basis
    top = np.vstack([G[offs[0] : offs[2]], G[offs[2] : offs[3]] + G[offs[4] : offs[5]], G[offs[3] : offs[4]] + G[offs[5] : offs[6]]])
    field_ = "complex" if "complex" in (A.field, B.field, C.field, F.field) else "real"
    return LinearRelation(span(top, tol), n + m, n + m, field_)


@dataclass
class BlockReport:
    certified: bool
    a_star: float
    f_star: float
    d: float
    violated: str | None = None
    gamma_block: float = float("nan")
    hus_block: float = float("nan")
    bound: float = float("nan")
    hypotheses: dict[str, bool] = field(default_factory=dict)
    verdicts: dict[str, Verdict] = field(default_factory=dict)


def block_matrix(
    A: LinearRelation, B: LinearRelation, C: LinearRelation, F: LinearRelation, n_samples: int = 200, seed: int = 0
) -> tuple[LinearRelation, BlockReport]:
    """Block relation and its diagonal-dominance certificate.

    With ``d = max(a*, f*) < 1`` and the inclusion hypotheses, the block
    relation is the sum of ``diag(A, F)`` and a perturbation bounded by
    ``d`` times it, hence stable.  For ``d >= 1`` the report declines.
    """
    blockrel = block_relation(A, B, C, F)
    n = A.dim_H
    T = cartesian_product(A, F)
    S = _swap_output(cartesian_product(C, B), C.dim_K)
    verdicts = {"block=diag+antidiag": Verdict(relations_equal(blockrel, relation_sum(T, S), RTOL), 0.0, "")}
    hyp = {
        "M(B)⊆M(A)": contains(A.mulpart, B.mulpart, RTOL),
        "M(C)⊆M(F)": contains(F.mulpart, C.mulpart, RTOL),
        "D(A)⊆D(C)": contains(C.domain, A.domain, RTOL),
        "D(F)⊆D(B)": contains(B.domain, F.domain, RTOL),
    }
    for name, ok in hyp.items():
        if not ok:
            return blockrel, BlockReport(False, float("nan"), float("nan"), float("nan"), name, hypotheses=hyp, verdicts=verdicts)
    a = domination_ratio(A, C)
    f = domination_ratio(F, B)
    d = max(a, f)
    hyp["d<1"] = d < 1
    g = gamma(blockrel)
    M = hus_constant(blockrel)
    if not d < 1:
        return blockrel, BlockReport(False, a, f, d, "d<1", g, M, hypotheses=hyp, verdicts=verdicts)

    rng = np.random.default_rng(seed)
    op_T, op_S = regular_part(T), regular_part(S)
    X = op_T.domain.basis @ rng.standard_normal((T.domain.rank, n_samples))
    tx = np.linalg.norm(op_T.full_matrix @ X, axis=0)
    sx = np.linalg.norm(op_S.full_matrix @ X, axis=0)
    excess = float((sx - d * tx - SAMPLE_SLACK * np.maximum(1.0, tx)).max(initial=-np.inf))
    bound = hus_constant(T) / (1 - d)
    verdicts.update(
        {
            "gamma(block)>0": Verdict(g > 0, g, f"gamma = {g:.12e}"),
            "|S(x,y)|<=d|T(x,y)|": Verdict(excess <= 0, max(excess, 0.0), f"{n_samples} samples, d = {d:.12e}"),
            "M_block<=M_diag/(1-d)": Verdict(M <= bound * (1 + SAMPLE_SLACK), max(0.0, M - bound), f"{M:.12e} <= {bound:.12e}"),
        }
    )
    rep = BlockReport(all(v.holds for v in verdicts.values()), a, f, d, None, g, M, bound, hyp, verdicts)
    return blockrel, rep


# ---------------------------------------------------------------- families

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNOPS = {ast.USub: operator.neg, ast.UAdd: operator.pos}
_FUNCS = {"sqrt": np.sqrt, "log": np.log, "exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}
_CONSTS = {"pi": np.pi, "e": np.e}


def evaluate_expression(expr: str, **variables):
    """Evaluate an arithmetic expression in the given (array) variables.

    Only numbers, the named variables, ``+ - * / **``, ``pi``, ``e`` and
    ``sqrt log exp sin cos abs`` are accepted.
    """

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name):
            if node.id in variables:
                return variables[node.id]
            if node.id in _CONSTS:
                return _CONSTS[node.id]
            raise ValueError(f"unknown name {node.id!r} in {expr!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNOPS:
            return _UNOPS[type(node.op)](ev(node.operand))
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS and len(node.args) == 1:
            return _FUNCS[node.func.id](ev(node.args[0]))
        raise ValueError(f"unsupported syntax in {expr!r}")

    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {expr!r}: {exc.msg}") from None
    # non-finite results are rejected by the caller
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        try:
            return ev(tree)
        except (ZeroDivisionError, OverflowError) as exc:
            raise ValueError(f"cannot evaluate {expr!r}: {exc}") from None


FAMILY_KINDS = ("diagonal", "banded", "graph-sequence")


@dataclass(frozen=True)
class FamilySpec:
    """A relation for every truncation size ``n``.

    ``diagonal``: ``diag(entry(i))`` for ``i = 1..n``.
    ``banded``: the diagonal plus ``bands[k](i)`` on the ``k``-th
    superdiagonal (negative ``k``: subdiagonal).
    ``graph-sequence``: the diagonal operator on ``F^n`` into
    ``F^(n + mul_dim)``, with the last ``mul_dim`` coordinates forming the
    multivalued part and the last ``kernel_dim`` diagonal entries zeroed.
    Expressions see the variables ``i`` (1-based index) and ``n``.
    """

    kind: str
    entry: str
    n_range: tuple[int, int]
    bands: tuple[tuple[int, str], ...] = ()
    mul_dim: int = 0
    kernel_dim: int = 0

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"family kind must be one of {FAMILY_KINDS}, got {self.kind!r}")
        lo, hi = self.n_range
        if not (1 <= lo <= hi):
            raise ValueError(f"n_range must satisfy 1 <= lo <= hi, got {self.n_range}")
        if self.mul_dim < 0 or self.kernel_dim < 0:
            raise ValueError("mul_dim and kernel_dim must be nonnegative")

    @property
    def sizes(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)

    def _diag(self, n: int) -> np.ndarray:
        i = np.arange(1, n + 1, dtype=float)
        d = np.broadcast_to(np.asarray(evaluate_expression(self.entry, i=i, n=float(n)), dtype=float), (n,)).copy()
        if not np.all(np.isfinite(d)):
            raise ValueError(f"entry {self.entry!r} is not finite for n = {n}")
        return d

    def build(self, n: int) -> LinearRelation:
        d = self._diag(n)
        if self.kind == "diagonal":
            return from_graph(np.diag(d))
        if self.kind == "banded":
            A = np.diag(d)
            for k, expr in self.bands:
                length = n - abs(k)
                if length <= 0:
                    continue
                i = np.arange(1, length + 1, dtype=float)
                vals = np.broadcast_to(np.asarray(evaluate_expression(expr, i=i, n=float(n)), dtype=float), (length,))
                A += np.diag(vals, k)
            return from_graph(A)
        if self.kernel_dim:
            d[max(0, n - self.kernel_dim) :] = 0.0
        A = np.vstack([np.diag(d), np.zeros((self.mul_dim, n))])
        mul = np.vstack([np.zeros((n, self.mul_dim)), np.eye(self.mul_dim)])
        return from_parts(A, np.eye(n), mul)


@dataclass
class ProbeResult:
    sizes: list[int]
    gammas: list[float]
    hus_constants: list[float]
    slope: float
    r_squared: float
    tail_slope: float
    trend: str
    rule: str = (
        "heuristic: degenerating if log-log slope < -0.5 with R^2 > 0.99; "
        "stable if the slope over the last half of sizes is >= -0.1; otherwise inconclusive"
    )


DEGENERATING_SLOPE = -0.5
DEGENERATING_R2 = 0.99
STABLE_TAIL_SLOPE = -0.1


def _loglog_fit(n: np.ndarray, g: np.ndarray) -> tuple[float, float]:
    x, y = np.log(n), np.log(g)
    slope, icept = np.polyfit(x, y, 1)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - (slope * x + icept)) ** 2))
    r2 = 1.0 if ss_tot <= 1e-300 else 1.0 - ss_res / ss_tot
    return float(slope), r2


def classify_trend(sizes, gammas) -> tuple[str, float, float, float]:
    """``(trend, slope, r_squared, tail_slope)`` for a sequence of gammas."""
    n = np.asarray(sizes, dtype=float)
    g = np.asarray(gammas, dtype=float)
    if n.size < 3:
        return "inconclusive", float("nan"), float("nan"), float("nan")
    keep = np.isfinite(g) & (g > 0)
    if not keep.any():
        return "stable", 0.0, 1.0, 0.0
    n, g = n[keep], g[keep]
    if n.size < 3:
        return "inconclusive", float("nan"), float("nan"), float("nan")
    slope, r2 = _loglog_fit(n, g)
    half = max(2, n.size // 2)
    tail, _ = _loglog_fit(n[-half:], g[-half:])
    if slope < DEGENERATING_SLOPE and r2 > DEGENERATING_R2:
        return "degenerating", slope, r2, tail
    if tail >= STABLE_TAIL_SLOPE:
        return "stable", slope, r2, tail
    return "inconclusive", slope, r2, tail


def truncation_probe(family: FamilySpec) -> ProbeResult:
    sizes = list(family.sizes)
    gammas, hus = [], []
    for n in sizes:
        T = family.build(n)
        gammas.append(gamma(T))
        hus.append(hus_constant(T))
    trend, slope, r2, tail = classify_trend(sizes, gammas)
    return ProbeResult(sizes, gammas, hus, slope, r2, tail, trend)
