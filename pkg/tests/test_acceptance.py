"""Acceptance criteria, each at its stated tolerance.

Every test prints one ``PASS``/``FAIL`` line with the measured numbers.
Run ``pytest tests/test_acceptance.py -v -s`` to see them, or execute this
file directly.
"""
import json
import math
import subprocess
import sys
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from relcalc.corpus import admissible_perturbation, corpus, item_rng, random_relation
from relcalc.decomposition import (
    abs_relation,
    gamma,
    hus_constant,
    quotient_operator_norm,
    reconstruct,
    regular_part,
    resolvent_contraction_routes,
    z_transform_parts,
)
from relcalc.documents import dumps_document, parse_document, read_document, relation_to_document
from relcalc.relation import adjoint, from_graph, inverse, relations_equal
from relcalc.spectral import gamma_identities, verify_spectral_identity
from relcalc.stability import (
    FamilySpec,
    block_matrix,
    check_product_stability,
    check_sum_stability,
    hus_oracle,
    truncation_probe,
)
from relcalc.subspace import complement, distance

FIXTURES = Path(__file__).parent / "fixtures"
SEED = 2024


@lru_cache(maxsize=None)
def main_corpus(count=500):
    return tuple(corpus(count, seed=SEED, max_dim=8, field="both"))


# collected here and printed by the terminal-summary hook in conftest.py
RESULTS: list[str] = []


def report(cid: str, ok: bool, text: str):
    line = f"{'PASS' if ok else 'FAIL'}  {cid}: {text}"
    RESULTS.append(line)
    if __name__ == "__main__":
        print(line)
    return ok


def rel(a: float, b: float) -> float:
    if math.isinf(a) and math.isinf(b):
        return 0.0
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def test_c1_algebra_identities():
    t0 = time.perf_counter()
    items = main_corpus()
    worst = {"(T*)*=T": 0.0, "(T^-1)*=(T*)^-1": 0.0, "N(T*)=R(T)perp": 0.0, "M(T*)=D(T)perp": 0.0, "T=T_op+(0xM(T))": 0.0}
    fields = set()
    for T in items:
        fields.add(T.field)
        A = adjoint(T)
        angles = {
            "(T*)*=T": distance(adjoint(A).graph, T.graph),
            "(T^-1)*=(T*)^-1": distance(adjoint(inverse(T)).graph, inverse(A).graph),
            "N(T*)=R(T)perp": distance(A.kernel, complement(T.range)),
            "M(T*)=D(T)perp": distance(A.mulpart, complement(T.domain)),
            "T=T_op+(0xM(T))": distance(reconstruct(T).graph, T.graph),
        }
        for k, v in angles.items():
            worst[k] = max(worst[k], v)
    elapsed = time.perf_counter() - t0
    top = max(worst.values())
    ok = top < 1e-8 and elapsed < 60 and fields == {"real", "complex"} and len(items) == 500
    detail = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    assert report("C1 algebra identities", ok, f"500 relations, max angle {top:.2e} < 1e-8 [{detail}], {elapsed:.1f} s < 60 s")


def test_c2_hus_constant_exactness():
    worst_tight, worst_excess, checked = 0.0, 0.0, 0
    for i, T in enumerate(main_corpus()):
        if T.range.rank == 0:
            continue
        checked += 1
        orc = hus_oracle(T, n_samples=64, seed=i)
        M = hus_constant(T)
        worst_tight = max(worst_tight, abs(orc.sup_ratio - M) / (1 + M))
        # relative excess; when M_T = 0 the sampled ratios are rounding noise, measured absolutely
        worst_excess = max(worst_excess, (orc.max_sampled_ratio - M) / (M if M > 0 else 1.0))
    M_diag = hus_constant(from_graph(np.diag([2.0, 0.0])))
    ok = worst_tight <= 1e-6 and worst_excess <= 1e-9 and M_diag == 0.5
    assert report(
        "C2 HUS constant exactness",
        ok,
        f"{checked} relations, |sup - M_T|/(1+M_T) max {worst_tight:.1e} <= 1e-6, "
        f"sampled excess max {worst_excess:.1e} <= 1e-9 (relative, absolute where M_T = 0), M_T(diag(2,0)) = {M_diag!r}",
    )


def test_c3_spectral_identity_and_gamma():
    t0 = time.perf_counter()
    worst_match, worst_gamma = 0.0, 0.0
    for T in main_corpus()[:300]:
        rep = verify_spectral_identity(T)
        radius = max(rep.spectral_radius, float(np.abs(rep.restricted_eigenvalues).max(initial=0.0)))
        worst_match = max(worst_match, rep.max_distance / (1e-6 * (1 + radius)))
        ids = gamma_identities(T)
        g2 = ids["gamma(T)^2"]
        for key in ("gamma(T*T)", "gamma(T*T|N(T)perp)"):
            worst_gamma = max(worst_gamma, rel(ids[key], g2))
        worst_gamma = max(worst_gamma, rel(ids["gamma(T*T)"], ids["gamma(T*T|N(T)perp)"]))
    elapsed = time.perf_counter() - t0
    ok = worst_match <= 1 and worst_gamma <= 1e-8 and elapsed < 120
    assert report(
        "C3 spectral identity and gamma equality",
        ok,
        f"300 relations, pairing distance / (1e-6 (1+rho)) max {worst_match:.1e} <= 1, "
        f"gamma relative gap max {worst_gamma:.1e} <= 1e-8, {elapsed:.1f} s < 120 s",
    )


def test_c4_equivalence_battery():
    worst = 0.0
    for T in main_corpus():
        g = gamma(T)
        for other in (gamma(regular_part(T).as_relation), gamma(adjoint(T)), gamma(abs_relation(T))):
            worst = max(worst, rel(other, g))
    ok = worst <= 1e-8
    assert report("C4 equivalence battery", ok, f"500 relations, gamma(T_op), gamma(T*), gamma(|T|) vs gamma(T): max rel gap {worst:.1e} <= 1e-8")


def test_c5_resolvent_contraction_and_z_transform():
    worst_c, worst_z, worst_norm = 0.0, 0.0, 0.0
    for T in main_corpus():
        a, b = resolvent_contraction_routes(T)
        worst_c = max(worst_c, float(np.abs(a - b).max(initial=0.0)))
        Z, zop, z_of_op = z_transform_parts(T)
        worst_z = max(worst_z, float(np.abs(zop - z_of_op).max(initial=0.0)))
        worst_norm = max(worst_norm, quotient_operator_norm(Z))
    ok = worst_c <= 1e-8 and worst_z <= 1e-8 and worst_norm <= 1 + 1e-10
    assert report(
        "C5 C_T dual route and Z_T",
        ok,
        f"500 relations, C_T route gap {worst_c:.1e} <= 1e-8, (Z_T)_op vs Z_(T_op) {worst_z:.1e} <= 1e-8, "
        f"max |Z_T| = {worst_norm:.12f} <= 1 + 1e-10",
    )


def test_c6_sum_theorem():
    applicable, failures = 0, []
    worst_bound = 0.0
    for i, T in enumerate(main_corpus()[:100]):
        S = admissible_perturbation(item_rng(SEED, i), T)
        rep = check_sum_stability(T, S, n_samples=200, seed=i)
        if not rep.applicable:
            failures.append((i, rep.violated))
            continue
        applicable += 1
        failures.extend((i, k) for k, v in rep.verdicts.items() if not v.holds)
        if rep.bound > 0:
            worst_bound = max(worst_bound, rep.hus_sum / rep.bound)
    hand = check_sum_stability(from_graph(2 * np.eye(2)), from_graph(np.eye(2)))
    hand_ok = abs(hand.b_star - 0.5) <= 1e-12 and abs(hand.hus_sum - 1 / 3) <= 1e-12
    ok = not failures and applicable == 100 and hand_ok
    assert report(
        "C6 sum theorem",
        ok,
        f"{applicable}/100 admissible pairs, {len(failures)} violations, max M_(S+T)/(M_T/(1-b)) = {worst_bound:.4f}; "
        f"hand case b* = {hand.b_star:.12g}, M_(S+T) = {hand.hus_sum:.12g}",
    )


def test_c7_product_and_block():
    worst = 0.0
    for i in range(100):
        rng = item_rng(SEED + 1, i)
        dims = [int(v) for v in rng.integers(1, 6, size=4)]
        field = "complex" if i % 2 else "real"
        T = random_relation(rng, dims[0], dims[1], field)
        S = random_relation(rng, dims[2], dims[3], field)
        rep = check_product_stability(T, S)
        worst = max(worst, rel(rep.hus_product, max(rep.hus_T, rep.hus_S)))
    A = F = from_graph(np.array([[2.0]]))
    B = C = from_graph(np.array([[1.0]]))
    _, blk = block_matrix(A, B, C, F)
    block_ok = abs(blk.d - 0.5) <= 1e-12 and abs(blk.gamma_block - 1.0) <= 1e-12 and blk.certified
    ok = worst <= 1e-9 and block_ok
    assert report(
        "C7 product and block matrix",
        ok,
        f"100 pairs, M_(TxS) vs max(M_T, M_S) rel gap {worst:.1e} <= 1e-9; block d = {blk.d:.12g}, gamma = {blk.gamma_block:.12g}",
    )


def test_c8_truncation_probe():
    t0 = time.perf_counter()
    probe = truncation_probe(FamilySpec("diagonal", "1/i", (2, 64)))
    err = max(abs(g - 1 / n) / (1 / n) for n, g in zip(probe.sizes, probe.gammas))
    const = truncation_probe(FamilySpec("diagonal", "1", (2, 64)))
    elapsed = time.perf_counter() - t0
    ok = err <= 1e-12 and abs(probe.slope + 1) <= 0.05 and probe.trend == "degenerating" and const.trend == "stable" and elapsed < 10
    assert report(
        "C8 truncation probe",
        ok,
        f"harmonic n=2..64: gamma_n vs 1/n rel err {err:.1e} <= 1e-12, slope {probe.slope:.6f}, {probe.trend}; "
        f"constant family {const.trend}; {elapsed:.2f} s < 10 s",
    )


def _cli(*args) -> bytes:
    return subprocess.run([sys.executable, "-m", "relcalc.cli", *map(str, args)], capture_output=True, check=False).stdout


def test_c9_cli_determinism_and_round_trip():
    docs = sorted((FIXTURES / "relations").glob("*.json"))
    runs = [
        ("analyze", docs[0], "--format", "machine"),
        ("analyze", FIXTURES / "relations" / "complex_parts.json", "--format", "machine"),
        ("verify", "--random", 10, "--seed", 5, "--format", "machine"),
        ("probe", "--family", FIXTURES / "families" / "harmonic.json", "--format", "machine"),
        ("inverse", FIXTURES / "relations" / "partial_with_mulpart.json"),
    ]
    identical = all(_cli(*r) == _cli(*r) and _cli(*r) for r in runs)
    round_trips = 0
    for path in docs:
        T, _, _ = read_document(path)
        T2 = parse_document(json.loads(dumps_document(relation_to_document(T))))
        round_trips += relations_equal(T, T2)
    ok = identical and round_trips == len(docs) == 20
    assert report(
        "C9 CLI determinism and round-trip",
        ok,
        f"{len(runs)} commands byte-identical across runs: {identical}; round-trip equal on {round_trips}/{len(docs)} fixtures",
    )


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
