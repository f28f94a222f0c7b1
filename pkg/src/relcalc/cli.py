"""``relcalc`` command line: analysis, theorem suites, relation pipelines, probes.

Exit codes: 0 success (all verdicts hold), 1 a verdict failed, 2 input
error, 3 two independent numeric routes disagreed.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from numbers import Real

import numpy as np

from . import __version__
from .corpus import admissible_perturbation, corpus, item_rng, random_relation
from .decomposition import (
    DUAL_ROUTE_TOL,
    cogram,
    gamma,
    gram,
    hus_constant,
    quotient_operator_norm,
    regular_part,
    regular_part_by_composition,
    resolvent_contraction,
    resolvent_contraction_routes,
    z_transform,
    z_transform_parts,
)
from .documents import (
    DocumentError,
    digest,
    dumps_document,
    format_machine,
    format_text,
    load_json,
    read_document,
    relation_to_document,
)
from .errors import NumericalInconsistencyError
from .relation import (
    LinearRelation,
    adjoint,
    cartesian_product,
    compose,
    inverse,
    is_everywhere_defined,
    is_nonnegative,
    is_operator,
    is_selfadjoint,
    is_symmetric,
    minkowski_sum,
    relations_equal,
    scalar_mul,
    sum as relation_sum,
)
from .spectral import MATCH_TOL, gamma_identities, point_spectrum, verify_spectral_identity
from .stability import (
    RTOL,
    FamilySpec,
    Verdict,
    block_matrix,
    certify_hus,
    check_product_stability,
    check_sum_stability,
    truncation_probe,
    verify_algebra,
    verify_equivalences,
)

EXIT_OK, EXIT_VERDICT, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3
SUITES = ("algebra", "decomposition", "equivalences", "spectral", "hus", "sum", "product", "block")
MAX_LISTED_FAILURES = 50
DEFAULT_TOL_RULE = "default: 1e-10 * max(rows, cols), relative to the largest singular value"


class InputError(Exception):
    pass


def _corrupted_adjoint(T: LinearRelation) -> LinearRelation:
    # doubles the operator part, so applying it twice cannot return T
    return adjoint(scalar_mul(2.0, T))


# ------------------------------------------------------------------ suites


def _rel_close(name, a, b, rtol=RTOL) -> Verdict:
    if math.isinf(a) and math.isinf(b):
        return Verdict(True, 0.0, f"{name}: both infinite")
    scale = max(abs(a), abs(b))
    gap = 0.0 if scale == 0 else abs(a - b) / scale
    return Verdict(gap <= rtol, gap, f"{name}: {a:.12e} vs {b:.12e}")


def suite_decomposition(T: LinearRelation) -> dict[str, Verdict]:
    inv_route, proj_route = resolvent_contraction_routes(T)
    ct_err = float(np.abs(inv_route - proj_route).max(initial=0.0))
    _, zop, z_of_op = z_transform_parts(T)
    z_err = float(np.abs(zop - z_of_op).max(initial=0.0))
    z_norm = quotient_operator_norm(z_transform(T, check=False))
    g, M = gamma(T), hus_constant(T)
    recip = Verdict(M == 0.0, M, "T_op = 0") if math.isinf(g) else _rel_close("M_T * gamma", M * g, 1.0, 1e-10)
    return {
        "T_op=P_{M(T)perp}T": Verdict(
            relations_equal(regular_part(T).as_relation, regular_part_by_composition(T), RTOL), 0.0, "graph equality"
        ),
        "C_T=(I+T*T)^-1=P_T P_T*": Verdict(ct_err <= DUAL_ROUTE_TOL, ct_err, "inverse route vs projector block"),
        "(Z_T)_op=Z_{T_op}": Verdict(z_err <= DUAL_ROUTE_TOL, z_err, "both routes"),
        "|Z_T|<=1": Verdict(z_norm <= 1 + 1e-10, max(0.0, z_norm - 1), f"|Q Z_T| = {z_norm:.12e}"),
        "M_T*gamma=1": recip,
    }


def suite_spectral(T: LinearRelation) -> dict[str, Verdict]:
    rep = verify_spectral_identity(T)
    ids = gamma_identities(T)
    g2 = ids["gamma(T)^2"]
    out = {
        "sigma(T*T)-{0}=sigma(T*T|N(T)perp)-{0}": Verdict(
            bool(rep.identity_holds), rep.max_distance, f"tolerance {MATCH_TOL:.1e} * (1 + spectral radius)"
        )
    }
    for key in ("gamma(T*T)", "gamma_spectral(T*T)", "gamma(T*T|N(T)perp)", "gamma_spectral(T*T|N(T)perp)"):
        out[f"{key}=gamma(T)^2"] = _rel_close(key, ids[key], g2)
    return out


def suite_hus(T: LinearRelation, seed: int) -> dict[str, Verdict]:
    return certify_hus(T, n_samples=64, seed=seed).verdicts


def _hypothesis_verdict(name: str, violated: str | None) -> dict[str, Verdict]:
    return {f"{name}:inapplicable": Verdict(True, 0.0, f"hypothesis {violated} fails; nothing asserted")}


def suite_sum(T: LinearRelation, S: LinearRelation, seed: int) -> dict[str, Verdict]:
    rep = check_sum_stability(T, S, seed=seed)
    if not rep.applicable:
        return _hypothesis_verdict("sum", rep.violated)
    return rep.verdicts


def suite_product(T: LinearRelation, S: LinearRelation) -> dict[str, Verdict]:
    return check_product_stability(T, S).verdicts


def block_inputs(T: LinearRelation):
    """``A = T*T``, ``F = TT*``, ``C = (gamma/2) T``, ``B = (gamma/2) T*``; gives ``d = 1/2``."""
    g = gamma(T)
    c = 0.5 * g if math.isfinite(g) else 0.5
    return gram(T), scalar_mul(c, adjoint(T)), scalar_mul(c, T), cogram(T)


def suite_block(T: LinearRelation, seed: int) -> dict[str, Verdict]:
    _, rep = block_matrix(*block_inputs(T), seed=seed)
    if rep.violated is not None:
        out = dict(rep.verdicts)
        out.update(_hypothesis_verdict("block", rep.violated))
        return out
    return rep.verdicts


def run_suites(T: LinearRelation, suites, rng: np.random.Generator | None, seed: int, adjoint_fn=adjoint):
    """Verdicts per suite for one relation.

    Without ``rng`` the sum and product partners are derived from ``T``
    itself (``T/2`` and ``T``); with it they are drawn at random.
    """
    out: dict[str, dict[str, Verdict]] = {}
    for name in suites:
        if name == "algebra":
            out[name] = verify_algebra(T, adjoint_fn=adjoint_fn)
        elif name == "decomposition":
            out[name] = suite_decomposition(T)
        elif name == "equivalences":
            out[name] = verify_equivalences(T)
        elif name == "spectral":
            out[name] = suite_spectral(T)
        elif name == "hus":
            out[name] = suite_hus(T, seed)
        elif name == "sum":
            S = scalar_mul(0.5, T) if rng is None else admissible_perturbation(rng, T)
            out[name] = suite_sum(T, S, seed)
        elif name == "product":
            S = T if rng is None else random_relation(rng, int(rng.integers(1, 6)), int(rng.integers(1, 6)), T.field)
            out[name] = suite_product(T, S)
        elif name == "block":
            out[name] = suite_block(T, seed)
    return out


def _verdict_json(v: Verdict) -> dict:
    return {"holds": bool(v.holds), "margin": float(v.margin), "detail": v.detail}


# ---------------------------------------------------------------- commands


def _base_report(argv, data: bytes | None, tol, seed=None) -> dict:
    return {
        "command": list(argv),
        "input_digest": digest(data) if data is not None else None,
        "seed": seed,
        "tol": tol,
        "tool": "relcalc",
        "version": __version__,
    }


def _read(path, tol=None):
    try:
        return read_document(path, tol=tol)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    except DocumentError as exc:
        msg = str(exc) if exc.where.startswith(str(path)) else f"{path}: {exc}"
        raise InputError(msg) from None
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None


def _spectrum_json(T: LinearRelation) -> dict:
    rep = point_spectrum(T)
    return {
        "eigenvalues": list(rep.eigenvalues),
        "infinite_count": rep.infinite_count,
        "whole_plane": rep.whole_plane,
        "notes": rep.notes,
    }


def cmd_analyze(args, argv) -> tuple[dict, int]:
    T, _, data = _read(args.file, args.tol)
    D, R, N, M = T.part_dims
    resolvent_contraction(T)
    Z = z_transform(T, check=True)
    cert = certify_hus(T)
    results = {
        "dims": {"dim_H": T.dim_H, "dim_K": T.dim_K, "graph": T.graph.rank, "D": D, "R": R, "N": N, "M": M},
        "field": T.field,
        "gamma": cert.gamma,
        "hus_constant": cert.hus_constant,
        "quotient_norm": quotient_operator_norm(T),
        "z_transform_norm": quotient_operator_norm(Z),
        "flags": cert.flags,
        "predicates": {"operator": is_operator(T), "everywhere_defined": is_everywhere_defined(T)},
    }
    if T.dim_H == T.dim_K:
        results["predicates"].update(
            {"symmetric": is_symmetric(T), "selfadjoint": is_selfadjoint(T), "nonnegative": is_nonnegative(T)}
        )
        results["spectrum"] = _spectrum_json(T)
    rep = _base_report(argv, data, T.tol)
    rep["results"] = results
    rep["verdicts"] = {"hus": {k: _verdict_json(v) for k, v in cert.verdicts.items()}}
    code = EXIT_OK if cert.all_hold else EXIT_VERDICT
    return rep, code


def _selected_suites(name: str):
    return SUITES if name == "all" else (name,)


def cmd_verify(args, argv) -> tuple[dict, int]:
    suites = _selected_suites(args.suite)
    adjoint_fn = _corrupted_adjoint if args.inject_fault == "adjoint" else adjoint
    failures = []
    if args.random is not None:
        if args.file is not None:
            raise InputError("give either FILE or --random, not both")
        if args.random < 1 or args.max_dim < 1:
            raise InputError("--random and --max-dim must be positive")
        items = corpus(args.random, args.seed, args.max_dim, args.field)
        summary: dict[str, dict] = {}
        for i, T in enumerate(items):
            res = run_suites(T, suites, item_rng(args.seed, i), args.seed + i, adjoint_fn)
            for suite, verdicts in res.items():
                for vid, v in verdicts.items():
                    s = summary.setdefault(suite, {}).setdefault(vid, {"checked": 0, "failed": 0, "worst_margin": 0.0})
                    s["checked"] += 1
                    if not v.holds:
                        s["failed"] += 1
                        s["worst_margin"] = max(s["worst_margin"], float(v.margin))
                        failures.append({"item": i, "suite": suite, "id": vid, "margin": float(v.margin), "detail": v.detail})
        rep = _base_report(argv, None, DEFAULT_TOL_RULE, args.seed)
        rep["results"] = {"items": len(items), "max_dim": args.max_dim, "field": args.field}
        rep["verdicts"] = summary
    else:
        if args.file is None:
            raise InputError("verify needs FILE or --random N")
        T, _, data = _read(args.file, args.tol)
        res = run_suites(T, suites, None, args.seed, adjoint_fn)
        for suite, verdicts in res.items():
            for vid, v in verdicts.items():
                if not v.holds:
                    failures.append({"suite": suite, "id": vid, "margin": float(v.margin), "detail": v.detail})
        rep = _base_report(argv, data, T.tol, args.seed)
        rep["results"] = {"dims": dict(zip(("D", "R", "N", "M"), T.part_dims)), "gamma": gamma(T), "hus_constant": hus_constant(T)}
        rep["verdicts"] = {s: {k: _verdict_json(v) for k, v in vs.items()} for s, vs in res.items()}
    rep["failures"] = failures[:MAX_LISTED_FAILURES]
    rep["failure_count"] = len(failures)
    for f in failures[:MAX_LISTED_FAILURES]:
        where = f" item {f['item']}" if "item" in f else ""
        print(f"FAIL {f['suite']}: {f['id']}{where} margin {f['margin']:.3e}", file=sys.stderr)
    return rep, EXIT_VERDICT if failures else EXIT_OK


_BINARY = {
    "compose": compose,
    "sum": relation_sum,
    "minkowski": minkowski_sum,
    "product": cartesian_product,
}
_UNARY = {"adjoint": adjoint, "inverse": inverse}
_BINARY_HELP = {
    "compose": "composition A B, i.e. A after B",
    "sum": "operator sum A + B on D(A) ∩ D(B)",
    "minkowski": "componentwise sum of the graphs of A and B",
    "product": "Cartesian product A x B",
}


def cmd_operation(args, argv) -> tuple[str, int]:
    inputs = [_read(p, args.tol) for p in args.files]
    rels = [r for r, _, _ in inputs]
    fn = _BINARY.get(args.command) or _UNARY[args.command]
    try:
        result = fn(*rels)
    except ValueError as exc:
        raise InputError(f"{args.command}: {exc}") from None
    meta = {
        "operation": args.command,
        "inputs": [
            {"file": str(p), "digest": digest(data), "metadata": doc.get("metadata")}
            for p, (_, doc, data) in zip(args.files, inputs)
        ],
    }
    text = dumps_document(relation_to_document(result, meta))
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
        return "", EXIT_OK
    return text, EXIT_OK


def _parse_n_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split("..")
        return int(lo), int(hi)
    except ValueError:
        raise InputError(f"--n must look like LO..HI, got {text!r}") from None


def parse_family(doc, n_range=None) -> FamilySpec:
    if not isinstance(doc, dict):
        raise DocumentError("$", "family must be a JSON object")
    allowed = {"kind", "entry", "n_range", "bands", "mul_dim", "kernel_dim"}
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise DocumentError("$", f"unknown keys {unknown}")
    for key in ("kind", "entry"):
        if not isinstance(doc.get(key), str):
            raise DocumentError(key, "required string")
    if n_range is None:
        nr = doc.get("n_range")
        if not (isinstance(nr, list) and len(nr) == 2 and all(isinstance(v, int) and not isinstance(v, bool) for v in nr)):
            raise DocumentError("n_range", "expected [lo, hi] integers (or pass --n LO..HI)")
        n_range = tuple(nr)
    bands = doc.get("bands", {})
    if not isinstance(bands, dict) or not all(isinstance(v, str) for v in bands.values()):
        raise DocumentError("bands", "expected an object mapping offset to expression string")
    try:
        band_list = tuple(sorted((int(k), v) for k, v in bands.items()))
    except ValueError:
        raise DocumentError("bands", "offsets must be integers") from None
    extra = {}
    for key in ("mul_dim", "kernel_dim"):
        v = doc.get(key, 0)
        if isinstance(v, bool) or not isinstance(v, int):
            raise DocumentError(key, "expected an integer")
        extra[key] = v
    try:
        return FamilySpec(doc["kind"], doc["entry"], n_range, band_list, **extra)
    except ValueError as exc:
        raise DocumentError("$", str(exc)) from None


def cmd_probe(args, argv) -> tuple[dict, int]:
    try:
        with open(args.family, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"{args.family}: {exc.strerror}") from None
    n_range = _parse_n_range(args.n) if args.n else None
    try:
        fam = parse_family(load_json(data.decode("utf-8"), str(args.family)), n_range)
        probe = truncation_probe(fam)
    except (DocumentError, ValueError, UnicodeDecodeError) as exc:
        raise InputError(f"{args.family}: {exc}") from None
    rows = [{"n": n, "gamma": g, "M": m} for n, g, m in zip(probe.sizes, probe.gammas, probe.hus_constants)]
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "gamma", "M"])
            for r in rows:
                w.writerow([r["n"], "%.12e" % r["gamma"], "%.12e" % r["M"]])
    rep = _base_report(argv, data, DEFAULT_TOL_RULE)
    rep["results"] = {
        "family": {"kind": fam.kind, "entry": fam.entry, "n_range": list(fam.n_range)},
        "rows": rows,
        "slope": probe.slope,
        "r_squared": probe.r_squared,
        "tail_slope": probe.tail_slope,
        "trend": probe.trend,
        "rule": probe.rule,
    }
    rep["verdicts"] = {}
    return rep, EXIT_OK


# ------------------------------------------------------------------ parser


def _tol(text: str) -> float:
    v = float(text)
    if not (isinstance(v, Real) and 0 <= v < 1):
        raise argparse.ArgumentTypeError("tol must be in [0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="relcalc", description="Linear relations and Hyers-Ulam stability.")
    p.add_argument("--version", action="version", version=f"relcalc {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("text", "machine"), default="text")

    a = sub.add_parser("analyze", help="parts, gamma, M_T, predicates and spectrum of one relation")
    a.add_argument("file")
    a.add_argument("--tol", type=_tol)
    fmt(a)

    v = sub.add_parser("verify", help="run theorem suites on a file or a seeded random corpus")
    v.add_argument("file", nargs="?")
    v.add_argument("--suite", choices=("all",) + SUITES, default="all")
    v.add_argument("--random", type=int, metavar="N")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--max-dim", type=int, default=8)
    v.add_argument("--field", choices=("real", "complex", "both"), default="both")
    v.add_argument("--tol", type=_tol)
    v.add_argument("--inject-fault", choices=("adjoint",), help=argparse.SUPPRESS)
    fmt(v)

    for name in _BINARY:
        sp = sub.add_parser(name, help=_BINARY_HELP[name])
        sp.add_argument("files", nargs=2, metavar="FILE")
        sp.add_argument("-o", "--output")
        sp.add_argument("--tol", type=_tol)
    for name in _UNARY:
        sp = sub.add_parser(name, help=f"{name} of a relation")
        sp.add_argument("files", nargs=1, metavar="FILE")
        sp.add_argument("-o", "--output")
        sp.add_argument("--tol", type=_tol)

    pr = sub.add_parser("probe", help="gamma and M_T along a truncation family")
    pr.add_argument("--family", required=True)
    pr.add_argument("--n", metavar="LO..HI")
    pr.add_argument("--csv")
    fmt(pr)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        if args.command == "analyze":
            rep, code = cmd_analyze(args, argv)
        elif args.command == "verify":
            rep, code = cmd_verify(args, argv)
        elif args.command == "probe":
            rep, code = cmd_probe(args, argv)
        else:
            text, code = cmd_operation(args, argv)
            sys.stdout.write(text)
            return code
    except InputError as exc:
        print(f"relcalc: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalInconsistencyError as exc:
        print(f"relcalc: numerical inconsistency: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(format_machine(rep) if args.format == "machine" else format_text(rep))
    return code


if __name__ == "__main__":
    sys.exit(main())
