"""Command-line driver.

::

    mehler verify --family gcmf --shifts 1,1,1 --order 4 --format json
    mehler bench --shifts 1,1,1
    mehler bargmann-check --nodes 64

Exit codes: 0 when everything matched or stayed within tolerance, 1 on a
mathematical mismatch or tolerance violation, 2 on a usage or configuration
error, 3 when a resource budget ran out before a verdict was reached.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from . import __version__
from .errors import BudgetError, MehlerError
from .identities import (
    CAYLEY_CORNERS,
    FAMILIES,
    SHIFT_LENGTH,
    Budget,
    IdentityInstance,
    cayley_sides,
    variant_names,
    verify_identity,
)
from .poly import format_poly, grlex_key

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

MAX_ORDER = 16
MAX_SHIFT = 8
THEOREM_MATRICES = 10
THEOREM_MAX_SHIFT = 3

DEFAULT_ORDERS = {
    "mehler": 10,
    "carlitz-bilinear": 8,
    "carlitz-trilinear": 6,
    "srivastava": 5,
    "gcmf": 4,
    "cayley": 6,
}
SWEEP_MAX_SHIFT = {"carlitz-bilinear": 3, "srivastava": 2, "gcmf": 2}
SELECTABLE = FAMILIES + ("theorem", "cayley", "all")


class UsageError(Exception):
    pass


# -- tasks (module level so worker processes can import them) ---------------


def _budget(cfg: dict) -> Budget:
    return Budget(cfg.get("budget_terms"), cfg.get("budget_seconds"))


def _identity_task(args) -> dict:
    family, shifts, order, variant, cfg = args
    inst = IdentityInstance(family, tuple(shifts), order, variant)
    try:
        rep = verify_identity(inst, _budget(cfg))
    except BudgetError as exc:
        partial = exc.partial
        out = partial.to_dict(cfg["timings"]) if partial is not None else {
            "family": family, "shifts": list(shifts), "order": order, "variants": []}
        out["budget_exceeded"] = str(exc)
        out["elapsed_ms"] = 0
        return out
    return rep.to_dict(cfg["timings"])


def _cayley_task(args) -> dict:
    order, variant, cfg = args
    start = time.perf_counter()
    variants = []
    for corner in CAYLEY_CORNERS if variant is None else (variant,):
        lhs, rhs = cayley_sides(order, corner)
        bad = [(i, j) for i in range(3) for j in range(3) if lhs[i][j] != rhs[i][j]]
        entry = {"name": f"corner={corner}", "matched": not bad}
        if bad:
            i, j = bad[0]
            a, b = lhs[i][j], rhs[i][j]
            ka, kb = a.coeffs, b.coeffs
            e = min((k for k in set(ka) | set(kb) if ka.get(k) != kb.get(k)), key=grlex_key)
            entry["first_mismatch"] = {
                "entry": [i + 1, j + 1],
                "u_exponent": list(e),
                "lhs": format_poly(a.coefficient(e)),
                "rhs": format_poly(b.coefficient(e)),
            }
        variants.append(entry)
    elapsed = time.perf_counter() - start
    matched = [v["name"] for v in variants if v["matched"]]
    return {
        "family": "cayley",
        "shifts": [],
        "order": order,
        "matched_variant": matched[0] if matched else None,
        "variants": variants,
        "elapsed_ms": round(elapsed * 1000, 3) if cfg["timings"] else 0,
    }


THEOREM_VARIANTS = [("index-shifted", "full"), ("index-shifted", "lambda"),
                    ("as-written", "full"), ("as-written", "lambda")]


def _theorem_name(index: str, index_set: str) -> str:
    return f"index={index}; range={index_set}"


def _theorem_task(args) -> dict:
    from .theorem import creation_chain_lhs, matrix_family, theorem_rhs

    d, m, r, seed, variant, cfg = args
    start = time.perf_counter()
    C = matrix_family(d, THEOREM_MATRICES, seed)[m]
    lhs = creation_chain_lhs(C, r).P
    variants = []
    for index, index_set in THEOREM_VARIANTS:
        name = _theorem_name(index, index_set)
        if variant is not None and name != variant:
            continue
        rhs = theorem_rhs(C, r, index, index_set).P
        entry = {"name": name, "matched": rhs == lhs}
        if rhs != lhs:
            diff = lhs - rhs
            e = next(iter(diff.terms))
            entry["first_mismatch"] = {
                "x_exponent": list(e),
                "lhs": format_poly(type(lhs).constant(lhs.coefficient(e), d)),
                "rhs": format_poly(type(lhs).constant(rhs.coefficient(e), d)),
            }
        variants.append(entry)
    elapsed = time.perf_counter() - start
    matched = [v["name"] for v in variants if v["matched"]]
    return {
        "family": "theorem",
        "shifts": list(r),
        "order": None,
        "matrix": m,
        "matched_variant": matched[0] if matched else None,
        "variants": variants,
        "elapsed_ms": round(elapsed * 1000, 3) if cfg["timings"] else 0,
    }


def _run(fn, tasks: list, workers: int) -> list[dict]:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


# -- verify -------------------------------------------------------------------


def _family_shift_sweep(family: str) -> list[tuple[int, ...]]:
    n = SHIFT_LENGTH[family]
    if n == 0:
        return [()]
    top = SWEEP_MAX_SHIFT[family]
    return list(itertools.product(range(top + 1), repeat=n))


def _verify_tasks(cfg: dict) -> list[tuple]:
    fam = cfg["family"]
    families = [f for f in SELECTABLE if f != "all"] if fam == "all" else [fam]
    variant = cfg["variant"]
    jobs = []
    for f in families:
        order = cfg["order"] if cfg["order"] is not None else DEFAULT_ORDERS.get(f)
        if f == "cayley":
            if variant is not None and variant not in [f"corner={c}" for c in CAYLEY_CORNERS]:
                raise UsageError(f"unknown cayley variant {variant!r}")
            jobs.append((_cayley_task, (order, None if variant is None else variant.split("=", 1)[1], cfg)))
        elif f == "theorem":
            if variant is not None and variant not in [_theorem_name(*v) for v in THEOREM_VARIANTS]:
                raise UsageError(f"unknown theorem variant {variant!r}")
            for d in (2, 3):
                for r in itertools.product(range(THEOREM_MAX_SHIFT + 1), repeat=d):
                    for m in range(THEOREM_MATRICES):
                        jobs.append((_theorem_task, (d, m, r, cfg["seed"], variant, cfg)))
        else:
            if variant is not None and variant not in variant_names(f):
                raise UsageError(f"unknown variant {variant!r} for family {f}")
            if cfg["shifts"] is not None:
                if len(cfg["shifts"]) != SHIFT_LENGTH[f]:
                    raise UsageError(f"{f} takes {SHIFT_LENGTH[f]} shifts, got {len(cfg['shifts'])}")
                sweep = [tuple(cfg["shifts"])]
            else:
                sweep = _family_shift_sweep(f)
            for s in sweep:
                jobs.append((_identity_task, (f, s, order, variant, cfg)))
    return jobs


def _dispatch(jobs: list[tuple], workers: int) -> list[dict]:
    """Run jobs grouped by task function, returning results in job order."""
    out: list = [None] * len(jobs)
    by_fn: dict = {}
    for i, (fn, arg) in enumerate(jobs):
        by_fn.setdefault(fn, []).append((i, arg))
    for fn, items in by_fn.items():
        results = _run(fn, [a for _, a in items], workers)
        for (i, _), res in zip(items, results):
            out[i] = res
    return out


def _consistent(instances: list[dict]) -> dict[str, list[str]]:
    fams: dict[str, list[dict]] = {}
    for inst in instances:
        fams.setdefault(inst["family"], []).append(inst)
    out = {}
    for fam, items in fams.items():
        names = [v["name"] for v in items[0]["variants"]]
        out[fam] = [n for n in names if all(
            any(v["name"] == n and v["matched"] for v in it["variants"]) for it in items)]
    return out


def cmd_verify(cfg: dict) -> tuple[int, dict]:
    jobs = _verify_tasks(cfg)
    instances = _dispatch(jobs, cfg["workers"])
    exceeded = sum(1 for i in instances if "budget_exceeded" in i)
    unmatched = sum(1 for i in instances if "budget_exceeded" not in i and i["matched_variant"] is None)
    summary = {
        "instances": len(instances),
        "matched": len(instances) - unmatched - exceeded,
        "unmatched": unmatched,
        "budget_exceeded": exceeded,
        "consistent_variants": _consistent(instances),
    }
    code = EXIT_BUDGET if exceeded else (EXIT_MISMATCH if unmatched else EXIT_OK)
    return code, {"command": "verify", "config": _public(cfg), "instances": instances, "summary": summary}


# -- bench ----------------------------------------------------------------------


def cmd_bench(cfg: dict) -> tuple[int, dict]:
    from .bench import bench_point, default_points
    from .errors import DivergenceError

    if cfg["x"] is not None or cfg["u"] is not None or cfg["shifts"] is not None:
        x = tuple(cfg["x"]) if cfg["x"] is not None else (1.0, 1.0, 1.0)
        u = tuple(cfg["u"]) if cfg["u"] is not None else (0.05, 0.05, 0.05)
        r = tuple(cfg["shifts"]) if cfg["shifts"] is not None else (1, 1, 1)
        if len(x) != 3 or len(u) != 3 or len(r) != 3:
            raise UsageError("bench points need three x, u and shift entries")
        points = [(x, u, r)]
    else:
        points = default_points()
    n_terms = cfg["budget_terms"] or 40
    results, skipped = [], []
    for x, u, r in points:
        try:
            results.append(bench_point(x, u, r, n_terms).to_dict(cfg["timings"]))
        except DivergenceError as exc:
            skipped.append({"x": list(x), "u": list(u), "r": list(r), "warning": f"divergence: {exc}"})
    tol = cfg["tolerance"] if cfg["tolerance"] is not None else 1e-10
    worst = max((b["rel_diff"] for b in results), default=0.0)
    summary = {
        "points": len(results),
        "skipped": len(skipped),
        "max_rel_diff": worst,
        "tolerance": tol,
        "naive_seconds": sum(b["naive_seconds"] for b in results),
        "closed_seconds": sum(b["closed_seconds"] for b in results),
    }
    code = EXIT_MISMATCH if worst > tol else EXIT_OK
    return code, {"command": "bench", "config": _public(cfg), "instances": results,
                  "skipped": skipped, "summary": summary}


# -- bargmann-check -------------------------------------------------------------


def _bargmann_checks(nodes: int, tol: float, inverse_tol: float) -> list[dict]:
    from gmpy2 import mpq

    from . import bargmann as bg

    q = bg.QuadratureSpec(nodes)
    q2 = bg.QuadratureSpec(2 * nodes)
    checks = []

    def add(name, value, tolerance, **details):
        checks.append({"name": name, "value": float(value), "tolerance": tolerance,
                       "passed": bool(value < tolerance), **details})

    re, im = np.meshgrid(np.linspace(-2, 2, 9), np.linspace(-2, 2, 9))
    grid = (re + 1j * im).ravel()
    grid = grid[np.abs(grid) <= 2]
    err, drift = 0.0, 0.0
    for n in range(7):
        f = bg.dilated_hermite(n)
        vals = bg.bargmann_many(f, grid[:, None], q)
        err = max(err, float(np.max(np.abs(vals - grid**n / math.sqrt(math.factorial(n))))))
        drift = max(drift, float(np.max(np.abs(vals - bg.bargmann_many(f, grid[:, None], q2)))))
    add("basis-image", err, tol, functions="h0..h6", grid="|w| <= 2")
    add("node-doubling", drift, min(tol, 1e-10), nodes=[nodes, 2 * nodes])

    mats = {
        1: [[mpq(1, 2)]],
        2: [[mpq(1), mpq(1, 5)], [mpq(1, 5), mpq(1, 2)]],
        3: [[mpq(1, 2), mpq(1, 10), 0], [mpq(1, 10), mpq(1, 4), mpq(-1, 10)], [0, mpq(-1, 10), mpq(3, 10)]],
    }
    err = 0.0
    for d, A in mats.items():
        g = bg.gaussian_function(A)
        Af = [[float(v) for v in row] for row in A]
        qd = bg.QuadratureSpec(nodes, d)
        for z in ([0.0] * d, [0.7] * d, [0.5 + 0.5j] + [-0.4] * (d - 1), [-1.0 + 0.3j] * d):
            err = max(err, abs(bg.bargmann_quadrature(g, z, qd) - bg.bargmann_gaussian_closed(Af, z)))
    add("gaussian-lemma", err, tol, dimensions=[1, 2, 3])

    probes = [bg.image_constant_probe(f, 1, q=q) for f in
              (bg.dilated_hermite(0), bg.dilated_hermite(3), bg.gaussian_function([[1]]))]
    g2 = bg.gaussian_function([[mpq(1), mpq(1, 4)], [mpq(1, 4), mpq(3, 2)]])
    probes.append(bg.image_constant_probe(g2, 2, q=q, base=[0.3, 0.0]))
    constants = [p.constant for p in probes]
    spread = max(constants) - min(constants)
    add("image-constant", max(max(p.residual for p in probes), spread), tol,
        constant=float(np.mean(constants)), constants=constants,
        residuals=[p.residual for p in probes])

    err = bg.decomposition_check([bg.dilated_hermite(0)] * 2, [0, 0], q)
    for z in ([0.3, -0.5], [0.5 + 0.2j, 1.0], [-1.2, 0.4 - 0.6j]):
        err = max(err, bg.decomposition_check([bg.dilated_hermite(1), bg.dilated_hermite(2)], z, q))
    add("decomposition", err, tol)

    trips = [bg.inverse_roundtrip(bg.dilated_hermite(0), 0.0, q=q)]
    trips += [bg.inverse_roundtrip(bg.dilated_hermite(1), x, q=q) for x in np.linspace(-2, 2, 9)]
    add("inverse-roundtrip", max(t.discrepancy for t in trips), inverse_tol,
        radius=trips[0].radius, truncation=max(t.radius_sensitivity for t in trips))

    x, u = (0.4, -0.2, 0.1), (0.05, 0.03, 0.02)
    shifts = [(0, 0, 0), (1, 1, 0), (2, 1, 1), (0, 2, 1)]
    per_power = {}
    for power in bg.POWER_VARIANTS:
        worst = 0.0
        for r in shifts:
            a, b = bg.gcmf_path_b(x, u, r, 30, power)
            worst = max(worst, abs(a - b))
        per_power[power] = worst
    agreeing = [p for p, e in per_power.items() if e < tol]
    value = min(per_power.values()) if len(agreeing) == 1 else math.inf
    checks.append({"name": "gcmf-path-b", "value": value, "tolerance": tol,
                   "passed": len(agreeing) == 1 and value < tol,
                   "errors": per_power, "matched_power": agreeing[0] if len(agreeing) == 1 else None})
    return checks


def cmd_bargmann_check(cfg: dict) -> tuple[int, dict]:
    tol = cfg["tolerance"] if cfg["tolerance"] is not None else 1e-8
    checks = _bargmann_checks(cfg["nodes"], tol, cfg["inverse_tolerance"])
    failed = [c["name"] for c in checks if not c["passed"]]
    summary = {"checks": len(checks), "failed": failed}
    return (EXIT_MISMATCH if failed else EXIT_OK), {
        "command": "bargmann-check", "config": _public(cfg), "instances": checks, "summary": summary}


# -- output ---------------------------------------------------------------------


def dump_json(report: dict) -> str:
    """Canonical JSON: two-space indent, insertion order, trailing newline."""
    return json.dumps(report, indent=2, ensure_ascii=False, allow_nan=True) + "\n"


def _text_verify(report: dict) -> str:
    lines = []
    for inst in report["instances"]:
        tag = inst["family"]
        if inst["shifts"]:
            tag += " r=(" + ",".join(map(str, inst["shifts"])) + ")"
        if inst.get("matrix") is not None:
            tag += f" matrix={inst['matrix']}"
        if inst["order"] is not None:
            tag += f" N={inst['order']}"
        if "budget_exceeded" in inst:
            lines.append(f"{tag}: BUDGET EXCEEDED ({inst['budget_exceeded']})")
            continue
        matched = [v["name"] for v in inst["variants"] if v["matched"]]
        lines.append(f"{tag}: " + (f"matched [{' | '.join(matched)}]" if matched else "NO MATCH"))
        for v in inst["variants"]:
            if not v["matched"] and "first_mismatch" in v:
                fm = v["first_mismatch"]
                where = fm.get("u_exponent", fm.get("x_exponent"))
                lines.append(f"  {v['name']}: first mismatch at {tuple(where)}: lhs {fm['lhs']} vs rhs {fm['rhs']}")
    s = report["summary"]
    lines.append(f"summary: {s['matched']}/{s['instances']} matched, {s['unmatched']} unmatched, "
                 f"{s['budget_exceeded']} over budget")
    for fam, names in s["consistent_variants"].items():
        lines.append(f"  {fam}: consistent readings: " + (" | ".join(names) if names else "none"))
    return "\n".join(lines) + "\n"


def _text_bench(report: dict) -> str:
    lines = []
    for b in report["instances"]:
        lines.append(f"r={tuple(b['r'])} x={tuple(b['x'])} u={tuple(b['u'])}: naive {b['naive']:.15g} "
                     f"({b['terms']} terms, {b['naive_seconds']:.3g}s) closed {b['closed']:.15g} "
                     f"({b['closed_seconds']:.3g}s) rel diff {b['rel_diff']:.3g}")
    for s in report["skipped"]:
        lines.append(f"warning: r={tuple(s['r'])} u={tuple(s['u'])} skipped, {s['warning']}")
    s = report["summary"]
    lines.append(f"summary: {s['points']} points, {s['skipped']} skipped, max rel diff {s['max_rel_diff']:.3g} "
                 f"(tolerance {s['tolerance']:.3g})")
    return "\n".join(lines) + "\n"


def _text_bargmann(report: dict) -> str:
    lines = []
    for c in report["instances"]:
        status = "ok" if c["passed"] else "FAIL"
        extra = ""
        if c["name"] == "image-constant":
            extra = f" constant={c['constant']:.12g}"
        elif c["name"] == "inverse-roundtrip":
            extra = f" radius={c['radius']} truncation={c['truncation']:.3g}"
        elif c["name"] == "gcmf-path-b":
            extra = f" power={c['matched_power']}"
        lines.append(f"{c['name']}: {status} value={c['value']:.3g} tolerance={c['tolerance']:.3g}{extra}")
    failed = report["summary"]["failed"]
    lines.append("summary: all checks within tolerance" if not failed else f"summary: failed {', '.join(failed)}")
    return "\n".join(lines) + "\n"


# -- argument handling ------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mehler", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized matrix families")
        p.add_argument("--budget-terms", type=int, default=None,
                       help="verify: max stored series terms; bench: naive terms per summation index")
        p.add_argument("--budget-seconds", type=float, default=None, help="wall-time cap per instance")
        p.add_argument("--nodes", type=int, default=64, help="Gauss-Hermite nodes per axis")
        p.add_argument("--tolerance", type=float, default=None)
        p.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
        p.add_argument("--no-timings", action="store_true", help="report zero elapsed times for reproducible output")
        p.add_argument("--shifts", type=_int_list, default=None, help="comma-separated shift vector")
        p.add_argument("--order", type=int, default=None, help="truncation order")
        p.add_argument("--variant", default="all", help="variant name or 'all'")
        p.add_argument("--family", choices=SELECTABLE, default="all")

    pv = sub.add_parser("verify", help="exact verification of the identities")
    common(pv)
    pb = sub.add_parser("bench", help="naive triple sum against the closed form in floating point")
    common(pb)
    pb.add_argument("--x", type=_float_list, default=None, help="x point, comma-separated")
    pb.add_argument("--u", type=_float_list, default=None, help="u point, comma-separated")
    pc = sub.add_parser("bargmann-check", help="quadrature checks of the Bargmann transform")
    common(pc)
    pc.add_argument("--inverse-tolerance", type=float, default=1e-4,
                    help="tolerance for the truncated inverse-transform round trip")
    return parser


def _config(args: argparse.Namespace) -> dict:
    if args.order is not None and not 0 <= args.order <= MAX_ORDER:
        raise UsageError(f"order must lie in 0..{MAX_ORDER}")
    if args.shifts is not None and any(not 0 <= s <= MAX_SHIFT for s in args.shifts):
        raise UsageError(f"shifts must lie in 0..{MAX_SHIFT}")
    if args.budget_terms is not None and args.budget_terms <= 0:
        raise UsageError("term budget must be positive")
    if args.budget_seconds is not None and args.budget_seconds <= 0:
        raise UsageError("time budget must be positive")
    if args.nodes < 16:
        raise UsageError("at least 16 quadrature nodes per axis are required")
    if args.tolerance is not None and not args.tolerance > 0:
        raise UsageError("tolerance must be positive")
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    if workers < 1:
        raise UsageError("workers must be positive")
    if args.command == "verify" and args.family != "all" and args.shifts is not None \
            and args.family in SHIFT_LENGTH and len(args.shifts) != SHIFT_LENGTH[args.family]:
        raise UsageError(f"{args.family} takes {SHIFT_LENGTH[args.family]} shifts")
    cfg = {
        "command": args.command,
        "family": args.family,
        "shifts": args.shifts,
        "order": args.order,
        "variant": None if args.variant == "all" else args.variant,
        "format": args.format,
        "seed": args.seed,
        "budget_terms": args.budget_terms,
        "budget_seconds": args.budget_seconds,
        "nodes": args.nodes,
        "tolerance": args.tolerance,
        "workers": workers,
        "timings": not args.no_timings,
        "x": getattr(args, "x", None),
        "u": getattr(args, "u", None),
        "inverse_tolerance": getattr(args, "inverse_tolerance", None),
    }
    if cfg["inverse_tolerance"] is not None and not cfg["inverse_tolerance"] > 0:
        raise UsageError("inverse tolerance must be positive")
    return cfg


def _public(cfg: dict) -> dict:
    """Configuration echoed in reports; the worker count does not affect results."""
    return {k: v for k, v in cfg.items() if k not in ("workers", "format") and v is not None}


COMMANDS = {"verify": (cmd_verify, _text_verify), "bench": (cmd_bench, _text_bench),
            "bargmann-check": (cmd_bargmann_check, _text_bargmann)}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        run, text = COMMANDS[cfg["command"]]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            code, report = run(cfg)
    except (UsageError, ValueError, MehlerError) as exc:
        print(f"mehler: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(dump_json(report) if cfg["format"] == "json" else text(report))
    return code


if __name__ == "__main__":
    sys.exit(main())
