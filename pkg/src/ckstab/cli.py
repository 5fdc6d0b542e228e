"""Command-line front end.

Subcommands: analyze (bound hierarchy plus verdict on a model file),
simulate (stochastic path to CSV), skeleton (sampled contraction scan of
the deterministic part), canonicalize (write the reduced form back out),
and reproduce (recompute a bundled benchmark suite against its reference
values).  Randomized commands require an explicit --seed; nothing is seeded
from the clock.  Exit codes for analyze: 0 certified ergodic, 2 evidence of
explosiveness, 3 inconclusive, 1 any error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .lyapunov import bound_by_bisection, certificate_to_dict
from .model import (
    CoherenceError,
    build_regime_system,
    canonical_to_dict,
    canonicalize,
    load_model,
)
from .reference import (
    EXPLOSIVE_REFERENCE,
    MONETARY_ROWS,
    REPRODUCE_SUITES,
    UNIVARIATE_ROWS,
    explosive_model,
    monetary_row_model,
    univariate_model,
)
from .simulate import (
    classify_bounds,
    simulate_cksvar,
    skeleton_stability_scan,
    trajectory_to_csv,
)
from .spectral import jsr_lower_bound, jsr_upper_bound_norm, spectral_radius

SCHEMA_VERSION = 1
_REFERENCE_TOL = 0.02

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXPLOSIVE = 2
EXIT_INCONCLUSIVE = 3


def _bound_dict(bound) -> dict:
    return {
        "method": bound.method,
        "value": bound.value,
        "depth_or_degree": bound.depth_or_degree,
        "witness": list(bound.witness) if isinstance(bound.witness, tuple) else bound.witness,
        "truncated": bound.truncated,
    }


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _fmt(v: float) -> str:
    return f"{v:.6f}"


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args) -> int:
    model = load_model(args.model)
    cm = canonicalize(model)
    system = build_regime_system(cm)
    methods = args.method.split(",") if args.method else ["jsr", "cjsr", "rjsr"]
    for m in methods:
        if m not in ("jsr", "cjsr", "rjsr"):
            raise ValueError(f"unknown method {m!r}; choose from jsr,cjsr,rjsr")

    report_methods: dict = {}
    evidence = []
    certificates: dict = {}
    lower_constrained = jsr_lower_bound(system, args.depth, constrained=True)
    evidence.append(lower_constrained)
    for mode in ("jsr", "cjsr", "rjsr"):
        if mode not in methods:
            continue
        block: dict = {"depth": args.depth, "degree": args.degree}
        if mode == "jsr":
            lower = jsr_lower_bound(system, args.depth, constrained=False)
            upper_norm = jsr_upper_bound_norm(system, args.depth, constrained=False)
        else:
            lower = lower_constrained
            upper_norm = (
                jsr_upper_bound_norm(system, args.depth, constrained=True)
                if mode == "cjsr"
                else None
            )
        block["lower"] = _bound_dict(lower)
        block["upper_norm"] = _bound_dict(upper_norm) if upper_norm else None
        certified, cert = bound_by_bisection(
            system, mode, degree=args.degree, tol=args.tol
        )
        block["upper_certified"] = _bound_dict(certified)
        block["witness"] = certified.witness
        certificates[str(certified.witness)] = certificate_to_dict(cert)
        report_methods[mode] = block
        evidence.extend(b for b in (lower, upper_norm, certified) if b is not None)

    status = classify_bounds(evidence, args.tol)
    coh = cm.coherence
    report = {
        "schema": SCHEMA_VERSION,
        "model": args.model,
        "coherence": {
            "det_plus": coh.det_plus,
            "det_minus": coh.det_minus,
            "coherent": coh.coherent,
            "normalized": coh.normalized,
            "row_order": list(coh.row_order),
            "y_sign": coh.y_sign,
        },
        "methods": report_methods,
        "verdict": {
            "status": status,
            "tol": args.tol,
            "constrained_lower": max(
                (b.value for b in evidence if b.method == "cjsr_lower"), default=0.0
            ),
            "best_certified_upper": min(
                b.value for b in evidence if not b.method.endswith("lower")
            ),
        },
        "certificates": certificates,
    }

    if args.format == "csv":
        lines = ["method,value,depth_or_degree,truncated"]
        for b in evidence:
            lines.append(f"{b.method},{_fmt(b.value)},{b.depth_or_degree},{b.truncated}")
        lines.append(f"verdict,{status},,")
        _write("\n".join(lines) + "\n", args.out)
    else:
        _write(json.dumps(report, indent=2) + "\n", args.out)

    return {
        "ergodic_certified": EXIT_OK,
        "explosive_evidence": EXIT_EXPLOSIVE,
        "inconclusive": EXIT_INCONCLUSIVE,
    }[status]


# ---------------------------------------------------------------------------
# simulate / skeleton / canonicalize


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise ValueError("simulate requires --seed (no wall-clock defaults)")
    model = load_model(args.model)
    traj = simulate_cksvar(model, T=args.horizon, seed=args.seed)
    text = trajectory_to_csv(traj, include_shocks=args.include_shocks)
    _write(text, args.out)
    return EXIT_OK


def cmd_skeleton(args) -> int:
    if args.seed is None:
        raise ValueError("skeleton requires --seed (no wall-clock defaults)")
    model = load_model(args.model)
    system = build_regime_system(canonicalize(model))
    report = skeleton_stability_scan(
        system, grid_size=args.grid_size, M=args.steps, r=args.ratio, seed=args.seed
    )
    payload = {
        "schema": SCHEMA_VERSION,
        "grid_size": report.grid_size,
        "steps": report.steps,
        "contraction_ratio": report.contraction_ratio,
        "max_terminal_ratio": report.max_terminal_ratio,
        "verdict": report.verdict,
        "heuristic": report.heuristic,
    }
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    model = load_model(args.model)
    cm = canonicalize(model, partially_observed=args.partially_observed)
    payload = {"schema": SCHEMA_VERSION}
    payload.update(canonical_to_dict(cm))
    _write(json.dumps(payload, indent=2) + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# reproduce


def _reproduce_table1(degree: int, tol: float) -> str:
    lines = ["chi,theta,psi,reference_jsr,computed_jsr"]
    matches = 0
    for chi, theta, psi, ref in MONETARY_ROWS:
        system = build_regime_system(canonicalize(monetary_row_model(chi, theta, psi)))
        bound, _ = bound_by_bisection(system, "jsr", degree=degree, tol=tol)
        matches += abs(bound.value - ref) <= _REFERENCE_TOL
        lines.append(f"{chi},{theta},{psi},{_fmt(ref)},{_fmt(bound.value)}")
    lines.append(f"summary,{matches},{len(MONETARY_ROWS)},,")
    return "\n".join(lines) + "\n"


def _reproduce_table2(degree: int, tol: float) -> str:
    header = (
        "phi1_plus,phi1_minus,phi2_plus,phi2_minus,"
        "reference_jsr,computed_jsr,reference_cjsr,computed_cjsr,"
        "reference_rjsr,computed_rjsr"
    )
    lines = [header]
    matches = 0
    total = 0
    for p1p, p1m, p2p, p2m, ref_j, ref_c, ref_r in UNIVARIATE_ROWS:
        system = build_regime_system(canonicalize(univariate_model(p1p, p1m, p2p, p2m)))
        computed = []
        for mode, ref in (("jsr", ref_j), ("cjsr", ref_c), ("rjsr", ref_r)):
            bound, _ = bound_by_bisection(system, mode, degree=degree, tol=tol)
            computed.append((ref, bound.value))
            matches += abs(bound.value - ref) <= _REFERENCE_TOL
            total += 1
        cells = [str(v) for v in (p1p, p1m, p2p, p2m)]
        for ref, val in computed:
            cells += [_fmt(ref), _fmt(val)]
        lines.append(",".join(cells))
    lines.append(f"summary,{matches},{total}" + "," * 7)
    return "\n".join(lines) + "\n"


def _reproduce_example3(degree: int, tol: float) -> str:
    model = explosive_model()
    system = build_regime_system(canonicalize(model))
    radius_plus = spectral_radius(system.companion["+"])
    radius_minus = spectral_radius(system.companion["-"])
    jsr_bound, _ = bound_by_bisection(system, "jsr", degree=degree, tol=tol)
    lower = jsr_lower_bound(system, 2, constrained=True)
    rows = [
        ("radius_plus", EXPLOSIVE_REFERENCE["radius_plus"], radius_plus),
        ("radius_minus", EXPLOSIVE_REFERENCE["radius_minus"], radius_minus),
        ("jsr_upper", EXPLOSIVE_REFERENCE["jsr_upper"], jsr_bound.value),
    ]
    lines = ["quantity,reference,computed"]
    matches = 0
    for name, ref, val in rows:
        matches += abs(val - ref) <= _REFERENCE_TOL
        lines.append(f"{name},{_fmt(ref)},{_fmt(val)}")
    lines.append(f"jsr_lower_depth2,,{_fmt(lower.value)}")
    lines.append(f"summary,{matches},{len(rows)}")
    return "\n".join(lines) + "\n"


def cmd_reproduce(args) -> int:
    if args.suite == "table1":
        text = _reproduce_table1(args.degree, args.tol)
    elif args.suite == "table2":
        text = _reproduce_table2(args.degree, args.tol)
    else:
        text = _reproduce_example3(args.degree, args.tol)
    _write(text, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ckstab",
        description=(
            "Stability and ergodicity checks for censored/kinked structural "
            "VARs via switched-system bounds and Lyapunov certificates."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True, help="path to a model JSON file")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("analyze", help="bound hierarchy and ergodicity verdict")
    common(p)
    p.add_argument("--method", default="jsr,cjsr,rjsr",
                   help="comma-separated subset of jsr,cjsr,rjsr")
    p.add_argument("--degree", type=int, default=2, choices=(2, 4),
                   help="certificate degree 2m")
    p.add_argument("--depth", type=int, default=8, help="product enumeration depth")
    p.add_argument("--tol", type=float, default=1e-3, help="bisection tolerance")
    p.add_argument("--format", default="json", choices=("json", "csv"))
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="simulate a stochastic path to CSV")
    common(p)
    p.add_argument("--horizon", type=int, default=400, help="number of periods")
    p.add_argument("--seed", type=int, default=None, help="generator seed (required)")
    p.add_argument("--include-shocks", action="store_true",
                   help="append the drawn innovations as u1..up columns")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("skeleton", help="sampled contraction scan of the skeleton")
    common(p)
    p.add_argument("--grid-size", type=int, default=512, help="sphere sample count")
    p.add_argument("--steps", type=int, default=100, help="iterations per start point")
    p.add_argument("--ratio", type=float, default=0.5,
                   help="contraction target in (0, 1)")
    p.add_argument("--seed", type=int, default=None, help="scrambling seed (required)")
    p.set_defaults(func=cmd_skeleton)

    p = sub.add_parser("canonicalize", help="write the reduced form as JSON")
    common(p)
    p.add_argument("--partially-observed", action="store_true",
                   help="normalize so the canonical y equals the observed y")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("reproduce", help="recompute a bundled benchmark suite")
    p.add_argument("suite", choices=REPRODUCE_SUITES)
    p.add_argument("--degree", type=int, default=2, choices=(2, 4))
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, CoherenceError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except RuntimeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
