"""Command-line front end.

Subcommands: analyze, solve, certificate, oracle, localmin, generate,
envelope, compare.  Plain-text reports by default, identical content as
JSON with --json.  Exit codes: 0 command completed (pass/fail verdicts are
report content), 2 input error, 3 desk-scale enumeration limit, 4 internal
numeric failure.  The environment variable QPRELAX_ENUM_CAP overrides the
exact-enumeration cap.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import conic
from .analysis import (
    analyze_recession_cone,
    check_copositivity_desk_scale,
    check_psd_on_nullspace,
    detect_unbounded,
    envelope_csv,
    sample_envelope,
)
from .conic import SolveOptions
from .core import DNN, PSD0, load_instance, load_vector, save_instance
from .errors import (
    DeskScaleLimit,
    GenerationFailed,
    NonFinite,
    QpRelaxError,
)
from .generators import (
    KINDS,
    HornFamilyParams,
    horn_family,
    horn_instance,
    random_instance,
)
from .oracle import enumerate_vertices, global_solve, verify_local_minimizer
from .report import compare_report

_CONES = {"dnn": DNN, "psd0": PSD0}


def _jsonable(x):
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(_jsonable(payload), indent=2))
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _options(args) -> SolveOptions:
    kwargs = {}
    if args.tol is not None:
        kwargs["tol_primal"] = args.tol
        kwargs["tol_dual"] = args.tol
    if args.max_iter is not None:
        kwargs["max_iterations"] = args.max_iter
    return SolveOptions(**kwargs)


def _fmt_value(v: float) -> str:
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.10g}"


# ---------------------------------------------------------------------------
# handlers


def _cmd_analyze(args) -> int:
    inst = load_instance(args.instance, symmetrize=args.symmetrize)
    payload = {"instance": inst.name, "n": inst.n, "m": inst.m}
    lines = [f"instance {inst.name} (n={inst.n}, m={inst.m})"]

    verts = enumerate_vertices(inst)
    payload["feasible"] = bool(verts)
    payload["basic_feasible_points"] = [v.tolist() for v in verts]
    lines.append(f"feasible: {bool(verts)} ({len(verts)} basic feasible points)")

    rec = analyze_recession_cone(inst)
    payload["recession"] = {
        "nontrivial": rec.l_nontrivial,
        "min_curvature": None if math.isinf(rec.min_curvature) else rec.min_curvature,
        "negative_direction": None if rec.neg_direction is None else rec.neg_direction.tolist(),
        "zero_directions": [d.tolist() for d in rec.zero_directions],
        "tolerance": rec.tolerance,
    }
    mc = "n/a" if math.isinf(rec.min_curvature) else f"{rec.min_curvature:.10g}"
    lines.append(
        f"recession cone: {'nontrivial' if rec.l_nontrivial else 'trivial'},"
        f" min curvature {mc} (tol {rec.tolerance:g})"
    )

    ns = check_psd_on_nullspace(inst)
    payload["psd_on_nullspace"] = {
        "holds": ns.holds,
        "min_eigenvalue": None if math.isinf(ns.min_eigenvalue) else ns.min_eigenvalue,
        "witness": None if ns.witness is None else ns.witness.tolist(),
        "tolerance": ns.tolerance,
    }
    lines.append(f"objective psd on null(A): {ns.holds} (tol {ns.tolerance:g})")

    cop = check_copositivity_desk_scale(inst.Q)
    payload["copositivity"] = {
        "min_value": cop.min_value,
        "minimizer": cop.minimizer.tolist(),
    }
    lines.append(f"simplex minimum of x^T Q x: {cop.min_value:.10g}")

    if verts:
        verdict = detect_unbounded(inst)
        payload["unboundedness"] = {
            "status": verdict.status,
            "direction": None if verdict.direction is None else verdict.direction.tolist(),
            "point": None if verdict.point is None else verdict.point.tolist(),
        }
        lines.append(f"unboundedness test: {verdict.status}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _relaxation_payload(res) -> dict:
    payload = {
        "status": res.status,
        "value": res.value,
        "iterations": res.iterations,
        "residual_primal": res.residual_primal,
        "residual_dual": res.residual_dual,
        "polished": res.polished,
    }
    if res.point is not None:
        payload["Y"] = res.point.y.tolist()
    if res.certificate is not None:
        payload["certificate"] = {
            "objective_rate": res.certificate.objective_rate,
            "matrix": res.certificate.d.tolist(),
        }
    return payload


def _cmd_solve(args) -> int:
    inst = load_instance(args.instance, symmetrize=args.symmetrize)
    cone = _CONES[args.cone]
    opts = _options(args)
    if args.at is not None:
        x = load_vector(args.at)
        res = conic.evaluate_underestimator(inst, cone, x, opts)
        what = f"underestimator at {args.at}"
    else:
        res = conic.solve_relaxation(inst, cone, opts)
        what = "relaxation"
    payload = {"instance": inst.name, "cone": args.cone, **_relaxation_payload(res)}
    lines = [
        f"{what} over {args.cone}: {res.status}",
        f"value: {_fmt_value(res.value)}",
        f"iterations: {res.iterations}"
        f" (residuals {res.residual_primal:.3g} / {res.residual_dual:.3g})",
    ]
    if res.certificate is not None:
        lines.append(f"certificate objective rate: {res.certificate.objective_rate:.10g}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_certificate(args) -> int:
    inst = load_instance(args.instance, symmetrize=args.symmetrize)
    cone = _CONES[args.cone]
    mode = conic.OBJECTIVE if args.mode == "objective" else conic.FEASIBILITY
    res = conic.recession_certificate_search(inst, cone, mode, _options(args))
    payload = {
        "instance": inst.name,
        "cone": args.cone,
        "mode": args.mode,
        "status": res.status,
        "iterations": res.iterations,
        "reason": res.reason,
    }
    lines = [f"certificate search ({args.mode}, {args.cone}): {res.status}"]
    if res.reason:
        lines.append(f"reason: {res.reason}")
    if res.certificate is not None:
        chk = conic.verify_certificate(inst, res.certificate)
        payload["certificate"] = {
            "objective_rate": res.certificate.objective_rate,
            "matrix": res.certificate.d.tolist(),
            "verified": chk.ok,
        }
        lines.append(f"objective rate: {res.certificate.objective_rate:.10g}")
        lines.append(f"independently verified: {chk.ok}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_oracle(args) -> int:
    inst = load_instance(args.instance, symmetrize=args.symmetrize)
    res = global_solve(inst)
    payload = {
        "instance": inst.name,
        "status": res.status,
        "value": res.value,
        "attained": res.attained,
        "certified": res.certified,
        "faces_explored": res.faces_explored,
        "minimizers": [m.tolist() for m in res.minimizers],
    }
    lines = [
        f"oracle: {res.status}",
        f"value: {_fmt_value(res.value)} (certified: {res.certified})",
        f"faces explored: {res.faces_explored}",
    ]
    for m in res.minimizers:
        lines.append(f"minimizer: {np.round(m, 10).tolist()}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_localmin(args) -> int:
    inst = load_instance(args.instance, symmetrize=args.symmetrize)
    x = load_vector(args.at)
    verdict = verify_local_minimizer(inst, x)
    payload = {
        "instance": inst.name,
        "point": x.tolist(),
        "is_local_min": verdict.is_local_min,
        "second_order_min": verdict.second_order_min,
    }
    lines = [f"local minimizer: {verdict.is_local_min}"]
    if verdict.kkt is not None:
        payload["kkt"] = {
            "y": verdict.kkt.y.tolist(),
            "s": verdict.kkt.s.tolist(),
            "stationarity_residual": verdict.kkt.stationarity_residual,
            "min_multiplier": verdict.kkt.min_multiplier,
            "complementarity_residual": verdict.kkt.complementarity_residual,
        }
        lines.append(f"multipliers y: {np.round(verdict.kkt.y, 10).tolist()}")
        lines.append(f"multipliers s: {np.round(verdict.kkt.s, 10).tolist()}")
    else:
        lines.append("first-order conditions failed")
    if not math.isnan(verdict.second_order_min):
        lines.append(f"second-order minimum over the critical cone: {verdict.second_order_min:.10g}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if args.target == "horn":
        inst, dtilde = horn_instance()
        path = out / "horn5.json"
        save_instance(inst, path)
        meta = {
            "kind": "HORN",
            "certificate": dtilde.tolist(),
            "certificate_objective": -5,
            "feasible_point": [0, 1, 0, 0, 4],
        }
        meta_path = out / "horn5.meta.json"
        meta_path.write_text(json.dumps(meta, indent=2) + "\n")
        written += [str(path), str(meta_path)]
    elif args.target == "horn-family":
        params = HornFamilyParams(n=args.n, seed=args.seed)
        inst = horn_family(params)
        path = out / f"{inst.name}.json"
        save_instance(inst, path)
        _, dtilde = horn_instance()
        embedded = np.zeros((args.n, args.n))
        embedded[:5, :5] = dtilde
        meta = {
            "kind": "HORN_FAMILY",
            "n": args.n,
            "seed": args.seed,
            "embedded_certificate": embedded.tolist(),
            "certificate_objective": -5,
        }
        meta_path = out / f"{inst.name}.meta.json"
        meta_path.write_text(json.dumps(meta, indent=2) + "\n")
        written += [str(path), str(meta_path)]
    else:
        inst, meta = random_instance(args.kind, args.n, args.m, args.seed, with_metadata=True)
        path = out / f"{inst.name}.json"
        save_instance(inst, path)
        meta_path = out / f"{inst.name}.meta.json"
        meta_path.write_text(json.dumps(_jsonable(meta), indent=2) + "\n")
        written += [str(path), str(meta_path)]
    _emit(args, {"written": written}, "\n".join(f"wrote {p}" for p in written))
    return 0


def _cmd_envelope(args) -> int:
    inst = load_instance(args.instance, symmetrize=args.symmetrize)
    start = load_vector(args.src)
    end = load_vector(args.dst)
    rows = sample_envelope(
        inst, _CONES[args.cone], start, end, samples=args.samples, opts=_options(args)
    )
    csv = envelope_csv(rows)
    if args.out:
        Path(args.out).write_text(csv)
        _emit(args, {"written": args.out, "rows": len(rows)}, f"wrote {args.out}")
    else:
        if args.json:
            payload = {
                "rows": [
                    {"t": r.t, "q": r.q, "lK": r.lk, "status": r.status} for r in rows
                ]
            }
            print(json.dumps(_jsonable(payload), indent=2))
        else:
            print(csv, end="")
    return 0


def _compare_one(path, opts):
    inst = load_instance(path)
    return compare_report(inst, opts)


def _cmd_compare(args) -> int:
    target = Path(args.instance)
    opts = _options(args)
    if target.is_dir():
        files = sorted(p for p in target.glob("*.json") if not p.name.endswith(".meta.json"))
        if not files:
            raise QpRelaxError(f"no instance files in {target}")
        with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
            reports = list(pool.map(lambda p: _compare_one(p, opts), files))
        if args.json:
            print(json.dumps([_jsonable(r.to_dict()) for r in reports], indent=2))
        else:
            print("".join(r.to_text() for r in reports), end="")
        return 0
    report = _compare_one(target, opts)
    _emit(args, report.to_dict(), report.to_text())
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qprelax",
        description="Feasibility-preserving conic relaxations of nonconvex quadratic programs.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--tol", type=float, default=None, help="solver residual tolerance")
    parser.add_argument("--max-iter", type=int, default=None, help="solver iteration budget")
    parser.add_argument(
        "--symmetrize",
        action="store_true",
        help="replace a non-symmetric objective matrix by its symmetric part on load",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="structural analysis of an instance")
    p.add_argument("instance")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("solve", help="solve a lifted relaxation")
    p.add_argument("--cone", choices=sorted(_CONES), default="dnn")
    p.add_argument("--at", default=None, help="vector file: evaluate the underestimator there")
    p.add_argument("instance")
    p.set_defaults(handler=_cmd_solve)

    p = sub.add_parser("certificate", help="search for a recession certificate")
    p.add_argument("--cone", choices=sorted(_CONES), default="dnn")
    p.add_argument("--mode", choices=("objective", "feasibility"), default="objective")
    p.add_argument("instance")
    p.set_defaults(handler=_cmd_certificate)

    p = sub.add_parser("oracle", help="exact global minimization by face enumeration")
    p.add_argument("instance")
    p.set_defaults(handler=_cmd_oracle)

    p = sub.add_parser("localmin", help="verify a candidate local minimizer")
    p.add_argument("--at", required=True, help="vector file with the candidate point")
    p.add_argument("instance")
    p.set_defaults(handler=_cmd_localmin)

    p = sub.add_parser("generate", help="write instance files")
    p.add_argument("target", choices=("horn", "horn-family", "random"))
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--kind", choices=KINDS, default="BOUNDED")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=_cmd_generate)

    p = sub.add_parser("envelope", help="sample the underestimator along a segment")
    p.add_argument("--cone", choices=sorted(_CONES), default="dnn")
    p.add_argument("--from", dest="src", required=True, help="vector file: segment start")
    p.add_argument("--to", dest="dst", required=True, help="vector file: segment end")
    p.add_argument("--samples", type=int, default=11)
    p.add_argument("--out", default=None, help="CSV output path (default stdout)")
    p.add_argument("instance")
    p.set_defaults(handler=_cmd_envelope)

    p = sub.add_parser("compare", help="full report with theory cross-checks")
    p.add_argument("--jobs", type=int, default=1, help="worker threads for directories")
    p.add_argument("instance", help="instance file or directory of instances")
    p.set_defaults(handler=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except DeskScaleLimit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NonFinite, GenerationFailed, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (QpRelaxError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
