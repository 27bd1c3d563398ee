"""Command-line surface: analyze, region, idelta, verify-code, selftest.

Exit codes: 0 success, 1 internal error (or failed verification), 2 input
error, 3 resource cap exceeded.  Output documents are deterministic for a
fixed (config, seed): no timestamps, sorted keys, plain floats.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__, codes, idelta, qcore, region, selftest, source
from .errors import DimensionCapError, SpecError
from .idelta import OptimizerOptions


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):  # strict JSON
        return None
    return obj


def _dump(doc: dict) -> str:
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _provenance(args, command: str) -> dict:
    return {
        "tool": "cqrate",
        "version": __version__,
        "command": command,
        "seed": getattr(args, "seed", 0),
        "mode": getattr(args, "mode", None),
        "restarts": getattr(args, "restarts", None),
        "tolerances": {
            "tol_herm": qcore.TOL_HERM,
            "tol_psd": qcore.TOL_PSD,
            "tol_feas": idelta.TOL_FEAS,
            "tol_opt": idelta.TOL_OPT,
            "tol_generic": source.TOL_GENERIC,
        },
    }


def _load_json(path: str) -> dict:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: not valid JSON ({exc})") from exc


def _optimizer_options(args) -> OptimizerOptions:
    kw = {"seed": args.seed}
    if args.restarts is not None:
        kw["restarts"] = args.restarts
    if getattr(args, "wdim", None) is not None:
        kw["w_dim"] = args.wdim
    if getattr(args, "cdim", None) is not None:
        kw["c_dim"] = args.cdim
    if getattr(args, "iters", None) is not None:
        kw["iters_per_stage"] = args.iters
    return OptimizerOptions(**kw)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_analyze(args) -> int:
    src = source.load_source(_load_json(args.source))
    prof = source.entropic_profile(src)
    gen = source.genericity_report(src)
    doc = {
        "provenance": _provenance(args, "analyze"),
        "source": {"name": src.name, "alphabet_size": src.alphabet_size,
                   "dim_b": src.dim_b, "dim_r": src.dim_r},
        "profile": prof.as_dict(),
        "genericity": gen.as_dict(),
        "points": {
            "dw": region.dw_point(prof).as_dict(),
            "merging": region.merging_point(prof).as_dict(),
        },
    }
    _emit(_dump(doc), args.out)
    return 0


def cmd_region(args) -> int:
    src = source.load_source(_load_json(args.source))
    prof = source.entropic_profile(src)
    gen = source.genericity_report(src)
    opts = _optimizer_options(args)
    qsr = None
    if args.i0 is not None and args.i0_tilde is not None:
        i0, i0t = args.i0, args.i0_tilde
    else:
        est = idelta.estimate_I0_tilde(src, opts)
        i0, i0t = est.i0, est.i0_tilde
        if est.i0_result.converged:
            qsr = region.qsr_point(prof, src, est.i0_result).as_dict()
    i0 = min(max(i0, 0.0), prof.i_x_b)
    i0t = min(max(i0t, i0), prof.i_x_b)
    regions = {
        "generic": region.generic_region(prof, gen.is_generic),
        "inner": region.inner_bound_region(prof, i0),
        "outer": region.outer_bound_region(prof, i0t, args.mode),
    }
    rx_hi = max(v.rx for r in regions.values() for v in r.vertices) + 1.0
    doc = {
        "provenance": _provenance(args, "region"),
        "source": {"name": src.name},
        "profile": prof.as_dict(),
        "genericity": gen.as_dict(),
        "estimates": {"I0": i0, "I0_tilde": i0t, "gap": i0t - i0},
        "points": {
            "dw": region.dw_point(prof).as_dict(),
            "merging": region.merging_point(prof).as_dict(),
            "qsr": qsr,
        },
        "regions": {k: region.region_to_doc(r, n_samples=200, rx_hi=rx_hi)
                    for k, r in regions.items()},
    }
    if args.format == "csv":
        lines = ["rX,rB,region_kind"]
        for name, r in regions.items():
            for p in region.boundary_samples(r, 200, rx_hi):
                lines.append(f"{p.rx!r},{p.rb!r},{name}")
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(_dump(doc), args.out)
    return 0


def cmd_idelta(args) -> int:
    src = source.load_source(_load_json(args.source))
    try:
        grid = sorted(float(tok) for tok in args.delta_grid.split(",") if tok.strip())
    except ValueError as exc:
        raise SpecError(f"bad --delta-grid: {exc}") from exc
    if not grid:
        raise SpecError("empty --delta-grid")
    opts = _optimizer_options(args)
    curve = idelta.idelta_curve(src, grid, opts)
    res0 = idelta.optimize_idelta(src, 0.0, opts) if 0.0 not in grid else None
    i0 = res0.value if res0 is not None else curve.raw_values[grid.index(0.0)]
    positive = [v for d, v in zip(curve.deltas, curve.values) if d > 0]
    i0t = max(positive[0] if positive else i0, i0)
    doc = {
        "provenance": _provenance(args, "idelta"),
        "source": {"name": src.name},
        "curve": {"deltas": list(curve.deltas), "values": list(curve.values),
                  "raw_values": list(curve.raw_values),
                  "monotonized": curve.monotonized,
                  "warnings": list(curve.warnings)},
        "estimates": {"I0": i0, "I0_tilde": i0t, "gap": i0t - i0},
    }
    if args.emit_channels:
        channels = []
        for d in curve.deltas:
            res = idelta.optimize_idelta(src, d, opts)
            mat = None
            if res.param is not None:
                mat = [[[float(z.real), float(z.imag)] for z in row]
                       for row in res.param.mat]
            channels.append({"delta": d, "value": res.value,
                             "constraint": res.constraint,
                             "c_dim": res.param.c_dim if res.param else None,
                             "w_dim": res.param.w_dim if res.param else None,
                             "stinespring": mat})
        doc["channels"] = channels
    _emit(_dump(doc), args.out)
    return 0


def cmd_verify_code(args) -> int:
    src = source.load_source(_load_json(args.source))
    code = codes.load_code(_load_json(args.code), src)
    fid = codes.average_fidelity(src, code)
    dec = codes.decoupling_cmi(src, code)
    doc = {
        "provenance": _provenance(args, "verify-code"),
        "source": {"name": src.name},
        "code": {"n": code.n, "K": code.k, "L": code.l, "mode": code.mode,
                 "rate_x": code.rate_x, "rate_b": code.rate_b},
        "fidelity": {
            "avg_fidelity": fid.avg_fidelity,
            "epsilon": fid.epsilon,
            "per_sequence": [{"xn": list(xs), "weight": w, "fidelity": f}
                             for xs, w, f in fid.per_sequence],
        },
        "decoupling": {"cmi": dec.cmi, "bound": dec.bound,
                       "pass": dec.passed, "epsilon_used": dec.epsilon_used},
    }
    _emit(_dump(doc), args.out)
    return 0 if dec.passed else 1


def cmd_selftest(args) -> int:
    suites = [args.suite] if args.suite else None
    results = selftest.run_selftest(seed=args.seed, suites=suites)
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"suite {r.name}: {r.checks} checks, {r.violations} violations - {status}")
        for d in r.details:
            lines.append(f"  {d}")
    ok = all(r.passed for r in results)
    lines.append(f"selftest: {'PASS' if ok else 'FAIL'} "
                 f"({sum(r.checks for r in results)} checks, seed {args.seed})")
    sys.stdout.write("\n".join(lines) + "\n")
    if args.out:
        doc = {"provenance": _provenance(args, "selftest"),
               "suites": [r.as_dict() for r in results],
               "all_passed": ok}
        with open(args.out, "w") as fh:
            fh.write(_dump(doc))
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cqrate",
        description="Entropic analysis, constrained channel optimization and "
                    "rate regions for classical-quantum source compression.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_source=True):
        if needs_source:
            p.add_argument("--source", required=True, help="source spec JSON path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="also write the output document here")

    def add_opt_flags(p):
        p.add_argument("--restarts", type=int, default=None)
        p.add_argument("--iters", type=int, default=None,
                       help="hill-climb iterations per penalty stage")
        p.add_argument("--wdim", type=int, default=None, help="pin the W dimension")
        p.add_argument("--cdim", type=int, default=None, help="pin the C dimension")

    p = sub.add_parser("analyze", help="entropic profile, genericity, DW/merging points")
    add_common(p)
    p.set_defaults(fn=cmd_analyze)

    p = sub.add_parser("region", help="generic/inner/outer rate regions with plot data")
    add_common(p)
    add_opt_flags(p)
    p.add_argument("--mode", choices=["assisted", "unassisted"], default="assisted")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--i0", type=float, default=None,
                   help="precomputed I0 (skips optimization when both are given)")
    p.add_argument("--i0-tilde", dest="i0_tilde", type=float, default=None)
    p.set_defaults(fn=cmd_region)

    p = sub.add_parser("idelta", help="I_delta curve and I0 estimates")
    add_common(p)
    add_opt_flags(p)
    p.add_argument("--delta-grid", dest="delta_grid", required=True,
                   help="comma-separated deltas, e.g. 0,0.05,0.1")
    p.add_argument("--emit-channels", action="store_true",
                   help="include the optimized Stinespring matrices per delta")
    p.set_defaults(fn=cmd_idelta)

    p = sub.add_parser("verify-code", help="average fidelity and decoupling check")
    add_common(p)
    p.add_argument("--code", required=True, help="code spec JSON path")
    p.set_defaults(fn=cmd_verify_code)

    p = sub.add_parser("selftest", help="run the seeded property suites")
    add_common(p, needs_source=False)
    p.add_argument("--suite", default=None,
                   help=f"run one suite only; available: {', '.join(selftest.SUITES)}")
    p.set_defaults(fn=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DimensionCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
