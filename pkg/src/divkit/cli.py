"""Command line front end.

Subcommands: ``compute`` (evaluate a divergence between two density
files), ``diagnose`` (theta-scan a generator/triple pair), ``search``
(counterexample search over density families), ``limit-check`` (verify
the small-alpha approach to KL).  Reports go to stdout as JSON and,
with --out, to JSON/CSV files; report files get a companion PNG figure
unless --no-plot is given.

Exit codes: 0 success/consistent/exhausted, 1 refuted or witness found,
2 malformed input, 3 numeric degeneracy.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import characterization as char
from . import divergences as dv
from . import plots
from .density import GridDensity, load_density_csv, resample, save_density_csv
from .errors import DegenerateIntegralError, DivkitError
from .generators import load_generator

EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3

_DEFAULT_ALPHAS = "0.1,0.01,0.001,0.0001"


def _json_safe(v: float):
    v = float(v)
    if math.isfinite(v):
        return v
    if math.isnan(v):
        return "nan"
    return "+inf" if v > 0 else "-inf"


def _print(payload: dict) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_triple(text: str) -> dv.IndexTriple:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"--idx expects 'a0,a1,a2', got {text!r}")
    return dv.IndexTriple(*(float(p) for p in parts))


def _parse_grid(text: str) -> tuple[float, float, int]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ValueError(f"expected 'lo,hi,n', got {text!r}")
    return float(parts[0]), float(parts[1]), int(parts[2])


def _write_out(payload: dict, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")


def _kv_csv(payload: dict, out: Path) -> None:
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["field,value"]
    for key in sorted(payload):
        val = payload[key]
        if isinstance(val, (list, dict)):
            val = json.dumps(val, sort_keys=True).replace(",", ";")
        lines.append(f"{key},{val}")
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_pair(args) -> tuple[GridDensity, GridDensity]:
    f = load_density_csv(args.f)
    g = load_density_csv(args.g)
    if getattr(args, "grid", None):
        lo, hi, n = _parse_grid(args.grid)
        f, drift_f = resample(f, lo, hi, n)
        g, drift_g = resample(g, lo, hi, n)
        warnings.warn(f"resampled f and g onto [{lo:g},{hi:g}]x{n}; "
                      f"interpolation residuals {drift_f:.3e}, {drift_g:.3e}")
    elif not f.compatible_with(g):
        g, drift = resample(g, f.lo, f.hi, f.n)
        warnings.warn(f"resampled g onto f's grid {f!r}; "
                      f"interpolation residual {drift:.3e}")
    return f, g


def cmd_compute(args) -> int:
    f, g = _load_pair(args)
    div = args.div
    payload: dict = {
        "schema": "divkit/1",
        "command": "compute",
        "divergence": div,
        "f": str(args.f),
        "g": str(args.g),
    }
    if div in ("dpd", "ldpd"):
        if args.alpha is None:
            raise ValueError(f"--div {div} requires --alpha")
        payload["alpha"] = args.alpha
    if div in ("bregman", "logbregman"):
        if args.gen is None:
            raise ValueError(f"--div {div} requires --gen")
    if div == "logbregman" and args.idx is None:
        raise ValueError("--div logbregman requires --idx")

    if div == "dpd":
        result = dv.dpd(g, f, args.alpha)
    elif div == "ldpd":
        result = dv.ldpd(g, f, args.alpha)
    elif div == "kl":
        result = dv.kl(g, f)
    elif div == "bregman":
        B = load_generator(args.gen)
        payload["generator"] = B.label
        result = dv.bregman(B, g, f)
    else:  # logbregman
        B = load_generator(args.gen)
        idx = _parse_triple(args.idx)
        payload["generator"] = B.label
        payload["triple"] = idx.as_dict()
        result = dv.log_bregman(B, g, f, idx)

    payload["value"] = _json_safe(result.value)
    payload["terms"] = [_json_safe(t) for t in result.terms]
    if result.flag:
        payload["flag"] = result.flag
    _print(payload)
    if args.out:
        out = Path(args.out)
        if args.format == "csv":
            _kv_csv(payload, out)
        else:
            _write_out(payload, out)
        if not args.no_plot:
            plots.plot_density_pair(f, g, out.with_suffix(".png"))
    return EXIT_OK


def cmd_diagnose(args) -> int:
    B = load_generator(args.gen)
    idx = _parse_triple(args.idx)
    thetas = None
    if args.theta_range:
        lo, hi, n = _parse_grid(args.theta_range)
        thetas = char.default_theta_grid(lo, hi, n)
    report = char.theta_scan(B, idx, thetas)
    beta_witness = None
    if abs(idx.beta) > 1e-12:
        beta_witness = char.beta_necessity_probe(B, idx, thetas)

    summary = {
        "schema": "divkit/1",
        "command": "diagnose",
        "generator": report.generator,
        "triple": idx.as_dict(),
        "beta": _json_safe(report.beta),
        "verdict": report.verdict,
        "worst_theta": _json_safe(report.worst_theta),
        "worst_defect": _json_safe(report.worst_defect),
    }
    if beta_witness is not None:
        summary["beta_witness"] = beta_witness.to_dict()
    _print(summary)

    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if args.format == "csv":
            report.write_csv(out)
        else:
            payload = report.to_dict()
            if beta_witness is not None:
                payload["beta_witness"] = beta_witness.to_dict()
            _write_out(payload, out)
        if not args.no_plot:
            plots.plot_diagnostics(report, out.with_suffix(".png"))

    refuted = report.refuted or beta_witness is not None
    return EXIT_REFUTED if refuted else EXIT_OK


def cmd_search(args) -> int:
    B = load_generator(args.gen)
    idx = _parse_triple(args.idx)
    witness = char.counterexample_search(B, idx, seed=args.seed)
    payload = {
        "schema": "divkit/1",
        "command": "search",
        "generator": B.label,
        "triple": idx.as_dict(),
        "seed": args.seed,
    }
    if witness is None:
        payload["result"] = "exhausted"
        payload["verdict"] = "consistent-with-LBF (search not a proof)"
    else:
        payload["result"] = "witness"
        payload["verdict"] = "refuted"
        payload["witness"] = witness.to_dict()

    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        if witness is not None and witness.f_density is not None:
            f_csv = out.with_name(out.stem + "_f.csv")
            g_csv = out.with_name(out.stem + "_g.csv")
            save_density_csv(witness.f_density, f_csv)
            save_density_csv(witness.g_density, g_csv)
            payload["witness"]["f_csv"] = f_csv.name
            payload["witness"]["g_csv"] = g_csv.name
            if not args.no_plot:
                plots.plot_density_pair(witness.f_density, witness.g_density,
                                        out.with_suffix(".png"),
                                        labels=("witness f", "witness g"))
        _write_out(payload, out)
    _print(payload)
    return EXIT_REFUTED if witness is not None else EXIT_OK


def cmd_limit_check(args) -> int:
    f, g = _load_pair(args)
    alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    if not alphas:
        raise ValueError("--alphas must list at least one value")
    kl_val = dv.kl(g, f).value
    if not math.isfinite(kl_val):
        raise ValueError("KL is not finite for this pair; limit check needs "
                         "a pair with support(g) inside support(f)")
    dpd_gaps = [abs(dv.dpd(g, f, a).value - kl_val) for a in alphas]
    ldpd_gaps = [abs(dv.ldpd(g, f, a).value - kl_val) for a in alphas]
    order = np.argsort(alphas)[::-1]  # decreasing alpha
    dpd_mono = all(dpd_gaps[order[k + 1]] < dpd_gaps[order[k]]
                   for k in range(len(order) - 1))
    ldpd_mono = all(ldpd_gaps[order[k + 1]] < ldpd_gaps[order[k]]
                    for k in range(len(order) - 1))
    smallest = order[-1]
    converged = (dpd_mono and ldpd_mono
                 and dpd_gaps[smallest] <= args.tol
                 and ldpd_gaps[smallest] <= args.tol)
    payload = {
        "schema": "divkit/1",
        "command": "limit-check",
        "alphas": alphas,
        "kl": _json_safe(kl_val),
        "dpd_gaps": [_json_safe(v) for v in dpd_gaps],
        "ldpd_gaps": [_json_safe(v) for v in ldpd_gaps],
        "monotone": bool(dpd_mono and ldpd_mono),
        "tol": args.tol,
        "verdict": "kl-limit-confirmed" if converged else "kl-limit-not-confirmed",
    }
    _print(payload)
    if args.out:
        out = Path(args.out)
        if args.format == "csv":
            _kv_csv(payload, out)
        else:
            _write_out(payload, out)
        if not args.no_plot:
            plots.plot_limit_check(alphas, dpd_gaps, ldpd_gaps,
                                   out.with_suffix(".png"))
    return EXIT_OK if converged else EXIT_REFUTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="divkit",
        description="Divergence computation and generator characterization")
    sub = parser.add_subparsers(dest="command", required=True)

    def _common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", type=str, default=None,
                       help="Report file path (JSON or CSV per --format)")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--no-plot", action="store_true",
                       help="Skip the companion PNG figure")

    p = sub.add_parser("compute", help="Evaluate a divergence between two densities")
    p.add_argument("--div", required=True,
                   choices=["bregman", "dpd", "ldpd", "kl", "logbregman"])
    p.add_argument("--f", required=True, help="Density CSV for f (model argument)")
    p.add_argument("--g", required=True, help="Density CSV for g (data argument)")
    p.add_argument("--gen", help="Generator spec JSON (bregman, logbregman)")
    p.add_argument("--alpha", type=float, help="Tuning parameter (dpd, ldpd)")
    p.add_argument("--idx", help="Index triple 'a0,a1,a2' (logbregman)")
    p.add_argument("--grid", help="Resample both densities onto 'lo,hi,n'")
    _common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("diagnose", help="Theta-scan a generator/triple pair")
    p.add_argument("--gen", required=True, help="Generator spec JSON")
    p.add_argument("--idx", required=True, help="Index triple 'a0,a1,a2'")
    p.add_argument("--theta-range", help="Probe grid 'lo,hi,n' (log-spaced)")
    _common(p)
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("search", help="Counterexample search over density families")
    p.add_argument("--gen", required=True, help="Generator spec JSON")
    p.add_argument("--idx", required=True, help="Index triple 'a0,a1,a2'")
    p.add_argument("--seed", type=int, default=42)
    _common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("limit-check",
                       help="Check dpd/ldpd approach KL as alpha shrinks")
    p.add_argument("--f", required=True, help="Density CSV for f")
    p.add_argument("--g", required=True, help="Density CSV for g")
    p.add_argument("--alphas", default=_DEFAULT_ALPHAS,
                   help=f"Comma list of alphas (default {_DEFAULT_ALPHAS})")
    p.add_argument("--tol", type=float, default=1e-3,
                   help="Required gap to KL at the smallest alpha")
    p.add_argument("--grid", help="Resample both densities onto 'lo,hi,n'")
    _common(p)
    p.set_defaults(func=cmd_limit_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DegenerateIntegralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DivkitError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
