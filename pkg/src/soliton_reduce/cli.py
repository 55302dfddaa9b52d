"""Command-line front end: JSON problem configs in, CSV profiles and JSON
reports out.

Subcommands::

    soliton-reduce solve <config.json>
    soliton-reduce verify <config.json> <profile.csv> [--threshold T]
                          [--seed S] [--points N]
    soliton-reduce gallery list
    soliton-reduce gallery emit <name> [--out DIR] [--param k=v ...]

Exit codes: 0 success/pass, 1 verification fail, 2 configuration or solver
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from .ansatz import QuadricAnsatz
from .errors import ConfigInvalid, ProfileMalformed, SolitonReduceError
from .geometry import Signature
from .profiles import Profile
from .reduction import (
    GALLERY_NAMES,
    GalleryEntry,
    ReducedState,
    SolitonProblem,
    SpecialParams,
    gallery,
)
from .rk import IntegrationConfig
from .solve import NodeProfile, solve_reduced, solve_special
from .verify import SampleSpec, verify_profile

CSV_COLUMNS = ("xi", "phi", "dphi", "f", "df")
DEFAULT_OUTPUT_POINTS = 2001

# CSV-backed verification reconstructs second derivatives from splines of
# the stored columns; its residual floor is the reconstruction error, well
# above the in-memory pipeline's. Hence a laxer default threshold here.
DEFAULT_CLI_THRESHOLD = 1e-5


# ---------------------------------------------------------------------------
# Config loading / validation
# ---------------------------------------------------------------------------

def _require(cond: bool, msg: str, errors: list[str]) -> bool:
    if not cond:
        errors.append(msg)
    return cond


def load_config(path: str | Path) -> dict:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigInvalid(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config is not valid JSON: {exc}") from None
    return resolve_config(raw)


def resolve_config(raw: dict) -> dict:
    """Validate and fill defaults; returns the fully-resolved config."""
    errors: list[str] = []
    cfg = dict(raw)

    mode = cfg.get("mode")
    _require(isinstance(mode, str)
             and (mode in ("theorem2", "theorem3")
                  or mode.startswith("gallery:")),
             "mode: must be 'theorem2', 'theorem3' or 'gallery:<name>'",
             errors)
    if isinstance(mode, str) and mode.startswith("gallery:"):
        _require(mode.split(":", 1)[1] in GALLERY_NAMES,
                 f"mode: unknown gallery entry; choose from {GALLERY_NAMES}",
                 errors)

    n = cfg.get("n")
    if _require(isinstance(n, int) and n >= 2, "n: integer >= 2 required",
                errors):
        for key in ("epsilon", "alpha", "beta"):
            val = cfg.get(key)
            if val is None and key in ("alpha", "beta"):
                cfg[key] = [0.0] * n
                continue
            _require(isinstance(val, list) and len(val) == n,
                     f"{key}: list of length n = {n} required", errors)
        eps = cfg.get("epsilon")
        if isinstance(eps, list):
            _require(all(e in (1, -1) for e in eps),
                     "epsilon: entries must be +1 or -1", errors)
            _require(any(e == 1 for e in eps),
                     "epsilon: at least one +1 required", errors)

    for key, default in (("tau", 0.0), ("lambda", 0.0)):
        cfg.setdefault(key, default)
        _require(isinstance(cfg[key], (int, float)),
                 f"{key}: number required", errors)

    span = cfg.get("xi_span")
    if mode in ("theorem2", "theorem3") or span is not None:
        ok = (isinstance(span, list) and len(span) == 2
              and all(isinstance(v, (int, float)) for v in span)
              and span[0] != span[1])
        _require(ok, "xi_span: [start, end] with start != end required",
                 errors)

    tols = dict(cfg.get("tolerances") or {})
    tols.setdefault("rel_tol", 1e-10)
    tols.setdefault("abs_tol", 1e-12)
    tols.setdefault("max_step", None)
    for key in ("rel_tol", "abs_tol"):
        _require(isinstance(tols[key], (int, float)) and tols[key] > 0,
                 f"tolerances.{key}: positive number required", errors)
    cfg["tolerances"] = tols

    initial = cfg.get("initial")
    if mode == "theorem2":
        needed = ("phi0", "dphi0", "f0", "df0")
        ok = isinstance(initial, dict) and all(
            isinstance(initial.get(k), (int, float)) for k in needed)
        _require(ok, f"initial: dict with numeric {needed} required", errors)
    elif mode == "theorem3":
        needed = ("c1", "c2", "h0")
        ok = isinstance(initial, dict) and all(
            isinstance(initial.get(k), (int, float)) for k in needed)
        _require(ok, f"initial: dict with numeric {needed} required", errors)
        if ok:
            initial.setdefault("f0", 0.0)
            _require(initial["h0"] > 0, "initial.h0: must be positive",
                     errors)

    sample = dict(cfg.get("sample") or {})
    sample.setdefault("mode", "random")
    sample.setdefault("seed", 0)
    sample.setdefault("count", 500)
    sample.setdefault("exclusion_phi", 1e-8)
    sample.setdefault("exclusion_sing", 1e-8)
    if "box" in sample and isinstance(n, int):
        box = sample["box"]
        _require(isinstance(box, list) and len(box) == n
                 and all(isinstance(b, list) and len(b) == 2 for b in box),
                 "sample.box: list of n [lo, hi] pairs required", errors)
    cfg["sample"] = sample

    output = dict(cfg.get("output") or {})
    output.setdefault("points", DEFAULT_OUTPUT_POINTS)
    output.setdefault("profile_csv", "profile.csv")
    output.setdefault("summary_json", "summary.json")
    output.setdefault("report_json", "report.json")
    cfg["output"] = output

    cfg.setdefault("threshold", DEFAULT_CLI_THRESHOLD)
    cfg.setdefault("gallery_params", {})

    if errors:
        raise ConfigInvalid(errors)
    return cfg


def build_problem(cfg: dict) -> SolitonProblem:
    sig = Signature(np.asarray(cfg["epsilon"], dtype=float))
    ansatz = QuadricAnsatz(float(cfg["tau"]),
                           np.asarray(cfg["alpha"], dtype=float),
                           np.asarray(cfg["beta"], dtype=float),
                           sig).canonical()
    return SolitonProblem(sig, ansatz, float(cfg["lambda"]))


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _integration_config(cfg: dict) -> IntegrationConfig:
    tols = cfg["tolerances"]
    return IntegrationConfig(
        xi_span=tuple(cfg["xi_span"]),
        rel_tol=float(tols["rel_tol"]),
        abs_tol=float(tols["abs_tol"]),
        max_step=float(tols["max_step"]) if tols["max_step"] else math.inf,
    )


def _build_profile(cfg: dict) -> tuple[SolitonProblem, Profile, dict]:
    mode = cfg["mode"]
    info: dict = {"mode": mode}
    if mode.startswith("gallery:"):
        name = mode.split(":", 1)[1]
        entry: GalleryEntry = gallery(name, **cfg["gallery_params"])
        info["gallery"] = {"name": name, "params": entry.params}
        if name == "space_form":
            info["forced_lambda"] = entry.params["forced_lambda"]
        return entry.problem, entry.profile, info
    problem = build_problem(cfg)
    run = _integration_config(cfg)
    if mode == "theorem2":
        ini = cfg["initial"]
        state = ReducedState(xi=float(cfg["xi_span"][0]),
                             phi=float(ini["phi0"]),
                             dphi=float(ini["dphi0"]),
                             f=float(ini["f0"]), df=float(ini["df0"]))
        prof = solve_reduced(problem, state, run)
    else:
        ini = cfg["initial"]
        sp = SpecialParams(c1=float(ini["c1"]), c2=float(ini["c2"]),
                           h0=float(ini["h0"]), f0=float(ini["f0"]))
        prof = solve_special(problem, sp, run)
    info["integration"] = {
        "accepted_steps": prof.solution.n_accepted,
        "rejected_steps": prof.solution.n_rejected,
        "rhs_evaluations": prof.solution.n_fev,
    }
    return problem, prof, info


def _csv_range(cfg: dict, prof: Profile) -> tuple[float, float]:
    lo, hi = prof.xi_min, prof.xi_max
    span = cfg.get("xi_span")
    if span is not None:
        a, b = sorted(float(v) for v in span)
        lo, hi = max(lo, a), min(hi, b)
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ConfigInvalid("xi_span: required for unbounded closed forms")
    if lo >= hi:
        raise ConfigInvalid("xi_span: empty after clipping to the profile "
                            "domain")
    return lo, hi


def write_profile_csv(path: str | Path, cfg: dict, prof: Profile) -> None:
    lo, hi = _csv_range(cfg, prof)
    xis = np.linspace(lo, hi, int(cfg["output"]["points"]))
    with open(path, "w", newline="") as fh:
        fh.write(f"# soliton-reduce profile n={cfg['n']} "
                 f"mode={cfg['mode']}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for xi in xis:
            s = prof.sample(float(xi))
            writer.writerow([repr(float(v)) for v in (s.xi, s.phi, s.dphi,
                                                      s.f, s.df)])


def _termination_dict(prof: Profile) -> dict:
    t = prof.termination
    if t is None:
        return {"kind": "external"}
    return {"kind": t.kind, "event": t.event, "xi_stop": t.xi_stop}


def _summary(cfg: dict, problem: SolitonProblem, prof: Profile,
             info: dict) -> dict:
    inv = problem.invariance
    inv_dict = {"kind": inv.kind}
    if inv.center is not None:
        inv_dict["center"] = list(inv.center)
    if inv.direction is not None:
        inv_dict["direction"] = list(inv.direction)
        inv_dict["causal_character"] = inv.causal_character
    return {
        "mode": cfg["mode"],
        "lambda": problem.lam,
        "lambda_constant": problem.lambda_constant,
        "regime": problem.regime,
        "invariance": inv_dict,
        "termination": _termination_dict(prof),
        "xi_range": [prof.xi_min if math.isfinite(prof.xi_min) else None,
                     prof.xi_max if math.isfinite(prof.xi_max) else None],
        **info,
        "config": _json_safe(cfg),
    }


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    problem, prof, info = _build_profile(cfg)
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / cfg["output"]["profile_csv"]
    summary_path = out / cfg["output"]["summary_json"]
    write_profile_csv(csv_path, cfg, prof)
    summary = _summary(cfg, problem, prof, info)
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")
    print(f"profile: {csv_path}")
    print(f"summary: {summary_path}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def read_profile_csv(path: str | Path, expected_n: int) -> NodeProfile:
    rows = []
    try:
        with open(path, newline="") as fh:
            meta_n = None
            for line in fh:
                if line.startswith("#"):
                    for tok in line.split():
                        if tok.startswith("n="):
                            meta_n = int(tok[2:])
                    continue
                header = [c.strip() for c in line.strip().split(",")]
                break
            else:
                raise ProfileMalformed("empty profile file")
            if tuple(header) != CSV_COLUMNS:
                raise ProfileMalformed(
                    f"header {header} != expected {list(CSV_COLUMNS)}")
            if meta_n is not None and meta_n != expected_n:
                raise ProfileMalformed(
                    f"profile dimension n={meta_n} != config n={expected_n}")
            for rec in csv.reader(fh):
                if not rec:
                    continue
                if len(rec) != len(CSV_COLUMNS):
                    raise ProfileMalformed(f"bad row: {rec}")
                rows.append([float(v) for v in rec])
    except FileNotFoundError:
        raise ProfileMalformed(f"profile file not found: {path}") from None
    except ValueError as exc:
        raise ProfileMalformed(f"non-numeric value: {exc}") from None
    if not rows:
        raise ProfileMalformed("profile has no data rows")
    data = np.asarray(rows)
    return NodeProfile(data[:, 0], data[:, 1], data[:, 2], data[:, 3],
                       data[:, 4])


def _sample_spec(cfg: dict, args) -> SampleSpec:
    sample = cfg["sample"]
    if "box" not in sample:
        raise ConfigInvalid("sample.box: required for verification")
    return SampleSpec(
        box=[tuple(b) for b in sample["box"]],
        mode=sample["mode"],
        count=int(args.points or sample["count"]),
        seed=int(args.seed if args.seed is not None else sample["seed"]),
        exclusion_phi=float(sample["exclusion_phi"]),
        exclusion_sing=float(sample["exclusion_sing"]),
    )


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    problem = build_problem(cfg)
    prof = read_profile_csv(args.profile, cfg["n"])
    spec = _sample_spec(cfg, args)
    threshold = float(args.threshold if args.threshold is not None
                      else cfg["threshold"])
    report = verify_profile(problem, prof, spec, threshold=threshold)
    report_path = Path(args.out or ".") / cfg["output"]["report_json"]
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(report.to_json() + "\n")
    print(f"report: {report_path}")
    print(f"verdict: {report.verdict} "
          f"(max tensor residual {report.max_tensor:.3e}, "
          f"threshold {threshold:.1e})")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# gallery
# ---------------------------------------------------------------------------

def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigInvalid(f"--param expects key=value, got {pair!r}")
        key, val = pair.split("=", 1)
        try:
            out[key] = json.loads(val)
        except json.JSONDecodeError:
            out[key] = val
    return out


def cmd_gallery(args) -> int:
    if args.action == "list":
        for name in GALLERY_NAMES:
            print(name)
        return 0
    entry = gallery(args.name, **_parse_params(args.param or []))
    span = args.xi_span or [0.0, 10.0]
    cfg = resolve_config({
        "mode": f"gallery:{entry.name}",
        "n": entry.problem.n,
        "epsilon": [int(e) for e in entry.problem.sig.eps],
        "tau": entry.problem.ansatz.tau,
        "alpha": list(entry.problem.ansatz.alpha),
        "beta": list(entry.problem.ansatz.beta),
        "lambda": entry.problem.lam,
        "xi_span": list(span),
        "gallery_params": entry.params,
        "output": {"profile_csv": f"{entry.name}_profile.csv",
                   "summary_json": f"{entry.name}_summary.json"},
    })
    out = Path(args.out) if args.out else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / cfg["output"]["profile_csv"]
    summary_path = out / cfg["output"]["summary_json"]
    info = {"mode": cfg["mode"],
            "gallery": {"name": entry.name, "params": entry.params}}
    if entry.name == "space_form":
        info["forced_lambda"] = entry.params["forced_lambda"]
    write_profile_csv(csv_path, cfg, entry.profile)
    summary = _summary(cfg, entry.problem, entry.profile, info)
    summary_path.write_text(json.dumps(summary, indent=2) + "\n")
    print(f"profile: {csv_path}")
    print(f"summary: {summary_path}")
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soliton-reduce",
        description="Conformal gradient Ricci solitons: reduce, integrate, "
                    "verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="integrate a problem config")
    p_solve.add_argument("config")
    p_solve.add_argument("--out", help="output directory")
    p_solve.set_defaults(func=cmd_solve)

    p_verify = sub.add_parser("verify", help="verify a profile CSV")
    p_verify.add_argument("config")
    p_verify.add_argument("profile")
    p_verify.add_argument("--threshold", type=float)
    p_verify.add_argument("--seed", type=int)
    p_verify.add_argument("--points", type=int)
    p_verify.add_argument("--out", help="output directory")
    p_verify.set_defaults(func=cmd_verify)

    p_gal = sub.add_parser("gallery", help="closed-form solutions")
    gal_sub = p_gal.add_subparsers(dest="action", required=True)
    g_list = gal_sub.add_parser("list")
    g_list.set_defaults(func=cmd_gallery, action="list")
    g_emit = gal_sub.add_parser("emit")
    g_emit.add_argument("name", choices=GALLERY_NAMES)
    g_emit.add_argument("--out", help="output directory")
    g_emit.add_argument("--param", action="append",
                        help="gallery parameter key=value (repeatable)")
    g_emit.add_argument("--xi-span", type=float, nargs=2, dest="xi_span")
    g_emit.set_defaults(func=cmd_gallery, action="emit")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except ProfileMalformed as exc:
        print(f"error: malformed profile: {exc}", file=sys.stderr)
        return 2
    except SolitonReduceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
