"""Command-line front end.

Subcommands: analyze (potential profile and existence verdicts), bounds
(growth-rate report), phase (threshold sweep), regularity (canonical
metric gauge), simulate (lattice ensemble run), verify (built-in oracle
cross-checks).  All outputs are plot-ready CSV or JSON; CSV uses '.'
decimals, LF endings and a mandatory header row.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import bounds as B
from . import kernels as K
from . import levy as L
from . import potential as P
from . import regularity as R
from . import simulate as S
from .errors import NotApplicableError, PamheatError, UnsupportedError
from .model import (ModelSpec, SigmaSpec, model_from_json,
                    model_to_json, pam_model)

__all__ = ["main"]

# shorthand sweep names resolving into the model JSON tree
_SWEEP_ALIASES = {
    "q": "exponent.params.q",
    "b": "kernel.params.b",
    "lambda": "drift.mass_lambda",
    "kappa": "sigma.linear_kappa",
}


def _load_model(path: str) -> ModelSpec:
    with open(path) as fh:
        return model_from_json(json.load(fh))


def _parse_beta_grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise SystemExit(f"bad --beta-grid {text!r}; expected min:max:n")
    if n < 1 or lo <= 0 or hi < lo:
        raise SystemExit("beta grid must be nonempty with 0 < min <= max")
    return np.geomspace(lo, hi, n)


def _parse_sweep(text: str):
    if "=" not in text:
        raise SystemExit(f"bad --sweep {text!r}; expected param=v1,v2,...")
    name, values = text.split("=", 1)
    name = name.strip()
    path = _SWEEP_ALIASES.get(name, name)
    try:
        vals = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        raise SystemExit(f"non-numeric sweep values in {text!r}")
    if not vals:
        raise SystemExit("empty sweep value list")
    return name, path, vals


def _set_path(tree: dict, path: str, value) -> dict:
    node = tree
    parts = path.split(".")
    for part in parts[:-1]:
        if not isinstance(node, dict) or part not in node:
            raise SystemExit(f"sweep path {path!r} not found in model schema")
        node = node[part]
    leaf = parts[-1]
    if not isinstance(node, dict):
        raise SystemExit(f"sweep path {path!r} not found in model schema")
    # mass_lambda / linear_kappa are omitted from the JSON when unset
    if leaf not in node and leaf not in ("mass_lambda", "linear_kappa"):
        raise SystemExit(f"sweep path {path!r} not found in model schema")
    node[leaf] = value
    return tree


def _model_with(model: ModelSpec, path: str, value) -> ModelSpec:
    tree = model_to_json(model)
    _set_path(tree, path, value)
    return model_from_json(tree)


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(row)


def _write_json(path: Path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_analyze(args) -> int:
    model = _load_model(args.model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    betas = _parse_beta_grid(args.beta_grid)
    profile = P.potential_profile(model, betas)
    profile.to_csv(out / "potential_profile.csv")
    try:
        cond2 = K.check_condition2(model.kernel)
    except UnsupportedError:
        cond2 = None
    verdicts = {
        "schema_version": 1,
        "dalang": P.dalang_condition(model),
        "hawkes": L.hawkes_condition(model.exponent, 1.0),
        "transience": P.classify_transience(model),
        "condition2": cond2,
    }
    _write_json(out / "verdicts.json", verdicts)
    print(f"analyze: wrote {out / 'potential_profile.csv'} and verdicts.json")
    return 0


def cmd_bounds(args) -> int:
    model = _load_model(args.model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    reports = {}
    for p in args.p:
        try:
            reports[str(p)] = B.lyapunov_report(model, p).to_json()
        except NotApplicableError as exc:
            reports[str(p)] = {"p": p, "note": f"NotApplicable: {exc}"}
    payload = {"schema_version": 1, "reports": reports}
    kappa = model.sigma.linear_kappa
    if kappa is not None and isinstance(model.exponent, L.IsotropicStable) \
            and isinstance(model.kernel, K.RieszKernel):
        d, q, b = model.dim, model.exponent.q, model.kernel.b
        if q + b > d:
            lo, hi = B.pam_phase_threshold(d, q, b, kappa)
            payload["pam_phase_threshold"] = {"lower": lo, "upper": hi}
    _write_json(out / "lyapunov.json", payload)
    print(f"bounds: wrote {out / 'lyapunov.json'}")
    return 0


def cmd_phase(args) -> int:
    model = _load_model(args.model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if not args.sweep:
        raise SystemExit("phase requires --sweep (over lambda, b or q)")
    name, path, values = _parse_sweep(args.sweep)
    rows = []
    for v in values:
        m = _model_with(model, path, v)
        kappa = m.sigma.linear_kappa or 0.0
        d = m.dim
        if not (isinstance(m.exponent, L.IsotropicStable)
                and isinstance(m.kernel, K.RieszKernel)):
            raise SystemExit("phase sweep needs the stable-plus-Riesz family")
        q, b = m.exponent.q, m.kernel.b
        if q + b <= d:
            rows.append([repr(v), "", "", "NoSolution"])
            continue
        if kappa == 0.0:
            rows.append([repr(v), repr(0.0), repr(0.0), "NotWeaklyIntermittent"])
            continue
        lo, hi = B.pam_phase_threshold(d, q, b, kappa)
        at0 = B.lyapunov_report(
            _model_with(m, "drift.mass_lambda", 0.0), 2).verdict
        rows.append([repr(v), repr(lo), repr(hi), at0])
    _write_csv(out / "phase.csv",
               ["param", "lambda_lower_c", "lambda_upper_c", "verdict_at_lambda0"],
               rows)
    print(f"phase: wrote {out / 'phase.csv'} ({len(rows)} rows, sweep {name})")
    return 0


def cmd_regularity(args) -> int:
    model = _load_model(args.model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = R.entropy_verdict(model)
    _write_json(out / "gauge.json", report.to_json())
    rows = []
    if report.regime != "NoSolution":
        rs = np.geomspace(1e-6, 1e-1, 26)
        for r in rs:
            rows.append([repr(float(r)), repr(R.canonical_distance(model, float(r)))])
    _write_csv(out / "gauge.csv", ["r", "d"], rows)
    print(f"regularity: regime {report.regime}, wrote gauge.csv and gauge.json")
    return 0


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lattice = S.LatticeSpec(d=model.dim, N=args.grid, L=args.period,
                            dt=args.dt, T=args.horizon, M=args.replicas,
                            seed=args.seed)
    p = args.p[0] if args.p else 2
    result = S.estimate_exponent(model, lattice, p=p)
    result.to_csv(out / "trajectory.csv")
    _write_json(out / "summary.json", result.summary_json())
    print(f"simulate: gamma_hat({p}) = {result.gamma_hat:.4f} +- {result.ci:.4f} "
          f"(avg {result.gamma_hat_avg:.4f} +- {result.ci_avg:.4f})")
    return 0


def cmd_verify(args) -> int:
    """Built-in oracle cross-checks; nonzero exit on any failure."""
    checks = []

    def record(name, ok, detail):
        checks.append((name, ok, detail))
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")

    # potential quadrature against the closed-form amplitude
    worst = 0.0
    for q in (1.5, 2.0):
        for b in (0.25, 0.75):
            model = pam_model(q=q, b=b)
            a = P.amplitude_A(1, q, b)
            nu = (1.0 - b) / q
            for beta in (0.5, 4.0):
                got = P.upsilon(model, beta).value
                worst = max(worst, abs(got / (a * beta ** (nu - 1.0)) - 1.0))
    record("upsilon closed form", worst < 1e-6, f"max rel err {worst:.2e}")

    # phase threshold against the printed cross-form at b = 1/2
    lo, hi = B.pam_phase_threshold(1, 2.0, 0.5, 1.0)
    printed = -(8.0 ** (-(0.5) / 1.5)) * (
        math.gamma(0.25) * math.gamma(0.75) / math.sqrt(math.pi)) ** (2.0 / 1.5)
    err = max(abs(lo - printed), abs(hi - printed))
    record("phase threshold", err < 1e-10, f"abs err {err:.2e}")

    # occupation Monte Carlo against the exact scaled mean
    # c = 1/4 makes the symmetrized process a standard Brownian motion
    occ = ModelSpec(exponent=L.IsotropicStable(q=2.0, c=0.25, dim=1),
                    kernel=K.RieszKernel(b=0.5, c=1.0, dim=1),
                    sigma=SigmaSpec.linear(1.0))
    est, se = P.occupation_mc(occ, t=1.0, n_paths=2000, dt=1e-3,
                              seed=args.seed)
    exact = 2.2934399661985827
    ok = abs(est - exact) < max(3.0 * se, 0.1 * exact)
    record("occupation mc", ok, f"{est:.4f} +- {se:.4f} vs {exact:.4f}")

    # linear lattice variance against the mode sum
    lin = ModelSpec(exponent=L.IsotropicStable(q=2.0, c=1.0, dim=1),
                    kernel=K.RieszKernel(b=0.5, c=1.0, dim=1),
                    sigma=SigmaSpec.constant(1.0))
    lattice = S.LatticeSpec(d=1, N=128, L=16.0, dt=1e-3, T=0.25, M=200,
                            seed=args.seed)
    gap = S.run_linear_validation(lin, lattice, [0.1, 0.25])
    record("linear variance", gap < 0.15, f"max rel err {gap:.3f}")

    failed = [name for name, ok, _ in checks if not ok]
    print(f"verify: {len(checks) - len(failed)}/{len(checks)} checks passed")
    return 1 if failed else 0


def _int_list(text: str):
    return [int(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pamheat")
    sub = ap.add_subparsers(dest="command", required=True)
    commands = {
        "analyze": cmd_analyze,
        "bounds": cmd_bounds,
        "phase": cmd_phase,
        "regularity": cmd_regularity,
        "simulate": cmd_simulate,
        "verify": cmd_verify,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        if name != "verify":
            p.add_argument("--model", required=True, help="model JSON path")
            p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--sweep", default=None, help="param=v1,v2,...")
        p.add_argument("--p", type=_int_list, default=[2], help="moment orders")
        p.add_argument("--beta-grid", default="0.1:10:20", help="min:max:n (log)")
        p.add_argument("--replicas", type=int, default=100)
        p.add_argument("--grid", type=int, default=128)
        p.add_argument("--period", type=float, default=16.0)
        p.add_argument("--dt", type=float, default=1e-3)
        p.add_argument("--horizon", type=float, default=1.0)
        p.set_defaults(fn=fn)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except PamheatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
