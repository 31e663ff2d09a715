"""Command-line entry point: configure instances, run suites, emit reports.

A run writes, into the output directory:

* ``config.json``    -- every resolved setting, for provenance
* ``report.csv``     -- one row per (check, part, instance, grid)
* ``refinement.csv`` -- empirical constants per grid with window verdicts
* ``summary.csv``    -- one verdict row per check
* ``refinement.png`` / ``verdicts.png`` -- rendered figures (disable with
  ``--no-figures``)

Reports are byte-identical for a fixed (config, seed) at any ``--jobs``
level; wall-clock timings go to the console only.  Exit status: 0 when no
check FAILs, 1 when any does, 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict
from pathlib import Path

from .verify import (
    STABLE_WINDOW,
    CheckOutcome,
    SuiteParams,
    check_ids,
    run_suite,
)

OUT_ENV = "MFRACLAB_OUT"

CONFIG_ERROR = 2


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf"
        return repr(x)
    return str(x)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="verify",
        description="Run inequality verification suites for the fractional "
                    "maximal/integral operator laboratory.",
    )
    ap.add_argument("--config", help="JSON config file; flags override its values")
    ap.add_argument("--suite", default="all",
                    help="'all' or comma-separated check ids (see --list)")
    ap.add_argument("--list", action="store_true", help="list check ids and exit")
    ap.add_argument("--n", type=int, help="space dimension (1..3)")
    ap.add_argument("--m", type=int, help="number of operator slots")
    ap.add_argument("--alpha", type=float, help="fractional order")
    ap.add_argument("--p", help="comma-separated slot exponents, e.g. 1.3333,1.3333")
    ap.add_argument("--grids", help="comma-separated grid sizes (increasing powers of two)")
    ap.add_argument("--seed", type=int, help="master seed")
    ap.add_argument("--instances", type=int, help="seeded instances per check per grid")
    ap.add_argument("--B", dest="young", help="Young-function label (power:p | llogl:k | ...)")
    ap.add_argument("--delta", type=float, help="iterated-log exponent for built weights")
    ap.add_argument("--eps", type=float, help="split width for the geometric-mean control")
    ap.add_argument("--beta", type=float, help="power for the (M g)^(-beta) companion weight")
    ap.add_argument("--k", dest="k_trunc", type=int, help="truncation scale exponent")
    ap.add_argument("--q", dest="q_trunc", type=float, help="power in the translation relation")
    ap.add_argument("--p-small", dest="p_small", type=float, help="sub-unit exponent in (0,1]")
    ap.add_argument("--llogl-k", dest="llogl_k", type=int, help="iterated-log class index k")
    ap.add_argument("--phi", help="cube-measure weight label (power:a)")
    ap.add_argument("--func-style", dest="func_style",
                    choices=["bumps", "positive", "indicator", "zero"],
                    help="input-function recipe family")
    ap.add_argument("--weight-style", dest="weight_style",
                    choices=["smooth", "rough", "powerlike"], help="weight recipe family")
    ap.add_argument("--weights", dest="weights",
                    help="explicit per-slot weight recipes, ';'-separated, e.g. "
                         "'power:0.5,0.5;bump:0.1,0.3'")
    ap.add_argument("--u", dest="u_recipe",
                    help="explicit scalar weight recipe (the u / nu slot)")
    ap.add_argument("--jobs", type=int, default=1, help="parallel check jobs")
    ap.add_argument("--out", help=f"output directory (or ${OUT_ENV})")
    fig = ap.add_mutually_exclusive_group()
    fig.add_argument("--figures", dest="figures", action="store_true", default=True)
    fig.add_argument("--no-figures", dest="figures", action="store_false")
    return ap


_PARAM_KEYS = [
    "n", "m", "alpha", "young", "delta", "eps", "beta", "k_trunc", "q_trunc",
    "p_small", "llogl_k", "phi", "func_style", "weight_style", "weight_recipes",
    "u_recipe",
]


def resolve_config(args) -> dict:
    """Merge defaults, config file, and flags (flags win)."""
    cfg = {
        "suite": "all",
        "grids": [32, 64],
        "seed": 42,
        "instances": 100,
        "jobs": 1,
        "out": "verify-out",
        "figures": True,
    }
    cfg.update({k: v for k, v in asdict(SuiteParams()).items()})
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(cfg) - {"p_vec", "p"}
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "p" in file_cfg:
            file_cfg["p_vec"] = file_cfg.pop("p")
        cfg.update(file_cfg)
    for key in _PARAM_KEYS + ["suite", "seed", "instances", "jobs", "out"]:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if args.p is not None:
        cfg["p_vec"] = [float(v) for v in args.p.split(",")]
    if args.grids is not None:
        cfg["grids"] = [int(v) for v in args.grids.split(",")]
    if getattr(args, "weights", None) is not None:
        cfg["weight_recipes"] = [r.strip() for r in args.weights.split(";") if r.strip()]
    if cfg.get("weight_recipes") is not None:
        cfg["weight_recipes"] = tuple(cfg["weight_recipes"])
    if getattr(args, "figures", None) is not None:
        cfg["figures"] = args.figures
    cfg["p_vec"] = tuple(float(v) for v in cfg["p_vec"])
    grids = [int(g) for g in cfg["grids"]]
    if any(g2 <= g1 for g1, g2 in zip(grids, grids[1:])):
        raise ValueError("grid sizes must be strictly increasing")
    for g in grids:
        if g < 2 or g & (g - 1):
            raise ValueError(f"grid size {g} is not a power of two >= 2")
    cfg["grids"] = grids
    env_out = os.environ.get(OUT_ENV)
    if args.out is None and env_out:
        cfg["out"] = env_out
    return cfg


def _validate_recipes(params: SuiteParams, cfg: dict):
    """Resolve every named recipe/label once so typos fail as config errors."""
    from .lattice import Grid
    from .recipes import resolve_field
    from .verify import parse_phi_label

    probe = Grid(params.n, 8)
    if params.weight_recipes is not None:
        if len(params.weight_recipes) != params.m:
            raise ValueError(
                f"{len(params.weight_recipes)} weight recipes for m={params.m} slots")
        for r in params.weight_recipes:
            resolve_field(r, probe)
    if params.u_recipe is not None:
        resolve_field(params.u_recipe, probe)
    params.young_fn()
    parse_phi_label(params.phi)


def _suite_list(cfg) -> list:
    if cfg["suite"] == "all":
        return check_ids()
    return [c.strip() for c in cfg["suite"].split(",") if c.strip()]


def _params_from_cfg(cfg) -> SuiteParams:
    fields = {k: cfg[k] for k in _PARAM_KEYS}
    fields["p_vec"] = tuple(cfg["p_vec"])
    return SuiteParams(**fields)


def write_report_csv(path: Path, reports):
    cols = ["check_id", "part", "statement", "config", "seed", "grid",
            "lhs", "rhs", "c_hat", "hypothesis", "mode", "flags", "skip"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in reports:
            row = [
                r.check_id, r.part, _csv_quote(r.statement), _csv_quote(r.instance["config"]),
                str(r.instance["seed"]), str(r.instance["grid"]),
                _fmt(r.lhs), _fmt(r.rhs), _fmt(r.c_hat), _fmt(r.hypothesis),
                r.mode, _csv_quote("; ".join(r.flags)), _csv_quote(r.skip or ""),
            ]
            fh.write(",".join(row) + "\n")


def _csv_quote(s: str) -> str:
    if s and ("," in s or '"' in s):
        return '"' + s.replace('"', '""') + '"'
    return s or ""


def refinement_rows(outcomes) -> list:
    rows = []
    for oc in outcomes:
        for part, by_grid in sorted(oc.c_by_grid.items()):
            ns = sorted(by_grid)
            for n1, n2 in zip(ns, ns[1:]):
                c1, c2 = by_grid[n1], by_grid[n2]
                ratio = c2 / c1 if c1 > 0 else (1.0 if c2 == 0 else math.inf)
                ok = 1.0 / STABLE_WINDOW <= ratio <= STABLE_WINDOW
                rows.append((oc.check_id, part, n1, n2, c1, c2, ratio, ok))
    return rows


def write_refinement_csv(path: Path, outcomes):
    with open(path, "w") as fh:
        fh.write("check_id,part,grid_small,grid_large,c_small,c_large,ratio,within_window\n")
        for row in refinement_rows(outcomes):
            fh.write(",".join([row[0], row[1], str(row[2]), str(row[3]),
                               _fmt(row[4]), _fmt(row[5]), _fmt(row[6]),
                               "yes" if row[7] else "no"]) + "\n")


def write_summary_csv(path: Path, outcomes):
    with open(path, "w") as fh:
        fh.write("check_id,verdict,c_hat_max,hypothesis_max,instances,notes,flags\n")
        for oc in outcomes:
            cmax = max((max(d.values()) for d in oc.c_by_grid.values()), default=0.0)
            hmax = max(oc.hyp_by_grid.values(), default=None) if oc.hyp_by_grid else None
            fh.write(",".join([
                oc.check_id, _csv_quote(oc.verdict), _fmt(cmax), _fmt(hmax),
                str(oc.instances), _csv_quote(oc.notes), _csv_quote("; ".join(oc.flags)),
            ]) + "\n")


def print_verdict_table(outcomes):
    wid = max((len(oc.check_id) for oc in outcomes), default=10)
    print(f"{'check':<{wid}}  {'verdict':<26} {'C^ max':>10}  notes")
    print("-" * (wid + 50))
    for oc in outcomes:
        cmax = max((max(d.values()) for d in oc.c_by_grid.values()), default=0.0)
        print(f"{oc.check_id:<{wid}}  {oc.verdict:<26} {cmax:>10.4g}  {oc.notes}")


def refinement_study(cfg: dict):
    """Run the configured suite and return (outcomes, refinement rows)."""
    params = _params_from_cfg(cfg)
    _reports, outcomes = run_suite(_suite_list(cfg), params, cfg["grids"],
                                   cfg["seed"], cfg["instances"], jobs=cfg["jobs"])
    return outcomes, refinement_rows(outcomes)


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return CONFIG_ERROR if e.code not in (0, None) else 0
    if args.list:
        for cid in check_ids():
            print(cid)
        return 0
    try:
        cfg = resolve_config(args)
        suite = _suite_list(cfg)
        params = _params_from_cfg(cfg)
        params.sys()  # exponent constraints are configuration, not run failures
        _validate_recipes(params, cfg)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return CONFIG_ERROR

    outdir = Path(cfg["out"])
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        print(f"configuration error: cannot create {outdir}: {e}", file=sys.stderr)
        return CONFIG_ERROR

    try:
        reports, outcomes = run_suite(suite, params, cfg["grids"], cfg["seed"],
                                      cfg["instances"], jobs=cfg["jobs"])
    except KeyError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return CONFIG_ERROR

    with open(outdir / "config.json", "w") as fh:
        json.dump({k: cfg[k] for k in sorted(cfg)}, fh, indent=2, default=list)
        fh.write("\n")
    write_report_csv(outdir / "report.csv", reports)
    write_refinement_csv(outdir / "refinement.csv", outcomes)
    write_summary_csv(outdir / "summary.csv", outcomes)
    if cfg["figures"]:
        from . import figures

        figures.render_refinement(outcomes, str(outdir / "refinement.png"))
        figures.render_verdicts(outcomes, str(outdir / "verdicts.png"))

    print_verdict_table(outcomes)
    print(f"\nreports written to {outdir}")
    return 1 if any(oc.verdict == "FAIL" for oc in outcomes) else 0


if __name__ == "__main__":
    sys.exit(main())
