"""Command-line front end.

One JSON scenario file describes everything (model, basis, driving, states,
grid, times, checks); the subcommands only select an action and output
paths.  Exit codes: 0 all checks pass, 1 any check failed, 2 configuration
error (bad schema, unknown check, inconsistent grid).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .classical import (
    analytic_basis_ck,
    analytic_basis_sho,
    export_basis_csv,
    export_driven_csv,
    solve_homogeneous,
    solve_particular,
)
from .models import CaldirolaKanai, UnitMassSHO, model_from_json
from .states import dump_state_grid, state_field
from .transforms import Grid, policy_grid, sample_on_grid
from .verify import SuiteContext, report_json, run_suite

__all__ = ["main", "load_scenario", "build_context", "ScenarioError"]


class ScenarioError(ValueError):
    """Scenario file is invalid or internally inconsistent."""


SCENARIO_SCHEMA = {
    "type": "object",
    "required": ["name", "model", "basis", "states", "times", "grid"],
    "properties": {
        "name": {"type": "string"},
        "seed": {"type": "integer"},
        "hbar": {"type": "number", "exclusiveMinimum": 0},
        "model": {
            "type": "object",
            "required": ["family", "params", "t_min", "t_max"],
            "properties": {
                "family": {
                    "enum": [
                        "UnitMassSHO",
                        "CaldirolaKanai",
                        "LoDampedPulsating",
                        "GeneralParametric",
                    ]
                },
                "params": {"type": "object"},
                "t_min": {"type": "number"},
                "t_max": {"type": "number"},
            },
        },
        "basis": {
            "type": "object",
            "required": ["kind"],
            "properties": {
                "kind": {"enum": ["analytic_sho", "analytic_ck", "numeric"]},
                "A": {"type": "number", "exclusiveMinimum": 0},
                "B": {"type": "number", "exclusiveMinimum": 0},
                "w_s": {"type": "number", "exclusiveMinimum": 0},
                "ics": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 4,
                    "maxItems": 4,
                },
                "t0": {"type": "number"},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "driving": {
            "type": "object",
            "required": ["force"],
            "properties": {
                "force": {"type": "object", "required": ["kind"]},
                "xp0": {"type": "number"},
                "dxp0": {"type": "number"},
                "t0": {"type": "number"},
                "tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "states": {
            "type": "array",
            "items": {"type": "integer", "minimum": 0},
            "minItems": 1,
        },
        "times": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "grid": {
            "type": "object",
            "properties": {
                "policy": {"type": "boolean"},
                "points": {"type": "integer", "minimum": 16},
                "pad": {"type": "number", "exclusiveMinimum": 0},
                "x_min": {"type": "number"},
                "x_max": {"type": "number"},
            },
        },
        "closed_form": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["sho", "ck", "lo"]},
                "Ccoef": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "checks": {
            "type": "array",
            "items": {
                "oneOf": [
                    {"type": "string"},
                    {
                        "type": "object",
                        "required": ["name"],
                        "properties": {"name": {"type": "string"}},
                    },
                ]
            },
        },
    },
}


def _resolve_scenario(path) -> str:
    """Accept a filesystem path or the bare name of a bundled scenario."""
    if Path(path).exists():
        return str(path)
    from .scenarios import BUNDLED, scenario_path

    name = Path(path).stem
    if name in BUNDLED:
        return scenario_path(name)
    return str(path)


def load_scenario(path) -> dict:
    import jsonschema

    try:
        with open(_resolve_scenario(path), "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e}") from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"scenario is not valid JSON: {e}") from e
    try:
        jsonschema.validate(doc, SCENARIO_SCHEMA)
    except jsonschema.ValidationError as e:
        path_str = getattr(e, "json_path", None) or "$." + ".".join(
            str(p) for p in e.absolute_path
        )
        raise ScenarioError(f"scenario schema violation at {path_str}: {e.message}") from e
    return doc


def _build_basis(scenario, model):
    b = scenario["basis"]
    kind = b["kind"]
    if kind == "analytic_sho":
        if not isinstance(model, UnitMassSHO):
            raise ScenarioError("analytic_sho basis needs a UnitMassSHO model")
        # w_s may be overridden to detune the basis (negative controls)
        w_s = float(b.get("w_s", model.w_s))
        return analytic_basis_sho(w_s, b.get("A", 1.0), b.get("B", 1.0), model=model)
    if kind == "analytic_ck":
        if not isinstance(model, CaldirolaKanai):
            raise ScenarioError("analytic_ck basis needs a CaldirolaKanai model")
        return analytic_basis_ck(
            model.m, model.gamma, model.w1, b.get("A", 1.0), b.get("B", 1.0),
            model=model,
        )
    ics = b.get("ics")
    if ics is None:
        raise ScenarioError("numeric basis needs \"ics\": [u0, du0, v0, dv0]")
    return solve_homogeneous(
        model, *ics, tol=float(b.get("tol", 1e-10)), t0=b.get("t0"),
    )


def _family_info(scenario, model, basis):
    if "closed_form" in scenario:
        return dict(scenario["closed_form"])
    b = scenario["basis"]
    if b["kind"] == "analytic_sho" and isinstance(model, UnitMassSHO):
        return {"kind": "sho", "Ccoef": b.get("A", 1.0) / b.get("B", 1.0)}
    if b["kind"] == "analytic_ck" and isinstance(model, CaldirolaKanai):
        return {"kind": "ck", "Ccoef": b.get("A", 1.0) / b.get("B", 1.0)}
    return {}


def build_context(scenario: dict, fast: bool = False):
    """Assemble model, basis, driving, grid, and sweep lists."""
    model_doc = dict(scenario["model"])
    if "driving" in scenario:
        model_doc["force"] = scenario["driving"]["force"]
    model = model_from_json(model_doc)

    basis = _build_basis(scenario, model)

    driven = None
    if "driving" in scenario:
        d = scenario["driving"]
        driven = solve_particular(
            model,
            float(d.get("xp0", 0.0)),
            float(d.get("dxp0", 0.0)),
            t0=d.get("t0"),
            tol=float(d.get("tol", 1e-10)),
        )

    hbar = float(scenario.get("hbar", 1.0))
    ns = sorted(set(int(n) for n in scenario["states"]))
    times = [float(t) for t in scenario["times"]]
    ortho_nmax = 8
    if fast:
        ns = [n for n in ns if n <= 2] or ns[:1]
        times = times[:3]
        ortho_nmax = 4

    g = scenario["grid"]
    if g.get("policy", False) or "x_min" not in g:
        grid = policy_grid(
            basis, max(ns), hbar, driven=driven, times=times,
            points=int(g.get("points", 4096)), pad=float(g.get("pad", 8.0)),
        )
    else:
        grid = Grid(float(g["x_min"]), float(g["x_max"]), int(g.get("points", 4096)))

    ctx = SuiteContext(
        model=model,
        basis=basis,
        driven=driven,
        ns=ns,
        times=times,
        grid=grid,
        hbar=hbar,
        seed=int(scenario.get("seed", 42)),
        family_info=_family_info(scenario, model, basis),
        orthonormality_nmax=ortho_nmax,
    )
    _validate_grid(ctx)
    return ctx


def _validate_grid(ctx: SuiteContext):
    """The grid must keep the largest requested state negligible at edges."""
    spec = ctx.state(max(ctx.ns))
    f = state_field(spec)
    for t in ctx.times:
        g = sample_on_grid(f, ctx.grid, t, attach_source=False)
        if not g.is_compliant():
            raise ScenarioError(
                f"grid {ctx.grid} too small for n={max(ctx.ns)} at t={t}: "
                f"boundary ratio {g.boundary_ratio():.2e}"
            )


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_state(args) -> int:
    scenario = load_scenario(args.scenario)
    ctx = build_context(scenario)
    times = [float(t) for t in args.t] if args.t else ctx.times
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    xs = ctx.grid.xs()
    for n in ctx.ns:
        f = state_field(ctx.state(n))
        for t in times:
            csv_path = out_dir / f"state_n{n}_t{t:g}.csv"
            dump_state_grid(f, xs, t, csv_path, meta={"scenario": scenario["name"]})
            print(csv_path)
    return 0


def cmd_verify(args) -> int:
    scenario = load_scenario(args.scenario)
    checks = scenario.get("checks")
    if not checks:
        raise ScenarioError("scenario has no \"checks\" to run")
    ctx = build_context(scenario, fast=(args.suite == "fast"))
    results = run_suite(ctx, checks)
    text = report_json(results)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    n_fail = sum(1 for r in results if not r.passed)
    print(
        f"{scenario['name']}: {len(results) - n_fail}/{len(results)} checks passed",
        file=sys.stderr,
    )
    return 1 if n_fail else 0


def cmd_classical(args) -> int:
    scenario = load_scenario(args.scenario)
    ctx = build_context(scenario)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    basis_path = out_dir / f"{scenario['name']}_basis.csv"
    export_basis_csv(ctx.basis, basis_path, n_samples=args.samples, model=ctx.model)
    print(basis_path)
    if ctx.driven is not None:
        driven_path = out_dir / f"{scenario['name']}_driven.csv"
        export_driven_csv(ctx.driven, driven_path, n_samples=args.samples,
                          model=ctx.model)
        print(driven_path)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tdho",
        description="Exact eigenstates of driven, variable-mass oscillators: "
        "build, transform, verify.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_state = sub.add_parser("state", help="dump wavefunction grids")
    p_state.add_argument("scenario")
    p_state.add_argument("--t", nargs="*", type=float, help="override sample times")
    p_state.add_argument("--out", default="out", help="output directory")
    p_state.set_defaults(fn=cmd_state)

    p_verify = sub.add_parser("verify", help="run the scenario's checks")
    p_verify.add_argument("scenario")
    p_verify.add_argument("--suite", choices=["full", "fast"], default="full")
    p_verify.add_argument("--out", help="write the JSON report here")
    p_verify.set_defaults(fn=cmd_verify)

    p_classical = sub.add_parser("classical", help="dump trajectory CSVs")
    p_classical.add_argument("scenario")
    p_classical.add_argument("--out", default="out")
    p_classical.add_argument("--samples", type=int, default=201)
    p_classical.set_defaults(fn=cmd_classical)

    p_version = sub.add_parser("version", help="print the package version")
    p_version.set_defaults(fn=lambda args: print(__version__) or 0)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
