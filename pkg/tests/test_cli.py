"""Command-line interface: scenarios, exit codes, deterministic outputs."""

import json

import numpy as np
import pytest

from tdho.cli import ScenarioError, build_context, load_scenario, main
from tdho.scenarios import BUNDLED, scenario_path


def _scenario_doc(**overrides):
    doc = {
        "name": "t",
        "seed": 42,
        "hbar": 1.0,
        "model": {"family": "UnitMassSHO", "params": {"w_s": 1.0},
                  "t_min": -1.0, "t_max": 12.0},
        "basis": {"kind": "analytic_sho", "A": 1.0, "B": 1.0},
        "states": [0, 1],
        "times": [0.0, 1.0],
        "grid": {"policy": True, "points": 4096, "pad": 8.0},
        "checks": ["residual"],
    }
    doc.update(overrides)
    return doc


def _write(tmp_path, doc, name="scn.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


# ---------------------------------------------------------------------------
# scenario loading
# ---------------------------------------------------------------------------

def test_bundled_scenarios_resolve_and_validate():
    assert set(BUNDLED) >= {"sho_c1", "sho_c2", "ck", "lo",
                            "driven_sho", "driven_ck", "negative_control"}
    for name in BUNDLED:
        doc = load_scenario(scenario_path(name))
        assert doc["name"] == name
    with pytest.raises(KeyError):
        scenario_path("nope")


def test_load_scenario_accepts_bare_bundled_name():
    assert load_scenario("sho_c1")["name"] == "sho_c1"


def test_load_scenario_schema_violation_reports_path(tmp_path):
    doc = _scenario_doc()
    del doc["model"]["family"]
    with pytest.raises(ScenarioError, match="family"):
        load_scenario(_write(tmp_path, doc))


def test_load_scenario_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ScenarioError, match="JSON"):
        load_scenario(str(p))


def test_load_scenario_missing_file():
    with pytest.raises(ScenarioError, match="cannot read"):
        load_scenario("/no/such/file.json")


# ---------------------------------------------------------------------------
# context building
# ---------------------------------------------------------------------------

def test_build_context_defaults_hbar_to_one(tmp_path):
    doc = _scenario_doc()
    del doc["hbar"]
    ctx = build_context(load_scenario(_write(tmp_path, doc)))
    assert ctx.hbar == 1.0


def test_build_context_fast_mode_trims_sweep(tmp_path):
    doc = _scenario_doc(states=[0, 1, 2, 3], times=[0.0, 1.0, 2.5, 4.0])
    ctx = build_context(load_scenario(_write(tmp_path, doc)), fast=True)
    assert max(ctx.ns) <= 2
    assert len(ctx.times) <= 3


def test_build_context_rejects_mismatched_basis(tmp_path):
    doc = _scenario_doc(model={"family": "CaldirolaKanai",
                               "params": {"m": 1.0, "gamma": 0.6, "w1": 1.0},
                               "t_min": -1.0, "t_max": 12.0})
    with pytest.raises(ScenarioError, match="UnitMassSHO"):
        build_context(load_scenario(_write(tmp_path, doc)))


def test_build_context_explicit_grid_too_small(tmp_path):
    doc = _scenario_doc(grid={"x_min": -2.0, "x_max": 2.0, "points": 256})
    with pytest.raises(ScenarioError, match="too small"):
        build_context(load_scenario(_write(tmp_path, doc)))


def test_build_context_driving(tmp_path):
    doc = _scenario_doc(driving={
        "force": {"kind": "cosine", "amplitude": 1.0, "omega": 2.0, "phase": 0.0},
        "xp0": -1.0 / 3.0, "dxp0": 0.0, "t0": 0.0, "tol": 1e-11,
    })
    ctx = build_context(load_scenario(_write(tmp_path, doc)))
    assert ctx.driven is not None
    assert ctx.model.has_driving
    assert ctx.driven.xp(0.0) == pytest.approx(-1.0 / 3.0)


# ---------------------------------------------------------------------------
# commands and exit codes
# ---------------------------------------------------------------------------

def test_version_command(capsys):
    assert main(["version"]) == 0
    from tdho import __version__
    assert __version__ in capsys.readouterr().out


def test_verify_fast_passes_bundled(capsys):
    rc = main(["verify", "sho_c1", "--suite", "fast"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "checks passed" in captured.err
    report = json.loads(captured.out)
    assert all(r["pass"] for r in report)


def test_verify_negative_control_fails():
    assert main(["verify", "negative_control", "--suite", "fast"]) == 1


def test_verify_writes_report_file(tmp_path):
    out = tmp_path / "report.json"
    rc = main(["verify", "sho_c1", "--suite", "fast", "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert {r["check"] for r in report} >= {"residual"}


def test_verify_unknown_check_is_config_error(tmp_path, capsys):
    path = _write(tmp_path, _scenario_doc(checks=["bogus"]))
    assert main(["verify", path]) == 2
    assert "unknown check" in capsys.readouterr().err


def test_verify_schema_error_exit_2(tmp_path, capsys):
    doc = _scenario_doc()
    doc["basis"]["kind"] = "mystery"
    assert main(["verify", _write(tmp_path, doc)]) == 2


def test_verify_no_checks_exit_2(tmp_path):
    doc = _scenario_doc()
    del doc["checks"]
    assert main(["verify", _write(tmp_path, doc)]) == 2


def test_state_outputs_are_deterministic(tmp_path, capsys):
    outs = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        assert main(["state", "sho_c1", "--t", "0", "--out", str(d)]) == 0
        outs.append((d / "state_n0_t0.csv").read_bytes())
    assert outs[0] == outs[1]
    capsys.readouterr()


def test_state_ground_state_samples(tmp_path, capsys):
    d = tmp_path / "out"
    assert main(["state", "sho_c1", "--t", "0", "--out", str(d)]) == 0
    capsys.readouterr()
    data = np.loadtxt(d / "state_n0_t0.csv", delimiter=",", skiprows=1)
    x, re, im = data[:, 0], data[:, 1], data[:, 2]
    np.testing.assert_allclose(re, np.pi**-0.25 * np.exp(-(x**2) / 2.0),
                               atol=1e-14)
    np.testing.assert_allclose(im, 0.0, atol=1e-14)
    sidecar = json.loads((d / "state_n0_t0.csv.json").read_text())
    assert sidecar["hbar"] == 1.0
    assert sidecar["scenario"] == "sho_c1"


def test_classical_outputs(tmp_path, capsys):
    d = tmp_path / "out"
    assert main(["classical", "driven_sho", "--out", str(d)]) == 0
    capsys.readouterr()
    basis = np.loadtxt(d / "driven_sho_basis.csv", delimiter=",", skiprows=1)
    np.testing.assert_allclose(basis[:, 5], 1.0, rtol=1e-12)  # omega_check
    driven = np.loadtxt(d / "driven_sho_driven.csv", delimiter=",", skiprows=1)
    t, xp = driven[:, 0], driven[:, 1]
    np.testing.assert_allclose(xp, -np.cos(2 * t) / 3.0, atol=1e-9)
