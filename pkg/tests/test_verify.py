"""Quadrature, moments, the equation residual, and the check runners."""

import json

import numpy as np
import pytest

from tdho.classical import analytic_basis_sho
from tdho.models import UnitMassSHO
from tdho.states import StateSpec, state_field
from tdho.transforms import Grid, sample_on_grid
from tdho.verify import (
    CHECK_NAMES,
    DEFAULT_THRESHOLDS,
    GridMismatchError,
    ResidualReport,
    SuiteContext,
    check_omega_constancy,
    check_stationarity,
    check_transform_equivalence,
    inner_product,
    moments,
    norm,
    phase_aligned_distance,
    report_json,
    residual_convergence_ok,
    run_suite,
    schrodinger_residual,
)

from conftest import T_MAX, T_MIN

GRID = Grid(-16.0, 16.0, 4096)


def _state(basis, n, driven=None):
    return state_field(StateSpec(n, 1.0, basis, basis.model, driven))


# ---------------------------------------------------------------------------
# quadrature layer
# ---------------------------------------------------------------------------

def test_norm_of_eigenstate_is_one(sho_basis_c2):
    gf = sample_on_grid(_state(sho_basis_c2, 3), GRID, 1.0)
    assert norm(gf) == pytest.approx(1.0, abs=1e-12)


def test_inner_product_orthonormal_pair(ck_basis):
    g0 = sample_on_grid(_state(ck_basis, 0), GRID, 1.0)
    g1 = sample_on_grid(_state(ck_basis, 1), GRID, 1.0)
    assert inner_product(g0, g0).real == pytest.approx(1.0, abs=1e-12)
    assert abs(inner_product(g0, g1)) < 1e-12


def test_inner_product_grid_mismatch(ck_basis):
    g0 = sample_on_grid(_state(ck_basis, 0), GRID, 1.0)
    g1 = sample_on_grid(_state(ck_basis, 0), Grid(-16.0, 16.0, 2048), 1.0)
    with pytest.raises(GridMismatchError):
        inner_product(g0, g1)


def test_moments_of_known_states(sho_basis_c1):
    """C = 1 stationary states: var_x = var_p = n + 1/2."""
    fine = Grid(-16.0, 16.0, 32768)
    for n in (0, 1, 3):
        gf = sample_on_grid(_state(sho_basis_c1, n), fine, 0.7)
        rep = moments(gf, 1.0)
        assert rep.mean_x == pytest.approx(0.0, abs=1e-12)
        assert rep.mean_p == pytest.approx(0.0, abs=1e-12)
        assert rep.var_x == pytest.approx(n + 0.5, abs=1e-9)
        assert rep.var_p == pytest.approx(n + 0.5, abs=1e-9)


def test_p2_forms_cross_check(sho_basis_c2):
    from tdho.verify import _p2_forms
    fine = Grid(-16.0, 16.0, 32768)
    gf = sample_on_grid(_state(sho_basis_c2, 2), fine, 1.3)
    stencil, gradient = _p2_forms(gf, 1.0)
    assert stencil == pytest.approx(gradient, abs=1e-8)


# ---------------------------------------------------------------------------
# residual
# ---------------------------------------------------------------------------

def test_residual_small_for_exact_state(ck_basis):
    from tdho.transforms import policy_grid
    grid = policy_grid(ck_basis, 1, 1.0, times=[0.0, 2.5])
    rep = schrodinger_residual(_state(ck_basis, 1), ck_basis.model, grid, 2.5)
    assert isinstance(rep, ResidualReport)
    assert rep.rel_l2_residual < 1e-6
    assert residual_convergence_ok(rep)
    assert rep.residual_coarse / rep.rel_l2_residual > 8.0


def test_residual_detects_detuned_state():
    """A basis detuned by 1% is not a solution: residual ~ 1e-2, flat order."""
    model = UnitMassSHO(1.0, t_min=T_MIN, t_max=T_MAX)
    wrong = analytic_basis_sho(1.01, 1.0, 1.0, model=model,
                               t_min=T_MIN, t_max=T_MAX)
    rep = schrodinger_residual(_state(wrong, 0), model, GRID, 1.0)
    assert rep.rel_l2_residual > 1e-3
    assert not residual_convergence_ok(rep)


def test_residual_convergence_floor():
    rep = ResidualReport(5e-10, 4096, 0.01, 1e-4, 6e-10, 0.26)
    assert residual_convergence_ok(rep)  # below floor: roundoff regime
    rep = ResidualReport(5e-8, 4096, 0.01, 1e-4, 6e-8, 0.26)
    assert not residual_convergence_ok(rep)


# ---------------------------------------------------------------------------
# named checks
# ---------------------------------------------------------------------------

def test_check_omega_constancy(lo_basis):
    assert check_omega_constancy(lo_basis) < 1e-8


def test_check_transform_equivalence_paths(ck_basis):
    from tdho.transforms import policy_grid
    grid = policy_grid(ck_basis, 2, 1.0, times=[0.0, 2.5])
    interp = check_transform_equivalence(ck_basis.model, ck_basis, None, 2,
                                         2.5, grid, exact=False)
    exact = check_transform_equivalence(ck_basis.model, ck_basis, None, 2,
                                        2.5, grid, exact=True)
    assert interp < 1e-6
    assert exact < 1e-10
    assert exact < interp


def test_check_stationarity(sho_basis_c1, sho_basis_c2):
    f1 = _state(sho_basis_c1, 1)
    drift = check_stationarity(f1, GRID, np.linspace(0.0, 2 * np.pi, 9))
    assert drift < 1e-9
    # squeezed state: density returns after pi/w but moves in between
    f2 = _state(sho_basis_c2, 1)
    assert check_stationarity(f2, GRID, [0.3, 0.3 + np.pi]) < 1e-8
    assert check_stationarity(f2, GRID, [0.3, 0.3 + np.pi / 2]) > 1e-2


def test_phase_aligned_distance(rng, sho_basis_c1):
    a = _state(sho_basis_c1, 2)(GRID.xs(), 1.0)
    phase = np.exp(1j * rng.uniform(0.0, 2 * np.pi))
    assert phase_aligned_distance(a, phase * a) < 1e-13
    assert phase_aligned_distance(a, np.roll(a, 50)) > 1e-3


# ---------------------------------------------------------------------------
# suite runner
# ---------------------------------------------------------------------------

def _context(basis, driven=None, family_info=None):
    from tdho.transforms import policy_grid
    grid = policy_grid(basis, 2, 1.0, driven=driven, times=[0.0, 1.0])
    return SuiteContext(
        model=basis.model, basis=basis, driven=driven, ns=[0, 1],
        times=[0.0, 1.0], grid=grid, family_info=family_info or {},
        orthonormality_nmax=3,
    )


def test_run_suite_orders_results_by_check_name(sho_basis_c1):
    ctx = _context(sho_basis_c1,
                   family_info={"kind": "sho", "w_s": 1.0, "Ccoef": 1.0})
    results = run_suite(ctx, ["residual", "closed_form_agreement"])
    names = [r.check for r in results]
    assert names == sorted(names)
    assert all(r.passed for r in results)


def test_run_suite_rejects_unknown_check(sho_basis_c1):
    ctx = _context(sho_basis_c1)
    with pytest.raises(ValueError, match="unknown check"):
        run_suite(ctx, ["no_such_check"])
    assert "residual" in CHECK_NAMES


def test_run_suite_tolerance_override(sho_basis_c1):
    ctx = _context(sho_basis_c1)
    results = run_suite(ctx, [{"name": "residual", "tolerance": 1e-20}])
    assert all(r.threshold == 1e-20 for r in results)
    assert not any(r.passed for r in results)  # impossible bar -> honest fail


def test_closed_form_check_requires_family(ck_basis):
    ctx = _context(ck_basis, family_info={})
    with pytest.raises(ValueError, match="closed.form"):
        run_suite(ctx, ["closed_form_agreement"])


def test_uncertainty_check_requires_driving(sho_basis_c1):
    ctx = _context(sho_basis_c1)
    with pytest.raises(ValueError, match="driven"):
        run_suite(ctx, ["uncertainty"])


def test_report_json_shape_and_determinism(sho_basis_c1):
    ctx = _context(sho_basis_c1)
    results = run_suite(ctx, ["omega_constancy", "residual"])
    text = report_json(results)
    assert text == report_json(run_suite(ctx, ["omega_constancy", "residual"]))
    doc = json.loads(text)
    assert {"check", "measured", "params", "pass", "threshold"} <= set(doc[0])
    assert DEFAULT_THRESHOLDS["residual"] == 1e-6


def test_delta_equivalence_check_runs(driven_sho):
    basis, drv = driven_sho
    ctx = _context(basis, driven=drv)
    results = run_suite(ctx, ["delta_equivalence"])
    assert len(results) >= 2  # legacy-vs-integrated and the shift rule
    assert all(r.passed for r in results)


def test_stationarity_check_rejects_non_sho(ck_basis):
    ctx = _context(ck_basis, family_info={"kind": "ck"})
    with pytest.raises(ValueError):
        run_suite(ctx, ["stationarity"])
