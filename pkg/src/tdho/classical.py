"""Classical-trajectory inputs for the exact quantum states.

A basis is a pair (u, v) of independent real solutions of
(d/dt)(M xdot) + M w^2 x = 0.  The Wronskian invariant
Omega = M (vdot u - udot v) is constant and must be positive; the envelope
rho = sqrt(u^2 + v^2) and the continuously unwrapped angle
theta = arg(u - iv) parameterize the quantum states.  Driven models add a
particular solution x_p and the accumulated phase integral delta(t).
"""

from __future__ import annotations

import math

import numpy as np

from .models import (
    CaldirolaKanai,
    OscillatorModel,
    ReducedUnitMass,
    UnitMassSHO,
    frequency_scale,
)
from .ode import solve_ode

__all__ = [
    "DegenerateBasisError",
    "OmegaSignError",
    "OverdampedError",
    "SingularPathError",
    "ClassicalBasis",
    "unwrapped_ellipse_angle",
    "NumericBasis",
    "ReducedBasis",
    "DrivenSolution",
    "solve_homogeneous",
    "analytic_basis_sho",
    "analytic_basis_ck",
    "reduced_basis",
    "solve_particular",
    "null_driven",
    "shift_particular",
    "delta_legacy",
    "export_basis_csv",
    "export_driven_csv",
]

_TWO_PI = 2.0 * np.pi


class DegenerateBasisError(ValueError):
    """Initial data (u0, du0) and (v0, dv0) are proportional."""


class OmegaSignError(ValueError):
    """Omega <= 0; swap the two solutions or negate one of them."""


class OverdampedError(ValueError):
    """w1^2 <= gamma^2/4: no real oscillation frequency."""


class SingularPathError(ValueError):
    """The legacy delta integrand hits a zero of v on the path."""


def _dense_step_cap(model, tol):
    # cubic-Hermite dense output carries an O((h*w)^4/384) interpolation
    # error between knots; cap h so that error matches the integration tol.
    return (384.0 * max(tol, 1e-11)) ** 0.25 / frequency_scale(model)


class ClassicalBasis:
    """Base class; subclasses provide u, du, v, dv, omega, theta, model."""

    model: OscillatorModel
    omega: float

    def u(self, t):
        raise NotImplementedError

    def du(self, t):
        raise NotImplementedError

    def v(self, t):
        raise NotImplementedError

    def dv(self, t):
        raise NotImplementedError

    def theta(self, t):
        raise NotImplementedError

    def rho(self, t):
        return np.sqrt(self.u(t) ** 2 + self.v(t) ** 2)

    def drho(self, t):
        # assembled from the trajectory derivatives, never finite-differenced
        u, v = self.u(t), self.v(t)
        return (u * self.du(t) + v * self.dv(t)) / np.sqrt(u * u + v * v)

    def omega_check(self, t):
        """M(t)·(vdot·u − udot·v); equals omega up to integration error."""
        return self.model.mass(t) * (self.dv(t) * self.u(t) - self.du(t) * self.v(t))


def unwrapped_ellipse_angle(s, C):
    """Continuous unwrapped arg of (C·cos s) − i·(sin s), zero at s = 0.

    The raw principal argument wraps every half-period; writing
    s = q·pi + r with |r| <= pi/2 keeps cos r >= 0, so the arctangent stays
    on the principal sheet and the -q*pi term carries the winding.
    """
    s = np.asarray(s, dtype=float)
    q = np.round(s / np.pi)
    r = s - q * np.pi
    out = -(q * np.pi + np.arctan2(np.sin(r), C * np.cos(r)))
    return out if out.ndim else float(out)


class _AnalyticSHOBasis(ClassicalBasis):
    """u = A cos(w t), v = B sin(w t) over the unit-mass SHO."""

    def __init__(self, model, w_s, A, B):
        self.model = model
        self.w = float(w_s)
        self.A = float(A)
        self.B = float(B)
        self.omega = A * B * w_s

    def u(self, t):
        return self.A * np.cos(self.w * np.asarray(t, dtype=float))

    def du(self, t):
        return -self.A * self.w * np.sin(self.w * np.asarray(t, dtype=float))

    def v(self, t):
        return self.B * np.sin(self.w * np.asarray(t, dtype=float))

    def dv(self, t):
        return self.B * self.w * np.cos(self.w * np.asarray(t, dtype=float))

    def theta(self, t):
        return unwrapped_ellipse_angle(self.w * np.asarray(t, dtype=float), self.A / self.B)


class _AnalyticCKBasis(ClassicalBasis):
    """u = A e^{-gamma t/2} cos(w_ck t), v = B e^{-gamma t/2} sin(w_ck t)."""

    def __init__(self, model, m, gamma, w_ck, A, B):
        self.model = model
        self.gamma = float(gamma)
        self.w_ck = float(w_ck)
        self.A = float(A)
        self.B = float(B)
        self.omega = m * A * B * w_ck

    def _env(self, t):
        return np.exp(-0.5 * self.gamma * np.asarray(t, dtype=float))

    def u(self, t):
        return self.A * self._env(t) * np.cos(self.w_ck * np.asarray(t, dtype=float))

    def du(self, t):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(self.w_ck * t), np.sin(self.w_ck * t)
        return self.A * self._env(t) * (-0.5 * self.gamma * c - self.w_ck * s)

    def v(self, t):
        return self.B * self._env(t) * np.sin(self.w_ck * np.asarray(t, dtype=float))

    def dv(self, t):
        t = np.asarray(t, dtype=float)
        c, s = np.cos(self.w_ck * t), np.sin(self.w_ck * t)
        return self.B * self._env(t) * (-0.5 * self.gamma * s + self.w_ck * c)

    def theta(self, t):
        # the positive envelope drops out of arg(u - iv)
        return unwrapped_ellipse_angle(self.w_ck * np.asarray(t, dtype=float), self.A / self.B)


class NumericBasis(ClassicalBasis):
    """Basis backed by dense ODE output; theta from an unwrapped table.

    The table is sampled finely enough that the raw argument moves by less
    than pi/2 between nodes, so numpy's unwrap picks the right branch; each
    query then computes the exact principal argument and snaps it to the
    branch the table indicates.
    """

    def __init__(self, sol, model, omega, t_ref):
        self.model = model
        self.omega = float(omega)
        self.t_ref = float(t_ref)
        self._sol = sol
        self._build_theta_table()

    def u(self, t):
        return self._sol(t)[..., 0]

    def du(self, t):
        return self._sol(t)[..., 1]

    def v(self, t):
        return self._sol(t)[..., 2]

    def dv(self, t):
        return self._sol(t)[..., 3]

    def _build_theta_table(self):
        n = 4097
        while True:
            ts = np.linspace(self.model.t_min, self.model.t_max, n)
            y = self._sol(ts)
            raw = np.arctan2(-y[:, 2], y[:, 0])
            unwrapped = np.unwrap(raw)
            if np.max(np.abs(np.diff(unwrapped))) < 0.5 * np.pi or n > 2**20:
                break
            n = 2 * n - 1
        # fix the branch so theta(t_ref) lands in (-pi, pi]
        th0 = np.interp(self.t_ref, ts, unwrapped)
        unwrapped -= _TWO_PI * math.floor((th0 + np.pi) / _TWO_PI)
        self._theta_ts = ts
        self._theta_table = unwrapped

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        raw = np.arctan2(-self.v(t), self.u(t))
        ref = np.interp(t, self._theta_ts, self._theta_table)
        out = raw + _TWO_PI * np.round((ref - raw) / _TWO_PI)
        return out if out.ndim else float(out)


class ReducedBasis(ClassicalBasis):
    """Unit-mass companion (u0, v0) = sqrt(M)·(u, v) of a general basis.

    Solves the reduced equation x'' + w0^2 x = 0 with the same invariant
    Omega and the same angle theta (the positive factor sqrt(M) does not
    move the argument of u - iv).
    """

    def __init__(self, base: ClassicalBasis):
        self.base = base
        self.model = ReducedUnitMass(base.model)
        self.omega = base.omega

    def _root_m(self, t):
        return np.sqrt(self.base.model.mass(t))

    def u(self, t):
        return self._root_m(t) * self.base.u(t)

    def du(self, t):
        m = self.base.model
        return self._root_m(t) * (
            self.base.du(t) + 0.5 * (m.dmass(t) / m.mass(t)) * self.base.u(t)
        )

    def v(self, t):
        return self._root_m(t) * self.base.v(t)

    def dv(self, t):
        m = self.base.model
        return self._root_m(t) * (
            self.base.dv(t) + 0.5 * (m.dmass(t) / m.mass(t)) * self.base.v(t)
        )

    def theta(self, t):
        return self.base.theta(t)


def reduced_basis(basis: ClassicalBasis) -> ReducedBasis:
    return ReducedBasis(basis)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def solve_homogeneous(
    model: OscillatorModel,
    u0: float,
    du0: float,
    v0: float,
    dv0: float,
    tol: float = 1e-10,
    t0=None,
    max_step=None,
) -> ClassicalBasis:
    """Integrate the homogeneous pair (u, v) across the model domain.

    Omega is fixed from the initial data; Omega <= 0 is rejected rather
    than silently repaired, since a sign flip would alter every phase
    downstream.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    t0 = model.t_min if t0 is None else float(t0)
    model.check_domain(t0)
    wronskian = dv0 * u0 - du0 * v0
    scale = max(abs(u0), abs(v0)) * max(abs(du0), abs(dv0))
    if abs(wronskian) <= 1e-14 * max(scale, 1e-300):
        raise DegenerateBasisError(
            "initial data for u and v are proportional (zero Wronskian)"
        )
    omega = model.mass(t0) * wronskian
    if omega <= 0:
        raise OmegaSignError(
            f"Omega = {omega} <= 0; swap (u, v) or negate one solution"
        )

    def rhs(t, y):
        M = model.mass(t)
        r = model.dmass(t) / M
        w2 = model.freq2(t)
        return np.array(
            [y[1], -r * y[1] - w2 * y[0], y[3], -r * y[3] - w2 * y[2]]
        )

    if max_step is None:
        max_step = _dense_step_cap(model, tol)
    sol = solve_ode(
        rhs, t0, [u0, du0, v0, dv0], model.t_min, model.t_max,
        rtol=tol, atol=1e-2 * tol, max_step=max_step,
    )
    return NumericBasis(sol, model, omega, t_ref=t0)


def analytic_basis_sho(w_s, A, B, model=None, t_min=0.0, t_max=20.0) -> ClassicalBasis:
    """Closed-form SHO basis u = A cos(w_s t), v = B sin(w_s t); Omega = A·B·w_s."""
    if w_s <= 0 or A <= 0 or B <= 0:
        raise ValueError("w_s, A, B must all be positive")
    if model is None:
        model = UnitMassSHO(w_s, t_min, t_max)
    return _AnalyticSHOBasis(model, w_s, A, B)


def analytic_basis_ck(m, gamma, w1, A, B, model=None, t_min=0.0, t_max=20.0) -> ClassicalBasis:
    """Closed-form basis for M = m·e^{gamma t} with w_ck^2 = w1^2 - gamma^2/4."""
    if A <= 0 or B <= 0:
        raise ValueError("A, B must be positive")
    w_ck_sq = w1**2 - 0.25 * gamma**2
    if w_ck_sq <= 0:
        raise OverdampedError(
            f"w1^2 - gamma^2/4 = {w_ck_sq} <= 0: overdamped regime not supported"
        )
    if model is None:
        model = CaldirolaKanai(m, gamma, w1, t_min, t_max)
    return _AnalyticCKBasis(model, m, gamma, math.sqrt(w_ck_sq), A, B)


# ---------------------------------------------------------------------------
# driven trajectories
# ---------------------------------------------------------------------------

class DrivenSolution:
    """Particular solution x_p with velocity and phase integral delta.

    delta obeys d(delta)/dt = (M w^2/2) x_p^2 - (M/2) xdot_p^2 with
    delta(t0) = 0.
    """

    def __init__(self, xp, dxp, delta, t0: float, model: OscillatorModel):
        self.xp = xp
        self.dxp = dxp
        self.delta = delta
        self.t0 = float(t0)
        self.model = model


def null_driven(model: OscillatorModel) -> DrivenSolution:
    """The exact x_p ≡ 0, delta ≡ 0 solution of an undriven model."""

    def zero(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape)
        return out if out.ndim else 0.0

    return DrivenSolution(zero, zero, zero, model.t_min, model)


def _delta_rate(model, t, xp, dxp):
    M = model.mass(t)
    return 0.5 * M * model.freq2(t) * xp * xp - 0.5 * M * dxp * dxp


def solve_particular(
    model: OscillatorModel,
    xp0: float,
    dxp0: float,
    t0=None,
    tol: float = 1e-10,
    max_step=None,
) -> DrivenSolution:
    """Integrate {x_p, delta} as one augmented system with shared steps."""
    t0 = model.t_min if t0 is None else float(t0)
    model.check_domain(t0)

    def rhs(t, y):
        M = model.mass(t)
        r = model.dmass(t) / M
        w2 = model.freq2(t)
        F = model.force_at(t)
        return np.array(
            [
                y[1],
                F / M - r * y[1] - w2 * y[0],
                _delta_rate(model, t, y[0], y[1]),
            ]
        )

    if max_step is None:
        max_step = _dense_step_cap(model, tol)
    sol = solve_ode(
        rhs, t0, [xp0, dxp0, 0.0], model.t_min, model.t_max,
        rtol=tol, atol=1e-2 * tol, max_step=max_step,
    )
    return DrivenSolution(
        sol.component(0), sol.component(1), sol.component(2), t0, model
    )


def shift_particular(
    driven: DrivenSolution, basis: ClassicalBasis, c: float, model=None
) -> DrivenSolution:
    """New particular solution x_p' = x_p + c·u with delta recomputed.

    The recomputed delta differs from delta - c·M·udot·(x_p + c·u/2) only
    by an additive constant.
    """
    model = basis.model if model is None else model
    if c == 0.0:
        return driven

    def xp2(t):
        return driven.xp(t) + c * basis.u(t)

    def dxp2(t):
        return driven.dxp(t) + c * basis.du(t)

    def rhs(t, y):
        return np.array([_delta_rate(model, t, float(xp2(t)), float(dxp2(t)))])

    max_step = _dense_step_cap(model, 1e-10)
    sol = solve_ode(
        rhs, driven.t0, [0.0], model.t_min, model.t_max,
        rtol=1e-10, atol=1e-12, max_step=max_step,
    )
    return DrivenSolution(xp2, dxp2, sol.component(0), driven.t0, model)


def delta_legacy(
    basis: ClassicalBasis,
    driven: DrivenSolution,
    model: OscillatorModel,
    t0: float,
    t: float,
) -> float:
    """Endpoint form of the phase integral:

        delta = -(M/2)(vdot/v) x_p^2 - (1/2) ∫ M (x_p vdot/v - xdot_p)^2 dz

    valid only where v does not vanish; agrees with the co-integrated delta
    up to an additive constant.  Kept as a cross-check oracle.
    """
    from scipy.integrate import quad

    a, b = (t0, t) if t0 <= t else (t, t0)
    span = max(b - a, 1e-12)
    probe = np.linspace(a, b, max(64, int(1024 * span)))
    vv = basis.v(probe)
    if np.min(np.abs(vv)) < 1e-8 * np.max(np.abs(vv)) or np.any(
        vv[:-1] * vv[1:] < 0
    ):
        raise SingularPathError(
            f"v(t) vanishes on [{a}, {b}]; choose a window between zeros of v"
        )

    def integrand(z):
        return model.mass(z) * (
            driven.xp(z) * basis.dv(z) / basis.v(z) - driven.dxp(z)
        ) ** 2

    integral, _ = quad(integrand, t0, t, epsabs=1e-13, epsrel=1e-12, limit=400)
    boundary = (
        -0.5 * model.mass(t) * (basis.dv(t) / basis.v(t)) * driven.xp(t) ** 2
    )
    return boundary - 0.5 * integral


# ---------------------------------------------------------------------------
# CSV export
# ---------------------------------------------------------------------------

def _write_rows(path, header, columns):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in zip(*columns):
            fh.write(",".join("%.17g" % x for x in row) + "\n")


def export_basis_csv(basis: ClassicalBasis, path, n_samples: int = 201, model=None):
    """Columns t, u, du, v, dv, omega_check at evenly spaced times."""
    model = basis.model if model is None else model
    ts = np.linspace(model.t_min, model.t_max, n_samples)
    _write_rows(
        path,
        ["t", "u", "du", "v", "dv", "omega_check"],
        [ts, basis.u(ts), basis.du(ts), basis.v(ts), basis.dv(ts),
         basis.omega_check(ts)],
    )


def export_driven_csv(driven: DrivenSolution, path, n_samples: int = 201, model=None):
    """Columns t, xp, dxp, delta at evenly spaced times."""
    model = driven.model if model is None else model
    ts = np.linspace(model.t_min, model.t_max, n_samples)
    _write_rows(
        path,
        ["t", "xp", "dxp", "delta"],
        [ts, driven.xp(ts), driven.dxp(ts), driven.delta(ts)],
    )
