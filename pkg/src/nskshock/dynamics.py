"""Shift-coupled dynamics of the augmented (v, u, w) system on a truncated line.

Semi-discretization: second-order central differences in conservative (flux)
form with far-field Dirichlet ghosts and an absorbing sponge near the
boundaries.  Time stepping: classical RK4 (default, dt ~ dx^2) or an IMEX
scheme treating the viscous/capillary fluxes with Crank-Nicolson.  The wave
shift rides along as one extra ODE component driven by weighted projections
of the perturbation onto the wave's slopes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .gas import AdmissibilityError, GasLaw
from .profile import ShockProfile, sample_shifted


class BlowUpError(RuntimeError):
    """Volume hit the positivity floor; carries a labeled report."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


class InstabilityError(RuntimeError):
    """Field growth exceeded the runaway detector between steps."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report or {}


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if self.n < 64:
            raise ValueError(f"grid needs at least 64 nodes, got {self.n}")
        if not (self.x_min < 0.0 < self.x_max):
            raise ValueError("grid must straddle the origin")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def x(self):
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass
class SimState:
    t: float
    v: np.ndarray
    u: np.ndarray
    w: np.ndarray
    X: float
    Xdot: float = 0.0

    def copy(self):
        return SimState(self.t, self.v.copy(), self.u.copy(), self.w.copy(), self.X, self.Xdot)


@dataclass(frozen=True)
class Perturbation:
    kind: str = "gaussian_bump"  # gaussian_bump | compact_bump | random_smooth | none
    amp_v: float = 0.0
    amp_u: float = 0.0
    amp_w: float = 0.0
    center: float = 0.0
    width: float = 1.0
    seed: int = 0

    def shapes(self, x):
        """Unit-amplitude perturbation shape on the grid."""
        s = (x - self.center) / self.width
        if self.kind == "none":
            return np.zeros_like(x)
        if self.kind == "gaussian_bump":
            return np.exp(-0.5 * s**2)
        if self.kind == "compact_bump":
            out = np.zeros_like(x)
            inside = np.abs(s) < 1.0
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
            return out
        if self.kind == "random_smooth":
            rng = np.random.default_rng(self.seed)
            envelope = np.exp(-0.5 * s**2)
            modes = np.zeros_like(x)
            for k in range(1, 7):
                modes += rng.normal() * np.cos(k * s + rng.uniform(0, 2 * np.pi)) / k
            return envelope * modes / 2.0
        raise ValueError(f"unknown perturbation kind {self.kind!r}")

    def fields(self, x):
        shape = self.shapes(x)
        return self.amp_v * shape, self.amp_u * shape, self.amp_w * shape


class NSKModel:
    """Semi-discrete model binding a grid, a reference wave and the scheme knobs.

    The model itself is immutable; states are plain values.  ``frame`` selects
    the coordinate: "moving" keeps the wave centered (x means x - sigma*t),
    "lab" leaves the wave traveling at speed sigma.
    """

    def __init__(
        self,
        grid: Grid1D,
        profile: ShockProfile | None,
        frame: str = "moving",
        sponge: bool = True,
        sponge_fraction: float = 0.1,
        sponge_rate: float | None = None,
        v_floor: float | None = None,
        shift_enabled: bool = True,
        source=None,
        ghost_fill=None,
        cfl: float = 0.2,
        law: GasLaw | None = None,
    ):
        if frame not in ("moving", "lab"):
            raise ValueError(f"frame must be 'moving' or 'lab', got {frame!r}")
        if profile is None and (shift_enabled or ghost_fill is None):
            raise ValueError("a profile is required unless shift is disabled and ghosts are supplied")
        if shift_enabled and profile is not None and profile.constants is None:
            raise AdmissibilityError(
                "shock too strong for the shift dynamics (no completed-square constant)"
            )
        self.grid = grid
        self.profile = profile
        self.law = law if law is not None else (profile.law if profile is not None else None)
        if self.law is None:
            raise ValueError("a gas law is required (directly or via the profile)")
        self.es = profile.end_states if profile is not None else None
        self.frame = frame
        self.shift_enabled = shift_enabled
        self.source = source
        self.ghost_fill = ghost_fill
        self.cfl = cfl

        if profile is not None:
            self.v_floor = v_floor if v_floor is not None else profile.end_states.v_minus / 3.0
            rate = sponge_rate if sponge_rate is not None else profile.end_states.delta_s
        else:
            self.v_floor = v_floor if v_floor is not None else 0.0
            rate = sponge_rate if sponge_rate is not None else 0.0

        x = grid.x
        lam = np.zeros_like(x)
        if sponge and rate > 0.0:
            width = sponge_fraction * (grid.x_max - grid.x_min)
            sl = np.clip((x[0] + width - x) / width, 0.0, 1.0)
            sr = np.clip((x - (x[-1] - width)) / width, 0.0, 1.0)
            lam = rate * (sl**2 + sr**2)
        self._sponge_lam = lam
        self._x = x

    # -- ghosts ------------------------------------------------------------

    def _ghosts(self, t):
        if self.ghost_fill is not None:
            return self.ghost_fill(t)
        es = self.es
        return (es.v_minus, es.u_minus, 0.0), (es.v_plus, es.u_plus, 0.0)

    def _sponge_targets(self):
        es = self.es
        if es is None:
            return None
        return (es.v_minus, es.u_minus, 0.0), (es.v_plus, es.u_plus, 0.0)

    # -- core right-hand side ----------------------------------------------

    def rhs(self, t, v, u, w, X):
        """Semi-discrete time derivatives plus the shift rate and flux budget."""
        law, es, dx = self.law, self.es, self.grid.dx
        (vl, ul, wl), (vr, ur, wr) = self._ghosts(t)
        vp = np.concatenate(([vl], v, [vr]))
        up = np.concatenate(([ul], u, [ur]))
        wp = np.concatenate(([wl], w, [wr]))

        v_face = 0.5 * (vp[1:] + vp[:-1])
        p_face = 0.5 * (law.p(vp[1:]) + law.p(vp[:-1]))
        ux_face = (up[1:] - up[:-1]) / dx
        wx_face = (wp[1:] - wp[:-1]) / dx
        cap_coef = v_face**-2.5

        flux_v = 0.5 * (up[1:] + up[:-1])
        flux_u = -p_face + ux_face / v_face + wx_face * cap_coef
        flux_w = -ux_face * cap_coef
        if self.frame == "moving":
            sig = self.es.sigma
            flux_v = flux_v + sig * v_face
            flux_u = flux_u + sig * 0.5 * (up[1:] + up[:-1])
            flux_w = flux_w + sig * 0.5 * (wp[1:] + wp[:-1])

        vt = np.diff(flux_v) / dx
        ut = np.diff(flux_u) / dx
        wt = np.diff(flux_w) / dx

        sponge_v_int = sponge_u_int = 0.0
        if np.any(self._sponge_lam > 0.0):
            (tvl, tul, twl), (tvr, tur, twr) = self._sponge_targets()
            half = self._x < 0.0
            tv = np.where(half, tvl, tvr)
            tu = np.where(half, tul, tur)
            tw = np.where(half, twl, twr)
            lam = self._sponge_lam
            sv, su, sw = -lam * (v - tv), -lam * (u - tu), -lam * (w - tw)
            vt += sv
            ut += su
            wt += sw
            sponge_v_int = float(np.sum(sv) * dx)
            sponge_u_int = float(np.sum(su) * dx)

        if self.source is not None:
            sv, su, sw = self.source(t, self._x)
            vt += sv
            ut += su
            wt += sw
            sponge_v_int += float(np.sum(sv) * dx)
            sponge_u_int += float(np.sum(su) * dx)

        Xdot = self.shift_rate(t, v, u, X) if self.shift_enabled else 0.0
        budget = (
            float(flux_v[-1] - flux_v[0]) + sponge_v_int,
            float(flux_u[-1] - flux_u[0]) + sponge_u_int,
        )
        return vt, ut, wt, Xdot, budget

    def shift_rate(self, t, v, u, X):
        """Shift ODE: projections of the perturbation onto the wave slopes."""
        es, wc = self.es, self.profile.constants
        t_wave = t if self.frame == "lab" else 0.0
        tv, tu, _tw, tdv, tdu, _tdw, _ = sample_shifted(self.profile, self._x, X, t_wave, es.sigma)
        a = 1.0 + (es.u_minus - tu) / np.sqrt(es.delta_s)
        y1 = np.trapezoid(a * tdu * (u - tu), dx=self.grid.dx)
        y2 = np.trapezoid(a * self.law.dp(tv) * tdv * (v - tv), dx=self.grid.dx) / es.sigma
        return -wc.m_shift / es.delta_s * (y1 + y2)

    # -- time stepping -------------------------------------------------------

    def stable_dt(self, state: SimState) -> float:
        v_min = float(np.min(state.v))
        c_max = float(np.sqrt(-self.law.dp(v_min)))
        s_max = c_max + (self.es.sigma if self.frame == "moving" else 0.0)
        dx = self.grid.dx
        return self.cfl * min(dx * dx * v_min, dx / s_max)

    def _check_state(self, state_new: SimState, state_old: SimState):
        v = state_new.v
        if not np.all(np.isfinite(v)) or np.min(v) <= self.v_floor:
            i = int(np.argmin(v))
            raise BlowUpError(
                f"volume hit the floor {self.v_floor:.4g} at t={state_new.t:.6g}",
                report={
                    "t": state_new.t,
                    "x": float(self._x[i]),
                    "v_min": float(np.min(v)),
                    "v_floor": self.v_floor,
                },
            )
        amp_old = max(
            float(np.max(np.abs(state_old.u))) + float(np.max(np.abs(state_old.w))), 1e-12
        )
        amp_new = float(np.max(np.abs(state_new.u))) + float(np.max(np.abs(state_new.w)))
        if amp_new > 10.0 * amp_old:
            raise InstabilityError(
                f"field amplitude grew {amp_new / amp_old:.1f}x in one step at t={state_new.t:.6g}",
                report={"t": state_new.t, "growth": amp_new / amp_old},
            )

    def step_rk4(self, state: SimState, dt: float):
        """One classical RK4 step; returns (new_state, flux_budget)."""
        t, v, u, w, X = state.t, state.v, state.u, state.w, state.X

        k1 = self.rhs(t, v, u, w, X)
        k2 = self.rhs(t + 0.5 * dt, v + 0.5 * dt * k1[0], u + 0.5 * dt * k1[1], w + 0.5 * dt * k1[2], X + 0.5 * dt * k1[3])
        k3 = self.rhs(t + 0.5 * dt, v + 0.5 * dt * k2[0], u + 0.5 * dt * k2[1], w + 0.5 * dt * k2[2], X + 0.5 * dt * k2[3])
        k4 = self.rhs(t + dt, v + dt * k3[0], u + dt * k3[1], w + dt * k3[2], X + dt * k3[3])

        def mix(i):
            return (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0

        new = SimState(
            t=t + dt,
            v=v + dt * mix(0),
            u=u + dt * mix(1),
            w=w + dt * mix(2),
            X=X + dt * mix(3),
            Xdot=float(k1[3]),
        )
        budget = (
            dt * (k1[4][0] + 2 * k2[4][0] + 2 * k3[4][0] + k4[4][0]) / 6.0,
            dt * (k1[4][1] + 2 * k2[4][1] + 2 * k3[4][1] + k4[4][1]) / 6.0,
        )
        self._check_state(new, state)
        return new, budget

    # -- IMEX: Crank-Nicolson on the linearized viscous/capillary fluxes ----

    def _stiff_band(self, v, t):
        """Banded matrix of the (u, w)-linear stiff operator and its ghost load."""
        n, dx = self.grid.n, self.grid.dx
        (vl, ul, wl), (vr, ur, wr) = self._ghosts(t)
        vp = np.concatenate(([vl], v, [vr]))
        v_face = 0.5 * (vp[1:] + vp[:-1])
        cv = 1.0 / (v_face * dx * dx)  # viscous face coefficient
        cc = v_face**-2.5 / (dx * dx)  # capillary face coefficient

        m = 2 * n
        ab = np.zeros((7, m))  # interleaved (u0, w0, u1, w1, ...), bandwidth 3

        def add(i, j, val):
            ab[3 + i - j, j] += val

        g = np.zeros(m)
        for i in range(n):
            iu, iw = 2 * i, 2 * i + 1
            cl, cr = cv[i], cv[i + 1]
            kl, kr = cc[i], cc[i + 1]
            # u-row: (u_x/v)_x + (w_x/v^{5/2})_x
            add(iu, iu, -(cl + cr))
            add(iw, iw, 0.0)
            if i > 0:
                add(iu, iu - 2, cl)
                add(iu, iw - 2, kl)
                add(iw, iu - 2, -kl)
            else:
                g[iu] += cl * ul + kl * wl
                g[iw] += -kl * ul
            if i < n - 1:
                add(iu, iu + 2, cr)
                add(iu, iw + 2, kr)
                add(iw, iu + 2, -kr)
            else:
                g[iu] += cr * ur + kr * wr
                g[iw] += -kr * ur
            add(iu, iw, -(kl + kr))
            # w-row: -(u_x/v^{5/2})_x
            add(iw, iu, kl + kr)
        return ab, g

    def _explicit_rhs(self, t, v, u, w, X):
        """Nonstiff part: advection, pressure, sponge, source, shift."""
        law, es, dx = self.law, self.es, self.grid.dx
        (vl, ul, wl), (vr, ur, wr) = self._ghosts(t)
        vp = np.concatenate(([vl], v, [vr]))
        up = np.concatenate(([ul], u, [ur]))
        wp = np.concatenate(([wl], w, [wr]))
        p_face = 0.5 * (law.p(vp[1:]) + law.p(vp[:-1]))
        flux_v = 0.5 * (up[1:] + up[:-1])
        flux_u = -p_face
        flux_w = np.zeros_like(p_face)
        if self.frame == "moving":
            sig = es.sigma
            flux_v = flux_v + sig * 0.5 * (vp[1:] + vp[:-1])
            flux_u = flux_u + sig * 0.5 * (up[1:] + up[:-1])
            flux_w = flux_w + sig * 0.5 * (wp[1:] + wp[:-1])
        vt = np.diff(flux_v) / dx
        ut = np.diff(flux_u) / dx
        wt = np.diff(flux_w) / dx
        if np.any(self._sponge_lam > 0.0):
            (tvl, tul, twl), (tvr, tur, twr) = self._sponge_targets()
            half = self._x < 0.0
            lam = self._sponge_lam
            vt += -lam * (v - np.where(half, tvl, tvr))
            ut += -lam * (u - np.where(half, tul, tur))
            wt += -lam * (w - np.where(half, twl, twr))
        if self.source is not None:
            sv, su, sw = self.source(t, self._x)
            vt += sv
            ut += su
            wt += sw
        Xdot = self.shift_rate(t, v, u, X) if self.shift_enabled else 0.0
        return vt, ut, wt, Xdot

    def step_imex(self, state: SimState, dt: float):
        """IMEX trapezoidal step: CN on the frozen stiff operator, Heun on the rest."""
        t, v, u, w, X = state.t, state.v, state.u, state.w, state.X
        n = self.grid.n

        e1 = self._explicit_rhs(t, v, u, w, X)
        v_half = v + 0.5 * dt * e1[0]
        ab, g = self._stiff_band(v_half, t)

        uw = np.empty(2 * n)
        uw[0::2], uw[1::2] = u, w

        # banded multiply via explicit offsets (ab holds A[i, j] at [3+i-j, j])
        def matvec(vec):
            out = np.zeros_like(vec)
            for off in range(-3, 4):
                row = ab[3 + off]
                if off > 0:
                    out[off:] += row[:-off] * vec[:-off]
                elif off < 0:
                    out[:off] += row[-off:] * vec[-off:]
                else:
                    out += row * vec
            return out

        lhs = -0.5 * dt * ab
        lhs[3] += 1.0

        # predictor: explicit Euler on the nonstiff part
        rhs1 = uw + 0.5 * dt * (matvec(uw) + 2.0 * g)
        rhs1[0::2] += dt * e1[1]
        rhs1[1::2] += dt * e1[2]
        uw1 = solve_banded((3, 3), lhs, rhs1)
        v1 = v + dt * e1[0]
        X1 = X + dt * e1[3]

        e2 = self._explicit_rhs(t + dt, v1, uw1[0::2], uw1[1::2], X1)

        # corrector: Heun average of the nonstiff part
        rhs2 = uw + 0.5 * dt * (matvec(uw) + 2.0 * g)
        rhs2[0::2] += 0.5 * dt * (e1[1] + e2[1])
        rhs2[1::2] += 0.5 * dt * (e1[2] + e2[2])
        uw2 = solve_banded((3, 3), lhs, rhs2)

        new = SimState(
            t=t + dt,
            v=v + 0.5 * dt * (e1[0] + e2[0]),
            u=uw2[0::2].copy(),
            w=uw2[1::2].copy(),
            X=X + 0.5 * dt * (e1[3] + e2[3]),
            Xdot=float(e1[3]),
        )
        self._check_state(new, state)
        return new, (np.nan, np.nan)

    def step(self, state: SimState, dt: float, scheme: str = "rk4"):
        if scheme == "rk4":
            return self.step_rk4(state, dt)
        if scheme == "imex":
            return self.step_imex(state, dt)
        raise ValueError(f"unknown scheme {scheme!r}")


def init_state(
    profile: ShockProfile,
    grid: Grid1D,
    pert: Perturbation,
    w_mode: str = "consistent",
    frame: str = "moving",
    v_floor: float | None = None,
) -> SimState:
    """Perturbed initial data on the grid.

    ``w_mode='consistent'`` derives w from the perturbed v (the constrained
    start); ``'independent'`` perturbs w directly on top of the wave's w.
    """
    es = profile.end_states
    x = grid.x
    t_wave = 0.0  # both frames coincide at t=0
    tv, tu, tw, *_ = sample_shifted(profile, x, 0.0, t_wave, es.sigma)
    dv_f, du_f, dw_f = pert.fields(x)
    v = tv + dv_f
    u = tu + du_f

    floor = v_floor if v_floor is not None else es.v_minus / 3.0
    if np.min(v) <= floor:
        raise BlowUpError(
            f"initial perturbation drives v to {np.min(v):.4g} <= floor {floor:.4g}"
        )
    transition = profile.width()
    if transition / grid.dx < 20:
        raise ValueError(
            f"grid too coarse: {transition / grid.dx:.1f} cells across the transition, need >= 20"
        )

    if w_mode == "consistent":
        vp = np.concatenate(([es.v_minus], v, [es.v_plus]))
        v_x = (vp[2:] - vp[:-2]) / (2.0 * grid.dx)
        w = -v_x / v**2.5
    elif w_mode == "independent":
        w = tw + dw_f
    else:
        raise ValueError(f"unknown w_mode {w_mode!r}")
    return SimState(t=0.0, v=v, u=u, w=w, X=0.0, Xdot=0.0)


def w_consistency(state: SimState, grid: Grid1D, profile: ShockProfile) -> float:
    """Max-norm violation of the auxiliary-variable constraint w = -v_x / v^{5/2}."""
    es = profile.end_states
    vp = np.concatenate(([es.v_minus], state.v, [es.v_plus]))
    v_x = (vp[2:] - vp[:-2]) / (2.0 * grid.dx)
    return float(np.max(np.abs(state.w + v_x / state.v**2.5)))
