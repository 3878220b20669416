"""Traveling-wave profile of the viscous-dispersive shock.

The wave (v~, u~, w~)(xi), xi = x - sigma*t, satisfies a second-order ODE
for v~ obtained by integrating the traveling-wave system once from the left
far field:

    v~'' = f(v~) - sigma * v~^4 * v~' + (5/2) * v~'^2 / v~,
    f(v) = -v^5 * (sigma^2 (v - v_-) + p(v) - p(v_-)),

with u~ = u_- - sigma (v~ - v_-) and w~ = -v~' / v~^(5/2).  The left state is
a saddle, the right state a stable node (weak shock, monotone profile) or a
stable spiral (strong shock, oscillatory tail).  The default solver refines a
reduced slow-manifold guess with a collocation BVP; plain forward shooting
along the unstable manifold is kept as an independent cross-check.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.integrate import solve_bvp, solve_ivp
from scipy.interpolate import CubicSpline

from .gas import (
    AdmissibilityError,
    DomainError,
    EndStates,
    GasLaw,
    WaveConstants,
    wave_constants,
)


class ProfileSolveError(RuntimeError):
    """Profile solver failed to converge or to meet its residual targets."""


def profile_ode_rhs(law: GasLaw, es: EndStates, v, dv):
    """Second derivative of the profile: v'' as a function of (v, v')."""
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0.0):
        raise DomainError("profile volume must stay positive")
    dv = np.asarray(dv, dtype=float)
    f = -(v**5) * (es.sigma**2 * (v - es.v_minus) + law.p(v) - law.p(es.v_minus))
    return f - es.sigma * v**4 * dv + 2.5 * dv**2 / v


def end_state_rates(law: GasLaw, es: EndStates):
    """Linearized decay/growth rates of the profile at both end states.

    Returns (lam_unstable_left, rate_right, oscillatory) where rate_right is
    the decay rate of the approach to v_+ (|real part| for a spiral).
    """
    sig = es.sigma
    fp_minus = -(es.v_minus**5) * (sig**2 + law.dp(es.v_minus))
    lam_u = 0.5 * (-sig * es.v_minus**4 + np.sqrt(sig**2 * es.v_minus**8 + 4.0 * fp_minus))
    fp_plus = -(es.v_plus**5) * (sig**2 + law.dp(es.v_plus))
    disc = sig**2 * es.v_plus**8 + 4.0 * fp_plus
    if disc >= 0.0:
        # stable node; the slow eigenvalue dominates the tail
        rate_right = 0.5 * (sig * es.v_plus**4 - np.sqrt(disc))
        oscillatory = False
    else:
        rate_right = 0.5 * sig * es.v_plus**4
        oscillatory = True
    return float(lam_u), float(rate_right), oscillatory


def reduced_profile_guess(law: GasLaw, es: EndStates, xi):
    """Slow-manifold reduced profile (correction term dropped): a tanh front.

    Solves v' = c0 (v - v_-)(v_+ - v) with v(0) at the midpoint; used only as
    an initial guess for the collocation solver.
    """
    c0 = es.v_minus * law.d2p(es.v_minus) / (2.0 * es.sigma)
    delta = es.v_plus - es.v_minus
    xi = np.asarray(xi, dtype=float)
    th = np.tanh(0.5 * c0 * delta * xi)
    v = es.v_minus + 0.5 * delta * (1.0 + th)
    dv = 0.25 * c0 * delta**2 * (1.0 - th**2)
    return v, dv


@dataclass
class ProfileOptions:
    L: float | None = None  # half-length of the wave domain; None -> from tail rates
    n_points: int = 4001  # uniform export grid size
    method: str = "bvp"  # "bvp" (default) or "shooting" (cross-check)
    tail_tol: float | None = None  # end-value attainment target; None -> 1e-8 * delta_s
    bvp_tol: float = 1e-10
    max_nodes: int = 200_000
    n_mesh: int = 801  # initial collocation mesh (per full domain)
    adapt: bool = True  # allow mesh refinement; False fixes the mesh (order studies)
    residual_tol: float = 1e-8  # max-norm bound on the once-integrated ODE residual


@dataclass
class ShockProfile:
    """Densely sampled traveling wave with derivatives on its own grid.

    ``constants`` is None for shocks too strong to admit the completed-square
    coefficient; such profiles are legitimate outputs but cannot be used for
    the shift-coupled dynamics.
    """

    law: GasLaw
    end_states: EndStates
    constants: WaveConstants | None
    xi: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    dv: np.ndarray = field(repr=False)
    ddv: np.ndarray = field(repr=False)
    L: float = 0.0
    monotone: bool = True
    residual_max: float = np.nan
    tail_err_left: float = np.nan
    tail_err_right: float = np.nan
    tail_tol: float = np.nan
    method: str = "bvp"

    def __post_init__(self):
        self._sp_v = CubicSpline(self.xi, self.v)
        self._sp_dv = CubicSpline(self.xi, self.dv)
        self._sp_ddv = CubicSpline(self.xi, self.ddv)

    @property
    def u(self):
        es = self.end_states
        return es.u_minus - es.sigma * (self.v - es.v_minus)

    @property
    def w(self):
        return -self.dv / self.v**2.5

    def width(self, lo=0.1, hi=0.9):
        """Distance between the lo- and hi-level crossings of v~."""
        es = self.end_states
        delta = es.v_plus - es.v_minus
        x_lo = _first_crossing(self.xi, self.v, es.v_minus + lo * delta)
        x_hi = _first_crossing(self.xi, self.v, es.v_minus + hi * delta)
        return x_hi - x_lo


def _first_crossing(xi, vals, target):
    idx = np.nonzero((vals[:-1] - target) * (vals[1:] - target) <= 0.0)[0]
    if idx.size == 0:
        raise ValueError(f"no crossing of {target}")
    i = idx[0]
    t = (target - vals[i]) / (vals[i + 1] - vals[i])
    return float(xi[i] + t * (xi[i + 1] - xi[i]))


def sample_shifted(profile: ShockProfile, x, shift: float, t: float = 0.0, sigma: float | None = None):
    """Evaluate the shifted wave and its derivatives at xi = x - sigma*t - shift.

    Returns (v, u, w, dv, du, dw, ddv).  Outside [-L, L] the wave is clamped
    to its far-field constants with zero derivatives.
    """
    es = profile.end_states
    if sigma is None:
        sigma = es.sigma
    x = np.asarray(x, dtype=float)
    xi = x - sigma * t - shift
    inside = np.abs(xi) <= profile.L
    xi_c = np.clip(xi, -profile.L, profile.L)

    v = profile._sp_v(xi_c)
    dv = np.where(inside, profile._sp_dv(xi_c), 0.0)
    ddv = np.where(inside, profile._sp_ddv(xi_c), 0.0)
    v = np.where(xi < -profile.L, es.v_minus, v)
    v = np.where(xi > profile.L, es.v_plus, v)

    u = es.u_minus - sigma * (v - es.v_minus)
    w = -dv / v**2.5
    du = -sigma * dv
    dw = -ddv / v**2.5 + 2.5 * dv**2 / v**3.5
    return v, u, w, dv, du, dw, ddv


def _auto_half_length(law, es, tail_tol):
    lam_u, rate_right, _ = end_state_rates(law, es)
    delta = es.v_plus - es.v_minus
    c0 = es.v_minus * law.d2p(es.v_minus) / (2.0 * es.sigma)
    width_est = 4.4 / (c0 * delta)
    rate_min = min(lam_u, rate_right)
    return 1.25 * np.log(delta / tail_tol) / rate_min + width_est


def _bvp_fun(law, es, L, v_floor):
    sig = es.sigma
    vm, pm = es.v_minus, float(law.p(es.v_minus))
    g = law.gamma
    b = law.b

    def rhs(v, q):
        v = np.maximum(v, v_floor)
        f = -(v**5) * (sig**2 * (v - vm) + b * v**-g - pm)
        return f - sig * v**4 * q + 2.5 * q**2 / v

    def fun(s, y):
        return np.vstack([L * y[1], L * rhs(y[0], y[1]), L * y[3], L * rhs(y[2], y[3])])

    return fun


def _solve_profile_bvp(law, es, L, options):
    lam_u, _, _ = end_state_rates(law, es)
    v_mid = 0.5 * (es.v_minus + es.v_plus)
    fun = _bvp_fun(law, es, L, v_floor=0.05 * es.v_minus)

    def bc(ya, yb):
        return np.array(
            [
                ya[1] - lam_u * (ya[0] - es.v_minus),  # unstable-manifold exit at xi = -L
                yb[0] - v_mid,  # phase normalization at xi = 0
                ya[2] - yb[0],  # continuity of v across xi = 0
                ya[3] - yb[1],  # continuity of v' across xi = 0
            ]
        )

    n_half = max(options.n_mesh // 2, 41)
    s = np.linspace(0.0, 1.0, n_half)
    v_l, dv_l = reduced_profile_guess(law, es, -L * (1.0 - s))
    v_r, dv_r = reduced_profile_guess(law, es, L * s)
    y0 = np.vstack([v_l, dv_l, v_r, dv_r])

    max_nodes = n_half if not options.adapt else options.max_nodes
    sol = solve_bvp(fun, bc, s, y0, tol=options.bvp_tol, max_nodes=max_nodes)
    if options.adapt and sol.status != 0:
        raise ProfileSolveError(f"collocation failed: {sol.message} (L={L:.3g})")
    if not options.adapt and sol.status not in (0, 1):
        raise ProfileSolveError(f"collocation failed on fixed mesh: {sol.message}")
    return sol


def _extract_bvp(sol, L, xi):
    s_left = 1.0 + np.minimum(xi, 0.0) / L
    s_right = np.maximum(xi, 0.0) / L
    y_l = sol.sol(s_left)
    dy_l = sol.sol(s_left, 1)
    y_r = sol.sol(s_right)
    dy_r = sol.sol(s_right, 1)
    left = xi <= 0.0
    v = np.where(left, y_l[0], y_r[2])
    dv = np.where(left, y_l[1], y_r[3])
    ddv = np.where(left, dy_l[1], dy_r[3]) / L
    return v, dv, ddv


def _solve_profile_shooting(law, es, L, options):
    lam_u, _, _ = end_state_rates(law, es)
    tail_tol = options.tail_tol if options.tail_tol is not None else 1e-8 * es.delta_s
    eps0 = 0.25 * tail_tol
    v_mid = 0.5 * (es.v_minus + es.v_plus)

    def rhs(_xi, y):
        return [y[1], float(profile_ode_rhs(law, es, y[0], y[1]))]

    span = 6.0 * L

    def settled(_xi, y):
        return max(abs(y[0] - es.v_plus), abs(y[1])) - 0.05 * eps0

    settled.terminal = True
    settled.direction = -1
    sol = solve_ivp(
        rhs,
        (0.0, span),
        [es.v_minus + eps0, lam_u * eps0],
        method="DOP853",
        rtol=1e-12,
        atol=1e-16,
        dense_output=True,
        events=settled,
        max_step=L / 50.0,
    )
    if not sol.success:
        raise ProfileSolveError(f"shooting integration failed: {sol.message}")
    xi_dense = np.linspace(0.0, sol.t[-1], 20001)
    v_dense = sol.sol(xi_dense)[0]
    xi_mid = _first_crossing(xi_dense, v_dense, v_mid)

    xi = np.linspace(-L, L, options.n_points)
    tt = np.clip(xi + xi_mid, 0.0, sol.t[-1])
    y = sol.sol(tt)
    v, dv = y[0], y[1]
    v = np.where(xi + xi_mid < 0.0, es.v_minus, v)
    dv = np.where(xi + xi_mid < 0.0, 0.0, dv)
    v = np.where(xi + xi_mid > sol.t[-1], es.v_plus, v)
    dv = np.where(xi + xi_mid > sol.t[-1], 0.0, dv)
    ddv = profile_ode_rhs(law, es, v, dv)
    return xi, v, dv, ddv


def solve_profile(law: GasLaw, es: EndStates, options: ProfileOptions | None = None) -> ShockProfile:
    """Solve for the shock profile and resample it on a uniform grid.

    Oscillatory profiles (strong shocks) are returned flagged non-monotone;
    failure to meet the residual or tail targets raises ProfileSolveError.
    """
    options = options or ProfileOptions()
    try:
        wc = wave_constants(law, es)
    except AdmissibilityError:
        wc = None  # strong shock: profile still exists, dynamics do not
    tail_tol = options.tail_tol if options.tail_tol is not None else 1e-8 * es.delta_s
    L = options.L if options.L is not None else _auto_half_length(law, es, tail_tol)

    for attempt in range(3):
        if options.method == "shooting":
            xi, v, dv, ddv = _solve_profile_shooting(law, es, L, options)
        else:
            sol = _solve_profile_bvp(law, es, L, options)
            xi = np.linspace(-L, L, options.n_points)
            v, dv, ddv = _extract_bvp(sol, L, xi)

        tail_left = abs(v[0] - es.v_minus)
        tail_right = abs(v[-1] - es.v_plus)
        if max(tail_left, tail_right) <= tail_tol or options.L is not None:
            break
        L *= 1.5
    if max(tail_left, tail_right) > tail_tol:
        raise ProfileSolveError(
            f"tails not attained on [-L, L] with L={L:.4g}: "
            f"left {tail_left:.3e}, right {tail_right:.3e} > {tail_tol:.3e}"
        )

    residual = np.abs(ddv - profile_ode_rhs(law, es, v, dv))
    residual_max = float(np.max(residual))
    if options.method != "shooting" and options.adapt and residual_max > options.residual_tol:
        raise ProfileSolveError(
            f"once-integrated ODE residual {residual_max:.3e} exceeds {options.residual_tol:.1e}"
        )

    monotone = bool(np.min(dv) > -1e-6 * np.max(dv))
    return ShockProfile(
        law=law,
        end_states=es,
        constants=wc,
        xi=xi,
        v=v,
        dv=dv,
        ddv=ddv,
        L=float(L),
        monotone=monotone,
        residual_max=residual_max,
        tail_err_left=float(tail_left),
        tail_err_right=float(tail_right),
        tail_tol=float(tail_tol),
        method=options.method,
    )


@dataclass
class ProfileReport:
    monotone: bool
    tail_rate_left: float
    tail_rate_right: float
    deriv_bound_ratio: float  # max |v~''| / (delta_s |v~'|) over the interior
    equivalence_ratio: float  # max/min of |u~'/v~'|
    inflection_asymmetry: float  # |xi_inflection - xi_midpoint| / width
    width_10_90: float


def _fit_tail_rate(xi, dev, lo, hi, left):
    """Least-squares slope of log|dev| against xi over a deviation window."""
    mask = (dev > lo) & (dev < hi)
    mask &= (xi < 0.0) if left else (xi > 0.0)
    if np.count_nonzero(mask) < 8:
        return np.nan
    slope = np.polyfit(xi[mask], np.log(dev[mask]), 1)[0]
    return float(slope if left else -slope)


def profile_checks(profile: ShockProfile) -> ProfileReport:
    es = profile.end_states
    xi, v, dv, ddv = profile.xi, profile.v, profile.dv, profile.ddv
    delta = es.v_plus - es.v_minus

    lo = max(50.0 * profile.tail_tol, 1e-13)
    hi = 1e-3 * delta
    rate_left = _fit_tail_rate(xi, v - es.v_minus, lo, hi, left=True)
    rate_right = _fit_tail_rate(xi, np.abs(es.v_plus - v), lo, hi, left=False)

    mask = np.abs(dv) > 1e-6 * np.max(np.abs(dv))
    deriv_ratio = float(np.max(np.abs(ddv[mask]) / (es.delta_s * np.abs(dv[mask]))))
    ratios = np.abs(-es.sigma * dv[mask] / dv[mask])
    equivalence = float(np.max(ratios) / np.min(ratios))

    width = profile.width()
    xi_mid = _first_crossing(xi, v, 0.5 * (es.v_minus + es.v_plus))
    core = np.abs(xi) < 2.0 * width
    xi_infl = float(xi[core][np.argmax(dv[core])])
    asym = abs(xi_infl - xi_mid) / width

    return ProfileReport(
        monotone=profile.monotone,
        tail_rate_left=rate_left,
        tail_rate_right=rate_right,
        deriv_bound_ratio=deriv_ratio,
        equivalence_ratio=equivalence,
        inflection_asymmetry=float(asym),
        width_10_90=float(width),
    )


@dataclass
class DiffusionCheck:
    """Residual of the diffusion-coefficient estimate in the y-coordinate.

    The headline constant carries an ambiguous p-notation, so it is evaluated
    under both readings (curvature at the left or the right state); the sharp
    constant of the underlying two-sided chord expansion (prefactor 1/2,
    curvature at the left state, no speed-ratio factor) is reported as well.
    None of the three is asserted as the intended one.
    """

    skipped: bool
    max_residual_left_state: float
    max_residual_right_state: float
    max_residual_sharp: float
    min_coefficient: float
    y_window: tuple


def _curvature_ratio(law: GasLaw, v_ref: float):
    """v''(p)/v'(p)^2 for the inverse volume map v(p), evaluated at p(v_ref)."""
    g = law.gamma
    p = float(law.p(v_ref))
    v1 = -(1.0 / g) * p ** (-1.0 / g - 1.0)
    v2 = (1.0 / g) * (1.0 / g + 1.0) * p ** (-1.0 / g - 2.0)
    return v2 / v1**2


def diffusion_coefficient_check(profile: ShockProfile, wc: WaveConstants, y_window=(0.05, 0.95)) -> DiffusionCheck:
    if not profile.monotone:
        return DiffusionCheck(True, np.nan, np.nan, np.nan, np.nan, tuple(y_window))
    es, law = profile.end_states, profile.law
    delta = es.v_plus - es.v_minus
    y = (profile.v - es.v_minus) / delta
    mask = (y >= y_window[0]) & (y <= y_window[1])
    v, dv = profile.v[mask], profile.dv[mask]
    coeff = delta * dv / ((v - es.v_minus) * (es.v_plus - v) * v)
    pref = es.sigma / (2.0 * wc.sigma_ell) * es.delta_s
    k_left = pref * _curvature_ratio(law, es.v_minus)
    k_right = pref * _curvature_ratio(law, es.v_plus)
    k_sharp = 0.5 * es.delta_s * _curvature_ratio(law, es.v_minus)
    return DiffusionCheck(
        skipped=False,
        max_residual_left_state=float(np.max(np.abs(coeff - k_left))),
        max_residual_right_state=float(np.max(np.abs(coeff - k_right))),
        max_residual_sharp=float(np.max(np.abs(coeff - k_sharp))),
        min_coefficient=float(np.min(coeff)),
        y_window=tuple(y_window),
    )


def taylor_identity_check(law: GasLaw, v_minus: float, eps: float, n_samples: int = 2001) -> float:
    """Max residual of the two-sided chord/curvature identity on [v-, v- + eps]."""
    if eps <= 0.0:
        return 0.0
    v_plus = v_minus + eps
    v = np.linspace(v_minus + 1e-6 * eps, v_plus - 1e-6 * eps, n_samples)
    p = law.p(v)
    p_m, p_p = float(law.p(v_minus)), float(law.p(v_plus))
    curv = _curvature_ratio(law, v_minus)
    res = (p - p_m) / (v - v_minus) + (p - p_p) / (v_plus - v) + 0.5 * curv * (p_m - p_p)
    return float(np.max(np.abs(res)))


# ---------------------------------------------------------------------------
# export / import


PROFILE_CSV_HEADER = ["xi", "v", "u", "w", "dv", "ddv"]


def write_profile_csv(profile: ShockProfile, csv_path, sidecar_path=None):
    """Write the sampled profile as CSV plus a JSON sidecar of the end states
    and constants (all floats kept at full precision)."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_CSV_HEADER)
        cols = [profile.xi, profile.v, profile.u, profile.w, profile.dv, profile.ddv]
        for row in zip(*cols):
            writer.writerow([format(x, ".17g") for x in row])
    if sidecar_path is not None:
        meta = {
            "law": {"gamma": profile.law.gamma, "b": profile.law.b},
            "end_states": asdict(profile.end_states),
            "constants": None if profile.constants is None else asdict(profile.constants),
            "L": profile.L,
            "monotone": profile.monotone,
            "residual_max": profile.residual_max,
            "tail_err_left": profile.tail_err_left,
            "tail_err_right": profile.tail_err_right,
            "tail_tol": profile.tail_tol,
            "method": profile.method,
        }
        with open(sidecar_path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def read_profile_csv(csv_path, sidecar_path) -> ShockProfile:
    with open(sidecar_path) as fh:
        meta = json.load(fh)
    law = GasLaw(**meta["law"])
    es = EndStates(**meta["end_states"])
    wc = None if meta["constants"] is None else WaveConstants(**meta["constants"])
    data = np.genfromtxt(csv_path, delimiter=",", names=True)
    if list(data.dtype.names) != PROFILE_CSV_HEADER:
        raise ValueError(f"unexpected profile CSV columns: {data.dtype.names}")
    return ShockProfile(
        law=law,
        end_states=es,
        constants=wc,
        xi=data["xi"].copy(),
        v=data["v"].copy(),
        dv=data["dv"].copy(),
        ddv=data["ddv"].copy(),
        L=meta["L"],
        monotone=meta["monotone"],
        residual_max=meta["residual_max"],
        tail_err_left=meta["tail_err_left"],
        tail_err_right=meta["tail_err_right"],
        tail_tol=meta["tail_tol"],
        method=meta["method"],
    )
