"""Weight, weighted relative entropy, dissipation functionals and decay reports.

All functionals are trapezoid quadratures on the PDE grid; perturbation
derivatives use the same central differences as the dynamics so that both
share one truncation-error family.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from .dynamics import Grid1D, SimState
from .gas import WaveConstants, relative_quantity
from .profile import ShockProfile, sample_shifted


def weight_eval(profile: ShockProfile, x, shift: float, t: float = 0.0):
    """Monotone weight a and its spatial derivative at xi = x - sigma*t - shift."""
    es = profile.end_states
    tv, tu, _w, tdv, *_ = sample_shifted(profile, x, shift, t, es.sigma)
    root = np.sqrt(es.delta_s)
    a = 1.0 + (es.u_minus - tu) / root
    a_x = es.sigma * tdv / root
    return a, a_x


def _pad_zero(q):
    return np.concatenate(([0.0], q, [0.0]))


def _ddx(q, dx):
    qp = _pad_zero(q)
    return (qp[2:] - qp[:-2]) / (2.0 * dx)


def _d2dx2(q, dx):
    qp = _pad_zero(q)
    return (qp[2:] - 2.0 * qp[1:-1] + qp[:-2]) / (dx * dx)


@dataclass
class DiagnosticsRecord:
    """One sampling time of every monitored functional.

    Column order of the CSV export follows the field order here.
    """

    t: float
    X: float
    Xdot: float
    rel_entropy_weighted: float
    G1: float
    G3: float
    GS: float
    Du1: float
    Du2: float
    Gw: float
    Gw1: float
    Gw2: float
    g: float
    sup_perturbation: float
    mass_res_v: float
    mass_res_u: float


DIAGNOSTICS_COLUMNS = [f.name for f in dc_fields(DiagnosticsRecord)]


def relative_entropy_field(state: SimState, profile: ShockProfile, X: float, grid: Grid1D, frame: str = "moving"):
    """Pointwise relative entropy against the shifted wave and its weighted integral."""
    es, law = profile.end_states, profile.law
    t_wave = state.t if frame == "lab" else 0.0
    tv, tu, tw, *_ = sample_shifted(profile, grid.x, X, t_wave, es.sigma)
    eta = (
        0.5 * (state.u - tu) ** 2
        + relative_quantity(law, "Q", state.v, tv)
        + 0.5 * (state.w - tw) ** 2
    )
    a, _ = weight_eval(profile, grid.x, X, t_wave)
    return eta, float(np.trapezoid(a * eta, dx=grid.dx))


def good_terms(
    state: SimState,
    profile: ShockProfile,
    X: float,
    constants: WaveConstants,
    grid: Grid1D,
    frame: str = "moving",
    mass_res=(np.nan, np.nan),
    c_star_override: float | None = None,
) -> DiagnosticsRecord:
    """All monitored functionals at one time.

    ``c_star_override`` exists for the negative-control mutation test; leave
    None for faithful evaluation.
    """
    es, law, dx = profile.end_states, profile.law, grid.dx
    t_wave = state.t if frame == "lab" else 0.0
    x = grid.x
    tv, tu, tw, tdv, tdu, tdw, _ = sample_shifted(profile, x, X, t_wave, es.sigma)
    a, a_x = weight_eval(profile, x, X, t_wave)
    c_star = c_star_override if c_star_override is not None else constants.c_star

    du = state.u - tu
    dv = state.v - tv
    dw = state.w - tw
    dpv = law.p(state.v) - law.p(tv)

    abs_ax = np.abs(a_x)
    G1 = np.trapezoid(abs_ax * (dpv - du / (2.0 * c_star)) ** 2, dx=dx)
    G3 = np.trapezoid(abs_ax * dw**2, dx=dx)
    GS = np.trapezoid(np.abs(tdv) * du**2, dx=dx)
    du_x = _ddx(du, dx)
    Du1 = np.trapezoid(du_x**2, dx=dx)
    Du2 = np.trapezoid(_d2dx2(du, dx) ** 2, dx=dx)
    Gw = np.trapezoid(dw**2, dx=dx)
    Gw1 = np.trapezoid(_ddx(dw, dx) ** 2, dx=dx)
    Gw2 = np.trapezoid(_d2dx2(dw, dx) ** 2, dx=dx)
    g = np.trapezoid(_ddx(dv, dx) ** 2, dx=dx) + Du1

    _eta, weighted = relative_entropy_field(state, profile, X, grid, frame)
    sup = float(np.max(np.hypot(dv, du)))

    return DiagnosticsRecord(
        t=float(state.t),
        X=float(X),
        Xdot=float(state.Xdot),
        rel_entropy_weighted=weighted,
        G1=float(G1),
        G3=float(G3),
        GS=float(GS),
        Du1=float(Du1),
        Du2=float(Du2),
        Gw=float(Gw),
        Gw1=float(Gw1),
        Gw2=float(Gw2),
        g=float(g),
        sup_perturbation=sup,
        mass_res_v=float(mass_res[0]),
        mass_res_u=float(mass_res[1]),
    )


def poincare_check(f_vals, y=None, fprime=None):
    """Both sides of the weighted mean-deviation inequality on [0, 1].

    lhs = int (f - mean f)^2, rhs = (1/2) int y(1-y) f'^2, computed by
    Simpson quadrature on the sample (exact for polynomial data of low degree).
    """
    from scipy.integrate import simpson

    f_vals = np.asarray(f_vals, dtype=float)
    y = np.linspace(0.0, 1.0, f_vals.size) if y is None else np.asarray(y, dtype=float)
    fp = np.gradient(f_vals, y) if fprime is None else np.asarray(fprime, dtype=float)
    mean = simpson(f_vals, x=y)
    lhs = simpson((f_vals - mean) ** 2, x=y)
    rhs = 0.5 * simpson(y * (1.0 - y) * fp**2, x=y)
    return float(lhs), float(rhs)


@dataclass
class DecayReport:
    n_records: int
    identically_small: bool
    entropy_decrease_fraction: float
    sup_ratio: float  # final / initial
    g_ratio: float
    xdot_final_over_max: float
    x_slope_first_third: float  # fitted d|X|/dt over the first third
    x_slope_final_third: float
    x_over_t_first_third: float  # mean |X(t)/t| over each window
    x_over_t_final_third: float
    sublinear: bool


def decay_report(records, transient_fraction: float = 0.05, small_tol: float = 1e-12) -> DecayReport:
    """Summarize a diagnostics series into the decay indicators."""
    if len(records) < 10:
        raise ValueError(f"need at least 10 records, got {len(records)}")
    t = np.array([r.t for r in records])
    ent = np.array([r.rel_entropy_weighted for r in records])
    sup = np.array([r.sup_perturbation for r in records])
    gser = np.array([r.g for r in records])
    xdot = np.abs([r.Xdot for r in records])
    xser = np.array([r.X for r in records])

    identically_small = bool(sup.max() < small_tol)
    skip = max(int(len(records) * transient_fraction), 1)
    if identically_small:
        frac = 1.0
        sup_ratio = g_ratio = 0.0
        xdot_ratio = 0.0
    else:
        diffs = np.diff(ent[skip:])
        frac = float(np.mean(diffs <= 0.0)) if diffs.size else np.nan
        sup_ratio = float(sup[-1] / sup[0]) if sup[0] > 0 else np.nan
        g_ratio = float(gser[-1] / gser[0]) if gser[0] > 0 else np.nan
        xdot_ratio = float(xdot[-1] / xdot.max()) if xdot.max() > 0 else 0.0

    third = len(records) // 3

    def slope(tt, xx):
        if len(tt) < 2:
            return np.nan
        return float(np.polyfit(tt, np.abs(xx), 1)[0])

    s_first = slope(t[:third], xser[:third])
    s_final = slope(t[-third:], xser[-third:])
    with np.errstate(divide="ignore", invalid="ignore"):
        x_over_t = np.abs(np.where(t > 0, xser / np.where(t > 0, t, 1.0), 0.0))
    return DecayReport(
        n_records=len(records),
        identically_small=identically_small,
        entropy_decrease_fraction=frac,
        sup_ratio=sup_ratio,
        g_ratio=g_ratio,
        xdot_final_over_max=xdot_ratio,
        x_slope_first_third=s_first,
        x_slope_final_third=s_final,
        x_over_t_first_third=float(np.mean(x_over_t[1:third])) if third > 1 else np.nan,
        x_over_t_final_third=float(np.mean(x_over_t[-third:])) if third > 1 else np.nan,
        sublinear=bool(abs(s_final) < abs(s_first)) if np.isfinite(s_first) else True,
    )


def write_diagnostics_csv(records, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(DIAGNOSTICS_COLUMNS)
        for r in records:
            writer.writerow([format(getattr(r, c), ".17g") for c in DIAGNOSTICS_COLUMNS])


def read_diagnostics_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != DIAGNOSTICS_COLUMNS:
            raise ValueError(f"unexpected diagnostics columns: {header}")
        return [DiagnosticsRecord(*[float(x) for x in row]) for row in reader]
