"""Experiment orchestration: configs, single runs, sweeps, verification battery.

Emitted artifacts: profile CSV + JSON sidecar, diagnostics CSV, snapshot CSVs,
run manifest JSON, sweep aggregate CSV, verification report JSON.  Reruns of a
fixed config byte-reproduce the diagnostics CSV on one platform.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .diagnostics import (
    DecayReport,
    decay_report,
    good_terms,
    poincare_check,
    write_diagnostics_csv,
)
from .dynamics import (
    BlowUpError,
    Grid1D,
    InstabilityError,
    NSKModel,
    Perturbation,
    SimState,
    init_state,
    w_consistency,
)
from .gas import GasLaw, check_relative_bounds, solve_end_states, solve_v_minus, wave_constants
from .profile import (
    ProfileOptions,
    ShockProfile,
    diffusion_coefficient_check,
    profile_checks,
    solve_profile,
    taylor_identity_check,
    write_profile_csv,
)


# ---------------------------------------------------------------------------
# configuration


@dataclass
class LawConfig:
    gamma: float = 5.0 / 3.0


@dataclass
class EndStatesConfig:
    v_plus: float = 0.7
    u_plus: float = 0.0
    v_minus: float | None = None  # give either v_minus or delta_s
    delta_s: float | None = 0.05


@dataclass
class ProfileConfig:
    L: float | None = None
    n: int = 4001
    tail_tol: float | None = None
    method: str = "bvp"


@dataclass
class GridConfig:
    n: int | None = None  # None -> from dx_target
    L_dom: float | None = None  # None -> from strength and wave width
    frame: str = "moving"
    dx_target: float = 1.0 / 3.0


@dataclass
class SchemeConfig:
    kind: str = "rk4"
    cfl: float = 0.2
    dt_override: float | None = None


@dataclass
class PerturbationConfig:
    kind: str = "gaussian_bump"
    amp_v: float = 0.0
    amp_u: float = 0.01
    amp_w: float = 0.0
    center: float = 0.0
    width: float | None = None  # None -> 1/delta_s
    seed: int = 0
    w_mode: str = "consistent"


@dataclass
class RunConfig:
    law: LawConfig = field(default_factory=LawConfig)
    end_states: EndStatesConfig = field(default_factory=EndStatesConfig)
    profile: ProfileConfig = field(default_factory=ProfileConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    perturbation: PerturbationConfig = field(default_factory=PerturbationConfig)
    t_final: float | None = None  # None -> 50 / delta_s
    diag_cadence: float = 1.0
    snapshot_cadence: float | None = None
    sponge: bool = True
    v_floor_factor: float = 1.0 / 3.0
    out_dir: str | None = None
    seed: int = 0

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in d:
                continue
            val = d.pop(f.name)
            sub = {
                "law": LawConfig,
                "end_states": EndStatesConfig,
                "profile": ProfileConfig,
                "grid": GridConfig,
                "scheme": SchemeConfig,
                "perturbation": PerturbationConfig,
            }.get(f.name)
            kwargs[f.name] = sub(**val) if sub is not None and isinstance(val, dict) else val
        if d:
            raise ValueError(f"unknown config keys: {sorted(d)}")
        return cls(**kwargs)


def set_by_path(d: dict, path: str, value):
    """Apply a dotted-key override onto a nested config dict, parsing the value
    as a JSON literal when possible."""
    keys = path.split(".")
    node = d
    for k in keys[:-1]:
        if k not in node or not isinstance(node[k], dict):
            raise KeyError(f"unknown config section {k!r} in {path!r}")
        node = node[k]
    if keys[-1] not in node:
        raise KeyError(f"unknown config key {path!r}")
    try:
        node[keys[-1]] = json.loads(value)
    except (json.JSONDecodeError, TypeError):
        node[keys[-1]] = value


# ---------------------------------------------------------------------------
# problem assembly


def build_end_states(cfg: RunConfig):
    law = GasLaw(cfg.law.gamma)
    ec = cfg.end_states
    if ec.v_minus is not None:
        es = solve_end_states(law, ec.v_minus, ec.v_plus, ec.u_plus)
    elif ec.delta_s is not None:
        es = solve_v_minus(law, ec.v_plus, ec.delta_s, ec.u_plus)
    else:
        raise ValueError("end_states needs either v_minus or delta_s")
    return law, es


def build_profile(cfg: RunConfig):
    law, es = build_end_states(cfg)
    opts = ProfileOptions(
        L=cfg.profile.L,
        n_points=cfg.profile.n,
        tail_tol=cfg.profile.tail_tol,
        method=cfg.profile.method,
    )
    return law, es, solve_profile(law, es, opts)


def build_grid(cfg: RunConfig, profile: ShockProfile, t_final: float):
    es = profile.end_states
    L_dom = cfg.grid.L_dom
    if L_dom is None:
        L_dom = max(8.0 / es.delta_s, 4.0 * profile.width())
        if cfg.grid.frame == "lab":
            L_dom += 1.2 * es.sigma * t_final
    n = cfg.grid.n
    if n is None:
        n = int(math.ceil(2.0 * L_dom / cfg.grid.dx_target)) + 1
        n += 1 - n % 2  # odd, so x = 0 is a node
    return Grid1D(-L_dom, L_dom, n)


def build_model(cfg: RunConfig, profile: ShockProfile, grid: Grid1D) -> NSKModel:
    return NSKModel(
        grid,
        profile,
        frame=cfg.grid.frame,
        sponge=cfg.sponge,
        v_floor=cfg.v_floor_factor * profile.end_states.v_minus,
        cfl=cfg.scheme.cfl,
    )


# ---------------------------------------------------------------------------
# single run


@dataclass
class RunResult:
    config: RunConfig
    records: list
    final_state: SimState
    w_consistency_series: list
    grid: Grid1D | None = None
    aborted: bool = False
    abort_report: dict | None = None

    def report(self) -> DecayReport:
        return decay_report(self.records)


def evolve(cfg: RunConfig, snapshot_sink=None) -> RunResult:
    """Integrate the configured scenario, sampling diagnostics at the cadence.

    ``snapshot_sink(state, grid)`` receives states at the snapshot cadence.
    Deterministic for a fixed config.
    """
    law, es, profile = build_profile(cfg)
    wc = wave_constants(law, es)
    t_final = cfg.t_final if cfg.t_final is not None else 50.0 / es.delta_s
    grid = build_grid(cfg, profile, t_final)
    model = build_model(cfg, profile, grid)

    pc = cfg.perturbation
    width = pc.width if pc.width is not None else 1.0 / es.delta_s
    pert = Perturbation(
        kind=pc.kind,
        amp_v=pc.amp_v,
        amp_u=pc.amp_u,
        amp_w=pc.amp_w,
        center=pc.center,
        width=width,
        seed=pc.seed if pc.seed else cfg.seed,
    )
    state = init_state(profile, grid, pert, w_mode=pc.w_mode, frame=cfg.grid.frame)

    dt_stable = model.stable_dt(state)
    dt = dt_stable if cfg.scheme.dt_override is None else min(cfg.scheme.dt_override, dt_stable)
    if cfg.scheme.kind == "imex":
        dt = cfg.scheme.dt_override if cfg.scheme.dt_override is not None else grid.dx * cfg.scheme.cfl

    records = []
    wcons = []
    mass_v = float(np.sum(state.v) * grid.dx)
    mass_u = float(np.sum(state.u) * grid.dx)
    budget_v = budget_u = 0.0
    last_mass = (mass_v, mass_u, 0.0, 0.0, 0.0)  # mass_v, mass_u, budv, budu, t

    def sample(st):
        nonlocal last_mass
        mv = float(np.sum(st.v) * grid.dx)
        mu = float(np.sum(st.u) * grid.dx)
        dt_s = st.t - last_mass[4]
        if dt_s > 0:
            res_v = (mv - last_mass[0] - (budget_v - last_mass[2])) / dt_s
            res_u = (mu - last_mass[1] - (budget_u - last_mass[3])) / dt_s
        else:
            res_v = res_u = 0.0
        last_mass = (mv, mu, budget_v, budget_u, st.t)
        records.append(
            good_terms(st, profile, st.X, wc, grid, frame=cfg.grid.frame, mass_res=(res_v, res_u))
        )
        wcons.append((st.t, w_consistency(st, grid, profile)))

    sample(state)
    if snapshot_sink is not None:
        snapshot_sink(state, grid)

    next_diag = cfg.diag_cadence
    next_snap = cfg.snapshot_cadence if cfg.snapshot_cadence is not None else np.inf
    aborted = False
    abort_report = None
    try:
        while state.t < t_final - 1e-12:
            step_dt = min(dt, t_final - state.t)
            state, budget = model.step(state, step_dt, cfg.scheme.kind)
            budget_v += budget[0]
            budget_u += budget[1]
            if state.t >= next_diag - 1e-9:
                sample(state)
                next_diag += cfg.diag_cadence
            if state.t >= next_snap - 1e-9:
                if snapshot_sink is not None:
                    snapshot_sink(state, grid)
                next_snap += cfg.snapshot_cadence
    except (BlowUpError, InstabilityError) as err:
        aborted = True
        abort_report = {"error": type(err).__name__, "message": str(err), **err.report}
        sample(state)

    return RunResult(
        config=cfg,
        records=records,
        final_state=state,
        w_consistency_series=wcons,
        grid=grid,
        aborted=aborted,
        abort_report=abort_report,
    )


def write_snapshot_csv(state: SimState, grid: Grid1D, path):
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["x", "v", "u", "w"])
        for row in zip(grid.x, state.v, state.u, state.w):
            writer.writerow([format(x, ".17g") for x in row])


def write_manifest(cfg: RunConfig, grid: Grid1D | None, path, extra=None):
    manifest = {
        "version": __version__,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "scheme": cfg.scheme.kind,
    }
    if grid is not None:
        manifest["grid"] = {"x_min": grid.x_min, "x_max": grid.x_max, "n": grid.n, "dx": grid.dx}
    if extra:
        manifest.update(extra)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_profile_command(cfg: RunConfig, out_dir) -> dict:
    """Solve the profile and emit CSV + sidecar + report JSON."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    law, es, profile = build_profile(cfg)
    write_profile_csv(profile, out / "profile.csv", out / "profile_meta.json")
    rep = profile_checks(profile)
    rep_d = dataclasses.asdict(rep)
    if profile.constants is not None:
        diff = diffusion_coefficient_check(profile, profile.constants)
        rep_d["diffusion_check"] = dataclasses.asdict(diff)
    with open(out / "profile_report.json", "w") as fh:
        json.dump(rep_d, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_manifest(cfg, None, out / "manifest.json")
    return rep_d


def run_simulate_command(cfg: RunConfig, out_dir) -> RunResult:
    """Run the scenario and emit diagnostics CSV, snapshots, and manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counter = {"k": 0}

    def sink(state, grid):
        write_snapshot_csv(state, grid, out / f"snapshot_{counter['k']:05d}.csv")
        counter["k"] += 1

    result = evolve(cfg, snapshot_sink=sink if cfg.snapshot_cadence is not None else None)
    write_diagnostics_csv(result.records, out / "diagnostics.csv")
    import csv as _csv

    with open(out / "w_consistency.csv", "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["t", "w_consistency"])
        for t, val in result.w_consistency_series:
            writer.writerow([format(t, ".17g"), format(val, ".17g")])
    extra = {"aborted": result.aborted}
    if result.abort_report:
        extra["abort_report"] = result.abort_report
    write_manifest(cfg, result.grid, out / "manifest.json", extra)
    return result


# ---------------------------------------------------------------------------
# verification battery


def _fit_loglog(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def run_verify(cfg: RunConfig | None = None, flip_cstar_sign: bool = False) -> dict:
    """Property battery: relative-quantity bounds, weighted mean-deviation
    inequality, chord/curvature identity scaling, diffusion-coefficient
    scaling, completed-square kernel.

    ``flip_cstar_sign`` corrupts the completed-square constant; it exists as a
    negative control and must make the kernel check fail.
    """
    cfg = cfg or RunConfig()
    law = GasLaw(cfg.law.gamma)
    v_plus = cfg.end_states.v_plus
    report = {}

    # relative-quantity bounds: empirical constants stable under refinement,
    # plus the pressure-window item on a dedicated near-reference sample
    def bounds_at(n):
        gridv = np.linspace(0.45 * v_plus / 0.7, 0.95 * v_plus / 0.7, n)
        vv, bb = np.meshgrid(gridv, gridv)
        return check_relative_bounds(law, vv.ravel(), bb.ravel(), v_plus=v_plus)

    coarse, fine = bounds_at(60), bounds_at(120)
    rel_change = max(
        abs(fine.c_quadratic_Q - coarse.c_quadratic_Q) / fine.c_quadratic_Q,
        abs(fine.c_quadratic_p - coarse.c_quadratic_p) / fine.c_quadratic_p,
        abs(fine.c_lipschitz - coarse.c_lipschitz) / fine.c_lipschitz,
    )
    rng0 = np.random.default_rng(12345)
    delta = 0.01
    vb = law.v_of_p(law.p(v_plus) + rng0.uniform(-0.9 * delta, 0.9 * delta, 5000))
    vv = law.v_of_p(law.p(vb) + rng0.uniform(-0.9 * delta, 0.9 * delta, 5000))
    window = check_relative_bounds(law, vv, vb, v_plus=v_plus, delta=delta)
    report["relative_bounds"] = {
        "pass": bool(
            np.isfinite(fine.c_quadratic_Q)
            and np.isfinite(fine.c_quadratic_p)
            and np.isfinite(fine.c_lipschitz)
            and rel_change < 0.1
            and window.n_in_range_pressure_window > 1000
            and window.lower_Q_margin > -1e-12
            and np.isfinite(window.c_upper_p)
            and np.isfinite(window.c_upper_Q)
        ),
        "c_quadratic_Q": fine.c_quadratic_Q,
        "c_quadratic_p": fine.c_quadratic_p,
        "c_lipschitz": fine.c_lipschitz,
        "refinement_change": rel_change,
        "window_lower_Q_margin": window.lower_Q_margin,
        "window_c_upper_p": window.c_upper_p,
        "window_c_upper_Q": window.c_upper_Q,
    }

    # weighted mean-deviation inequality on random polynomials + equality case
    rng = np.random.default_rng(cfg.seed)
    y = np.linspace(0.0, 1.0, 2001)
    worst = -np.inf
    ok = True
    for _ in range(1000):
        coef = rng.normal(size=rng.integers(2, 10))
        f = np.polyval(coef, y)
        fp = np.polyval(np.polyder(coef), y)
        lhs, rhs = poincare_check(f, y, fp)
        margin = lhs - rhs * (1.0 + 1e-8)
        worst = max(worst, margin)
        ok = ok and margin <= 1e-12
    lhs_eq, rhs_eq = poincare_check(y, y, np.ones_like(y))
    eq_err = max(abs(lhs_eq - 1.0 / 12.0), abs(rhs_eq - 1.0 / 12.0))
    report["poincare"] = {
        "pass": bool(ok and eq_err < 1e-10),
        "worst_margin": worst,
        "equality_case_error": eq_err,
    }

    # chord/curvature identity scaling
    eps_list = [0.02, 0.01, 0.005]
    tay = [taylor_identity_check(law, 0.65, e) for e in eps_list]
    tay_slope = _fit_loglog(eps_list, tay)
    report["taylor_identity"] = {
        "pass": bool(tay_slope >= 1.8),
        "slope": tay_slope,
        "residuals": tay,
    }

    # diffusion-coefficient scaling across the strength sweep
    ds_list = [0.02, 0.04, 0.08]
    res_left, res_right = [], []
    for ds in ds_list:
        es = solve_v_minus(law, v_plus, ds)
        prof = solve_profile(law, es)
        chk = diffusion_coefficient_check(prof, prof.constants)
        res_left.append(chk.max_residual_left_state)
        res_right.append(chk.max_residual_right_state)
    slope_left = _fit_loglog(ds_list, res_left)
    slope_right = _fit_loglog(ds_list, res_right)
    report["diffusion_scaling"] = {
        "pass": bool(max(slope_left, slope_right) >= 1.8),
        "slope_curvature_at_left_state": slope_left,
        "slope_curvature_at_right_state": slope_right,
        "residuals_left": res_left,
        "residuals_right": res_right,
    }

    # completed-square kernel: states on the kernel must annihilate G1
    es = solve_v_minus(law, v_plus, cfg.end_states.delta_s or 0.05)
    prof = solve_profile(law, es)
    wc = wave_constants(law, es)
    grid = Grid1D(-8.0 / es.delta_s, 8.0 / es.delta_s, 1001)
    from .profile import sample_shifted

    tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
    v = tv + 1e-3 * np.exp(-((grid.x / 10.0) ** 2))
    c_eval = -wc.c_star if flip_cstar_sign else wc.c_star
    u = tu + 2.0 * c_eval * (law.p(v) - law.p(tv))
    state = SimState(t=0.0, v=v, u=u, w=tw.copy(), X=0.0)
    rec = good_terms(state, prof, 0.0, wc, grid)
    kernel_ok = rec.G1 <= 1e-18 and rec.GS > 0.0
    report["g1_kernel"] = {"pass": bool(kernel_ok), "G1": rec.G1, "GS": rec.GS}

    report["all_pass"] = bool(all(v["pass"] for k, v in report.items() if isinstance(v, dict)))
    return report


# ---------------------------------------------------------------------------
# sweeps


def _sweep_one(args):
    cfg_dict, param, value, task = args
    d = json.loads(cfg_dict)
    set_by_path(d, param, json.dumps(value))
    cfg = RunConfig.from_dict(d)
    row = {"param": param, "value": value, "status": "ok"}
    try:
        law, es, prof = build_profile(cfg)
        rep = profile_checks(prof)
        row.update(
            delta_s=es.delta_s,
            monotone=rep.monotone,
            tail_rate_left=rep.tail_rate_left,
            tail_rate_right=rep.tail_rate_right,
            width=rep.width_10_90,
            residual_max=prof.residual_max,
        )
        if prof.constants is not None and prof.monotone:
            chk = diffusion_coefficient_check(prof, prof.constants)
            row.update(
                diffusion_residual_left=chk.max_residual_left_state,
                diffusion_residual_right=chk.max_residual_right_state,
            )
        if task == "simulate":
            result = evolve(cfg)
            rep2 = result.report()
            row.update(
                sup_ratio=rep2.sup_ratio,
                entropy_decrease_fraction=rep2.entropy_decrease_fraction,
                aborted=result.aborted,
            )
    except Exception as err:  # noqa: BLE001 - sub-run failures are recorded, sweep continues
        row["status"] = f"failed: {type(err).__name__}: {err}"
    return row


def run_sweep(cfg: RunConfig, param: str, values, task: str = "profile", out_dir=None, max_workers=None) -> dict:
    """Run independent configs concurrently and aggregate summaries.

    For strength sweeps the aggregate includes fitted scaling exponents of the
    tail rates (expected ~1) and diffusion residuals (expected ~2).
    """
    if not values:
        raise ValueError("sweep needs a nonempty value list")
    set_by_path(cfg.to_dict(), param, json.dumps(values[0]))  # validate the key early
    cfg_json = json.dumps(cfg.to_dict())
    jobs = [(cfg_json, param, v, task) for v in values]
    if max_workers == 1 or len(jobs) == 1:
        rows = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=max_workers or min(len(jobs), os.cpu_count() or 1)) as pool:
            rows = list(pool.map(_sweep_one, jobs))

    fits = {}
    ok_rows = [r for r in rows if r["status"] == "ok"]
    if param.endswith("delta_s") and len(ok_rows) >= 2:
        ds = [r["delta_s"] for r in ok_rows]
        for key, name in [
            ("tail_rate_left", "tail_rate_left_vs_delta_s"),
            ("tail_rate_right", "tail_rate_right_vs_delta_s"),
            ("diffusion_residual_left", "diffusion_residual_left_vs_delta_s"),
            ("diffusion_residual_right", "diffusion_residual_right_vs_delta_s"),
        ]:
            vals = [r.get(key) for r in ok_rows]
            if all(v is not None and np.isfinite(v) and v > 0 for v in vals):
                fits[name] = _fit_loglog(ds, vals)

    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        cols = sorted({k for r in rows for k in r})
        import csv as _csv

        with open(out / "sweep.csv", "w", newline="") as fh:
            writer = _csv.writer(fh)
            writer.writerow(cols)
            for r in rows:
                writer.writerow(
                    [
                        format(r[c], ".17g") if isinstance(r.get(c), float) else r.get(c, "")
                        for c in cols
                    ]
                )
        with open(out / "sweep_fits.json", "w") as fh:
            json.dump(fits, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return {"rows": rows, "fits": fits}
