"""Weight, relative entropy, dissipation functionals, decay indicators."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nskshock.diagnostics import (
    DIAGNOSTICS_COLUMNS,
    DiagnosticsRecord,
    decay_report,
    good_terms,
    poincare_check,
    read_diagnostics_csv,
    relative_entropy_field,
    weight_eval,
    write_diagnostics_csv,
)
from nskshock.dynamics import Grid1D, Perturbation, SimState, init_state
from nskshock.gas import GasLaw, solve_v_minus, wave_constants
from nskshock.profile import sample_shifted, solve_profile

LAW = GasLaw(5.0 / 3.0)


@pytest.fixture(scope="module")
def setup():
    es = solve_v_minus(LAW, 0.7, 0.05)
    prof = solve_profile(LAW, es)
    wc = wave_constants(LAW, es)
    grid = Grid1D(-160.0, 160.0, 1001)
    return es, prof, wc, grid


class TestWeight:
    def test_far_field_limits(self, setup):
        es, prof, wc, grid = setup
        a, ax = weight_eval(prof, np.array([-prof.L - 10, prof.L + 10]), 0.0)
        assert a[0] == pytest.approx(1.0, abs=1e-12)
        assert a[1] == pytest.approx(1.0 + np.sqrt(es.delta_s), abs=1e-12)
        assert np.all(ax == 0.0)

    def test_midpoint_value(self, setup):
        # at the normalization point u~ = (u- + u+)/2, so a = 1 + sqrt(ds)/2
        es, prof, wc, grid = setup
        a, _ = weight_eval(prof, np.array([0.0]), 0.0)
        assert a[0] == pytest.approx(1.0 + 0.5 * np.sqrt(es.delta_s), abs=1e-12)

    def test_pointwise_bounds_and_monotone_slope(self, setup):
        es, prof, wc, grid = setup
        a, ax = weight_eval(prof, grid.x, 0.3)
        assert np.all(a >= 1.0 - 1e-14)
        assert np.all(a <= 1.0 + np.sqrt(es.delta_s) + 1e-14)
        assert 1.0 + np.sqrt(es.delta_s) < 1.5
        assert np.all(ax >= 0.0)


class TestRelativeEntropy:
    def test_zero_perturbation(self, setup):
        es, prof, wc, grid = setup
        tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
        state = SimState(0.0, tv.copy(), tu.copy(), tw.copy(), 0.0)
        eta, integral = relative_entropy_field(state, prof, 0.0, grid)
        assert np.max(np.abs(eta)) <= 1e-14
        assert integral <= 1e-12

    def test_velocity_only_perturbation_closed_form(self, setup):
        es, prof, wc, grid = setup
        tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
        eps = 0.01 * np.exp(-((grid.x / 10.0) ** 2))
        state = SimState(0.0, tv.copy(), tu + eps, tw.copy(), 0.0)
        eta, integral = relative_entropy_field(state, prof, 0.0, grid)
        a, _ = weight_eval(prof, grid.x, 0.0)
        expected = np.trapezoid(0.5 * a * eps**2, dx=grid.dx)
        assert integral == pytest.approx(expected, rel=1e-12)

    def test_norm_equivalence_bracket(self, setup):
        es, prof, wc, grid = setup
        rng = np.random.default_rng(5)
        ratios = []
        for _ in range(20):
            tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
            bump = lambda: rng.normal() * 0.01 * np.exp(-(((grid.x - rng.uniform(-50, 50)) / 8) ** 2))
            state = SimState(0.0, tv + bump(), tu + bump(), tw + bump(), 0.0)
            _, integral = relative_entropy_field(state, prof, 0.0, grid)
            l2 = np.trapezoid(
                (state.v - tv) ** 2 + (state.u - tu) ** 2 + (state.w - tw) ** 2, dx=grid.dx
            )
            ratios.append(integral / l2)
        assert 0.0 < min(ratios) <= max(ratios) < np.inf
        assert max(ratios) / min(ratios) < 5.0  # stable bracket across states


class TestGoodTerms:
    def test_zero_perturbation_all_zero(self, setup):
        es, prof, wc, grid = setup
        tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
        state = SimState(0.0, tv.copy(), tu.copy(), tw.copy(), 0.0)
        rec = good_terms(state, prof, 0.0, wc, grid)
        for name in ("rel_entropy_weighted", "G1", "G3", "GS", "Du1", "Du2", "Gw", "Gw1", "Gw2", "g"):
            assert getattr(rec, name) <= 1e-12, name

    def test_consistent_init_stays_at_discretization_level(self, setup):
        es, prof, wc, grid = setup
        state = init_state(prof, grid, Perturbation(kind="none"))
        rec = good_terms(state, prof, 0.0, wc, grid)
        for name in ("rel_entropy_weighted", "G1", "G3", "GS", "Du1", "Du2", "Gw", "Gw1", "Gw2", "g"):
            assert getattr(rec, name) <= 1e-8, name

    def test_completed_square_kernel_annihilates_G1(self, setup):
        es, prof, wc, grid = setup
        tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
        v = tv + 1e-3 * np.exp(-((grid.x / 10.0) ** 2))
        u = tu + 2.0 * wc.c_star * (LAW.p(v) - LAW.p(tv))
        state = SimState(0.0, v, u, tw.copy(), 0.0)
        rec = good_terms(state, prof, 0.0, wc, grid)
        assert rec.G1 <= 1e-18
        assert rec.GS > 0.0

    def test_flipped_constant_breaks_kernel(self, setup):
        es, prof, wc, grid = setup
        tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
        v = tv + 1e-3 * np.exp(-((grid.x / 10.0) ** 2))
        u = tu + 2.0 * wc.c_star * (LAW.p(v) - LAW.p(tv))
        state = SimState(0.0, v, u, tw.copy(), 0.0)
        rec = good_terms(state, prof, 0.0, wc, grid, c_star_override=-wc.c_star)
        assert rec.G1 > 1e-12

    def test_all_functionals_nonnegative_on_random_states(self, setup):
        es, prof, wc, grid = setup
        rng = np.random.default_rng(11)
        tv, tu, tw, *_ = sample_shifted(prof, grid.x, 0.0, 0.0, es.sigma)
        for _ in range(10):
            state = SimState(
                0.0,
                tv + 0.02 * rng.standard_normal(grid.n) * np.exp(-((grid.x / 40) ** 2)),
                tu + 0.02 * rng.standard_normal(grid.n) * np.exp(-((grid.x / 40) ** 2)),
                tw + 0.02 * rng.standard_normal(grid.n) * np.exp(-((grid.x / 40) ** 2)),
                X=rng.uniform(-1, 1),
            )
            rec = good_terms(state, prof, state.X, wc, grid)
            for name in ("rel_entropy_weighted", "G1", "G3", "GS", "Du1", "Du2", "Gw", "Gw1", "Gw2", "g"):
                assert getattr(rec, name) >= 0.0, name


class TestPoincare:
    def test_constant_function(self):
        lhs, rhs = poincare_check(np.full(501, 3.7), fprime=np.zeros(501))
        assert lhs == pytest.approx(0.0, abs=1e-14)
        assert rhs == pytest.approx(0.0, abs=1e-14)

    def test_linear_equality_case(self):
        y = np.linspace(0.0, 1.0, 2001)
        lhs, rhs = poincare_check(y, y, np.ones_like(y))
        assert lhs == pytest.approx(1.0 / 12.0, abs=1e-10)
        assert rhs == pytest.approx(1.0 / 12.0, abs=1e-10)

    def test_thousand_random_polynomials(self):
        rng = np.random.default_rng(2024)
        y = np.linspace(0.0, 1.0, 2001)
        for _ in range(1000):
            coef = rng.normal(size=rng.integers(2, 10))
            f = np.polyval(coef, y)
            fp = np.polyval(np.polyder(coef), y)
            lhs, rhs = poincare_check(f, y, fp)
            assert lhs <= rhs * (1.0 + 1e-8) + 1e-12

    @given(st.lists(st.floats(-3, 3), min_size=2, max_size=9))
    @settings(max_examples=120, deadline=None)
    def test_inequality_property(self, coef):
        y = np.linspace(0.0, 1.0, 801)
        f = np.polyval(coef, y)
        fp = np.polyval(np.polyder(np.asarray(coef)), y)
        lhs, rhs = poincare_check(f, y, fp)
        assert lhs <= rhs * (1.0 + 1e-8) + 1e-12


def _mk_record(t, ent, sup, g, xd, x):
    return DiagnosticsRecord(t, x, xd, ent, 0, 0, 0, 0, 0, 0, 0, 0, g, sup, 0.0, 0.0)


class TestDecayReport:
    def test_too_short_series_rejected(self):
        with pytest.raises(ValueError):
            decay_report([_mk_record(0, 1, 1, 1, 1, 0)] * 9)

    def test_decaying_series(self):
        t = np.linspace(0, 100, 60)
        recs = [
            _mk_record(tt, np.exp(-0.05 * tt), np.exp(-0.03 * tt), np.exp(-0.04 * tt),
                       0.01 * np.exp(-0.02 * tt), 2 * (1 - np.exp(-0.02 * tt)))
            for tt in t
        ]
        rep = decay_report(recs)
        assert rep.entropy_decrease_fraction == 1.0
        assert rep.sup_ratio < 0.1
        assert rep.xdot_final_over_max < 0.2
        assert rep.sublinear
        assert rep.x_over_t_final_third < rep.x_over_t_first_third

    def test_reversed_series_flips_detector(self):
        t = np.linspace(0, 100, 60)
        recs = [
            _mk_record(tt, np.exp(-0.05 * tt), np.exp(-0.03 * tt), np.exp(-0.04 * tt), 0.01, 0.0)
            for tt in t
        ]
        forward = decay_report(recs)
        backward = decay_report(
            [_mk_record(t[i], recs[-1 - i].rel_entropy_weighted, 1, 1, 0.01, 0.0) for i in range(len(t))]
        )
        assert forward.entropy_decrease_fraction >= 0.95
        assert backward.entropy_decrease_fraction < 0.5

    def test_zero_perturbation_guard(self):
        recs = [_mk_record(tt, 1e-17, 1e-14, 1e-16, 0.0, 0.0) for tt in np.linspace(0, 10, 20)]
        rep = decay_report(recs)
        assert rep.identically_small
        assert rep.sup_ratio == 0.0


class TestCsv:
    def test_roundtrip_and_columns(self, tmp_path):
        recs = [_mk_record(float(i), 1.0 / (1 + i), 0.5, 0.25, 0.1, 0.01 * i) for i in range(12)]
        path = tmp_path / "diag.csv"
        write_diagnostics_csv(recs, path)
        header = path.read_text().splitlines()[0]
        assert header == ",".join(DIAGNOSTICS_COLUMNS)
        assert header.startswith("t,X,Xdot,rel_entropy_weighted,G1,G3,GS,Du1,Du2,Gw,Gw1,Gw2,g,sup_perturbation")
        back = read_diagnostics_csv(path)
        assert back == recs
