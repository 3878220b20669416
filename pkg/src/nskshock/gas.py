"""Gamma-law gas algebra: pressure, relative quantities, shock end states.

Everything downstream (wave profiles, dynamics, diagnostics) consumes the
objects defined here.  All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


class DomainError(ValueError):
    """Input outside the physical domain (e.g. nonpositive volume)."""


class AdmissibilityError(ValueError):
    """End states violate the entropy condition or are too strong."""


RH_TOL = 1e-12


def _check_positive(v, name="v"):
    arr = np.asarray(v)
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be positive and finite, got {v!r}")


@dataclass(frozen=True)
class GasLaw:
    """Pressure law p(v) = b v^(-gamma) with internal energy Q(v)."""

    gamma: float
    b: float = 1.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        if not self.b > 0.0:
            raise DomainError(f"b must be positive, got {self.b}")

    def p(self, v):
        _check_positive(v)
        return self.b * np.asarray(v, dtype=float) ** (-self.gamma)

    def dp(self, v):
        _check_positive(v)
        return -self.gamma * self.b * np.asarray(v, dtype=float) ** (-self.gamma - 1.0)

    def d2p(self, v):
        _check_positive(v)
        g = self.gamma
        return g * (g + 1.0) * self.b * np.asarray(v, dtype=float) ** (-g - 2.0)

    def Q(self, v):
        """Internal energy, satisfying Q'(v) = -p(v)."""
        _check_positive(v)
        return self.b * np.asarray(v, dtype=float) ** (1.0 - self.gamma) / (self.gamma - 1.0)

    def dQ(self, v):
        return -self.p(v)

    def v_of_p(self, p):
        """Inverse map of the pressure law."""
        _check_positive(p, "p")
        return (np.asarray(p, dtype=float) / self.b) ** (-1.0 / self.gamma)


def pressure_eval(law: GasLaw, v):
    """Evaluate (p, p', p'') at specific volume v (scalar or array)."""
    return law.p(v), law.dp(v), law.d2p(v)


def relative_quantity(law: GasLaw, name: str, v, w_ref):
    """F(v|w) = F(v) - F(w) - F'(w)(v - w) for F in {'p', 'Q'}.

    Nonnegative for both choices since p and Q are convex.
    """
    _check_positive(v)
    _check_positive(w_ref, "w_ref")
    v = np.asarray(v, dtype=float)
    w = np.asarray(w_ref, dtype=float)
    if name == "p":
        return law.p(v) - law.p(w) - law.dp(w) * (v - w)
    if name == "Q":
        return law.Q(v) - law.Q(w) - law.dQ(w) * (v - w)
    raise ValueError(f"unknown relative quantity {name!r}; expected 'p' or 'Q'")


@dataclass(frozen=True)
class EndStates:
    """Far-field states of a 2-shock together with its speed and strength."""

    v_minus: float
    v_plus: float
    u_minus: float
    u_plus: float
    sigma: float
    delta_s: float

    def rh_residuals(self, law: GasLaw):
        """Relative residuals of both jump conditions."""
        dv = self.v_plus - self.v_minus
        dp = law.p(self.v_plus) - law.p(self.v_minus)
        du = self.u_plus - self.u_minus
        r1 = abs(self.sigma**2 * dv + dp) / max(abs(dp), 1e-300)
        r2 = abs(du + self.sigma * dv) / max(abs(du), 1e-300)
        return r1, r2


def solve_end_states(law: GasLaw, v_minus: float, v_plus: float, u_plus: float = 0.0) -> EndStates:
    """Construct the 2-shock end states from (v-, v+, u+) via the jump conditions."""
    _check_positive(v_minus, "v_minus")
    _check_positive(v_plus, "v_plus")
    if not v_minus < v_plus:
        raise AdmissibilityError(
            f"entropy condition requires v_minus < v_plus, got {v_minus} >= {v_plus}"
        )
    dv = v_plus - v_minus
    sigma = float(np.sqrt(-(law.p(v_plus) - law.p(v_minus)) / dv))
    u_minus = float(u_plus + sigma * dv)
    es = EndStates(
        v_minus=float(v_minus),
        v_plus=float(v_plus),
        u_minus=u_minus,
        u_plus=float(u_plus),
        sigma=sigma,
        delta_s=u_minus - float(u_plus),
    )
    r1, r2 = es.rh_residuals(law)
    if max(r1, r2) > RH_TOL:
        raise AdmissibilityError(f"jump-condition residuals too large: {r1:.3e}, {r2:.3e}")
    return es


def solve_v_minus(law: GasLaw, v_plus: float, delta_s: float, u_plus: float = 0.0) -> EndStates:
    """Find the left state giving shock strength u- - u+ = delta_s."""
    _check_positive(v_plus, "v_plus")
    if delta_s <= 0.0:
        raise AdmissibilityError(f"delta_s must be positive, got {delta_s}")

    def strength(vm):
        dv = v_plus - vm
        return np.sqrt(-(law.p(v_plus) - law.p(vm)) / dv) * dv - delta_s

    lo = 1e-6 * v_plus
    hi = v_plus * (1.0 - 1e-12)
    if strength(hi) > 0 or strength(lo) < 0:
        raise AdmissibilityError(f"no left state with strength {delta_s} for v_plus={v_plus}")
    vm = brentq(strength, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return solve_end_states(law, vm, v_plus, u_plus)


@dataclass(frozen=True)
class WaveConstants:
    """O(1) constants attached to a shock: left sound speed, curvature scale,
    completed-square coefficient and shift gain."""

    sigma_ell: float
    alpha_ell: float
    c_star: float
    m_shift: float
    speed_gap_over_strength: float  # |sigma - sigma_ell| / delta_s, reported

    @property
    def K(self):
        return self.speed_gap_over_strength


def wave_constants(law: GasLaw, es: EndStates) -> WaveConstants:
    """Derive the O(1) constants; rejects shocks strong enough that the
    completed-square coefficient loses positivity."""
    sigma_ell = float(np.sqrt(-law.dp(es.v_minus)))
    alpha_ell = (law.gamma + 1.0) / (2.0 * law.gamma * sigma_ell * law.p(es.v_minus))
    ds = es.delta_s
    c_star = 0.5 * (
        1.0 / sigma_ell
        - (np.sqrt(ds) + ds) * (law.gamma + 1.0) / (law.gamma * law.p(es.v_minus))
    )
    if c_star <= 0.0:
        raise AdmissibilityError(
            f"shock too strong: completed-square coefficient {c_star:.3e} <= 0"
        )
    m_shift = 1.25 * sigma_ell**3 * alpha_ell
    return WaveConstants(
        sigma_ell=sigma_ell,
        alpha_ell=float(alpha_ell),
        c_star=float(c_star),
        m_shift=float(m_shift),
        speed_gap_over_strength=abs(es.sigma - sigma_ell) / ds,
    )


@dataclass(frozen=True)
class BoundReport:
    """Empirical constants for the relative-quantity bounds near a reference
    state.  The constants are reported, not asserted against fixed thresholds."""

    n_samples: int
    n_in_range_quadratic: int
    c_quadratic_Q: float  # smallest C with |v-vbar|^2 <= C Q(v|vbar)
    c_quadratic_p: float  # smallest C with |v-vbar|^2 <= C p(v|vbar)
    n_in_range_lipschitz: int
    c_lipschitz: float  # smallest C with |p(v)-p(vbar)| <= C |v-vbar|
    delta: float
    n_in_range_pressure_window: int
    c_upper_p: float  # slack constant in the quadratic upper bound on p(v|vbar)
    c_upper_Q: float  # slack constant in the quadratic upper bound on Q(v|vbar)
    lower_Q_margin: float  # min of Q(v|vbar) minus its quadratic-cubic lower bound


def check_relative_bounds(law: GasLaw, v, vbar, v_plus: float, delta: float = 0.01) -> BoundReport:
    """Evaluate the relative-quantity inequalities on paired samples (v, vbar).

    Out-of-range pairs are excluded per inequality rather than rejected.  The
    pressure-window inequalities use the supplied ``delta``.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    vbar = np.atleast_1d(np.asarray(vbar, dtype=float))
    if v.shape != vbar.shape:
        raise ValueError("v and vbar must have matching shapes")
    _check_positive(v)
    _check_positive(vbar, "vbar")

    diff2 = (v - vbar) ** 2
    pv, pb = law.p(v), law.p(vbar)
    dp = pv - pb
    relQ = relative_quantity(law, "Q", v, vbar)
    relp = relative_quantity(law, "p", v, vbar)
    nontrivial = diff2 > 0

    in1 = (vbar < 2.0 * v_plus) & (v < 3.0 * v_plus) & nontrivial
    c_q = float(np.max(diff2[in1] / relQ[in1])) if np.any(in1) else np.nan
    c_p = float(np.max(diff2[in1] / relp[in1])) if np.any(in1) else np.nan

    in2 = (v > 0.5 * v_plus) & (vbar > 0.5 * v_plus) & nontrivial
    c_lip = float(np.max(np.abs(dp[in2]) / np.abs(v - vbar)[in2])) if np.any(in2) else np.nan

    g = law.gamma
    in3 = (np.abs(dp) < delta) & (np.abs(pb - law.p(v_plus)) < delta) & nontrivial
    if np.any(in3):
        base_p = (g + 1.0) / (2.0 * g) / pb[in3]
        base_Q = pb[in3] ** (-1.0 / g - 1.0) / (2.0 * g)
        dp3 = dp[in3]
        c_up_p = float(np.max((relp[in3] / dp3**2 - base_p) / delta))
        c_up_Q = float(np.max((relQ[in3] / dp3**2 - base_Q) / delta))
        lower = base_Q * dp3**2 - (1.0 + g) / (3.0 * g**2) * pb[in3] ** (-1.0 / g - 2.0) * dp3**3
        lower_margin = float(np.min(relQ[in3] - lower))
    else:
        c_up_p = c_up_Q = lower_margin = np.nan

    return BoundReport(
        n_samples=int(v.size),
        n_in_range_quadratic=int(np.count_nonzero(in1)),
        c_quadratic_Q=c_q,
        c_quadratic_p=c_p,
        n_in_range_lipschitz=int(np.count_nonzero(in2)),
        c_lipschitz=c_lip,
        delta=float(delta),
        n_in_range_pressure_window=int(np.count_nonzero(in3)),
        c_upper_p=c_up_p,
        c_upper_Q=c_up_Q,
        lower_Q_margin=lower_margin,
    )
