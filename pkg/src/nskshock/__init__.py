"""Numerical laboratory for viscous-dispersive shock waves of the 1D
barotropic Navier-Stokes-Korteweg system.

The package builds traveling-wave shock profiles, evolves perturbed data
under the shift-coupled dynamics, and measures the decay functionals the
stability theory is built from.
"""

from .gas import (
    AdmissibilityError,
    BoundReport,
    DomainError,
    EndStates,
    GasLaw,
    WaveConstants,
    check_relative_bounds,
    pressure_eval,
    relative_quantity,
    solve_end_states,
    solve_v_minus,
    wave_constants,
)
from .profile import (
    ProfileOptions,
    ProfileReport,
    ProfileSolveError,
    ShockProfile,
    diffusion_coefficient_check,
    profile_checks,
    profile_ode_rhs,
    read_profile_csv,
    sample_shifted,
    solve_profile,
    taylor_identity_check,
    write_profile_csv,
)

__version__ = "0.1.0"
