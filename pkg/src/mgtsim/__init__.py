"""Simulator and verification harness for a 1D thermoacoustic system.

The model couples a third-order-in-time wave equation (relaxed acoustics in
a standard linear solid) to a heat equation through a temperature-dependent
stiffness; this package integrates its regularized first-order form on a
uniform Neumann grid, evaluates the explicit Lyapunov constant chain of the
dissipation-dominated regime, and checks decay, mass, and temperature
stabilization claims against trajectories and a spectral oracle.
"""

from ._core import BACKEND
from .constants import ConstantsLedger, choose_frame, compute_A, compute_ledger
from .diagnostics import (
    DiagnosticsRecord,
    RunSummary,
    build_summary,
    check_lyapunov,
    check_selfmap,
    check_two_sided,
    energy_y,
    estimate_theta_infty,
    fit_decay,
    h_diagnostics,
)
from .gammas import GammaSpec, gamma_eval
from .grid import (
    Grid,
    build_grid,
    d1_central,
    d2_neumann,
    div_flux_neumann,
    mode_eigenvalue,
    norm_linf,
    quad_trapz,
)
from .integrate import (
    RunStatus,
    TimeControl,
    Trajectory,
    cfl_dt,
    find_selfmap_amplitude,
    rk4_step,
    run_simulation,
)
from .model import (
    InitSpec,
    Params,
    State,
    initial_smallness,
    make_initial_data,
    rhs,
    source_h,
    theta_time_derivative,
)
from .oracle import (
    ModeSpectrum,
    char_roots,
    predict_decay_rate,
    regularized_mode_matrix,
    routh_hurwitz_stable,
)
from .scenario import Scenario, SweepSpec, parse_scenario, parse_sweep

__version__ = "0.1.0"
