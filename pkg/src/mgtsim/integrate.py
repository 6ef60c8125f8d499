"""Fixed-step explicit RK4 integration with CFL control and blow-up detection.

A run advances in blocks of ``save_stride`` steps through the stepping
backend (compiled extension or numpy fallback), recording a
:class:`~mgtsim.diagnostics.DiagnosticsRecord` at every block boundary.
Failures never raise: runs end in one of the statuses Completed, BlowUp
(a monitored norm passed the threshold), or NumericalFailure (NaN/Inf or a
nonpositive stiffness value mid-step).  Identical inputs produce identical
trajectories; there is no randomness and the step size is fixed apart from
CFL-driven shrinking when the temperature range grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import _core
from .constants import ConstantsLedger, compute_A
from .diagnostics import energy_y, record_state
from .errors import DegenerateRange, InvalidSpec, NonFiniteResult
from .gammas import GammaSpec, gamma_values, value_range
from .grid import Grid, d1_central, quad_trapz
from .model import Params, State, rhs


class RunStatus(Enum):
    COMPLETED = "Completed"
    BLOWUP = "BlowUp"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class TimeControl:
    """Stopping time, CFL safety factor, save cadence, and blow-up bar."""

    t_end: float
    cfl_factor: float = 0.4
    save_stride: int = 10
    blowup_threshold: float = 1e8

    def __post_init__(self):
        if not self.t_end > 0:
            raise InvalidSpec("t_end must be positive")
        if not 0.0 < self.cfl_factor <= 1.0:
            raise InvalidSpec("cfl_factor must lie in (0, 1]")
        if int(self.save_stride) < 1:
            raise InvalidSpec("save_stride must be a positive integer")
        object.__setattr__(self, "save_stride", int(self.save_stride))
        if not self.blowup_threshold > 0:
            raise InvalidSpec("blowup_threshold must be positive")


@dataclass
class Trajectory:
    """Saved diagnostics, final state, and the run outcome."""

    records: list
    final_state: State
    status: RunStatus
    dt_history: list
    a0: float
    y0: float
    blowup_time: Optional[float] = None
    failure_time: Optional[float] = None
    first_te_violation: Optional[float] = None
    two_sided_margins: list = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([r.t for r in self.records])

    def series(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])


def cfl_dt(
    grid: Grid,
    params: Params,
    gamma: GammaSpec,
    theta_range: tuple,
    cfl_factor: float = 0.4,
) -> float:
    """Stable step size for the explicit scheme.

    dt_max = min( h^2 tau / (4 b g_max),  h^2 / (4 D),
                  h^2 / (4 eps) [eps > 0 only],  sqrt(tau / g_max) h / 2 )

    with g_max the stiffness maximum over the given temperature range;
    returns cfl_factor * dt_max.  The formula is deliberately conservative;
    accuracy is established by refinement, not by this bound.
    """
    lo, hi = theta_range
    if not (np.isfinite(lo) and np.isfinite(hi) and 0.0 <= lo <= hi):
        raise DegenerateRange(f"invalid temperature range [{lo}, {hi}]")
    g_max = value_range(gamma, lo, hi)[1]
    # dense sample guard in case a family gains interior extrema
    sample_max = float(np.max(gamma_values(gamma, np.linspace(lo, hi, 512))))
    g_max = max(g_max, sample_max)

    h = grid.spacing
    terms = [
        h * h * params.tau / (4.0 * params.b * g_max),
        h * h / (4.0 * params.D),
        math.sqrt(params.tau / g_max) * h / 2.0,
    ]
    if params.eps > 0.0:
        terms.append(h * h / (4.0 * params.eps))
    return cfl_factor * min(terms)


def rk4_step(state: State, dt: float, params: Params, gamma: GammaSpec) -> State:
    """One classical four-stage step at the State level (reference path)."""
    if not dt > 0:
        raise InvalidSpec("dt must be positive")
    y = state.fields()
    k1 = rhs(state, params, gamma)
    s2 = State(state.t, state.grid, *(a + 0.5 * dt * b for a, b in zip(y, k1)))
    k2 = rhs(s2, params, gamma)
    s3 = State(state.t, state.grid, *(a + 0.5 * dt * b for a, b in zip(y, k2)))
    k3 = rhs(s3, params, gamma)
    s4 = State(state.t, state.grid, *(a + dt * b for a, b in zip(y, k3)))
    k4 = rhs(s4, params, gamma)
    new = [
        a + dt / 6.0 * (p + 2.0 * q + 2.0 * r + s)
        for a, p, q, r, s in zip(y, k1, k2, k3, k4)
    ]
    if not all(np.all(np.isfinite(f)) for f in new):
        raise NonFiniteResult("RK4 step produced NaN or Inf")
    return State(state.t + dt, state.grid, *new)


def _blowup_norms(grid: Grid, u, v, w, theta) -> float:
    """Largest of the four norms monitored by the extensibility criterion."""
    wl = float(np.max(np.abs(w)))
    tl = float(np.max(np.abs(theta)))
    vw = math.sqrt(
        quad_trapz(grid, v * v) + quad_trapz(grid, d1_central(grid, v) ** 2)
    )
    uw = math.sqrt(
        quad_trapz(grid, u * u) + quad_trapz(grid, d1_central(grid, u) ** 2)
    )
    return max(wl, tl, vw, uw)


def run_simulation(
    init: State,
    params: Params,
    gamma: GammaSpec,
    control: TimeControl,
    ledger: ConstantsLedger = None,
    eta_override: float = None,
) -> Trajectory:
    """Integrate from ``init`` to t_end, recording diagnostics each block.

    When a ledger is supplied, every save also evaluates the energy
    functional, the two-sided margins, and the temperature smallness window
    (with eta_override if given); the first window violation time is kept.
    """
    init.require_finite()
    grid = init.grid
    n = grid.n_nodes

    u = np.array(init.u)
    v = np.array(init.v)
    w = np.array(init.w)
    theta = np.array(init.theta)
    work = np.zeros((_core.N_WORK_ROWS, n))

    hi_used = max(0.0, float(np.max(theta)))
    dt = cfl_dt(grid, params, gamma, (0.0, hi_used), control.cfl_factor)
    dt_history = [(0.0, dt)]

    a0 = compute_A(init, params.eps)
    y0 = float("nan")
    records = []
    margins = []
    first_te = None

    def snapshot(t):
        return State(t, grid, u.copy(), v.copy(), w.copy(), theta.copy())

    def save(t):
        nonlocal first_te
        rec, two = record_state(
            snapshot(t), params, gamma, ledger=ledger, eta=eta_override,
            y_scale=None if math.isnan(y0) else y0,
        )
        records.append(rec)
        if two is not None:
            margins.append((two.margin_low, two.margin_high))
        if rec.te_satisfied is False and first_te is None:
            first_te = t
        return rec

    if ledger is not None:
        y0 = energy_y(init, params, gamma, ledger)

    status = RunStatus.COMPLETED
    blowup_time = None
    failure_time = None

    rec0 = save(0.0)
    t = 0.0
    t_end = control.t_end
    eps_t = 1e-12 * t_end
    kid = gamma.kernel_id
    kp = gamma.kernel_params

    if rec0.theta_min < -1e-12 * max(1.0, rec0.theta_max):
        status = RunStatus.NUMERICAL_FAILURE
        failure_time = 0.0
    elif _blowup_norms(grid, u, v, w, theta) > control.blowup_threshold:
        status = RunStatus.BLOWUP
        blowup_time = 0.0

    while status is RunStatus.COMPLETED and t < t_end - eps_t:
        m = min(control.save_stride, int((t_end - t) / dt + 1e-9))
        if m > 0:
            step = dt
        else:
            m, step = 1, t_end - t
        rc = _core.advance(
            u, v, w, theta, m, step, grid.spacing,
            params.tau, params.alpha, params.b, params.D, params.eps,
            kid, *kp, work,
        )
        if rc != 0:
            status = RunStatus.NUMERICAL_FAILURE
            failure_time = t + abs(rc) * step
            t = failure_time
            break
        t = t_end if step != dt else t + m * dt

        rec = save(t)
        if rec.theta_min < -1e-12 * max(1.0, rec.theta_max):
            status = RunStatus.NUMERICAL_FAILURE
            failure_time = t
            break
        if _blowup_norms(grid, u, v, w, theta) > control.blowup_threshold:
            status = RunStatus.BLOWUP
            blowup_time = t
            break

        # shrink dt if the running temperature range outgrew the one used
        theta_max_now = float(np.max(theta))
        if theta_max_now > 1.25 * max(hi_used, 1e-300):
            hi_used = 1.25 * theta_max_now
            dt_new = cfl_dt(grid, params, gamma, (0.0, hi_used), control.cfl_factor)
            if dt_new < dt:
                dt = dt_new
                dt_history.append((t, dt))

    return Trajectory(
        records=records,
        final_state=snapshot(t),
        status=status,
        dt_history=dt_history,
        a0=a0,
        y0=y0,
        blowup_time=blowup_time,
        failure_time=failure_time,
        first_te_violation=first_te,
        two_sided_margins=margins,
    )


def find_selfmap_amplitude(
    make_state,
    params: Params,
    gamma: GammaSpec,
    control: TimeControl,
    ledger: ConstantsLedger,
    eta_override: float,
    amp_hi: float = 1.0,
    n_iters: int = 12,
) -> tuple:
    """Bisect the largest mechanical amplitude keeping the smallness window.

    ``make_state(s)`` must build the initial state at amplitude scale s.
    Returns (largest closing amplitude found, smallest failing amplitude or
    None if even amp_hi closes).
    """
    from .diagnostics import check_selfmap

    def closes(s):
        traj = run_simulation(
            make_state(s), params, gamma, control,
            ledger=ledger, eta_override=eta_override,
        )
        if traj.status is not RunStatus.COMPLETED:
            return False
        return check_selfmap(traj, ledger, eta_override=eta_override).loop_closed

    if closes(amp_hi):
        return amp_hi, None
    lo, hi = 0.0, amp_hi
    if not closes(0.0):
        return 0.0, 0.0
    for _ in range(n_iters):
        mid = 0.5 * (lo + hi)
        if closes(mid):
            lo = mid
        else:
            hi = mid
    return lo, hi
