"""Per-step and per-trajectory evaluation of every measurable claim.

A :class:`DiagnosticsRecord` captures one saved instant: the three monitored
seminorms, the energy functional, temperature statistics and smallness-window
norms, the mechanical means, and the heating-source norms.  Trajectory-level
checks (energy decay between saves, the two-sided equivalence, the smallness
self-map window, decay-rate fits, and the limit temperature estimate) are
report-only: a failed inequality is recorded, never raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import ConstantsLedger
from .errors import (
    InsufficientData,
    MissingLedger,
    NonMonotoneMean,
    NonPositiveSeries,
)
from .gammas import GammaSpec
from .grid import d1_central, d2_neumann, d3_neumann, norm_linf, quad_trapz
from .model import Params, State, gamma_at_theta, source_h, theta_time_derivative

#: CSV schema of one record; the file header uses exactly this order.
CSV_FIELDS = [
    "t",
    "seminorm_wx2",
    "seminorm_vxx2",
    "seminorm_uxx2",
    "energy_y",
    "theta_min",
    "theta_max",
    "theta_mean",
    "theta_x_linf",
    "theta_xx_linf",
    "theta_t_linf",
    "mean_u",
    "mean_v",
    "mean_w",
    "h_linf",
    "h_x_l2",
    "te_satisfied",
    "two_sided_ok",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    t: float
    seminorm_wx2: float
    seminorm_vxx2: float
    seminorm_uxx2: float
    energy_y: float
    theta_min: float
    theta_max: float
    theta_mean: float
    theta_x_linf: float
    theta_xx_linf: float
    theta_t_linf: float
    mean_u: float
    mean_v: float
    mean_w: float
    h_linf: float
    h_x_l2: float
    te_satisfied: Optional[bool]
    two_sided_ok: Optional[bool]

    def csv_row(self) -> list:
        out = []
        for name in CSV_FIELDS:
            val = getattr(self, name)
            if val is None:
                out.append("")
            elif isinstance(val, bool):
                out.append("true" if val else "false")
            else:
                out.append(repr(float(val)))
        return out


@dataclass(frozen=True)
class TwoSidedReport:
    ok: bool
    margin_low: float
    margin_high: float
    gamma_in_band: bool
    seminorm_sum: float


def energy_y(
    state: State, params: Params, gamma: GammaSpec, ledger: ConstantsLedger
) -> float:
    """The weighted energy functional of the decay estimate.

    Sum of the ten terms

        tau/2 int w_x^2 + b/2 int g v_xx^2 + (B+b d)/2 int g u_xx^2
        + (alpha B - tau d)/2 int v_x^2 + int g u_xx v_xx
        + eps int g u_xxx^2 + (1+tau) B eps / 2 int v_xx^2
        + tau B int v_x w_x + tau d int u_x w_x + alpha d int u_x v_x

    with g = gamma(theta), B the frame constant, and d the smallness
    parameter delta, all evaluated with the discrete operators.
    """
    if ledger is None:
        raise MissingLedger("energy evaluation needs a constants ledger")
    g = state.grid
    gam = gamma_at_theta(state, gamma)
    tau, alpha, b, eps = params.tau, params.alpha, params.b, params.eps
    B, delta = ledger.B, ledger.delta

    wx = d1_central(g, state.w)
    vx = d1_central(g, state.v)
    ux = d1_central(g, state.u)
    vxx = d2_neumann(g, state.v)
    uxx = d2_neumann(g, state.u)

    total = (
        0.5 * tau * quad_trapz(g, wx * wx)
        + 0.5 * b * quad_trapz(g, gam * vxx * vxx)
        + 0.5 * (B + b * delta) * quad_trapz(g, gam * uxx * uxx)
        + 0.5 * (alpha * B - tau * delta) * quad_trapz(g, vx * vx)
        + quad_trapz(g, gam * uxx * vxx)
        + tau * B * quad_trapz(g, vx * wx)
        + tau * delta * quad_trapz(g, ux * wx)
        + alpha * delta * quad_trapz(g, ux * vx)
    )
    if eps > 0.0:
        uxxx = d3_neumann(g, state.u)
        total += eps * quad_trapz(g, gam * uxxx * uxxx)
        total += 0.5 * (1.0 + tau) * B * eps * quad_trapz(g, vxx * vxx)
    return float(total)


def seminorm_sum(state: State, params: Params) -> float:
    """int w_x^2 + int v_xx^2 + int u_xx^2 + eps int u_xxx^2."""
    g = state.grid
    total = (
        quad_trapz(g, d1_central(g, state.w) ** 2)
        + quad_trapz(g, d2_neumann(g, state.v) ** 2)
        + quad_trapz(g, d2_neumann(g, state.u) ** 2)
    )
    if params.eps > 0.0:
        total += params.eps * quad_trapz(g, d3_neumann(g, state.u) ** 2)
    return float(total)


def check_two_sided(
    state: State,
    params: Params,
    gamma: GammaSpec,
    ledger: ConstantsLedger,
    scale: float = None,
) -> TwoSidedReport:
    """Verify k1 * S <= y <= k2 * S and report both margins.

    The estimate is only guaranteed while gamma(theta) stays inside
    [gamma_star, gamma_upper]; leaving the band is reported, not fatal.
    Margins count as ok above -1e-10 * scale (scale defaults to |y|).
    """
    if ledger is None:
        raise MissingLedger("two-sided check needs a constants ledger")
    gam = gamma_at_theta(state, gamma)
    in_band = bool(
        np.min(gam) >= ledger.gamma_star and np.max(gam) <= ledger.gamma_upper
    )
    y = energy_y(state, params, gamma, ledger)
    s = seminorm_sum(state, params)
    margin_low = y - ledger.k1 * s
    margin_high = ledger.k2 * s - y
    if scale is None:
        scale = abs(y)
    tol = -1e-10 * max(scale, 1e-300)
    ok = margin_low >= tol and margin_high >= tol
    return TwoSidedReport(
        ok=ok,
        margin_low=float(margin_low),
        margin_high=float(margin_high),
        gamma_in_band=in_band,
        seminorm_sum=s,
    )


def h_diagnostics(state: State, params: Params, gamma: GammaSpec) -> tuple:
    """(sup |h|, ||h_x||_L2) of the viscous heating source."""
    g = state.grid
    h = source_h(state, params, gamma)
    hx = d1_central(g, h)
    return norm_linf(h), float(math.sqrt(quad_trapz(g, hx * hx)))


def smallness_window_ok(
    theta_max: float,
    theta_x_linf: float,
    theta_xx_linf: float,
    theta_t_linf: float,
    theta_star: float,
    eta: float,
) -> bool:
    """The temperature smallness window, from the recorded sup norms.

    Uses the sum of the three sup norms, which dominates the pointwise sum;
    the check is therefore conservative.
    """
    return bool(
        theta_max <= 2.0 * theta_star
        and theta_x_linf + theta_xx_linf + theta_t_linf <= eta
    )


def record_state(
    state: State,
    params: Params,
    gamma: GammaSpec,
    ledger: ConstantsLedger = None,
    eta: float = None,
    y_scale: float = None,
) -> tuple:
    """Build the DiagnosticsRecord for one state.

    Returns (record, two_sided_report); the report is None without a ledger.
    theta_t is evaluated from the heat equation itself rather than by
    differencing saves.
    """
    g = state.grid
    length = g.length

    wx = d1_central(g, state.w)
    vxx = d2_neumann(g, state.v)
    uxx = d2_neumann(g, state.u)
    sem_w = quad_trapz(g, wx * wx)
    sem_v = quad_trapz(g, vxx * vxx)
    sem_u = quad_trapz(g, uxx * uxx)

    theta = state.theta
    theta_min = float(np.min(theta))
    theta_max = float(np.max(theta))
    theta_mean = quad_trapz(g, theta) / length
    tx = norm_linf(d1_central(g, theta))
    txx = norm_linf(d2_neumann(g, theta))
    tt = norm_linf(theta_time_derivative(state, params, gamma))

    mean_u = quad_trapz(g, state.u) / length
    mean_v = quad_trapz(g, state.v) / length
    mean_w = quad_trapz(g, state.w) / length
    h_linf, h_x_l2 = h_diagnostics(state, params, gamma)

    two_sided = None
    e_y = float("nan")
    te_ok = None
    ts_ok = None
    if ledger is not None:
        e_y = energy_y(state, params, gamma, ledger)
        two_sided = check_two_sided(state, params, gamma, ledger, scale=y_scale)
        ts_ok = two_sided.ok
        eta_used = ledger.eta if eta is None else eta
        te_ok = smallness_window_ok(
            theta_max, tx, txx, tt, ledger.theta_star, eta_used
        )

    rec = DiagnosticsRecord(
        t=state.t,
        seminorm_wx2=sem_w,
        seminorm_vxx2=sem_v,
        seminorm_uxx2=sem_u,
        energy_y=e_y,
        theta_min=theta_min,
        theta_max=theta_max,
        theta_mean=theta_mean,
        theta_x_linf=tx,
        theta_xx_linf=txx,
        theta_t_linf=tt,
        mean_u=mean_u,
        mean_v=mean_v,
        mean_w=mean_w,
        h_linf=h_linf,
        h_x_l2=h_x_l2,
        te_satisfied=te_ok,
        two_sided_ok=ts_ok,
    )
    return rec, two_sided


# -- series fitting ------------------------------------------------------------

VALUE_FLOOR = 1e-300


@dataclass(frozen=True)
class DecayFit:
    rate: float
    amplitude: float
    goodness: float
    n_used: int
    oscillatory: bool


def _local_maxima(values: np.ndarray) -> np.ndarray:
    idx = np.nonzero(
        (values[1:-1] >= values[:-2]) & (values[1:-1] > values[2:])
    )[0]
    return idx + 1


def fit_decay(times, values, window: tuple = None) -> DecayFit:
    """Least-squares exponential fit: value ~ amplitude * exp(-rate * t).

    Fits log(value) against t.  Series whose discrete log-derivative changes
    sign more than three times are treated as oscillatory envelopes and
    fitted on their local maxima instead of all samples.  Zeros are floored
    at 1e-300; negative entries raise.
    """
    t = np.asarray(times, dtype=np.float64)
    v = np.asarray(values, dtype=np.float64)
    if window is not None:
        keep = (t >= window[0]) & (t <= window[1])
        t, v = t[keep], v[keep]
    if t.size < 10:
        raise InsufficientData(f"need at least 10 samples in window, got {t.size}")
    if np.min(v) < 0:
        raise NonPositiveSeries("series has negative entries")
    v = np.maximum(v, VALUE_FLOOR)

    logv = np.log(v)
    d = np.diff(logv)
    sign_changes = int(np.sum(d[1:] * d[:-1] < 0))
    oscillatory = sign_changes > 3
    if oscillatory:
        peaks = _local_maxima(v)
        if peaks.size >= 4:
            t_fit, log_fit = t[peaks], logv[peaks]
        else:
            t_fit, log_fit = t, logv
    else:
        t_fit, log_fit = t, logv

    if np.ptp(log_fit) == 0.0 or t_fit.size < 2:
        return DecayFit(
            rate=0.0,
            amplitude=float(np.exp(log_fit[0])),
            goodness=0.0,
            n_used=int(t_fit.size),
            oscillatory=oscillatory,
        )

    slope, intercept = np.polyfit(t_fit, log_fit, 1)
    corr = np.corrcoef(t_fit, log_fit)[0, 1]
    goodness = float(corr * corr) if np.isfinite(corr) else 0.0
    return DecayFit(
        rate=float(-slope),
        amplitude=float(np.exp(intercept)),
        goodness=goodness,
        n_used=int(t_fit.size),
        oscillatory=oscillatory,
    )


# -- trajectory-level checks ----------------------------------------------------


@dataclass(frozen=True)
class LyapunovReport:
    ok: bool
    worst_ratio: float
    n_violations: int
    first_violation_time: Optional[float]
    te_window_end: Optional[float]
    tolerance: float


def check_lyapunov(trajectory, ledger: ConstantsLedger) -> LyapunovReport:
    """Per-save-pair decay check y(t2) <= y(t1) exp(-kappa dt) (1 + tol).

    tol = 1e-6 + 10 dt^4 absorbs quadrature and time-stepping error; the
    report also carries the end of the window on which the smallness
    condition held (with the eta used during the run).
    """
    if ledger is None:
        raise MissingLedger("Lyapunov check needs a constants ledger")
    recs = trajectory.records
    dt = max((d for _, d in trajectory.dt_history), default=0.0)
    tol = 1e-6 + 10.0 * dt**4
    kappa = ledger.kappa

    worst = 0.0
    violations = 0
    first_t = None
    for a, b in zip(recs[:-1], recs[1:]):
        ya, yb = a.energy_y, b.energy_y
        if not (np.isfinite(ya) and np.isfinite(yb)) or ya <= VALUE_FLOOR:
            continue
        bound = ya * math.exp(-kappa * (b.t - a.t)) * (1.0 + tol)
        ratio = yb / bound
        worst = max(worst, ratio)
        if yb > bound:
            violations += 1
            if first_t is None:
                first_t = b.t

    te_end = None
    for r in recs:
        if r.te_satisfied is False:
            te_end = r.t
            break
    if te_end is None and recs:
        te_end = recs[-1].t

    return LyapunovReport(
        ok=violations == 0,
        worst_ratio=worst,
        n_violations=violations,
        first_violation_time=first_t,
        te_window_end=te_end,
        tolerance=tol,
    )


@dataclass(frozen=True)
class SelfmapReport:
    eta_used: float
    window_end: float
    loop_closed: bool


def check_selfmap(
    trajectory, ledger: ConstantsLedger, eta_override: float = None
) -> SelfmapReport:
    """First time the smallness window fails, re-evaluated from the records.

    With no violation the window end equals the final save time and the
    self-map loop closes (the run certifies its own smallness assumption).
    """
    if ledger is None:
        raise MissingLedger("self-map check needs a constants ledger")
    eta = ledger.eta if eta_override is None else float(eta_override)
    recs = trajectory.records
    for r in recs:
        ok = smallness_window_ok(
            r.theta_max,
            r.theta_x_linf,
            r.theta_xx_linf,
            r.theta_t_linf,
            ledger.theta_star,
            eta,
        )
        if not ok:
            return SelfmapReport(eta_used=eta, window_end=r.t, loop_closed=False)
    end = recs[-1].t if recs else 0.0
    return SelfmapReport(eta_used=eta, window_end=end, loop_closed=True)


def theta_deviation_series(trajectory) -> tuple:
    """(times, sup |theta - mean|) reconstructed from record statistics."""
    t = np.array([r.t for r in trajectory.records])
    dev = np.array(
        [
            max(r.theta_max - r.theta_mean, r.theta_mean - r.theta_min)
            for r in trajectory.records
        ]
    )
    return t, dev


def theta_infty_from_series(times, means) -> tuple:
    """Limit temperature from a nondecreasing mean series.

    The tail beyond the last sample is extrapolated by fitting the mean's
    growth rate dm/dt (midpoint increments) to an exponential a*exp(-r t)
    and adding its remaining integral (a/r) exp(-r t_end).  Returns
    (theta_infty, increment_rate or None).
    """
    t = np.asarray(times, dtype=np.float64)
    m = np.asarray(means, dtype=np.float64)
    if t.size < 2:
        raise InsufficientData("need at least 2 mean samples")
    scale = max(1.0, float(np.max(np.abs(m))))
    drops = np.diff(m)
    if np.min(drops) < -1e-12 * scale:
        raise NonMonotoneMean(
            f"mean series decreases by {-np.min(drops)} (tolerance {1e-12 * scale})"
        )

    grow = np.diff(m) / np.diff(t)
    mid = 0.5 * (t[1:] + t[:-1])
    pos = grow > 0.0
    if np.count_nonzero(pos) < 10:
        return float(m[-1]), None

    # fit the later half of the positive increments (past the transient)
    tp, gp = mid[pos], grow[pos]
    t_lo = tp[0] + 0.5 * (tp[-1] - tp[0])
    sel = tp >= t_lo
    if np.count_nonzero(sel) < 10:
        sel = np.ones_like(tp, dtype=bool)
    fit = fit_decay(tp[sel], gp[sel])
    if fit.rate <= 0.0:
        return float(m[-1]), fit.rate
    correction = fit.amplitude / fit.rate * math.exp(-fit.rate * t[-1])
    return float(m[-1] + correction), fit.rate


def estimate_theta_infty(trajectory) -> tuple:
    """(theta_infty, tail_rate) for a completed run.

    theta_infty extrapolates the nondecreasing spatial mean; tail_rate is
    the fitted decay rate of sup |theta - mean(t)|.
    """
    recs = trajectory.records
    t = np.array([r.t for r in recs])
    means = np.array([r.theta_mean for r in recs])
    theta_infty, _ = theta_infty_from_series(t, means)

    td, dev = theta_deviation_series(trajectory)
    tail_rate = 0.0
    if td.size >= 10 and np.max(dev) > 0:
        window = (td[0] + 0.1 * (td[-1] - td[0]), td[-1])
        tail_rate = fit_decay(td, dev, window=window).rate
    return theta_infty, tail_rate


# -- run summary -----------------------------------------------------------------


@dataclass(frozen=True)
class RunSummary:
    status: str
    rates: dict
    theta_infty: Optional[float]
    theta_tail_rate: Optional[float]
    kappa_theoretical: Optional[float]
    kappa_fitted: Optional[float]
    first_te_violation: Optional[float]
    checks: dict

    def to_json_dict(self) -> dict:
        rates = {
            name: None
            if fit is None
            else {
                "rate": fit.rate,
                "amplitude": fit.amplitude,
                "goodness": fit.goodness,
            }
            for name, fit in self.rates.items()
        }
        return {
            "status": self.status,
            "rates": rates,
            "theta_infty": self.theta_infty,
            "theta_tail_rate": self.theta_tail_rate,
            "kappa_theoretical": self.kappa_theoretical,
            "kappa_fitted": self.kappa_fitted,
            "first_te_violation": self.first_te_violation,
            "checks": self.checks,
        }


def _series(trajectory, name) -> tuple:
    t = np.array([r.t for r in trajectory.records])
    v = np.array([getattr(r, name) for r in trajectory.records])
    return t, v


def _safe_fit(t, v, window):
    try:
        return fit_decay(t, v, window=window)
    except (InsufficientData, NonPositiveSeries):
        return None


def build_summary(
    trajectory,
    params: Params,
    ledger: ConstantsLedger = None,
    fit_window: tuple = None,
) -> RunSummary:
    """Aggregate fits and boolean check outcomes for one trajectory."""
    recs = trajectory.records
    t = np.array([r.t for r in recs])
    if fit_window is None and t.size:
        fit_window = (t[0] + 0.25 * (t[-1] - t[0]), t[-1])

    rates = {}
    for name in ("seminorm_wx2", "seminorm_vxx2", "seminorm_uxx2"):
        _, v = _series(trajectory, name)
        rates[name] = _safe_fit(t, v, fit_window)
    td, dev = theta_deviation_series(trajectory)
    rates["theta_dev_linf"] = _safe_fit(td, dev, fit_window)

    kappa_fitted = None
    if ledger is not None:
        _, ys = _series(trajectory, "energy_y")
        fit = _safe_fit(t, ys, fit_window)
        kappa_fitted = None if fit is None else fit.rate

    theta_infty = None
    tail_rate = None
    try:
        theta_infty, tail_rate = estimate_theta_infty(trajectory)
    except (InsufficientData, NonMonotoneMean):
        pass

    sem_scale = max(
        (max(r.seminorm_wx2, r.seminorm_vxx2, r.seminorm_uxx2) for r in recs),
        default=0.0,
    )
    max_mean = max(
        (max(abs(r.mean_u), abs(r.mean_v), abs(r.mean_w)) for r in recs),
        default=0.0,
    )
    theta_nonneg = all(
        r.theta_min >= -1e-12 * max(1.0, r.theta_max) for r in recs
    )
    mean_drop = 0.0
    if len(recs) > 1:
        means = np.array([r.theta_mean for r in recs])
        mean_drop = float(max(0.0, -np.min(np.diff(means))))
    mean_scale = max(1.0, max((abs(r.theta_mean) for r in recs), default=0.0))

    checks = {
        "mass_max_abs_mean": max_mean,
        "mass_zero_mean_ok": bool(max_mean <= 1e-11 * (1.0 + sem_scale)),
        "theta_nonnegative_ok": bool(theta_nonneg),
        "theta_mean_max_drop": mean_drop,
        "theta_mean_nondecreasing_ok": bool(mean_drop <= 1e-12 * mean_scale),
        "two_sided_all_ok": all(
            r.two_sided_ok for r in recs if r.two_sided_ok is not None
        ),
        "te_all_ok": all(r.te_satisfied for r in recs if r.te_satisfied is not None),
    }
    if ledger is not None:
        lyap = check_lyapunov(trajectory, ledger)
        checks["lyapunov_ok"] = lyap.ok
        checks["lyapunov_worst_ratio"] = lyap.worst_ratio
        if trajectory.two_sided_margins:
            checks["two_sided_worst_low_margin"] = min(
                m[0] for m in trajectory.two_sided_margins
            )
            checks["two_sided_worst_high_margin"] = min(
                m[1] for m in trajectory.two_sided_margins
            )

    return RunSummary(
        status=trajectory.status.value,
        rates=rates,
        theta_infty=theta_infty,
        theta_tail_rate=tail_rate,
        kappa_theoretical=None if ledger is None else ledger.kappa,
        kappa_fitted=kappa_fitted,
        first_te_violation=trajectory.first_te_violation,
        checks=checks,
    )


def fit_empirical_constants(trajectory, a0: float, ledger: ConstantsLedger):
    """Fill the empirical ledger slots from a completed run.

    k4: prefactor/A of the exponential envelope of sup |h|;
    k5: excess of the temperature sup over its initial value, per unit A;
    k6: prefactor of the envelope of sup |theta_x|.
    """
    t, h = _series(trajectory, "h_linf")
    t2, tx = _series(trajectory, "theta_x_linf")
    k4 = k5 = k6 = None
    if a0 > 0 and t.size >= 10:
        fit_h = _safe_fit(t, h, None)
        if fit_h is not None and fit_h.rate > 0:
            k4 = fit_h.amplitude / a0
        fit_tx = _safe_fit(t2, tx, None)
        if fit_tx is not None and fit_tx.rate > 0:
            k6 = fit_tx.amplitude
        theta_max = max(r.theta_max for r in trajectory.records)
        theta_max0 = trajectory.records[0].theta_max
        k5 = max(0.0, theta_max - theta_max0) / a0
    return ledger.with_empirical(k4=k4, k5=k5, k6=k6)
