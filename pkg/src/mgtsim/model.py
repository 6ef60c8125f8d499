"""Physical parameters, state carrier, semi-discrete right-hand side, and
initial data built from Neumann-compatible cosine modes.

The evolved system is the first-order form in (u, v, w, theta) with v = u_t
and w = u_tt:

    u_t     = eps u_xx + v
    v_t     = eps v_xx + w
    tau w_t = eps w_xx + b (g(theta) v_x)_x + (g(theta) u_x)_x - alpha w
    theta_t = D theta_xx + b g(theta) v_x^2

with homogeneous Neumann conditions on all four fields.  eps = 0 selects the
unregularized target system directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSpec, NonFiniteState, NonPositiveGamma
from .gammas import GammaSpec, gamma_values
from .grid import (
    Grid,
    cosine_mode,
    d1_central,
    d1_raw,
    d2_neumann,
    d2_raw,
    div_flux_raw,
    norm_linf,
    quad_trapz,
)


@dataclass(frozen=True)
class Params:
    """Coefficients of the coupled system; eps >= 0 is the regularization."""

    tau: float
    alpha: float
    b: float
    D: float
    eps: float = 0.0

    def __post_init__(self):
        for name in ("tau", "alpha", "b", "D"):
            if not getattr(self, name) > 0:
                raise InvalidSpec(f"params.{name} must be positive")
        if self.eps < 0:
            raise InvalidSpec("params.eps must be nonnegative")

    @property
    def dissipation_dominated(self) -> bool:
        """True in the decaying parameter regime alpha * b > tau."""
        return self.alpha * self.b > self.tau


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class State:
    """The four nodal fields at one time instant, on a shared grid."""

    t: float
    grid: Grid
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    w: np.ndarray = field(repr=False)
    theta: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = self.grid.n_nodes
        for name in ("u", "v", "w", "theta"):
            arr = _frozen(getattr(self, name))
            if arr.shape != (n,):
                raise NonFiniteState(f"{name} has shape {arr.shape}, expected ({n},)")
            object.__setattr__(self, name, arr)

    def require_finite(self) -> "State":
        for name in ("u", "v", "w", "theta"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise NonFiniteState(f"state field {name} contains NaN or Inf")
        return self

    def fields(self) -> tuple:
        return self.u, self.v, self.w, self.theta


def gamma_at_theta(state: State, gamma: GammaSpec) -> np.ndarray:
    """g(theta) nodal values; raises if the coefficient is not positive."""
    g = gamma_values(gamma, state.theta)
    if np.min(g) <= 0.0:
        raise NonPositiveGamma("gamma(theta) reached a nonpositive value")
    return g


def source_h(state: State, params: Params, gamma: GammaSpec) -> np.ndarray:
    """Viscous heating density b * g(theta) * v_x^2 (zero at the walls)."""
    state.require_finite()
    g = gamma_at_theta(state, gamma)
    vx = d1_raw(state.v, state.grid.spacing)
    return params.b * g * vx * vx


def rhs(state: State, params: Params, gamma: GammaSpec) -> tuple:
    """Semi-discrete time derivative (du, dv, dw, dtheta)."""
    state.require_finite()
    h = state.grid.spacing
    g = gamma_at_theta(state, gamma)
    u, v, w, theta = state.fields()

    if params.eps > 0.0:
        du = params.eps * d2_raw(u, h) + v
        dv = params.eps * d2_raw(v, h) + w
        dw_visc = params.eps * d2_raw(w, h)
    else:
        du = v.copy()
        dv = w.copy()
        dw_visc = 0.0

    dw = (
        dw_visc
        + params.b * div_flux_raw(g, v, h)
        + div_flux_raw(g, u, h)
        - params.alpha * w
    ) / params.tau
    vx = d1_raw(v, h)
    dtheta = params.D * d2_raw(theta, h) + params.b * g * vx * vx
    return du, dv, dw, dtheta


def theta_time_derivative(state: State, params: Params, gamma: GammaSpec) -> np.ndarray:
    """theta_t evaluated from the heat equation itself.

    Used both for the |theta_t| entries of the smallness window and for the
    admissibility bound on initial data.
    """
    state.require_finite()
    return params.D * d2_raw(state.theta, state.grid.spacing) + source_h(
        state, params, gamma
    )


@dataclass(frozen=True)
class InitSpec:
    """Cosine-mode initial data.

    ``u_modes[k-1]`` is the amplitude of cos(k pi x / L) in u0, and likewise
    for v0 (= u_t at t=0) and w0 (= u_tt at t=0); modes k >= 1 integrate to
    zero, so the mechanical fields start with exactly zero mean.  The
    temperature starts at ``theta_baseline + theta_amplitude * cos(k pi x/L)``
    with |amplitude| <= baseline, which keeps theta0 >= 0.
    """

    u_modes: tuple = ()
    v_modes: tuple = ()
    w_modes: tuple = ()
    theta_baseline: float = 0.0
    theta_mode_k: int = 1
    theta_amplitude: float = 0.0

    def __post_init__(self):
        for name in ("u_modes", "v_modes", "w_modes"):
            object.__setattr__(
                self, name, tuple(float(a) for a in getattr(self, name))
            )
        if self.theta_baseline < 0:
            raise InvalidSpec("theta baseline must be nonnegative")
        if abs(self.theta_amplitude) > self.theta_baseline:
            raise InvalidSpec(
                "theta mode amplitude must not exceed the baseline "
                "(theta0 would go negative)"
            )
        if self.theta_mode_k < 1:
            raise InvalidSpec("theta mode index must be >= 1")


def _superpose(grid: Grid, amplitudes) -> np.ndarray:
    out = np.zeros(grid.n_nodes)
    for k, a in enumerate(amplitudes, start=1):
        if a != 0.0:
            out += a * cosine_mode(grid, k)
    return out


def make_initial_data(spec: InitSpec, grid: Grid) -> State:
    """Build the t=0 state from an :class:`InitSpec`."""
    theta = spec.theta_baseline + spec.theta_amplitude * cosine_mode(
        grid, spec.theta_mode_k
    )
    np.maximum(theta, 0.0, out=theta)  # clip roundoff at the min-zero touchpoint
    return State(
        t=0.0,
        grid=grid,
        u=_superpose(grid, spec.u_modes),
        v=_superpose(grid, spec.v_modes),
        w=_superpose(grid, spec.w_modes),
        theta=theta,
    )


def initial_smallness(state: State) -> dict:
    """Discrete smallness quantities of the admissible-data conditions.

    Returns the mechanical sum  int u0_xx^2 + int v0_xx^2 + int w0_x^2,
    the temperature sum  ||theta0_x||_inf + ||theta0_xx||_inf,  and the
    three mechanical means (which should vanish for cosine-mode data).
    """
    g = state.grid
    mech = (
        quad_trapz(g, d2_neumann(g, state.u) ** 2)
        + quad_trapz(g, d2_neumann(g, state.v) ** 2)
        + quad_trapz(g, d1_central(g, state.w) ** 2)
    )
    theta_small = norm_linf(d1_central(g, state.theta)) + norm_linf(
        d2_neumann(g, state.theta)
    )
    means = {
        "u": quad_trapz(g, state.u) / g.length,
        "v": quad_trapz(g, state.v) / g.length,
        "w": quad_trapz(g, state.w) / g.length,
    }
    return {"mechanical": mech, "temperature": theta_small, "means": means}
