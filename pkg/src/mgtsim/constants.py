"""Constructive evaluation of the Lyapunov constant chain.

Given coefficients in the dissipation-dominated regime (alpha * b > tau), an
a-priori temperature bound theta_star, and a stiffness family, this module
produces every constant needed by the energy functional and its decay
estimate: the frame (B, b1, B1) chosen by midpoint rules inside its
admissible intervals, the two-sided equivalence constants k1 <= k2, the
smallness parameters delta and eta, the decay rate kappa and its
heat-limited companion kappa0, and the envelope prefactor k3.

All free choices are deterministic (interval midpoints, largest admissible
eta), so ledgers are exactly reproducible golden values.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from typing import Optional

from .errors import NotDissipationDominated
from .gammas import GammaSpec, derivative_bounds, validate_positive, value_range
from .grid import d1_central, d2_neumann, d3_neumann, quad_trapz
from .model import Params, State

#: relative shrink applied to the stiffness infimum when extrema had to be
#: estimated by sampling alone; analytic extrema are used exactly.
SAMPLING_GUARD = 1e-9


@dataclass(frozen=True)
class ConstantsLedger:
    """Every constant of the decay-estimate chain, plus empirical slots.

    Serializes to a flat JSON object with exactly these field names.  The
    empirical slots k4, k5, k6 and nu depend on heat-semigroup constants
    that have no closed form here; they stay None until fitted from runs.
    """

    theta_star: float
    gamma_star: float
    gamma_upper: float
    Gamma_star: float
    gpp_bound: float
    B: float
    b1: float
    B1: float
    c2_550: float
    c2_66: float
    c3_66: float
    poincare_c1: float
    poincare_c4: float
    embed_c1: float
    delta1: float
    delta: float
    k1: float
    k2: float
    k3: float
    eta: float
    kappa: float
    c5: float
    c6: float
    c7: float
    c8: float
    lambda_D: float
    kappa0: float
    k4: Optional[float] = None
    k5: Optional[float] = None
    k6: Optional[float] = None
    nu: Optional[float] = None

    def to_json_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=False)

    def with_empirical(self, **slots) -> "ConstantsLedger":
        return replace(self, **slots)


def choose_frame(params: Params) -> tuple:
    """Deterministic midpoint frame (B, b1, B1) inside the admissible intervals.

    B sits in (1/b, alpha/tau), b1 in (1/B, b), and B1 in (tau B^2 / alpha, B);
    these make every strictness requirement of the two-sided estimate hold by
    construction.  Raises when alpha * b <= tau (the interval for B is empty).
    """
    tau, alpha, b = params.tau, params.alpha, params.b
    if not alpha * b > tau:
        raise NotDissipationDominated(
            f"alpha*b = {alpha * b} is not strictly larger than tau = {tau}"
        )
    B = 0.5 * (1.0 / b + alpha / tau)
    b1 = 0.5 * (1.0 / B + b)
    B1 = 0.5 * (tau * B * B / alpha + B)
    return B, b1, B1


def compute_ledger(
    params: Params, gamma: GammaSpec, theta_star: float, length: float
) -> ConstantsLedger:
    """Evaluate the full constant chain for the given inputs."""
    tau, alpha, b = params.tau, params.alpha, params.b
    if not params.dissipation_dominated:
        raise NotDissipationDominated(
            f"alpha*b = {alpha * b} is not strictly larger than tau = {tau}"
        )
    validate_positive(gamma, theta_star)

    # stiffness band over the working temperature range [0, 2 theta_star]
    gmin, gmax = value_range(gamma, 0.0, 2.0 * theta_star)
    gamma_star = 0.5 * gmin
    gamma_upper = 2.0 * gmax
    sup_g1, sup_g2 = derivative_bounds(gamma, 0.0, 2.0 * theta_star)
    Gamma_star = 1.0 + sup_g1
    gpp_bound = 1.0 + sup_g2

    B, b1, B1 = choose_frame(params)

    poincare_c1 = length * length / math.pi**2
    poincare_c4 = poincare_c1
    embed_c1 = math.sqrt(length)

    c2_550 = 0.5 * tau * (1.0 - tau * B * B / (alpha * B1))
    delta1 = min(
        alpha * (B - B1) / (2.0 * tau),
        b * gamma_star
        / (2.0 * poincare_c1 * (tau * tau / (2.0 * c2_550) + alpha / (B - B1))),
    )

    c2_66 = alpha - tau * B
    c3_66 = (b * B - 1.0) * gamma_star

    delta = min(
        delta1,
        c3_66 / (4.0 * poincare_c4 * alpha),
        c3_66 / (8.0 * (4.0 * alpha * alpha / gamma_star + tau)),
        gamma_star / (1.0 + tau) ** 2,
    )

    k1 = min(
        c2_550 / 2.0,
        (b - b1) * gamma_star / 2.0,
        (B * b1 - 1.0) * gamma_star / (2.0 * b1),
        gamma_star,
    )
    # the regularization-dependent term of k2 is taken at its upper bound
    # (1 + tau) B / 2, making the ledger independent of eps
    k2 = max(
        tau / 2.0 + tau * tau * B * B / (2.0 * alpha * B1) + c2_550 / 2.0,
        (b + b1) * gamma_upper / 2.0
        + (1.0 + tau) * B / 2.0
        + poincare_c1 * alpha * (3.0 * B + B1) / 4.0,
        (B + b * delta) * gamma_upper / 2.0
        + gamma_upper / (2.0 * b1)
        + b * delta * gamma_star / 2.0,
        gamma_upper,
    )

    kappa = min(
        c2_66 / (2.0 * k2),
        c3_66 / (2.0 * k2),
        delta * gamma_star / (4.0 * k2),
        (B + b * delta) * gamma_star / (2.0 * k2),
    )

    G, gpp, c4 = Gamma_star, gpp_bound, poincare_c4
    c5 = 2.0 * (b * G / 4.0 + G / 4.0) + b * gpp / 4.0 + gpp / 4.0
    c6 = (
        b * G / 2.0
        + G / 4.0
        + b * G
        + b * G * c4
        + b * gpp * c4
        + b * B * G * c4
        + b * B * G / 4.0
        + B * G / 4.0
        + b * G * c4 * delta
        + G / 4.0
    )
    c7 = (
        2.0 * G
        + (B + b * delta) * G / 2.0
        + G * c4
        + gpp * c4
        + b * G * c4
        + b * G * delta / 4.0
        + G * c4 * delta
        + G * delta / 4.0
        + (B + b * delta) * G
    )
    c8 = 2.0 * G + (B + b * delta) * G / 4.0

    eta = min(
        1.0,
        (c2_66 / 2.0) / c5,
        (c3_66 / 8.0) / (c6 + b * G * G / gamma_star),
        (delta * gamma_star / 4.0) / (c7 + G * G / (b * gamma_star)),
        ((B + b * delta) * gamma_star / 2.0) / (c8 + G * G / (2.0 * gamma_star)),
    )

    k3 = max(k2 / k1, 2.0 * k2 / (b * gamma_star))

    lambda_D = params.D * math.pi**2 / (length * length)
    kappa0 = min(kappa, 0.9 * lambda_D)

    ledger = ConstantsLedger(
        theta_star=float(theta_star),
        gamma_star=gamma_star,
        gamma_upper=gamma_upper,
        Gamma_star=Gamma_star,
        gpp_bound=gpp_bound,
        B=B,
        b1=b1,
        B1=B1,
        c2_550=c2_550,
        c2_66=c2_66,
        c3_66=c3_66,
        poincare_c1=poincare_c1,
        poincare_c4=poincare_c4,
        embed_c1=embed_c1,
        delta1=delta1,
        delta=delta,
        k1=k1,
        k2=k2,
        k3=k3,
        eta=eta,
        kappa=kappa,
        c5=c5,
        c6=c6,
        c7=c7,
        c8=c8,
        lambda_D=lambda_D,
        kappa0=kappa0,
    )
    verify_ledger(ledger, params)
    return ledger


def verify_ledger(ledger: ConstantsLedger, params: Params) -> None:
    """Re-verification pass: every stored inequality must hold as stored."""
    L = ledger
    tau, alpha, b = params.tau, params.alpha, params.b
    tol = 1.0 + 1e-12

    # frame strict inequalities
    assert 1.0 / b < L.B < alpha / tau, "B inside (1/b, alpha/tau)"
    assert 1.0 / L.b1 < L.B, "1/b1 < B"
    assert L.B * L.B / L.B1 * tau < alpha, "tau B^2 / B1 < alpha"
    assert L.b1 < b and L.B1 < L.B, "b1 < b, B1 < B"

    assert L.c2_550 > 0 and L.c2_66 > 0 and L.c3_66 > 0
    # delta1 bounds: tau*delta <= alpha(B - B1)/2 and the quadratic bound
    assert tau * L.delta1 <= alpha * (L.B - L.B1) / 2.0 * tol
    lhs = (
        (tau * tau / (2.0 * L.c2_550) + alpha / (L.B - L.B1))
        * L.delta1**2
        * L.poincare_c1
    )
    assert lhs <= b * L.gamma_star / 2.0 * L.delta1 * tol

    assert 0 < L.delta <= L.delta1
    assert L.kappa > 0 and 0 < L.eta <= 1.0
    assert L.k2 >= L.k1 > 0
    assert 0 < L.kappa0 <= L.kappa and L.kappa0 < L.lambda_D

    # eta admissibility
    gs, G = L.gamma_star, L.Gamma_star
    assert L.c5 * L.eta <= L.c2_66 / 2.0 * tol
    assert (L.c6 + b * G * G / gs) * L.eta <= L.c3_66 / 8.0 * tol
    assert (L.c7 + G * G / (b * gs)) * L.eta <= L.delta * gs / 4.0 * tol
    assert (L.c8 + G * G / (2.0 * gs)) * L.eta <= (L.B + b * L.delta) * gs / 2.0 * tol

    # k1 / k2 are genuine min / max of their argument lists
    k1_args = [
        L.c2_550 / 2.0,
        (b - L.b1) * gs / 2.0,
        (L.B * L.b1 - 1.0) * gs / (2.0 * L.b1),
        gs,
    ]
    k2_args = [
        tau / 2.0 + tau * tau * L.B * L.B / (2.0 * alpha * L.B1) + L.c2_550 / 2.0,
        (b + L.b1) * L.gamma_upper / 2.0
        + (1.0 + tau) * L.B / 2.0
        + L.poincare_c1 * alpha * (3.0 * L.B + L.B1) / 4.0,
        (L.B + b * L.delta) * L.gamma_upper / 2.0
        + L.gamma_upper / (2.0 * L.b1)
        + b * L.delta * gs / 2.0,
        L.gamma_upper,
    ]
    assert all(L.k1 <= a * tol for a in k1_args)
    assert all(L.k2 * tol >= a for a in k2_args)


def compute_A(state: State, eps: float = 0.0) -> float:
    """Initial-data size entering the decay envelopes.

    A = int w0_x^2 + int v0_xx^2 + int u0_xx^2 + eps * int u0_xxx^2,
    evaluated with the discrete operators.
    """
    state.require_finite()
    g = state.grid
    total = (
        quad_trapz(g, d1_central(g, state.w) ** 2)
        + quad_trapz(g, d2_neumann(g, state.v) ** 2)
        + quad_trapz(g, d2_neumann(g, state.u) ** 2)
    )
    if eps > 0.0:
        total += eps * quad_trapz(g, d3_neumann(g, state.u) ** 2)
    return float(total)
