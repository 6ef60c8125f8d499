"""Stiffness coefficient families with exact closed-form derivatives.

Four C^2 families on [0, inf), all strictly positive for admissible
parameters:

* ``constant``:   g(x) = c
* ``exp_decay``:  g(x) = a + b * exp(-c x)          (a > 0, b >= 0, c >= 0)
* ``rational``:   g(x) = a + b / (1 + x^2)
* ``gauss_bump``: g(x) = a + b * exp(-((x - m)/s)^2)

A cosine-based bump is deliberately not offered: capping the cosine argument
makes it only C^1, so the Gaussian bump replaces it.  Extrema of g, g' and
g'' over an interval are computed from the analytic critical points, which
keeps the constants chain exactly reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GammaNotPositive, InvalidSpec, NegativeArgument

FAMILIES = ("constant", "exp_decay", "rational", "gauss_bump")

# integer ids used by the stepping kernels
KERNEL_IDS = {"constant": 0, "exp_decay": 1, "rational": 2, "gauss_bump": 3}

_N_PARAMS = {"constant": 1, "exp_decay": 3, "rational": 2, "gauss_bump": 4}


@dataclass(frozen=True)
class GammaSpec:
    """A stiffness family tag plus its parameter tuple."""

    family: str
    params: tuple

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown gamma family {self.family!r}")
        if len(self.params) != _N_PARAMS[self.family]:
            raise InvalidSpec(
                f"family {self.family!r} takes {_N_PARAMS[self.family]} "
                f"parameters, got {len(self.params)}"
            )
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if not all(math.isfinite(p) for p in self.params):
            raise InvalidSpec("gamma parameters must be finite")

    # -- constructors ---------------------------------------------------------

    @staticmethod
    def constant(c: float) -> "GammaSpec":
        if c <= 0:
            raise InvalidSpec("constant family needs c > 0")
        return GammaSpec("constant", (c,))

    @staticmethod
    def exp_decay(a: float, b: float, c: float) -> "GammaSpec":
        if a <= 0 or b < 0 or c < 0:
            raise InvalidSpec("exp_decay family needs a > 0, b >= 0, c >= 0")
        return GammaSpec("exp_decay", (a, b, c))

    @staticmethod
    def rational(a: float, b: float) -> "GammaSpec":
        if a <= 0 or a + b <= 0:
            raise InvalidSpec("rational family needs a > 0 and a + b > 0")
        return GammaSpec("rational", (a, b))

    @staticmethod
    def gauss_bump(a: float, b: float, m: float, s: float) -> "GammaSpec":
        if a <= 0 or a + b <= 0 or s <= 0:
            raise InvalidSpec("gauss_bump family needs a > 0, a + b > 0, s > 0")
        return GammaSpec("gauss_bump", (a, b, m, s))

    @property
    def kernel_id(self) -> int:
        return KERNEL_IDS[self.family]

    @property
    def kernel_params(self) -> tuple:
        """Parameters padded to four slots for the stepping kernels."""
        return self.params + (0.0,) * (4 - len(self.params))

    @property
    def is_constant(self) -> bool:
        """True when the family is constant in its argument."""
        if self.family == "constant":
            return True
        if self.family == "exp_decay":
            return self.params[1] == 0.0 or self.params[2] == 0.0
        if self.family in ("rational", "gauss_bump"):
            return self.params[1] == 0.0
        return False

    @property
    def constant_value(self) -> float:
        if not self.is_constant:
            raise InvalidSpec("gamma is not constant")
        if self.family == "exp_decay" and self.params[2] == 0.0:
            return self.params[0] + self.params[1]
        return self.params[0] if self.family != "constant" else self.params[0]


def gamma_eval(spec: GammaSpec, xi: float) -> tuple:
    """Closed-form (g, g', g'') at xi >= 0."""
    if xi < 0:
        raise NegativeArgument(f"gamma argument must be >= 0, got {xi}")
    return _eval_triple(spec, float(xi))


def _eval_triple(spec: GammaSpec, x: float) -> tuple:
    if spec.family == "constant":
        (c,) = spec.params
        return c, 0.0, 0.0
    if spec.family == "exp_decay":
        a, b, c = spec.params
        e = b * math.exp(-c * x)
        return a + e, -c * e, c * c * e
    if spec.family == "rational":
        a, b = spec.params
        d = 1.0 + x * x
        return a + b / d, -2.0 * b * x / d**2, b * (6.0 * x * x - 2.0) / d**3
    a, b, m, s = spec.params
    z = (x - m) / s
    e = b * math.exp(-z * z)
    return a + e, -2.0 * z * e / s, (4.0 * z * z - 2.0) * e / (s * s)


def gamma_values(spec: GammaSpec, xi: np.ndarray) -> np.ndarray:
    """Vectorized g(xi); evaluates the closed form without the xi >= 0 gate.

    Runge-Kutta stage states may carry roundoff-negative temperatures; the
    closed forms are entire in xi, so evaluating them there is harmless.
    """
    xi = np.asarray(xi, dtype=np.float64)
    if spec.family == "constant":
        return np.full_like(xi, spec.params[0])
    if spec.family == "exp_decay":
        a, b, c = spec.params
        return a + b * np.exp(-c * xi)
    if spec.family == "rational":
        a, b = spec.params
        return a + b / (1.0 + xi * xi)
    a, b, m, s = spec.params
    z = (xi - m) / s
    return a + b * np.exp(-z * z)


def value_range(spec: GammaSpec, lo: float, hi: float) -> tuple:
    """Exact (min, max) of g over [lo, hi] from analytic monotonicity."""
    if hi < lo:
        raise InvalidSpec(f"empty interval [{lo}, {hi}]")
    candidates = [lo, hi]
    if spec.family == "gauss_bump":
        m = spec.params[2]
        if lo < m < hi:
            candidates.append(m)
    vals = [_eval_triple(spec, x)[0] for x in candidates]
    return min(vals), max(vals)


def derivative_bounds(spec: GammaSpec, lo: float, hi: float) -> tuple:
    """Exact (sup |g'|, sup |g''|) over [lo, hi] via analytic critical points."""
    if hi < lo:
        raise InvalidSpec(f"empty interval [{lo}, {hi}]")
    d1_pts = [lo, hi]
    d2_pts = [lo, hi]
    if spec.family == "rational":
        # |g'| peaks at x = 1/sqrt(3); |g''| candidates at 0 and 1
        d1_pts += [x for x in (1.0 / math.sqrt(3.0),) if lo < x < hi]
        d2_pts += [x for x in (0.0, 1.0) if lo < x < hi]
    elif spec.family == "gauss_bump":
        _, _, m, s = spec.params
        d1_pts += [x for x in (m - s / math.sqrt(2), m + s / math.sqrt(2)) if lo < x < hi]
        half = s * math.sqrt(1.5)
        d2_pts += [x for x in (m, m - half, m + half) if lo < x < hi]
    sup1 = max(abs(_eval_triple(spec, x)[1]) for x in d1_pts)
    sup2 = max(abs(_eval_triple(spec, x)[2]) for x in d2_pts)
    return sup1, sup2


def validate_positive(spec: GammaSpec, theta_star: float, n_samples: int = 10_000):
    """Check g > 0 on [0, 4 theta_star] by analytic range plus a dense sample."""
    if theta_star <= 0:
        raise InvalidSpec("theta_star must be positive")
    gmin, _ = value_range(spec, 0.0, 4.0 * theta_star)
    if gmin <= 0:
        raise GammaNotPositive(
            f"gamma reaches {gmin} on [0, {4.0 * theta_star}]"
        )
    sample = gamma_values(spec, np.linspace(0.0, 4.0 * theta_star, n_samples))
    if np.min(sample) <= 0:
        raise GammaNotPositive("gamma is not positive on the sampled range")
