"""Scenario and sweep documents: JSON parsing with field-precise errors.

A scenario aggregates everything one run needs (grid, coefficients,
stiffness family, temperature bound, initial data, time control, check
toggles).  Documents are strict: unknown keys are rejected with their path,
and every module-level precondition is validated at parse time so failures
name the offending field.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Optional

from .errors import InvalidSpec, ParseError, ValidationError
from .gammas import GammaSpec
from .grid import Grid, build_grid
from .integrate import TimeControl
from .model import InitSpec, Params

_REQUIRED = object()

SWEEPABLE = ("tau", "alpha", "b", "D", "eps")
MAX_SWEEP_POINTS = 100_000

_GAMMA_PARAM_NAMES = {
    "constant": ("c",),
    "exp_decay": ("a", "b", "c"),
    "rational": ("a", "b"),
    "gauss_bump": ("a", "b", "m", "s"),
}


@dataclass(frozen=True)
class ChecksConfig:
    eta_override: Optional[float] = None
    enable_selfmap: bool = True
    enable_lyapunov: bool = True


@dataclass(frozen=True)
class Scenario:
    grid: Grid
    params: Params
    gamma: GammaSpec
    theta_star: float
    init: InitSpec
    control: TimeControl
    checks: ChecksConfig
    echo: dict = field(repr=False, default_factory=dict)


def _check_unknown(d: dict, path: str, allowed) -> None:
    for key in d:
        if key not in allowed:
            raise ValidationError(f"{path}.{key}" if path else key, "unknown key")


def _section(doc: dict, path: str, key: str, default=_REQUIRED) -> dict:
    if key not in doc:
        if default is _REQUIRED:
            raise ValidationError(_join(path, key), "missing required section")
        return dict(default)
    val = doc[key]
    if not isinstance(val, dict):
        raise ValidationError(_join(path, key), "must be an object")
    return val


def _join(path: str, key: str) -> str:
    return f"{path}.{key}" if path else key


def _number(d: dict, path: str, key: str, default=_REQUIRED, positive=False,
            nonnegative=False) -> float:
    if key not in d:
        if default is _REQUIRED:
            raise ValidationError(_join(path, key), "missing required value")
        return default
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ValidationError(_join(path, key), "must be a number")
    val = float(val)
    if positive and not val > 0:
        raise ValidationError(_join(path, key), "must be positive")
    if nonnegative and val < 0:
        raise ValidationError(_join(path, key), "must be nonnegative")
    return val


def _integer(d: dict, path: str, key: str, default=_REQUIRED, minimum=None) -> int:
    if key not in d:
        if default is _REQUIRED:
            raise ValidationError(_join(path, key), "missing required value")
        return default
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, int):
        raise ValidationError(_join(path, key), "must be an integer")
    if minimum is not None and val < minimum:
        raise ValidationError(_join(path, key), f"must be >= {minimum}")
    return val


def _mode_list(d: dict, path: str, key: str) -> tuple:
    val = d.get(key, [])
    if not isinstance(val, list) or any(
        isinstance(x, bool) or not isinstance(x, (int, float)) for x in val
    ):
        raise ValidationError(_join(path, key), "must be a list of numbers")
    return tuple(float(x) for x in val)


def parse_gamma(doc: dict, path: str = "gamma") -> GammaSpec:
    _check_unknown(doc, path, ("family", "params"))
    family = doc.get("family")
    if family == "cosine_bump":
        raise ValidationError(
            _join(path, "family"),
            "cosine_bump is not twice continuously differentiable; "
            "use gauss_bump instead",
        )
    if family not in _GAMMA_PARAM_NAMES:
        raise ValidationError(
            _join(path, "family"),
            f"must be one of {sorted(_GAMMA_PARAM_NAMES)}",
        )
    pdoc = _section(doc, path, "params")
    names = _GAMMA_PARAM_NAMES[family]
    _check_unknown(pdoc, _join(path, "params"), names)
    values = [
        _number(pdoc, _join(path, "params"), name) for name in names
    ]
    try:
        ctor = getattr(GammaSpec, family)
        return ctor(*values)
    except InvalidSpec as exc:
        raise ValidationError(_join(path, "params"), str(exc)) from exc


def parse_scenario(text: str) -> Scenario:
    """Parse and validate one scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a JSON object")

    _check_unknown(
        doc, "", ("grid", "params", "gamma", "theta_star", "init", "time", "checks")
    )

    gdoc = _section(doc, "", "grid")
    _check_unknown(gdoc, "grid", ("L", "N"))
    length = _number(gdoc, "grid", "L", positive=True)
    n_cells = _integer(gdoc, "grid", "N", minimum=8)
    try:
        grid = build_grid(length, n_cells)
    except Exception as exc:
        raise ValidationError("grid", str(exc)) from exc

    pdoc = _section(doc, "", "params")
    _check_unknown(pdoc, "params", ("tau", "alpha", "b", "D", "eps"))
    try:
        params = Params(
            tau=_number(pdoc, "params", "tau", positive=True),
            alpha=_number(pdoc, "params", "alpha", positive=True),
            b=_number(pdoc, "params", "b", positive=True),
            D=_number(pdoc, "params", "D", positive=True),
            eps=_number(pdoc, "params", "eps", default=0.0, nonnegative=True),
        )
    except InvalidSpec as exc:
        raise ValidationError("params", str(exc)) from exc

    gamma = parse_gamma(_section(doc, "", "gamma"))
    theta_star = _number(doc, "", "theta_star", positive=True)

    idoc = _section(doc, "", "init", default={})
    _check_unknown(
        idoc, "init",
        ("u_modes", "v_modes", "w_modes", "theta_baseline", "theta_mode"),
    )
    mdoc = _section(idoc, "init", "theta_mode", default={})
    _check_unknown(mdoc, "init.theta_mode", ("k", "amplitude"))
    try:
        init = InitSpec(
            u_modes=_mode_list(idoc, "init", "u_modes"),
            v_modes=_mode_list(idoc, "init", "v_modes"),
            w_modes=_mode_list(idoc, "init", "w_modes"),
            theta_baseline=_number(idoc, "init", "theta_baseline", default=0.0,
                                   nonnegative=True),
            theta_mode_k=_integer(mdoc, "init.theta_mode", "k", default=1, minimum=1),
            theta_amplitude=_number(mdoc, "init.theta_mode", "amplitude", default=0.0),
        )
    except InvalidSpec as exc:
        raise ValidationError("init", str(exc)) from exc

    tdoc = _section(doc, "", "time")
    _check_unknown(
        tdoc, "time", ("t_end", "cfl_factor", "save_stride", "blowup_threshold")
    )
    try:
        control = TimeControl(
            t_end=_number(tdoc, "time", "t_end", positive=True),
            cfl_factor=_number(tdoc, "time", "cfl_factor", default=0.4),
            save_stride=_integer(tdoc, "time", "save_stride", default=10, minimum=1),
            blowup_threshold=_number(tdoc, "time", "blowup_threshold",
                                     default=1e8, positive=True),
        )
    except InvalidSpec as exc:
        raise ValidationError("time", str(exc)) from exc

    cdoc = _section(doc, "", "checks", default={})
    _check_unknown(cdoc, "checks", ("eta_override", "enable_selfmap",
                                    "enable_lyapunov"))
    eta_override = None
    if cdoc.get("eta_override") is not None:
        eta_override = _number(cdoc, "checks", "eta_override", positive=True)
    for flag in ("enable_selfmap", "enable_lyapunov"):
        if flag in cdoc and not isinstance(cdoc[flag], bool):
            raise ValidationError(f"checks.{flag}", "must be a boolean")
    checks = ChecksConfig(
        eta_override=eta_override,
        enable_selfmap=cdoc.get("enable_selfmap", True),
        enable_lyapunov=cdoc.get("enable_lyapunov", True),
    )

    return Scenario(
        grid=grid,
        params=params,
        gamma=gamma,
        theta_star=theta_star,
        init=init,
        control=control,
        checks=checks,
        echo=doc,
    )


@dataclass(frozen=True)
class SweepSpec:
    base: Scenario
    lists: dict
    fit_window: Optional[tuple]

    @property
    def points(self) -> list:
        names = [n for n in SWEEPABLE if n in self.lists]
        combos = itertools.product(*(self.lists[n] for n in names))
        return [dict(zip(names, combo)) for combo in combos]


def parse_sweep(text: str) -> SweepSpec:
    """Parse a sweep document: a base scenario plus value lists."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    if not isinstance(doc, dict):
        raise ParseError("sweep document must be a JSON object")
    _check_unknown(doc, "", ("base", "sweep", "fit_window"))

    base_doc = _section(doc, "", "base")
    base = parse_scenario(json.dumps(base_doc))

    sdoc = _section(doc, "", "sweep")
    _check_unknown(sdoc, "sweep", SWEEPABLE)
    lists = {}
    total = 1
    for name, values in sdoc.items():
        if not isinstance(values, list) or not values or any(
            isinstance(x, bool) or not isinstance(x, (int, float)) for x in values
        ):
            raise ValidationError(f"sweep.{name}", "must be a nonempty number list")
        for x in values:
            if name == "eps":
                if x < 0:
                    raise ValidationError(f"sweep.{name}", "values must be >= 0")
            elif not x > 0:
                raise ValidationError(f"sweep.{name}", "values must be positive")
        lists[name] = [float(x) for x in values]
        total *= len(values)
    if not lists:
        raise ValidationError("sweep", "at least one parameter list required")
    if total > MAX_SWEEP_POINTS:
        raise ValidationError("sweep", f"cartesian product exceeds {MAX_SWEEP_POINTS}")

    window = None
    if doc.get("fit_window") is not None:
        fw = doc["fit_window"]
        if (not isinstance(fw, list) or len(fw) != 2
                or any(isinstance(x, bool) or not isinstance(x, (int, float))
                       for x in fw)):
            raise ValidationError("fit_window", "must be [t0, t1]")
        window = (float(fw[0]), float(fw[1]))

    return SweepSpec(base=base, lists=lists, fit_window=window)
