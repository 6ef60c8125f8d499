"""Command-line interface: run, constants, sweep, and oracle subcommands.

Scenario documents are archived JSON (see :mod:`mgtsim.scenario`), so every
output directory carries enough context to reproduce itself.  Exit codes:
0 completed, 1 usage/validation/IO error, 2 blow-up, 3 numerical failure,
4 not dissipation-dominated (constants), 5 non-constant stiffness (oracle).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from ._core import BACKEND
from .constants import compute_ledger
from .diagnostics import CSV_FIELDS, build_summary, check_selfmap, fit_decay
from .errors import (
    InsufficientData,
    MgtsimError,
    NonConstantGamma,
    NonPositiveSeries,
    NotDissipationDominated,
)
from .gammas import GammaSpec
from .grid import build_grid, mode_eigenvalue
from .integrate import RunStatus, run_simulation
from .model import make_initial_data
from .oracle import regularized_mode_matrix, routh_hurwitz_stable, spectrum_table
from .scenario import Scenario, SweepSpec, parse_gamma, parse_scenario, parse_sweep

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_BLOWUP = 2
EXIT_FAILURE = 3
EXIT_NOT_DISSIPATIVE = 4
EXIT_NONCONSTANT_GAMMA = 5

_STATUS_EXIT = {
    RunStatus.COMPLETED: EXIT_OK,
    RunStatus.BLOWUP: EXIT_BLOWUP,
    RunStatus.NUMERICAL_FAILURE: EXIT_FAILURE,
}

SWEEP_FIELDS = [
    "tau", "alpha", "b", "D", "eps",
    "routh_hurwitz_stable", "oracle_max_re", "sim_rate", "agree",
]


def _write_csv(path: Path, header: list, rows: list) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def cmd_run(scenario: Scenario, out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)

    ledger = None
    if scenario.params.dissipation_dominated:
        ledger = compute_ledger(
            scenario.params, scenario.gamma, scenario.theta_star,
            scenario.grid.length,
        )

    init = make_initial_data(scenario.init, scenario.grid)
    traj = run_simulation(
        init, scenario.params, scenario.gamma, scenario.control,
        ledger=ledger, eta_override=scenario.checks.eta_override,
    )

    _write_csv(
        out_dir / "timeseries.csv", CSV_FIELDS,
        [r.csv_row() for r in traj.records],
    )

    fs = traj.final_state
    _write_csv(
        out_dir / "final_state.csv",
        ["x", "u", "v", "w", "theta"],
        [
            [repr(float(col[i])) for col in
             (scenario.grid.nodes, fs.u, fs.v, fs.w, fs.theta)]
            for i in range(scenario.grid.n_nodes)
        ],
    )

    summary = build_summary(traj, scenario.params, ledger=ledger)
    doc = {
        "scenario": scenario.echo,
        "backend": BACKEND,
        "status": traj.status.value,
        "constants": None if ledger is None else ledger.to_json_dict(),
        "summary": summary.to_json_dict(),
    }
    if ledger is not None and scenario.checks.enable_selfmap:
        rep = check_selfmap(traj, ledger, scenario.checks.eta_override)
        doc["selfmap"] = {
            "eta_used": rep.eta_used,
            "window_end": rep.window_end,
            "loop_closed": rep.loop_closed,
        }
    with open(out_dir / "summary.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")

    return _STATUS_EXIT[traj.status]


def cmd_constants(scenario: Scenario) -> int:
    try:
        ledger = compute_ledger(
            scenario.params, scenario.gamma, scenario.theta_star,
            scenario.grid.length,
        )
    except NotDissipationDominated:
        print("not dissipation-dominated: alpha*b <= tau", file=sys.stderr)
        return EXIT_NOT_DISSIPATIVE
    print(ledger.to_json())
    return EXIT_OK


def _sweep_point(spec: SweepSpec, overrides: dict) -> list:
    base = spec.base
    params = replace(base.params, **overrides)

    stable = routh_hurwitz_stable(
        params,
        base.gamma.constant_value if base.gamma.is_constant else 1.0,
    )

    max_re = float("nan")
    if base.gamma.is_constant:
        mu = mode_eigenvalue(base.grid, 1)
        _, eig = regularized_mode_matrix(params, base.gamma, mu)
        max_re = float(np.max(eig.real))

    init = make_initial_data(base.init, base.grid)
    traj = run_simulation(init, params, base.gamma, base.control)

    sim_rate = float("nan")
    t = traj.times
    if t.size >= 10:
        window = spec.fit_window
        if window is None:
            window = (t[0] + 0.25 * (t[-1] - t[0]), t[-1])
        try:
            fit = fit_decay(t, traj.series("seminorm_vxx2"), window=window)
            sim_rate = -fit.rate  # positive = growth
        except (InsufficientData, NonPositiveSeries):
            pass

    oracle_rate = 2.0 * max_re
    agree = (
        np.isfinite(sim_rate)
        and np.isfinite(oracle_rate)
        and abs(oracle_rate) > 0
        and abs(sim_rate - oracle_rate) <= 0.1 * abs(oracle_rate)
    )

    point = {**{k: getattr(params, k) for k in ("tau", "alpha", "b", "D", "eps")}}
    return [
        repr(point["tau"]), repr(point["alpha"]), repr(point["b"]),
        repr(point["D"]), repr(point["eps"]),
        "true" if stable else "false",
        repr(max_re), repr(sim_rate),
        "true" if agree else "false",
    ]


def cmd_sweep(spec: SweepSpec, out_dir: Path, jobs: int = 1) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    points = spec.points
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda p: _sweep_point(spec, p), points))
    else:
        rows = [_sweep_point(spec, p) for p in points]
    # canonical order regardless of execution order
    rows.sort(key=lambda r: tuple(float(x) for x in r[:5]))
    _write_csv(out_dir / "sweep.csv", SWEEP_FIELDS, rows)
    return EXIT_OK


def _parse_gamma_arg(text: str) -> GammaSpec:
    try:
        return GammaSpec.constant(float(text))
    except ValueError:
        pass
    doc = json.loads(text)
    return parse_gamma(doc)


def cmd_oracle(args) -> int:
    from .model import Params

    try:
        gamma = _parse_gamma_arg(args.gamma)
        if not gamma.is_constant:
            raise NonConstantGamma(
                "the oracle subcommand requires a constant stiffness"
            )
    except NonConstantGamma as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONSTANT_GAMMA

    params = Params(tau=args.tau, alpha=args.alpha, b=args.b, D=1.0, eps=args.eps)
    grid = build_grid(args.length, args.n) if args.n else None
    rows = spectrum_table(params, gamma, args.length, args.kmax, grid=grid)

    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["k", "mu_h", "re1", "im1", "re2", "im2", "re3", "im3", "max_re"])
    for spec_row in rows:
        writer.writerow(spec_row.csv_row())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mgtsim",
        description="Simulate and verify the 1D thermoacoustic wave-heat system",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one scenario and write outputs")
    p_run.add_argument("scenario", help="scenario JSON file")
    p_run.add_argument("--out", required=True, help="output directory")

    p_const = sub.add_parser("constants", help="print the constants ledger as JSON")
    p_const.add_argument("scenario", help="scenario JSON file")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("sweepspec", help="sweep JSON file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--jobs", type=int, default=1, help="concurrent points")

    p_oracle = sub.add_parser("oracle", help="print per-mode characteristic roots")
    p_oracle.add_argument("--tau", type=float, required=True)
    p_oracle.add_argument("--alpha", type=float, required=True)
    p_oracle.add_argument("--b", type=float, required=True)
    p_oracle.add_argument("--gamma", default="1.0",
                          help="constant value or gamma JSON object")
    p_oracle.add_argument("--eps", type=float, default=0.0)
    p_oracle.add_argument("--length", type=float, default=1.0)
    p_oracle.add_argument("--kmax", type=int, required=True)
    p_oracle.add_argument("--n", type=int, default=0,
                          help="use the discrete mode eigenvalue of an N-cell grid")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            scenario = parse_scenario(Path(args.scenario).read_text())
            return cmd_run(scenario, Path(args.out))
        if args.command == "constants":
            scenario = parse_scenario(Path(args.scenario).read_text())
            return cmd_constants(scenario)
        if args.command == "sweep":
            spec = parse_sweep(Path(args.sweepspec).read_text())
            return cmd_sweep(spec, Path(args.out), jobs=max(1, args.jobs))
        if args.command == "oracle":
            return cmd_oracle(args)
    except (MgtsimError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
