"""Command-line interface.

Subcommands: run (experiment + CSV artifacts), compare (deviation tables
between two runs), squeeze-demo (analytic squeezed-Gaussian panels),
bt-check (randomized Bogoliubov-algebra self-checks).

Exit codes: 0 success; 2 configuration error; 3 numerical instability or
failed self-check; 4 reconstruction did not converge (outputs are still
written).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

import numpy as np

from . import __version__
from .config import (ExperimentConfig, config_from_mapping, load_config)
from .errors import (ConfigurationError, NumericalInstabilityError,
                     ReconstructionWarning)
from .experiment import _write_csv_row, compare, run
from .grids import Grid1D
from .thermo import (GaussianSqueezeModel, ThermalParams, ZERO_TEMPERATURE,
                     bt_matrix, g_of_theta, mixing_angle, shift_eta, shift_xi,
                     squeeze_gaussian, theta_from_condition)
from .units import beta_from_kelvin, cm1_to_hartree

RESIDUAL_TOL = 1e-12


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ibtfd",
        description="Thermofield split-step dynamics of one anharmonic mode "
                    "with exact and approximate thermal density extraction.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run an experiment and emit CSVs")
    p_run.add_argument("--config", help="key = value config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--emit", help="comma-separated emit targets "
                                      "(overrides the config)")
    p_run.add_argument("--temperature-K", dest="temperature_K",
                       help="temperature override ('zero' or Kelvin)")

    p_cmp = sub.add_parser("compare", help="deviation tables between runs")
    p_cmp.add_argument("dir_a")
    p_cmp.add_argument("dir_b")
    p_cmp.add_argument("--method-a", default="density_exact")
    p_cmp.add_argument("--method-b", default="density_exact")
    p_cmp.add_argument("--out", help="output CSV path")

    p_sq = sub.add_parser("squeeze-demo",
                          help="analytic squeezed-Gaussian panels as CSV")
    p_sq.add_argument("--out", required=True, help="output directory")
    p_sq.add_argument("--temperature-K", dest="temperature_K", default="300")
    p_sq.add_argument("--omega-cm1", type=float, default=200.0)
    p_sq.add_argument("--delta", type=float, default=1.0,
                      help="center of the initial Gaussian")
    p_sq.add_argument("--sigma0", type=float, default=0.5,
                      help="width of the initial Gaussian")
    p_sq.add_argument("--grid-n", type=int, default=256)
    p_sq.add_argument("--halfwidth", type=float, default=12.0)

    p_bt = sub.add_parser("bt-check",
                          help="randomized Bogoliubov-algebra self-checks")
    p_bt.add_argument("--seed-check", dest="seed", type=int, default=0,
                      help="RNG seed for the randomized property samples")
    p_bt.add_argument("--out", help="write the report to this file as well")
    return parser


def _cmd_run(args) -> int:
    if args.config:
        config = load_config(args.config)
    else:
        config = ExperimentConfig()
    overrides = {}
    if args.temperature_K is not None:
        overrides["temperature_K"] = args.temperature_K
    if args.emit is not None:
        overrides["emit"] = args.emit
    if overrides:
        merged = {name: getattr(config, name)
                  for name in ExperimentConfig.__dataclass_fields__}
        merged["emit"] = ",".join(merged["emit"])
        merged.update(overrides)
        config = config_from_mapping(merged)
    with warnings.catch_warnings():
        warnings.simplefilter("always", ReconstructionWarning)
        manifest = run(config, args.out)
    print(f"run complete: {len(manifest.samples)} samples, "
          f"status {manifest.status}, wall {manifest.wall_time_s:.1f} s, "
          f"artifacts in {args.out}")
    return 0 if manifest.status == "complete" else 4


def _cmd_compare(args) -> int:
    rows = compare(args.dir_a, args.dir_b, args.method_a, args.method_b,
                   out_path=args.out)
    worst = max(rows, key=lambda r: r[1])
    print(f"{len(rows)} samples compared; worst L1 deviation "
          f"{worst[1]:.6e} at t = {worst[0]:g} fs")
    return 0


def _cmd_squeeze_demo(args) -> int:
    omega = cm1_to_hartree(args.omega_cm1)
    if args.temperature_K == "zero":
        theta = 0.0
    else:
        theta = mixing_angle(beta_from_kelvin(float(args.temperature_K)),
                             omega)
    grid = Grid1D.centered(args.grid_n, args.halfwidth)
    os.makedirs(args.out, exist_ok=True)
    cases = (("Delta_0", 0.0), ("Delta_delta", args.delta))
    with open(os.path.join(args.out, "squeeze_demo.csv"), "w",
              encoding="utf-8") as handle:
        handle.write("case,theta,delta,Delta,center_analytic,"
                     "center_empirical,integral\n")
        for name, big_delta in cases:
            model = GaussianSqueezeModel(sigma0=args.sigma0,
                                         delta=args.delta,
                                         Delta=big_delta, theta=theta)
            fld = squeeze_gaussian(model, grid, grid)
            marginal = fld.values.sum(axis=1) * grid.dx
            center_emp = float((marginal * grid.points).sum() * grid.dx)
            handle.write(f"{name},")
            _write_csv_row(handle, (theta, args.delta, big_delta,
                                    model.transformed_center(), center_emp,
                                    fld.integrate()))
            with open(os.path.join(args.out, f"squeeze_{name}.csv"), "w",
                      encoding="utf-8") as panel:
                _write_csv_row(panel, grid.points)
                _write_csv_row(panel, grid.points)
                for row in fld.values:
                    _write_csv_row(panel, row)
    print(f"squeeze-demo panels written to {args.out} (theta = {theta:.6f})")
    return 0


def _cmd_bt_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    lines = [f"Bogoliubov-algebra self-checks (seed {args.seed})"]
    ok = True

    def check(name, residual):
        nonlocal ok
        passed = residual < RESIDUAL_TOL
        ok = ok and passed
        lines.append(f"{'PASS' if passed else 'FAIL'}  {name}: "
                     f"max residual {residual:.3e}")

    for sigma, label, hi in ((-1, "boson", 5.0),
                             (+1, "fermion", math.pi / 2)):
        iso = det = 0.0
        for theta in rng.uniform(0.0, hi, size=200):
            mat = bt_matrix(sigma, float(theta))
            scale = max(1.0, float(np.max(np.abs(mat.entries))) ** 2)
            iso = max(iso, mat.isometry_residual())
            det = max(det, abs(np.linalg.det(mat.entries) - 1.0) / scale)
        check(f"{label} isometry U M U^dag = M, theta in [0, {hi:g})", iso)
        check(f"{label} determinant = 1 (relative)", det)

    worst = 0.0
    for _ in range(10_000):
        x = float(rng.uniform(-5.0, 5.0))
        alpha = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        theta = float(rng.uniform(0.0, 3.0))
        params = ThermalParams(beta=1.0, omega=1.0, theta=theta, alpha=alpha)
        forward = math.exp(theta) * x
        back = shift_xi(math.exp(-theta) * shift_eta(forward, params), params)
        worst = max(worst, abs(back - x) / max(1.0, abs(x)))
    check("xi/eta inverse identity over 1e4 random samples", worst)

    check("g(theta) limit at 0 equals -1", abs(g_of_theta(0.0) - (-1.0)))
    beta = beta_from_kelvin(300.0)
    omega = cm1_to_hartree(200.0)
    check("theta-condition (boson) matches mixing angle at 300 K",
          abs(theta_from_condition(-1, beta, omega)
              - mixing_angle(beta, omega)))

    lines.append("all checks passed" if ok else "SELF-CHECK FAILURES present")
    report = "\n".join(lines)
    print(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(report + "\n")
    return 0 if ok else 3


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        if args.command == "squeeze-demo":
            return _cmd_squeeze_demo(args)
        return _cmd_bt_check(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericalInstabilityError as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
