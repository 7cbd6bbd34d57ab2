"""Experiment orchestration: resolve a config, run, emit CSV artifacts.

CSV contracts:
  observables.csv      t_fs, mean_exact, mean_uncorr, mean_moment, var_exact,
                       var_uncorr, var_moment, norm_raw, neg_norm_score,
                       moment_order
  density_<method>.csv first row = grid points; then rows of t_fs + values
  wigner_t<t>.csv      first row = z grid, second row = p grid, then the
                       z-by-p matrix
  rdm_t<t>.csv         first row = grid; then n rows of Re, n rows of Im
All floats with 17 significant digits; emitted density rows are clamped
nonnegative and renormalized, with the clamped mass reported in the manifest.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ExperimentConfig, RunManifest
from .errors import ConfigurationError
from .grids import Grid1D
from .moments import reconstruct_density
from .propagate import (PolynomialPotentialSpec, build_ibt_hamiltonian,
                        initial_state, physical_moment_table, propagate)
from .rdm import (exact_1rdm, exact_density, uncorrelated_density,
                  wigner_from_1rdm)
from .thermo import ZERO_TEMPERATURE, ThermalParams
from .units import cm1_to_hartree, fs_to_au, au_to_fs

#: raw-norm deviation at t = 0 that marks the grid as too small
ESCAPED_NORM_TOL = 1e-3


@dataclass(frozen=True)
class ResolvedSetup:
    """Config translated to atomic units and library objects."""

    params: ThermalParams
    potential: PolynomialPotentialSpec
    grid: Grid1D
    z0: float
    dt_au: float


def resolve(config: ExperimentConfig) -> ResolvedSetup:
    omega = cm1_to_hartree(config.omega_cm1)
    alpha = complex(config.alpha_re, config.alpha_im)
    if config.temperature_K == "zero":
        params = ThermalParams.for_oscillator(ZERO_TEMPERATURE, omega, alpha)
    else:
        params = ThermalParams.from_temperature(float(config.temperature_K),
                                                omega, alpha)
    rule, value = config.z0_value()
    if rule == "fixed_physical":
        z0 = value * math.exp(-params.theta)
    else:
        z0 = value
    grid = Grid1D.centered(config.grid_n, config.grid_halfwidth)
    potential = PolynomialPotentialSpec(omega_z=omega, a3=config.a3_au,
                                        a4=config.a4_au)
    return ResolvedSetup(params=params, potential=potential, grid=grid,
                         z0=z0, dt_au=fs_to_au(config.dt_fs))


@dataclass
class SampleRecord:
    t_fs: float
    observables: dict
    densities: dict
    clamped_mass: dict
    norm_raw: float
    neg_norm: float
    moment_order: int
    converged: bool
    wigner: object = None
    rdm: object = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    setup: ResolvedSetup
    records: list = field(default_factory=list)

    @property
    def all_converged(self) -> bool:
        return all(r.converged for r in self.records)

    def observable_rows(self):
        rows = []
        for r in self.records:
            de, du, dm = (r.densities["exact"], r.densities["uncorr"],
                          r.densities["moment"])
            rows.append((r.t_fs, de.mean(), du.mean(), dm.mean(),
                         de.variance(), du.variance(), dm.variance(),
                         r.norm_raw, r.neg_norm, r.moment_order))
        return rows


def execute(config: ExperimentConfig, keep_states: bool = False
            ) -> ExperimentResult:
    """Propagate and analyze every sample in memory (no file output)."""
    setup = resolve(config)
    ham = build_ibt_hamiltonian(setup.potential, setup.params,
                                setup.grid, setup.grid)
    state = initial_state(setup.grid, setup.grid, z0=setup.z0)
    result = ExperimentResult(config=config, setup=setup)
    want_wigner = "wigner" in config.emit
    want_rdm = "rdm" in config.emit

    def on_sample(snapshot, obs):
        de = exact_density(snapshot, setup.params)
        if not result.records and abs(de.norm_raw - 1.0) > ESCAPED_NORM_TOL:
            raise ConfigurationError(
                f"grid too small for the transformed support: escaped-norm "
                f"estimate {abs(de.norm_raw - 1.0):.3e} at t = 0 (raw "
                f"integral {de.norm_raw:.6f}); increase grid_halfwidth")
        du = uncorrelated_density(snapshot, setup.params)
        table = physical_moment_table(snapshot, setup.params,
                                      n_max=config.n_max_moments)
        dm, expansion, diag = reconstruct_density(
            table, n_max=config.n_max_moments,
            neg_norm_threshold=config.neg_norm_threshold,
            grid=snapshot.grid_z)
        record = SampleRecord(
            t_fs=au_to_fs(snapshot.time), observables=obs,
            densities={"exact": de, "uncorr": du, "moment": dm},
            clamped_mass={name: d.clamped_values()[1]
                          for name, d in
                          (("exact", de), ("uncorr", du), ("moment", dm))},
            norm_raw=de.norm_raw, neg_norm=diag.score,
            moment_order=diag.order_used, converged=diag.converged)
        if want_wigner or want_rdm:
            rdm = exact_1rdm(snapshot, setup.params)
            if want_rdm:
                record.rdm = rdm
            if want_wigner:
                record.wigner = wigner_from_1rdm(rdm)
        result.records.append(record)

    propagate(state, ham, setup.dt_au, config.n_steps,
              sample_every=config.sample_every_steps,
              keep_states=keep_states, on_sample=on_sample)
    return result


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _write_csv_row(handle, items):
    handle.write(",".join(_fmt(x) for x in items) + "\n")


def _emitted_density(density):
    clamped, _ = density.clamped_values()
    total = clamped.sum() * density.grid.dx
    return clamped / total


def run(config: ExperimentConfig, out_dir) -> RunManifest:
    """Execute the experiment and write all artifacts into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    setup = resolve(config)
    parameters = {
        "omega_au": setup.params.omega,
        "beta_au": ("inf" if setup.params.beta == ZERO_TEMPERATURE
                    else setup.params.beta),
        "theta": setup.params.theta,
        "alpha_re": setup.params.alpha.real,
        "alpha_im": setup.params.alpha.imag,
        "z0_au": setup.z0,
        "a3_au": config.a3_au,
        "a4_au": config.a4_au,
        "grid_n": config.grid_n,
        "grid_halfwidth": config.grid_halfwidth,
        "dt_au": setup.dt_au,
        "n_steps": config.n_steps,
        "sample_every_steps": config.sample_every_steps,
        "n_max_moments": config.n_max_moments,
        "neg_norm_threshold": config.neg_norm_threshold,
        "emit": list(config.emit),
    }
    manifest = RunManifest(parameters=parameters, version=__version__)
    manifest_path = os.path.join(out_dir, "manifest.json")
    manifest.write(manifest_path)

    start = time.perf_counter()
    result = execute(config)
    manifest.wall_time_s = time.perf_counter() - start
    manifest.samples = [
        {"t_fs": float(r.t_fs), "norm_raw": float(r.norm_raw),
         "neg_norm_score": float(r.neg_norm),
         "moment_order": int(r.moment_order), "converged": bool(r.converged),
         "clamped_mass": {k: float(v) for k, v in r.clamped_mass.items()},
         "energy": float(r.observables["energy"]),
         "norm": float(r.observables["norm"])}
        for r in result.records]
    manifest.status = "complete" if result.all_converged else "non_converged"

    emit = set(config.emit)
    if "observables" in emit:
        with open(os.path.join(out_dir, "observables.csv"), "w",
                  encoding="utf-8") as handle:
            handle.write("t_fs,mean_exact,mean_uncorr,mean_moment,var_exact,"
                         "var_uncorr,var_moment,norm_raw,neg_norm_score,"
                         "moment_order\n")
            for row in result.observable_rows():
                _write_csv_row(handle, row)
    for key, name in (("density_exact", "exact"),
                      ("density_uncorr", "uncorr"),
                      ("density_moment", "moment")):
        if key not in emit:
            continue
        with open(os.path.join(out_dir, f"{key}.csv"), "w",
                  encoding="utf-8") as handle:
            _write_csv_row(handle, setup.grid.points)
            for r in result.records:
                values = _emitted_density(r.densities[name])
                _write_csv_row(handle, [r.t_fs, *values])
    for r in result.records:
        if r.wigner is not None:
            path = os.path.join(out_dir, f"wigner_t{r.t_fs:g}.csv")
            with open(path, "w", encoding="utf-8") as handle:
                _write_csv_row(handle, r.wigner.grid_z.points)
                _write_csv_row(handle, r.wigner.grid_p.points)
                for row in r.wigner.values:
                    _write_csv_row(handle, row)
        if r.rdm is not None:
            path = os.path.join(out_dir, f"rdm_t{r.t_fs:g}.csv")
            with open(path, "w", encoding="utf-8") as handle:
                _write_csv_row(handle, r.rdm.grid.points)
                for row in r.rdm.entries:
                    _write_csv_row(handle, row.real)
                for row in r.rdm.entries:
                    _write_csv_row(handle, row.imag)

    manifest.write(manifest_path)
    return manifest


def _read_density_csv(path):
    # first row is the grid alone; data rows prepend t_fs, so parse by line
    with open(path, encoding="utf-8") as handle:
        lines = [line for line in handle if line.strip()]
    grid_points = np.array([float(x) for x in lines[0].split(",")])
    body = np.array([[float(x) for x in line.split(",")]
                     for line in lines[1:]])
    return grid_points, body[:, 0], body[:, 1:]


def compare(dir_a, dir_b, method_a: str = "density_exact",
            method_b: str = "density_exact", out_path=None):
    """Per-time deviation table between two emitted density series.

    Returns rows (t_fs, l1, max_abs, mean_a, mean_b, var_a, var_b); writes
    them as CSV when ``out_path`` is given.
    """
    ga, ta, va = _read_density_csv(os.path.join(dir_a, f"{method_a}.csv"))
    gb, tb, vb = _read_density_csv(os.path.join(dir_b, f"{method_b}.csv"))
    if ga.shape != gb.shape or not np.array_equal(ga, gb):
        raise ValueError("density grids differ between the two runs")
    if ta.shape != tb.shape or not np.allclose(ta, tb, atol=1e-9):
        raise ValueError("time axes differ between the two runs")
    dx = ga[1] - ga[0]
    rows = []
    for t, a, b in zip(ta, va, vb):
        diff = a - b
        mean_a = (a * ga).sum() * dx
        mean_b = (b * ga).sum() * dx
        var_a = (a * ga ** 2).sum() * dx - mean_a ** 2
        var_b = (b * ga ** 2).sum() * dx - mean_b ** 2
        rows.append((t, np.abs(diff).sum() * dx, np.abs(diff).max(),
                     mean_a, mean_b, var_a, var_b))
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write("t_fs,l1,max_abs,mean_a,mean_b,var_a,var_b\n")
            for row in rows:
                _write_csv_row(handle, row)
    return rows
