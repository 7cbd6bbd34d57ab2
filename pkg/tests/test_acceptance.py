"""Acceptance gate: ten numbered criteria, one pass/fail line each.

Heavy runs are shared through module-scoped fixtures:
  * a 1 ps, 300 K reference trajectory on a fine 512^2 grid (halfwidth 18)
    for the density/variance/reconstruction criteria,
  * a 1 ps zero-temperature pair (full two-mode pipeline vs direct
    single-mode propagation),
  * a 1 ps conservation run at dt = 0.025 fs; the Strang splitting error
    scales as dt^2 and needs this step size to keep the relative energy
    drift under the 1e-6 budget.
"""

import math
import warnings

import numpy as np
import pytest

from ibtfd import cli
from ibtfd.config import ExperimentConfig
from ibtfd.errors import AccuracyWarning
from ibtfd.experiment import execute
from ibtfd.grids import Grid1D
from ibtfd.moments import reconstruct_density
from ibtfd.propagate import (PolynomialPotentialSpec, build_ibt_hamiltonian,
                             initial_state, propagate, propagate_single_mode)
from ibtfd.rdm import exact_1rdm, exact_density, wigner_from_1rdm
from ibtfd.thermo import (GaussianSqueezeModel, bt_matrix, g_of_theta,
                          shift_eta, shift_xi, squeeze_gaussian,
                          ThermalParams)
from ibtfd.units import fs_to_au

from conftest import (A3, A4, OMEGA, THETA_300, Z0_PHYSICAL,
                      gaussian_raw_moments, mixture_raw_moments,
                      thermal_variance)


def report(number: int, ok: bool, detail: str) -> bool:
    line = f"[PRIMARY {number}] {'PASS' if ok else 'FAIL'}: {detail}"
    print(line)
    # also bypass output capture so the verdict lines always reach the log
    import sys
    if sys.stdout is not sys.__stdout__:
        print(line, file=sys.__stdout__)
    return ok


@pytest.fixture(scope="module")
def run300_fine():
    """1 ps, 300 K reference trajectory with the full extraction pipeline."""
    config = ExperimentConfig(
        omega_cm1=200.0, a3_au=A3, a4_au=A4, temperature_K=300.0,
        z0_rule="fixed_physical(0.5)", grid_n=512, grid_halfwidth=18.0,
        dt_fs=0.25, t_total_fs=1000.0, sample_every_fs=10.0,
        n_max_moments=20, neg_norm_threshold=1e-4)
    return execute(config)


@pytest.fixture(scope="module")
def t0_pair(spec_ref, params_T0):
    """Zero-temperature pipeline vs direct single-mode propagation, 1 ps."""
    grid = Grid1D.centered(256, 12.0)
    dt = fs_to_au(0.25)
    n_steps, every = 4000, 40

    densities = []
    ham = build_ibt_hamiltonian(spec_ref, params_T0, grid, grid)
    state = initial_state(grid, grid, z0=Z0_PHYSICAL)
    propagate(state, ham, dt, n_steps, sample_every=every, keep_states=False,
              on_sample=lambda snap, obs: densities.append(
                  exact_density(snap, params_T0).values))

    gz = np.exp(-((grid.points - Z0_PHYSICAL) ** 2) / 2.0).astype(complex)
    gz /= math.sqrt(float(np.sum(np.abs(gz) ** 2) * grid.dx))
    pot = spec_ref.physical_potential(grid.points)
    _, snaps = propagate_single_mode(gz, grid, pot, OMEGA, dt, n_steps,
                                     sample_every=every)
    singles = [np.abs(psi) ** 2 for psi in snaps]
    return densities, singles


@pytest.fixture(scope="module")
def conservation_run(spec_ref, params_300):
    """1 ps reference system at conservation-grade step size."""
    grid = Grid1D.centered(256, 18.0)
    ham = build_ibt_hamiltonian(spec_ref, params_300, grid, grid)
    z0 = Z0_PHYSICAL * math.exp(-params_300.theta)
    state = initial_state(grid, grid, z0=z0)
    dt = fs_to_au(0.025)
    return propagate(state, ham, dt, 40000, sample_every=400,
                     keep_states=False, norm_tol=1e-6)


def test_criterion_01_initial_physical_mean(params_300, params_T0, grid_256):
    devs = []
    for params in (params_T0, params_300):
        z0 = Z0_PHYSICAL * math.exp(-params.theta)
        state = initial_state(grid_256, grid_256, z0=z0)
        de = exact_density(state, params)
        devs.append(abs(de.mean() - 0.5))
    ok = all(d < 1e-6 for d in devs)
    assert report(1, ok, f"t=0 mean offsets from 0.5 a.u.: "
                         f"T=0 {devs[0]:.2e}, 300 K {devs[1]:.2e} "
                         f"(tol 1e-6)")


def test_criterion_02_zero_temperature_reduction(t0_pair):
    densities, singles = t0_pair
    worst = max(float(np.max(np.abs(d - s)))
                for d, s in zip(densities, singles))
    ok = worst < 1e-8
    assert report(2, ok, f"exact-density vs single-mode marginal, "
                         f"{len(densities)} samples over 1 ps: "
                         f"max deviation {worst:.2e} (tol 1e-8)")


def test_criterion_03_first_moment_agreement(run300_fine):
    worst = 0.0
    for row in run300_fine.observable_rows():
        _, me, mu, mm = row[0], row[1], row[2], row[3]
        worst = max(worst, abs(me - mu), abs(me - mm), abs(mu - mm))
    ok = worst < 1e-3
    assert report(3, ok, f"pairwise first-moment spread over 1 ps at 300 K: "
                         f"max {worst:.2e} (tol 1e-3)")


def test_criterion_04_variance_behavior(run300_fine):
    rows = run300_fine.observable_rows()
    worst_moment = max(abs(r[6] - r[4]) / r[4] for r in rows)
    early = [r for r in rows if r[0] < 50.0]
    worst_uncorr_early = max(abs(r[5] - r[4]) / r[4] for r in early)
    last = rows[-1]
    broadened = last[5] > last[4]
    ok_a = worst_moment <= 0.02
    ok_b_early = worst_uncorr_early <= 0.02
    ok = ok_a and ok_b_early and broadened
    assert report(4, ok,
                  f"(a) moment-variance tracking max {worst_moment:.2%} "
                  f"(tol 2%); (b) uncorrelated early-time max "
                  f"{worst_uncorr_early:.2%} for t<50 fs (tol 2%), "
                  f"1 ps broadening {last[5]:.3f} > {last[4]:.3f}: "
                  f"{broadened}")


def test_criterion_05_thermal_gaussian_variance(params_300):
    grid = Grid1D.centered(2048, 12.0)
    z0 = Z0_PHYSICAL * math.exp(-params_300.theta)
    state = initial_state(grid, grid, z0=z0)
    de = exact_density(state, params_300)
    want = thermal_variance(params_300.theta)
    dev = abs(de.variance() - want)
    ok = dev < 1e-4
    assert report(5, ok, f"t=0 exact-density variance vs cosh(2 theta)/2 = "
                         f"{want:.6f}: offset {dev:.2e} (tol 1e-4)")


def test_criterion_06_reconstruction_convergence(run300_fine):
    records = run300_fine.records
    worst_neg = max(r.neg_norm for r in records)
    orders = [r.moment_order for r in records]
    ok_run = (all(r.converged for r in records) and worst_neg <= 1e-4
              and min(orders) >= 4 and max(orders) <= 20)

    raw_g = gaussian_raw_moments(0.3, 0.8, 15)
    dg, _, diag_g = reconstruct_density(raw_g, n_max=15)
    want_g = np.exp(-(dg.grid.points - 0.3) ** 2 / 1.6) / math.sqrt(
        2.0 * math.pi * 0.8)
    l1_g = float(np.abs(dg.values - want_g).sum() * dg.grid.dx)

    raw_m = mixture_raw_moments([-1.0, 1.0], [0.3, 0.3], [0.5, 0.5], 15)
    dm, _, diag_m = reconstruct_density(raw_m, n_max=15)
    want_m = 0.5 * (
        np.exp(-(dm.grid.points + 1.0) ** 2 / 0.6)
        + np.exp(-(dm.grid.points - 1.0) ** 2 / 0.6)) / math.sqrt(
            2.0 * math.pi * 0.3)
    l1_m = float(np.abs(dm.values - want_m).sum() * dm.grid.dx)

    ok = (ok_run and diag_g.converged and l1_g < 1e-6
          and diag_m.converged and l1_m < 0.02)
    assert report(6, ok,
                  f"reference-run negative norms <= {worst_neg:.2e} "
                  f"(tol 1e-4), orders in [{min(orders)}, {max(orders)}]; "
                  f"Gaussian oracle L1 {l1_g:.2e} (tol 1e-6), mixture "
                  f"oracle L1 {l1_m:.2e} (tol 0.02)")


def test_criterion_07_squeezing_analytics():
    sigma0, delta = 0.5, 1.0
    free = GaussianSqueezeModel(sigma0=sigma0, delta=delta, Delta=0.0,
                                theta=THETA_300)
    pinned = GaussianSqueezeModel(sigma0=sigma0, delta=delta, Delta=delta,
                                  theta=THETA_300)
    err_free = abs(free.transformed_center() - math.exp(THETA_300) * delta)
    err_pinned = abs(pinned.transformed_center() - delta)

    grid = Grid1D.centered(256, 12.0)
    ch, sh = math.cosh(THETA_300), math.sinh(THETA_300)
    a = grid.points[:, None] * ch - grid.points[None, :] * sh
    b = -grid.points[:, None] * sh + grid.points[None, :] * ch
    raw = np.exp(-((a - delta) ** 2 + (b - delta) ** 2) / (2.0 * sigma0 ** 2))
    integral = float(raw.sum()) * grid.dx * grid.dx
    err_mass = abs(integral / (2.0 * math.pi * sigma0 ** 2) - 1.0)
    norm_grid = squeeze_gaussian(free, grid, grid).integrate()

    ok = (err_free < 1e-12 and err_pinned < 1e-12 and err_mass < 1e-8
          and abs(norm_grid - 1.0) < 1e-10)
    assert report(7, ok,
                  f"center errors: free {err_free:.2e}, pinned "
                  f"{err_pinned:.2e} (tol 1e-12); squeezed-Gaussian mass "
                  f"preserved to {err_mass:.2e} (tol 1e-8)")


def test_criterion_08_wigner_properties(params_300, spec_ref):
    z0 = Z0_PHYSICAL * math.exp(-params_300.theta)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        # thermal Gaussian surface on a fine grid
        grid = Grid1D.centered(512, 12.0)
        state = initial_state(grid, grid, z0=z0)
        rho = exact_1rdm(state, params_300)
        w = wigner_from_1rdm(rho)
        # evolved anharmonic state on the production grid
        grid_c = Grid1D.centered(128, 12.0)
        ham = build_ibt_hamiltonian(spec_ref, params_300, grid_c, grid_c)
        traj = propagate(initial_state(grid_c, grid_c, z0=z0), ham,
                         fs_to_au(0.25), 400, sample_every=400)
        rho_t = exact_1rdm(traj.states[-1], params_300)
        w_t = wigner_from_1rdm(rho_t)

    imag = max(w.max_imag, w_t.max_imag)
    marg = max(float(np.max(np.abs(w.marginal_position() - rho.diagonal()))),
               float(np.max(np.abs(w_t.marginal_position()
                                   - rho_t.diagonal()))))
    var = thermal_variance(params_300.theta)
    zz = w.grid_z.points[:, None] - Z0_PHYSICAL
    pp = w.grid_p.points[None, :]
    want = np.exp(-(zz ** 2 + pp ** 2) / (2.0 * var)) / (2.0 * math.pi * var)
    l1 = float(np.abs(w.values - want).sum() * w.grid_z.dx * w.grid_p.dx)

    ok = imag < 1e-6 and marg < 1e-6 and l1 < 1e-3
    assert report(8, ok,
                  f"imaginary residue {imag:.2e} (tol 1e-6), p-marginal "
                  f"identity {marg:.2e} (tol 1e-6), thermal surface L1 "
                  f"{l1:.2e} (tol 1e-3)")


def test_criterion_09_conservation_suite(conservation_run):
    norm = conservation_run.observables["norm"]
    energy = conservation_run.observables["energy"]
    norm_drift = float(np.max(np.abs(norm - 1.0)))
    e_drift = float(np.max(np.abs(energy - energy[0])) / abs(energy[0]))

    grid = Grid1D.centered(128, 10.0)
    pot = 0.5 * OMEGA * grid.points ** 2
    psi0 = np.exp(-(grid.points - 0.5) ** 2 / 2.0).astype(complex)
    psi0 /= math.sqrt(float(np.sum(np.abs(psi0) ** 2) * grid.dx))
    t_total = fs_to_au(100.0)

    def final(dt_fs):
        dt = fs_to_au(dt_fs)
        n = int(round(t_total / dt))
        _, snaps = propagate_single_mode(psi0, grid, pot, OMEGA, dt, n,
                                         sample_every=n)
        return snaps[-1]

    ref = final(0.03125)
    ratio = (float(np.max(np.abs(final(0.5) - ref)))
             / float(np.max(np.abs(final(0.25) - ref))))

    ok = norm_drift < 1e-8 and e_drift < 1e-6 and abs(ratio - 4.0) <= 0.5
    assert report(9, ok,
                  f"norm drift {norm_drift:.2e} (tol 1e-8), relative energy "
                  f"drift {e_drift:.2e} (tol 1e-6) over 1 ps at dt = "
                  f"0.025 fs; harmonic dt vs dt/2 error ratio {ratio:.3f} "
                  f"(want 4 +- 0.5)")


def test_criterion_10_bogoliubov_algebra():
    rc = cli.main(["bt-check", "--seed-check", "0"])

    rng = np.random.default_rng(42)
    worst_iso = 0.0
    for sigma, hi in ((-1, 5.0), (+1, math.pi / 2)):
        for theta in rng.uniform(0.0, hi, size=100):
            worst_iso = max(worst_iso,
                            bt_matrix(sigma, float(theta)).isometry_residual())
    worst_inv = 0.0
    for _ in range(10_000):
        x = float(rng.uniform(-5.0, 5.0))
        theta = float(rng.uniform(0.0, 3.0))
        params = ThermalParams(
            beta=1.0, omega=1.0, theta=theta,
            alpha=complex(rng.uniform(-2, 2), rng.uniform(-2, 2)))
        back = shift_xi(math.exp(-theta)
                        * shift_eta(math.exp(theta) * x, params), params)
        worst_inv = max(worst_inv, abs(back - x) / max(1.0, abs(x)))

    ok = (rc == 0 and worst_iso < 1e-12 and worst_inv < 1e-12
          and g_of_theta(0.0) == -1.0)
    assert report(10, ok,
                  f"bt-check exit {rc}; isometry residual {worst_iso:.2e}, "
                  f"xi/eta inverse residual over 1e4 samples "
                  f"{worst_inv:.2e} (tol 1e-12); g(0) = {g_of_theta(0.0)}")
