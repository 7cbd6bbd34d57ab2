"""Split-step propagation of the iBT wavefunction and iBT-space moments.

The thermalized Hamiltonian for a cubic/quartic oscillator follows the
harmonic-oscillator thermalization: the quadratic part keeps the H - H~ form
while anharmonic terms acquire the substitution z -> cosh(theta) z +
sinh(theta) z~. Propagation is a symmetric (Strang) split-step spectral
scheme, numerically exact for two modes at small dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import ConfigurationError, NumericalInstabilityError
from .grids import Grid1D, WavefunctionGrid
from .moments import MomentTable
from .thermo import ThermalParams


@dataclass(frozen=True)
class PolynomialPotentialSpec:
    """Physical potential (omega/2) u^2 + a3 u^3 + a4 u^4 with u = z - Delta."""

    omega_z: float
    a3: float = 0.0
    a4: float = 0.0
    Delta: float = 0.0

    def __post_init__(self):
        if self.omega_z <= 0:
            raise ValueError(f"omega_z must be positive, got {self.omega_z}")
        for name in ("a3", "a4", "Delta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    def physical_potential(self, z):
        u = np.asarray(z, dtype=np.float64) - self.Delta
        return 0.5 * self.omega_z * u ** 2 + self.a3 * u ** 3 + self.a4 * u ** 4


@dataclass(frozen=True)
class IBTHamiltonian:
    """Grid representation of the thermalized Hamiltonian.

    potential[i, j] = V(z_i, z~_j); kinetic_spectrum[i, j] lives on the
    (k_z, k_z~) FFT grid and carries the H - H~ sign flip.
    """

    grid_z: Grid1D
    grid_zt: Grid1D
    potential: np.ndarray = field(repr=False)
    kinetic_spectrum: np.ndarray = field(repr=False)
    params: ThermalParams
    spec: PolynomialPotentialSpec


def build_ibt_hamiltonian(spec: PolynomialPotentialSpec, params: ThermalParams,
                          grid_z: Grid1D, grid_zt: Grid1D) -> IBTHamiltonian:
    """Thermalized Hamiltonian on the grid.

    V(z, z~) = (w/2)(u^2 - u~^2) + a3 Z^3 + a4 Z^4 with u = z - Delta,
    u~ = z~ - Delta and Z = cosh(theta) u + sinh(theta) u~; the potential
    shift Delta is carried through the displaced-BT relation, which reduces
    to evaluating the origin-centered form in displaced coordinates. The
    momentum displacement delta_p enters the kinetic spectrum analogously.
    """
    w = spec.omega_z
    ch, sh = params.cosh_theta, params.sinh_theta
    u = (grid_z.points - spec.Delta)[:, None]
    ut = (grid_zt.points - spec.Delta)[None, :]
    big_z = ch * u + sh * ut
    potential = 0.5 * w * (u ** 2 - ut ** 2)
    if spec.a3:
        potential = potential + spec.a3 * big_z ** 3
    if spec.a4:
        potential = potential + spec.a4 * big_z ** 4
    potential = np.ascontiguousarray(np.broadcast_to(potential,
                                                     (grid_z.n, grid_zt.n)))

    dp = params.delta_p
    kz = (grid_z.k_values - dp)[:, None]
    kzt = (grid_zt.k_values + dp)[None, :]
    kinetic = 0.5 * w * (kz ** 2 - kzt ** 2)
    kinetic = np.ascontiguousarray(np.broadcast_to(kinetic, (grid_z.n, grid_zt.n)))
    return IBTHamiltonian(grid_z=grid_z, grid_zt=grid_zt, potential=potential,
                          kinetic_spectrum=kinetic, params=params, spec=spec)


def initial_state(grid_z: Grid1D, grid_zt: Grid1D, z0: float,
                  width: float = 1.0) -> WavefunctionGrid:
    """Normalized product Gaussian exp(-(z-z0)^2/(2 w^2)) exp(-(z~-z0)^2/(2 w^2))."""
    if width <= 0:
        raise ValueError(f"width must be positive, got {width}")
    gz = np.exp(-((grid_z.points - z0) ** 2) / (2.0 * width ** 2))
    gzt = np.exp(-((grid_zt.points - z0) ** 2) / (2.0 * width ** 2))
    amps = (gz[:, None] * gzt[None, :]).astype(np.complex128)
    return WavefunctionGrid(grid_z, grid_zt, amps).normalized()


@dataclass
class Trajectory:
    """Sampled propagation record.

    ``observables`` maps names (mean_z, mean_zt, z2, zt2, zzt, energy, norm)
    to per-sample arrays; iBT-space expectation values throughout.
    """

    sample_times: np.ndarray
    states: list | None
    observables: dict[str, np.ndarray]


def _observe(amps, ham, cell_area):
    prob = np.abs(amps) ** 2
    norm = float(prob.sum() * cell_area)
    z = ham.grid_z.points[:, None]
    zt = ham.grid_zt.points[None, :]
    mean_z = float((z * prob).sum() * cell_area)
    mean_zt = float((zt * prob).sum() * cell_area)
    z2 = float((z ** 2 * prob).sum() * cell_area)
    zt2 = float((zt ** 2 * prob).sum() * cell_area)
    zzt = float((z * zt * prob).sum() * cell_area)
    e_pot = float((ham.potential * prob).sum() * cell_area)
    spect = np.fft.fft2(amps)
    e_kin = float((ham.kinetic_spectrum * np.abs(spect) ** 2).sum()
                  * cell_area / amps.size)
    return {"mean_z": mean_z, "mean_zt": mean_zt, "z2": z2, "zt2": zt2,
            "zzt": zzt, "energy": e_pot + e_kin, "norm": norm}


def propagate(state: WavefunctionGrid, ham: IBTHamiltonian, dt: float,
              n_steps: int, sample_every: int = 1, keep_states: bool = True,
              on_sample=None, norm_tol: float = 1e-6) -> Trajectory:
    """Strang split-step evolution, sampling every ``sample_every`` steps.

    The initial state counts as sample 0. Raises NumericalInstabilityError if
    the norm drifts by more than ``norm_tol`` (advice: smaller dt or a larger
    grid).
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if n_steps < 0 or sample_every < 1:
        raise ValueError("n_steps must be >= 0 and sample_every >= 1")
    if state.grid_z != ham.grid_z or state.grid_zt != ham.grid_zt:
        raise ConfigurationError("state and Hamiltonian grids differ")

    half_v = np.exp(-0.5j * dt * ham.potential)
    kin = np.exp(-1.0j * dt * ham.kinetic_spectrum)
    amps = np.array(state.amplitudes, dtype=np.complex128)
    cell_area = state.cell_area

    times = []
    states = [] if keep_states else None
    records = []

    def sample(step):
        t = state.time + step * dt
        obs = _observe(amps, ham, cell_area)
        if abs(obs["norm"] - 1.0) > norm_tol:
            raise NumericalInstabilityError(
                f"norm drifted to {obs['norm']:.3e} at t = {t:.6g} a.u.; "
                "reduce dt or enlarge the grid")
        snapshot = WavefunctionGrid(state.grid_z, state.grid_zt, amps.copy(), t)
        times.append(t)
        records.append(obs)
        if keep_states:
            states.append(snapshot)
        if on_sample is not None:
            on_sample(snapshot, obs)

    sample(0)
    for step in range(1, n_steps + 1):
        amps *= half_v
        amps = np.fft.ifft2(kin * np.fft.fft2(amps))
        amps *= half_v
        if step % sample_every == 0:
            sample(step)

    observables = {key: np.array([r[key] for r in records])
                   for key in records[0]}
    return Trajectory(sample_times=np.array(times), states=states,
                      observables=observables)


def propagate_single_mode(psi0: np.ndarray, grid: Grid1D, potential: np.ndarray,
                          omega: float, dt: float, n_steps: int,
                          sample_every: int = 1):
    """Reference single-mode split-step propagation of H = (w/2) p^2 + V(z).

    Returns (sample_times, list of wavefunction snapshots). Used for
    zero-temperature cross-checks of the full two-mode pipeline.
    """
    half_v = np.exp(-0.5j * dt * np.asarray(potential))
    kin = np.exp(-1.0j * dt * 0.5 * omega * grid.k_values ** 2)
    psi = np.array(psi0, dtype=np.complex128)
    times = [0.0]
    snaps = [psi.copy()]
    for step in range(1, n_steps + 1):
        psi *= half_v
        psi = np.fft.ifft(kin * np.fft.fft(psi))
        psi *= half_v
        if step % sample_every == 0:
            times.append(step * dt)
            snaps.append(psi.copy())
    return np.array(times), snaps


def _weyl_moment(amps: np.ndarray, pos, mom, n: int, m: int,
                 cell_area: float) -> float:
    """Weyl-symmetrized <Pos^n Mom^m> for a canonical pair.

    ``pos`` multiplies on the position grid, ``mom`` on the FFT grid; both
    must broadcast against ``amps``. Uses the symmetrization
    2^-n sum_k C(n,k) Pos^k Mom^m Pos^(n-k), evaluated spectrally.
    """
    prob_weight = cell_area
    if m == 0:
        prob = np.abs(amps) ** 2
        val = (prob * pos ** n).sum() if n else prob.sum()
        return float(val * prob_weight)
    if n == 0:
        spect = np.fft.fft2(amps)
        return float(((np.abs(spect) ** 2) * mom ** m).sum()
                     * prob_weight / amps.size)
    pos_b = np.broadcast_to(pos, amps.shape)
    hats = [np.fft.fft2(amps * pos_b ** j) for j in range(n + 1)]
    mm = np.broadcast_to(mom, amps.shape) ** m
    total = 0.0
    for k in range(n + 1):
        total += comb(n, k) * np.real(np.vdot(hats[k], mm * hats[n - k]))
    return float(total * prob_weight / amps.size / 2 ** n)


def ibt_moment(state: WavefunctionGrid, n: int, m: int, which: str = "z",
               max_order: int = 20) -> float:
    """Weyl-symmetrized iBT-space moment <z^n p_z^m> (or tilde-mode analog).

    Tilde momenta follow the tilde-conjugate convention (sign-flipped
    spectral multiplier). Orders above ``max_order`` are rejected.
    """
    if n < 0 or m < 0:
        raise ValueError("moment orders must be non-negative")
    if n + m > max_order:
        raise ValueError(f"moment order {n + m} exceeds max order {max_order}")
    if which == "z":
        pos = state.grid_z.points[:, None]
        mom = state.grid_z.k_values[:, None]
    elif which == "tilde":
        pos = state.grid_zt.points[None, :]
        mom = -state.grid_zt.k_values[None, :]
    else:
        raise ValueError(f"which must be 'z' or 'tilde', got {which!r}")
    return _weyl_moment(state.amplitudes, pos, mom, n, m, state.cell_area)


def ibt_position_cross_moment(state: WavefunctionGrid, n: int, m: int) -> float:
    """<z^n z~^m> in iBT space (commuting operators, direct grid sum)."""
    prob = np.abs(state.amplitudes) ** 2
    z = state.grid_z.points[:, None]
    zt = state.grid_zt.points[None, :]
    return float((prob * z ** n * zt ** m).sum() * state.cell_area)


def _physical_fields(state: WavefunctionGrid, params: ThermalParams):
    ch, sh = params.cosh_theta, params.sinh_theta
    shrink = -math.expm1(-params.theta)  # 1 - e^-theta
    sz = params.delta_z * shrink
    sp = params.delta_p * shrink
    pos = ch * (state.grid_z.points[:, None] - sz) \
        + sh * (state.grid_zt.points[None, :] - sz)
    mom = ch * (state.grid_z.k_values[:, None] - sp) \
        + sh * (-state.grid_zt.k_values[None, :] - sp)
    return pos, mom


def physical_moment(state: WavefunctionGrid, params: ThermalParams,
                    n: int, m: int = 0) -> float:
    """Physical-mode moment M_nm from iBT moments via the cosh/sinh mixing.

    Equivalent to the binomial sum over mixed iBT moments; mixed
    position-momentum moments are Weyl-symmetrized (Wigner moments).
    """
    if n < 0 or m < 0:
        raise ValueError("moment orders must be non-negative")
    pos, mom = _physical_fields(state, params)
    return _weyl_moment(state.amplitudes, pos, mom, n, m, state.cell_area)


def physical_moment_table(state: WavefunctionGrid, params: ThermalParams,
                          n_max: int, m_max: int = 0) -> MomentTable:
    """All physical moments up to order n_max (and cross moments up to m_max).

    Position and momentum moments are computed from cumulative powers of the
    mixed multiplier fields; cross moments reuse one set of FFTs.
    """
    if n_max < 2:
        raise ValueError(f"n_max must be >= 2, got {n_max}")
    pos, mom = _physical_fields(state, params)
    amps = state.amplitudes
    cell_area = state.cell_area
    prob = np.abs(amps) ** 2

    position = np.empty(n_max + 1)
    acc = np.ones_like(prob)
    for n in range(n_max + 1):
        position[n] = float((prob * acc).sum() * cell_area)
        if n < n_max:
            acc = acc * pos

    spect = np.fft.fft2(amps)
    spec_prob = np.abs(spect) ** 2 / amps.size
    momentum = np.empty(n_max + 1)
    acc = np.ones_like(spec_prob)
    mom_b = np.broadcast_to(mom, amps.shape)
    for n in range(n_max + 1):
        momentum[n] = float((spec_prob * acc).sum() * cell_area)
        if n < n_max:
            acc = acc * mom_b

    cross = None
    if m_max > 0:
        pos_b = np.broadcast_to(pos, amps.shape)
        hats = [spect]
        acc = np.ones_like(prob)
        for j in range(1, n_max + 1):
            acc = acc * pos_b
            hats.append(np.fft.fft2(amps * acc))
        mom_pows = [np.ones_like(spec_prob)]
        for _ in range(m_max):
            mom_pows.append(mom_pows[-1] * mom_b)
        cross = np.empty((n_max + 1, m_max + 1))
        for n in range(n_max + 1):
            for m in range(m_max + 1):
                total = 0.0
                for k in range(n + 1):
                    total += comb(n, k) * np.real(
                        np.vdot(hats[k], mom_pows[m] * hats[n - k]))
                cross[n, m] = total * cell_area / amps.size / 2 ** n
    return MomentTable(position_moments=position, momentum_moments=momentum,
                       cross_moments=cross, n_max=n_max)
