"""Density and Wigner reconstruction from finite moment sets.

A 1D density is expanded as rho(z) = sum_k d_k H_k(u) exp(-u^2) with
u = (z + mu) / (sqrt(2) sigma); the coefficients follow from the moments by
an exact triangular recursion. The hyperparameters (sigma, mu) are tuned by
a derivative-free search that minimizes the integrated negative part of the
reconstruction. The 2D phase-space analog uses Weyl-symmetrized cross
moments and a separable Hermite basis, fitted on marginal mismatch.
"""

from __future__ import annotations

import math
import warnings
from math import comb
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import ConfigurationError, ReconstructionWarning
from .grids import Grid1D
from .rdm import Density1D, WignerGrid

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MomentTable:
    """Raw moments of one state: pure position/momentum plus optional cross.

    position_moments[n] = <Z^n>, momentum_moments[m] = <P^m>, and
    cross_moments[n, m] = Weyl-symmetrized <Z^n P^m>.
    """

    position_moments: np.ndarray
    momentum_moments: np.ndarray | None = None
    cross_moments: np.ndarray | None = field(default=None, repr=False)
    n_max: int = 0

    def __post_init__(self):
        pos = np.asarray(self.position_moments, dtype=float)
        object.__setattr__(self, "position_moments", pos)
        n_max = self.n_max or pos.size - 1
        object.__setattr__(self, "n_max", n_max)
        if pos.size != n_max + 1:
            raise ConfigurationError(
                f"position_moments must have n_max+1 = {n_max + 1} entries")
        if abs(pos[0] - 1.0) > 1e-10:
            raise ConfigurationError(
                f"zeroth moment must be 1, got {pos[0]!r}")
        if self.momentum_moments is not None:
            mom = np.asarray(self.momentum_moments, dtype=float)
            object.__setattr__(self, "momentum_moments", mom)
        if self.cross_moments is not None:
            object.__setattr__(self, "cross_moments",
                               np.asarray(self.cross_moments, dtype=float))

    def raw(self, which: str = "position") -> np.ndarray:
        if which == "position":
            return self.position_moments
        if which == "momentum":
            if self.momentum_moments is None:
                raise ConfigurationError("momentum moments not available")
            return self.momentum_moments
        raise ConfigurationError(f"unknown moment axis {which!r}")


def _as_raw_moments(moments, which: str = "position") -> np.ndarray:
    if isinstance(moments, MomentTable):
        return moments.raw(which)
    return np.asarray(moments, dtype=float)


def _shift_raw(raw: np.ndarray, mu: float) -> np.ndarray:
    """Moments of X + mu from moments of X (binomial transform)."""
    n = raw.size - 1
    out = np.empty_like(raw)
    # reuse one row of binomial coefficients per order, built incrementally
    for k in range(n + 1):
        c = 1.0
        total = 0.0
        for j in range(k + 1):
            total += c * mu ** j * raw[k - j]
            c = c * (k - j) / (j + 1)
        out[k] = total
    return out


def shift_moments(moments, mu: float):
    """Shifted-distribution moments; exact group action, inverse is -mu."""
    if isinstance(moments, MomentTable):
        pos = _shift_raw(moments.position_moments, mu)
        return MomentTable(position_moments=pos,
                           momentum_moments=moments.momentum_moments,
                           cross_moments=moments.cross_moments,
                           n_max=moments.n_max)
    return _shift_raw(np.asarray(moments, dtype=float), mu)


def _coefficients_raw(raw: np.ndarray, sigma: float) -> np.ndarray:
    """Triangular inversion of the Gauss-Hermite moment relations.

    d_n = M_n / (sqrt(pi) sigma^{n+1} n! 2^{(n+1)/2})
          - sum_{m=1}^{floor(n/2)} d_{n-2m} / (2^{2m} m!).
    Prefactors are composed in log space to stay finite past n ~ 20.
    """
    if sigma <= 0.0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    n_top = raw.size - 1
    d = np.empty(n_top + 1)
    log_sigma = math.log(sigma)
    for n in range(n_top + 1):
        log_pref = (0.5 * math.log(math.pi) + (n + 1) * log_sigma
                    + math.lgamma(n + 1) + 0.5 * (n + 1) * math.log(2.0))
        val = raw[n] * math.exp(-log_pref)
        for m in range(1, n // 2 + 1):
            val -= d[n - 2 * m] / (4.0 ** m * math.factorial(m))
        d[n] = val
    return d


def hermite_coefficients(moments, sigma: float, which: str = "position"
                         ) -> np.ndarray:
    """Expansion coefficients d_k from raw moments at fixed width sigma."""
    return _coefficients_raw(_as_raw_moments(moments, which), sigma)


def _hermite_series(u: np.ndarray, coeffs: np.ndarray) -> np.ndarray:
    """sum_k c_k H_k(u) by the three-term recurrence (physicists' H_k)."""
    total = coeffs[0] * np.ones_like(u)
    if coeffs.size == 1:
        return total
    h_prev = np.ones_like(u)
    h = 2.0 * u
    total = total + coeffs[1] * h
    for k in range(2, coeffs.size):
        h_prev, h = h, 2.0 * u * h - 2.0 * (k - 1) * h_prev
        total = total + coeffs[k] * h
    return total


@dataclass(frozen=True)
class HermiteExpansion:
    """Gauss-Hermite density model: coefficients plus (sigma, mu).

    mu is the shift applied to the moments, so the model is centered at -mu
    in the original coordinate.
    """

    coefficients: np.ndarray
    sigma: float
    mu: float = 0.0

    @property
    def order(self) -> int:
        return self.coefficients.size - 1

    def evaluate(self, z: np.ndarray) -> np.ndarray:
        u = (np.asarray(z, dtype=float) + self.mu) / (SQRT2 * self.sigma)
        return _hermite_series(u, self.coefficients) * np.exp(-u * u)

    def negative_norm(self, grid: Grid1D) -> float:
        vals = self.evaluate(grid.points)
        return float(np.clip(-vals, 0.0, None).sum() * grid.dx)

    def containment_defect(self, grid: Grid1D) -> float:
        """|on-grid integral - M_0|; nonzero when mass leaks past the grid."""
        vals = self.evaluate(grid.points)
        total = float(vals.sum() * grid.dx)
        return abs(total - self.coefficients[0] * math.sqrt(2.0 * math.pi)
                   * self.sigma)


@dataclass(frozen=True)
class WignerExpansion:
    """Separable-basis phase-space model; correlations live in d_{kl}."""

    coefficients: np.ndarray = field(repr=False)
    sigma_z: float = 1.0
    sigma_p: float = 1.0
    mu_z: float = 0.0
    mu_p: float = 0.0

    @property
    def order(self) -> int:
        return self.coefficients.shape[0] - 1

    def evaluate(self, z: np.ndarray, p: np.ndarray) -> np.ndarray:
        uz = (np.asarray(z, dtype=float) + self.mu_z) / (SQRT2 * self.sigma_z)
        up = (np.asarray(p, dtype=float) + self.mu_p) / (SQRT2 * self.sigma_p)
        nz, mp = self.coefficients.shape
        hz = np.empty((uz.size, nz))
        hz[:, 0] = 1.0
        if nz > 1:
            hz[:, 1] = 2.0 * uz
        for k in range(2, nz):
            hz[:, k] = 2.0 * uz * hz[:, k - 1] - 2.0 * (k - 1) * hz[:, k - 2]
        hp = np.empty((up.size, mp))
        hp[:, 0] = 1.0
        if mp > 1:
            hp[:, 1] = 2.0 * up
        for k in range(2, mp):
            hp[:, k] = 2.0 * up * hp[:, k - 1] - 2.0 * (k - 1) * hp[:, k - 2]
        core = hz @ self.coefficients @ hp.T
        return core * np.outer(np.exp(-uz * uz), np.exp(-up * up))


def _shift_cross(cross: np.ndarray, mu_z: float, mu_p: float) -> np.ndarray:
    n_top, m_top = cross.shape[0] - 1, cross.shape[1] - 1
    out = np.empty_like(cross)
    for n in range(n_top + 1):
        for m in range(m_top + 1):
            total = 0.0
            for k in range(n + 1):
                ck = comb(n, k) * mu_z ** k
                for l in range(m + 1):
                    total += ck * comb(m, l) * mu_p ** l * cross[n - k, m - l]
            out[n, m] = total
    return out


def wigner_coefficients(moments, sigma_z: float, sigma_p: float) -> np.ndarray:
    """2D coefficients d_{nm} by the exact double recursion.

    d_{nm} = M_{nm} / (s_{nm} 2^{n+m})
             - sum_{(k,l) != (0,0)} d_{n-2k, m-2l} / (2^{2k+2l} k! l!)
    with s_{nm} = pi sigma_z^{n+1} sigma_p^{m+1} n! m! 2^{(2-n-m)/2}.
    """
    if sigma_z <= 0.0 or sigma_p <= 0.0:
        raise ConfigurationError("widths must be positive")
    if isinstance(moments, MomentTable):
        if moments.cross_moments is None:
            raise ConfigurationError("cross moments not available")
        cross = moments.cross_moments
    else:
        cross = np.asarray(moments, dtype=float)
    n_top, m_top = cross.shape[0] - 1, cross.shape[1] - 1
    log_sz, log_sp = math.log(sigma_z), math.log(sigma_p)
    d = np.empty_like(cross)
    for n in range(n_top + 1):
        for m in range(m_top + 1):
            log_pref = (math.log(math.pi) + (n + 1) * log_sz
                        + (m + 1) * log_sp + math.lgamma(n + 1)
                        + math.lgamma(m + 1)
                        + 0.5 * (n + m + 2) * math.log(2.0))
            val = cross[n, m] * math.exp(-log_pref)
            for k in range(n // 2 + 1):
                for l in range(m // 2 + 1):
                    if k == 0 and l == 0:
                        continue
                    val -= d[n - 2 * k, m - 2 * l] / (
                        4.0 ** (k + l) * math.factorial(k)
                        * math.factorial(l))
            d[n, m] = val
    return d


@dataclass(frozen=True)
class ReconstructionDiagnostics:
    """Fit report: order actually used, final score, and convergence flag."""

    order_used: int
    score: float
    converged: bool
    iterations: int = 0


def _default_grid(raw: np.ndarray) -> Grid1D:
    mean = raw[1]
    width = math.sqrt(max(raw[2] - raw[1] ** 2, 1e-12))
    return Grid1D(n=512, x_min=mean - 10.0 * width, x_max=mean + 10.0 * width)


def reconstruct_density(moments, n_max: int = 20,
                        neg_norm_threshold: float = 1e-4,
                        grid: Grid1D | None = None,
                        which: str = "position",
                        max_iterations: int = 200
                        ) -> tuple[Density1D, HermiteExpansion,
                                   ReconstructionDiagnostics]:
    """Fit a Gauss-Hermite density to the moments by negative-norm descent.

    Hyperparameters start at mu = -M_1 and sigma = central standard
    deviation, then a simplex search over (log sigma, mu) minimizes the
    integrated negative part of the candidate density. The expansion order
    sweeps downward from n_max; the first order whose optimized score meets
    the threshold wins. If none does, the best-scoring candidate is
    returned flagged as non-converged.
    """
    raw_full = _as_raw_moments(moments, which)
    if n_max < 2:
        raise ConfigurationError(f"n_max must be >= 2, got {n_max}")
    if raw_full.size < n_max + 1:
        raise ConfigurationError(
            f"need moments through order {n_max}, have {raw_full.size - 1}")
    if abs(raw_full[0] - 1.0) > 1e-10:
        raise ConfigurationError("moments must be unit-normalized")
    mu0 = -raw_full[1]
    var0 = raw_full[2] - raw_full[1] ** 2
    if var0 <= 0.0:
        raise ConfigurationError(f"central second moment {var0} not positive")
    sigma0 = math.sqrt(var0)
    if grid is None:
        grid = _default_grid(raw_full)

    best = None  # (score, expansion, order, iterations)
    for order in range(n_max, 1, -1):
        raw = raw_full[:order + 1]

        def score_of(params):
            log_sigma, mu = params
            expansion = HermiteExpansion(
                coefficients=_coefficients_raw(_shift_raw(raw, mu),
                                               math.exp(log_sigma)),
                sigma=math.exp(log_sigma), mu=mu)
            vals = expansion.evaluate(grid.points)
            neg = float(np.clip(-vals, 0.0, None).sum() * grid.dx)
            # penalty terms bar degenerate minima: candidates whose mass
            # leaks off the grid, or whose evaluated low moments no longer
            # round-trip (wide-sigma coefficient cancellation), are not
            # valid reconstructions even when the on-grid negative part
            # vanishes
            m0 = float(vals.sum() * grid.dx)
            m1 = float((vals * grid.points).sum() * grid.dx)
            m2 = float((vals * grid.points ** 2).sum() * grid.dx)
            penalty = (abs(m0 - raw[0]) + abs(m1 - raw[1])
                       + abs(m2 - raw[2]))
            return neg + penalty, expansion

        x0 = np.array([math.log(sigma0), mu0])
        f0, exp0 = score_of(x0)
        iterations = 0
        if f0 > 1e-12:
            res = minimize(lambda x: score_of(x)[0], x0,
                           method="Nelder-Mead",
                           options={"maxiter": max_iterations,
                                    "xatol": 1e-6, "fatol": 1e-10})
            iterations = int(res.nit)
            f_opt, exp_opt = score_of(res.x)
            if f_opt < f0:
                f0, exp0 = f_opt, exp_opt
        if best is None or f0 < best[0]:
            best = (f0, exp0, order, iterations)
        if f0 <= neg_norm_threshold:
            break

    combined, expansion, order, iterations = best
    converged = bool(combined <= neg_norm_threshold)
    score = expansion.negative_norm(grid)  # report without the penalty term
    if not converged:
        warnings.warn(
            f"density reconstruction did not reach negative norm "
            f"{neg_norm_threshold:g} (best {score:.3e} at order {order}); "
            "returning best effort", ReconstructionWarning, stacklevel=2)
    vals = expansion.evaluate(grid.points)
    norm_raw = float(vals.sum() * grid.dx)
    density = Density1D(grid=grid, values=vals / norm_raw, norm_raw=norm_raw)
    diag = ReconstructionDiagnostics(order_used=order, score=score,
                                     converged=converged,
                                     iterations=iterations)
    return density, expansion, diag


def reconstruct_wigner(moments: MomentTable, n_max: int,
                       marginals: tuple[Density1D, Density1D],
                       expansions: tuple[HermiteExpansion,
                                         HermiteExpansion] | None = None,
                       mismatch_threshold: float = 1e-4,
                       max_iterations: int = 200
                       ) -> tuple[WignerGrid, WignerExpansion,
                                  ReconstructionDiagnostics]:
    """Fit the 2D phase-space expansion against target 1D marginals.

    The position and momentum reconstructions supply the target marginals
    (and, via ``expansions``, the initial hyperparameters); a simplex search
    over (mu_z, mu_p, log sigma_z, log sigma_p) minimizes the summed L1
    marginal mismatch at fixed expansion order n_max.
    """
    if moments.cross_moments is None:
        raise ConfigurationError("cross moments required for the 2D fit")
    cross_full = moments.cross_moments
    order_z = min(n_max, cross_full.shape[0] - 1)
    order_p = min(n_max, cross_full.shape[1] - 1)
    cross = cross_full[:order_z + 1, :order_p + 1]
    target_z, target_p = marginals
    grid_z, grid_p = target_z.grid, target_p.grid

    if expansions is not None:
        mu_z0, sigma_z0 = expansions[0].mu, expansions[0].sigma
        mu_p0, sigma_p0 = expansions[1].mu, expansions[1].sigma
    else:
        mu_z0 = -target_z.mean()
        sigma_z0 = math.sqrt(target_z.variance())
        mu_p0 = -target_p.mean()
        sigma_p0 = math.sqrt(target_p.variance())

    def model_of(params):
        mu_z, mu_p, log_sz, log_sp = params
        sz, sp = math.exp(log_sz), math.exp(log_sp)
        d = wigner_coefficients(_shift_cross(cross, mu_z, mu_p), sz, sp)
        return WignerExpansion(coefficients=d, sigma_z=sz, sigma_p=sp,
                               mu_z=mu_z, mu_p=mu_p)

    def score_of(params):
        model = model_of(params)
        w = model.evaluate(grid_z.points, grid_p.points)
        miss_z = np.abs(target_z.values - w.sum(axis=1) * grid_p.dx)
        miss_p = np.abs(target_p.values - w.sum(axis=0) * grid_z.dx)
        score = float(miss_z.sum() * grid_z.dx + miss_p.sum() * grid_p.dx)
        return score, model, w

    x0 = np.array([mu_z0, mu_p0, math.log(sigma_z0), math.log(sigma_p0)])
    f0, model0, w0 = score_of(x0)
    iterations = 0
    if f0 > 1e-12:
        res = minimize(lambda x: score_of(x)[0], x0, method="Nelder-Mead",
                       options={"maxiter": max_iterations,
                                "xatol": 1e-6, "fatol": 1e-10})
        iterations = int(res.nit)
        f_opt, model_opt, w_opt = score_of(res.x)
        if f_opt < f0:
            f0, model0, w0 = f_opt, model_opt, w_opt
    converged = f0 <= mismatch_threshold
    if not converged:
        warnings.warn(
            f"phase-space reconstruction marginal mismatch {f0:.3e} exceeds "
            f"{mismatch_threshold:g}; returning best effort",
            ReconstructionWarning, stacklevel=2)
    surface = WignerGrid(grid_z=grid_z, grid_p=grid_p, values=w0,
                         max_imag=0.0)
    diag = ReconstructionDiagnostics(order_used=max(order_z, order_p),
                                     score=f0, converged=converged,
                                     iterations=iterations)
    return surface, model0, diag
