"""Closed-form Bogoliubov / thermal algebra.

Mixing angles, temperature-dependent shift functions, the coordinate maps that
realize the two-mode squeezing on position grids, general two-mode BT matrices
for both statistics, and the analytic squeezed-Gaussian model.

The unitary e^{+iG(beta)} is never constructed explicitly: every use of it is
routed through the affine shift functions and the (a, b) coordinate map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import units
from .grids import Field2D, Grid1D

#: beta sentinel for T = 0; gives theta = 0 exactly (exp(-inf) == 0.0).
ZERO_TEMPERATURE = math.inf

_SQRT2 = math.sqrt(2.0)


def mixing_angle(beta: float, omega: float) -> float:
    """Bosonic mixing angle theta(beta) = arctanh exp(-beta*omega/2).

    ``beta`` may be the ZERO_TEMPERATURE sentinel (math.inf), in which case
    the result is exactly 0. beta <= 0 is rejected: theta diverges in the
    infinite-temperature limit.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if beta == ZERO_TEMPERATURE:
        return 0.0
    if not beta > 0:
        raise ValueError(
            f"beta must be positive (theta diverges as beta -> 0), got {beta}")
    return math.atanh(math.exp(-0.5 * beta * omega))


def theta_from_condition(sigma: int, beta: float, omega: float) -> float:
    """Mixing angle fixed by exp(-beta*omega/2) = tan(theta) or tanh(theta).

    sigma = +1 selects the fermionic branch (ordinary rotation angle in
    (0, pi/4]), sigma = -1 the bosonic branch (hyperbolic squeeze parameter,
    identical to :func:`mixing_angle`).
    """
    if sigma == -1:
        return mixing_angle(beta, omega)
    if sigma == +1:
        if omega <= 0:
            raise ValueError(f"omega must be positive, got {omega}")
        if beta == ZERO_TEMPERATURE:
            return 0.0
        if beta < 0:
            raise ValueError(f"beta must be >= 0 for fermions, got {beta}")
        return math.atan(math.exp(-0.5 * beta * omega))
    raise ValueError(f"sigma must be +1 (fermion) or -1 (boson), got {sigma}")


def g_of_theta(theta: float) -> float:
    """(1 - e^theta)/theta, continued to its limit -1 at theta = 0."""
    if theta == 0.0:
        return -1.0
    return -math.expm1(theta) / theta


@dataclass(frozen=True)
class ThermalParams:
    """Temperature / frequency / displacement bundle.

    ``alpha`` is the complex ladder-operator displacement in dimensionless
    oscillator units; the coordinate-space displacements it induces are
    delta_z = sqrt(2) Re(alpha) and delta_p = sqrt(2) Im(alpha).
    """

    beta: float
    omega: float
    theta: float
    alpha: complex = 0j

    @classmethod
    def for_oscillator(cls, beta: float, omega: float,
                       alpha: complex = 0j) -> "ThermalParams":
        return cls(beta=beta, omega=omega, theta=mixing_angle(beta, omega),
                   alpha=complex(alpha))

    @classmethod
    def from_temperature(cls, temperature_K: float, omega: float,
                         alpha: complex = 0j) -> "ThermalParams":
        return cls.for_oscillator(units.beta_from_kelvin(temperature_K),
                                  omega, alpha)

    @property
    def delta_z(self) -> float:
        return _SQRT2 * self.alpha.real

    @property
    def delta_p(self) -> float:
        return _SQRT2 * self.alpha.imag

    @property
    def cosh_theta(self) -> float:
        return math.cosh(self.theta)

    @property
    def sinh_theta(self) -> float:
        return math.sinh(self.theta)


def _xi(x, shift: float, theta: float):
    """Affine inverse-shift map x - shift*(1 - e^-theta)."""
    return x - shift * -math.expm1(-theta)


def _eta(x, shift: float, theta: float):
    """Affine forward-shift map x + shift*(e^theta - 1)."""
    return x + shift * math.expm1(theta)


def shift_xi(x, params: ThermalParams, component: str = "position"):
    """xi(x) = x - alpha (1 - e^-theta).

    ``component`` selects which part of the complex displacement applies:
    the real part for positions, the imaginary part for momenta.
    """
    return _xi(x, _component_shift(params, component), params.theta)


def shift_eta(x, params: ThermalParams, component: str = "position"):
    """eta(x) = x + alpha (e^theta - 1); inverse of xi up to e^{+-theta}."""
    return _eta(x, _component_shift(params, component), params.theta)


def _component_shift(params: ThermalParams, component: str) -> float:
    if component == "position":
        return params.alpha.real
    if component == "momentum":
        return params.alpha.imag
    raise ValueError(f"component must be 'position' or 'momentum', got {component!r}")


def map_ab(z, ztilde, params: ThermalParams):
    """Coordinate pair (a, b) that realizes e^{+iG} on position grids.

    a = eta(z) cosh(theta) - eta(z~) sinh(theta)
    b = -eta(z) sinh(theta) + eta(z~) cosh(theta)

    The eta shift acts in coordinate space, so the displacement parameter is
    delta_z = sqrt(2) Re(alpha). Unit Jacobian for all inputs.
    """
    ch, sh = params.cosh_theta, params.sinh_theta
    ez = _eta(z, params.delta_z, params.theta)
    ezt = _eta(ztilde, params.delta_z, params.theta)
    return ez * ch - ezt * sh, -ez * sh + ezt * ch


@dataclass(frozen=True)
class BTMatrix:
    """Two-mode Bogoliubov matrix for one statistics sector.

    Satisfies U M U^dagger = M with M = diag(1, sigma), and det U = 1.
    """

    sigma: int
    theta: float
    entries: np.ndarray = field(repr=False)

    @property
    def metric(self) -> np.ndarray:
        return np.diag([1.0, float(self.sigma)])

    def isometry_residual(self) -> float:
        """Max |U M U^dag - M|, relative to the squared matrix scale.

        The hyperbolic entries grow like cosh(theta), so the raw residual
        scales with cosh^2; dividing it out gives a precision measure that
        is angle-independent.
        """
        m = self.metric
        raw = float(np.max(np.abs(self.entries @ m @ self.entries.conj().T - m)))
        return raw / max(1.0, float(np.max(np.abs(self.entries))) ** 2)


def bt_matrix(sigma: int, theta: float) -> BTMatrix:
    """Hyperbolic (boson, sigma = -1) or rotation (fermion, sigma = +1) BT matrix."""
    if sigma == -1:
        ch, sh = math.cosh(theta), math.sinh(theta)
        entries = np.array([[ch, -sh], [-sh, ch]])
    elif sigma == +1:
        c, s = math.cos(theta), math.sin(theta)
        entries = np.array([[c, -s], [s, c]])
    else:
        raise ValueError(f"sigma must be +1 or -1, got {sigma}")
    return BTMatrix(sigma=sigma, theta=theta, entries=entries)


@dataclass(frozen=True)
class GaussianSqueezeModel:
    """Analytic model of an isotropic Gaussian 2-RDM under the iBT.

    sigma0: width of the isotropic Gaussian in iBT space
    delta:  center of the initial condition in iBT space
    Delta:  position shift of the HO potential in physical space
    theta:  mixing angle
    """

    sigma0: float
    delta: float
    Delta: float
    theta: float

    def __post_init__(self):
        if self.sigma0 <= 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")

    def transformed_center(self) -> float:
        """Center delta' = e^theta [delta - Delta (1 - e^-theta)] of the image."""
        return math.exp(self.theta) * _xi(self.delta, self.Delta, self.theta)


def squeeze_gaussian(model: GaussianSqueezeModel, grid_z: Grid1D,
                     grid_zt: Grid1D) -> Field2D:
    """Image of the isotropic Gaussian under the iBT, normalized on the grid.

    Evaluates exp(-[(a - delta)^2 + (b - delta)^2] / (2 sigma0^2)) with the
    (a, b) map shifted by the potential displacement Delta.
    """
    ch, sh = math.cosh(model.theta), math.sinh(model.theta)
    ez = _eta(grid_z.points, model.Delta, model.theta)[:, None]
    ezt = _eta(grid_zt.points, model.Delta, model.theta)[None, :]
    a = ez * ch - ezt * sh
    b = -ez * sh + ezt * ch
    values = np.exp(-((a - model.delta) ** 2 + (b - model.delta) ** 2)
                    / (2.0 * model.sigma0 ** 2))
    values /= values.sum() * grid_z.dx * grid_zt.dx
    return Field2D(grid_z=grid_z, grid_zt=grid_zt, values=values)
