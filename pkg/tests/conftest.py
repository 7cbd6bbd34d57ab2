"""Shared fixtures and reference constants for the test suite."""

import math

import numpy as np
import pytest

from ibtfd.grids import Grid1D
from ibtfd.propagate import PolynomialPotentialSpec
from ibtfd.thermo import ThermalParams, ZERO_TEMPERATURE, mixing_angle
from ibtfd.units import beta_from_kelvin, cm1_to_hartree

# reference mode: 200 cm^-1 quartic oscillator at 300 K
OMEGA = cm1_to_hartree(200.0)
BETA_300 = beta_from_kelvin(300.0)
THETA_300 = mixing_angle(BETA_300, OMEGA)
A3 = 7.35e-5
A4 = 7.35e-6
Z0_PHYSICAL = 0.5


@pytest.fixture(scope="session")
def params_300() -> ThermalParams:
    return ThermalParams.for_oscillator(BETA_300, OMEGA)


@pytest.fixture(scope="session")
def params_T0() -> ThermalParams:
    return ThermalParams.for_oscillator(ZERO_TEMPERATURE, OMEGA)


@pytest.fixture(scope="session")
def spec_ref() -> PolynomialPotentialSpec:
    return PolynomialPotentialSpec(omega_z=OMEGA, a3=A3, a4=A4)


@pytest.fixture(scope="session")
def grid_256() -> Grid1D:
    return Grid1D.centered(256, 12.0)


def gaussian_raw_moments(mean: float, var: float, n_max: int) -> np.ndarray:
    """Raw moments of a normal distribution by the standard recursion."""
    out = np.empty(n_max + 1)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = mean
    for n in range(2, n_max + 1):
        out[n] = mean * out[n - 1] + (n - 1) * var * out[n - 2]
    return out


def mixture_raw_moments(means, variances, weights, n_max: int) -> np.ndarray:
    total = np.zeros(n_max + 1)
    for m, v, w in zip(means, variances, weights):
        total += w * gaussian_raw_moments(m, v, n_max)
    return total


def thermal_variance(theta: float) -> float:
    """Per-quadrature variance of the displaced thermal oscillator state."""
    return 0.5 * math.cosh(2.0 * theta)
