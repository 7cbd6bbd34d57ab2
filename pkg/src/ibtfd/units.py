"""Hartree atomic-unit conversions (hbar = 1, dimensionless oscillator coordinates).

Boundary conversions only; everything internal is in atomic units.
"""

import math

# 1 cm^-1 in hartree
HARTREE_PER_CM1 = 1.0 / 219474.6313632
# Boltzmann constant in hartree per kelvin
KB_HARTREE_PER_K = 3.166811563e-6
# 1 fs in atomic time units
AU_PER_FS = 41.341373335


def cm1_to_hartree(value_cm1: float) -> float:
    return value_cm1 * HARTREE_PER_CM1


def hartree_to_cm1(value_hartree: float) -> float:
    return value_hartree / HARTREE_PER_CM1


def fs_to_au(t_fs: float) -> float:
    return t_fs * AU_PER_FS


def au_to_fs(t_au: float) -> float:
    return t_au / AU_PER_FS


def beta_from_kelvin(temperature_K: float) -> float:
    """Inverse temperature in 1/hartree; T = 0 maps to the beta = inf sentinel."""
    if temperature_K < 0:
        raise ValueError(f"temperature must be >= 0 K, got {temperature_K}")
    if temperature_K == 0:
        return math.inf
    return 1.0 / (KB_HARTREE_PER_K * temperature_K)


def kelvin_from_beta(beta: float) -> float:
    if beta == math.inf:
        return 0.0
    return 1.0 / (KB_HARTREE_PER_K * beta)
