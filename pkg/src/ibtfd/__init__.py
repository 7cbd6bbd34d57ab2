"""Thermofield dynamics in the inverse-Bogoliubov (iBT) picture.

Exact split-step propagation of the two-mode iBT wavefunction, extraction of
thermal reduced 1-particle densities / 1-RDMs / Wigner distributions, and
Hermite-moment reconstruction of densities from finite moment sets.
"""

__version__ = "0.1.0"

from .errors import (
    AccuracyWarning,
    ConfigurationError,
    NumericalInstabilityError,
    ReconstructionWarning,
)
from .thermo import (
    ZERO_TEMPERATURE,
    BTMatrix,
    GaussianSqueezeModel,
    ThermalParams,
    bt_matrix,
    g_of_theta,
    map_ab,
    mixing_angle,
    shift_eta,
    shift_xi,
    squeeze_gaussian,
    theta_from_condition,
)
from .grids import (
    Field2D,
    Grid1D,
    WavefunctionGrid,
    bilinear_sample,
    fourier_forward,
    fourier_inverse,
    integrate_1d,
)
from .propagate import (
    IBTHamiltonian,
    PolynomialPotentialSpec,
    Trajectory,
    build_ibt_hamiltonian,
    ibt_moment,
    initial_state,
    physical_moment,
    physical_moment_table,
    propagate,
    propagate_single_mode,
)
from .rdm import (
    Density1D,
    DensityMatrix1D,
    DiagonalTwoRDM,
    WignerGrid,
    diagonal_2rdm,
    exact_1rdm,
    exact_density,
    uncorrelated_density,
    wigner_from_1rdm,
)
from .moments import (
    HermiteExpansion,
    MomentTable,
    ReconstructionDiagnostics,
    WignerExpansion,
    hermite_coefficients,
    reconstruct_density,
    reconstruct_wigner,
    shift_moments,
    wigner_coefficients,
)
from .config import ExperimentConfig, RunManifest, load_config
from .experiment import ExperimentResult, compare, execute, run
