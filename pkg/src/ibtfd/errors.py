"""Exception and warning types shared across the package."""


class ConfigurationError(Exception):
    """Invalid or inconsistent run configuration."""


class NumericalInstabilityError(Exception):
    """Propagation lost unitarity beyond tolerance (reduce dt / enlarge grid)."""


class AccuracyWarning(UserWarning):
    """A computed quantity is likely degraded (e.g. escaped norm, Hermiticity)."""


class ReconstructionWarning(UserWarning):
    """A moment reconstruction did not meet its convergence threshold."""
