"""Experiment configuration: flat key=value files, validation, run manifests."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field, asdict

from .errors import ConfigurationError

EMIT_CHOICES = frozenset({
    "density_exact", "density_uncorr", "density_moment", "rdm", "wigner",
    "observables", "squeeze_demo", "bt_selfcheck",
})

DEFAULT_EMIT = ("observables", "density_exact", "density_uncorr",
                "density_moment")

_Z0_RULE_RE = re.compile(r"^(fixed_physical|explicit)\(([^)]+)\)$")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run parameters for the thermalized-oscillator experiment.

    ``z0_rule`` selects how the initial Gaussian center is fixed:
    ``fixed_physical(v)`` keeps the initial physical-mode mean at v for any
    temperature (z0 = v e^{-theta}); ``explicit(v)`` uses z0 = v directly.
    """

    omega_cm1: float = 200.0
    a3_au: float = 0.0
    a4_au: float = 0.0
    temperature_K: float | str = "zero"
    alpha_re: float = 0.0
    alpha_im: float = 0.0
    z0_rule: str = "fixed_physical(0.5)"
    grid_n: int = 256
    grid_halfwidth: float = 12.0
    dt_fs: float = 0.25
    t_total_fs: float = 1000.0
    sample_every_fs: float = 10.0
    n_max_moments: int = 20
    neg_norm_threshold: float = 1e-4
    emit: tuple = DEFAULT_EMIT

    def __post_init__(self):
        for name in ("omega_cm1", "grid_halfwidth", "dt_fs", "t_total_fs",
                     "sample_every_fs", "neg_norm_threshold"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and value > 0
                    and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        for name in ("a3_au", "a4_au", "alpha_re", "alpha_im"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigurationError(f"{name} must be finite, got {value!r}")
        if self.temperature_K != "zero":
            if not (isinstance(self.temperature_K, (int, float))
                    and self.temperature_K > 0):
                raise ConfigurationError(
                    f"temperature_K must be 'zero' or a positive number, "
                    f"got {self.temperature_K!r}")
        if not (isinstance(self.grid_n, int) and self.grid_n >= 8
                and (self.grid_n & (self.grid_n - 1)) == 0):
            raise ConfigurationError(
                f"grid_n must be a power of two >= 8, got {self.grid_n!r}")
        if self.n_max_moments < 2:
            raise ConfigurationError(
                f"n_max_moments must be >= 2, got {self.n_max_moments!r}")
        ratio = self.sample_every_fs / self.dt_fs
        if abs(ratio - round(ratio)) > 1e-9:
            raise ConfigurationError(
                f"sample_every_fs ({self.sample_every_fs}) must be a multiple "
                f"of dt_fs ({self.dt_fs})")
        self.z0_value()  # validates the rule syntax
        emit = tuple(self.emit)
        object.__setattr__(self, "emit", emit)
        bad = set(emit) - EMIT_CHOICES
        if bad:
            raise ConfigurationError(
                f"unknown emit targets {sorted(bad)}; "
                f"choose from {sorted(EMIT_CHOICES)}")

    def z0_value(self) -> tuple[str, float]:
        """(rule name, rule parameter) parsed from z0_rule."""
        m = _Z0_RULE_RE.match(self.z0_rule.replace(" ", ""))
        if not m:
            raise ConfigurationError(
                f"z0_rule must look like fixed_physical(0.5) or "
                f"explicit(0.3), got {self.z0_rule!r}")
        try:
            value = float(m.group(2))
        except ValueError:
            raise ConfigurationError(
                f"z0_rule parameter {m.group(2)!r} is not a number") from None
        return m.group(1), value

    @property
    def sample_every_steps(self) -> int:
        return int(round(self.sample_every_fs / self.dt_fs))

    @property
    def n_steps(self) -> int:
        return int(round(self.t_total_fs / self.dt_fs))


_FIELD_TYPES = {
    "omega_cm1": float, "a3_au": float, "a4_au": float,
    "alpha_re": float, "alpha_im": float, "grid_halfwidth": float,
    "dt_fs": float, "t_total_fs": float, "sample_every_fs": float,
    "neg_norm_threshold": float, "grid_n": int, "n_max_moments": int,
    "z0_rule": str,
}


def parse_config_text(text: str) -> dict:
    """key = value lines into a raw dict; '#' starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(
                f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key in raw:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def config_from_mapping(raw: dict) -> ExperimentConfig:
    kwargs = {}
    for key, value in raw.items():
        if key == "temperature_K":
            kwargs[key] = value if value == "zero" else _coerce(key, value, float)
        elif key == "emit":
            kwargs[key] = tuple(p.strip() for p in str(value).split(",")
                                if p.strip())
        elif key in _FIELD_TYPES:
            kwargs[key] = _coerce(key, value, _FIELD_TYPES[key])
        else:
            raise ConfigurationError(f"unknown config key {key!r}")
    return ExperimentConfig(**kwargs)


def _coerce(key, value, typ):
    if isinstance(value, typ):
        return value
    try:
        if typ is int:
            out = int(str(value), 0)
        elif typ is float:
            out = float(value)
        else:
            out = str(value)
    except ValueError:
        raise ConfigurationError(
            f"config key {key!r}: cannot parse {value!r} as {typ.__name__}"
        ) from None
    return out


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as handle:
        return config_from_mapping(parse_config_text(handle.read()))


@dataclass
class RunManifest:
    """Resolved parameters plus per-sample diagnostics, serialized as JSON.

    Written with status 'running' before propagation and finalized with
    status 'complete' (or 'non_converged') and the wall time afterwards.
    """

    parameters: dict
    version: str
    status: str = "running"
    wall_time_s: float | None = None
    samples: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def write(self, path):
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json() + "\n")
