"""Config parsing, validation, and manifest serialization."""

import json
import math

import pytest

from ibtfd.config import (ExperimentConfig, RunManifest, config_from_mapping,
                          load_config, parse_config_text)
from ibtfd.errors import ConfigurationError
from ibtfd.experiment import resolve

from conftest import THETA_300


class TestParse:
    def test_key_value_lines_with_comments(self):
        raw = parse_config_text("""
            # a comment
            omega_cm1 = 200.0   # trailing comment
            grid_n = 128
        """)
        assert raw == {"omega_cm1": "200.0", "grid_n": "128"}

    def test_rejects_malformed_lines(self):
        with pytest.raises(ConfigurationError):
            parse_config_text("omega_cm1 200.0")

    def test_rejects_duplicate_keys(self):
        with pytest.raises(ConfigurationError):
            parse_config_text("grid_n = 128\ngrid_n = 256")

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError):
            config_from_mapping({"gridn": "128"})

    def test_bad_value_type(self):
        with pytest.raises(ConfigurationError):
            config_from_mapping({"grid_n": "many"})


class TestValidation:
    def test_defaults_are_valid(self):
        config = ExperimentConfig()
        assert config.temperature_K == "zero"
        assert config.n_steps == 4000
        assert config.sample_every_steps == 40

    def test_positivity(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(dt_fs=-0.25)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(omega_cm1=0.0)

    def test_grid_must_be_power_of_two(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(grid_n=100)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(grid_n=4)

    def test_sampling_must_align_with_steps(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(dt_fs=0.3, sample_every_fs=1.0)

    def test_temperature_forms(self):
        assert ExperimentConfig(temperature_K=300.0).temperature_K == 300.0
        with pytest.raises(ConfigurationError):
            ExperimentConfig(temperature_K=-10.0)
        with pytest.raises(ConfigurationError):
            ExperimentConfig(temperature_K="cold")

    def test_z0_rules(self):
        rule, value = ExperimentConfig(z0_rule="explicit(0.3)").z0_value()
        assert rule == "explicit" and value == 0.3
        rule, value = ExperimentConfig(
            z0_rule="fixed_physical( 0.5 )").z0_value()
        assert rule == "fixed_physical" and value == 0.5
        with pytest.raises(ConfigurationError):
            ExperimentConfig(z0_rule="center=0.5")
        with pytest.raises(ConfigurationError):
            ExperimentConfig(z0_rule="explicit(x)")

    def test_emit_choices(self):
        with pytest.raises(ConfigurationError):
            ExperimentConfig(emit=("observables", "plots"))

    def test_emit_string_splitting(self):
        config = config_from_mapping({"emit": "observables, density_exact"})
        assert config.emit == ("observables", "density_exact")


class TestResolve:
    def test_fixed_physical_rule_compensates_theta(self):
        setup = resolve(ExperimentConfig(temperature_K=300.0))
        assert setup.z0 == pytest.approx(0.5 * math.exp(-THETA_300),
                                         rel=1e-12)
        assert setup.params.theta == pytest.approx(THETA_300, rel=1e-12)

    def test_zero_temperature_sentinel(self):
        setup = resolve(ExperimentConfig())
        assert setup.params.theta == 0.0
        assert setup.z0 == 0.5

    def test_explicit_rule(self):
        setup = resolve(ExperimentConfig(temperature_K=300.0,
                                         z0_rule="explicit(0.3)"))
        assert setup.z0 == 0.3


class TestLoadAndPackagedConfigs:
    def test_round_trip_through_file(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("omega_cm1 = 150.0\ntemperature_K = zero\n"
                        "grid_n = 64\n")
        config = load_config(path)
        assert config.omega_cm1 == 150.0
        assert config.grid_n == 64

    def test_packaged_reference_configs(self):
        import ibtfd.configs
        import os
        base = os.path.dirname(ibtfd.configs.__file__)
        c300 = load_config(os.path.join(base, "reference_T300.cfg"))
        c0 = load_config(os.path.join(base, "reference_T0.cfg"))
        assert c300.temperature_K == 300.0
        assert c0.temperature_K == "zero"
        for c in (c300, c0):
            assert c.a3_au == 7.35e-5
            assert c.a4_au == 7.35e-6
            assert c.z0_rule == "fixed_physical(0.5)"
            assert c.t_total_fs == 1000.0


class TestManifest:
    def test_json_round_trip(self, tmp_path):
        manifest = RunManifest(parameters={"grid_n": 64}, version="0.1.0",
                               status="complete", wall_time_s=1.5,
                               samples=[{"t_fs": 0.0}])
        path = tmp_path / "manifest.json"
        manifest.write(path)
        data = json.loads(path.read_text())
        assert data["parameters"]["grid_n"] == 64
        assert data["status"] == "complete"
        assert data["samples"][0]["t_fs"] == 0.0
