import json

import numpy as np
import pytest

from relpower.exceptions import ConfigInvalid, EvaluationOutOfDomain
from relpower.scenarios import (Scenario, bundled_scenario_names, config_digest,
                                load_bundled_config, load_config_file,
                                validate_config)


def minimal_config(**overrides):
    config = {
        "name": "minimal",
        "geometry": {"kind": "box", "center": [0.0, 0.0, 0.0],
                     "halfwidths": [0.5, 0.5, 0.5]},
        "material": {"model": "stvk",
                     "lam": {"kind": "constant", "value": 1.0},
                     "mu": {"kind": "constant", "value": 1.0}},
        "motion": {"preset": "shear", "gamma": 0.2},
        "virtual_fields": {"v": {"preset": "constant", "value": [0.1, 0.0, 0.0]},
                           "w": {"preset": "constant", "value": [0.0, 0.1, 0.0]}},
        "sources": {"mode": "closure"},
        "quadrature": {"volume_order": 2, "surface_order": 2},
    }
    config.update(overrides)
    return config


class TestValidation:
    def test_minimal_config_accepted(self):
        validate_config(minimal_config())

    def test_unknown_key_rejected(self):
        config = minimal_config()
        config["surprise"] = True
        with pytest.raises(ConfigInvalid):
            validate_config(config)

    def test_missing_required_section_rejected(self):
        config = minimal_config()
        del config["motion"]
        with pytest.raises(ConfigInvalid):
            validate_config(config)

    def test_bad_shell_radii_rejected(self):
        config = minimal_config(geometry={"kind": "shell",
                                          "center": [0.0, 0.0, 0.0],
                                          "inner_radius": 0.9,
                                          "outer_radius": 0.5})
        with pytest.raises(ConfigInvalid):
            Scenario(config)

    def test_inverted_motion_rejected_at_build(self):
        config = minimal_config(motion={
            "preset": "homogeneous",
            "matrix": [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]})
        with pytest.raises(ConfigInvalid, match="NonPositiveJacobian"):
            Scenario(config)

    def test_preset_couple_rejected_for_isotropic_material(self):
        config = minimal_config(sources={
            "mode": "preset",
            "mu": {"preset": "constant", "value": [0.1, 0.0, 0.0]}})
        with pytest.raises(ConfigInvalid, match="isotropic"):
            Scenario(config)

    def test_preset_couple_allowed_for_anisotropic_material(self):
        config = minimal_config(
            material={"model": "quadratic", "mu": {"kind": "constant", "value": 1.0}},
            sources={"mode": "preset",
                     "mu": {"preset": "constant", "value": [0.1, 0.0, 0.0]}})
        Scenario(config)

    def test_config_file_with_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigInvalid):
            load_config_file(str(path))

    def test_config_file_with_non_object_root(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text(json.dumps([1, 2, 3]))
        with pytest.raises(ConfigInvalid):
            load_config_file(str(path))


class TestScenarioBehavior:
    def test_default_pivots_are_geometry_centers(self):
        config = minimal_config(geometry={"kind": "box",
                                          "center": [0.2, -0.1, 0.3],
                                          "halfwidths": [0.4, 0.4, 0.4]})
        scenario = Scenario(config)
        np.testing.assert_allclose(scenario.x0, [0.2, -0.1, 0.3])
        np.testing.assert_allclose(scenario.y0,
                                   scenario.motion.y([0.2, -0.1, 0.3]))

    def test_explicit_pivots_override(self):
        config = minimal_config(pivots={"x0": [0.1, 0.1, 0.1],
                                        "y0": [0.0, 0.2, 0.0]})
        scenario = Scenario(config)
        np.testing.assert_allclose(scenario.x0, [0.1, 0.1, 0.1])
        np.testing.assert_allclose(scenario.y0, [0.0, 0.2, 0.0])

    def test_pointwise_residuals_vanish_under_closure(self):
        scenario = Scenario(minimal_config())
        x = np.array([0.1, -0.2, 0.3])
        np.testing.assert_allclose(scenario.standard_force_residual(x),
                                   np.zeros(3), atol=1e-12)
        np.testing.assert_allclose(scenario.configurational_force_residual(x),
                                   np.zeros(3), atol=1e-12)
        first, second = scenario.torque_residuals(x)
        np.testing.assert_allclose(first, np.zeros(3), atol=1e-12)
        np.testing.assert_allclose(second, np.zeros(3), atol=1e-12)

    def test_out_of_domain_evaluation_rejected(self):
        scenario = Scenario(minimal_config())
        with pytest.raises(EvaluationOutOfDomain):
            scenario.standard_force_residual([2.0, 0.0, 0.0])

    def test_seed_defaults_to_config_digest(self):
        config = minimal_config()
        a = Scenario(config)
        b = Scenario(config)
        assert a.seed == b.seed
        explicit = Scenario(minimal_config(seed=99))
        assert explicit.seed == 99

    def test_digest_is_stable_under_key_order(self):
        config = minimal_config()
        reordered = json.loads(json.dumps(config, sort_keys=True))
        assert config_digest(config) == config_digest(reordered)


def test_bundled_scenarios_all_load_and_validate():
    names = bundled_scenario_names()
    assert "stvk_uniaxial" in names
    assert len(names) == 12
    for name in names:
        config = load_bundled_config(name)
        validate_config(config)
        assert config["name"] == name


def test_unknown_bundled_scenario():
    with pytest.raises(ConfigInvalid):
        load_bundled_config("does_not_exist")
