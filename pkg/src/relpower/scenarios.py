"""Declarative scenario configurations and their in-memory realization.

A scenario bundles one part of the body, one motion, one material, one
virtual-field pair, the source fields (b, f, mu) and the evaluation
options (derivative mode, quadrature orders, pivots, seed).  Configs
are plain JSON documents validated against the published schema before
anything is computed; unknown keys are rejected.
"""

from __future__ import annotations

import hashlib
import json
from importlib import resources
from typing import Dict, List, Optional

import jsonschema
import numpy as np

from . import configurational as conf
from . import fields, geometry, materials
from .exceptions import ConfigInvalid, EvaluationOutOfDomain, NonPositiveJacobian
from .tensors import as_vector

DEFAULT_MOTION_STEP = 1e-5     # relative to the part scale
DEFAULT_DIVERGENCE_STEP = 1e-4


def _schema() -> dict:
    text = resources.files("relpower").joinpath("schema/scenario.schema.json").read_text()
    return json.loads(text)


_SCHEMA_CACHE: Optional[dict] = None


def scenario_schema() -> dict:
    global _SCHEMA_CACHE
    if _SCHEMA_CACHE is None:
        _SCHEMA_CACHE = _schema()
    return _SCHEMA_CACHE


def validate_config(config: dict) -> None:
    """Schema validation; raises :class:`ConfigInvalid` with the cause."""
    try:
        jsonschema.validate(config, scenario_schema())
    except jsonschema.ValidationError as err:
        path = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ConfigInvalid(f"config invalid at {path}: {err.message}") from err


def config_digest(config: dict) -> str:
    return hashlib.sha256(
        json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    ).hexdigest()


# ---------------------------------------------------------------------------
# Component builders
# ---------------------------------------------------------------------------

def build_geometry(spec: dict, quad: dict) -> geometry.BodyPart:
    kind = spec["kind"]
    if kind == "box":
        return geometry.box_part(
            spec["center"], spec["halfwidths"],
            order=quad.get("volume_order", 6),
            surface_order=quad.get("surface_order", quad.get("volume_order", 6)),
        )
    if kind == "ball":
        return geometry.ball_part(
            spec["center"], spec["radius"],
            radial_order=quad.get("radial_order", 6),
            angular_points=quad.get("angular_points", 26),
        )
    if kind == "shell":
        if spec["inner_radius"] >= spec["outer_radius"]:
            raise ConfigInvalid("shell requires inner_radius < outer_radius")
        return geometry.shell_part(
            spec["center"], spec["inner_radius"], spec["outer_radius"],
            radial_order=quad.get("radial_order", 6),
            angular_points=quad.get("angular_points", 26),
        )
    raise ConfigInvalid(f"unknown geometry kind {kind!r}")


def build_motion(spec: dict, step: float) -> fields.Motion:
    preset = spec["preset"]
    if preset == "identity":
        return fields.identity_motion(step=step)
    if preset == "homogeneous":
        return fields.homogeneous_motion(spec["matrix"], step=step)
    if preset == "rotation":
        return fields.rotation_motion(spec["axis"], spec["angle"], step=step)
    if preset == "shear":
        return fields.shear_motion(spec["gamma"], step=step)
    if preset == "harmonic":
        return fields.harmonic_motion(spec["alpha"], step=step)
    if preset == "sinusoidal":
        return fields.sinusoidal_motion(spec["amplitude"], spec["wavevector"],
                                        spec["direction"], step=step)
    raise ConfigInvalid(f"unknown motion preset {preset!r}")


def build_modulus(spec: Optional[dict]) -> materials.Modulus:
    if spec is None:
        return materials.constant_modulus(0.0)
    kind = spec["kind"]
    if kind == "constant":
        return materials.constant_modulus(spec["value"])
    if kind == "affine":
        return materials.affine_modulus(spec["value"], spec["slope"])
    if kind == "sinusoidal":
        return materials.sinusoidal_modulus(spec["value"], spec["amplitude"],
                                            spec["wavevector"])
    raise ConfigInvalid(f"unknown modulus kind {kind!r}")


def build_material(spec: dict) -> materials.MaterialModel:
    return materials.make_material(
        spec["model"], build_modulus(spec.get("lam")), build_modulus(spec["mu"])
    )


def build_field(spec: dict, name: str, step: float) -> fields.VirtualField:
    preset = spec["preset"]
    if preset == "constant":
        return fields.constant_field(spec["value"], name=name, step=step)
    if preset == "rigid":
        return fields.rigid_field(spec["translation"], spec["rotation"],
                                  spec["pivot"], name=name, step=step)
    if preset == "linear":
        return fields.linear_field(spec["matrix"], name=name, step=step)
    if preset == "affine":
        return fields.affine_field(spec["value"], spec["matrix"],
                                   spec.get("pivot"), name=name, step=step)
    if preset == "sinusoidal":
        return fields.sinusoidal_field(spec["amplitude"], spec["wavevector"],
                                       spec["direction"], name=name, step=step)
    raise ConfigInvalid(f"unknown field preset {preset!r}")


def build_potential(spec: Optional[dict]) -> Optional[materials.BodyForcePotential]:
    if spec is None:
        return None
    if spec["kind"] == "zero":
        return materials.zero_potential()
    if spec["kind"] == "linear":
        return materials.linear_potential(spec["gravity"])
    raise ConfigInvalid(f"unknown potential kind {spec['kind']!r}")


# ---------------------------------------------------------------------------
# Node caches
# ---------------------------------------------------------------------------

class VolumeNodeData:
    """Scenario fields evaluated once at every volume quadrature node."""

    def __init__(self, scenario: "Scenario", part: geometry.BodyPart):
        pts = part.volume_points
        n = len(pts)
        self.points = pts
        self.weights = part.volume_weights
        self.y = np.empty((n, 3))
        self.f_grad = np.empty((n, 3, 3))
        self.stress = np.empty((n, 3, 3))
        self.eshelby = np.empty((n, 3, 3))
        self.energy = np.empty(n)
        self.material_gradient = np.empty((n, 3))
        self.body_force = np.empty((n, 3))
        self.driving_force = np.empty((n, 3))
        self.couple = np.empty((n, 3))
        for i, x in enumerate(pts):
            f = scenario.deformation_gradient(x)
            self.y[i] = scenario.motion.y(x)
            self.f_grad[i] = f
            self.stress[i] = scenario.model.stress(x, f)
            self.eshelby[i] = conf.eshelby_stress(scenario.model, x, f)
            self.energy[i] = scenario.model.energy(x, f)
            self.material_gradient[i] = scenario.model.material_gradient(x, f)
            self.body_force[i] = scenario.b_at(x)
            self.driving_force[i] = scenario.f_at(x)
            self.couple[i] = scenario.mu_at(x)


class SurfaceNodeData:
    """Scenario fields evaluated once at every boundary quadrature node."""

    def __init__(self, scenario: "Scenario", part: geometry.BodyPart):
        quad = part.surface
        n = len(quad.points)
        self.points = quad.points
        self.normals = quad.normals
        self.weights = quad.weights
        self.y = np.empty((n, 3))
        self.f_grad = np.empty((n, 3, 3))
        self.stress = np.empty((n, 3, 3))
        self.eshelby = np.empty((n, 3, 3))
        self.energy = np.empty(n)
        for i, x in enumerate(quad.points):
            f = scenario.deformation_gradient(x)
            self.y[i] = scenario.motion.y(x)
            self.f_grad[i] = f
            self.stress[i] = scenario.model.stress(x, f)
            self.eshelby[i] = conf.eshelby_stress(scenario.model, x, f)
            self.energy[i] = scenario.model.energy(x, f)


# ---------------------------------------------------------------------------
# Scenario
# ---------------------------------------------------------------------------

class Scenario:
    """One fully specified verification scenario."""

    def __init__(self, config: dict):
        validate_config(config)
        self.config = config
        self.name = config["name"]

        quad = config.get("quadrature", {})
        self.part = build_geometry(config["geometry"], quad)

        deriv = config.get("derivatives", {})
        self.use_analytic = deriv.get("mode", "analytic") == "analytic"
        self.motion_step = deriv.get("motion_step", DEFAULT_MOTION_STEP) * self.part.scale
        self.divergence_step = (
            deriv.get("divergence_step", DEFAULT_DIVERGENCE_STEP) * self.part.scale
        )

        self.motion = build_motion(config["motion"], step=self.motion_step)
        self.model = build_material(config["material"])
        self.pair = fields.VirtualFieldPair(
            v=build_field(config["virtual_fields"]["v"], "v", step=self.motion_step),
            w=build_field(config["virtual_fields"]["w"], "w", step=self.motion_step),
        )
        self.potential = build_potential(config.get("potential"))

        pivots = config.get("pivots", {})
        self.x0 = as_vector(pivots["x0"]) if "x0" in pivots else self.part.center.copy()
        if "y0" in pivots:
            self.y0 = as_vector(pivots["y0"])
        else:
            self.y0 = self.motion.y(self.part.center)

        self.source_mode = config["sources"]["mode"]
        self.b_at, self.f_at, self.mu_at = self._build_sources(config["sources"])

        self.seed = config.get("seed", int(config_digest(config)[:8], 16))
        self.checks = config.get("checks", {})

        self._volume_cache: Dict[int, VolumeNodeData] = {}
        self._surface_cache: Dict[int, SurfaceNodeData] = {}

        self._probe_kinematics()

    # -- construction helpers ----------------------------------------------

    def _build_sources(self, spec: dict):
        if spec["mode"] == "closure":
            b_at = conf.closure_body_force(self.model, self.motion,
                                           self.use_analytic, self.divergence_step)
            f_at = conf.closure_driving_force(self.model, self.motion,
                                              self.use_analytic, self.divergence_step)
            mu_at = conf.closure_couple(self.model, self.motion, self.use_analytic)
            return b_at, f_at, mu_at

        zero = {"preset": "constant", "value": [0.0, 0.0, 0.0]}
        b = build_field(spec.get("b", zero), "b", step=self.motion_step)
        f = build_field(spec.get("f", zero), "f", step=self.motion_step)
        mu = build_field(spec.get("mu", zero), "mu", step=self.motion_step)
        if self.model.isotropic:
            # couples are carried by anisotropy; an isotropic material space
            # admits only mu = 0
            for x in [self.part.center] + list(self.part.volume_points[:4]):
                if np.linalg.norm(mu(x)) > 0.0:
                    raise ConfigInvalid(
                        "preset couple field mu must vanish for an isotropic "
                        f"material (model {self.model.name!r})")
        return (lambda x: b(x)), (lambda x: f(x)), (lambda x: mu(x))

    def _probe_kinematics(self) -> None:
        """Fail configuration early when det F <= 0 anywhere on the part."""
        try:
            for x in self.part.volume_points:
                self.deformation_gradient(x)
            for x in self.part.surface.points:
                self.deformation_gradient(x)
        except NonPositiveJacobian as err:
            raise ConfigInvalid(f"NonPositiveJacobian: {err}") from err

    # -- pointwise evaluation ------------------------------------------------

    def deformation_gradient(self, x) -> np.ndarray:
        return self.motion.deformation_gradient(x, use_analytic=self.use_analytic)

    def require_inside(self, x) -> np.ndarray:
        x = as_vector(x)
        if not self.part.contains(x):
            raise EvaluationOutOfDomain(f"point {x} lies outside the part")
        return x

    def eshelby_at(self, x) -> np.ndarray:
        return conf.eshelby_stress(self.model, x, self.deformation_gradient(x))

    def standard_force_residual(self, x) -> np.ndarray:
        x = self.require_inside(x)
        return conf.standard_force_residual(self.model, self.motion, self.b_at, x,
                                            self.use_analytic, self.divergence_step)

    def configurational_force_residual(self, x) -> np.ndarray:
        x = self.require_inside(x)
        return conf.configurational_force_residual(
            self.model, self.motion, self.b_at, self.f_at, x,
            self.use_analytic, self.divergence_step)

    def torque_residuals(self, x):
        x = self.require_inside(x)
        return conf.torque_residuals(self.model, self.motion, self.mu_at, x,
                                     self.use_analytic)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    # -- cached node data ------------------------------------------------------

    def volume_data(self, part: Optional[geometry.BodyPart] = None) -> VolumeNodeData:
        part = self.part if part is None else part
        key = id(part)
        if key not in self._volume_cache:
            self._volume_cache[key] = VolumeNodeData(self, part)
        return self._volume_cache[key]

    def surface_data(self, part: Optional[geometry.BodyPart] = None) -> SurfaceNodeData:
        part = self.part if part is None else part
        key = id(part)
        if key not in self._surface_cache:
            self._surface_cache[key] = SurfaceNodeData(self, part)
        return self._surface_cache[key]


# ---------------------------------------------------------------------------
# Bundled scenarios
# ---------------------------------------------------------------------------

def bundled_scenario_names() -> List[str]:
    root = resources.files("relpower").joinpath("scenarios")
    return sorted(
        entry.name[: -len(".json")]
        for entry in root.iterdir()
        if entry.name.endswith(".json")
    )


def load_bundled_config(name: str) -> dict:
    path = resources.files("relpower").joinpath(f"scenarios/{name}.json")
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigInvalid(f"no bundled scenario named {name!r}") from None


def load_config_file(path: str) -> dict:
    """Read a config from disk; IO failures propagate as OSError."""
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        config = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigInvalid(f"config is not valid JSON: {err}") from err
    if not isinstance(config, dict):
        raise ConfigInvalid("config root must be a JSON object")
    return config
