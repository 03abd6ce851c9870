"""Shared helpers: random kinematic states and finite-difference oracles."""

from __future__ import annotations

import numpy as np
import pytest

from relpower.materials import (MaterialModel, affine_modulus, constant_modulus,
                                make_material, sinusoidal_modulus)


def random_state(rng, det_lo: float = 0.5, det_hi: float = 2.0):
    """One random (x, F) with det F inside [det_lo, det_hi]."""
    while True:
        f = np.eye(3) + 0.4 * rng.uniform(-1.0, 1.0, size=(3, 3))
        det = np.linalg.det(f)
        if det_lo <= det <= det_hi:
            return rng.uniform(-0.5, 0.5, size=3), f


def fd_stress(model: MaterialModel, x, f, h: float = 1e-6) -> np.ndarray:
    """Componentwise central differences of the energy in F."""
    p = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            fp = f.copy()
            fm = f.copy()
            step = h * max(1.0, abs(f[i, j]))
            fp[i, j] += step
            fm[i, j] -= step
            p[i, j] = (model.energy(x, fp) - model.energy(x, fm)) / (2.0 * step)
    return p


def fd_material_gradient(model: MaterialModel, x, f, h: float = 1e-6) -> np.ndarray:
    """Central differences of the energy in x at frozen F."""
    g = np.empty(3)
    for m in range(3):
        xp = x.copy()
        xm = x.copy()
        xp[m] += h
        xm[m] -= h
        g[m] = (model.energy(xp, f) - model.energy(xm, f)) / (2.0 * h)
    return g


def homogeneous_models():
    return [
        make_material("stvk", constant_modulus(1.0), constant_modulus(1.0)),
        make_material("neo_hookean", constant_modulus(1.2), constant_modulus(0.8)),
        make_material("quadratic", constant_modulus(0.0), constant_modulus(1.0)),
    ]


def graded_models():
    return [
        make_material("stvk", affine_modulus(1.0, [0.2, -0.1, 0.3]),
                      affine_modulus(1.0, [0.4, 0.0, 0.0])),
        make_material("neo_hookean", constant_modulus(1.2),
                      sinusoidal_modulus(1.0, 0.3, [1.1, 0.7, -0.5])),
        make_material("quadratic", constant_modulus(0.0),
                      affine_modulus(1.0, [0.0, 0.0, 0.4])),
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(20250810)
