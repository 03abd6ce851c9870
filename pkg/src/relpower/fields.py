"""Motions, virtual velocity fields and isometric observer changes.

A :class:`Motion` maps reference points to ambient points.  Virtual
velocity fields come in pairs: ``v`` acts over the ambient space and
``w`` over the material (reference) space; both are functions of the
reference point.  Observer changes superpose rigid rates on either
field independently:

    v* = c_hat + q_hat x (y - y0) + v
    w* = c + q x (x - x0) + w

All derivatives are available analytically for the shipped presets and
by central finite differences otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import NonPositiveJacobian
from .tensors import IDENTITY, as_tensor, as_vector, axial_vector, cross_matrix

DEFAULT_GRADIENT_STEP = 1e-5


def fd_gradient_vector(fn: Callable[[np.ndarray], np.ndarray], x, h: float) -> np.ndarray:
    """Central-difference gradient of a vector field; [i, j] = d fn_i / d x_j."""
    x = as_vector(x)
    grad = np.empty((3, 3))
    for j in range(3):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        grad[:, j] = (np.asarray(fn(xp), float) - np.asarray(fn(xm), float)) / (2.0 * h)
    return grad


def fd_gradient_scalar(fn: Callable[[np.ndarray], float], x, h: float) -> np.ndarray:
    """Central-difference gradient of a scalar field."""
    x = as_vector(x)
    grad = np.empty(3)
    for j in range(3):
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        grad[j] = (fn(xp) - fn(xm)) / (2.0 * h)
    return grad


def curl_from_gradient(grad_w) -> np.ndarray:
    """curl w as the axial vector of grad w - (grad w)^t."""
    g = as_tensor(grad_w)
    return axial_vector(g - g.T)


@dataclass(frozen=True)
class Motion:
    """Placement map x -> y(x) with optional analytic derivatives.

    ``gradient`` returns F(x); ``second_gradient`` returns dF/dx as a
    (3, 3, 3) array with entries [k, l, j] = d^2 y_k / (d x_l d x_j).
    ``step`` is the finite-difference step used when analytic data is
    absent or bypassed.
    """

    name: str
    placement: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    second_gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    step: float = DEFAULT_GRADIENT_STEP

    def y(self, x) -> np.ndarray:
        return as_vector(self.placement(as_vector(x)))

    def deformation_gradient(self, x, use_analytic: bool = True) -> np.ndarray:
        """F(x) = Dy(x); raises :class:`NonPositiveJacobian` unless det F > 0."""
        x = as_vector(x)
        if use_analytic and self.gradient is not None:
            f = as_tensor(self.gradient(x))
        else:
            f = fd_gradient_vector(self.placement, x, self.step)
        det = np.linalg.det(f)
        if det <= 0.0:
            raise NonPositiveJacobian(f"det F = {det:g} <= 0 at x = {x}")
        return f

    def deformation_second_gradient(self, x, use_analytic: bool = True,
                                    step: Optional[float] = None) -> np.ndarray:
        """dF/dx at x, nested central differences when no analytic form exists."""
        x = as_vector(x)
        if use_analytic and self.second_gradient is not None:
            return np.asarray(self.second_gradient(x), float)
        h = self.step * 10.0 if step is None else step
        d2 = np.empty((3, 3, 3))
        for j in range(3):
            xp = x.copy()
            xm = x.copy()
            xp[j] += h
            xm[j] -= h
            fp = self.deformation_gradient(xp, use_analytic=use_analytic)
            fm = self.deformation_gradient(xm, use_analytic=use_analytic)
            d2[:, :, j] = (fp - fm) / (2.0 * h)
        return d2


@dataclass(frozen=True)
class VirtualField:
    """A differentiable vector field over the reference place."""

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    step: float = DEFAULT_GRADIENT_STEP

    def __call__(self, x) -> np.ndarray:
        return as_vector(self.value(as_vector(x)))

    def grad(self, x, use_analytic: bool = True) -> np.ndarray:
        if use_analytic and self.gradient is not None:
            return as_tensor(self.gradient(as_vector(x)))
        return fd_gradient_vector(self.value, as_vector(x), self.step)

    def curl(self, x, use_analytic: bool = True) -> np.ndarray:
        return curl_from_gradient(self.grad(x, use_analytic=use_analytic))

    def divergence(self, x, use_analytic: bool = True) -> float:
        return float(np.trace(self.grad(x, use_analytic=use_analytic)))


@dataclass(frozen=True)
class VirtualFieldPair:
    """Ambient field v and material field w, evaluated over the body."""

    v: VirtualField
    w: VirtualField


@dataclass(frozen=True)
class ObserverChange:
    """Generators of one synchronous isometric change in observers."""

    ambient_translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ambient_rotation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    ambient_pivot: np.ndarray = field(default_factory=lambda: np.zeros(3))
    material_translation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    material_rotation: np.ndarray = field(default_factory=lambda: np.zeros(3))
    material_pivot: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in (
            "ambient_translation", "ambient_rotation", "ambient_pivot",
            "material_translation", "material_rotation", "material_pivot",
        ):
            object.__setattr__(self, name, as_vector(getattr(self, name)))


def apply_ambient_change(pair: VirtualFieldPair, motion: Motion,
                         change: ObserverChange, x) -> np.ndarray:
    """v*(x) = c_hat + q_hat x (y(x) - y0) + v(x)."""
    x = as_vector(x)
    y = motion.y(x)
    return (
        change.ambient_translation
        + np.cross(change.ambient_rotation, y - change.ambient_pivot)
        + pair.v(x)
    )


def apply_material_change(pair: VirtualFieldPair, change: ObserverChange, x) -> np.ndarray:
    """w*(x) = c + q x (x - x0) + w(x)."""
    x = as_vector(x)
    return (
        change.material_translation
        + np.cross(change.material_rotation, x - change.material_pivot)
        + pair.w(x)
    )


def observer_shifted_pair(pair: VirtualFieldPair, motion: Motion,
                          change: ObserverChange) -> VirtualFieldPair:
    """The pair (v*, w*) seen through ``change``, with chain-rule gradients.

    grad v* = grad v + (q_hat x) F  and  grad w* = grad w + (q x); the
    analytic route is kept only when both ingredients are analytic.
    """
    q_hat_cross = cross_matrix(change.ambient_rotation)
    q_cross = cross_matrix(change.material_rotation)

    def v_star(x):
        return apply_ambient_change(pair, motion, change, x)

    def w_star(x):
        return apply_material_change(pair, change, x)

    grad_v_star = None
    if pair.v.gradient is not None and motion.gradient is not None:
        def grad_v_star(x):  # noqa: F811
            return pair.v.grad(x) + q_hat_cross @ motion.deformation_gradient(x)

    grad_w_star = None
    if pair.w.gradient is not None:
        def grad_w_star(x):  # noqa: F811
            return pair.w.grad(x) + q_cross

    return VirtualFieldPair(
        v=VirtualField(f"{pair.v.name}*", v_star, grad_v_star, step=pair.v.step),
        w=VirtualField(f"{pair.w.name}*", w_star, grad_w_star, step=pair.w.step),
    )


# ---------------------------------------------------------------------------
# Motion presets
# ---------------------------------------------------------------------------

def identity_motion(step: float = DEFAULT_GRADIENT_STEP) -> Motion:
    """y = x."""
    return Motion(
        "identity",
        placement=lambda x: x.copy(),
        gradient=lambda x: IDENTITY.copy(),
        second_gradient=lambda x: np.zeros((3, 3, 3)),
        step=step,
    )


def homogeneous_motion(f0, step: float = DEFAULT_GRADIENT_STEP) -> Motion:
    """y = F0 x for a constant matrix F0."""
    f0 = as_tensor(f0)
    return Motion(
        "homogeneous",
        placement=lambda x: f0 @ x,
        gradient=lambda x: f0.copy(),
        second_gradient=lambda x: np.zeros((3, 3, 3)),
        step=step,
    )


def rotation_motion(axis, angle: float, step: float = DEFAULT_GRADIENT_STEP) -> Motion:
    """Rigid rotation y = R x about ``axis`` by ``angle`` (Rodrigues form)."""
    axis = as_vector(axis)
    n = axis / np.linalg.norm(axis)
    k = cross_matrix(n)
    r = IDENTITY + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
    motion = homogeneous_motion(r, step=step)
    return Motion("rotation", motion.placement, motion.gradient,
                  motion.second_gradient, step=step)


def shear_motion(gamma: float, step: float = DEFAULT_GRADIENT_STEP) -> Motion:
    """Simple shear y = x + gamma * x_2 * e_1."""
    f0 = IDENTITY + gamma * np.outer([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    motion = homogeneous_motion(f0, step=step)
    return Motion("shear", motion.placement, motion.gradient,
                  motion.second_gradient, step=step)


def harmonic_motion(alpha: float, step: float = DEFAULT_GRADIENT_STEP) -> Motion:
    """y = x + alpha * (x1^2 - x2^2, -2 x1 x2, 0).

    The displacement is the gradient of the harmonic potential
    alpha * (x1^3/3 - x1 x2^2), so its gradient is symmetric and its
    Laplacian vanishes identically.
    """

    def placement(x):
        return x + alpha * np.array([x[0] ** 2 - x[1] ** 2, -2.0 * x[0] * x[1], 0.0])

    def gradient(x):
        h = np.array(
            [
                [2.0 * x[0], -2.0 * x[1], 0.0],
                [-2.0 * x[1], -2.0 * x[0], 0.0],
                [0.0, 0.0, 0.0],
            ]
        )
        return IDENTITY + alpha * h

    second = np.zeros((3, 3, 3))
    second[0, 0, 0] = 2.0
    second[0, 1, 1] = -2.0
    second[1, 0, 1] = -2.0
    second[1, 1, 0] = -2.0

    return Motion("harmonic", placement, gradient,
                  second_gradient=lambda x: alpha * second, step=step)


def sinusoidal_motion(amplitude: float, wavevector, direction,
                      step: float = DEFAULT_GRADIENT_STEP) -> Motion:
    """y = x + a sin(k . x) d."""
    k = as_vector(wavevector)
    d = as_vector(direction)

    def placement(x):
        return x + amplitude * np.sin(k @ x) * d

    dk = np.outer(d, k)

    def gradient(x):
        return IDENTITY + amplitude * np.cos(k @ x) * dk

    dkk = np.einsum("i,j,k->ijk", d, k, k)

    def second_gradient(x):
        return -amplitude * np.sin(k @ x) * dkk

    return Motion("sinusoidal", placement, gradient, second_gradient, step=step)


# ---------------------------------------------------------------------------
# Virtual-field presets
# ---------------------------------------------------------------------------

def constant_field(value, name: str = "constant",
                   step: float = DEFAULT_GRADIENT_STEP) -> VirtualField:
    value = as_vector(value)
    return VirtualField(name, lambda x: value.copy(),
                        gradient=lambda x: np.zeros((3, 3)), step=step)


def rigid_field(translation, rotation, pivot, name: str = "rigid",
                step: float = DEFAULT_GRADIENT_STEP) -> VirtualField:
    """c + q x (x - x0): the Killing fields of the Euclidean metric."""
    c = as_vector(translation)
    q = as_vector(rotation)
    x0 = as_vector(pivot)
    q_cross = cross_matrix(q)
    return VirtualField(name, lambda x: c + np.cross(q, x - x0),
                        gradient=lambda x: q_cross.copy(), step=step)


def linear_field(matrix, name: str = "linear",
                 step: float = DEFAULT_GRADIENT_STEP) -> VirtualField:
    a = as_tensor(matrix)
    return VirtualField(name, lambda x: a @ x, gradient=lambda x: a.copy(), step=step)


def affine_field(value, matrix, pivot=None, name: str = "affine",
                 step: float = DEFAULT_GRADIENT_STEP) -> VirtualField:
    """value + A (x - pivot)."""
    c = as_vector(value)
    a = as_tensor(matrix)
    x0 = np.zeros(3) if pivot is None else as_vector(pivot)
    return VirtualField(name, lambda x: c + a @ (x - x0),
                        gradient=lambda x: a.copy(), step=step)


def sinusoidal_field(amplitude: float, wavevector, direction, name: str = "sinusoidal",
                     step: float = DEFAULT_GRADIENT_STEP) -> VirtualField:
    """a sin(k . x) d; curl-free exactly when d is parallel to k."""
    k = as_vector(wavevector)
    d = as_vector(direction)
    dk = np.outer(d, k)
    return VirtualField(
        name,
        lambda x: amplitude * np.sin(k @ x) * d,
        gradient=lambda x: amplitude * np.cos(k @ x) * dk,
        step=step,
    )
