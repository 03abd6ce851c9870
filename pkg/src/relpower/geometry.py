"""Integrable parts of the reference body and their quadrature rules.

Supported geometries: axis-aligned boxes, balls and spherical shells.
Boxes use tensor-product Gauss-Legendre rules; balls and shells use a
product of a radial Gauss rule (with the r^2 Jacobian folded into the
weights) and an octahedrally symmetric spherical rule.

Accumulation everywhere uses ``math.fsum`` in a fixed node order, so
integrals are deterministic and compensated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .tensors import as_vector

# Octahedrally symmetric spherical rules (weights sum to 1; the 4*pi
# measure is applied when weights are assembled).  Algebraic exactness:
# 6 points -> degree 3, 14 -> degree 5, 26 -> degree 7.
_SQ2 = 1.0 / math.sqrt(2.0)
_SQ3 = 1.0 / math.sqrt(3.0)


def _octahedron_vertices():
    return [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]


def _edge_midpoints():
    pts = []
    for i in range(3):
        for j in range(i + 1, 3):
            for si in (1.0, -1.0):
                for sj in (1.0, -1.0):
                    p = [0.0, 0.0, 0.0]
                    p[i] = si * _SQ2
                    p[j] = sj * _SQ2
                    pts.append(tuple(p))
    return pts


def _cube_vertices():
    return [
        (sx * _SQ3, sy * _SQ3, sz * _SQ3)
        for sx in (1.0, -1.0) for sy in (1.0, -1.0) for sz in (1.0, -1.0)
    ]


def spherical_rule(n_points: int):
    """Unit-sphere direction rule: (directions (n,3), weights summing to 1)."""
    if n_points == 6:
        dirs = _octahedron_vertices()
        wts = [1.0 / 6.0] * 6
    elif n_points == 14:
        dirs = _octahedron_vertices() + _cube_vertices()
        wts = [1.0 / 15.0] * 6 + [3.0 / 40.0] * 8
    elif n_points == 26:
        dirs = _octahedron_vertices() + _edge_midpoints() + _cube_vertices()
        wts = [1.0 / 21.0] * 6 + [4.0 / 105.0] * 12 + [27.0 / 840.0] * 8
    else:
        raise ValueError(f"unsupported spherical rule size {n_points}; use 6, 14 or 26")
    return np.asarray(dirs, float), np.asarray(wts, float)


def gauss_legendre(order: int, lo: float, hi: float):
    """Gauss-Legendre nodes and weights on [lo, hi]."""
    if order < 1:
        raise ValueError("quadrature order must be >= 1")
    nodes, weights = np.polynomial.legendre.leggauss(order)
    half = 0.5 * (hi - lo)
    return 0.5 * (hi + lo) + half * nodes, half * weights


@dataclass(frozen=True)
class SurfaceQuadrature:
    """Quadrature points, outward unit normals and weights on a closed surface."""

    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray

    @property
    def area(self) -> float:
        return math.fsum(self.weights)


@dataclass(frozen=True)
class BodyPart:
    """A part of the reference body with volume and boundary quadrature."""

    kind: str
    center: np.ndarray
    scale: float
    volume: float
    volume_points: np.ndarray
    volume_weights: np.ndarray
    surface: SurfaceQuadrature
    contains: Callable[[np.ndarray], bool]
    sample_interior: Callable[[np.random.Generator, int], np.ndarray]

    @property
    def quadrature_volume(self) -> float:
        return math.fsum(self.volume_weights)


def _accumulate(values: Sequence[np.ndarray], weights: np.ndarray):
    """fsum-accumulate weighted scalar or vector samples, componentwise."""
    first = np.asarray(values[0], float)
    if first.ndim == 0:
        return math.fsum(w * float(v) for v, w in zip(values, weights))
    flat = [np.asarray(v, float).ravel() for v in values]
    out = np.array(
        [math.fsum(w * v[k] for v, w in zip(flat, weights)) for k in range(first.size)]
    )
    return out.reshape(first.shape)


def volume_integral(part: BodyPart, integrand: Callable[[np.ndarray], object]):
    """Integral of a scalar- or vector-valued integrand over the part."""
    values = [integrand(x) for x in part.volume_points]
    return _accumulate(values, part.volume_weights)


def surface_integral(surface, integrand: Callable[[np.ndarray, np.ndarray], object]):
    """Boundary integral; the integrand receives (point, outward normal)."""
    quad = surface.surface if isinstance(surface, BodyPart) else surface
    values = [integrand(x, n) for x, n in zip(quad.points, quad.normals)]
    return _accumulate(values, quad.weights)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def box_part(center, halfwidths, order: int = 6, surface_order: int | None = None) -> BodyPart:
    """Axis-aligned box with tensor-product Gauss-Legendre quadrature."""
    center = as_vector(center)
    half = as_vector(halfwidths)
    if np.any(half <= 0.0):
        raise ValueError("box halfwidths must be positive")
    surface_order = order if surface_order is None else surface_order

    axes = [gauss_legendre(order, center[i] - half[i], center[i] + half[i]) for i in range(3)]
    pts, wts = [], []
    for x0, w0 in zip(*axes[0]):
        for x1, w1 in zip(*axes[1]):
            for x2, w2 in zip(*axes[2]):
                pts.append((x0, x1, x2))
                wts.append(w0 * w1 * w2)

    s_pts, s_nrm, s_wts = [], [], []
    for axis in range(3):
        others = [i for i in range(3) if i != axis]
        rules = [gauss_legendre(surface_order, center[i] - half[i], center[i] + half[i])
                 for i in others]
        for sign in (-1.0, 1.0):
            normal = np.zeros(3)
            normal[axis] = sign
            for a, wa in zip(*rules[0]):
                for b, wb in zip(*rules[1]):
                    p = np.empty(3)
                    p[axis] = center[axis] + sign * half[axis]
                    p[others[0]] = a
                    p[others[1]] = b
                    s_pts.append(p)
                    s_nrm.append(normal.copy())
                    s_wts.append(wa * wb)

    lo, hi = center - half, center + half

    def contains(x):
        x = np.asarray(x, float)
        return bool(np.all(x >= lo) and np.all(x <= hi))

    def sample_interior(rng, n, margin: float = 1e-3):
        m = margin * np.max(half)
        return rng.uniform(lo + m, hi - m, size=(n, 3))

    return BodyPart(
        kind="box",
        center=center,
        scale=float(np.max(half)),
        volume=float(np.prod(2.0 * half)),
        volume_points=np.asarray(pts),
        volume_weights=np.asarray(wts),
        surface=SurfaceQuadrature(np.asarray(s_pts), np.asarray(s_nrm), np.asarray(s_wts)),
        contains=contains,
        sample_interior=sample_interior,
    )


def sphere_surface(center, radius: float, angular_points: int = 26,
                   outward: bool = True) -> SurfaceQuadrature:
    """Quadrature on a sphere; ``outward=False`` flips the normals."""
    center = as_vector(center)
    dirs, wts = spherical_rule(angular_points)
    sign = 1.0 if outward else -1.0
    return SurfaceQuadrature(
        points=center + radius * dirs,
        normals=sign * dirs,
        weights=4.0 * math.pi * radius ** 2 * wts,
    )


def _radial_shell(center, r_inner: float, r_outer: float, radial_order: int,
                  angular_points: int):
    center = as_vector(center)
    dirs, ang_wts = spherical_rule(angular_points)
    radii, rad_wts = gauss_legendre(radial_order, r_inner, r_outer)
    pts, wts = [], []
    for r, wr in zip(radii, rad_wts):
        for d, wa in zip(dirs, ang_wts):
            pts.append(center + r * d)
            wts.append(wr * r ** 2 * 4.0 * math.pi * wa)
    return np.asarray(pts), np.asarray(wts)


def ball_part(center, radius: float, radial_order: int = 6,
              angular_points: int = 26) -> BodyPart:
    """Ball with radial Gauss x spherical product quadrature."""
    center = as_vector(center)
    if radius <= 0.0:
        raise ValueError("ball radius must be positive")
    pts, wts = _radial_shell(center, 0.0, radius, radial_order, angular_points)

    def contains(x):
        return bool(np.linalg.norm(np.asarray(x, float) - center) <= radius)

    def sample_interior(rng, n, margin: float = 1e-3):
        out = np.empty((n, 3))
        r_max = radius * (1.0 - margin)
        for i in range(n):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            out[i] = center + r_max * rng.uniform() ** (1.0 / 3.0) * d
        return out

    return BodyPart(
        kind="ball",
        center=center,
        scale=float(radius),
        volume=4.0 / 3.0 * math.pi * radius ** 3,
        volume_points=pts,
        volume_weights=wts,
        surface=sphere_surface(center, radius, angular_points),
        contains=contains,
        sample_interior=sample_interior,
    )


def shell_part(center, inner_radius: float, outer_radius: float,
               radial_order: int = 6, angular_points: int = 26) -> BodyPart:
    """Spherical shell; the boundary is the outer plus the inner sphere."""
    center = as_vector(center)
    if not 0.0 < inner_radius < outer_radius:
        raise ValueError("need 0 < inner_radius < outer_radius")
    pts, wts = _radial_shell(center, inner_radius, outer_radius, radial_order,
                             angular_points)
    outer = sphere_surface(center, outer_radius, angular_points, outward=True)
    inner = sphere_surface(center, inner_radius, angular_points, outward=False)
    surface = SurfaceQuadrature(
        points=np.vstack([outer.points, inner.points]),
        normals=np.vstack([outer.normals, inner.normals]),
        weights=np.concatenate([outer.weights, inner.weights]),
    )

    def contains(x):
        r = np.linalg.norm(np.asarray(x, float) - center)
        return bool(inner_radius <= r <= outer_radius)

    def sample_interior(rng, n, margin: float = 1e-3):
        out = np.empty((n, 3))
        pad = margin * outer_radius
        lo3, hi3 = (inner_radius + pad) ** 3, (outer_radius - pad) ** 3
        for i in range(n):
            d = rng.normal(size=3)
            d /= np.linalg.norm(d)
            out[i] = center + (lo3 + (hi3 - lo3) * rng.uniform()) ** (1.0 / 3.0) * d
        return out

    return BodyPart(
        kind="shell",
        center=center,
        scale=float(outer_radius),
        volume=4.0 / 3.0 * math.pi * (outer_radius ** 3 - inner_radius ** 3),
        volume_points=pts,
        volume_weights=wts,
        surface=surface,
        contains=contains,
        sample_interior=sample_interior,
    )
