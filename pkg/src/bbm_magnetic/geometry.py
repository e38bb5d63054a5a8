"""Convex domains, unit-sphere rules, and tensor quadrature grids.

Domains are restricted to intervals, axis-aligned boxes, and balls in
dimension N <= 3.  Convexity guarantees that a ray from an interior point
leaves the domain exactly once, which is what makes the directional
boundary-distance query (and with it the exact exterior tail integral)
well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "Domain",
    "Direction",
    "TensorGrid",
    "interval",
    "box",
    "ball",
    "direction",
    "boundary_distance",
    "boundary_distances",
    "unit_sphere_nodes",
    "sphere_rule",
    "sphere_area",
    "tensor_grid",
]

_SUPPORTED_DIMS = (1, 2, 3)


def sphere_area(dim: int) -> float:
    """Surface measure of the unit sphere S^{dim-1} (2, 2*pi, 4*pi)."""
    if dim not in _SUPPORTED_DIMS:
        raise ConfigurationError(f"unsupported dimension {dim}; expected 1, 2 or 3")
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class Domain:
    """A bounded convex domain: interval, axis-aligned box, or ball.

    ``extents`` holds per-axis half-widths for intervals and boxes, and the
    single radius for balls.
    """

    kind: str
    center: np.ndarray
    extents: np.ndarray

    def __post_init__(self):
        center = np.atleast_1d(np.asarray(self.center, dtype=float))
        extents = np.atleast_1d(np.asarray(self.extents, dtype=float))
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "extents", extents)
        if self.kind not in ("interval", "box", "ball"):
            raise ConfigurationError(f"unknown domain kind {self.kind!r}")
        if center.ndim != 1:
            raise ConfigurationError("domain center must be a flat vector")
        n = center.size
        if n not in _SUPPORTED_DIMS:
            raise ConfigurationError(f"unsupported dimension {n}; expected 1, 2 or 3")
        if self.kind == "interval" and n != 1:
            raise ConfigurationError("intervals are one-dimensional")
        if self.kind == "ball":
            if extents.size != 1:
                raise ConfigurationError("a ball takes a single radius extent")
        elif extents.size != n:
            raise ConfigurationError("box extents must match the dimension")
        if not np.all(extents > 0.0):
            raise ConfigurationError("all extents must be strictly positive")

    @property
    def dimension(self) -> int:
        return self.center.size

    def diameter(self) -> float:
        if self.kind == "ball":
            return 2.0 * float(self.extents[0])
        return 2.0 * float(np.linalg.norm(self.extents))

    def volume(self) -> float:
        if self.kind == "ball":
            r = float(self.extents[0])
            n = self.dimension
            return {1: 2.0 * r, 2: math.pi * r**2, 3: 4.0 * math.pi * r**3 / 3.0}[n]
        return float(np.prod(2.0 * self.extents))

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "ball":
            half = np.full(self.dimension, float(self.extents[0]))
        else:
            half = self.extents
        return self.center - half, self.center + half

    def contains(self, points: np.ndarray, margin: float = 0.0) -> np.ndarray:
        """Boolean mask of points at distance > margin inside the boundary."""
        pts = np.asarray(points, dtype=float)
        if self.kind == "ball":
            d = np.linalg.norm(pts - self.center, axis=-1)
            return d < float(self.extents[0]) - margin
        rel = np.abs(pts - self.center)
        return np.all(rel < self.extents - margin, axis=-1)


def interval(a: float, b: float) -> Domain:
    """Open interval (a, b) as a 1D domain."""
    if not b > a:
        raise ConfigurationError("interval requires a < b")
    return Domain("interval", np.array([(a + b) / 2.0]), np.array([(b - a) / 2.0]))


def box(center, halfwidths) -> Domain:
    """Axis-aligned box with the given center and per-axis half-widths."""
    return Domain("box", np.asarray(center, dtype=float), np.asarray(halfwidths, dtype=float))


def ball(center, radius: float) -> Domain:
    """Ball with the given center and radius."""
    return Domain("ball", np.asarray(center, dtype=float), np.array([float(radius)]))


@dataclass(frozen=True)
class Direction:
    """A unit vector; the constructor rejects vectors off the unit sphere."""

    unit: np.ndarray

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.unit, dtype=float))
        object.__setattr__(self, "unit", u)
        if abs(float(np.linalg.norm(u)) - 1.0) > 1e-14:
            raise ConfigurationError("direction vector is not unit length")


def direction(v) -> Direction:
    """Normalize a nonzero vector into a Direction."""
    v = np.atleast_1d(np.asarray(v, dtype=float))
    nrm = float(np.linalg.norm(v))
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ConfigurationError("cannot normalize a zero or non-finite vector")
    return Direction(v / nrm)


def boundary_distances(d: Domain, x: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Distances from an interior point to the boundary along unit directions.

    Vectorized over a (M, N) array of directions; returns shape (M,).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    if not bool(d.contains(x)):
        raise ValueError(f"point {x.tolist()} is not strictly inside the domain")
    if d.kind == "ball":
        rel = x - d.center
        r = float(d.extents[0])
        b = dirs @ rel
        disc = b**2 + r**2 - float(rel @ rel)
        return -b + np.sqrt(disc)
    # Axis-aligned box: first positive wall crossing per axis.
    lo, hi = d.bounding_box()
    with np.errstate(divide="ignore"):
        t_hi = (hi - x) / dirs
        t_lo = (lo - x) / dirs
    t_exit = np.where(dirs > 0.0, t_hi, np.where(dirs < 0.0, t_lo, np.inf))
    return np.min(t_exit, axis=-1)


def boundary_distance(d: Domain, x, w: Direction) -> float:
    """Distance R with x + R*w on the boundary and x + t*w interior for t < R."""
    return float(boundary_distances(d, x, w.unit[None, :])[0])


def sphere_rule(dim: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature nodes and weights on S^{dim-1} as plain arrays.

    dim=1: the two points {+1, -1}, weight 1 each.
    dim=2: uniform angles (trapezoid rule, spectrally accurate for periodic
    integrands), weight 2*pi/count.
    dim=3: product rule, Gauss-Legendre in cos(theta) times uniform azimuth.
    """
    if dim not in _SUPPORTED_DIMS:
        raise ConfigurationError(f"unsupported dimension {dim}; expected 1, 2 or 3")
    if count < 1:
        raise ConfigurationError("sphere rule needs count >= 1")
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        k = np.arange(count)
        theta = 2.0 * math.pi * k / count
        dirs = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
        wts = np.full(count, 2.0 * math.pi / count)
        return dirs, wts
    # dim == 3: polar count from the total budget, azimuthal twice that.
    n_pol = max(2, int(round(math.sqrt(count / 2.0))))
    n_azi = 2 * n_pol
    t, wt = np.polynomial.legendre.leggauss(n_pol)  # t = cos(theta)
    phi = 2.0 * math.pi * np.arange(n_azi) / n_azi
    st = np.sqrt(1.0 - t**2)
    dirs = np.stack(
        [
            np.outer(st, np.cos(phi)).ravel(),
            np.outer(st, np.sin(phi)).ravel(),
            np.outer(t, np.ones(n_azi)).ravel(),
        ],
        axis=-1,
    )
    wts = np.outer(wt, np.full(n_azi, 2.0 * math.pi / n_azi)).ravel()
    return dirs, wts


def unit_sphere_nodes(dim: int, count: int) -> list[tuple[Direction, float]]:
    """Sphere rule as (Direction, weight) pairs; weights sum to |S^{dim-1}|."""
    dirs, wts = sphere_rule(dim, count)
    return [(Direction(dirs[i]), float(wts[i])) for i in range(len(wts))]


@dataclass(frozen=True)
class TensorGrid:
    """Gauss-Legendre tensor grid on the domain's bounding box.

    For balls, nodes outside the domain are dropped (inside-domain mask), so
    the weight sum approaches |domain| from the masked rule.
    """

    domain: Domain
    nodes_per_axis: int
    points: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)


def tensor_grid(d: Domain, nodes_per_axis: int) -> TensorGrid:
    if nodes_per_axis < 1:
        raise ConfigurationError("tensor grid needs at least one node per axis")
    lo, hi = d.bounding_box()
    xi, wi = np.polynomial.legendre.leggauss(nodes_per_axis)
    axes_x, axes_w = [], []
    for a, b in zip(lo, hi):
        half, mid = (b - a) / 2.0, (b + a) / 2.0
        axes_x.append(mid + half * xi)
        axes_w.append(half * wi)
    mesh = np.meshgrid(*axes_x, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)
    wmesh = np.meshgrid(*axes_w, indexing="ij")
    weights = np.ones(points.shape[0])
    for wm in wmesh:
        weights = weights * wm.ravel()
    if d.kind == "ball":
        keep = d.contains(points)
        points, weights = points[keep], weights[keep]
    return TensorGrid(d, nodes_per_axis, points, weights)
