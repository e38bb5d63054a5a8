"""Singular double integrals over Omega x Omega with |x-y|^(-N-2s) kernels.

The engine rewrites the inner integral in radial-angular coordinates around
each outer node, y = x + r*omega, so the kernel times the volume element
collapses to the one-dimensional weight r^(-1-2s).  The radial axis is
covered by geometric layers running from the directional boundary distance
down to the cutoff radius, with a Gauss-Legendre rule per layer and the
kernel weight folded into the integrand.  A tensor rule on Omega x Omega
cannot survive s -> 1; this layout can, because the mass that concentrates
below the cutoff is restored analytically (second-order Taylor correction)
rather than resolved by nodes.

Summation is a fixed-order pairwise tree over outer nodes, so results are
bit-for-bit reproducible regardless of how callers schedule the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .constants import dimensional_constants
from .errors import ConfigurationError, IntegrationError
from .fields import ScalarField, VectorPotential, require_gradient
from .geometry import Domain, sphere_rule, tensor_grid

__all__ = [
    "QuadratureSpec",
    "IntegralResult",
    "pairwise_sum",
    "double_integral_singular",
    "near_field_correction",
    "tail_integral",
]

# Cap on points handled per outer-node chunk; keeps peak memory modest.
_CHUNK_BUDGET = 400_000


@dataclass(frozen=True)
class QuadratureSpec:
    """All discretization knobs for the singular double integrals.

    ``eps`` is the inner cutoff in units of the domain diameter.  Near-field
    mode "taylor-correct" restores the sub-cutoff mass analytically;
    "drop" discards it, which is useful to visualize how much mass the
    cutoff ball holds as s grows.
    """

    outer_nodes: int = 48
    angular_nodes: int = 32
    radial_nodes: int = 8
    eps: float = 1e-4
    radial_layout: str = "geometric"
    geometric_ratio: float = 0.5
    near_field: str = "taylor-correct"

    def __post_init__(self):
        if min(self.outer_nodes, self.angular_nodes, self.radial_nodes) < 1:
            raise ConfigurationError("all node counts must be >= 1")
        if not 0.0 < self.eps < 1.0:
            raise ConfigurationError("eps must lie in (0, 1) as a diameter fraction")
        if not 0.0 < self.geometric_ratio < 1.0:
            raise ConfigurationError("geometric ratio must lie in (0, 1)")
        if self.radial_layout not in ("geometric", "graded"):
            raise ConfigurationError(f"unknown radial layout {self.radial_layout!r}")
        if self.near_field not in ("drop", "taylor-correct"):
            raise ConfigurationError(f"unknown near-field mode {self.near_field!r}")


@dataclass(frozen=True)
class IntegralResult:
    """Value plus the difference between the two finest refinement levels."""

    value: float
    estimated_error: float
    node_count: int


def pairwise_sum(values: np.ndarray):
    """Sum in a fixed adjacent-pair binary tree, independent of scheduling."""
    a = np.asarray(values).ravel().copy()
    if a.size == 0:
        return a.dtype.type(0)
    while a.size > 1:
        odd = a[-1] if a.size % 2 else None
        head = a[: 2 * (a.size // 2)]
        a = head[0::2] + head[1::2]
        if odd is not None:
            a = np.concatenate([a, [odd]])
    return a[0]


def _boundary_distances_grid(d: Domain, X: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Exit distances for every (outer point, direction) pair: (C, M)."""
    if d.kind == "ball":
        rel = X - d.center
        r = float(d.extents[0])
        b = rel @ dirs.T
        disc = b**2 + (r**2 - np.sum(rel * rel, axis=-1))[:, None]
        return -b + np.sqrt(disc)
    lo, hi = d.bounding_box()
    with np.errstate(divide="ignore"):
        t_hi = (hi - X[:, None, :]) / dirs[None, :, :]
        t_lo = (lo - X[:, None, :]) / dirs[None, :, :]
    t_exit = np.where(dirs[None, :, :] > 0.0, t_hi, np.where(dirs[None, :, :] < 0.0, t_lo, np.inf))
    return np.min(t_exit, axis=-1)


def _layered_radial(
    R: np.ndarray, eps_x: np.ndarray, spec: QuadratureSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Radial nodes and dr-weights covering [eps_x, R] per direction.

    R has shape (..., M); eps_x must broadcast against R.  Returns r and w of
    shape (..., M, K).  Layers a direction does not need carry zero weight,
    so ragged layer counts vectorize as padding.
    """
    ratio = spec.geometric_ratio
    xi, wgl = np.polynomial.legendre.leggauss(spec.radial_nodes)
    eps = np.broadcast_to(np.asarray(eps_x, dtype=float), R.shape)
    n_layers = np.ceil(np.log(R / eps) / math.log(1.0 / ratio)).astype(int)
    n_layers = np.maximum(n_layers, 1)
    l_max = int(n_layers.max())
    if spec.radial_layout == "graded":
        # Single log-space panel with the full node budget.
        k_tot = spec.radial_nodes * l_max
        xi, wgl = np.polynomial.legendre.leggauss(k_tot)
        t_lo, t_hi = np.log(eps), np.log(R)
        half = 0.5 * (t_hi - t_lo)
        tau = 0.5 * (t_hi + t_lo)[..., None] + half[..., None] * xi
        r = np.exp(tau)
        w = half[..., None] * wgl * r
        return r, w
    j = np.arange(l_max)
    shape_hi = R[..., None] * ratio**j  # (..., M, L)
    valid = j < n_layers[..., None]
    hi = shape_hi
    lo = np.maximum(hi * ratio, eps[..., None])
    half = np.where(valid, 0.5 * (hi - lo), 0.0)
    mid = np.where(valid, 0.5 * (hi + lo), eps[..., None])
    r = mid[..., None] + half[..., None] * xi  # (..., M, L, K)
    w = half[..., None] * wgl
    new_shape = R.shape + (l_max * spec.radial_nodes,)
    return r.reshape(new_shape), w.reshape(new_shape)


def _near_field_values(
    u: ScalarField, A: VectorPotential, X: np.ndarray, eps_x: np.ndarray, s: float
) -> np.ndarray:
    """Vectorized sub-cutoff correction for the seminorm inner integral."""
    grad = require_gradient(u, "near-field correction")
    q = dimensional_constants(u.dim).second_moment
    d_ax = grad(X) - 1j * A(X) * u.value(X)[..., None]
    mag2 = np.sum(np.abs(d_ax) ** 2, axis=-1)
    return mag2 * q * eps_x ** (2.0 - 2.0 * s) / (2.0 - 2.0 * s)


def near_field_correction(
    u: ScalarField, A: VectorPotential, x, eps: float, s: float
) -> float:
    """Leading contribution of the ball B(x, eps) to the seminorm inner
    integral: |grad u(x) - i A(x) u(x)|^2 * Q_N * eps^(2-2s) / (2-2s)."""
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order s={s} outside (0, 1)")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return float(_near_field_values(u, A, x[None, :], np.array([eps]), s)[0])


def _domain_pass(
    pair_fn: Callable,
    d: Domain,
    spec: QuadratureSpec,
    radial_weight: Callable[[np.ndarray], np.ndarray],
    near_field: Optional[Callable],
) -> tuple[float, int]:
    """One full evaluation at the given spec; returns (value, node count)."""
    grid = tensor_grid(d, spec.outer_nodes)
    dirs, wdir = sphere_rule(d.dimension, spec.angular_nodes)
    eps_abs = spec.eps * d.diameter()
    n_out = grid.points.shape[0]
    partials = np.zeros(n_out)
    nodes_used = 0

    per_point = dirs.shape[0] * spec.radial_nodes * 40  # rough K upper bound
    chunk = max(1, _CHUNK_BUDGET // per_point)
    for start in range(0, n_out, chunk):
        X = grid.points[start : start + chunk]
        R = _boundary_distances_grid(d, X, dirs)
        # Shrink the cutoff near the boundary so the corrected ball stays
        # inside the domain.
        eps_x = np.minimum(eps_abs, 0.5 * R.min(axis=1))
        r, w = _layered_radial(R, eps_x[:, None], spec)
        y = X[:, None, None, :] + r[..., None] * dirs[None, :, None, :]
        vals = pair_fn(X[:, None, None, :], y)
        if np.isnan(vals).any():
            idx = np.argwhere(np.isnan(vals))[0]
            bad = y[tuple(idx)]
            raise IntegrationError(f"integrand produced NaN at y={bad.tolist()}")
        inner = np.sum(vals * (w * radial_weight(r)), axis=-1) @ wdir
        if near_field is not None:
            inner = inner + near_field(X, eps_x)
        partials[start : start + chunk] = grid.weights[start : start + chunk] * inner
        nodes_used += int(np.prod(vals.shape))
    return float(pairwise_sum(partials)), nodes_used


def _coarsened(spec: QuadratureSpec, dim: int) -> QuadratureSpec:
    """One rung down the refinement ladder, for the two-level error estimate."""
    ang = spec.angular_nodes
    if dim > 1:
        ang = max(8, 2 * (spec.angular_nodes // 4))
    return replace(
        spec,
        outer_nodes=max(4, spec.outer_nodes // 2),
        radial_nodes=max(2, spec.radial_nodes - 2),
        angular_nodes=ang,
    )


def _run_two_level(pair_fn, d, spec, radial_weight, near_field) -> IntegralResult:
    fine, nodes = _domain_pass(pair_fn, d, spec, radial_weight, near_field)
    coarse, _ = _domain_pass(pair_fn, d, _coarsened(spec, d.dimension), radial_weight, near_field)
    return IntegralResult(fine, abs(fine - coarse), nodes)


def _check_diagonal(pair_fn, d: Domain, spec: QuadratureSpec) -> None:
    """Sample the numerator on the diagonal; abort if it does not vanish."""
    grid = tensor_grid(d, min(spec.outer_nodes, 5))
    pts = grid.points
    diag = pair_fn(pts, pts)
    if np.isnan(np.asarray(diag)).any():
        raise IntegrationError("integrand is NaN on the diagonal")
    probe = pts + 0.125 * (d.center - pts)
    distinct = np.linalg.norm(probe - pts, axis=-1) > 0.0
    scale = 1.0
    if distinct.any():
        scale = max(1.0, float(np.max(np.abs(pair_fn(pts[distinct], probe[distinct])))))
    if float(np.max(np.abs(diag))) > 1e-10 * scale:
        raise IntegrationError(
            "integrand does not vanish on the diagonal; the double integral "
            "would diverge for s >= 1/2"
        )


def double_integral_singular(
    integrand: Callable,
    d: Domain,
    s: float,
    spec: QuadratureSpec,
    near_field: Optional[Callable] = None,
) -> IntegralResult:
    """Integrate f(x, y) / |x - y|^(N+2s) over Omega x Omega.

    ``integrand`` must accept broadcastable point arrays of shape (..., N)
    and vanish on the diagonal (checked by sampling).  ``near_field``, if
    given, maps (outer points (C, N), cutoff radii (C,)) to the analytic
    sub-cutoff contribution per outer point; it is only applied in
    "taylor-correct" mode.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order s={s} outside (0, 1)")
    _check_diagonal(integrand, d, spec)
    weight = lambda r: r ** (-1.0 - 2.0 * s)
    hook = near_field if spec.near_field == "taylor-correct" else None
    return _run_two_level(integrand, d, spec, weight, hook)


def tail_integral(d: Domain, x, s: float, angular_nodes: int) -> float:
    """Exact-in-r integral of |x - y|^(-N-2s) over the domain complement.

    Uses int_R^inf r^(-1-2s) dr = R^(-2s) / (2s) along each direction, with
    R the directional boundary distance; valid because the domain is convex.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"fractional order s={s} outside (0, 1)")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not bool(d.contains(x)):
        raise ValueError(f"tail integral diverges: {x.tolist()} is not interior")
    dirs, wts = sphere_rule(d.dimension, angular_nodes)
    R = _boundary_distances_grid(d, x[None, :], dirs)[0]
    return float(np.dot(wts, R ** (-2.0 * s))) / (2.0 * s)


def tail_integral_many(d: Domain, X: np.ndarray, s: float, angular_nodes: int) -> np.ndarray:
    """Vectorized tail_integral over rows of X, for the full-space seminorm."""
    dirs, wts = sphere_rule(d.dimension, angular_nodes)
    R = _boundary_distances_grid(d, np.asarray(X, dtype=float), dirs)
    return (R ** (-2.0 * s)) @ wts / (2.0 * s)
