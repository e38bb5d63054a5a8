"""Energy functionals: magnetic Gagliardo seminorms, local magnetic energy,
mollified functionals with general radial kernels, and the empirical lemma
checks (translation differences, uniform (1-s) bounds).

The domain seminorm and the mollified functional share one radial-angular
engine, differing only in the radial weight.  That is what makes the
algebraic identity between the power-kernel mollifier family and
2(1-s) times the seminorm hold to near machine precision here: identical
nodes, identical summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .constants import dimensional_constants
from .errors import ConfigurationError
from .fields import ScalarField, VectorPotential, midpoint_phase, require_gradient
from .geometry import Domain, TensorGrid, tensor_grid
from .quadrature import (
    IntegralResult,
    QuadratureSpec,
    _near_field_values,
    _run_two_level,
    double_integral_singular,
    pairwise_sum,
    tail_integral_many,
)

__all__ = [
    "FunctionalValue",
    "RadialMollifier",
    "MollifierFamily",
    "MollifierCheck",
    "magnetic_seminorm_sq",
    "local_magnetic_energy",
    "fullspace_seminorm_sq",
    "mollified_functional",
    "bbm_family",
    "gaussian_family",
    "check_mollifier",
    "translation_difference_sq",
    "uniform_bound_check",
    "l2_norm_sq",
]


@dataclass(frozen=True)
class FunctionalValue:
    value: float
    diagnostics: IntegralResult


def _difference_sq(u: ScalarField, A: VectorPotential) -> Callable:
    """Squared magnetic difference quotient numerator as a pair integrand."""

    def pair(x, y):
        return np.abs(u.value(x) - midpoint_phase(A, x, y) * u.value(y)) ** 2

    return pair


def _seminorm_hook(u: ScalarField, A: VectorPotential, s: float, spec: QuadratureSpec):
    if spec.near_field != "taylor-correct":
        return None
    if u.gradient is None:
        raise ConfigurationError(
            "taylor-correct near-field mode needs an analytic gradient; "
            "use near_field='drop' for fields without one"
        )
    return lambda X, eps_x: _near_field_values(u, A, X, eps_x, s)


def magnetic_seminorm_sq(
    u: ScalarField, A: VectorPotential, d: Domain, s: float, spec: QuadratureSpec
) -> FunctionalValue:
    """Squared magnetic Gagliardo seminorm over Omega x Omega."""
    res = double_integral_singular(
        _difference_sq(u, A), d, s, spec, near_field=_seminorm_hook(u, A, s, spec)
    )
    return FunctionalValue(res.value, res)


def _energy_density(u: ScalarField, A: VectorPotential, points: np.ndarray) -> np.ndarray:
    grad = require_gradient(u, "local magnetic energy")
    d_ax = grad(points) - 1j * A(points) * u.value(points)[..., None]
    return np.sum(np.abs(d_ax) ** 2, axis=-1)


def local_magnetic_energy(
    u: ScalarField, A: VectorPotential, d: Domain, grid: TensorGrid
) -> FunctionalValue:
    """Tensor-grid quadrature of |grad u - i A u|^2 over the domain."""
    dens = _energy_density(u, A, grid.points)
    value = float(pairwise_sum(grid.weights * dens))
    coarse_grid = tensor_grid(d, max(2, grid.nodes_per_axis // 2))
    coarse = float(pairwise_sum(coarse_grid.weights * _energy_density(u, A, coarse_grid.points)))
    return FunctionalValue(
        value, IntegralResult(value, abs(value - coarse), grid.points.shape[0])
    )


def l2_norm_sq(u: ScalarField, grid: TensorGrid) -> float:
    """Squared L2 norm of u over the grid's domain."""
    return float(pairwise_sum(grid.weights * np.abs(u.value(grid.points)) ** 2))


def fullspace_seminorm_sq(
    u: ScalarField, A: VectorPotential, d: Domain, s: float, spec: QuadratureSpec
) -> FunctionalValue:
    """Squared seminorm over R^N x R^N for fields vanishing outside the domain.

    Splits into the Omega x Omega part plus the exact cross term
    2 * int |u(x)|^2 * tail(x) dx, since u is extended by zero.
    """
    if not u.is_compact:
        raise ValueError("full-space seminorm requires a compact-in-domain field")
    dom = magnetic_seminorm_sq(u, A, d, s, spec)

    def cross_on(n_axis: int) -> float:
        grid = tensor_grid(d, n_axis)
        u2 = np.abs(u.value(grid.points)) ** 2
        tails = tail_integral_many(d, grid.points, s, spec.angular_nodes)
        return 2.0 * float(pairwise_sum(grid.weights * u2 * tails))

    cross = cross_on(spec.outer_nodes)
    cross_err = abs(cross - cross_on(max(4, spec.outer_nodes // 2)))
    value = dom.value + cross
    diag = IntegralResult(
        value,
        dom.diagnostics.estimated_error + cross_err,
        dom.diagnostics.node_count + spec.outer_nodes**d.dimension,
    )
    return FunctionalValue(value, diag)


# ---------------------------------------------------------------------------
# Mollifier families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadialMollifier:
    """A single nonnegative radial kernel rho(r) with analytic small-ball
    zeroth moment, int_0^eps rho r^(N-1) dr, for the near-field hook."""

    dim: int
    fn: Callable[[np.ndarray], np.ndarray]
    near_moment: Callable[[np.ndarray], np.ndarray]
    support_radius: float
    param: float
    label: str


@dataclass(frozen=True)
class MollifierFamily:
    kind: str
    dim: int
    members: tuple[RadialMollifier, ...]
    params: tuple[float, ...]
    cutoff_radius: Optional[float] = None


def smoothstep_cutoff(r: np.ndarray, r_domain: float) -> np.ndarray:
    """C^2 radial cutoff: 1 on [0, r_domain], 0 beyond 2*r_domain."""
    r = np.asarray(r, dtype=float)
    t = np.clip((r - r_domain) / r_domain, 0.0, 1.0)
    return 1.0 - t**3 * (10.0 - 15.0 * t + 6.0 * t * t)


def bbm_family(s_sequence: Sequence[float], r_domain: float, dim: int) -> MollifierFamily:
    """Power-kernel family rho_n(r) = 2(1-s_n) r^-(N+2s_n-2) psi0(r).

    psi0 is the smoothstep cutoff, identically 1 up to r_domain, so for
    domains of diameter <= r_domain the mollified functional equals
    2(1-s_n) times the squared s_n-seminorm.
    """
    s_arr = list(s_sequence)
    if not s_arr or any(not 0.0 < s < 1.0 for s in s_arr):
        raise ValueError("bbm family needs s values in (0, 1)")
    if any(b <= a for a, b in zip(s_arr, s_arr[1:])):
        raise ValueError("bbm family s values must increase toward 1")
    if r_domain <= 0.0:
        raise ValueError("cutoff radius must be positive")

    members = []
    for s in s_arr:
        expo = dim + 2.0 * s - 2.0

        def fn(r, _e=expo, _s=s):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            pos = r > 0.0
            out[pos] = 2.0 * (1.0 - _s) * r[pos] ** (-_e) * smoothstep_cutoff(r[pos], r_domain)
            return out

        def near_moment(eps, _s=s):
            # Exact while eps <= r_domain, where psi0 == 1.
            return np.asarray(eps, dtype=float) ** (2.0 - 2.0 * _s)

        members.append(
            RadialMollifier(dim, fn, near_moment, 2.0 * r_domain, s, f"bbm:s={s:g}")
        )
    return MollifierFamily("bbm", dim, tuple(members), tuple(s_arr), r_domain)


def gaussian_family(indices: Sequence[int], dim: int) -> MollifierFamily:
    """Gaussian kernels of width 1/n, normalized so the zeroth radial moment
    is exactly one for every member."""
    idx = sorted(int(n) for n in indices)
    if not idx or idx[0] < 1:
        raise ValueError("gaussian family needs positive integer indices")
    xi, wgl = np.polynomial.legendre.leggauss(32)

    members = []
    for n in idx:
        width = 1.0 / n
        amp = 2.0 / (math.gamma(dim / 2.0) * width**dim)

        def fn(r, _a=amp, _w=width):
            r = np.asarray(r, dtype=float)
            return _a * np.exp(-((r / _w) ** 2))

        def near_moment(eps, _a=amp, _w=width):
            eps = np.asarray(eps, dtype=float)
            half = 0.5 * eps
            r = half[..., None] * (xi + 1.0)
            vals = _a * np.exp(-((r / _w) ** 2)) * r ** (dim - 1)
            return (vals * wgl).sum(axis=-1) * half

        members.append(
            RadialMollifier(dim, fn, near_moment, 40.0 * width, float(n), f"gaussian:n={n}")
        )
    return MollifierFamily("gaussian", dim, tuple(members), tuple(float(n) for n in idx))


def _radial_integral(fn: Callable, lo: float, hi: float, nodes: int = 24) -> float:
    """Geometric-layer Gauss-Legendre quadrature of fn on [lo, hi]."""
    if hi <= lo:
        return 0.0
    xi, wgl = np.polynomial.legendre.leggauss(nodes)
    n_layers = max(1, int(math.ceil(math.log2(hi / lo))))
    bounds = hi * 0.5 ** np.arange(n_layers + 1)
    bounds[-1] = lo
    a, b = bounds[1:], bounds[:-1]
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    r = mid[:, None] + half[:, None] * xi
    return float(np.sum(fn(r) * (half[:, None] * wgl)))


@dataclass(frozen=True)
class MollifierCheck:
    """Per-member moment report for the normalization and concentration
    conditions: M0 -> 1, tail(delta) -> 0, and the first two delta-local
    higher moments -> 0."""

    param: float
    m0: float
    tail: float
    m1: float
    m2: float


def check_mollifier(fam: MollifierFamily, dim: int, delta: float) -> list[MollifierCheck]:
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if dim != fam.dim:
        raise ConfigurationError(f"family is {fam.dim}-dimensional, asked for {dim}")
    out = []
    for member in fam.members:
        rsup = member.support_radius
        # Split the zeroth moment at a representable radius: the analytic
        # small-ball moment covers [0, a], where power kernels near s = 1
        # keep mass no grid can see.
        a = min(1e-3 * rsup, 0.5 * delta)
        m0 = float(member.near_moment(a)) + _radial_integral(
            lambda r: member.fn(r) * r ** (dim - 1), a, rsup
        )
        tail = _radial_integral(lambda r: member.fn(r) * r ** (dim - 1), delta, max(rsup, delta))
        tiny = 1e-12 * min(delta, rsup)
        m1 = _radial_integral(lambda r: member.fn(r) * r**dim, tiny, delta)
        m2 = _radial_integral(lambda r: member.fn(r) * r ** (dim + 1), tiny, delta)
        out.append(MollifierCheck(member.param, m0, tail, m1, m2))
    return out


def mollified_functional(
    u: ScalarField, A: VectorPotential, d: Domain, rho: RadialMollifier, spec: QuadratureSpec
) -> FunctionalValue:
    """Integral of |u(x) - phase u(y)|^2 / |x-y|^2 * rho(|x-y|) over the
    domain square, for a single nonnegative radial kernel."""
    if rho.dim != d.dimension:
        raise ConfigurationError("mollifier dimension does not match the domain")
    probe = np.linspace(1e-6, rho.support_radius, 64)
    if np.any(rho.fn(probe) < -1e-15):
        raise ValueError("mollifier kernel must be nonnegative")

    n = d.dimension
    weight = lambda r: rho.fn(r) * r ** (n - 3)

    hook = None
    if spec.near_field == "taylor-correct" and u.gradient is not None:
        q = dimensional_constants(n).second_moment

        def hook(X, eps_x):
            grad = u.gradient(X)
            d_ax = grad - 1j * A(X) * u.value(X)[..., None]
            mag2 = np.sum(np.abs(d_ax) ** 2, axis=-1)
            return mag2 * q * np.asarray(rho.near_moment(eps_x), dtype=float)

    res = _run_two_level(_difference_sq(u, A), d, spec, weight, hook)
    return FunctionalValue(res.value, res)


# ---------------------------------------------------------------------------
# Lemma checks
# ---------------------------------------------------------------------------


def translation_difference_sq(
    u: ScalarField, A: VectorPotential, h, grid: TensorGrid
) -> float:
    """Integral of |u(y+h) - e^{i h . A(y + h/2)} u(y)|^2 over the grid.

    The field must be compactly supported (extension by zero is exact for
    the built-in corpus, whose closures are global), and |h| <= 1.
    """
    h = np.atleast_1d(np.asarray(h, dtype=float))
    if float(np.linalg.norm(h)) > 1.0:
        raise ValueError("translation check requires |h| <= 1")
    if not u.is_compact:
        raise ValueError("translation check requires a compact-in-domain field")
    y = grid.points
    shifted = u.value(y + h)
    arg = np.sum(h * A(y + 0.5 * h), axis=-1)
    diff = shifted - np.exp(1j * arg) * u.value(y)
    return float(pairwise_sum(grid.weights * np.abs(diff) ** 2))


def uniform_bound_check(
    u: ScalarField,
    A: VectorPotential,
    d: Domain,
    s_list: Sequence[float],
    spec: QuadratureSpec,
) -> list[tuple[float, float]]:
    """Ratios (1-s) [u]^2_{s, full space} / (||u||_2^2 + energy) per s.

    Boundedness of these ratios over s, including values near 1, is the
    empirical form of the uniform (1-s) seminorm bound.
    """
    grid = tensor_grid(d, spec.outer_nodes)
    denom = l2_norm_sq(u, grid) + local_magnetic_energy(u, A, d, grid).value
    if denom == 0.0:
        return [(float(s), 0.0) for s in s_list]
    out = []
    for s in s_list:
        full = fullspace_seminorm_sq(u, A, d, float(s), spec).value
        out.append((float(s), (1.0 - float(s)) * full / denom))
    return out
