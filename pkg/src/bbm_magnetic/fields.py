"""Complex scalar test fields, magnetic vector potentials, and gauge maps.

Every field is an analytic closure over all of R^N, vectorized over point
arrays of shape (..., N).  Values are complex, gradients complex (..., N),
Hessians complex (..., N, N).  Potentials are real vector fields with
optional divergence and Jacobian metadata.  Quadrature error is therefore
entirely the integrator's: there is no interpolation anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import ConfigurationError
from .geometry import Domain

__all__ = [
    "ScalarField",
    "VectorPotential",
    "GaugeFunction",
    "midpoint_phase",
    "gauge_transform",
    "modulus_field",
    "scaled_field",
]

COMPACT = "compact-in-domain"
UNRESTRICTED = "unrestricted"


@dataclass(frozen=True)
class ScalarField:
    """Analytic complex scalar field on R^N.

    ``support`` is "compact-in-domain" when the field vanishes (below 1e-14
    in modulus) on the shell of width ``support_margin`` inside the boundary
    of ``support_domain`` and identically outside it, or "unrestricted".
    """

    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support: str = UNRESTRICTED
    support_domain: Optional[Domain] = None
    support_margin: float = 0.0
    label: str = ""

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.value(np.asarray(points, dtype=float))

    @property
    def is_compact(self) -> bool:
        return self.support == COMPACT


@dataclass(frozen=True)
class VectorPotential:
    """Real vector field A with optional divergence and Jacobian closures."""

    dim: int
    value: Callable[[np.ndarray], np.ndarray]
    divergence: Optional[Callable[[np.ndarray], np.ndarray]] = None
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return self.value(np.asarray(points, dtype=float))


@dataclass(frozen=True)
class GaugeFunction:
    """Affine gauge phi(x) = b . x + c; grad(phi) is the constant b."""

    b: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.b + self.c


def midpoint_phase(A: VectorPotential, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Unit-modulus factor exp(i (x - y) . A((x + y)/2)).

    Broadcasts over point arrays; equals 1 when x == y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mid = 0.5 * (x + y)
    arg = np.sum((x - y) * A(mid), axis=-1)
    return np.exp(1j * arg)


def gauge_transform(
    u: ScalarField, A: VectorPotential, g: GaugeFunction
) -> tuple[ScalarField, VectorPotential]:
    """Apply the gauge change u -> e^{i phi} u, A -> A + grad(phi).

    Restricted to affine phi, for which the midpoint phase reproduces the
    gauge factor exactly and all magnetic energies are exactly invariant.
    Analytic gradient and Hessian are transformed when available.
    """
    b = g.b

    def new_value(p):
        return np.exp(1j * g(p)) * u.value(p)

    new_grad = None
    if u.gradient is not None:

        def new_grad(p):
            ph = np.exp(1j * g(p))
            return ph[..., None] * (u.gradient(p) + 1j * b * u.value(p)[..., None])

    new_hess = None
    if u.hessian is not None and u.gradient is not None:

        def new_hess(p):
            ph = np.exp(1j * g(p))[..., None, None]
            grad = u.gradient(p)
            val = u.value(p)[..., None, None]
            cross = 1j * (b[:, None] * grad[..., None, :] + b[None, :] * grad[..., :, None])
            return ph * (u.hessian(p) + cross - np.outer(b, b) * val)

    def new_pot(p):
        return A(p) + b

    shifted = VectorPotential(
        dim=A.dim,
        value=new_pot,
        divergence=A.divergence,
        jacobian=A.jacobian,
        label=f"{A.label}+affine" if A.label else "affine-shift",
    )
    lifted = replace(
        u,
        value=new_value,
        gradient=new_grad,
        hessian=new_hess,
        label=f"{u.label}*gauge" if u.label else "gauged",
    )
    return lifted, shifted


def modulus_field(u: ScalarField) -> ScalarField:
    """Pointwise |u|: real-valued, with no analytic gradient attached."""

    def mod_value(p):
        return np.abs(u.value(p)).astype(complex)

    return replace(
        u,
        value=mod_value,
        gradient=None,
        hessian=None,
        label=f"|{u.label}|" if u.label else "modulus",
    )


def scaled_field(u: ScalarField, lam: complex) -> ScalarField:
    """The field lam * u, with gradient and Hessian scaled alongside."""
    lam = complex(lam)
    grad = None if u.gradient is None else (lambda p: lam * u.gradient(p))
    hess = None if u.hessian is None else (lambda p: lam * u.hessian(p))
    return replace(
        u,
        value=lambda p: lam * u.value(p),
        gradient=grad,
        hessian=hess,
        label=f"{lam}*{u.label}" if u.label else "scaled",
    )


def require_gradient(u: ScalarField, context: str) -> Callable[[np.ndarray], np.ndarray]:
    if u.gradient is None:
        raise ConfigurationError(f"{context} needs a field with an analytic gradient")
    return u.gradient
