"""Built-in verification corpus: analytic fields and potentials by label.

Labels are the CLI-facing names.  Parametrized entries use a colon syntax,
e.g. ``linear:alpha=1`` or ``landau:beta=0.5``.  All closures are global on
R^N; the compactly supported bumps are extended by zero, which is exact.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigurationError
from .fields import COMPACT, ScalarField, VectorPotential
from .geometry import box, interval

__all__ = ["resolve_field", "resolve_potential", "field_labels", "potential_labels"]

# Shell width inside (-1, 1) on which exp(-1/(1-x^2)) is already below 1e-14.
_BUMP_MARGIN = 0.015


def _bump(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


def _bump_d1(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    q = 1.0 - ti * ti
    out[inside] = np.exp(-1.0 / q) * (-2.0 * ti / q**2)
    return out


def _bump_d2(t: np.ndarray) -> np.ndarray:
    out = np.zeros_like(t, dtype=float)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    q = 1.0 - ti * ti
    out[inside] = np.exp(-1.0 / q) * (4.0 * ti * ti / q**4 - 2.0 / q**2 - 8.0 * ti * ti / q**3)
    return out


def _gauss1d() -> ScalarField:
    def val(p):
        return np.exp(-p[..., 0] ** 2).astype(complex)

    def grad(p):
        return (-2.0 * p * np.exp(-p[..., 0] ** 2)[..., None]).astype(complex)

    def hess(p):
        x = p[..., 0]
        return ((4.0 * x * x - 2.0) * np.exp(-x * x)).astype(complex)[..., None, None]

    return ScalarField(1, val, grad, hess, label="gauss1d")


def _bump1d() -> ScalarField:
    def val(p):
        return _bump(p[..., 0]).astype(complex)

    def grad(p):
        return _bump_d1(p[..., 0]).astype(complex)[..., None]

    def hess(p):
        return _bump_d2(p[..., 0]).astype(complex)[..., None, None]

    return ScalarField(
        1,
        val,
        grad,
        hess,
        support=COMPACT,
        support_domain=interval(-1.0, 1.0),
        support_margin=_BUMP_MARGIN,
        label="bump1d",
    )


def _modgauss1d(kappa: float) -> ScalarField:
    def val(p):
        x = p[..., 0]
        return np.exp(1j * kappa * x - x * x)

    def grad(p):
        x = p[..., 0]
        return ((1j * kappa - 2.0 * x) * np.exp(1j * kappa * x - x * x))[..., None]

    def hess(p):
        x = p[..., 0]
        u = np.exp(1j * kappa * x - x * x)
        return (((1j * kappa - 2.0 * x) ** 2 - 2.0) * u)[..., None, None]

    return ScalarField(1, val, grad, hess, label=f"modgauss1d:kappa={kappa:g}")


def _gauss2d() -> ScalarField:
    def val(p):
        return np.exp(-np.sum(p * p, axis=-1)).astype(complex)

    def grad(p):
        return (-2.0 * p * np.exp(-np.sum(p * p, axis=-1))[..., None]).astype(complex)

    def hess(p):
        u = np.exp(-np.sum(p * p, axis=-1))
        eye = np.eye(p.shape[-1])
        outer = 4.0 * p[..., :, None] * p[..., None, :]
        return ((outer - 2.0 * eye) * u[..., None, None]).astype(complex)

    return ScalarField(2, val, grad, hess, label="gauss2d")


def _bump2d() -> ScalarField:
    def val(p):
        return (_bump(p[..., 0]) * _bump(p[..., 1])).astype(complex)

    def grad(p):
        x, y = p[..., 0], p[..., 1]
        g = np.stack([_bump_d1(x) * _bump(y), _bump(x) * _bump_d1(y)], axis=-1)
        return g.astype(complex)

    return ScalarField(
        2,
        val,
        grad,
        None,
        support=COMPACT,
        support_domain=box([0.0, 0.0], [1.0, 1.0]),
        support_margin=_BUMP_MARGIN,
        label="bump2d",
    )


def _zero_potential(dim: int) -> VectorPotential:
    return VectorPotential(
        dim,
        value=lambda p: np.zeros_like(np.asarray(p, dtype=float)),
        divergence=lambda p: np.zeros(np.asarray(p).shape[:-1]),
        jacobian=lambda p: np.zeros(np.asarray(p).shape[:-1] + (dim, dim)),
        label="zero",
    )


def _const1d(alpha: float) -> VectorPotential:
    return VectorPotential(
        1,
        value=lambda p: np.full_like(np.asarray(p, dtype=float), alpha),
        divergence=lambda p: np.zeros(np.asarray(p).shape[:-1]),
        jacobian=lambda p: np.zeros(np.asarray(p).shape[:-1] + (1, 1)),
        label=f"const:alpha={alpha:g}",
    )


def _linear1d(alpha: float) -> VectorPotential:
    return VectorPotential(
        1,
        value=lambda p: alpha * np.asarray(p, dtype=float),
        divergence=lambda p: np.full(np.asarray(p).shape[:-1], alpha),
        jacobian=lambda p: np.full(np.asarray(p).shape[:-1] + (1, 1), alpha),
        label=f"linear:alpha={alpha:g}",
    )


def _landau(beta: float) -> VectorPotential:
    def val(p):
        p = np.asarray(p, dtype=float)
        return np.stack([-0.5 * beta * p[..., 1], 0.5 * beta * p[..., 0]], axis=-1)

    def jac(p):
        base = np.array([[0.0, -0.5 * beta], [0.5 * beta, 0.0]])
        return np.broadcast_to(base, np.asarray(p).shape[:-1] + (2, 2)).copy()

    return VectorPotential(
        2,
        value=val,
        divergence=lambda p: np.zeros(np.asarray(p).shape[:-1]),
        jacobian=jac,
        label=f"landau:beta={beta:g}",
    )


def _parse(label: str) -> tuple[str, dict[str, float]]:
    name, _, tail = label.partition(":")
    params: dict[str, float] = {}
    if tail:
        for part in tail.split(","):
            key, _, raw = part.partition("=")
            if not raw:
                raise ConfigurationError(f"malformed parameter {part!r} in label {label!r}")
            try:
                params[key.strip()] = float(raw)
            except ValueError as exc:
                raise ConfigurationError(f"non-numeric parameter in label {label!r}") from exc
    return name.strip(), params


def resolve_field(label: str) -> ScalarField:
    name, params = _parse(label)
    if name == "gauss1d":
        return _gauss1d()
    if name == "bump1d":
        return _bump1d()
    if name == "modgauss1d":
        return _modgauss1d(params.get("kappa", 1.0))
    if name == "gauss2d":
        return _gauss2d()
    if name == "bump2d":
        return _bump2d()
    raise ConfigurationError(f"unknown field label {label!r}; known: {field_labels()}")


def resolve_potential(label: str, dim: int) -> VectorPotential:
    name, params = _parse(label)
    if name == "zero":
        return _zero_potential(dim)
    if name == "const":
        pot = _const1d(params.get("alpha", 1.0))
    elif name == "linear":
        pot = _linear1d(params.get("alpha", 1.0))
    elif name == "landau":
        pot = _landau(params.get("beta", 1.0))
    else:
        raise ConfigurationError(
            f"unknown potential label {label!r}; known: {potential_labels()}"
        )
    if pot.dim != dim:
        raise ConfigurationError(
            f"potential {label!r} is {pot.dim}-dimensional, domain is {dim}-dimensional"
        )
    return pot


def field_labels() -> list[str]:
    return ["gauss1d", "bump1d", "modgauss1d:kappa=K", "gauss2d", "bump2d"]


def potential_labels() -> list[str]:
    return ["zero", "const:alpha=A", "linear:alpha=A", "landau:beta=B"]
