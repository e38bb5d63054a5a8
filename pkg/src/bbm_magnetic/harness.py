"""Experiment drivers: s-sweeps, mollifier sweeps, lemma checks, limit
extrapolation, and deterministic CSV/JSON reports.

Every sweep row is an independent pure computation, so rows may be computed
by a thread pool; the report is always assembled in parameter order and all
floating-point reductions inside a row use fixed-order summation, which is
why reruns (at any thread count) produce byte-identical artifacts.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .constants import bbm_constant
from .corpus import resolve_field, resolve_potential
from .errors import ConditionViolation, ConfigurationError, IntegrationError
from .functionals import (
    MollifierFamily,
    bbm_family,
    check_mollifier,
    fullspace_seminorm_sq,
    gaussian_family,
    l2_norm_sq,
    local_magnetic_energy,
    magnetic_seminorm_sq,
    mollified_functional,
    translation_difference_sq,
)
from .geometry import Domain, ball, box, direction, interval, tensor_grid
from .quadrature import QuadratureSpec, pairwise_sum

__all__ = [
    "SweepConfig",
    "SweepRow",
    "SweepReport",
    "default_spec",
    "config_from_dict",
    "load_config",
    "run_sweep",
    "run_bbm_sweep",
    "run_mollifier_sweep",
    "extrapolate_limit",
    "emit_report",
    "report_to_dict",
    "report_from_dict",
]

SWEEP_KINDS = (
    "bbm-domain",
    "bbm-fullspace",
    "mollifier",
    "lemma-translation",
    "lemma-uniform",
    "operator-limit",
)

DEFAULT_S_LIST = (0.8, 0.9, 0.95, 0.99)
# Trend thresholds for the mollifier admission checks.
_NORMALIZ_TOL = 0.1
_TAIL_TOL = 0.1


def default_spec(dim: int) -> QuadratureSpec:
    """Dimension-dependent default discretization."""
    if dim == 1:
        return QuadratureSpec(outer_nodes=160, angular_nodes=2, radial_nodes=10)
    if dim == 2:
        return QuadratureSpec(outer_nodes=24, angular_nodes=48, radial_nodes=8)
    return QuadratureSpec(outer_nodes=12, angular_nodes=128, radial_nodes=6)


@dataclass(frozen=True)
class SweepConfig:
    kind: str
    field_label: str
    potential_label: str
    domain: Domain
    s_list: tuple[float, ...] = DEFAULT_S_LIST
    family: Optional[dict] = None
    h_list: tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
    direction: Optional[tuple[float, ...]] = None
    point: Optional[tuple[float, ...]] = None
    delta: float = 0.1
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: Optional[str] = None
    fmt: str = "csv"

    def __post_init__(self):
        if self.kind not in SWEEP_KINDS:
            raise ConfigurationError(f"unknown sweep kind {self.kind!r}; known: {SWEEP_KINDS}")
        s = self.s_list
        if any(not 0.0 < v < 1.0 for v in s) or any(b <= a for a, b in zip(s, s[1:])):
            raise ConfigurationError("s_list must be strictly increasing inside (0, 1)")


@dataclass(frozen=True)
class SweepRow:
    param: float
    value: float
    scaled: float
    target: float
    abs_err: float
    rel_err: float
    failed: bool = False
    note: str = ""


@dataclass(frozen=True)
class SweepReport:
    kind: str
    rows: tuple[SweepRow, ...]
    target: float
    extrapolated_limit: float
    extrapolation_residual: float
    metadata: dict
    wall_time: float = 0.0  # in-memory diagnostic; never serialized


def _domain_from_dict(d: dict) -> Domain:
    kind = d.get("kind")
    if kind == "interval":
        center = float(d.get("center", [0.0])[0])
        ext = float(d.get("extents", [1.0])[0])
        return interval(center - ext, center + ext)
    if kind == "box":
        return box(d["center"], d["extents"])
    if kind == "ball":
        return ball(d["center"], float(d["radius"]))
    raise ConfigurationError(f"unknown domain kind {kind!r}")


def _domain_to_dict(d: Domain) -> dict:
    if d.kind == "ball":
        return {"kind": "ball", "center": d.center.tolist(), "radius": float(d.extents[0])}
    return {"kind": d.kind, "center": d.center.tolist(), "extents": d.extents.tolist()}


def config_from_dict(raw: dict) -> SweepConfig:
    """Build a SweepConfig from a JSON-style dict, filling package defaults."""
    try:
        dom = _domain_from_dict(raw["domain"])
    except KeyError as exc:
        raise ConfigurationError(f"config missing required key: {exc}") from exc
    spec = default_spec(dom.dimension)
    spec = replace(spec, **raw.get("quadrature", {}))
    return SweepConfig(
        kind=raw.get("kind", "bbm-domain"),
        field_label=raw.get("field", "gauss1d"),
        potential_label=raw.get("potential", "zero"),
        domain=dom,
        s_list=tuple(raw.get("s_list", DEFAULT_S_LIST)),
        family=raw.get("family"),
        h_list=tuple(raw.get("h_list", (0.1, 0.05, 0.025, 0.0125))),
        direction=tuple(raw["direction"]) if "direction" in raw else None,
        point=tuple(raw["point"]) if "point" in raw else None,
        delta=float(raw.get("delta", 0.1)),
        spec=spec,
        output=raw.get("output"),
        fmt=raw.get("format", "csv"),
    )


def load_config(path: str | Path) -> SweepConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))


def extrapolate_limit(rows: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares affine fit value = L + C * t over (t, value) rows.

    t is the small parameter carried to zero (1-s for s-sweeps, 1/n for
    mollifier sweeps, |h| for translation sweeps); returns (L, max residual).
    """
    if len(rows) < 3:
        raise ValueError("extrapolation needs at least 3 rows")
    t = np.array([r[0] for r in rows])
    v = np.array([r[1] for r in rows])
    design = np.stack([np.ones_like(t), t], axis=-1)
    coef, *_ = np.linalg.lstsq(design, v, rcond=None)
    residual = float(np.max(np.abs(design @ coef - v)))
    return float(coef[0]), residual


def _fit_closest(small: list[tuple[float, float]]) -> tuple[float, float]:
    """Extrapolate from the three rows closest to the limit (smallest t)."""
    if len(small) < 3:
        return math.nan, math.nan
    return extrapolate_limit(sorted(small, key=lambda r: r[0])[:3])


def _make_rows(params, values, scale_fn, target: float) -> list[SweepRow]:
    rows = []
    for p, entry in zip(params, values):
        if entry is None:
            rows.append(SweepRow(float(p), math.nan, math.nan, target, math.nan, math.nan,
                                 failed=True, note="integration failure"))
            continue
        scaled = scale_fn(p, entry)
        abs_err = abs(scaled - target)
        rel_err = abs_err / abs(target) if target != 0.0 else (0.0 if abs_err == 0.0 else math.inf)
        rows.append(SweepRow(float(p), float(entry), float(scaled), target, abs_err, rel_err))
    return rows


def _parallel_map(fn, items, threads: int):
    if threads <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _metadata(cfg: SweepConfig, node_counts: list[int]) -> dict:
    return {
        "config": {
            "kind": cfg.kind,
            "field": cfg.field_label,
            "potential": cfg.potential_label,
            "domain": _domain_to_dict(cfg.domain),
            "s_list": list(cfg.s_list),
            "family": cfg.family,
            "h_list": list(cfg.h_list),
            "direction": list(cfg.direction) if cfg.direction else None,
            "point": list(cfg.point) if cfg.point else None,
            "delta": cfg.delta,
            "quadrature": asdict(cfg.spec),
        },
        "version": __version__,
        "node_counts": node_counts,
    }


def run_bbm_sweep(cfg: SweepConfig, threads: int = 1) -> SweepReport:
    """Scaled-seminorm sweep versus the local-energy target K_N * E."""
    t0 = time.perf_counter()
    u = resolve_field(cfg.field_label)
    d = cfg.domain
    A = resolve_potential(cfg.potential_label, d.dimension)
    grid = tensor_grid(d, cfg.spec.outer_nodes)
    energy = local_magnetic_energy(u, A, d, grid).value
    target = bbm_constant(d.dimension) * energy
    seminorm = fullspace_seminorm_sq if cfg.kind == "bbm-fullspace" else magnetic_seminorm_sq

    def one(s: float):
        try:
            return seminorm(u, A, d, s, cfg.spec)
        except IntegrationError:
            return None

    results = _parallel_map(one, cfg.s_list, threads)
    values = [None if r is None else r.value for r in results]
    rows = _make_rows(cfg.s_list, values, lambda s, v: (1.0 - s) * v, target)
    good = [(1.0 - r.param, r.scaled) for r in rows if not r.failed]
    limit, resid = _fit_closest(good)
    nodes = [0 if r is None else r.diagnostics.node_count for r in results]
    return SweepReport(cfg.kind, tuple(rows), target, limit, resid,
                       _metadata(cfg, nodes), time.perf_counter() - t0)


def _family_from_descriptor(cfg: SweepConfig) -> MollifierFamily:
    desc = cfg.family or {"kind": "gaussian", "indices": [2, 4, 6, 8, 12, 16, 24]}
    kind = desc.get("kind", "gaussian")
    dim = cfg.domain.dimension
    if kind == "gaussian":
        return gaussian_family([int(n) for n in desc.get("indices", [2, 4, 6, 8, 12, 16, 24])], dim)
    if kind == "bbm":
        r_dom = float(desc.get("r_domain", cfg.domain.diameter()))
        return bbm_family([float(s) for s in desc.get("s_list", cfg.s_list)], r_dom, dim)
    raise ConfigurationError(f"unknown mollifier family kind {kind!r}")


def _admit_family(fam: MollifierFamily, dim: int, delta: float) -> list:
    """Gate a family on its moment trends; abort naming the violated condition."""
    checks = check_mollifier(fam, dim, delta)
    dev = [abs(c.m0 - 1.0) for c in checks]
    if dev[-1] > _NORMALIZ_TOL or any(b > a + 1e-9 for a, b in zip(dev, dev[1:])):
        raise ConditionViolation(
            "(normaliz) violated: zeroth radial moments "
            f"{[round(c.m0, 6) for c in checks]} do not trend to 1"
        )
    tails = [c.tail for c in checks]
    if tails[-1] > _TAIL_TOL or any(b > a + 1e-9 for a, b in zip(tails, tails[1:])):
        raise ConditionViolation(
            f"(fourtheq) violated: tail masses beyond delta={delta:g} "
            f"{[round(t, 6) for t in tails]} do not trend to 0"
        )
    return checks


def run_mollifier_sweep(
    cfg: SweepConfig, family: Optional[MollifierFamily] = None, threads: int = 1
) -> SweepReport:
    """Mollified-functional sweep versus the target 2 K_N * E."""
    t0 = time.perf_counter()
    u = resolve_field(cfg.field_label)
    d = cfg.domain
    A = resolve_potential(cfg.potential_label, d.dimension)
    fam = family if family is not None else _family_from_descriptor(cfg)
    checks = _admit_family(fam, d.dimension, cfg.delta)

    grid = tensor_grid(d, cfg.spec.outer_nodes)
    energy = local_magnetic_energy(u, A, d, grid).value
    target = 2.0 * bbm_constant(d.dimension) * energy

    def one(member):
        try:
            return mollified_functional(u, A, d, member, cfg.spec)
        except IntegrationError:
            return None

    results = _parallel_map(one, fam.members, threads)
    values = [None if r is None else r.value for r in results]
    rows = _make_rows(fam.params, values, lambda p, v: v, target)
    if fam.kind == "bbm":
        small = [(1.0 - r.param, r.scaled) for r in rows if not r.failed]
    else:
        small = [(1.0 / r.param, r.scaled) for r in rows if not r.failed]
    limit, resid = _fit_closest(small)
    meta = _metadata(cfg, [0 if r is None else r.diagnostics.node_count for r in results])
    meta["mollifier_checks"] = [asdict(c) for c in checks]
    return SweepReport(cfg.kind, tuple(rows), target, limit, resid,
                       meta, time.perf_counter() - t0)


def _run_translation_sweep(cfg: SweepConfig, threads: int) -> SweepReport:
    t0 = time.perf_counter()
    u = resolve_field(cfg.field_label)
    d = cfg.domain
    A = resolve_potential(cfg.potential_label, d.dimension)
    omega = direction(cfg.direction if cfg.direction else np.eye(d.dimension)[0]).unit
    # Integrate over the bounding box inflated by the largest shift, so the
    # shifted supports stay covered.
    pad = max(cfg.h_list)
    half = (d.bounding_box()[1] - d.bounding_box()[0]) / 2.0 + pad
    box_d = box(d.center, half)
    grid = tensor_grid(box_d, cfg.spec.outer_nodes)

    grad = u.gradient
    if grad is None:
        raise ConfigurationError("translation sweep needs an analytic gradient")
    d_ax = grad(grid.points) - 1j * A(grid.points) * u.value(grid.points)[..., None]
    target = float(pairwise_sum(grid.weights * np.abs(d_ax @ omega) ** 2))

    def one(h_mag: float):
        return translation_difference_sq(u, A, h_mag * omega, grid)

    h_sorted = tuple(sorted(cfg.h_list))
    values = _parallel_map(one, h_sorted, threads)
    rows = _make_rows(h_sorted, values, lambda h, v: v / h**2, target)
    limit, resid = _fit_closest([(r.param, r.scaled) for r in rows])
    return SweepReport(cfg.kind, tuple(rows), target, limit, resid,
                       _metadata(cfg, [grid.points.shape[0]]), time.perf_counter() - t0)


def _run_uniform_sweep(cfg: SweepConfig, threads: int) -> SweepReport:
    t0 = time.perf_counter()
    u = resolve_field(cfg.field_label)
    d = cfg.domain
    A = resolve_potential(cfg.potential_label, d.dimension)
    grid = tensor_grid(d, cfg.spec.outer_nodes)
    energy = local_magnetic_energy(u, A, d, grid).value
    denom = l2_norm_sq(u, grid) + energy
    target = bbm_constant(d.dimension) * energy / denom if denom > 0.0 else 0.0

    def one(s: float):
        return fullspace_seminorm_sq(u, A, d, s, cfg.spec).value

    values = _parallel_map(one, cfg.s_list, threads)
    scale = (lambda s, v: (1.0 - s) * v / denom) if denom > 0.0 else (lambda s, v: 0.0)
    rows = _make_rows(cfg.s_list, values, scale, target)
    limit, resid = _fit_closest([(1.0 - r.param, r.scaled) for r in rows])
    return SweepReport(cfg.kind, tuple(rows), target, limit, resid,
                       _metadata(cfg, [grid.points.shape[0]]), time.perf_counter() - t0)


def _run_operator_sweep(cfg: SweepConfig, threads: int) -> SweepReport:
    from .operator import local_magnetic_apply, fractional_magnetic_apply

    t0 = time.perf_counter()
    u = resolve_field(cfg.field_label)
    d = cfg.domain
    A = resolve_potential(cfg.potential_label, d.dimension)
    x = np.asarray(cfg.point if cfg.point else d.center, dtype=float)
    loc = local_magnetic_apply(u, A, x)

    def one(s: float):
        return fractional_magnetic_apply(u, A, x, s, cfg.spec, ref_length=d.diameter())

    values = _parallel_map(one, cfg.s_list, threads)
    discrepancies = [abs(v - loc) for v in values]
    rows = _make_rows(cfg.s_list, discrepancies, lambda s, v: v, 0.0)
    limit, resid = _fit_closest([(1.0 - r.param, r.scaled) for r in rows])
    return SweepReport(cfg.kind, tuple(rows), 0.0, limit, resid,
                       _metadata(cfg, []), time.perf_counter() - t0)


def run_sweep(cfg: SweepConfig, threads: int = 1) -> SweepReport:
    """Dispatch a sweep by its configured kind."""
    if cfg.kind in ("bbm-domain", "bbm-fullspace"):
        return run_bbm_sweep(cfg, threads)
    if cfg.kind == "mollifier":
        return run_mollifier_sweep(cfg, threads=threads)
    if cfg.kind == "lemma-translation":
        return _run_translation_sweep(cfg, threads)
    if cfg.kind == "lemma-uniform":
        return _run_uniform_sweep(cfg, threads)
    if cfg.kind == "operator-limit":
        return _run_operator_sweep(cfg, threads)
    raise ConfigurationError(f"unknown sweep kind {cfg.kind!r}")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

_CSV_HEADER = "param,value,scaled,target,abs_err,rel_err"


def report_to_dict(r: SweepReport) -> dict:
    """JSON-ready form of a report; volatile wall time is deliberately left
    out so identical configs serialize to identical bytes."""
    return {
        "kind": r.kind,
        "target": r.target,
        "extrapolated_limit": r.extrapolated_limit,
        "extrapolation_residual": r.extrapolation_residual,
        "rows": [asdict(row) for row in r.rows],
        "metadata": r.metadata,
    }


def report_from_dict(d: dict) -> SweepReport:
    rows = tuple(SweepRow(**row) for row in d["rows"])
    return SweepReport(
        d["kind"], rows, d["target"], d["extrapolated_limit"],
        d["extrapolation_residual"], d["metadata"],
    )


def render_report(r: SweepReport, fmt: str) -> str:
    if fmt == "csv":
        lines = [_CSV_HEADER]
        for row in r.rows:
            lines.append(
                f"{row.param!r},{row.value!r},{row.scaled!r},"
                f"{row.target!r},{row.abs_err!r},{row.rel_err!r}"
            )
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps(report_to_dict(r), indent=2, sort_keys=True) + "\n"
    raise ConfigurationError(f"unknown report format {fmt!r}")


def emit_report(r: SweepReport, fmt: str, path: str | Path) -> None:
    """Write the report; reruns of the same config write identical bytes."""
    text = render_report(r, fmt)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigurationError(f"cannot write report to {path}: {exc}") from exc
