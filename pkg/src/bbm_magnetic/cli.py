"""Command line interface.

Subcommands:
  constants        print K_N, Q_N, c(N, s) and the s -> 1 limit as JSON
  sweep            run a sweep described by a JSON config file
  operator         fractional vs local operator values at a point
  mollifier-check  moment report for a built-in mollifier family

Exit codes: 0 success, 1 condition/assertion violation, 2 configuration
error, 3 integration failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .constants import (
    bbm_constant,
    dimensional_constants,
    fractional_constant,
    fractional_constant_limit,
)
from .corpus import resolve_field, resolve_potential
from .errors import ConditionViolation, ConfigurationError, IntegrationError
from .functionals import bbm_family, check_mollifier, gaussian_family
from .harness import default_spec, emit_report, load_config, render_report, run_sweep
from .operator import operator_limit_scan


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"expected comma-separated numbers, got {text!r}") from exc


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_constants(args) -> int:
    payload = {
        "dim": args.dim,
        "K_N": bbm_constant(args.dim),
        "Q_N": dimensional_constants(args.dim).second_moment,
        "sphere_area": dimensional_constants(args.dim).sphere_area,
        "limit": fractional_constant_limit(args.dim),
    }
    if args.s is not None:
        payload["s"] = args.s
        payload["c"] = fractional_constant(args.dim, args.s)
    _write_or_print(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    report = run_sweep(cfg, threads=args.threads)
    fmt = args.format or cfg.fmt
    out = args.out or cfg.output
    if out:
        emit_report(report, fmt, out)
    else:
        sys.stdout.write(render_report(report, fmt))
    return 0


def _cmd_operator(args) -> int:
    u = resolve_field(args.field)
    A = resolve_potential(args.potential, args.dim)
    point = np.asarray(_parse_floats(args.point), dtype=float)
    if point.size != args.dim:
        raise ConfigurationError(f"point has {point.size} coordinates, expected {args.dim}")
    s_list = _parse_floats(args.s_list)
    spec = default_spec(args.dim)
    samples = operator_limit_scan(u, A, point, s_list, spec)
    if args.format == "json":
        rows = [
            {
                "s": smp.s,
                "fractional": [smp.fractional.real, smp.fractional.imag],
                "local": [smp.local.real, smp.local.imag],
                "discrepancy": smp.discrepancy,
            }
            for smp in samples
        ]
        text = json.dumps({"point": list(point), "rows": rows}, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["s,frac_re,frac_im,local_re,local_im,discrepancy"]
        for smp in samples:
            lines.append(
                f"{smp.s!r},{smp.fractional.real!r},{smp.fractional.imag!r},"
                f"{smp.local.real!r},{smp.local.imag!r},{smp.discrepancy!r}"
            )
        text = "\n".join(lines) + "\n"
    _write_or_print(text, args.out)
    return 0


def _cmd_mollifier_check(args) -> int:
    if args.family == "gaussian":
        indices = [int(v) for v in _parse_floats(args.indices or "2,4,6,8,12,16")]
        fam = gaussian_family(indices, args.dim)
    elif args.family == "bbm":
        s_list = _parse_floats(args.s_list or "0.8,0.9,0.95,0.99")
        fam = bbm_family(s_list, args.r_domain, args.dim)
    else:
        raise ConfigurationError(f"unknown family {args.family!r}")
    checks = check_mollifier(fam, args.dim, args.delta)
    rows = [
        {"param": c.param, "m0": c.m0, "tail": c.tail, "m1": c.m1, "m2": c.m2}
        for c in checks
    ]
    _write_or_print(json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="bbm-magnetic",
        description="Magnetic fractional seminorms and their local limits.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("constants", help="dimensional and fractional constants")
    pc.add_argument("--dim", type=int, required=True)
    pc.add_argument("--s", type=float, default=None)
    pc.add_argument("--out", default=None)
    pc.set_defaults(fn=_cmd_constants)

    ps = sub.add_parser("sweep", help="run a configured sweep")
    ps.add_argument("--config", required=True)
    ps.add_argument("--out", default=None)
    ps.add_argument("--format", choices=("csv", "json"), default=None)
    ps.add_argument("--threads", type=int, default=1)
    ps.set_defaults(fn=_cmd_sweep)

    po = sub.add_parser("operator", help="fractional vs local operator at a point")
    po.add_argument("--field", required=True)
    po.add_argument("--potential", required=True)
    po.add_argument("--dim", type=int, required=True)
    po.add_argument("--point", required=True, help="comma-separated coordinates")
    po.add_argument("--s-list", required=True, help="comma-separated s values")
    po.add_argument("--format", choices=("csv", "json"), default="csv")
    po.add_argument("--out", default=None)
    po.set_defaults(fn=_cmd_operator)

    pm = sub.add_parser("mollifier-check", help="mollifier family moment report")
    pm.add_argument("--family", choices=("gaussian", "bbm"), required=True)
    pm.add_argument("--dim", type=int, required=True)
    pm.add_argument("--delta", type=float, required=True)
    pm.add_argument("--indices", default=None, help="gaussian family indices")
    pm.add_argument("--s-list", default=None, help="bbm family s values")
    pm.add_argument("--r-domain", type=float, default=2.0)
    pm.set_defaults(fn=_cmd_mollifier_check)
    pm.add_argument("--out", default=None)

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConditionViolation as exc:
        print(f"condition violation: {exc}", file=sys.stderr)
        return 1
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
