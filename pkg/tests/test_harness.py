import json
import math
import subprocess
import sys

import numpy as np
import pytest
from numpy.testing import assert_allclose

import bbm_magnetic
from bbm_magnetic.corpus import resolve_field, resolve_potential
from bbm_magnetic.errors import ConditionViolation, ConfigurationError
from bbm_magnetic.functionals import (
    MollifierFamily,
    RadialMollifier,
    bbm_family,
    magnetic_seminorm_sq,
)
from bbm_magnetic.geometry import interval
from bbm_magnetic.harness import (
    SweepConfig,
    SweepReport,
    config_from_dict,
    default_spec,
    emit_report,
    extrapolate_limit,
    render_report,
    report_from_dict,
    report_to_dict,
    run_bbm_sweep,
    run_mollifier_sweep,
    run_sweep,
)
from bbm_magnetic.quadrature import QuadratureSpec

D1 = interval(-1.0, 1.0)
FAST_SPEC = QuadratureSpec(outer_nodes=64, angular_nodes=2, radial_nodes=8)


def _cfg(**kw):
    base = dict(kind="bbm-domain", field_label="gauss1d", potential_label="linear:alpha=1",
                domain=D1, spec=FAST_SPEC)
    base.update(kw)
    return SweepConfig(**base)


# ---------------------------------------------------------------------------
# Extrapolation
# ---------------------------------------------------------------------------


def test_extrapolate_exact_affine_data():
    rows = [(1.0 - s, 3.0 + 2.0 * (1.0 - s)) for s in (0.8, 0.9, 0.95, 0.99)]
    limit, resid = extrapolate_limit(rows)
    assert_allclose(limit, 3.0, atol=1e-12)
    assert resid <= 1e-12


def test_extrapolate_constant_data():
    limit, resid = extrapolate_limit([(0.2, 5.0), (0.1, 5.0), (0.05, 5.0)])
    assert_allclose(limit, 5.0, atol=1e-12)
    assert resid <= 1e-12


def test_extrapolate_needs_three_rows():
    with pytest.raises(ValueError):
        extrapolate_limit([(0.1, 1.0), (0.05, 2.0)])


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigurationError):
        _cfg(kind="nope")
    with pytest.raises(ConfigurationError):
        _cfg(s_list=(0.9, 0.8))
    with pytest.raises(ConfigurationError):
        _cfg(s_list=(0.5, 1.2))


def test_config_from_dict_defaults_and_echo():
    cfg = config_from_dict({
        "kind": "bbm-domain",
        "field": "gauss1d",
        "potential": "zero",
        "domain": {"kind": "interval", "center": [0.0], "extents": [1.0]},
        "quadrature": {"outer_nodes": 32},
    })
    assert cfg.domain.diameter() == 2.0
    assert cfg.spec.outer_nodes == 32
    assert cfg.spec.angular_nodes == default_spec(1).angular_nodes
    assert cfg.s_list == (0.8, 0.9, 0.95, 0.99)


def test_bbm_sweep_rows_and_target_consistency():
    rep = run_bbm_sweep(_cfg())
    assert [r.param for r in rep.rows] == [0.8, 0.9, 0.95, 0.99]
    for r in rep.rows:
        assert_allclose(r.scaled, (1.0 - r.param) * r.value, rtol=1e-15)
        assert r.target == rep.target
        assert r.abs_err >= 0.0
    errs = [r.rel_err for r in rep.rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert abs(rep.extrapolated_limit - rep.target) / rep.target < 0.01


def test_zero_target_rows_have_zero_errors():
    # pure-gauge configurations produce rows of zeros against a zero target;
    # the row builder must not divide by it
    from bbm_magnetic.harness import _make_rows

    rows = _make_rows([0.8, 0.9], [0.0, 0.0], lambda s, v: (1 - s) * v, 0.0)
    assert all(r.rel_err == 0.0 and r.scaled == 0.0 for r in rows)
    bad = _make_rows([0.8], [1.0], lambda s, v: v, 0.0)
    assert bad[0].rel_err == math.inf


def test_threads_do_not_change_values():
    cfg = _cfg()
    rep1 = run_bbm_sweep(cfg, threads=1)
    rep8 = run_bbm_sweep(cfg, threads=8)
    assert [r.value for r in rep1.rows] == [r.value for r in rep8.rows]
    assert render_report(rep1, "csv") == render_report(rep8, "csv")
    assert render_report(rep1, "json") == render_report(rep8, "json")


def test_mollifier_sweep_gaussian_family_converges():
    cfg = _cfg(kind="mollifier", family={"kind": "gaussian", "indices": [2, 4, 6, 8, 12]})
    rep = run_mollifier_sweep(cfg)
    errs = [r.rel_err for r in rep.rows]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert "mollifier_checks" in rep.metadata


def test_mollifier_sweep_bbm_identity_rows():
    cfg = _cfg(kind="mollifier",
               family={"kind": "bbm", "s_list": [0.8, 0.9, 0.95, 0.99], "r_domain": 2.0})
    rep = run_mollifier_sweep(cfg)
    u = resolve_field("gauss1d")
    A = resolve_potential("linear:alpha=1", 1)
    for row in rep.rows:
        ref = 2.0 * (1.0 - row.param) * magnetic_seminorm_sq(u, A, D1, row.param, FAST_SPEC).value
        assert abs(row.value - ref) / ref < 1e-10


def test_mollifier_sweep_zero_family_aborts_naming_normaliz():
    zero = RadialMollifier(1, lambda r: np.zeros_like(r),
                           lambda e: np.zeros_like(np.asarray(e)), 1.0, 1.0, "null")
    fam = MollifierFamily("custom", 1, (zero,) * 3, (1.0, 2.0, 3.0))
    with pytest.raises(ConditionViolation, match=r"\(normaliz\)"):
        run_mollifier_sweep(_cfg(kind="mollifier"), family=fam)


def test_mollifier_sweep_fixed_width_aborts_naming_fourtheq():
    # normalized kernels of constant width keep their mass beyond delta:
    # (normaliz) holds exactly while the concentration condition fails
    from bbm_magnetic.functionals import gaussian_family

    fam = gaussian_family([2, 2, 2], 1)
    with pytest.raises(ConditionViolation, match=r"\(fourtheq\)"):
        run_mollifier_sweep(_cfg(kind="mollifier"), family=fam)


def test_mollifier_sweep_wide_bbm_aborts_naming_normaliz():
    # s far from 1 leaves the zeroth moment far above 1
    fam = bbm_family([0.3, 0.35, 0.4], r_domain=2.0, dim=1)
    with pytest.raises(ConditionViolation, match=r"\(normaliz\)"):
        run_mollifier_sweep(_cfg(kind="mollifier"), family=fam)


def test_translation_sweep_report():
    cfg = _cfg(kind="lemma-translation", field_label="bump1d")
    rep = run_sweep(cfg)
    assert [r.param for r in rep.rows] == sorted(cfg.h_list)
    ratios = [r.scaled for r in rep.rows]
    assert max(ratios) / min(ratios) < 1.2
    assert abs(rep.extrapolated_limit - rep.target) / rep.target < 0.01


def test_uniform_sweep_report():
    cfg = _cfg(kind="lemma-uniform", field_label="bump1d",
               s_list=(0.5, 0.7, 0.9, 0.99))
    rep = run_sweep(cfg)
    ratios = [r.scaled for r in rep.rows]
    assert max(ratios) / min(ratios) <= 5.0


def test_operator_sweep_report():
    cfg = _cfg(kind="operator-limit", field_label="gauss1d", potential_label="zero",
               s_list=(0.7, 0.8, 0.9), point=(0.0,))
    rep = run_sweep(cfg)
    disc = [r.value for r in rep.rows]
    assert all(b < a for a, b in zip(disc, disc[1:]))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


def test_empty_report_renders_header_only():
    rep = SweepReport("bbm-domain", (), 0.0, 0.0, 0.0, {})
    assert render_report(rep, "csv") == "param,value,scaled,target,abs_err,rel_err\n"


def test_json_round_trip_identity():
    rep = run_bbm_sweep(_cfg(s_list=(0.8, 0.9, 0.95)))
    blob = render_report(rep, "json")
    back = report_from_dict(json.loads(blob))
    assert report_to_dict(back) == report_to_dict(rep)
    assert render_report(back, "json") == blob


def test_emit_report_bytes_stable(tmp_path):
    cfg = _cfg(s_list=(0.8, 0.9, 0.95))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_report(run_bbm_sweep(cfg), "csv", p1)
    emit_report(run_bbm_sweep(cfg), "csv", p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_emit_report_bad_path():
    rep = SweepReport("bbm-domain", (), 0.0, 0.0, 0.0, {})
    with pytest.raises(ConfigurationError):
        emit_report(rep, "csv", "/nonexistent-dir-xyz/report.csv")


def test_unknown_format_rejected():
    rep = SweepReport("bbm-domain", (), 0.0, 0.0, 0.0, {})
    with pytest.raises(ConfigurationError):
        render_report(rep, "yaml")


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _run_cli(*args):
    return subprocess.run([sys.executable, "-m", "bbm_magnetic.cli", *args],
                          capture_output=True, text=True)


def test_cli_constants_json():
    out = _run_cli("constants", "--dim", "2", "--s", "0.9")
    assert out.returncode == 0
    payload = json.loads(out.stdout)
    assert_allclose(payload["K_N"], math.pi / 2.0, rtol=1e-14)
    assert_allclose(payload["Q_N"], math.pi, rtol=1e-14)
    assert_allclose(payload["limit"], 4.0 / math.pi, rtol=1e-14)
    assert payload["c"] > 0.0


def test_cli_constants_bad_dim_exits_2():
    out = _run_cli("constants", "--dim", "9")
    assert out.returncode == 2
    assert "configuration error" in out.stderr


def test_cli_operator_rows():
    out = _run_cli("operator", "--field", "gauss1d", "--potential", "zero",
                   "--dim", "1", "--point", "0", "--s-list", "0.5,0.7")
    assert out.returncode == 0
    lines = out.stdout.strip().splitlines()
    assert lines[0] == "s,frac_re,frac_im,local_re,local_im,discrepancy"
    assert len(lines) == 3


def test_cli_mollifier_check():
    out = _run_cli("mollifier-check", "--family", "gaussian", "--dim", "1",
                   "--delta", "0.1", "--indices", "4,8,16")
    assert out.returncode == 0
    rows = json.loads(out.stdout)["rows"]
    assert len(rows) == 3
    assert all(abs(r["m0"] - 1.0) < 1e-9 for r in rows)


def test_cli_sweep_threads_byte_identical(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "kind": "bbm-domain",
        "field": "gauss1d",
        "potential": "linear:alpha=1",
        "domain": {"kind": "interval", "center": [0.0], "extents": [1.0]},
        "s_list": [0.8, 0.9, 0.95],
        "quadrature": {"outer_nodes": 48, "radial_nodes": 6},
    }))
    outs = {}
    for fmt in ("csv", "json"):
        for threads in ("1", "8"):
            path = tmp_path / f"r{threads}.{fmt}"
            res = _run_cli("sweep", "--config", str(cfg_path), "--threads", threads,
                           "--format", fmt, "--out", str(path))
            assert res.returncode == 0, res.stderr
            outs[(fmt, threads)] = path.read_bytes()
    assert outs[("csv", "1")] == outs[("csv", "8")]
    assert outs[("json", "1")] == outs[("json", "8")]


def test_cli_sweep_condition_violation_exits_1(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "kind": "mollifier",
        "field": "gauss1d",
        "potential": "zero",
        "domain": {"kind": "interval", "center": [0.0], "extents": [1.0]},
        "family": {"kind": "gaussian", "indices": [2, 2, 2]},
        "quadrature": {"outer_nodes": 32},
    }))
    res = _run_cli("sweep", "--config", str(cfg_path))
    assert res.returncode == 1
    assert "(fourtheq)" in res.stderr
