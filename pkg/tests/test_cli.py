"""End-to-end command line runs: outputs, determinism, exit codes."""

import csv
import json
import math

import numpy as np
import pytest

from currentlab import SpectralResult, chain_from_json, flat_norm, mass
from currentlab.cli import main
from currentlab.scenarios import gen_strip_pair


def _write(path, data):
    path.write_text(json.dumps(data))
    return str(path)


def test_generate_writes_chain_with_mass(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "scenario": {"name": "circle", "params": {"segments": 32}},
        "output": "circle.json",
    })
    assert main(["generate", "--config", cfg, "--out",
                 str(tmp_path)]) == 0
    data = json.loads((tmp_path / "circle.json").read_text())
    assert set(data) >= {"ambient_dim", "dim", "vertices", "simplices",
                         "multiplicities", "mass"}
    ch = chain_from_json(data)
    assert mass(ch) == pytest.approx(data["mass"], rel=1e-12)
    assert data["mass"] == pytest.approx(
        2.0 * 32 * math.sin(math.pi / 32), rel=1e-12)


def test_generate_omega_reports_arc(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "scenario": {"name": "omega",
                     "params": {"L": 1.0, "R0": 0.25}},
        "output": "omega.json",
    })
    assert main(["generate", "--config", cfg, "--out",
                 str(tmp_path)]) == 0
    data = json.loads((tmp_path / "omega.json").read_text())
    assert len(data["arc_vertices"]) > 0
    verts = np.asarray(data["vertices"])
    r = np.linalg.norm(verts[data["arc_vertices"]], axis=1)
    assert np.allclose(r, 0.25, atol=1e-12)


def test_spectrum_from_chain_file(tmp_path):
    gen_cfg = _write(tmp_path / "gen.json", {
        "scenario": {"name": "circle", "params": {"segments": 128}},
        "output": "circle.json",
    })
    assert main(["generate", "--config", gen_cfg, "--out",
                 str(tmp_path)]) == 0
    sp_cfg = _write(tmp_path / "spectrum.json", {
        "chain": str(tmp_path / "circle.json"),
        "method": "intrinsic", "bc": "closed", "k": 3,
        "output": "values.json",
    })
    assert main(["spectrum", "--config", sp_cfg, "--out",
                 str(tmp_path)]) == 0
    data = json.loads((tmp_path / "values.json").read_text())
    assert set(data) == {"values", "inf_count", "method", "bc"}
    assert data["bc"] == "closed"
    assert abs(data["values"][0]) < 1e-10
    assert data["values"][1] == pytest.approx(1.0, rel=1e-3)


def test_spectrum_ambient_with_explicit_basis(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "scenario": {"name": "circle", "params": {"segments": 64}},
        "method": "ambient", "k": 2, "order": 3,
        "basis": {"kind": "spline",
                  "box": [[-1.05, -1.05], [1.05, 1.05]],
                  "cells": [8, 8]},
        "output": "amb.json",
    })
    assert main(["spectrum", "--config", cfg, "--out",
                 str(tmp_path)]) == 0
    data = json.loads((tmp_path / "amb.json").read_text())
    assert data["method"] == "ambient"
    assert data["values"][1] > 0.9


def test_flatnorm_certificate_roundtrip(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "scenario": {"name": "strip_pair", "params": {}},
        "output": "fn.json",
    })
    assert main(["flatnorm", "--config", cfg, "--out",
                 str(tmp_path)]) == 0
    data = json.loads((tmp_path / "fn.json").read_text())
    assert set(data) == {"value", "U", "V"}
    assert data["value"] == pytest.approx(0.3, abs=1e-9)
    U = chain_from_json(data["U"])
    V = chain_from_json(data["V"])
    assert U.dim == 1 and V.dim == 2
    assert mass(U) + mass(V) == pytest.approx(data["value"], rel=1e-12)
    direct = flat_norm(gen_strip_pair())
    assert direct.value == pytest.approx(data["value"], abs=1e-12)


def test_study_csv_schema_and_verdicts(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "family": "example1", "grid": [0.2, 0.1],
        "output": "study.csv",
    })
    assert main(["study", "--config", cfg, "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "study.csv").read_text().splitlines()
    assert lines[0] == "scenario,param,quantity,value"
    with open(tmp_path / "study.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2 * 4  # grid points x quantities
    assert {r["scenario"] for r in rows} == {"example1"}
    report = json.loads((tmp_path / "study.json").read_text())
    assert report["verdicts"]["neumann_semicontinuity"] == "fail"
    assert report["verdicts"]["mass_hypothesis"] == "fail"
    assert report["metadata"]["seed"] == 0
    assert len(report["rows"]) == len(rows)


def test_study_thread_count_does_not_change_bytes(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "family": "refinement", "grid": [8, 12],
        "output": "ref.csv",
    })
    for sub, threads in (("a", "1"), ("b", "3")):
        assert main(["study", "--config", cfg, "--out",
                     str(tmp_path / sub), "--threads", threads]) == 0
    assert ((tmp_path / "a" / "ref.csv").read_bytes()
            == (tmp_path / "b" / "ref.csv").read_bytes())
    assert ((tmp_path / "a" / "ref.json").read_bytes()
            == (tmp_path / "b" / "ref.json").read_bytes())
    report = json.loads((tmp_path / "a" / "ref.json").read_text())
    assert report["verdicts"] == {"refinement_monotone": "pass",
                                  "upper_bound": "pass"}


def test_study_partial_results_on_domain_error(tmp_path):
    # second grid point is out of range: the run exits 2, but rows for
    # the good point and an inconclusive report are still written
    cfg = _write(tmp_path / "cfg.json", {
        "family": "example1", "grid": [0.2, 0.9],
        "output": "partial.csv",
    })
    assert main(["study", "--config", cfg, "--out", str(tmp_path)]) == 2
    with open(tmp_path / "partial.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 4
    assert {r["param"] for r in rows} == {repr(0.2)}
    report = json.loads((tmp_path / "partial.json").read_text())
    assert set(report["verdicts"].values()) == {"inconclusive"}


def test_config_canonical_form_is_a_fixed_point(tmp_path):
    cfg_path = _write(tmp_path / "cfg.json", {
        "family": "example1", "grid": [0.2, 0.1], "output": "s.csv"})
    first = json.dumps(json.loads(open(cfg_path).read()),
                       sort_keys=True, indent=2)
    again = json.dumps(json.loads(first), sort_keys=True, indent=2)
    assert first == again


def test_study_swiss_verdicts(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {
        "family": "swiss_cheese", "grid": [1, 2],
        "output": "sw.csv",
    })
    assert main(["study", "--config", cfg, "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "sw.json").read_text())
    assert report["verdicts"]["dirichlet_semicontinuity"] == "fail"
    assert report["verdicts"]["boundary_hypothesis"] == "fail"
    by = {(int(p), q): v for s, p, q, v in report["rows"]}
    for level in (1, 2):
        assert by[(level, "lambda1_dirichlet")] >= 2.0 ** (0.5 * level)
        assert by[(level, "boundary_witness")] > 0.3


def test_verify_subset_passes_and_repeats_identically(tmp_path):
    cfg = _write(tmp_path / "cfg.json", {"criteria": [1, 2, 9],
                                         "output": "report.json"})
    assert main(["verify", "--config", cfg, "--out",
                 str(tmp_path / "r1")]) == 0
    assert main(["verify", "--config", cfg, "--out",
                 str(tmp_path / "r2")]) == 0
    b1 = (tmp_path / "r1" / "report.json").read_bytes()
    b2 = (tmp_path / "r2" / "report.json").read_bytes()
    assert b1 == b2
    report = json.loads(b1)
    assert report["passed"] is True
    assert [c["criterion"] for c in report["criteria"]] == [1, 2, 9]
    assert all(c["passed"] for c in report["criteria"])


def test_verify_detects_injected_sign_bug(tmp_path, monkeypatch):
    import currentlab.acceptance as acceptance
    real = acceptance.intrinsic_curve_spectrum

    def flipped(chain, bc, k):
        res = real(chain, bc, k)
        return SpectralResult(tuple(-v for v in res.values),
                              res.kept_dim, res.method, res.bc)

    monkeypatch.setattr(acceptance, "intrinsic_curve_spectrum", flipped)
    cfg = _write(tmp_path / "cfg.json", {"criteria": [1]})
    assert main(["verify", "--config", cfg, "--out",
                 str(tmp_path)]) == 1
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] is False


def test_config_error_exits_3(tmp_path):
    assert main(["spectrum", "--config",
                 str(tmp_path / "missing.json")]) == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["generate", "--config", str(bad)]) == 3
    cfg = _write(tmp_path / "unknown.json", {
        "scenario": {"name": "torus"}, "output": "x.json"})
    assert main(["generate", "--config", cfg, "--out",
                 str(tmp_path)]) == 3
    cfg2 = _write(tmp_path / "method.json", {
        "scenario": {"name": "circle"}, "method": "magic", "k": 1,
        "output": "x.json"})
    assert main(["spectrum", "--config", cfg2, "--out",
                 str(tmp_path)]) == 3
    cfg3 = _write(tmp_path / "family.json", {"family": "nope"})
    assert main(["study", "--config", cfg3]) == 3
    assert main([]) == 3
    assert main(["frobnicate"]) == 3
    cfg4 = _write(tmp_path / "badparam.json", {
        "scenario": {"name": "circle", "params": {"spokes": 7}},
        "output": "x.json"})
    assert main(["generate", "--config", cfg4, "--out",
                 str(tmp_path)]) == 3


def test_domain_error_exits_2(tmp_path):
    cfg = _write(tmp_path / "eps.json", {
        "scenario": {"name": "example1", "params": {"eps": 0.9}},
        "output": "x.json"})
    assert main(["generate", "--config", cfg, "--out",
                 str(tmp_path)]) == 2
    cfg2 = _write(tmp_path / "hole.json", {
        "scenario": {"name": "swiss_cheese",
                     "params": {"level": 1, "R0": 0.45}},
        "output": "x.json"})
    assert main(["generate", "--config", cfg2, "--out",
                 str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    import subprocess
    import sys
    cfg = _write(tmp_path / "cfg.json", {
        "scenario": {"name": "interval", "params": {"segments": 4}},
        "output": "seg.json"})
    proc = subprocess.run(
        [sys.executable, "-m", "currentlab.cli", "generate",
         "--config", cfg, "--out", str(tmp_path)],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert (tmp_path / "seg.json").exists()
