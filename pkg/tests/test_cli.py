"""Command-line behavior: exit codes, output schemas, config precedence,
atomic writes, and determinism."""

import csv
import json
import shutil
import subprocess
import sys

import pytest

from convexmf.cli import main
from convexmf.constructions import ConvexExpr

# ---------------------------------------------------------------------------
# entry point basics
# ---------------------------------------------------------------------------


def test_version_line(capsys):
    assert main(["--version"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("convexmf 0.1.0 (kernel backend: ")
    assert out.rstrip().endswith(("numba)", "numpy)"))


def test_no_command_prints_help(capsys):
    assert main([]) == 1
    assert "usage:" in capsys.readouterr().out


def test_unknown_command_is_usage_error(capsys):
    assert main(["frobnicate"]) == 1
    assert "invalid choice" in capsys.readouterr().err


def test_unknown_flag_is_usage_error(capsys):
    assert main(["construct", "--bogus"]) == 1


# ---------------------------------------------------------------------------
# construct
# ---------------------------------------------------------------------------


def test_construct_default_roundtrip(tmp_path, capsys):
    path = tmp_path / "expr.json"
    assert main(["construct", "--out", str(path)]) == 0
    assert f"wrote {path}" in capsys.readouterr().out
    expr = ConvexExpr.from_json(path.read_text())
    assert expr.dim == 1
    assert expr.staircase_levels == (3, 6)
    assert expr.certified_convex


def test_construct_stdout_json(capsys):
    assert main(["construct", "--seq", "3"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["format"] == 1
    assert obj["staircase_levels"] == [3]


def test_construct_invalid_sequence(capsys):
    assert main(["construct", "--seq", "3,4"]) == 1
    assert "l_k > 2^k violated at k=2 (4 <= 4)" in capsys.readouterr().err


def test_construct_csv_summary(capsys):
    assert main(
        ["construct", "--seq", "3", "--spike", "4", "--mollify", "0.25",
         "--format", "csv"]
    ) == 0
    rows = {r[0]: r[1] for r in csv.reader(capsys.readouterr().out.splitlines())}
    assert rows["dim"] == "1"
    assert rows["staircase_levels"] == "3"
    assert rows["spike_levels"] == "4"
    assert rows["mollified"] == "true"


def test_construct_spiked_mollified_roundtrip(tmp_path):
    path = tmp_path / "e.json"
    assert main(
        ["construct", "--seq", "3", "--spike", "4", "--mollify", "1*2^-3",
         "--out", str(path)]
    ) == 0
    expr = ConvexExpr.from_json(path.read_text())
    assert expr.smoothed is not None
    assert expr.smoothed.inner.spike_levels == (4,)
    assert expr.smoothed.inner.staircase_levels == (3,)


def test_construct_bad_mollify_scale(capsys):
    assert main(["construct", "--seq", "3", "--mollify", "0.75"]) == 1
    assert main(["construct", "--seq", "3", "--mollify", "what"]) == 1


def test_construct_custom_base(tmp_path):
    path = tmp_path / "affine.json"
    assert main(
        ["construct", "--seq", "", "--quad", "0", "--lin", "1", "--const",
         "1*2^-2", "--out", str(path)]
    ) == 0
    expr = ConvexExpr.from_json(path.read_text())
    assert expr.staircase_levels == ()
    import numpy as np

    got = expr.evaluate(np.array([[0.0], [0.5], [1.0]]))
    assert got.tolist() == [0.25, 0.75, 1.25]


def test_construct_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["construct", "--depth", "2", "--mollify", "0.25"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


# ---------------------------------------------------------------------------
# config file merging
# ---------------------------------------------------------------------------


def test_config_supplies_defaults_and_flags_win(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seq": "3", "format": "json"}))
    out1 = tmp_path / "one.json"
    assert main(["construct", "--config", str(cfg), "--out", str(out1)]) == 0
    assert ConvexExpr.from_json(out1.read_text()).staircase_levels == (3,)
    out2 = tmp_path / "two.json"
    assert main(
        ["construct", "--config", str(cfg), "--seq", "3,6", "--out", str(out2)]
    ) == 0
    assert ConvexExpr.from_json(out2.read_text()).staircase_levels == (3, 6)


def test_config_missing_and_malformed(tmp_path, capsys):
    assert main(["construct", "--config", str(tmp_path / "nope.json")]) == 2
    assert "config file not found" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["construct", "--config", str(bad)]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["construct", "--config", str(broken)]) == 2


# ---------------------------------------------------------------------------
# spectrum
# ---------------------------------------------------------------------------


def _affine_expr(tmp_path):
    path = tmp_path / "affine.json"
    assert main(
        ["construct", "--seq", "", "--quad", "0", "--lin", "1", "--out", str(path)]
    ) == 0
    return str(path)


def test_spectrum_missing_input(tmp_path, capsys):
    missing = str(tmp_path / "absent.json")
    assert main(["spectrum", "--input", missing]) == 2
    assert f"input file not found: {missing}" in capsys.readouterr().err
    assert main(["spectrum"]) == 1  # no --input at all is a usage error


def test_spectrum_unreadable_input(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("not json")
    assert main(["spectrum", "--input", str(path)]) == 2
    assert "unreadable expression" in capsys.readouterr().err


def test_spectrum_csv_pass(tmp_path, capsys):
    expr = _affine_expr(tmp_path)
    out = tmp_path / "curve.csv"
    code = main(
        ["spectrum", "--input", expr, "--n", "10", "--scales", "6:8",
         "--out", str(out)]
    )
    assert code == 0
    assert "upper-bound check: pass" in capsys.readouterr().out
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["h", "value", "kind", "delta", "scales"]
    assert rows[-1][1] == "1"  # affine input saturates at the cap bin
    assert rows[-1][4] == "6:8"
    assert all(r[1] == "-inf" for r in rows[1:-1])


def test_spectrum_json_bound_block(tmp_path, capsys):
    expr = _affine_expr(tmp_path)
    assert main(
        ["spectrum", "--input", expr, "--n", "10", "--scales", "6:8",
         "--format", "json"]
    ) == 0
    out = capsys.readouterr().out
    obj = json.loads(out[out.index("{") : out.rindex("}") + 1])
    assert obj["bound_check"] == {"passed": True, "margin": 0.15, "violations": []}


def test_spectrum_negative_margin_forces_failure(tmp_path, capsys):
    expr = _affine_expr(tmp_path)
    code = main(
        ["spectrum", "--input", expr, "--n", "10", "--scales", "6:8",
         "--margin", "-0.5"]
    )
    assert code == 3
    assert "upper-bound check: FAIL" in capsys.readouterr().out


def test_spectrum_unresolvable_grid(tmp_path, capsys):
    expr = _affine_expr(tmp_path)
    assert main(["spectrum", "--input", expr, "--n", "7"]) == 2
    assert "fewer than two default scales" in capsys.readouterr().err


def test_spectrum_bad_scales_syntax(tmp_path):
    expr = _affine_expr(tmp_path)
    assert main(["spectrum", "--input", expr, "--scales", "six-nine"]) == 1


def test_spectrum_derivative_path(tmp_path, capsys):
    expr = _affine_expr(tmp_path)
    code = main(
        ["spectrum", "--input", expr, "--derivative", "--n", "10",
         "--scales", "6:8"]
    )
    assert code == 0
    assert "upper-bound check: pass" in capsys.readouterr().out


def test_spectrum_derivative_rejects_mollified(tmp_path, capsys):
    path = tmp_path / "smooth.json"
    assert main(
        ["construct", "--seq", "3", "--mollify", "0.25", "--out", str(path)]
    ) == 0
    assert main(["spectrum", "--input", str(path), "--derivative"]) == 1
    assert "no closed derivative" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def test_verify_single_check(capsys):
    assert main(["verify", "--only", "spectrum-table"]) == 0
    out = capsys.readouterr().out
    assert "spectrum-table: pass - 20 tabulated values exact" in out
    assert "verify: all checks pass" in out


def test_verify_staircase_check(capsys):
    assert main(["verify", "--only", "staircase-exact"]) == 0
    assert "staircase-exact: pass" in capsys.readouterr().out


def test_verify_unknown_check(capsys):
    assert main(["verify", "--only", "nope"]) == 1
    assert "unknown checks: nope" in capsys.readouterr().err


def test_verify_controls_must_detect(capsys):
    code = main(
        ["verify", "--negative-controls", "--only", "control-bound",
         "--only", "control-convexity"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "control-bound: pass - injected curve flagged at h=1.5" in out
    assert "control-convexity: pass - concave input flagged" in out


def test_verify_controls_hidden_without_flag(capsys):
    assert main(["verify", "--only", "control-bound"]) == 1
    assert "unknown checks" in capsys.readouterr().err


def test_verify_report_file(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(
        ["verify", "--only", "spectrum-table", "--out", str(out)]
    ) == 0
    obj = json.loads(out.read_text())
    assert obj["all_passed"] is True
    assert obj["checks"][0]["check"] == "spectrum-table"
    # byte-identical on a second run
    first = out.read_bytes()
    assert main(["verify", "--only", "spectrum-table", "--out", str(out)]) == 0
    assert out.read_bytes() == first


# ---------------------------------------------------------------------------
# cantor
# ---------------------------------------------------------------------------


def test_cantor_csv_exact(tmp_path, capsys):
    out = tmp_path / "cover.csv"
    assert main(
        ["cantor", "--h", "1.5", "--seq", "3,10", "--out", str(out)]
    ) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0] == ["generation", "N", "log2_delta", "slope"]
    assert rows[1] == ["1", "512", "-25", "0.360000"]
    assert rows[2] == ["2", str(1 << 84), "-221", "0.380090"]
    assert "slope" in capsys.readouterr().out


def test_cantor_auto_sequence_matches_explicit(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["cantor", "--h", "3/2", "--depth", "2", "--out", str(a)]) == 0
    assert main(["cantor", "--h", "1.5", "--seq", "3,10", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_cantor_h_validation(capsys):
    assert main(["cantor", "--h", "2"]) == 1
    assert "h must lie in [1, 2); got 2" in capsys.readouterr().err
    assert main(["cantor", "--h", "abc"]) == 1
    assert "cannot parse exponent" in capsys.readouterr().err
    assert main(["cantor"]) == 1


def test_cantor_empty_intersection_reported(tmp_path, capsys):
    out = tmp_path / "empty.csv"
    assert main(
        ["cantor", "--h", "1.25", "--seq", "3,6", "--out", str(out)]
    ) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert len(rows) == 2  # header and the one surviving generation
    assert "EMPTY" in capsys.readouterr().out


def test_cantor_json_with_intervals(capsys):
    assert main(
        ["cantor", "--h", "1", "--seq", "3", "--emit-intervals",
         "--format", "json"]
    ) == 0
    out = capsys.readouterr().out
    obj = json.loads(out[out.index("{"):])
    assert obj["entries"] == [3]
    assert obj["generations"][0]["log2_count"] == 9
    assert obj["local_dimension"]["slope"] == 0.0
    endpoints = obj["intervals"]["endpoints"]
    assert len(endpoints) == 512
    assert endpoints[0] == ["7*2^-12", "15*2^-13"]


def test_cantor_k_start_deepens_first_generation(capsys):
    # admissibility is position-indexed: at k_start=2 the level must beat 2^2
    assert main(
        ["cantor", "--h", "1", "--seq", "5", "--k-start", "2",
         "--format", "json"]
    ) == 0
    out = capsys.readouterr().out
    obj = json.loads(out[out.index("{"):])
    assert obj["generations"][0]["log2_count"] == 25
    assert obj["generations"][0]["log2_delta"] == -61
    assert obj["k_start"] == 2
    assert main(["cantor", "--h", "1", "--seq", "3", "--k-start", "2"]) == 1


def test_cantor_radius_exps_flag(capsys):
    assert main(
        ["cantor", "--h", "1", "--seq", "3", "--radius-exps", "9,13",
         "--format", "json"]
    ) == 0
    out = capsys.readouterr().out
    obj = json.loads(out[out.index("{"):])
    assert obj["local_dimension"]["radius_exps"] == [9, 13]
    assert obj["local_dimension"]["slope"] == 0.0


def test_cantor_radius_exps_out_of_band(capsys):
    assert main(["cantor", "--h", "1", "--seq", "3", "--radius-exps", "9,14"]) == 1
    assert "deepest resolved scale" in capsys.readouterr().err


def test_cantor_dim_flag(capsys):
    assert main(
        ["cantor", "--h", "1", "--seq", "3", "--dim", "2", "--format", "json"]
    ) == 0
    out = capsys.readouterr().out
    obj = json.loads(out[out.index("{"):])
    assert obj["local_dimension"]["slope"] == pytest.approx(1.0)
    assert len(obj["local_dimension"]["point"]) == 2


# ---------------------------------------------------------------------------
# atomic output
# ---------------------------------------------------------------------------


def test_atomic_write_leaves_no_temp_files(tmp_path):
    out = tmp_path / "expr.json"
    assert main(["construct", "--seq", "3", "--out", str(out)]) == 0
    assert main(["construct", "--seq", "3,6", "--out", str(out)]) == 0
    assert ConvexExpr.from_json(out.read_text()).staircase_levels == (3, 6)
    assert [p.name for p in tmp_path.iterdir()] == ["expr.json"]


# ---------------------------------------------------------------------------
# real processes
# ---------------------------------------------------------------------------


def _run(args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "convexmf.cli", *args],
        capture_output=True,
        text=True,
        **kw,
    )


def test_subprocess_version_and_exit_codes():
    ok = _run(["--version"])
    assert ok.returncode == 0
    assert ok.stdout.startswith("convexmf 0.1.0")
    bad = _run(["construct", "--seq", "3,4"])
    assert bad.returncode == 1
    assert "l_k > 2^k" in bad.stderr


def test_subprocess_console_script_installed():
    exe = shutil.which("convexmf")
    if exe is None:
        pytest.skip("console script not on PATH")
    done = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert done.returncode == 0
    assert "kernel backend" in done.stdout
