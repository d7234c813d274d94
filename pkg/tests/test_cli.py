import json
import math
import subprocess
import sys

import pytest

from neelwall.cli import main
from neelwall.runio import fmt17, sha256_file

PI = math.pi

GOLDEN_PAIR = (
    "walls.alpha = 1.5707963267948966\n"
    "walls.positions = -0.5, 0.5\n"
    "walls.signs = 1, -1\n"
)

SINGLE_WALL = (
    "walls.alpha = 1.5707963267948966\n"
    "walls.positions = 0.0\n"
    "walls.signs = 1\n"
)


def run_cli(tmp_path, command, config_text, extra=(), name="run"):
    out = tmp_path / name
    args = [command, "--out", str(out)]
    if config_text is not None:
        cfg = tmp_path / f"{name}.cfg"
        cfg.write_text(config_text)
        args += ["--config", str(cfg)]
    rc = main(args + list(extra))
    return rc, out


def test_renorm_golden_pair(tmp_path):
    rc, out = run_cli(tmp_path, "renorm", GOLDEN_PAIR)
    assert rc == 0
    data = json.loads((out / "renorm.json").read_text())
    assert data["W"] == pytest.approx(PI * math.log(4.0 / 3.0), abs=1e-12)
    assert data["W"] == pytest.approx(data["W1"] + data["W2"], rel=1e-12)
    assert len(data["per_wall"]) == 2
    assert len(data["per_pair"]) == 2 and len(data["per_pair"][0]) == 2
    # floats are serialized with 17 significant digits
    assert fmt17(data["W"]) in (out / "renorm.json").read_text()
    man = json.loads((out / "manifest.json").read_text())
    assert man["failed"] is False
    assert {o["path"] for o in man["outputs"]} == {"renorm.json"}
    assert len(man["inputs"]) == 1


def test_renorm_trace_and_determinism(tmp_path):
    cfg = GOLDEN_PAIR + "renorm.trace = True\nrenorm.trace_points = 64\n"
    rc1, out1 = run_cli(tmp_path, "renorm", cfg, name="one")
    rc2, out2 = run_cli(tmp_path, "renorm", cfg, name="two")
    assert rc1 == 0 and rc2 == 0
    lines = (out1 / "renorm_trace.csv").read_text().splitlines()
    assert lines[0] == "x1,mu_star,u_star_trace"
    assert len(lines) == 65
    for product in ("renorm.json", "renorm_trace.csv"):
        assert sha256_file(out1 / product) == sha256_file(out2 / product)


def test_minimize_products(tmp_path):
    cfg = SINGLE_WALL + "scales.epsilon = 0.01\ngrid.size = 1024\n"
    rc, out = run_cli(tmp_path, "minimize", cfg)
    assert rc == 0
    data = json.loads((out / "minimize.json").read_text())
    assert data["model"] == "full"
    assert data["converged"] is True
    assert data["grid_size"] == 1024
    assert data["E"] == pytest.approx(data["exchange"] + data["magnetostatic"],
                                      rel=1e-12)
    assert 0.2 < data["E"] < 0.6
    assert data["constraint_violation"] == 0.0
    assert data["narrow_regime"] is True
    prof = (out / "profile.csv").read_text().splitlines()
    assert prof[0] == "x1,phi,m1,m2,g"
    assert len(prof) == 1026
    trace = (out / "trace.csv").read_text().splitlines()
    assert trace[0] == "x,g"
    assert not (out / "FAILED").exists()


def test_minimize_linear_has_no_profile(tmp_path):
    cfg = SINGLE_WALL + "scales.epsilon = 0.01\ngrid.size = 1024\nmodel = linear\n"
    rc, out = run_cli(tmp_path, "minimize", cfg)
    assert rc == 0
    data = json.loads((out / "minimize.json").read_text())
    assert data["model"] == "linear" and data["solver"] == "cg"
    assert data["lam"] == pytest.approx(math.log(100.0))
    assert not (out / "profile.csv").exists()
    assert (out / "trace.csv").exists()


def test_core_products(tmp_path):
    cfg = "core.gamma = 1.0\ncore.epsilons = 1e-2, 6e-3, 3e-3, 1e-3, 6e-4\n"
    rc, out = run_cli(tmp_path, "core", cfg)
    assert rc == 0
    data = json.loads((out / "core.json").read_text())
    assert -0.6 < data["e_gamma"] < -0.35
    assert data["uncertainty"] >= 0.0
    rows = (out / "core.csv").read_text().splitlines()
    assert rows[0] == "epsilon,delta,infE,f"
    assert len(rows) == 6
    eps_col = [float(r.split(",")[0]) for r in rows[1:]]
    assert eps_col == sorted(eps_col, reverse=True)


def test_sweep_linear_tiny(tmp_path):
    cfg = (SINGLE_WALL + "model = linear\n"
           "ladder.epsilons = 1e-2, 6e-3, 3e-3\n")
    rc, out = run_cli(tmp_path, "sweep", cfg)
    assert rc == 0
    data = json.loads((out / "sweep.json").read_text())
    assert data["target_closed_form"] is None and data["pass"] is None
    assert abs(data["extrapolated"]) < 5.0
    rows = (out / "sweep.csv").read_text().splitlines()
    assert rows[0] == "epsilon,delta,E,Q"
    assert len(rows) == 4


def test_diff_linear_threads(tmp_path):
    cfg = (SINGLE_WALL.replace("walls.positions = 0.0", "walls.positions = 0.3")
           + "model = linear\n"
           "ladder.epsilons = 1e-2, 6e-3, 3e-3\n"
           "diff.positions_b = 0.0\n")
    rc, out = run_cli(tmp_path, "diff", cfg, extra=["--threads", "2"])
    assert rc == 0
    data = json.loads((out / "diff.json").read_text())
    assert isinstance(data["pass"], bool)
    assert data["target_closed_form"] == pytest.approx(0.14814286889095662, rel=1e-9)
    for csv_name in ("diff_a.csv", "diff_b.csv"):
        rows = (out / csv_name).read_text().splitlines()
        assert rows[0] == "epsilon,delta,E,Q" and len(rows) == 4


def test_unknown_subcommand_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate", "--out", str(tmp_path / "x")])
    assert exc.value.code == 2


def test_missing_required_key_fails_cleanly(tmp_path, capsys):
    rc, out = run_cli(tmp_path, "minimize", "scales.epsilon = 0.01\n")
    assert rc == 1
    assert "walls.alpha" in (out / "FAILED").read_text()
    man = json.loads((out / "manifest.json").read_text())
    assert man["failed"] is True and "walls.alpha" in man["error"]
    assert "FAILED" in capsys.readouterr().err


def test_unreadable_config_fails_cleanly(tmp_path):
    out = tmp_path / "run"
    rc = main(["renorm", "--config", str(tmp_path / "nope.cfg"), "--out", str(out)])
    assert rc == 1
    assert (out / "FAILED").exists()


def test_failed_marker_cleared_after_success(tmp_path):
    out = tmp_path / "same"
    bad = tmp_path / "bad.cfg"
    bad.write_text("walls.alpha = 1.0\n")
    assert main(["renorm", "--config", str(bad), "--out", str(out)]) == 1
    assert (out / "FAILED").exists()
    good = tmp_path / "good.cfg"
    good.write_text(GOLDEN_PAIR)
    assert main(["renorm", "--config", str(good), "--out", str(out)]) == 0
    assert not (out / "FAILED").exists()


def test_module_entry_point(tmp_path):
    cfg = tmp_path / "r.cfg"
    cfg.write_text(GOLDEN_PAIR)
    out = tmp_path / "run"
    proc = subprocess.run(
        [sys.executable, "-m", "neelwall", "renorm",
         "--config", str(cfg), "--out", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    assert (out / "renorm.json").exists()
    bad = subprocess.run([sys.executable, "-m", "neelwall", "bogus",
                          "--out", str(out)], capture_output=True, text=True)
    assert bad.returncode == 2
    assert "usage" in bad.stderr.lower()


def test_validate_suite_passes(tmp_path):
    rc, out = run_cli(tmp_path, "validate", None, extra=["--seed", "0"])
    assert rc == 0
    data = json.loads((out / "validate.json").read_text())
    assert data["all_passed"] is True
    assert len(data["checks"]) == 12
    names = {c["name"] for c in data["checks"]}
    assert {"mobius_invariance", "gaussian_energy", "three_route_spread",
            "cross_energy_quadrature_rel", "estar_quadrature_rel",
            "h1_decay_halving_ratio", "construction_bracket",
            "el_residual_rel", "winding_integer",
            "pohozaev_refinement_ratio"} <= names
    assert len(data["pohozaev_defects"]) == 3
