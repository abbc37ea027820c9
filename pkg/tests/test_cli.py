import json

import numpy as np
import pandas as pd
import pytest

import riesz_harness

from .paths import SHIPPED_CONFIG


def small_config(tmp_path, **changes):
    """The shipped configuration with some keys replaced."""
    changes = {"n_r": "4", "n_theta": "8", "r_max": "2.0", **changes}
    lines = []
    for line in SHIPPED_CONFIG.read_text(encoding="utf-8").splitlines():
        key = line.split("=")[0].strip()
        if "=" in line and not line.startswith(";") and key in changes:
            line = f"{key} = {changes[key]}"
        lines.append(line)
    path = tmp_path / "harness.ini"
    path.write_text("\n".join(lines), encoding="utf-8")
    return str(path)


def run(tmp_path, *command, config=None):
    out = tmp_path / "out"
    code = riesz_harness.main(["-nb", "-c", config or str(SHIPPED_CONFIG), "-o", str(out), *command])
    return code, out


def test_region_command(tmp_path):
    code, out = run(tmp_path, "region", "--delta", "0.5", "--point", "0.9", "0.1")
    assert code == 0
    table = pd.read_csv(out / "region.csv")
    assert table["label"].tolist() == ["point", "A", "B", "B'", "A'", "D"]
    assert table["membership"][0] == "interior"
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["command"] == "region"
    assert manifest["outputs"] == [str(out / "region.csv")]


def test_bessel_table_command(tmp_path):
    code, out = run(tmp_path, "bessel-table", "--nu", "0", "1", "--r", "1", "20")
    assert code == 0
    table = pd.read_csv(out / "bessel_table.csv")
    assert len(table) == 4
    assert table["method"].tolist() == ["series", "asymptotic", "series", "asymptotic"]
    assert np.all(table["err"] > 0)


def test_kernel_eval_command(tmp_path):
    code, out = run(tmp_path, "kernel-eval", "--delta", "-0.5", "--alpha", "0",
                    "--point", "1", "0", "2", "1", "--point", "0.5", "0", "0.5", "3")
    assert code == 0
    table = pd.read_csv(out / "kernel_eval.csv")
    assert len(table) == 2
    assert np.all(table["re_diff"] == 0.0)
    assert np.all(np.isfinite(table["re"]))


def test_kernel_eval_needs_points(tmp_path):
    with pytest.raises(SystemExit):
        run(tmp_path, "kernel-eval", "--delta", "-0.5")


def test_verify_command(tmp_path):
    code, out = run(tmp_path, "verify", "--suite", "ream1", "--suite", "ream2")
    assert code == 0
    table = pd.read_csv(out / "verify.csv")
    assert list(table.columns) == ["suite", "name", "parameters", "measured_constant", "samples", "threshold",
                                   "passed"]
    assert set(table["suite"]) == {"distance", "flux_tail"}
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["suites"] == {"distance": True, "flux_tail": True}
    assert manifest["passed"] is True


def test_failing_suite_sets_exit_code(tmp_path):
    config = small_config(tmp_path, ream2="0.5")
    code, out = run(tmp_path, "verify", "--suite", "flux_tail", config=config)
    assert code == 1
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["passed"] is False


def test_library_errors_exit(tmp_path):
    with pytest.raises(SystemExit):
        run(tmp_path, "region", "--delta", "2.0", "--point", "0.9", "0.1")
    assert (tmp_path / "out" / "manifest.json").exists()


def test_invalid_configuration_exits(tmp_path):
    config = small_config(tmp_path, n_theta="12")
    with pytest.raises(SystemExit):
        run(tmp_path, "region", "--delta", "0.5", "--point", "0.9", "0.1", config=config)


def test_apply_command(tmp_path):
    config = small_config(tmp_path)
    values = np.exp(-np.linspace(0.0, 2.0, 4))[:, None] * np.ones((4, 8))
    source = tmp_path / "input.npy"
    np.save(source, values.astype(complex))
    code, out = run(tmp_path, "apply", "--input", str(source), "--delta", "-0.5", "--alpha", "0", config=config)
    assert code == 0
    table = pd.read_csv(out / "apply.csv")
    assert len(table) == 32
    assert list(table.columns) == ["r", "theta", "re", "im", "err"]


def test_apply_rejects_wrong_size(tmp_path):
    config = small_config(tmp_path)
    source = tmp_path / "input.csv"
    pd.DataFrame({"re": np.ones(5), "im": np.zeros(5)}).to_csv(source, index=False)
    with pytest.raises(SystemExit):
        run(tmp_path, "apply", "--input", str(source), "--delta", "-0.5", config=config)


def test_stability_command(tmp_path):
    config = small_config(tmp_path, n_r="8", n_theta="16")
    code, out = run(tmp_path, "stability", "--lam", "2", "--q", "4.5", "--r", "3", "--orders", "2", "4",
                    config=config)
    assert code == 0
    table = pd.read_csv(out / "stability.csv")
    assert table["order"].tolist() == [2, 4]


def test_scaling_fit_pairs(tmp_path):
    code, out = run(tmp_path, "scaling-fit", "--delta", "-0.5", "--point", "0.9", "0.1", "--mode", "pairs",
                    "--alpha", "0", "--lambdas", "1", "2", "4")
    assert code == 0
    table = pd.read_csv(out / "scaling_fit.csv")
    assert table["target"][0] == pytest.approx(1.6)
    assert table["exponent"][0] == pytest.approx(1.6, abs=1e-6)
