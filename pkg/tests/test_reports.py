import json
import math

import numpy as np
import pandas as pd

from magnetic_riesz import BoundReport, Membership, RunManifest, bound_report_rows, write_csv


def test_write_csv_keeps_column_order(tmp_path):
    path = write_csv(tmp_path / "nested" / "table.csv", [{"b": 1, "a": 2.5}, {"b": 3, "a": -1.0}], ["a", "b"])
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["a", "b"]
    assert frame["b"].tolist() == [1, 3]


def test_bound_report_rows():
    reports = [BoundReport("decay", {"delta": -0.5, "alpha": np.float64(0.3)}, 1.5, 12, 3.0)]
    rows = bound_report_rows(reports)
    assert rows[0]["passed"] is True
    assert json.loads(rows[0]["parameters"]) == {"alpha": 0.3, "delta": -0.5}


def test_manifest_records_and_writes(tmp_path):
    manifest = RunManifest("verify", {"suites": ["distance"], "membership": Membership.INTERIOR},
                           {"grid": {"r_min": None}})
    manifest.record_error("kernel", 1e-12)
    manifest.record_error("kernel", 1e-10)
    manifest.record_error("kernel", None)
    manifest.record_error("operator", complex(1.0, 0.0).real)
    manifest.record_suite("distance", [BoundReport("ream1", {}, 1.0, 1, 1.000001)])
    manifest.record_suite("decay", [BoundReport("decay", {}, math.inf, 1, 3.0)])
    manifest.add_output(tmp_path / "verify.csv")
    manifest.lap("distance")
    assert manifest.errors["kernel"] == 1e-10
    assert not manifest.passed

    path = manifest.write(tmp_path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert path.name == "manifest.json"
    assert payload["command"] == "verify"
    assert payload["arguments"]["membership"] == "interior"
    assert payload["suites"] == {"distance": True, "decay": False}
    assert payload["passed"] is False
    assert "total" in payload["timings"] and "distance" in payload["timings"]
    assert payload["outputs"] == [str(tmp_path / "verify.csv")]


def test_manifest_plain_values(tmp_path):
    manifest = RunManifest("kernel-eval", {"value": complex(1.0, -2.0), "big": math.inf,
                                           "array": np.arange(3)}, {})
    payload = json.loads(manifest.write(tmp_path).read_text(encoding="utf-8"))
    assert payload["arguments"]["value"] == {"re": 1.0, "im": -2.0}
    assert payload["arguments"]["big"] == "inf"
    assert payload["arguments"]["array"] == [0, 1, 2]
    assert payload["passed"] is True
