import json
import math
import os
import subprocess

import pytest

import harnack_lab as hl


def test_heat_kernel_equality():
    value, trunc = hl.matrix_harnack_defect([0.3], 1.0)
    assert abs(value) < 1e-6
    assert trunc >= 0.0
    assert hl.log_solution([0.0], 1.0) == pytest.approx(-0.5 * math.log(4 * math.pi))


def test_two_sources_positive():
    sources = [(-1.0, 0.0, 1.0), (1.0, 0.0, 1.0)]
    li_yau, trace = hl.trace_defects([0.3], 0.7, sources)
    assert li_yau >= -1e-6 and trace >= -1e-6
    assert hl.classical_harnack_gap([0.0], 0.5, [1.0], 1.0, sources) >= -1e-10


def test_gauge_and_cone():
    circle = hl.circle_samples(1.0, 128)
    assert hl.gauge(circle, 3.0, 4.0) == pytest.approx(5.0, rel=1e-12)
    cone = hl.build_cone(circle, 2.0, 6.0, 61)
    assert cone.shape == (61, 61)
    assert cone[30, 60] == pytest.approx(12.0)


def test_circle_flow_and_path_energy():
    flow = hl.run_flow(hl.circle_samples(1.0, 128), 0.3, 1e-5)
    z = flow.harnack_Z(0.5, 0.25)
    assert z["Z"] == pytest.approx(4 * math.sqrt(2.0), abs=1e-4)
    assert hl.path_energy(flow, 1.0, 0.1, 1.0, 0.2, 50, 64) == pytest.approx(0.0, abs=1e-12)


def test_radial_expander():
    p = hl.radial_expander(1.0, 10.0)
    assert p["a"] > 0
    assert p["max_residual"] < 1e-6


def test_config_error():
    with pytest.raises(ValueError, match="flow.dt"):
        hl.run({"flow": {"dt": -1.0}})


def test_heat_report(tmp_path):
    report = hl.run({"experiment": "heat", "output": str(tmp_path), "stable_output": True,
                     "heat": {"dim": 1, "random_tuples": 200}})
    assert report["pass"]
    on_disk = json.loads((tmp_path / "report.json").read_text())
    assert on_disk == report


@pytest.mark.skipif(not os.environ.get("HARNACK_CLI"), reason="CLI not built")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["HARNACK_CLI"]
    ok = subprocess.run([cli, "heat", "--sources", "(-1,1);(1,1)", "--out", str(tmp_path)], capture_output=True)
    assert ok.returncode == 0
    bad = subprocess.run([cli, "csf", "--dt", "-1", "--out", str(tmp_path)], capture_output=True, text=True)
    assert bad.returncode == 2
    assert "flow.dt" in bad.stderr
