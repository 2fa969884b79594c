import hashlib
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from bures_geo import circuits, cli, geodesics

TESTS_DIR = Path(__file__).parent


def write_state(path, diag):
    mat = np.diag(diag)
    path.write_text(json.dumps({"n": len(diag), "re": mat.tolist(), "im": np.zeros_like(mat).tolist()}))
    return str(path)


@pytest.fixture
def pair_files(tmp_path):
    return write_state(tmp_path / "rho.json", [0.7, 0.3]), write_state(tmp_path / "sigma.json", [0.4, 0.6])


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_fidelity_of_identical_states(capsys, pair_files):
    code, out, _ = run(capsys, "fidelity", pair_files[0], pair_files[0], "--json")
    data = json.loads(out)
    assert code == 0
    assert data["fidelity"] == pytest.approx(1.0, abs=1e-12)
    assert data["bures_angle"] == pytest.approx(0.0, abs=1e-6)


def test_fidelity_of_fixture(capsys, pair_files):
    code, out, _ = run(capsys, "fidelity", *pair_files)
    values = dict(line.split() for line in out.strip().splitlines())
    assert code == 0
    assert float(values["fidelity"]) == pytest.approx(0.908998886412873, abs=1e-14)


def test_malformed_json_exits_2(capsys, tmp_path, pair_files):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "fidelity", bad, pair_files[1])
    assert code == 2
    assert "invalid JSON" in err


def test_missing_file_exits_2(capsys, tmp_path, pair_files):
    code, _, _ = run(capsys, "fidelity", tmp_path / "absent.json", pair_files[1])
    assert code == 2


def test_invalid_state_exits_2(capsys, tmp_path, pair_files):
    code, _, err = run(capsys, "fidelity", write_state(tmp_path / "neg.json", [1.2, -0.2]), pair_files[1])
    assert code == 2
    assert "NotPSD" in err


def test_geodesic_with_signs(capsys, pair_files):
    code, out, _ = run(capsys, "geodesic", *pair_files, "--signs", "++")
    spec = json.loads(out)["geodesics"][0]
    assert code == 0
    assert spec["theta_V"] == pytest.approx(0.306437383428909, abs=1e-12)
    assert "samples" not in spec


def test_geodesic_enumerate_with_samples_and_intersections(capsys, pair_files):
    code, out, _ = run(capsys, "geodesic", *pair_files, "--enumerate", "--samples", "5", "--intersections")
    specs = json.loads(out)["geodesics"]
    assert code == 0
    assert len(specs) == 4
    assert [s["theta_V"] for s in specs] == sorted(s["theta_V"] for s in specs)
    assert all(len(s["samples"]) == 5 and len(s["intersections"]) == 2 for s in specs)


def test_degenerate_lambda_prints_clusters(capsys, tmp_path):
    rho = write_state(tmp_path / "a.json", [0.6, 0.4])
    sigma = write_state(tmp_path / "b.json", [0.4, 0.6])
    code, _, err = run(capsys, "geodesic", rho, sigma, "--enumerate")
    assert code == 4
    assert "degenerate cluster" in err


def test_evolve_endpoints(capsys, pair_files):
    code, out, _ = run(capsys, "evolve", *pair_files, "--tau", "0")
    assert code == 0
    assert np.allclose(json.loads(out)["state"]["re"], np.diag([0.7, 0.3]), atol=1e-12)
    theta = geodesics.build_geodesic(np.diag([0.7, 0.3]), np.diag([0.4, 0.6]), "++").theta
    code, out, _ = run(capsys, "evolve", *pair_files, "--tau", repr(theta))
    assert np.allclose(json.loads(out)["state"]["re"], np.diag([0.4, 0.6]), atol=1e-9)


def test_evolve_circuit_round_trip(capsys, tmp_path, pair_files):
    target = tmp_path / "circuit.json"
    code, out, _ = run(capsys, "evolve", *pair_files, "--circuit", target, "--tau", "0.4")
    assert code == 0
    assert json.loads(out)["route_difference"] < 1e-8
    circ = circuits.Circuit.from_dict(json.loads(target.read_text()))
    spec = geodesics.build_geodesic(np.diag([0.7, 0.3]), np.diag([0.4, 0.6]), "++")
    assert np.allclose(circuits.output_state(circ, 2, 2), spec.evaluate(0.4).matrix, atol=1e-10)


def test_evolve_circuit_rejects_qutrits(capsys, tmp_path):
    rho = write_state(tmp_path / "a.json", [0.5, 0.3, 0.2])
    sigma = write_state(tmp_path / "b.json", [0.2, 0.2, 0.6])
    code, _, err = run(capsys, "evolve", rho, sigma, "--circuit", tmp_path / "c.json")
    assert code == 4
    assert "DimensionNotPowerOfTwo" in err


def _experiment_config(tmp_path, **extra):
    config = {
        "mode": "experiment",
        "family": {"kind": "geodesic", "rho": "rho.json", "sigma": "sigma.json", "signs": "++"},
        "x_true": 0.15,
        "n_meas": 10000,
        "replicates": 50,
    }
    config.update(extra)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def test_metrology_experiment_and_manifest(capsys, tmp_path, pair_files):
    config = _experiment_config(tmp_path)
    out_path, csv_path = tmp_path / "result.json", tmp_path / "result.csv"
    code, _, _ = run(capsys, "metrology", config, "--out", out_path, "--csv", csv_path)
    assert code == 0
    summary = json.loads(out_path.read_text())["summary"]
    assert 0.8 < summary["ratio"] < 1.2
    manifest = json.loads(Path(f"{out_path}.manifest.json").read_text())
    assert manifest["seed"] == 0
    assert manifest["config"]["seed"] == 0
    assert manifest["command"] == "metrology"
    assert len(csv_path.read_text().strip().splitlines()) == 51


def test_metrology_outputs_are_byte_identical(capsys, tmp_path, pair_files):
    config = _experiment_config(tmp_path, seed=11)
    digests = []
    for name in ("one", "two"):
        out_path, csv_path = tmp_path / f"{name}.json", tmp_path / f"{name}.csv"
        run(capsys, "metrology", config, "--out", out_path, "--csv", csv_path)
        digests.append(hashlib.sha256(out_path.read_bytes() + csv_path.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_metrology_heisenberg(capsys, tmp_path):
    path = tmp_path / "scan.json"
    path.write_text(json.dumps({"mode": "heisenberg", "counts": [1, 2, 3, 4]}))
    code, out, _ = run(capsys, "metrology", path)
    rows = json.loads(out)["rows"]
    assert code == 0
    assert [r["qfi"] for r in rows] == pytest.approx([1, 4, 9, 16], abs=1e-9)


def test_metrology_custom_family(capsys, tmp_path, monkeypatch):
    monkeypatch.syspath_prepend(str(TESTS_DIR))
    path = tmp_path / "custom.json"
    path.write_text(
        json.dumps(
            {
                "mode": "experiment",
                "family": {"kind": "custom", "callable": "custom_family:rotating_qubit"},
                "povm": "computational",
                "x_true": 0.9,
                "n_meas": 5000,
                "replicates": 30,
            }
        )
    )
    code, out, _ = run(capsys, "metrology", path)
    assert code == 0
    assert json.loads(out)["summary"]["delta_x"] > 0


def test_metrology_bad_config(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"mode": "experiment", "family": {"kind": "geodesic"}}))
    code, _, _ = run(capsys, "metrology", path)
    assert code == 2
    path.write_text(json.dumps({"mode": "unknown"}))
    assert run(capsys, "metrology", path)[0] == 2


def test_selfcheck_subset(capsys):
    code, out, _ = run(capsys, "selfcheck", "2", "9")
    assert code == 0
    assert "2/2 criteria passed" in out


def test_console_script_runs(pair_files):
    proc = subprocess.run(
        [sys.executable, "-m", "bures_geo.cli", "fidelity", *pair_files, "--json"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["fidelity"] == pytest.approx(0.908998886412873, abs=1e-14)
