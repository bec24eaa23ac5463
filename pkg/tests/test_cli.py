import json

import numpy as np
import pytest

from harmonic_certify import ExponentialSum, SampleGrid, sample
from harmonic_certify.cli import main

REFERENCE = ExponentialSum((0.1, 0.3, 0.6, 0.9), (1.1, -1.1, 2.0, 2.0))


def write_samples_file(path, f, grid):
    vals = sample(f, grid)
    path.write_text(json.dumps({
        "grid": {"start": grid.start, "end": grid.end},
        "samples": [[v.real, v.imag] for v in vals],
    }))


def test_phi_eval_csv(tmp_path, capsys):
    out = tmp_path / "phi.csv"
    assert main(["phi", "eval", "--grid", "0:3:7", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,value_re,value_im"
    assert len(lines) == 8
    x, re, im = lines[4].split(",")  # x = 1.5
    assert float(x) == 1.5
    assert float(re) == pytest.approx(0.9006327434874469, rel=1e-12)
    assert float(im) == 0.0


def test_phi_eval_fourier_stdout(capsys):
    assert main(["phi", "eval", "--grid=-0.5:0.5:3", "--fourier"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "w,value_re,value_im"
    mid = lines[2].split(",")
    assert float(mid[1]) == pytest.approx(2.0)


def test_phi_eval_dilated(capsys):
    assert main(["phi", "eval", "--grid", "0:0:1", "--fourier", "--dilate", "20"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert float(lines[1].split(",")[1]) == pytest.approx(14.0)


def test_bounds_check_cli(tmp_path, capsys):
    config = tmp_path / "scenario.json"
    config.write_text(json.dumps({
        "check": "wellsep", "sum": REFERENCE.to_json(),
        "grid": {"start": -20, "end": 20}, "q": 0.2,
    }))
    out = tmp_path / "report.json"
    code = main(["bounds", "check", "--config", str(config), "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["holds"] is True
    line = capsys.readouterr().out.strip()
    assert line.endswith("true")
    assert len(line.split(",")) == 4


def test_bounds_suite_cli(tmp_path, capsys):
    out = tmp_path / "suite"
    code = main(["--seed", "3", "bounds", "suite", "--configs", "30",
                 "--out", str(out)])
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["failed"] == 0
    capsys.readouterr()
    code = main(["--seed", "3", "bounds", "suite", "--configs", "30",
                 "--perturb", "1.01", "--out", str(tmp_path / "bad")])
    assert code == 1


def test_vandermonde_verify_cli(tmp_path):
    config = tmp_path / "vdm.json"
    config.write_text(json.dumps({
        "frequencies": [0.1, 0.3, 0.6, 0.9], "rows": 41, "q": 0.2}))
    out = tmp_path / "vdm.csv"
    code = main(["vandermonde", "verify", "--mode", "separated",
                 "--config", str(config), "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "N,M,q,tau,sigma_min_sq,bound,ratio,holds"
    fields = lines[1].split(",")
    assert fields[0] == "41" and fields[-1] == "true"


def test_vandermonde_verify_pairs_cli(tmp_path):
    config = tmp_path / "pairs.json"
    config.write_text(json.dumps({
        "first": [0.2, 0.7], "second": [0.201, 0.701], "rows": 20, "q": 0.45}))
    out = tmp_path / "pairs.csv"
    code = main(["vandermonde", "verify", "--mode", "pairs",
                 "--config", str(config), "--out", str(out)])
    assert code == 0
    fields = out.read_text().splitlines()[1].split(",")
    assert float(fields[3]) == pytest.approx(1e-3, rel=1e-6)


def test_estimate_cli_round_trip(tmp_path):
    samples_file = tmp_path / "samples.json"
    write_samples_file(samples_file, REFERENCE, SampleGrid(-20, 20))
    out = tmp_path / "estimate.json"
    code = main(["estimate", "--in", str(samples_file), "--order", "4",
                 "--out", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    est = ExponentialSum.from_json(payload)
    assert np.allclose(est.frequencies, REFERENCE.frequencies, atol=1e-8)
    assert payload["residual_norm"] < 1e-9


def test_apost_cli(tmp_path):
    samples_file = tmp_path / "samples.json"
    write_samples_file(samples_file, REFERENCE, SampleGrid(-20, 20))
    estimate_file = tmp_path / "g.json"
    estimate_file.write_text(json.dumps(REFERENCE.to_json()))
    out = tmp_path / "cert.json"
    code = main(["apost", "--samples", str(samples_file),
                 "--estimate", str(estimate_file),
                 "--sigma", "0.01", "--delta", "0.9", "--out", str(out)])
    assert code == 0
    cert = json.loads(out.read_text())
    assert cert["verdict"] == "Certified"
    assert cert["success_probability"] == pytest.approx(0.9417, abs=1e-4)


def test_figure1_cli_deterministic(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "experiment": "figure1", "seed": 8, "trials": 6,
        "sigma_grid": [1e-3, 1e-2],
    }))
    code = main(["figure1", "--config", str(config), "--out", str(tmp_path / "a")])
    assert code == 0
    code = main(["figure1", "--config", str(config), "--out", str(tmp_path / "b")])
    assert code == 0
    assert (tmp_path / "a" / "figure1.csv").read_bytes() == \
        (tmp_path / "b" / "figure1.csv").read_bytes()


def test_sharpness_cli(tmp_path):
    code = main(["sharpness", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "sharpness.csv").read_text().splitlines()
    assert lines[0] == "tau,n,lhs_energy,rhs_weakened,ratio"
    assert len(lines) > 1


def test_vandermonde_sweep_cli(tmp_path):
    code = main(["vandermonde", "sweep", "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "vandermonde_sweep.csv").exists()


def test_bad_grid_argument():
    with pytest.raises(SystemExit):
        main(["phi", "eval", "--grid", "nope"])
