import json
import math

import numpy as np
import pytest

from mixcs.cli import CONFIG_SCHEMAS, load_config, main
from mixcs.ensembles import MeasurementMatrix
from mixcs.errors import ValidationError
from mixcs.matrixio import load_csmat, save_csmat


def test_load_config_defaults():
    cfg = load_config("bench-sparsity", {})
    assert cfg["N"] == 256 and cfg["n"] == 100
    assert cfg["trials"] == 1000 and cfg["threshold"] == 1e-4
    assert cfg["ensembles"] == ["gaussian", "bernoulli", "s-mixed"]
    assert cfg["k_grid"] == [10, 20, 30, 40]


def test_load_config_rejects_unknown_key():
    with pytest.raises(ValidationError, match="wavelets"):
        load_config("bench-sparsity", {"wavelets": True})


def test_load_config_rejects_bad_value():
    with pytest.raises(ValidationError, match="'N'"):
        load_config("bench-sparsity", {"N": -1})
    with pytest.raises(ValidationError, match="'trials'"):
        load_config("bench-measurements", {"trials": 0})
    with pytest.raises(ValidationError, match="'k_grid'"):
        load_config("bench-sparsity", {"k_grid": [4, 2]})
    with pytest.raises(ValidationError, match="'threshold'"):
        load_config("bench-image", {"threshold": 1e-4})  # not in this schema


def test_load_config_round_trip(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"N": 32, "trials": 3}))
    cfg = load_config("bench-sparsity", str(cfg_path))
    assert cfg["N"] == 32 and cfg["trials"] == 3
    echoed = json.loads(json.dumps(cfg))
    assert echoed == cfg


def test_unknown_subcommand_exits_one(capsys):
    assert main(["frobnicate"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_no_command_exits_one(capsys):
    assert main([]) == 1


def test_gen_matrix_and_manifest(tmp_path, capsys):
    out = tmp_path / "m.csmat"
    rc = main(["gen-matrix", "--ensemble", "s-mixed", "--N", "64", "--n", "20",
               "--seed", "7", "--out", str(out)])
    assert rc == 0
    m = load_csmat(out)
    assert (m.n, m.N) == (20, 64)
    assert m.scaling == 1.0 / math.sqrt(20)
    manifest = json.loads((tmp_path / "m.csmat.manifest.json").read_text())
    assert manifest["command"] == "gen-matrix"
    assert manifest["master_seed"] == 7
    assert manifest["outputs"] == [str(out)]
    assert manifest["tool_version"]


def test_gen_matrix_validation_exit_code(tmp_path):
    rc = main(["gen-matrix", "--ensemble", "gaussian", "--N", "8", "--n", "0",
               "--out", str(tmp_path / "x.csmat")])
    assert rc == 1


def test_rip_identity_prints_zero(tmp_path, capsys):
    ident = MeasurementMatrix(np.eye(6))
    path = tmp_path / "eye.csmat"
    save_csmat(ident, path)
    rc = main(["rip", "--matrix", str(path), "--k", "2", "--exhaustive"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "delta = 0.0" in out


def test_rip_monte_carlo_csv(tmp_path):
    ident = MeasurementMatrix(np.eye(6))
    path = tmp_path / "eye.csmat"
    save_csmat(ident, path)
    out = tmp_path / "rip.csv"
    rc = main(["rip", "--matrix", str(path), "--k", "2", "--trials", "10",
               "--seed", "4", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("k,delta,method")
    assert lines[1].split(",")[2] == "monte-carlo"


def test_recover_roundtrip(tmp_path, capsys):
    rng = np.random.default_rng(3)
    A = rng.standard_normal((8, 20)) / math.sqrt(8)
    x0 = np.zeros(20)
    x0[[4, 11]] = [1.0, -1.0]
    mat = tmp_path / "phi.csmat"
    save_csmat(MeasurementMatrix(A, scaling=1.0), mat)
    yfile = tmp_path / "y.csv"
    yfile.write_text("\n".join(repr(float(v)) for v in A @ x0))
    out = tmp_path / "x.csv"
    rc = main(["recover", "--matrix", str(mat), "--y", str(yfile),
               "--tol", "1e-8", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# objective=")
    assert "status=converged" in lines[0]
    assert lines[1] == "index,value"
    nz = {int(row.split(",")[0]): float(row.split(",")[1]) for row in lines[2:]}
    assert abs(nz[4] - 1.0) < 1e-4 and abs(nz[11] + 1.0) < 1e-4


def test_recover_solver_error_exit_two(tmp_path):
    mat = tmp_path / "bad.csmat"
    save_csmat(MeasurementMatrix(np.ones((3, 6))), mat)  # rank deficient
    yfile = tmp_path / "y.csv"
    yfile.write_text("1.0\n1.0\n1.0\n")
    rc = main(["recover", "--matrix", str(mat), "--y", str(yfile),
               "--out", str(tmp_path / "o.csv")])
    assert rc == 2


def test_moments_output(capsys):
    rc = main(["moments", "--law", "bernoulli-sym", "--samples", "10000",
               "--seed", "1"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "fourth_moment=1.0" in out


def test_spectral_check_csv(tmp_path):
    out = tmp_path / "spec.csv"
    rc = main(["spectral-check", "--law", "bai-yin", "--n", "200", "--y", "0.25",
               "--seeds", "3", "--seed", "2", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,y,observed_min,observed_max,predicted_min,predicted_max,abs_deviation"
    assert len(lines) == 4
    assert (tmp_path / "spec.png").exists()
    manifest = json.loads((tmp_path / "spec.csv.manifest.json").read_text())
    assert len(manifest["outputs"]) == 2


def test_spectral_check_semicircle(tmp_path):
    out = tmp_path / "semi.csv"
    rc = main(["spectral-check", "--law", "semicircle", "--n", "150",
               "--offdiag-law", "three-point", "--seeds", "2", "--seed", "1",
               "--out", str(out)])
    assert rc == 0
    rows = out.read_text().splitlines()[1:]
    assert len(rows) == 2
    for row in rows:
        fields = row.split(",")
        assert fields[1] == "1.0"           # square symmetric case
        assert float(fields[5]) == 2.0      # predicted edge 2*sigma


def test_bench_sparsity_outputs_and_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv("MIXCS_JOBS", "1")
    cfg = {"ensembles": ["gaussian", "bernoulli"], "N": 24, "n": 12,
           "k_grid": [1, 2], "trials": 4, "master_seed": 9,
           "solver_max_iter": 2000}
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "bench.csv"
    rc = main(["bench-sparsity", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "ensemble,param,trials,successes,rate,mean_rel_error,mean_iterations"
    assert len(lines) == 5
    assert (tmp_path / "bench.png").exists()
    manifest = json.loads((tmp_path / "bench.csv.manifest.json").read_text())
    # manifest round-trip: rerunning from the embedded config reproduces bytes
    cfg2_path = tmp_path / "cfg2.json"
    cfg2_path.write_text(json.dumps(manifest["config"]))
    out2 = tmp_path / "bench2.csv"
    rc = main(["bench-sparsity", "--config", str(cfg2_path), "--out", str(out2)])
    assert rc == 0
    assert out.read_bytes() == out2.read_bytes()


def test_bench_sparsity_bad_config_exits_one(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"N": -1}))
    rc = main(["bench-sparsity", "--config", str(cfg_path),
               "--out", str(tmp_path / "b.csv")])
    assert rc == 1


def test_bench_measurements_tiny(tmp_path, monkeypatch):
    monkeypatch.setenv("MIXCS_JOBS", "1")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"ensembles": ["gaussian"], "N": 24, "k": 2,
                                    "n_grid": [12, 24], "trials": 4,
                                    "master_seed": 5, "solver_max_iter": 2000}))
    out = tmp_path / "meas.csv"
    rc = main(["bench-measurements", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    rows = out.read_text().splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["12", "24"]
    assert float(rows[-1].split(",")[4]) == 1.0  # square system always recovers


def test_bench_image_tiny(tmp_path, monkeypatch):
    monkeypatch.setenv("MIXCS_JOBS", "1")
    img = np.zeros((6, 6))
    img[1, 2] = 0.5
    img[4, 4] = 1.0
    from mixcs.imaging import write_pgm

    pgm = tmp_path / "in.pgm"
    write_pgm(pgm, img)
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({"ensembles": ["gaussian", "s-mixed"],
                                    "image": str(pgm), "n": 20, "master_seed": 3}))
    out = tmp_path / "img.csv"
    rc = main(["bench-image", "--config", str(cfg_path), "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "ensemble,n,N,sparsity,mse,iterations,status"
    assert len(lines) == 3
    assert all(float(row.split(",")[4]) < 1e-3 for row in lines[1:])
    assert (tmp_path / "img-gaussian.pgm").exists()
    assert (tmp_path / "img-s-mixed.pgm").exists()
    assert (tmp_path / "img.png").exists()
    manifest = json.loads((tmp_path / "img.csv.manifest.json").read_text())
    assert len(manifest["outputs"]) == 4


def test_env_jobs_validation(tmp_path, monkeypatch):
    monkeypatch.setenv("MIXCS_JOBS", "zero")
    rc = main(["bench-sparsity", "--out", str(tmp_path / "b.csv")])
    assert rc == 1
