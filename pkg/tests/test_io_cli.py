import json

import numpy as np
import pytest

from qhloc import cli, io
from qhloc.errors import ParameterError


def run(tmp_path, *argv):
    return cli.main(list(argv) + ["--out", str(tmp_path)])


def test_matrix_round_trip_bit_exact(rng, tmp_path):
    a = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
    a[0, 0] = np.nextafter(1.0, 2.0) + 1j * 5e-324
    for fmt in ("json", "csv"):
        path = io.write_matrix(tmp_path / f"m.{fmt}", a, fmt, {"provenance": {"seed": 1}})
        b = io.read_matrix(path)
        assert b.shape == a.shape and np.array_equal(a.view(float), b.view(float))


def test_matrix_format_errors(tmp_path):
    with pytest.raises(ParameterError):
        io.matrix_from_dict({"rows": 2, "cols": 2, "data": [[1, 0]]})
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ParameterError):
        io.read_matrix(tmp_path / "bad.json")


def test_dumps_fixed_digits():
    assert io.dumps({"x": 0.1, "k": [1, True, None]}) == '{"x": 1.0000000000000001e-01, "k": [1, true, null]}\n'


def test_model_command(tmp_path, capsys):
    assert run(tmp_path, "model", "--model", "xx", "--n", "4", "--gamma", "0", "1") == 0
    g = io.read_matrix(tmp_path / "Gamma.json")
    assert g[0, 0] == 1j and g[3, 3] == -1j
    body = json.loads((tmp_path / "M.json").read_text())
    assert set(body["provenance"]) == {"tool_version", "config_hash", "seed"}
    assert run(tmp_path, "model", "--model", "farthest", "--n", "5", "--gamma", "0", "0.5") == 0
    m = io.read_matrix(tmp_path / "M.json")
    assert m[0, 1] == -0.5j and m[0, 2] == -0.25 and m[0, 4] == 0.0625


def test_model_validation_error(tmp_path, capsys):
    assert run(tmp_path, "model", "--model", "nearest", "--n", "3") == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ModelDomainError"


def test_scan_command(tmp_path, capsys):
    code = run(tmp_path, "scan", "--model", "nearest", "--n", "4", "--gamma", "0", "0.5", "--predicate", "parity")
    assert code == 0
    assert "agree: 15/15" in capsys.readouterr().out
    lines = (tmp_path / "scan.jsonl").read_text().splitlines()
    assert "provenance" in json.loads(lines[0]) and len(lines) == 16
    assert run(tmp_path, "scan", "--model", "diagonal", "--n", "3", "--format", "csv") == 0
    rows = [l for l in (tmp_path / "scan.csv").read_text().splitlines() if not l.startswith("#")]
    assert len(rows) == 8 and all(",True," in r for r in rows[1:])
    assert run(tmp_path, "scan", "--model", "farthest", "--n", "25") == 2
    # the connected family is allowed past the cap
    assert run(tmp_path, "scan", "--model", "farthest", "--n", "13", "--gamma", "0", "2", "--family", "connected", "--predicate", "conds") == 0


def test_scan_disagreement_exit(tmp_path):
    # the unit-disk predicate applied to a |gamma| != 1 metric disagrees somewhere
    assert run(tmp_path, "scan", "--model", "farthest", "--n", "5", "--gamma", "0", "2", "--predicate", "unit-disk") == 3


def test_verify_command(tmp_path, capsys):
    assert run(tmp_path, "verify", "--model", "farthest", "--n", "4", "--gamma", "0", "0.5") == 0
    assert "15/15 subsets agree" in capsys.readouterr().out
    assert run(tmp_path, "verify", "--model", "diagonal", "--n", "2") == 0
    bad = tmp_path / "bad.json"
    io.write_matrix(bad, np.array([[1, 2], [0, 1]]))
    assert run(tmp_path, "verify", "--model", "file", "--metric-file", str(bad)) == 1
    assert run(tmp_path, "verify", "--model", "diagonal", "--n", "8") == 2


def test_schmidt_command(tmp_path, capsys):
    assert run(tmp_path, "schmidt", "--metric", "eta_max") == 0
    out = json.loads(capsys.readouterr().out)
    assert out == {"schmidt_number": 10, "local_observables": True, "seed": 0}
    rep = json.loads((tmp_path / "schmidt.json").read_text())
    assert rep["reduction_blocks"] is not None and len(rep["chi"]) == 16
    a, b = np.diag([1.0, 2.0]), np.diag([3.0, 1.0, 2.0])
    path = io.write_matrix(tmp_path / "t.json", np.kron(a, b))
    assert run(tmp_path, "schmidt", "--metric", "file", "--metric-file", str(path), "--dims", "2", "3", "--dump-factors") == 0
    assert json.loads(capsys.readouterr().out)["schmidt_number"] == 1
    assert (tmp_path / "factor_A_0.json").exists()


def test_spectrum_command(tmp_path):
    assert run(tmp_path, "spectrum", "--model", "nearest", "--n", "4", "--im-gamma", "0", "2", "9", "--format", "csv") == 0
    rows = [l.split(",") for l in (tmp_path / "spectrum.csv").read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == ["im_gamma", "class", "max_abs_imag", "max_abs_real", "diagonalizable", "distinct"]
    classes = {float(r[0]): r[1] for r in rows[1:]}
    assert classes[0.75] == "unbroken" and classes[1.0] == "exceptional" and classes[1.25] != "unbroken"
    assert run(tmp_path, "spectrum", "--model", "xx", "--n", "5", "--re-gamma", "-2", "2", "5", "--gamma", "0", "0") == 0
    rows = (tmp_path / "spectrum.jsonl").read_text().splitlines()[1:]
    assert all(json.loads(r)["class"] == "unbroken" for r in rows)


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"model": "nearest", "n": 4, "gamma": [0, 0.5], "predicate": "parity"}))
    assert cli.main(["scan", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert "agree: 15/15" in capsys.readouterr().out
    # flags win over the file
    assert cli.main(["scan", "--config", str(cfg), "--n", "6", "--m", "3", "--out", str(tmp_path)]) == 0
    assert "agree: 63/63" in capsys.readouterr().out
    cfg.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["scan", "--config", str(cfg)]) == 1
    cfg.write_text(json.dumps({"tol_rank": -1}))
    assert cli.main(["scan", "--config", str(cfg)]) == 1


def test_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        cli.main(["schmidt", "--metric", "tensor", "--seed", "7", "--out", str(d)])
        cli.main(["scan", "--model", "farthest", "--n", "5", "--out", str(d), "--jobs", "1" if d == a else "4"])
    assert (a / "schmidt.json").read_bytes() == (b / "schmidt.json").read_bytes()
    assert (a / "scan.jsonl").read_bytes() == (b / "scan.jsonl").read_bytes()
