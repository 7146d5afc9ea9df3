"""The experiment runner: configs, CSV schema, exit codes, determinism."""

import json

import pytest

from dilatation_lab.cli import main, run


def write_config(tmp_path, name, config):
    path = tmp_path / name
    path.write_text(json.dumps(config))
    return str(path)


def read_csv(path):
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    rows = [l.split(",") for l in lines[1:] if not l.startswith("#")]
    meta = dict(l[2:].split("=", 1) for l in lines if l.startswith("# "))
    return header, rows, meta


def test_axioms_command_euclid(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "axioms", "which": "A4", "seed": 7,
        "ks": [2, 3, 4, 5, 6], "sample_count": 8,
    })
    out = tmp_path / "out.csv"
    assert run(cfg, str(out), quiet=True) == 0
    header, rows, meta = read_csv(out)
    assert header == ["axiom", "nu", "defect", "pass"]
    assert len(rows) == 5
    assert all(r[0] == "A4" and r[3] == "pass" for r in rows)
    assert meta["verdict"] == "pass"
    assert meta["model"] == "euclidean"
    assert len(meta["config_sha256"]) == 64


def test_menelaos_command_heisenberg(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "heisenberg", "n": 1},
        "command": "menelaos",
        "x": [1.0, 0.0, 0.0], "y": [0.0, 1.0, 0.0], "eps": 0.5, "mu": 0.5,
    })
    out = tmp_path / "m.csv"
    assert run(cfg, str(out), quiet=True) == 0
    header, rows, meta = read_csv(out)
    assert header[:4] == ["iterations", "residual", "contraction_rate", "probe_defect"]
    w = [float(v) for v in rows[0][4:]]
    assert abs(w[0] - 2 / 3) < 1e-9 and abs(w[1] - 1 / 3) < 1e-9
    assert abs(w[2] - 1 / 15) < 1e-9


def test_ratio_command_cross_validates(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "heisenberg", "n": 1},
        "command": "ratio",
        "x": [1.0, 0.0, 0.0], "y": [0.0, 1.0, 0.0], "eps": 0.5, "mu": 0.5, "N": 64,
    })
    out = tmp_path / "r.csv"
    assert run(cfg, str(out), quiet=True) == 0
    header, rows, meta = read_csv(out)
    assert header == ["oracle_a", "oracle_b", "disagreement"]
    assert len(rows) == 6  # four oracles pairwise
    assert float(meta["max_disagreement"]) <= 1e-9


def test_linscan_command_pullback(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "pullback", "base": {"model": "euclidean", "n": 2},
                  "chart": "cubic"},
        "command": "linscan",
        "x": [0.0, 0.0], "y": [0.2, 0.0], "z": [0.0, 0.2],
        "ks": [3, 4, 5, 6, 7, 8, 9, 10],
    })
    out = tmp_path / "l.csv"
    assert run(cfg, str(out), quiet=True) == 0
    header, rows, _ = read_csv(out)
    assert header == ["nu", "lin_over_eps_sq"]
    vals = [float(r[1]) for r in rows]
    assert vals[-1] < 0.1 * vals[0]


def test_barycentric_command_euclid_zero(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "barycentric", "eps": 0.5, "seed": 3, "sample_count": 8,
    })
    out = tmp_path / "b.csv"
    assert run(cfg, str(out), quiet=True) == 0
    _, rows, _ = read_csv(out)
    assert all(float(r[1]) <= 1e-12 for r in rows)


def test_barycentric_command_heisenberg_fails(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "heisenberg", "n": 1},
        "command": "barycentric", "eps": 0.5,
        "x": [0.0, 0.0, 0.0], "y": [0.0, 0.0, 1.0],
    })
    out = tmp_path / "b.csv"
    assert run(cfg, str(out), quiet=True) == 2
    _, rows, meta = read_csv(out)
    assert meta["verdict"] == "fail"
    assert abs(float(rows[0][1]) - 2 ** 0.5) < 1e-9


def test_counterexample_command(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "complex_heisenberg"},
        "command": "counterexample", "eps": 0.5, "Y": [1.0, 0.0, 1.0], "seed": 5,
    })
    out = tmp_path / "x.csv"
    assert run(cfg, str(out), quiet=True) == 0
    _, rows, _ = read_csv(out)
    by_case = {r[0]: float(r[1]) for r in rows}
    assert by_case["eps_mu_minus_one"] > 1e-6
    assert by_case["eps_mu_plus_one"] <= 1e-9


def test_affinemap_command(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "affinemap", "seed": 11,
        "map": {"type": "linear", "matrix": [[1.0, 2.0], [0.0, 1.0]],
                "offset": [0.5, -0.5]},
    })
    assert run(cfg, str(tmp_path / "a.csv"), quiet=True) == 0
    bad = write_config(tmp_path, "bad.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "affinemap", "seed": 11,
        "map": {"type": "componentwise_cubic"},
    })
    assert run(bad, str(tmp_path / "a2.csv"), quiet=True) == 2


def test_tangent_command(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 1},
        "command": "tangent", "which": "sum",
        "x": [0.0], "u": [2.0], "v": [3.0],
    })
    out = tmp_path / "t.csv"
    assert run(cfg, str(out), quiet=True) == 0
    _, _, meta = read_csv(out)
    assert abs(float(meta["limit"]) - 5.0) < 1e-12


def test_unknown_field_rejected(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "axioms", "seed": 1, "bogus": True,
    })
    assert run(cfg, quiet=True) == 1


def test_missing_seed_rejected_for_randomized(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "axioms",
    })
    assert run(cfg, quiet=True) == 1


def test_malformed_json_is_an_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    assert run(str(path), quiet=True) == 1


def test_bad_parameter_values_are_errors(tmp_path):
    # a float scale on the dyadic group is a validation failure, exit 1
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "dyadic", "precision": 64},
        "command": "menelaos", "x": 1, "y": 3, "eps": 0.5, "mu": 0.5,
    })
    assert run(cfg, quiet=True) == 1
    missing = write_config(tmp_path, "m.json", {
        "model": {"model": "euclidean", "n": 1},
        "command": "menelaos", "x": [0.0], "eps": 0.5, "mu": 0.5,
    })
    assert run(missing, quiet=True) == 1


def test_bad_model_is_an_error(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "carnot", "step": 9, "layers": [1], "brackets": []},
        "command": "menelaos", "x": [0.0], "y": [1.0], "eps": 0.5, "mu": 0.5,
    })
    assert run(cfg, quiet=True) == 1


def test_seed_override_changes_hash(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 2},
        "command": "axioms", "which": "A1", "seed": 1, "ks": [2, 3, 4, 5],
        "sample_count": 4,
    })
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(cfg, str(a), seed_override=1, quiet=True) == 0
    assert run(cfg, str(b), seed_override=2, quiet=True) == 0
    ha = read_csv(a)[2]["config_sha256"]
    hb = read_csv(b)[2]["config_sha256"]
    assert ha != hb


def test_byte_identical_reruns(tmp_path):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "heisenberg", "n": 1},
        "command": "axioms", "which": "all", "seed": 7,
        "ks": [2, 3, 4, 5, 6, 7], "sample_count": 8,
    })
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(cfg, str(a), quiet=True) == 0
    assert run(cfg, str(b), quiet=True) == 0
    assert a.read_bytes() == b.read_bytes()


def test_negative_finding_reported_as_rows(tmp_path):
    # a stalled iteration is data, not a crash: rows plus exit 2
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 1},
        "command": "menelaos", "x": [0.0], "y": [50.0],
        "eps": 0.9, "mu": 0.9, "max_iter": 3,
    })
    out = tmp_path / "n.csv"
    assert run(cfg, str(out), quiet=True) == 2
    header, rows, meta = read_csv(out)
    assert header == ["finding"]
    assert "MaxIterExceeded" in rows[0][0]
    assert meta["verdict"] == "fail"


def test_main_entry_point(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 1},
        "command": "menelaos", "x": [0.0], "y": [1.0], "eps": 0.5, "mu": 0.5,
    })
    out = tmp_path / "m.csv"
    code = main(["run", cfg, "--out", str(out), "--quiet"])
    assert code == 0
    assert out.exists()


def test_threads_env_validation(tmp_path, monkeypatch):
    monkeypatch.setenv("DILATATION_LAB_THREADS", "zebra")
    cfg = write_config(tmp_path, "c.json", {
        "model": {"model": "euclidean", "n": 1},
        "command": "menelaos", "x": [0.0], "y": [1.0], "eps": 0.5, "mu": 0.5,
    })
    assert run(cfg, quiet=True) == 1
    monkeypatch.setenv("DILATATION_LAB_THREADS", "4")
    assert run(cfg, quiet=True) in (0,)
