import csv
import json
import os

import numpy as np
import pytest

from quadreg import io
from quadreg.cli import main
from quadreg.factors import QuadraticFactor, factor_to_dict
from quadreg.gf import group


def gen_set(tmp_path, name="set.json", kind="random", params=None, seed=0,
            p=3, n=2):
    out = tmp_path / name
    argv = ["gen", "--kind", kind, "--seed", str(seed), "--p", str(p),
            "--n", str(n), "--out", str(out)]
    if params is not None:
        argv += ["--params", json.dumps(params)]
    assert main(argv) == 0
    return out


def test_gen_deterministic(tmp_path):
    a = gen_set(tmp_path, "a.json", seed=5)
    b = gen_set(tmp_path, "b.json", seed=5)
    c = gen_set(tmp_path, "c.json", seed=6)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()
    d = io.load_json(a)
    assert d["p"] == 3 and d["n"] == 2 and d["kind"] == "indicator"


def test_gen_variety_roundtrip(tmp_path):
    path = gen_set(tmp_path, kind="quadratic-variety",
                   params={"M": [[1, 0], [0, 1]], "value": 2}, p=3, n=2)
    A, p, n = io.set_from_dict(io.load_json(path))
    B = QuadraticFactor(3, 2, [], [[[1, 0], [0, 1]]])
    assert np.array_equal(A, B.atom_indicator(((), (2,))))


def test_decompose_cylinder_end_to_end(tmp_path):
    s = gen_set(tmp_path, kind="quadratic-variety",
                params={"M": [[1, 0], [0, 1]], "value": 2}, p=3, n=2)
    out = tmp_path / "run"
    rc = main(["decompose", "--mode", "cylinder", "--set", str(s),
               "--delta", "0.4", "--out", str(out)])
    assert rc == 0
    assert (out / "partition.json").exists()
    with open(out / "trace.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows, "expected at least one step"
    assert set(rows[0]) == {"step", "kind", "index_before", "index_after",
                            "nonuniform_mass", "deletions", "witnesses"}
    # determinism: rerun produces identical partition bytes
    out2 = tmp_path / "run2"
    assert main(["decompose", "--mode", "cylinder", "--set", str(s),
                 "--delta", "0.4", "--out", str(out2)]) == 0
    assert (out / "partition.json").read_bytes() == \
        (out2 / "partition.json").read_bytes()


def test_decompose_global_mode(tmp_path):
    s = gen_set(tmp_path, kind="quadratic-variety",
                params={"M": [[1, 0], [0, 1]], "value": 2}, p=3, n=2)
    out = tmp_path / "glob"
    rc = main(["decompose", "--mode", "global", "--set", str(s),
               "--delta", "0.4", "--out", str(out)])
    assert rc == 0
    d = io.load_json(out / "partition.json")
    assert d["mode"] == "global"
    assert "factor" in d and "complexity" in d


def test_decompose_budget_exit_code(tmp_path):
    s = gen_set(tmp_path, kind="quadratic-variety",
                params={"M": [[1, 0], [0, 1]], "value": 2}, p=3, n=2)
    rc = main(["decompose", "--mode", "cylinder", "--set", str(s),
               "--delta", "0.4", "--max-steps", "0",
               "--out", str(tmp_path / "nope")])
    assert rc == 3


def test_vc2_command(tmp_path, capsys):
    s = gen_set(tmp_path, kind="quadratic-variety",
                params={"M": [[1, 0], [0, 1]], "value": 1}, p=3, n=2)
    assert main(["vc2", "--set", str(s), "--kmax", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert set(rep) == {"vc_dim", "vc2_dim", "saturated", "witnesses"}
    assert rep["vc2_dim"] <= 1  # impossible at n=2 (16 patterns > 9 points)


def test_chain_bounds_command(capsys):
    assert main(["chain-bounds", "--rho", "poly:2,2", "--length", "3",
                 "--tau-imax", "2", "--tau-xmax", "3"]) == 0
    out = capsys.readouterr().out
    assert "sigma,a,b" in out
    assert "tau_i,x,y,value" in out


def test_norms_command(tmp_path):
    B = QuadraticFactor(3, 2, [(1, 0)], [])
    fpath = tmp_path / "factor.json"
    io.save_json(fpath, factor_to_dict(B))
    g = group(3, 2)
    vals = np.random.default_rng(0).uniform(-1, 1, size=g.size)
    fn = tmp_path / "f.json"
    io.save_json(fn, io.function_to_dict(vals, 3, 2))
    out = tmp_path / "norms.csv"
    assert main(["norms", "--factor", str(fpath), "--function", str(fn),
                 "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 3  # one per label
    assert set(rows[0]) == {"label", "atom_size", "omega_count",
                            "omega_predicted", "normP8", "normTW8", "diff"}
    for r in rows:
        assert r["atom_size"] == "3"
        assert r["omega_count"] == "81"


def test_verify_quick_command(tmp_path, capsys):
    assert main(["verify", "--level", "quick", "--out", str(tmp_path)]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["ok"] is True
    assert (tmp_path / "size_diagnostics.csv").exists()
    assert (tmp_path / "norm_equivalence.csv").exists()
