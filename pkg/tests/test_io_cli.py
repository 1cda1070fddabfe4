import json

import numpy as np
import pytest
from conftest import one_var

from gaugekit import io
from gaugekit.cli import main
from gaugekit.errors import SchemaError
from gaugekit.instances import random_instance
from gaugekit.perspective import ConvexQuadratic
from gaugekit.model import BlockPartition, Problem, VectorGauge


def write_problem(path, prob):
    io.write(path, io.problem_to_dict(prob))
    return str(path)


def test_canonical_round_trip(rng):
    for _ in range(30):
        prob = random_instance(rng, n_max=6).prob
        text = io.dumps(io.problem_to_dict(prob))
        again = io.problem_from_dict(json.loads(text))
        assert io.dumps(io.problem_to_dict(again)) == text
        assert np.array_equal(again.A, prob.A) and np.array_equal(again.c, prob.c)


def test_seventeen_digits():
    assert io.dumps([0.1]) == "[0.10000000000000001]\n"
    assert io.dumps({"a": float("inf")}) == '{\n  "a": "inf"\n}\n'
    with pytest.raises(SchemaError):
        io.dumps([float("nan")])


def test_schema_errors():
    good = io.problem_to_dict(one_var())
    doc = json.loads(io.dumps(good))
    doc["blocks"][0]["indices"] = [0]
    with pytest.raises(SchemaError):
        io.problem_from_dict(doc)
    doc = json.loads(io.dumps(good))
    doc["dims"]["k"] = 2
    with pytest.raises(SchemaError):
        io.problem_from_dict(doc)
    doc = json.loads(io.dumps(good))
    doc["B"] = [[1.0]]
    with pytest.raises(SchemaError):
        io.problem_from_dict(doc)
    doc = json.loads(io.dumps(good))
    doc["kind"] = "other"
    with pytest.raises(SchemaError):
        io.problem_from_dict(doc)


def test_point_files():
    prob = one_var()
    pt = io.point_from_dict({"u": [1.0], "v": [], "lambda": [1.0], "mu": [], "x_bar_blocks": [[1.0]]}, prob)
    assert pt["dual"].u[0] == 1 and pt["lambda"][0] == 1
    with pytest.raises(SchemaError):
        io.point_from_dict({"x": [1.0, 2.0]}, prob)
    with pytest.raises(SchemaError):
        io.point_from_dict({"u": [1.0]}, prob)


def test_validate_command(tmp_path, capsys):
    path = write_problem(tmp_path / "p.json", one_var())
    assert main(["validate", path]) == 0
    assert "assumption3: satisfied" in capsys.readouterr().err
    neg = write_problem(tmp_path / "n.json", one_var(d=[-1.0]))
    assert main(["validate", neg]) == 1
    assert "assumption3: violated (d[1] = -1)" in capsys.readouterr().err
    doc = io.problem_to_dict(one_var())
    doc["n"], doc["blocks"] = 1, [{"indices": [1], "gauge": {"family": "pnorm", "params": {"n": 1, "p": 2}}},
                                  {"indices": [1], "gauge": {"family": "pnorm", "params": {"n": 1, "p": 2}}}]
    doc["dims"]["m"], doc["d"], doc["B"] = 2, [1, 1], [[0, 0]]
    io.write(tmp_path / "o.json", doc)
    assert main(["validate", str(tmp_path / "o.json")]) == 2
    (tmp_path / "junk.json").write_text("{not json")
    assert main(["validate", str(tmp_path / "junk.json")]) == 2


def test_dualize_command(tmp_path):
    path = write_problem(tmp_path / "p.json", one_var())
    assert main(["dualize", path, "--out", str(tmp_path / "d.json")]) == 0
    dual = io.read(tmp_path / "d.json")
    assert dual["kind"] == "dual" and dual["provenance"]["dual_of"] == io.file_hash(path)
    # constraint |u| <= 1: polar of the l1 norm on one coordinate
    assert dual["polar_blocks"][0]["gauge"]["params"]["p"] == "inf"
    assert main(["dualize", str(tmp_path / "d.json"), "--out", str(tmp_path / "e.json")]) == 0
    epi = io.read(tmp_path / "e.json")
    assert epi["kind"] == "epigraph" and epi["provenance"]["double_dual"] is True
    ep = io.epigraph_from_dict(epi)
    assert ep.objective(np.array([1.0, 1.0])) == 1


def test_pipeline_one_var(tmp_path):
    path = write_problem(tmp_path / "p.json", one_var())
    kkt = str(tmp_path / "kkt.json")
    assert main(["solve", path, "--point-out", kkt, "--out", str(tmp_path / "s.json")]) == 0
    assert main(["recover", path, kkt, "--point-out", str(tmp_path / "x.json"),
                 "--out", str(tmp_path / "r.json")]) == 0
    assert io.read(tmp_path / "r.json")["x"] == [1]
    assert main(["certify", path, str(tmp_path / "x.json"), "--out", str(tmp_path / "c.json")]) == 0
    rep = io.read(tmp_path / "c.json")
    assert rep["alignment_residual"] == 0 and rep["verdict"] is True
    io.write(tmp_path / "bad.json", {"x": [1.0], "u": [0.0], "v": []})
    assert main(["certify", path, str(tmp_path / "bad.json")]) == 1


def test_recover_reports_kkt_failure(tmp_path):
    path = write_problem(tmp_path / "p.json", one_var())
    io.write(tmp_path / "k.json", {"u": [1.0], "v": [], "lambda": [2.0], "mu": []})
    assert main(["recover", path, str(tmp_path / "k.json")]) == 1


def test_solve_oracle_command(tmp_path, capsys):
    path = write_problem(tmp_path / "p.json", one_var())
    assert main(["solve", path, "--method", "oracle", "--box", "3"]) == 0
    assert json.loads(capsys.readouterr().out)["objective"] == 1


def test_seed_env_override(tmp_path, monkeypatch, capsys):
    path = write_problem(tmp_path / "p.json", one_var())
    monkeypatch.setenv("GAUGEKIT_SEED", "7")
    assert main(["solve", path, "--seed", "3", "--iters", "50"]) == 0
    assert json.loads(capsys.readouterr().out)["seed"] == 7


def test_perspective_command(tmp_path):
    f = ConvexQuadratic([[1.0]], [0.0], 0.0)
    gauge = VectorGauge(BlockPartition.contiguous([1]), [f])
    prob = Problem.build(gauge, c=[0.0], d=[1.0], A=[[1.0]], b=[1.0], kind="convex")
    path = write_problem(tmp_path / "q.json", prob)
    out_p, out_d = str(tmp_path / "pp.json"), str(tmp_path / "pd.json")
    assert main(["perspective", path, "--out-primal", out_p, "--out-dual", out_d,
                 "--out", str(tmp_path / "rep.json")]) == 0
    lifted = io.read(out_p)
    assert lifted["provenance"]["perspective_of"] == io.file_hash(path)
    assert lifted["provenance"]["row_order"] == [["eq", 1], ["pin", 1]]
    assert io.read(out_d)["provenance"]["dual_of"] == io.file_hash(out_p)
    lp = io.load_problem(out_p)
    assert lp.n == 2 and lp.k == 2 and list(lp.b) == [1, 1]
    # negative block without anchors is an assumption failure
    neg = Problem.build(VectorGauge(BlockPartition.contiguous([1]), [ConvexQuadratic([[1.0]], [0.0], -1.0)]),
                        c=[0.0], d=[1.0], A=[[1.0]], b=[1.0], kind="convex")
    npath = write_problem(tmp_path / "neg.json", neg)
    assert main(["perspective", npath, "--out-primal", out_p, "--out-dual", out_d]) == 1
    io.write(tmp_path / "anchors.json", {"anchors": [[0.0]]})
    assert main(["perspective", npath, "--anchors", str(tmp_path / "anchors.json"),
                 "--out-primal", out_p, "--out-dual", out_d, "--out", str(tmp_path / "r2.json")]) == 0
    assert io.read(tmp_path / "r2.json")["offset"] == -1
