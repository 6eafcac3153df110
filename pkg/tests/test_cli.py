import json
from pathlib import Path

import pytest

from conftest import needs_z3
from petrismt.cli import main
from petrismt.encoder import parse_smtlib

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def pair_net(tmp_path):
    path = tmp_path / "pair.pnet"
    path.write_text("net pair\nplaces p1 p2\nmarking p1 p2\n")
    return path


@pytest.fixture
def triangle_net(tmp_path):
    path = tmp_path / "tri.pnet"
    path.write_text("net tri\nplaces a b c\nmarking a b c\n")
    return path


def test_encode_writes_named_file(pair_net, tmp_path, capsys):
    out = tmp_path / "out"
    out.mkdir()
    assert main(["encode", str(pair_net), "--fragment", "qf_dt", "--units", "2", "--out", str(out)]) == 0
    written = out / "pair_QF_DT_n2.smt2"
    assert capsys.readouterr().out.strip() == str(written)
    assert len(parse_smtlib(written.read_text()).assertions) == 2


def test_encode_is_reproducible(pair_net, tmp_path):
    texts = []
    for d in ("a", "b"):
        out = tmp_path / d
        out.mkdir()
        main(["encode", str(pair_net), "--fragment", "qf_ufbv", "--units", "3", "--status-hint", "--out", str(out)])
        texts.append((out / "pair_QF_UFBV_n3.smt2").read_bytes())
    assert texts[0] == texts[1]
    assert b"(set-info :status sat)" in texts[0]


def test_encode_min_units(triangle_net, capsys):
    assert main(["encode", str(triangle_net), "--fragment", "qf_idl", "--min-units", "--out", "-"]) == 0
    assert "(set-logic QF_IDL)" in capsys.readouterr().out


def test_encode_without_fragment_is_usage_error(pair_net):
    with pytest.raises(SystemExit) as info:
        main(["encode", str(pair_net), "--units", "2"])
    assert info.value.code == 2


def test_encode_needs_units(pair_net):
    with pytest.raises(SystemExit) as info:
        main(["encode", str(pair_net), "--fragment", "qf_bv"])
    assert info.value.code == 2


def test_oracle_triangle(triangle_net, capsys):
    assert main(["oracle", str(triangle_net), "--units", "2"]) == 0
    assert capsys.readouterr().out == "unsat\n"
    assert main(["oracle", str(triangle_net), "--units", "3", "--fragment", "qf_ufbv"]) == 0
    assert capsys.readouterr().out == "sat\n"


def test_relation_and_conc_input(tmp_path, capsys):
    net = DATA / "fork.pnet"
    assert main(["relation", str(net)]) == 0
    assert capsys.readouterr().out == "p1 p2\n"
    conc = tmp_path / "fork.conc"
    conc.write_text("p0 p1\n")
    assert main(["oracle", str(net), "--conc", str(conc), "--units", "1"]) == 0
    assert capsys.readouterr().out == "unsat\n"


def test_unsafe_net_is_domain_error(tmp_path, capsys):
    bad = tmp_path / "bad.pnet"
    bad.write_text("places p1 p2\ntransition t: p1 -> p2\nmarking p1 p2\n")
    assert main(["relation", str(bad)]) == 1
    assert "second token" in capsys.readouterr().err


def test_min_units_with_check(capsys):
    assert main(["min-units", str(DATA / "philosophers.pnet"), "--check"]) == 0
    assert capsys.readouterr().out == "4\n"


def test_stats_table(pair_net, tmp_path, capsys):
    main(["encode", str(pair_net), "--fragment", "qf_bv", "--units", "2", "--out", str(tmp_path)])
    capsys.readouterr()
    assert main(["stats", str(tmp_path / "pair_QF_BV_n2.smt2")]) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.split("\t")[1:] == ["logic", "#variables", "card", "card_in", "card_out", "#asserts", "#ops"]
    assert row.split("\t")[1:] == ["QF_BV", "2", "2^2", "-", "-", "3", "9"]


def test_decompose_from_model_file(pair_net, tmp_path, capsys):
    model = tmp_path / "m.txt"
    model.write_text("sat\n((define-fun x_p1 () Int 1) (define-fun x_p2 () Int 2))\n")
    args = ["decompose", str(pair_net), "--fragment", "qf_idl", "--units", "2", "--model", str(model)]
    assert main(args) == 0
    assert capsys.readouterr().out == "root\nunit u1: p1\nunit u2: p2\n"


def test_decompose_rejects_bad_model(pair_net, tmp_path, capsys):
    model = tmp_path / "m.txt"
    model.write_text("((define-fun x_p1 () Int 1) (define-fun x_p2 () Int 1))\n")
    args = ["decompose", str(pair_net), "--fragment", "qf_idl", "--units", "2", "--model", str(model)]
    assert main(args) == 1
    assert capsys.readouterr().out == ""
    model.write_text("((define-fun x_p1 () Int 1))\n")
    assert main(args) == 1


def test_select(tmp_path, capsys):
    records = tmp_path / "r.csv"
    rows = ["formula,fragment,status,solver,time_s,file_size"]
    rows += [f"f{i},QF_DT,unsat,z3,{60 + i},{i}" for i in range(5)]
    records.write_text("\n".join(rows) + "\n")
    out = tmp_path / "sel.csv"
    assert main(["select", str(records), "--target", "3", "--out", str(out)]) == 0
    assert out.read_text() == "formula,class,rank\nf0,1,1\nf1,1,2\nf2,1,3\n"
    assert "QF_DT UNSAT: 3 chosen from 1 classes (5 eligible)" in capsys.readouterr().out


def test_solve_with_stub(tmp_path, monkeypatch, capsys):
    stub = tmp_path / "fake"
    stub.write_text("#!/bin/sh\necho unsat\n")
    stub.chmod(0o755)
    monkeypatch.setenv("SOLVER_PATH", str(tmp_path))
    cfg = tmp_path / "s.json"
    cfg.write_text(json.dumps([{"name": "fake", "command": ["fake", "{file}"], "timeout": 5}]))
    f = tmp_path / "x.smt2"
    f.write_text("(set-logic QF_BV)\n(check-sat)\n")
    assert main(["solve", str(f), "--solvers", str(cfg), "--jobs", "2"]) == 0
    path, name, status, _ = capsys.readouterr().out.split("\t")
    assert (path, name, status) == (str(f), "fake", "unsat")


@needs_z3
def test_decompose_with_real_solver(capsys):
    args = ["decompose", str(DATA / "philosophers.pnet"), "--fragment", "qf_bv", "--units", "4",
            "--solvers", str(DATA / "solvers.json")]
    assert main(args) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "root" and 1 <= len(lines) - 1 <= 4


@needs_z3
def test_min_units_with_real_solver(capsys):
    args = ["min-units", str(DATA / "philosophers.pnet"), "--fragment", "qf_ufdt",
            "--solvers", str(DATA / "solvers.json"), "--check"]
    assert main(args) == 0
    assert capsys.readouterr().out == "4\n"
