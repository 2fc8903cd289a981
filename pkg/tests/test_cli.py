from __future__ import annotations

import json
from pathlib import Path

import pytest

from opbar.cli import main
from opbar.operads import AssPlus, tabulate

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_normalize_contracts_and_round_trips(capsys, tmp_path):
    code, out, _ = run(capsys, "normalize", SAMPLES / "raw_com_z2.json")
    assert code == 0
    point = json.loads(out)
    # the zero internal edge is contracted, so the root vertex becomes ternary
    assert len(point["tree"]["children"]) == 3
    again = write(tmp_path, "canon.json", point)
    code, out2, _ = run(capsys, "normalize", again)
    assert code == 0 and out2 == out


def test_normalize_zero_leaf_branch(capsys):
    code, out, _ = run(capsys, "normalize", SAMPLES / "zero_leaf_branch.json")
    assert code == 0 and json.loads(out) == {"operad": "Com+", "basepoint": True, "leaves": [1, 2]}


def test_sigma_then_pi_is_byte_identical(capsys, tmp_path):
    _, canon, _ = run(capsys, "normalize", SAMPLES / "equivariant_com_z2.json")
    code, p, _ = run(capsys, "map", "sigma", SAMPLES / "equivariant_com_z2.json")
    assert code == 0
    code, back, _ = run(capsys, "map", "pi", write(tmp_path, "p.json", json.loads(p)))
    assert code == 0 and back == canon


def test_homotopy_endpoints(capsys, tmp_path):
    src = SAMPLES / "raw_com_z2.json"
    _, canon, _ = run(capsys, "normalize", src)
    code, h0, _ = run(capsys, "map", "H", src, "--s", "0")
    assert code == 0 and h0 == canon
    _, h1, _ = run(capsys, "map", "H", src, "--s", "1")
    _, x, _ = run(capsys, "map", "pi", src)
    _, sp, _ = run(capsys, "map", "sigma", write(tmp_path, "x.json", json.loads(x)))
    assert h1 == sp


def test_decompose_prints_a_pair(capsys):
    code, out, _ = run(capsys, "map", "decompose", SAMPLES / "raw_com_z2.json", "--A", "a,2,3", "--a", "a",
                       "--B", "1")
    assert code == 0
    pair = json.loads(out)
    # the upper factor is the leaf branch of 1 with its unary label, rescaled to total weight one
    assert len(pair) == 2
    assert pair[1]["tree"] == {"children": [{"leaf": 1, "weight": "2/3"}], "label": {"g": [1], "p": "c1"},
                               "weight": "1/3"}
    code, out, _ = run(capsys, "map", "decompose", SAMPLES / "equivariant_com_z2.json", "--A", "a", "--a", "a",
                       "--B", "1,2,3")
    assert code == 0 and all("zeta" in x for x in json.loads(out))


def test_usage_and_schema_errors(capsys, tmp_path):
    assert run(capsys, "normalize", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "normalize", bad)[0] == 2
    assert run(capsys, "normalize", write(tmp_path, "u.json", {"operad": "Nope", "tree": {}}))[0] == 2
    assert run(capsys, "map", "H", SAMPLES / "raw_com_z2.json")[0] == 2
    assert run(capsys, "map", "H", SAMPLES / "raw_com_z2.json", "--s", "3/2")[0] == 2
    assert run(capsys, "map", "sigma", SAMPLES / "raw_com_z2.json")[0] == 2
    assert run(capsys, "map", "pi", SAMPLES / "zero_leaf_branch.json")[0] == 2
    code, _, err = run(capsys, "map", "decompose", SAMPLES / "raw_com_z2.json", "--A", "a", "--a", "a",
                       "--B", "1")
    assert code == 2 and "error" in err
    assert run(capsys, "frobnicate")[0] == 2


def test_sign_rejects_groups_without_parity(capsys):
    # an odd element acting by a sign flip is not an action of Z/3 or S3
    for g in ("Z/3", "S3"):
        code, _, err = run(capsys, "check", "axioms", "--operad", "Sign", "--group", g)
        assert code == 2 and "even cyclic" in err
    assert run(capsys, "check", "axioms", "--operad", "Sign", "--group", "Z/4")[0] == 0


def test_check_vacuous_count(capsys):
    code, out, err = run(capsys, "check", "retraction", "--count", "0")
    assert code == 0 and "warning" in err and json.loads(out)["vacuous"] is True


def test_check_passes_and_honours_seed_env(capsys, monkeypatch):
    monkeypatch.setenv("OPBAR_SEED", "17")
    code, out, _ = run(capsys, "check", "retraction", "--count", "5", "--operad", "Com+", "--group", "Z/2")
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and records and all(r["verdict"] == "PASS" and r["seed"] == 17 for r in records)


def test_check_is_deterministic(capsys):
    args = ("check", "continuity", "--count", "1", "--operad", "Com+", "--group", "Z/2", "--seed", "3")
    first = run(capsys, *args)
    assert first[0] == 0 and first == run(capsys, *args)


def test_check_corrupted_table_fails_with_witness(capsys, tmp_path):
    table = tabulate(AssPlus(), 3).table_json()
    for row in table["compose"]:
        if row[0] == table["unit"] and row[2] == "[1, 2]":
            row[3] = "[2, 1]"
    spec = write(tmp_path, "table.json", table)
    code, out, _ = run(capsys, "check", "axioms", "--spec", spec)
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 1 and any(r["verdict"] == "FAIL" and r["witness"] for r in records)
    # the same table is refused as a --spec for other commands
    point = {"operad": "Ass+", "tree": {"weight": "1/2", "label": [1, 2],
                                        "children": [{"leaf": 1, "weight": "1/2"}, {"leaf": 2, "weight": "1/2"}]}}
    assert run(capsys, "normalize", write(tmp_path, "pt.json", point), "--spec", spec)[0] == 2


def test_render(capsys, tmp_path):
    code, out, _ = run(capsys, "render", SAMPLES / "zero_leaf_branch.json")
    assert code == 0 and "doublecircle" in out and out.count("->") == 0
    one = write(tmp_path, "one.json", {"operad": "Com+", "tree": {"leaf": 1, "weight": "1"}})
    code, out, _ = run(capsys, "render", one)
    assert code == 0 and out.count("->") == 1
    code, out, _ = run(capsys, "render", SAMPLES / "raw_com_z2.json")
    assert code == 0 and "shape=box" in out and "shape=circle" in out and "words" in out
    code, std, _ = run(capsys, "render", SAMPLES / "raw_com_z2.json", "--standard")
    assert code == 0 and 'label="0/1"' in std
    assert run(capsys, "render", SAMPLES / "zero_leaf_branch.json", "--standard")[0] == 2


@pytest.mark.parametrize("suite", ["marking", "arity1", "reduced"])
def test_other_suites_run(capsys, suite):
    code, out, _ = run(capsys, "check", suite, "--count", "3", "--operad", "Com+", "--group", "Z/2")
    assert code == 0 and out
