from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

import freediv.cli as cli
from freediv.cli import EXIT_CONDITION, EXIT_FAIL, EXIT_OK, EXIT_USAGE, GRID, SCHEMA, run, verify_one


def call(*argv):
    code, text = run(list(argv))
    return code, json.loads(text)


def write_matrix(tmp_path, name, rows):
    entries = [[float(x), 0.0] for row in rows for x in row]
    p = tmp_path / name
    p.write_text(json.dumps({"rows": len(rows), "cols": len(rows[0]), "entries": entries}))
    return str(p)


def test_verify_sym_4():
    code, out = call("verify", "--family", "sym", "--m", "4")
    assert code == EXIT_OK and out["classification"] == "free" and out["ok"]
    assert out["schema"] == SCHEMA


def test_verify_gen_lu_3():
    code, out = call("verify", "--family", "gen-lu", "--m", "3")
    assert code == EXIT_OK and out["classification"] == "free-star"


def test_tower_gen_sym_3():
    code, out = call("tower-gen", "--family", "sym", "--m", "3")
    assert code == EXIT_OK
    report = out["report"]
    assert set(report) == {
        "family", "m", "determinant", "blocks", "squarefree", "pairwise_coprime",
        "classification", "paper_match", "constant",
    }
    assert report["family"] == "sym" and report["classification"] == "free"
    assert [b["label"] for b in report["blocks"]] == ["p1", "p2", "p3"]
    assert out["saito_matrix"]["rows"] == 6


def test_bracket_table_nonlinear_5():
    code, out = call("bracket-table", "--family", "skew-nonlinear", "--m", "5")
    assert code == EXIT_OK and out["closed"] and out["discrepancies"] == 0
    assert len(out["pairs"]) == 10 * 10


def test_factor_lu(tmp_path):
    path = write_matrix(tmp_path, "A.json", [[1, 2], [3, 4]])
    code, out = call("factor", "--type", "lu", "--input", path)
    assert code == EXIT_OK
    f = out["factorization"]
    assert f["kind"] == "lu" and f["residual"] == 0.0
    assert f["factors"]["B"]["entries"] == [[1.0, 0.0], [0.0, 0.0], [3.0, 0.0], [-2.0, 0.0]]


def test_factor_singular_exit_3(tmp_path):
    path = write_matrix(tmp_path, "singular.json", [[0, 1], [1, 2]])
    code, out = call("factor", "--type", "cholesky", "--input", path)
    assert code == EXIT_CONDITION and out["minor"] == "detA1"


def test_conditions_mod_lu(tmp_path):
    path = write_matrix(tmp_path, "A.json", [[1, 1], [0, 1]])
    code, out = call("conditions", "--type", "mod-lu", "--input", path)
    assert code == EXIT_OK
    assert [c["minor"] for c in out["minors"]] == ["detA1", "detA2", "detAhat1"]


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["verify", "--family", "sym"],
        ["verify", "--family", "nope", "--m", "3"],
        ["verify", "--family", "sym-restrict-2", "--m", "3"],
        ["verify", "--family", "sym", "--m", "3", "--bogus"],
        ["factor", "--type", "lu"],
        ["factor", "--type", "lu", "--input", "/nonexistent/A.json"],
    ],
)
def test_usage_errors(argv):
    code, out = call(*argv)
    assert code == EXIT_USAGE and "error" in out


def test_shape_error_is_usage(tmp_path):
    path = write_matrix(tmp_path, "A.json", [[1, 2, 3], [4, 5, 6]])
    assert call("factor", "--type", "lu", "--input", path)[0] == EXIT_USAGE


def test_verification_failure_exit_1(monkeypatch):
    monkeypatch.setattr(cli, "expected_classification", lambda fam: "degenerate")
    code, out = call("verify", "--family", "sym", "--m", "2")
    assert code == EXIT_FAIL and out["failing"] == ["classification_match"]


def test_byte_stable():
    a = run(["tower-gen", "--family", "mod-lu", "--m", "3"])
    b = run(["tower-gen", "--family", "mod-lu", "--m", "3"])
    assert a == b
    text = a[1]
    assert text == json.dumps(json.loads(text), sort_keys=True, separators=(",", ":"))


def test_pretty_is_same_document():
    code, plain = run(["verify", "--family", "sym", "--m", "2"])
    _, pretty = run(["verify", "--family", "sym", "--m", "2", "--pretty"])
    assert json.loads(plain) == json.loads(pretty) and "\n" in pretty


def test_output_file(tmp_path):
    target = tmp_path / "out.json"
    code, text = run(["verify", "--family", "sym", "--m", "2", "--output", str(target)])
    assert code == EXIT_OK and json.loads(target.read_text()) == json.loads(text)


def test_verify_all_grid():
    code, out = call("verify", "--all")
    assert code == EXIT_OK and out["ok"]
    order = [(r["family"], r["m"]) for r in out["results"]]
    assert len(order) == sum(len(r) for r in GRID.values())
    assert all(r["ok"] for r in out["results"])


def test_verify_all_parallel_matches_serial():
    serial = run(["verify", "--all"])
    parallel = run(["verify", "--all", "--jobs", "2"])
    assert serial == parallel


def test_verify_one_skips_tower_at_minimum():
    assert verify_one("Sym", 1)["tower"] is None


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "freediv", "verify", "--family", "sym", "--m", "2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["ok"]


GOLDEN = Path(__file__).parent / "golden" / SCHEMA.replace("/", "-")


@pytest.mark.parametrize("path", sorted(GOLDEN.glob("*.json")), ids=lambda p: p.stem)
def test_golden_files(path):
    verb, family, m = path.stem.split("_")
    code, text = run([verb, "--family", family, "--m", m])
    assert code == EXIT_OK
    assert text + "\n" == path.read_text()
