"""
Command line tests: exit codes, report layout and the json/text formats.
"""

import json

import pytest

from app.cli import build_parser, main
from app.reports import ReportDocument


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_json(capsys):
    code, out, _ = run(capsys, "classify", "2,1;1,1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"version", "command", "input", "result", "verification", "flags"}
    assert doc["command"] == "classify"
    assert doc["result"]["classification"]["tag"] == "Anosov"
    assert doc["result"]["primitive_root"] == {"M0": "(1,1;1,0)", "ell": "2", "eps": "1"}
    assert doc["result"]["reverser"]["exists"] is True


def test_format_before_subcommand(capsys):
    code, out, _ = run(capsys, "--format", "json", "classify", "0,-1;1,0")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["classification"] == {
        "tag": "Exceptional", "subtag": "order4", "representative": "(0,-1;1,0)",
    }


def test_json_report_round_trips(capsys):
    _, out, _ = run(capsys, "classify", "3,2;4,3", "--format", "json")
    doc = ReportDocument.model_validate_json(out)
    assert doc.to_json() == out.rstrip("\n")


def test_classify_text(capsys):
    code, out, _ = run(capsys, "classify", "2,1;1,1")
    assert code == 0
    assert out.startswith("solaut ")
    assert "tag: Anosov" in out


@pytest.mark.parametrize("argv, expected", [
    (["classify", "1,0;0,2"], 3),
    (["classify", "garbage"], 2),
    (["classify"], 2),
    ([], 2),
    (["out", "klein", "2,1;1,1"], 2),
    (["aut", "torus-bundle", "0,-1;1,0"], 5),
    (["out", "sapphire", "1,2;1,1"], 5),
    (["out", "sapphire", "1,1;0,1"], 5),
])
def test_exit_codes(capsys, argv, expected):
    code, out, err = run(capsys, *argv)
    assert code == expected
    assert out == ""
    assert "solaut: " in err


def test_error_names_the_code(capsys):
    _, _, err = run(capsys, "out", "sapphire", "1,2;1,1")
    assert "DetMinusOne" in err


def test_out_torus_bundle_verified(capsys):
    code, out, _ = run(capsys, "out", "torus-bundle", "2,1;1,1", "--verify", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["order"] == "8"
    assert doc["verification"]["bruteforce"] == {"ok": True, "order": "8"}
    assert doc["verification"]["relators_mod_inner"]["ok"] is True


def test_out_sapphire(capsys):
    code, out, _ = run(capsys, "out", "sapphire", "2,1;1,1", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["order"] == "8"
    assert doc["result"]["case"] == "I"
    assert doc["flags"] == {"generic_shape": False}


def test_aut_torus_bundle(capsys):
    code, out, _ = run(capsys, "aut", "torus-bundle", "2,1;1,1", "--verify", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc["result"]["automorphisms"]) == {"alpha", "beta", "gamma_plus", "gamma_minus", "xi"}
    assert doc["verification"]["relators"]["ok"] is True


def test_homeo(capsys):
    code, out, _ = run(capsys, "homeo", "2,1;1,1", "1,1;1,2", "--format", "json")
    assert code == 0
    assert json.loads(out)["result"]["homeomorphic"] is True

    code, out, _ = run(capsys, "homeo", "2,1;1,1", "3,2;4,3", "--format", "json")
    assert code == 0
    assert json.loads(out)["result"] == {"homeomorphic": False}


def test_file_input(capsys, tmp_path):
    path = tmp_path / "matrices.txt"
    path.write_text("# monodromies\n2,1;1,1\n\n3,2;4,3\n")
    code, out, _ = run(capsys, "classify", "--file", str(path), "--format", "json")
    assert code == 0
    docs = json.loads(out)
    assert [d["input"]["matrix"] for d in docs] == ["2,1;1,1", "3,2;4,3"]


def test_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "classify", "--file", str(tmp_path / "absent.txt"))
    assert code == 2


def test_selftest_empty_box(capsys):
    code, out, _ = run(capsys, "selftest", "--bound", "0", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["ok"] is True
    assert doc["result"]["warnings"]


def test_negative_matrix_after_double_dash(capsys):
    """A matrix with a negative first entry is read positionally after --."""
    code, out, _ = run(capsys, "--format", "json", "classify", "--", "-2,-1;-1,-1")
    assert code == 0
    doc = json.loads(out)
    assert doc["input"]["matrix"] == "-2,-1;-1,-1"
    assert doc["result"]["primitive_root"] == {"M0": "(1,1;1,0)", "ell": "2", "eps": "-1"}


def test_negative_matrix_as_option(capsys):
    """--matrix=VALUE accepts a negative first entry without --."""
    code, out, _ = run(capsys, "out", "torus-bundle", "--matrix=-2,-1;-1,-1", "--format", "json")
    assert code == 0
    assert json.loads(out)["result"]["order"] == "40"


def test_matrix_given_twice(capsys):
    code, out, _ = run(capsys, "classify", "2,1;1,1", "--matrix=3,2;4,3")
    assert code == 2
    assert out == ""


def test_help_explains_negative_entries():
    text = build_parser().format_help()
    assert '-- "-2,-1;-1,-1"' in text
    assert "--matrix=" in text
