import json
import subprocess
import sys
from pathlib import Path

import pytest

from descentkit.cli import main
from descentkit.specs import bundled_cases

DATA = Path(__file__).parent / "data"
CASES = Path(__file__).parents[1] / "src" / "descentkit" / "cases"


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bundled_verify_passes(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    body = json.loads(out)
    assert len(body["cases"]) == len(bundled_cases())
    assert all(c["passed"] and not c["advisory"] for c in body["cases"])


def test_seq5_report(capsys):
    code, out, _ = run(capsys, "verify", str(CASES / "seq5-f2-f4.json"))
    assert code == 0
    case = json.loads(out)["cases"][0]
    res = case["result"]
    assert [g["order"] for g in res["groups"]] == [1, 3, 3, 1, 1]
    assert res["exact"] is True
    assert all(v is True or (isinstance(v, dict) and all(v.values())) for v in res["checks"].values())


def test_hilbert90_report(capsys):
    code, out, _ = run(capsys, "verify", str(CASES / "hilbert90-3to1-f3.json"))
    assert code == 0
    assert json.loads(out)["cases"][0]["result"]["h1"]["h1_order"] == 1


def test_input_error_exit_code(capsys):
    code, _, err = run(capsys, "verify", str(DATA / "seq5-not-injective.json"))
    assert code == 1
    assert "NotMono" in err and "$.hom" in err


@pytest.mark.parametrize("name, word", [("bad-json.json", "invalid JSON"), ("reducible-poly.json", "NotIrreducible")])
def test_bad_specs(capsys, name, word):
    code, _, err = run(capsys, "verify", str(DATA / name))
    assert code == 1
    assert "SpecError" in err and word in err


@pytest.mark.parametrize("name", ["hilbert90-not-surjective.json", "hilbert90-divided-power-f2.json"])
def test_advisory_exit_code(capsys, name):
    code, out, _ = run(capsys, "verify", str(DATA / name))
    assert code == 3
    assert json.loads(out)["cases"][0]["advisory"] is True
    code, _, _ = run(capsys, "verify", "--advisory-ok", str(DATA / name))
    assert code == 0


def test_worst_code_wins(capsys):
    code, _, _ = run(capsys, "verify", str(CASES / "seq5-f2-f4.json"), str(DATA / "hilbert90-not-surjective.json"),
                     str(DATA / "bad-json.json"))
    assert code == 1


def test_output_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for out in (a, b):
        assert main(["verify", "--out", str(out), str(CASES / "amitsur-f2-f4.json"),
                     str(CASES / "dual-f2-f4.json")]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "wall_time" not in a.read_text()


def test_parallel_matches_serial(capsys):
    specs = [str(CASES / n) for n in ("seq5-f2-f4.json", "pic-kernel-f2-f4.json", "hilbert90-2to1-f2.json")]
    _, serial, _ = run(capsys, "verify", *specs)
    _, parallel, _ = run(capsys, "verify", "--jobs", "2", *specs)
    assert serial == parallel


def test_text_output(capsys):
    code, out, _ = run(capsys, "verify", "--emit", "text", str(CASES / "seq5-f2-f4.json"))
    assert code == 0 and out.startswith("seq5-f2-f4 [seq5] PASS")


def test_describe(capsys):
    code, out, _ = run(capsys, "describe", str(CASES / "seq5-f3-f9.json"))
    assert code == 0
    desc = json.loads(out)
    assert desc["target"]["order"] == 9 and desc["target"]["units"]["order"] == 8
    code, out, _ = run(capsys, "describe", str(CASES / "hilbert90-3to2-f4.json"))
    assert code == 0 and json.loads(out)["map"]["surjective"] is True


def test_selftest_only_and_seed(capsys):
    code, out, _ = run(capsys, "selftest", "--only", "linalg", "--seed", "7")
    assert code == 0
    body = json.loads(out)
    assert [c["criterion"] for c in body["criteria"]] == [8] and body["passed"]
    _, again, _ = run(capsys, "selftest", "--only", "8", "--seed", "7")
    assert again == out


def test_usage_errors(capsys):
    assert main(["frobnicate"]) == 1
    assert main(["selftest", "--only", "nothing"]) == 1
    assert main(["verify", "--bound", "0"]) == 1


def test_bound_flag_triggers_input_error(capsys):
    code, _, err = run(capsys, "verify", "--bound", "8", str(CASES / "seq5-f3-f9.json"))
    assert code == 1 and "$" in err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "descentkit.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
