import io
import json
import subprocess
import sys

import pytest

from xcsp21 import fixtures
from xcsp21.cli import main, parse_assignment
from xcsp21.document import load
from xcsp21.model import model_equal

QUEENS = str(fixtures.path("queens-extension"))
WCSP = str(fixtures.path("wcsp-example"))
MAGIC = str(fixtures.path("magic-square"))
QCSP = str(fixtures.path("qcsp-example"))
QCSP_PLUS = str(fixtures.path("qcsp-plus-example"))


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_validate():
    code, out, _ = run("validate", QUEENS)
    assert code == 0 and "PASSED" in out


def test_validate_competition_wcsp():
    code, out, _ = run("validate", "--strict-competition", WCSP)
    assert code == 1 and "TupleOutOfDomain" in out


def test_validate_machine_format():
    code, out, _ = run("validate", "--strict-competition", "--format", "machine", WCSP)
    records = [json.loads(line) for line in out.splitlines()]
    assert code == 1 and any(r["code"] == "TupleOutOfDomain" and r["severity"] == "error" for r in records)
    assert run("validate", "--strict-competition", "--format", "machine", WCSP)[1] == out


def test_validate_missing_file(tmp_path):
    code, out, err = run("validate", str(tmp_path / "missing.xml"))
    assert code == 2 and out == "" and "cannot read" in err


def test_validate_broken_document(tmp_path):
    broken = tmp_path / "broken.xml"
    broken.write_text("<instance><presentation")
    code, _, err = run("validate", str(broken))
    assert code == 3 and "XmlError" in err


def test_usage_errors():
    assert run()[0] == 2
    assert run("frobnicate", QUEENS)[0] == 2
    assert run("solve", "--mode", "fastest", QUEENS)[0] == 2


def test_convert_round_trip(tmp_path):
    tagged = tmp_path / "tagged.xml"
    back = tmp_path / "back.xml"
    assert run("convert", "--to", "tagged", QUEENS, "-o", str(tagged))[0] == 0
    assert b"<tuple>" in tagged.read_bytes()
    assert run("convert", "--to", "abridged", str(tagged), "-o", str(back))[0] == 0
    assert model_equal(load(back.read_bytes()), load(fixtures.read("queens-extension")))


def test_convert_idempotent_on_stdout(tmp_path):
    code, once, _ = run("convert", "--to", "abridged", QUEENS)
    assert code == 0
    copy = tmp_path / "once.xml"
    copy.write_text(once)
    assert run("convert", "--to", "abridged", str(copy))[1] == once


def test_check():
    code, out, _ = run("check", QUEENS, "--assignment", "V0=2,V1=4,V2=1,V3=3")
    assert code == 0 and out.strip() == "SATISFIED"
    code, out, _ = run("check", QUEENS, "--assignment", "V0=1,V1=1,V2=1,V3=1")
    assert code == 1 and out.startswith("VIOLATED") and "C0" in out
    code, _, err = run("check", QUEENS, "--assignment", "V0=9,V1=4,V2=1,V3=3")
    assert code == 3 and "DomainViolation" in err
    assert run("check", QUEENS, "--assignment", "V0=2,V1=4")[0] == 3
    assert run("check", QUEENS, "--assignment", "V0:2")[0] == 2


def test_check_assignment_file(tmp_path):
    f = tmp_path / "a.txt"
    f.write_text("V0=3\nV1=1\nV2=4\nV3=2\n")
    assert run("check", QUEENS, "--assignment-file", str(f))[0] == 0


def test_check_wcsp():
    code, out, _ = run("check", WCSP, "-q", "--assignment", "V0=2 V1=0 V2=2 V3=0", "--format", "machine")
    record = json.loads(out)
    assert code == 0 and record["consistent"] and record["totalCost"] == "3"
    code, out, _ = run("check", WCSP, "-q", "--assignment", "V0=0 V1=0 V2=0 V3=0")
    assert code == 1 and out.startswith("cost 5")


def test_parse_assignment():
    assert parse_assignment("V0=2, V1=-4\nV2=1") == {"V0": 2, "V1": -4, "V2": 1}
    with pytest.raises(ValueError):
        parse_assignment("V0=1,V0=2")


def test_solve():
    code, out, _ = run("solve", "--mode", "count", QUEENS)
    assert code == 0 and out == "2\n"
    code, out, _ = run("solve", "--mode", "all", QUEENS)
    assert out.splitlines() == ["V0=2 V1=4 V2=1 V3=3", "V0=3 V1=1 V2=4 V3=2"]
    code, out, _ = run("solve", "-q", "--mode", "min-cost", WCSP)
    assert code == 0 and out.splitlines() == ["3", "V0=2 V1=0 V2=2 V3=0"]


def test_solve_qcsp():
    assert run("solve", "--mode", "qcsp", QCSP) == (0, "TRUE\n", "")
    code, out, _ = run("solve", "-q", "--mode", "qcsp", QCSP_PLUS)
    assert (code, out) == (1, "FALSE\n")


def test_solve_mode_must_fit_type():
    assert run("solve", "--mode", "count", QCSP)[0] == 2
    assert run("solve", "--mode", "qcsp", QUEENS)[0] == 2


def test_solve_budget(monkeypatch):
    code, _, err = run("solve", "-q", "--mode", "count", "--limit", "10", MAGIC)
    assert code == 3 and "budget" in err
    monkeypatch.setenv("XCSP21_BUDGET", "10")
    assert run("solve", "-q", "--mode", "count", MAGIC)[0] == 3
    monkeypatch.setenv("XCSP21_BUDGET", "lots")
    assert run("solve", "-q", "--mode", "count", MAGIC)[0] == 2


def test_stats():
    code, out, _ = run("stats", "--format", "machine", QUEENS)
    record = json.loads(out)
    assert code == 0
    assert (record["variables"], record["constraints"], record["maxArity"], record["searchSpace"]) == (4, 6, 2, 256)
    record = json.loads(run("stats", "-q", "--format", "machine", MAGIC)[1])
    assert record["globals"] == {"allDifferent": 1, "weightedSum": 8} and record["maxArity"] == 9


def test_stats_arity_warning(tmp_path):
    doc = fixtures.read("queens-extension").decode().replace('format="XCSP 2.1"', 'format="XCSP 2.1" maxConstraintArity="3"')
    f = tmp_path / "q.xml"
    f.write_text(doc)
    code, out, err = run("stats", str(f))
    assert code == 0 and "maxConstraintArity=3" in err and "maxArity=2" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "xcsp21.cli", "solve", "--mode", "count", QUEENS],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "2\n"
