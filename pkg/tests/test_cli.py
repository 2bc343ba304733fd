import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from tdsum.cli import main, parse_report
from tdsum.numerics import DiscountFactor, LassoWord, lasso_value
from tdsum.problem import instance_from_json
from tdsum.verdict import Answer

ROOT = Path(__file__).resolve().parent.parent
INSTANCES = ROOT / "instances"
AUTOMATA = ROOT / "automata"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_abc_suffix(capsys):
    code, out, _ = run(capsys, "solve", INSTANCES / "abc_suffix.json")
    assert code == 0
    answer, cert = parse_report(out)
    assert answer is Answer.YES
    inst = instance_from_json(json.loads((INSTANCES / "abc_suffix.json").read_text()))
    assert inst.is_solution(cert)
    report = json.loads(out)
    assert report["certificate"]["constraint_check"] is True
    assert "timing" not in report


@pytest.mark.parametrize("path", sorted(INSTANCES.glob("*.json")), ids=lambda p: p.name)
def test_report_round_trip(capsys, path):
    code, out, _ = run(capsys, "solve", path)
    answer, cert = parse_report(out)
    assert code == {Answer.YES: 0, Answer.NO: 1, Answer.UNKNOWN: 2}[answer]
    if cert is not None:
        inst = instance_from_json(json.loads(path.read_text()))
        if inst.kind in ("tds", "gtds", "cgtds", "ctds", "tds_f", "cgtds_f"):
            assert inst.is_solution(cert)


def test_text_format_and_certificate_only(capsys):
    code, out, _ = run(capsys, "solve", INSTANCES / "abc_suffix.json", "--certificate-only")
    assert (code, out.strip()) == (0, "(ac)^ω")
    code, out, _ = run(capsys, "solve", INSTANCES / "abc_suffix.json", "--format", "text", "--timing")
    assert code == 0 and "yes" in out


def test_trace_for_tds01(capsys):
    code, out, _ = run(capsys, "solve", INSTANCES / "tds01_periodic.json", "--trace")
    assert code == 0
    assert "trace" in json.loads(out)


def test_batch_is_deterministic(capsys):
    first = run(capsys, "batch", INSTANCES, "--jobs", "4")
    second = run(capsys, "batch", INSTANCES, "--jobs", "1")
    assert first == second
    assert first[0] == 1  # the corpus holds No instances


def test_malformed_json(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "tds01",\n "lambda": }')
    code, _, err = run(capsys, "solve", bad)
    assert code == 3
    assert f"{bad}:2:" in err


def test_invalid_instance(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "tds01", "lambda": "3/2", "target": "1"}')
    code, _, err = run(capsys, "solve", bad)
    assert code >= 3 and err.startswith("error:")


def test_bad_arguments(capsys):
    code, _, err = run(capsys, "solve")
    assert code == 3 and "usage" in err
    assert run(capsys, "--help")[0] == 0


def test_missing_file(capsys):
    code, _, err = run(capsys, "solve", ROOT / "no-such-file.json")
    assert code == 3 and "error" in err


def test_dsa_commands(capsys):
    loop = AUTOMATA / "loop.json"
    code, out, _ = run(capsys, "dsa", "exact-value", loop, "--target", "5/4")
    assert code == 0 and json.loads(out)["verdict"] == "yes"
    code, out, _ = run(capsys, "dsa", "universality", loop, "--target", "2")
    assert code == 0
    code, out, _ = run(capsys, "dsa", "universality", loop, "--target", "3/2", "--strict")
    report = json.loads(out)
    assert code == 1 and F(report["counterexample"]["value"]) == F(3, 2)
    code, out, _ = run(capsys, "dsa", "inclusion", loop, AUTOMATA / "loop_upper.json")
    assert code == 0
    code, out, _ = run(capsys, "dsa", "gadget", "--lambda", "1/3", "--target", "3/4")
    assert code == 0 and json.loads(out)["automaton"]["states"] == ["q0", "q1", "q2"]


def test_gadget_output_feeds_semi_universality(capsys, tmp_path):
    _, out, _ = run(capsys, "dsa", "gadget", "--lambda", "1/3", "--target", "3/4")
    path = tmp_path / "gadget.json"
    path.write_text(out)
    code, out, _ = run(capsys, "dsa", "semi-universality", path, "--target", "0")
    assert code == 0 and json.loads(out)["verdict"] == "holds"


def test_expand_text(capsys):
    code, out, _ = run(capsys, "expand", "--lambda", "1/2", "--target", "5/8")
    assert code == 0
    assert out.splitlines()[0] == "step 1: gap=5/8 digit=1"
    assert "Repeat" in out


def test_pam_and_cantor(capsys):
    code, out, _ = run(capsys, "pam", "--lambda", "1/3", "--target", "3/8")
    assert code == 1 and json.loads(out)["status"] == "diverged"
    lam = DiscountFactor.of("1/3")
    assert lasso_value(LassoWord((), ("1", "0")), {"0": 0, "1": 1}, lam) == F(3, 8)
    code, out, _ = run(capsys, "cantor", "--k", "3", "--t", "1/4")
    assert code == 0
    code, out, _ = run(capsys, "cantor", "--k", "3", "--t", "1/2")
    assert code == 1


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "tdsum", "solve", str(INSTANCES / "abc_suffix.json"), "--certificate-only"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout.strip() == "(ac)^ω"
