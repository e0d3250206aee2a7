import json
import subprocess
import sys
from fractions import Fraction

import pytest

from nswfair.cli import decimal_text, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def worst_case_files(tmp_path, capsys):
    paths = {}
    for lemma in (4, 5, 6, 8):
        p = tmp_path / f"lemma{lemma}.json"
        assert run(capsys, "gen", "--lemma", str(lemma), "--out", str(p))[0] == 0
        paths[lemma] = p
    return paths


@pytest.mark.parametrize(
    "argv, line",
    [
        (["reproduce", "5"], "alpha=2/5 PASS"),
        (["reproduce", "6"], "alpha=2/3 PASS"),
        (["reproduce", "7", "--delta", "1/10"], "alpha=11/36 PASS"),
        (["reproduce", "7", "--delta", "1/4"], "alpha=5/12 PASS"),
        (["reproduce", "4", "--k", "2", "--delta", "1/10"], "alpha=30/49 PASS (> 1/2, → 1/2 as k grows)"),
        (["reproduce", "8", "--eta", "3"], "alpha=3/5 PASS"),
    ],
)
def test_reproduce(capsys, argv, line):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert line in out.splitlines()[-1]


def test_reproduce_prints_nsw(capsys):
    _, out, _ = run(capsys, "reproduce", "5")
    assert "nsw=12" in out


def test_solve_nsw(capsys, worst_case_files, tmp_path):
    out_path = tmp_path / "a.json"
    code, out, _ = run(capsys, "solve", str(worst_case_files[5]), "--objective", "nsw", "--out", str(out_path))
    assert code == 0 and out.strip() == "nsw=12"
    doc = json.loads(out_path.read_text())
    assert doc == {"bundles": [["g1", "g2"], ["g3", "g4", "g5", "g6", "g7", "g8"]], "unallocated": []}


def test_solve_to_stdout(capsys, worst_case_files):
    code, out, err = run(capsys, "solve", str(worst_case_files[6]), "--objective", "leximin")
    assert code == 0 and json.loads(out)["bundles"]
    assert err.startswith("utilities=[")


def test_solve_round_robin_adversarial(capsys, worst_case_files, tmp_path):
    out_path = tmp_path / "rr.json"
    code, out, _ = run(
        capsys, "solve", str(worst_case_files[8]), "--objective", "rr", "--tie-break", "lemma8", "--out", str(out_path)
    )
    assert code == 0 and out.strip() == "utilities=[4, 2]"
    assert json.loads(out_path.read_text())["bundles"] == [["g3", "g4", "g5", "g6"], ["g1", "g2"]]


def test_solve_round_robin_tie_break_file(capsys, worst_case_files, tmp_path):
    tb = tmp_path / "tb.json"
    tb.write_text(json.dumps([["g5", "g6", "g1", "g2", "g3", "g4"], "by-index"]))
    code, out, _ = run(capsys, "solve", str(worst_case_files[8]), "--objective", "rr", "--tie-break", str(tb), "--out", str(tmp_path / "x.json"))
    assert code == 0 and out.strip() == "utilities=[4, 2]"


def test_solve_empty_instance(capsys, tmp_path):
    code, _, _ = run(capsys, "gen", "--seed", "0", "--n", "2", "--m", "0", "--spec", "uniform", "--out", str(tmp_path / "e.json"))
    assert code == 0
    code, out, _ = run(capsys, "solve", str(tmp_path / "e.json"), "--out", str(tmp_path / "ea.json"))
    assert code == 0
    assert json.loads((tmp_path / "ea.json").read_text()) == {"bundles": [[], []], "unallocated": []}


def test_audit_formats(capsys, worst_case_files, tmp_path):
    alloc = tmp_path / "a.json"
    run(capsys, "solve", str(worst_case_files[6]), "--out", str(alloc))
    code, out, _ = run(capsys, "audit", str(worst_case_files[6]), str(alloc), "--format", "json")
    rec = json.loads(out)
    assert code == 0 and rec["alpha"] == "2/3" and rec["po"] is True and rec["alpha_decimal"] == "0.6666666667"
    code, out, _ = run(capsys, "audit", str(worst_case_files[6]), str(alloc), "--format", "csv")
    header, row = out.strip().splitlines()
    assert header.split(",")[0] == "alpha" and row.startswith("2/3,0.6666666667")
    code, out, _ = run(capsys, "audit", str(worst_case_files[6]), str(alloc))
    assert any(line.split() == ["alpha", "2/3"] for line in out.splitlines())


def test_audit_uniform_worst_case(capsys, worst_case_files, tmp_path):
    alloc = tmp_path / "a.json"
    run(capsys, "solve", str(worst_case_files[4]), "--out", str(alloc))
    _, out, _ = run(capsys, "audit", str(worst_case_files[4]), str(alloc), "--format", "json")
    assert json.loads(out)["alpha"] == "30/49"


def test_audit_empty_allocation(capsys, worst_case_files, tmp_path):
    alloc = tmp_path / "empty.json"
    alloc.write_text(json.dumps({"bundles": [[], []]}))
    _, out, _ = run(capsys, "audit", str(worst_case_files[5]), str(alloc), "--format", "json")
    rec = json.loads(out)
    assert rec["ef"] is True and rec["po"] is False and rec["alpha"] == "inf"


def test_audit_unknown_item_is_input_error(capsys, worst_case_files, tmp_path):
    alloc = tmp_path / "bad.json"
    alloc.write_text(json.dumps({"bundles": [["g1"], ["zz"]]}))
    code, _, err = run(capsys, "audit", str(worst_case_files[5]), str(alloc))
    assert code == 1 and "unknown item" in err


def test_classify(capsys, worst_case_files):
    code, out, _ = run(capsys, "classify", str(worst_case_files[5]))
    assert code == 0
    assert out.strip() == "hereditary: true, matroid: false, p-extendible: 4, strongly p-extendible: 4"
    _, out, _ = run(capsys, "classify", str(worst_case_files[5]), "--p-bound", "2")
    assert "p-extendible: >=3" in out


def test_gen_byte_identical(capsys, tmp_path):
    args = ["gen", "--seed", "1", "--n", "2", "--m", "6", "--spec", "partition", "--vals", "identical"]
    run(capsys, *args, "--out", str(tmp_path / "a.json"))
    run(capsys, *args, "--out", str(tmp_path / "b.json"))
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    assert "." not in json.dumps(json.loads((tmp_path / "a.json").read_text())["valuations"])


def test_gen_two_valued(capsys):
    code, out, _ = run(capsys, "gen", "--seed", "4", "--n", "2", "--m", "5", "--vals", "two_valued", "--a", "3")
    assert code == 0
    assert set(sum(json.loads(out)["valuations"], [])) <= {"1", "3"}


def test_report_matroid_suite(capsys):
    code, out, _ = run(capsys, "report", "theorem1", "--count", "20", "--seed", "7")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "seed,n,m,spec_kind,valuation_class,alpha_num,alpha_den,po,bound_num,bound_den,pass"
    assert [int(line.split(",")[0]) for line in lines[1:21]] == list(range(7, 27))
    assert lines[-1].startswith("violations: 0, min alpha ≥ 1/2")


def test_report_markdown_worst_cases(capsys):
    code, out, _ = run(capsys, "report", "lemmas", "--format", "markdown")
    assert code == 0 and out.startswith("| seed |")
    assert "| lemma5 | 2 | 5 |" in out


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "solve", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "nonsense")[0] == 1
    big = tmp_path / "big.json"
    run(capsys, "gen", "--seed", "1", "--n", "3", "--m", "20", "--spec", "uniform", "--out", str(big))
    code, _, err = run(capsys, "solve", str(big))
    assert code == 2 and "budget" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "classify", str(bad))[0] == 1


def test_lex_instance_rejects_nsw(capsys, tmp_path):
    p = tmp_path / "lex.json"
    run(capsys, "gen", "--seed", "2", "--n", "2", "--m", "4", "--vals", "lexicographic", "--out", str(p))
    code, _, err = run(capsys, "solve", str(p), "--objective", "nsw")
    assert code == 1 and "additive" in err
    code, out, _ = run(capsys, "solve", str(p), "--objective", "rr", "--out", str(tmp_path / "a.json"))
    assert code == 0 and out.startswith("bundle sizes=")


def test_decimal_text():
    assert decimal_text(Fraction(2, 3)) == "0.6666666667"
    assert decimal_text(Fraction(12)) == "12"
    assert decimal_text(float("inf")) == "inf"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nswfair", "reproduce", "5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.splitlines()[-1] == "alpha=2/5 PASS"
