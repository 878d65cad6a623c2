"""CLI surface: exit codes, JSON schemas, formats, seed reproducibility."""

import json

import pytest

from congruence_forge.cli import main
from congruence_forge.report import VerificationReport


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eta_order_single_cusp(capsys):
    code, out, _ = run(
        capsys, "eta", "order", "--level", "6", "--exp", "1=-5,2=1,3=-1,6=5",
        "--scale", "1", "--cusp", "0/1", "--prefactor-q", "1",
    )
    assert code == 0
    assert out.strip() == "-1"


def test_eta_order_full_table_json(capsys):
    code, out, _ = run(
        capsys, "eta", "order", "--level", "18", "--exp", "1=-7,2=2,9=7,18=-2",
        "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["level"] == 18
    assert {"a": 0, "c": 1} in doc["cusps"]
    assert doc["orders"]["0/1"] == -4
    assert doc["orders"]["inf"] == 1


def test_eta_order_prefactor_mismatch_is_usage_error(capsys):
    code, _, err = run(
        capsys, "eta", "order", "--level", "6", "--exp", "1=-5,2=1,3=-1,6=5",
        "--cusp", "0/1", "--prefactor-q", "2",
    )
    assert code == 2
    assert "prefactor" in err


def test_eta_newman(capsys):
    code, out, _ = run(
        capsys, "eta", "newman", "--level", "18", "--exp", "1=-7,2=2,9=7,18=-2",
        "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["modular"] is True
    assert all(doc["conditions"].values())


def test_eta_radu_bound(capsys):
    code, out, _ = run(
        capsys, "eta", "radu-bound", "--gen-exp", "1=-7,2=2", "--m", "3", "--t", "2",
        "--prefactor-exp", "3=7,6=-2", "--level", "6", "--cusp", "0/1",
    )
    assert code == 0
    assert out.strip() == "-4"


def test_cusp_list_schema(capsys):
    code, out, _ = run(capsys, "cusp", "list", "--level", "6", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc == {"level": 6, "cusps": [
        {"a": 0, "c": 1}, {"a": 1, "c": 2}, {"a": 1, "c": 3}, {"a": 1, "c": 0}]}


def test_cusp_equiv(capsys):
    code, out, _ = run(capsys, "cusp", "equiv", "--level", "6",
                       "--first", "1/6", "--second", "inf")
    assert code == 0 and out.strip() == "equivalent"


def test_series_dk(capsys):
    code, out, _ = run(capsys, "series", "dk", "--k", "2", "--terms", "5",
                       "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["coefficients"]["2"] == 33


def test_series_eta_fractional_prefactor(capsys):
    code, _, err = run(capsys, "series", "eta", "--level", "2", "--exp", "1=1,2=1")
    assert code == 2
    assert "fractional q-power" in err


def test_verify_congruence_exit_zero(capsys):
    code, out, _ = run(capsys, "verify", "congruence",
                       "--alpha-max", "3", "--cases", "5")
    assert code == 0
    rep = VerificationReport.from_json(out)
    assert rep.ok and rep.instances == 15


def test_verify_that_text_format(capsys):
    code, out, _ = run(capsys, "verify", "that", "--format", "text")
    assert code == 0
    assert "status      pass" in out


def test_verify_report_round_trip(capsys):
    code, out, _ = run(capsys, "verify", "modeq", "--terms", "40")
    assert code == 0
    rep = VerificationReport.from_json(out)
    assert rep.task == "modular-equations" and rep.ok


def test_verify_failure_exit_code(capsys, monkeypatch):
    from congruence_forge import cli

    def broken(terms):
        rep = VerificationReport("modular-equations")
        rep.fail({"check": "synthetic", "first_bad_exponent": 0})
        return rep

    monkeypatch.setattr(cli.engine, "verify_modular_equations", broken)
    code, out, _ = run(capsys, "verify", "modeq", "--terms", "40")
    assert code == 1
    rep = VerificationReport.from_json(out)
    assert not rep.ok and rep.counterexamples


def test_seed_reproducibility(capsys):
    code1, out1, _ = run(capsys, "verify", "vsets", "--samples", "4", "--seed", "9")
    code2, out2, _ = run(capsys, "verify", "vsets", "--samples", "4", "--seed", "9")
    assert code1 == code2 == 0
    a, b = VerificationReport.from_json(out1), VerificationReport.from_json(out2)
    assert a.equivalent(b)


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nonsense"])
    assert exc.value.code == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "verify", "that", "--out", str(target))
    assert code == 0 and out == ""
    rep = VerificationReport.from_json(target.read_text())
    assert rep.ok
