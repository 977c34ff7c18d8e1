import io
import json

import pytest

from cyqc.cli import main, run


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_regen_table3_tsv():
    code, text = call("regen", "--table", "3", "--format", "tsv")
    lines = text.splitlines()
    assert code == 0 and len(lines) == 5
    assert lines[0] == "6\tII*"
    assert lines[-1] == "2\tII*,III*,IV*,I4*,I3*,I2*,I1*,I0*"


def test_regen_json_is_deterministic():
    a = call("regen", "--table", "4", "--format", "json")
    b = call("regen", "--table", "4", "--format", "json")
    assert a == b and a[0] == 0
    doc = json.loads(a[1])
    assert doc["schema"] == "1" and doc["table"] == 4 and len(doc["rows"]) == 34


def test_regen_case_filter():
    code, text = call("regen", "--table", "4", "--case", "18")
    assert code == 0
    fields = text.strip().split("\t")
    assert fields[0] == "18" and "dual(A1)+Z2" in fields


def test_regen_case_rejected_for_other_tables(capsys):
    code, _ = call("regen", "--table", "3", "--case", "1")
    assert code == 2
    assert "--case" in capsys.readouterr().err


def test_mw_from_config():
    code, text = call("mw", "--config", "I8@0,I1x4")
    rows = dict(line.split("\t", 1) for line in text.splitlines())
    assert code == 0
    assert rows["MW"] == "dual(A1)+Z2"
    assert rows["source"].startswith("torsion hint from Table 8")


def test_mw_ambiguous_without_hint(capsys):
    code, _ = call("mw", "--config", "I2x4,IIx2")
    err = capsys.readouterr().err
    assert code == 2
    assert "--tors 2\tdual(D4)+Z2" in err and 'dual(A1)^4' in err
    code, text = call("mw", "--config", "I2x4,IIx2", "--tors", "")
    assert code == 0 and "MW\tdual(A1)^4" in text


def test_mw_bad_config(capsys):
    code, _ = call("mw", "--config", "I9,I1x4")
    assert code == 2
    assert "Euler" in capsys.readouterr().err


def test_lattice_complements():
    code, text = call("lattice", "U3/2", "--within", "dual(E7)")
    rows = dict(line.split("\t", 1) for line in text.splitlines())
    assert code == 0 and rows["complements"] == "['E6']"
    code, text = call("lattice", "E8")
    assert "minimal_vectors\t240" in text


@pytest.mark.parametrize("argv", [["frobnicate"], ["regen"], ["regen", "--table", "11"], ["verify", "--bogus"],
                                  ["lattice", "B3"], []])
def test_usage_errors_exit_2(argv):
    assert call(*argv)[0] == 2


def test_dataset_error_exit_2(tmp_path):
    assert call("--dataset", str(tmp_path), "regen", "--table", "3")[0] == 2


def test_verify_single_table():
    code, text = call("verify", "--table", "3")
    lines = text.splitlines()
    assert code == 0
    assert lines[0].startswith("dataset\t")
    assert lines[-1].startswith("summary\t")
    assert all("\tPASS" in l for l in lines[1:-1])


def test_verify_strict_counts_errata():
    code, text = call("verify", "--table", "10")
    assert code == 0 and "ERRATUM" in text
    assert call("verify", "--table", "10", "--strict")[0] == 1


def test_certify_row():
    code, text = call("certify", "--row", "16")
    assert code == 0
    assert "ok=True" in text and "argument=minimal_vector" in text


def test_main_returns_int(capsys):
    assert main(["regen", "--table", "1"]) == 0
    assert capsys.readouterr().out
