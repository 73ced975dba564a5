import json
import subprocess
import sys

import pytest

from verbdyn.cli import emit_report, main, parse_q_list, parse_range, read_config, UsageError
from verbdyn.dynsys import ScanReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_trace_poly_prints_the_fricke_polynomial(capsys):
    code, out, _ = run(capsys, "trace-poly", "--gens", "2", "--word", "[x,y]")
    assert code == 0
    assert out.strip() == "-s*t*u + s^2 + t^2 + u^2 - 2"


def test_trace_poly_json(capsys):
    code, out, _ = run(capsys, "trace-poly", "--word", "x y", "--format", "json")
    assert code == 0
    assert json.loads(out)["trace"] == "u"


def test_fiber_round_trip(capsys):
    code, out, _ = run(capsys, "fiber", "--q", "7", "--triple", "2,3,5")
    assert code == 0
    d = json.loads(out)
    assert d["header"]["subcommand"] == "fiber"


def test_fiber_in_extension_field_and_seven_coordinates(capsys):
    code, _, _ = run(capsys, "fiber", "--q", "3^2", "--triple", "z,2,z+1")
    assert code == 0
    code, _, _ = run(capsys, "fiber", "--q", "2", "--triple", "0,0,0,0,0,0,0")
    assert code in (0, 2)


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["trace-poly", "--word", "[x,"],
    ["trace-poly", "--word", "q"],
    ["fiber", "--q", "6", "--triple", "1,2,3"],
    ["fiber", "--q", "7", "--triple", "1,2"],
    ["casebook", "--case", "case2b", "--format", "csv"],
    ["scan", "--family", "torus", "--p-max", "x"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_usage_error_reminds_of_the_grammar(capsys):
    code, _, err = run(capsys, "trace-poly", "--word", "[x,")
    assert code == 2 and "word grammar" in err


def test_casebook_exit_codes(capsys):
    assert run(capsys, "casebook", "--case", "psl33")[0] == 0
    code, out, _ = run(capsys, "casebook", "--case", "case2b")
    assert code == 1
    assert json.loads(out)


def test_scan_is_deterministic(capsys):
    argv = ["torus", "--d", "3", "--p-max", "300", "--seed", "5"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b and a[0] == 0


def test_suzuki_is_deterministic(capsys):
    argv = ["suzuki", "--samples", "50", "--seed", "2"]
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a[1] == b[1] and a[0] == 0


def test_scan_csv_has_one_row_per_prime(capsys):
    code, out, _ = run(capsys, "scan", "--family", "torus", "--p-max", "100", "--format", "csv")
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "parameter,ell,witness,cycle_count"
    assert len(rows) - 1 == len([p for p in (7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83)])


def test_scan_writes_to_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "scan", "--family", "split-field", "--p-max", "50", "--out", str(out))
    assert code == 0 and text == ""
    d = json.loads(out.read_text())
    assert d["M"] == [] and d["N_set"] == [1]
    back = ScanReport.from_dict(d)
    assert back.to_dict()["entries"] == d["entries"]


def test_empty_scan_is_valid_json(capsys):
    code, out, _ = run(capsys, "scan", "--family", "torus", "--p-max", "2")
    assert code == 0
    assert json.loads(out)["entries"] == []


def test_elliptic_subcommand(capsys):
    code, out, _ = run(capsys, "elliptic", "--p", "17")
    assert code == 0
    code, out, _ = run(capsys, "elliptic", "--curve", "-1,0", "--supersingular", "--p-max", "300")
    assert code == 0


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# torus campaign\nsubcommand = torus\nd = 3\np_max = 100\n")
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == 0
    d = json.loads(out)
    assert d["header"]["config"]["p_max"] == 100
    code, out, _ = run(capsys, "torus", "--config", str(cfg), "--p-max", "60")
    assert json.loads(out)["header"]["config"]["p_max"] == 60
    assert max(e["p"] for e in json.loads(out)["entries"]) <= 60


def test_argument_helpers(tmp_path):
    assert parse_q_list("5,2^3, 9") == [5, 8, 9]
    assert parse_range("4..49") == (4, 49)
    with pytest.raises(UsageError):
        parse_range("4-49")
    with pytest.raises(UsageError):
        parse_q_list("6")
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    with pytest.raises(UsageError):
        read_config(str(bad))


def test_emit_report_rejects_csv_for_plain_dicts():
    with pytest.raises(UsageError):
        emit_report({"a": 1}, "csv")
    assert json.loads(emit_report(ScanReport("empty"), "json"))["entries"] == []


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "verbdyn", "trace-poly", "--word", "x^2"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert r.stdout.strip() == "s^2 - 2"
