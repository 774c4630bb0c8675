import os
import subprocess
import sys

import pytest

from montgomery import semiclassic
from montgomery.cli import HEADER, UsageError, fmt, main, parse_levels, parse_range


def test_parse_range():
    assert parse_range("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_range("-2.5:6.5:0.05")[-1] == 6.5
    assert len(parse_range("-2.5:6.5:0.05")) == 181
    assert parse_range("3") == [3.0]
    for bad in ("a:b:c", "1:2", "1:0:0.1", "0:1:0", "0:1:-1"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_parse_levels():
    assert parse_levels("1..6") == [1, 2, 3, 4, 5, 6]
    assert parse_levels("1,3,5..7") == [1, 3, 5, 6, 7]
    for bad in ("0", "x", "", "2..a"):
        with pytest.raises(UsageError):
            parse_levels(bad)


def test_fmt():
    assert fmt(None) == "nan"
    assert fmt(True) == "1"
    assert fmt(3) == "3"
    assert float(fmt(0.1 + 0.2)) == 0.1 + 0.2


def _rows(text):
    lines = text.splitlines()
    assert lines[0] == HEADER
    body = [ln for ln in lines if not ln.startswith("#")]
    return body[0].split(","), [ln.split(",") for ln in body[1:]]


def test_semiclassic_ec(capsys):
    assert main(["semiclassic", "ec"]) == 0
    cols, rows = _rows(capsys.readouterr().out)
    assert cols == ["E_c"]
    assert float(rows[0][0]) == pytest.approx(semiclassic.find_Ec(), abs=1e-12)


def test_critical(capsys):
    assert main(["critical", "--level", "1"]) == 0
    cols, rows = _rows(capsys.readouterr().out)
    rec = dict(zip(cols, rows[0]))
    assert float(rec["alpha_c"]) == pytest.approx(0.35, abs=0.02)
    assert float(rec["quotient"]) == pytest.approx(4.78, abs=0.05)
    assert rec["minimum"] == "1"


def test_curve_row_count_and_negative_alpha(capsys):
    assert main(["curve", "--levels", "1..2", "--alpha", "-1:1:0.5"]) == 0
    cols, rows = _rows(capsys.readouterr().out)
    assert cols == ["alpha", "j", "lambda", "lambda_prime", "E"]
    assert len(rows) == 10
    assert all(float(r[3]) < 0 for r in rows if float(r[0]) <= 0)


def test_output_file_and_determinism(tmp_path, monkeypatch):
    args = ["spectrum", "--alpha", "0:2:0.5", "--levels", "1..3"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["-o", str(a)]) == 0
    monkeypatch.setenv("MONT_THREADS", "3")
    assert main(args + ["-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors():
    assert main(["spectrum", "--alpha", "1:0:0.1"]) == 1
    assert main(["critical", "--level", "1", "--bracket", "3"]) == 1
    assert main(["bohr", "--alpha", "0.5"]) == 1
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 1


def test_numerical_failure_exit_code(capsys):
    assert main(["critical", "--level", "1", "--bracket", "2:3"]) == 2
    err = capsys.readouterr().err
    assert "numerical failure" in err and "find_critical" in err


def test_verify_subset(capsys):
    assert main(["verify", "--only", "1,10"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 2


def test_entry_point_smoke():
    env = dict(os.environ, MONT_THREADS="1")
    proc = subprocess.run([sys.executable, "-m", "montgomery.cli", "semiclassic", "limit"],
                          capture_output=True, text=True, env=env, check=False)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.startswith(HEADER)
