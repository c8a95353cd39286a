import json
import subprocess
import sys

import pytest

from ptoeplitz.cli import main, parse_grid, parse_symbol
from ptoeplitz import ValidationError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_grid():
    assert parse_grid("1:2:0.5") == [1.0, 1.5, 2.0]
    assert parse_grid("64,128") == [64.0, 128.0]
    assert parse_grid("8,16", integer=True) == [8, 16]
    with pytest.raises(ValidationError):
        parse_grid("1:2")
    with pytest.raises(ValidationError):
        parse_grid("2.5", integer=True)


def test_parse_symbol():
    s = parse_symbol("trig:1,1,0;-1,1,0")
    assert s.real and s.coeff(1) == 1
    e = parse_symbol("exp:trig:1,0,0.5;-1,0,0.5")
    assert e.coeff(0) == pytest.approx(0.7651976865579666)  # J_0(1)
    with pytest.raises(ValidationError):
        parse_symbol("cos")


def test_verify_appendix(capsys):
    code, out, _ = run(["verify", "--suite", "appendix"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 18 and all(l.startswith("PASS") for l in lines)


def test_genfun_csv_and_manifest(tmp_path, capsys):
    out = tmp_path / "g.csv"
    argv = ["genfun", "--measure", "ginibre", "--f", "trig:1,1,0;-1,1,0", "--lambda", "-1:1:0.5", "--n", "8,16", "--out", str(out)]
    assert run(argv, capsys)[0] == 0
    text = out.read_text().splitlines()
    assert text[0] == "n,lambda,log_abs,phase"
    assert len(text) == 1 + 10
    n, lam, la, ph = text[3].split(",")
    assert n == "8" and float(lam) == 0.0 and float(la) == 0.0
    man = json.loads((tmp_path / "g.csv.manifest.json").read_text())
    assert man["subcommand"] == "genfun" and "g.csv" in man["outputs"]
    first = out.read_bytes()
    assert run(argv + ["--threads", "3"], capsys)[0] == 0
    assert out.read_bytes() == first
    man2 = json.loads((tmp_path / "g.csv.manifest.json").read_text())
    assert man2["outputs"] == man["outputs"]


def test_full_precision_output(capsys):
    code, out, _ = run(["moments", "--measure", "bergman", "--xi", "1"], capsys)
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert row[1] == format(-__import__("math").log(3.0), ".17g")


def test_noninvertible_symbol_exit_2(capsys):
    code, _, err = run(["szego", "--measure", "bergman", "--a", "trig:1,1,0"], capsys)
    assert code == 2
    assert "NonzeroWindingError" in err


def test_usage_errors(capsys):
    assert run(["frobnicate"], capsys)[0] == 64
    assert run(["moments", "--measure", "cue", "--bogus", "1"], capsys)[0] == 64
    assert run(["--help"], capsys)[0] == 0


def test_unknown_measure_exit_2(capsys):
    assert run(["moments", "--measure", "nope"], capsys)[0] == 2


def test_cumulants_json(capsys):
    code, out, _ = run(["cumulants", "--measure", "cue", "--f", "trig:1,1,0;-1,1,0", "--N", "32"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data["cumulants"][0] == pytest.approx(2.0)
    assert data["certified"] == [True, True, True]


def test_config_file(tmp_path, capsys):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"measure": "ginibre", "n": 4, "r": [0.5, 1.0]}))
    code, out, _ = run(["meanmeasure", "--config", str(conf), "--measure", "bergman"], capsys)
    assert code == 0
    # explicit flag wins over the config value
    assert out.splitlines()[1].startswith("0.5,")
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"colour": 1}))
    assert run(["meanmeasure", "--config", str(bad), "--measure", "cue", "--n", "2"], capsys)[0] == 64


def test_sample_reproducible(tmp_path, capsys):
    argv = ["sample", "--measure", "ginibre", "--n", "4", "--seed", "17", "--replicas", "3"]
    code, a, _ = run(argv, capsys)
    code2, b, _ = run(argv + ["--threads", "2"], capsys)
    assert code == code2 == 0 and a == b
    assert len(a.splitlines()) == 1 + 12


def test_trace_and_clt(capsys):
    code, out, _ = run(["trace", "--measure", "ginibre", "--a", "exp:trig:1,0,0.5;-1,0,0.5", "--n", "16,32"], capsys)
    assert code == 0 and float(out.splitlines()[1].split(",")[3]) == pytest.approx(-0.25)
    code, out, _ = run(["clt", "--measure", "ginibre", "--f", "trig:1,1,0;-1,1,0", "--n", "32", "--format", "json"], capsys)
    assert code == 0 and json.loads(out)["columns"] == ["n", "lambda", "log_re", "log_im"]


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "ptoeplitz.cli", "rho", "--measure", "bergman", "--n", "2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "j,k,rho"
