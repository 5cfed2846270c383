import json
import subprocess
import sys

import pytest

from padic_mahler.cli import main
from padic_mahler.mahler import MahlerSeries
from padic_mahler.padic_core import PrimeContext
from padic_mahler.serialize import dumps, scalar_from_json, series_to_json


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_q(capsys):
    code, out, _ = run(capsys, "eval", "--p", "5", "--f", "q", "--x", "4")
    d = json.loads(out)
    assert code == 0 and int(d["unit"]) * 5 ** d["valuation"] == 65


def test_eval_beta_table(capsys):
    code, out, _ = run(capsys, "--format", "table", "eval", "--f", "beta:2", "--x", "4")
    assert code == 0 and out.startswith("6 mod 5^")


def test_global_flags_after_subcommand(capsys):
    a = run(capsys, "--p", "3", "eval", "--f", "q", "--x", "2")
    b = run(capsys, "eval", "--f", "q", "--x", "2", "--p", "3")
    assert a == b and json.loads(a[1])["p"] == 3


def test_operator_grammar(capsys):
    code, out, _ = run(capsys, "eval", "--p", "3", "--f", "S(q)", "--x", "7")
    assert code == 0 and json.loads(out)["unit"] == "1"
    code, out, _ = run(capsys, "eval", "--p", "3", "--f", "Sigma(one)", "--x", "7")
    assert code == 0 and json.loads(out)["unit"] == "7"


def test_gamma_eval(capsys):
    code, out, _ = run(capsys, "gamma", "--p", "3", "--r", "4", "--x", "2")
    assert code == 0 and json.loads(out)["p"] == 3


def test_sigma_csv(capsys):
    code, out, _ = run(capsys, "--format", "csv", "sigma", "apply", "--f", "q", "--terms", "6")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "n,valuation,residue,precision" and len(lines) == 7


def test_pair_routes(capsys):
    outs = [run(capsys, "pair", "--p", "3", "--f", "q", "--g", "g_r", "--r", "4", "--route", r)[1] for r in ("diagonal", "integral", "star_eval")]
    ctx = PrimeContext(3, 20)
    vals = [scalar_from_json(json.loads(o), ctx) for o in outs]
    assert all((v - vals[0]).valuation >= 16 for v in vals)


def test_verify_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "sigma", "--p", "3", "--precision", "12")
    assert code == 0 and all(r["pass"] for r in json.loads(out))


def test_de_solve(capsys):
    code, out, _ = run(capsys, "de", "solve", "--p", "3", "--precision", "12", "--coeffs", "1,0,0")
    d = json.loads(out)
    assert code == 0 and d["F"]["kind"] == "power"


def test_file_input(tmp_path, capsys):
    ctx = PrimeContext(5, 20)
    path = tmp_path / "f.json"
    path.write_text(dumps(series_to_json(MahlerSeries.beta(ctx, 1, 10))))
    code, out, _ = run(capsys, "eval", "--f", f"@{path}", "--x", "9")
    assert code == 0 and json.loads(out)["unit"] == "9"


def test_out_file(tmp_path, capsys):
    path = tmp_path / "q.json"
    code, out, _ = run(capsys, "export", "--object", "q", "--terms", "5", "--out", str(path))
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["N"] == 5


def test_errors_exit_2(capsys):
    assert run(capsys, "eval", "--p", "4", "--f", "q", "--x", "1")[0] == 2
    assert run(capsys, "eval", "--f", "nonsense", "--x", "1")[0] == 2
    assert run(capsys, "gamma", "--p", "5", "--r", "2", "--x", "1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["eval"])
    assert exc.value.code == 2


def test_env_override(monkeypatch, capsys):
    monkeypatch.setenv("PADIC_MAHLER_P", "7")
    code, out, _ = run(capsys, "eval", "--f", "q", "--x", "1")
    assert json.loads(out)["p"] == 7
    code, out, _ = run(capsys, "eval", "--f", "q", "--x", "1", "--p", "3")
    assert json.loads(out)["p"] == 3


def test_deterministic_subprocess():
    cmd = [sys.executable, "-m", "padic_mahler", "verify", "--suite", "ode", "--p", "3", "--precision", "10", "--seed", "4"]
    a = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, text=True, check=True).stdout
    assert a == b and a
