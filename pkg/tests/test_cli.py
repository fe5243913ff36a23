import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from qdeform import cli
from qdeform.cli import EXIT_CONVERGENCE, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, main, parse_q


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def jsonl(text):
    return [json.loads(line) for line in text.splitlines()]


@pytest.mark.parametrize("text,expected", [
    ("symbolic", None), ("1/2", Fraction(1, 2)), ("2", Fraction(2)), ("-3", Fraction(-3)), ("0.25", 0.25),
])
def test_parse_q(text, expected):
    got = parse_q(text)
    assert got == expected and type(got) is type(expected)


def test_verify_partitions(capsys):
    code, out, _ = run(capsys, "verify", "partitions", "--n", "5")
    assert code == EXIT_OK
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 15 and all(r["passed"] == "True" for r in rows)


def test_wick_qdisc_symbolic(capsys):
    code, out, _ = run(capsys, "fock", "wick", "--flavor", "qdisc", "--n", "3", "--q", "symbolic")
    assert code == EXIT_OK
    (row,) = jsonl(out)
    assert row["product"] == "[1][3][5]" and row["matches_product"] is True
    assert row["moment"] == "1 + 2*q + 3*q^2 + 3*q^3 + 3*q^4 + 2*q^5 + q^6"


def test_wick_qdisc_numeric(capsys):
    code, out, _ = run(capsys, "fock", "wick", "--flavor", "qdisc", "--n", "2", "--q", "0.5")
    assert code == EXIT_OK
    # [1][3] at q = 1/2
    assert jsonl(out)[0]["moment"] == pytest.approx(1.75)


def test_khintchine_boolean(capsys):
    code, out, _ = run(capsys, "khintchine", "--flavor", "boolean", "--N", "4", "--trials", "20",
                       "--seed", "7", "--per-trial")
    assert code == EXIT_OK
    (row,) = jsonl(out)
    assert len(row["per_trial"]) == 20
    assert all(abs(r - 1) < 1e-9 for r in row["per_trial"])
    assert {"flavor", "N", "q", "cutoff", "ratios", "seed"} <= set(row)


def test_khintchine_needs_q(capsys):
    code, _, err = run(capsys, "khintchine", "--flavor", "qccr")
    assert code == EXIT_USAGE and "numeric q" in err


def test_symbolic_rejected_for_float_commands(capsys):
    assert run(capsys, "fock", "norm", "--q", "symbolic")[0] == EXIT_USAGE
    assert run(capsys, "jackson", "--q", "symbolic")[0] == EXIT_USAGE


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == EXIT_USAGE
    assert run(capsys, "fock", "wick", "--q", "abc")[0] == EXIT_USAGE
    assert run(capsys, "conv", "--a", "1,2", "--b", "1")[0] == EXIT_USAGE
    assert run(capsys, "fock", "wick", "--flavor", "qccr", "--s", "2")[0] == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == EXIT_OK
    assert run(capsys, "fock", "--help")[0] == EXIT_OK


def test_verification_failure_code(capsys, monkeypatch):
    from qdeform import verify

    def failing(**kw):
        return verify.CheckResult("partitions", False, 0.0, "forced", [verify._row("x", "", 1, 2, False)])

    monkeypatch.setitem(verify.CHECKS, "partitions", failing)
    assert run(capsys, "verify", "partitions")[0] == EXIT_VERIFY


def test_convergence_failure_code(capsys, monkeypatch):
    from qdeform.errors import NonConvergenceError

    def boom(*a, **kw):
        raise NonConvergenceError("no")

    monkeypatch.setattr(cli, "q_moment_disc", boom)
    assert run(capsys, "jackson", "--q", "0.5")[0] == EXIT_CONVERGENCE


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# khintchine defaults\nflavor = boolean\nN = 2\ntrials = 3\nseed = 11\nper-trial = yes\n")
    code, out, _ = run(capsys, "khintchine", "--config", str(cfg))
    assert code == EXIT_OK
    row = jsonl(out)[0]
    assert (row["N"], row["trials"], row["seed"]) == (2, 3, 11) and "per_trial" in row
    code, out, _ = run(capsys, "khintchine", "--config", str(cfg), "--N", "3")
    assert jsonl(out)[0]["N"] == 3


def test_config_errors(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert run(capsys, "khintchine", "--config", str(bad))[0] == EXIT_USAGE
    bad.write_text("flavor = kesten\n")
    assert run(capsys, "khintchine", "--config", str(bad))[0] == EXIT_USAGE
    bad.write_text("no equals sign\n")
    assert run(capsys, "khintchine", "--config", str(bad))[0] == EXIT_USAGE
    assert run(capsys, "khintchine", "--config", str(tmp_path / "missing.cfg"))[0] == EXIT_USAGE


def test_output_file_and_format(capsys, tmp_path):
    target = tmp_path / "out.jsonl"
    code, out, _ = run(capsys, "partitions", "--n", "2", "--format", "jsonl", "-o", str(target))
    assert code == EXIT_OK and out == ""
    rows = jsonl(target.read_text())
    assert [r["cr"] for r in rows] == [0, 1, 0]


@pytest.mark.parametrize("argv", [
    ["khintchine", "--flavor", "qdisc", "--q", "0.5", "--N", "2", "--size", "2", "--trials", "3", "--seed", "4"],
    ["cumulants", "--q-grid", "0,1/2", "--depth", "3"],
    ["fock", "norm", "--flavor", "qccr", "--q", "0.3", "--cutoff", "12"],
])
def test_deterministic_output(capsys, argv):
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second and first[0] == EXIT_OK


def test_other_commands(capsys):
    code, out, _ = run(capsys, "qexact", "--op", "binom", "--n", "4", "--k", "2", "--q", "1/2")
    assert code == EXIT_OK and jsonl(out)[0]["at_q"] == "35/16"
    code, out, _ = run(capsys, "qexact", "--op", "exp-duality", "--n", "12")
    assert jsonl(out)[0]["product_is_one"] is True
    code, out, _ = run(capsys, "ortho", "--family", "continuous", "--n", "3", "--moments")
    assert [r["value"] for r in csv.DictReader(io.StringIO(out))] == ["1", "1", "2 + q", "5 + 6*q + 3*q^2 + q^3"]
    code, out, _ = run(capsys, "ortho", "--family", "continuous", "--n", "2", "--q", "1/2")
    assert [r["coefficient"] for r in csv.DictReader(io.StringIO(out))] == ["-1", "0", "1"]
    code, out, _ = run(capsys, "conv", "--a", "1,0,1", "--b", "1,1/2,1/3", "--q", "1/2")
    assert [r["value"] for r in csv.DictReader(io.StringIO(out))] == ["1", "1/2", "4/3"]
    code, out, _ = run(capsys, "fock", "residual", "--flavor", "inverse", "--q", "2")
    assert code == EXIT_OK and jsonl(out)[0]["residual"] == 0.0
    code, out, _ = run(capsys, "fock", "bm", "--n", "2", "--t", "3/2")
    assert jsonl(out)[0]["value"] == "9/4 + 9/4*q + 9/4*q^2"
    code, out, _ = run(capsys, "partitions", "--n", "3", "--stats", "histogram")
    assert sum(int(r["count"]) for r in csv.DictReader(io.StringIO(out))) == 15


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "qdeform.cli", "verify", "moments", "--n", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("target,check")
