import json
import subprocess
import sys

import pytest

from cli_cases import GOLDEN, ROOT, golden_path
from unipotent.cli import main, parse_away, parse_args, parse_connection_text, run
from unipotent.coeffs import PAdicNumber
from unipotent.errors import DomainError
from unipotent.lcs_dims import DimReport, EllipticReport
from unipotent.report import (CheckReport, Report, SolveReport, decode_padic, encode_padic,
                              encode_rational)
from unipotent.selmer_bounds import AwayPlace, BoundReport


@pytest.fixture(autouse=True)
def _at_root(monkeypatch):
    monkeypatch.chdir(ROOT)


def run_json(argv):
    status, out = run(list(argv) + ["--format", "json"])
    assert status == 0
    return out


def test_dims_table(capsys):
    assert main(["dims", "--genus", "0", "--punctures", "3", "--max-n", "6"]) == 0
    out = capsys.readouterr().out
    d = [int(line.split()[1]) for line in out.splitlines()[1:]]
    assert d == [2, 1, 2, 3, 6, 9]


def test_dims_invalid_shape_exit_1(capsys):
    assert main(["dims", "--genus", "0", "--punctures", "0"]) == 1
    assert "m = 2g + s - 1 = -1" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert main(["dims", "--no-such-flag"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["polylog", "--p", "5", "--x", "1/"]) == 1


def test_crossing_none_exit_0():
    rep = Report.from_json(run_json(GOLDEN["crossing_none"]))
    assert rep.results.crossing is None


def test_crossing_table_marks_none(capsys):
    assert main(GOLDEN["crossing_none"]) == 0
    assert "crossing level: none" in capsys.readouterr().out


def test_elliptic_verdict(capsys):
    assert main(["crossing", "--elliptic-example", "--rank", "1"]) == 0
    assert "finiteness criterion satisfied at level 3" in capsys.readouterr().out


def test_invariant_violation_exit_2(monkeypatch, capsys):
    from unipotent import cli
    monkeypatch.setattr(cli, "gauge_identity_holds", lambda *a: False)
    assert main(["reduce", "--file", "tests/golden/zdz.txt"]) == 2


def test_config_file_and_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# dims run\ngenus = 0\npunctures = 3\nmax_n = 4\ncompact = false\n")
    neg = tmp_path / "neg.cfg"
    neg.write_text("p = 5\nx = -5\n")
    assert parse_args(["polylog", "--config", str(neg)]).x == -5
    args = parse_args(["dims", "--config", str(cfg)])
    assert (args.genus, args.punctures, args.max_n, args.compact) == (0, 3, 4, False)
    args = parse_args(["dims", "--config", str(cfg), "--max-n", "7"])
    assert args.max_n == 7
    bad = tmp_path / "bad.cfg"
    bad.write_text("frobnicate = 3\n")
    with pytest.raises(DomainError):
        parse_args(["dims", "--config", str(bad)])


def test_config_crossing_keys(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("genus = 1\npunctures = 2\nmode = weak_jannsen\nK = 2\nk = 2\n"
                   "n-max = 12\naway = 2:1, :\n")
    rep = Report.from_json(run_json(["crossing", "--config", str(cfg)]))
    assert rep.results.mode == "weak_jannsen" and rep.results.data.K == 2
    assert rep.results.data.away == (AwayPlace(2, 1), AwayPlace(2, 1))


def test_parse_away():
    assert parse_away("4:2,1:") == (AwayPlace(4, 2), AwayPlace(1, None))
    with pytest.raises(DomainError):
        parse_away("4")


def test_connection_file_grammar():
    spec = parse_connection_text("""
        # comment line
        places = 0, 1, -1/2   # three punctures
        rank = 3
        basepoint = 1/3
        omega[1, 2] = z^2/(z-1)
        alpha[1] = 1/z
        alpha[2] = 1/(z-1)
    """)
    assert spec.places.poles == (0, 1, -0.5) and spec.rank == 3
    assert spec.basepoint == pytest.approx(1 / 3)
    assert (1, 2) in spec.omega and len(spec.forms()) == 2
    with pytest.raises(DomainError, match="line 1"):
        parse_connection_text("places = 0, 1/0")
    with pytest.raises(DomainError, match="position"):
        parse_connection_text("omega[1,2] = z +")
    with pytest.raises(DomainError, match="unknown key"):
        parse_connection_text("colour = red")
    with pytest.raises(DomainError):
        parse_connection_text("alpha[2] = z").forms()


def test_default_basepoint_skips_places():
    assert parse_connection_text("places = 0, -1").resolved_basepoint() == 2


def test_solve_file_and_rational_evaluation(tmp_path):
    f = tmp_path / "c.txt"
    f.write_text("places = 0, 1\nbasepoint = -1\n")
    out = run_json(["solve", "--file", str(f), "--depth", "2", "--order", "8", "--x=-1/2"])
    rep = Report.from_json(out)
    assert isinstance(rep.results, SolveReport)
    assert any("formal evaluation" in w for w in rep.warnings)
    assert rep.to_json() == out


def test_solve_padic_evaluation():
    out = run_json(["solve", "--standard-p1", "--depth", "2", "--order", "20", "--x", "5,10",
                    "--p", "5"])
    rep = Report.from_json(out)
    x, value = rep.results.evaluations[0]
    assert x == PAdicNumber.exact(5, 5) and value[(2,)].has_digits
    assert rep.to_json() == out


def test_solve_needs_one_source():
    assert main(["solve"]) == 1
    assert main(["solve", "--standard-p1", "--file", "x.txt"]) == 1


def test_check_degenerate_file(tmp_path):
    f = tmp_path / "deg.txt"
    f.write_text("alpha[1] = 1\nalpha[2] = 1\nbasepoint = 0\n")
    rep = Report.from_json(run_json(["check", "--file", str(f), "--depth", "1",
                                     "--deg-bound", "0", "--order", "12"]))
    assert not rep.results.full_rank and not rep.results.passed


def test_csv_and_table_formats():
    status, out = run(GOLDEN["crossing_p1"] + ["--format", "csv"])
    lines = out.splitlines()
    assert lines[0].startswith("level,d,") and len(lines) == 51
    status, out = run(GOLDEN["polylog_p7"] + ["--format", "csv"])
    assert out.splitlines()[1] == "p,7"
    status, out = run(GOLDEN["check_p1"])
    assert "independence.full_rank" in out


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_round_trip(name):
    out = run_json(GOLDEN[name])
    data = json.loads(out)
    assert list(data) == ["tool_version", "subcommand", "inputs", "results", "warnings"]
    rep = Report.from_json(out)
    assert rep.to_json() == out
    kinds = {"dims": DimReport, "polylog": PAdicNumber, "check": CheckReport}
    if rep.subcommand in kinds:
        assert isinstance(rep.results, kinds[rep.subcommand])
    if rep.subcommand == "crossing":
        assert isinstance(rep.results, (BoundReport, EllipticReport))


def test_padic_encoding():
    x = PAdicNumber.from_rational(-3, 5, 6) / 25
    assert decode_padic(encode_padic(x)) == x
    assert encode_padic(PAdicNumber.exact(-3, 5)) == {"p": 5, "exact": "-3"}
    assert decode_padic(encode_padic(PAdicNumber.big_oh(5, 4))) == PAdicNumber.big_oh(5, 4)
    assert encode_rational(-6 / 1) == "-6"


def test_entry_point_subprocess():
    argv = GOLDEN["dims_elliptic"] + ["--format", "json"]
    cmd = [sys.executable, "-m", "unipotent.cli"] + argv
    first = subprocess.run(cmd, capture_output=True, text=True, cwd=ROOT)
    second = subprocess.run(cmd, capture_output=True, text=True, cwd=ROOT)
    assert first.returncode == 0 and first.stdout == second.stdout
    assert first.stdout == golden_path("dims_elliptic").read_text()
