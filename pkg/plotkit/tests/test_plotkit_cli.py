"""Command-line behavior: exit codes, stderr contract, module invocation."""

import subprocess
import sys

from plotkit import cli


def test_run_renders_bundle_dir(make_csv, tmp_path, capsys):
    make_csv([("a", 0, 1, 1.0), ("a", 0, 2, 2.0)])
    out = tmp_path / "fig.png"
    rc = cli.main(["--bundle", str(tmp_path), "--out", str(out)])
    assert rc == 0
    assert out.exists()
    assert str(out) in capsys.readouterr().out


def test_loglog_flag_accepted(make_csv, tmp_path):
    make_csv([("a", 0, 2, 1.0), ("a", 0, 8, 3.0)])
    assert cli.main(["--bundle", str(tmp_path), "--out", str(tmp_path / "f.png"),
                     "--loglog"]) == 0


def test_missing_bundle_dir_exits_2(tmp_path, capsys):
    rc = cli.main(["--bundle", str(tmp_path / "nope"), "--out", str(tmp_path / "f.png")])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_schema_violation_exits_2_with_column_names(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("scenario,seed,t,total_cost,regret,epoch,aborted\nx,0,1,1,1,1,0\n",
                   encoding="utf-8")
    rc = cli.main(["--bundle", str(tmp_path), "--out", str(tmp_path / "f.png")])
    captured = capsys.readouterr()
    assert rc == 2
    assert "total_cost" in captured.err
    assert "cumulative_cost" in captured.err


def test_module_invocation(make_csv, tmp_path):
    make_csv([("a", 0, 1, 1.0), ("a", 0, 4, 2.0)])
    out = tmp_path / "fig.png"
    proc = subprocess.run(
        [sys.executable, "-m", "plotkit.cli", "--bundle", str(tmp_path),
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert out.exists()
