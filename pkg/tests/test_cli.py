import logging

import pytest

import cli
from errors import NumericalError
from oracle_checks import CheckResult
from run_history import get_history_manager


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


def test_sql_command(tmp_path):
    stem = tmp_path / "out" / "sql"
    assert cli.main(["sql", "--preset", "ligo", "--out", str(stem)]) == cli.EXIT_OK
    lines = (tmp_path / "out" / "sql.csv").read_text().splitlines()
    assert len(lines) == 2
    assert "qm_identity_residual" in lines[0].split(",")


def test_csv_is_byte_identical(tmp_path):
    for name in ("a", "b"):
        argv = ["quadrature", "--alpha", "1000", "--points", "60", "--out", str(tmp_path / name)]
        assert cli.main(argv) == cli.EXIT_OK
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["figure9"],
    ["figure1", "--k", "-2"],
    ["figure1", "--k", "seven"],
    ["sweep"],
    ["sweep", "--sweep", "k=1:2"],
    ["oracle-check"],
    ["sql"],
    ["figure1", "list"],
    ["figure1", "--verbose", "--quiet"],
])
def test_invalid_input(argv, tmp_path):
    assert cli.main(argv + ["--out", str(tmp_path / "x")]) == cli.EXIT_INVALID


def test_bad_log_level(monkeypatch, tmp_path):
    monkeypatch.setenv("CAVPHASE_LOG_LEVEL", "LOUD")
    assert cli.main(["sql", "--preset", "ligo", "--out", str(tmp_path / "sql")]) == cli.EXIT_INVALID


def test_numerical_failure(monkeypatch, tmp_path):
    def fail(config):
        raise NumericalError("series did not converge", {"q": 12})

    monkeypatch.setattr(cli, "build_table", fail)
    assert cli.main(["figure1", "--out", str(tmp_path / "fig")]) == cli.EXIT_NUMERICAL


def test_io_failure(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert cli.main(["sql", "--preset", "ligo", "--out", str(blocker / "sql")]) == cli.EXIT_IO


def test_missing_config_file_is_io_error(tmp_path):
    argv = ["sql", "--preset", "ligo", "--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path / "s")]
    assert cli.main(argv) == cli.EXIT_IO


def test_config_file_under_flags(tmp_path):
    config = tmp_path / "run.cfg"
    config.write_text(f"preset = ligo\ntime = 0.5\nout = {tmp_path / 'from_file'}\n")
    assert cli.main(["sql", "--config", str(config), "--time", "0.001"]) == cli.EXIT_OK
    lines = (tmp_path / "from_file.csv").read_text().splitlines()
    header, values = lines[0].split(","), lines[1].split(",")
    assert float(values[header.index("time")]) == 0.001


def test_oracle_check_writes_table(tmp_path):
    stem = tmp_path / "checks"
    assert cli.main(["oracle-check", "--preset", "closed-form-vs-expm", "--out", str(stem)]) == cli.EXIT_OK
    assert (tmp_path / "checks.csv").read_text().startswith("name,metric,tolerance,passed\n")


def test_failed_oracle_check(monkeypatch, tmp_path):
    failing = [CheckResult(name="purity", metric=1e-3, tolerance=1e-9, passed=False)]
    monkeypatch.setattr(cli, "run_oracle_check", lambda preset: failing)
    argv = ["oracle-check", "--preset", "disentangle", "--out", str(tmp_path / "checks")]
    assert cli.main(argv) == cli.EXIT_ORACLE_FAILED
    assert "False" in (tmp_path / "checks.csv").read_text()


def test_history_ledger(tmp_path, capsys):
    db = str(tmp_path / "runs.db")
    assert cli.main(["sql", "--preset", "ligo", "--out", str(tmp_path / "sql"), "--history-db", db]) == cli.EXIT_OK
    assert cli.main(["figure1", "--k", "-1", "--history-db", db]) == cli.EXIT_INVALID

    history = get_history_manager(db).get_run_history()
    assert [r["command"] for r in history] == ["figure1", "sql"]
    assert history[0]["exit_code"] == cli.EXIT_INVALID
    assert history[0]["parameters"] == {"k": -1.0}
    assert history[1]["outputs"] == [str(tmp_path / "sql.csv")]

    capsys.readouterr()
    assert cli.main(["history", "list", "--history-db", db, "--command", "sql"]) == cli.EXIT_OK
    listed = capsys.readouterr().out.splitlines()
    assert len(listed) == 1 and "\tsql\t" in listed[0]

    assert cli.main(["history", "stats", "--history-db", db]) == cli.EXIT_OK
    assert "total_runs: 2" in capsys.readouterr().out

    assert cli.main(["history", "export", "--history-db", db, "--out", str(tmp_path / "ledger")]) == cli.EXIT_OK
    assert (tmp_path / "ledger.csv").exists()
    assert len(get_history_manager(db).get_run_history()) == 2


def test_history_needs_database(tmp_path):
    assert cli.main(["history", "list"]) == cli.EXIT_INVALID


def test_history_from_environment(monkeypatch, tmp_path):
    db = str(tmp_path / "env.db")
    monkeypatch.setenv("CAVPHASE_HISTORY_DB", db)
    assert cli.main(["sql", "--preset", "ligo", "--out", str(tmp_path / "sql")]) == cli.EXIT_OK
    assert get_history_manager(db).get_statistics()["total_runs"] == 1


def test_phase_dist_narrow_large_amplitude(tmp_path):
    argv = ["phase-dist", "--k", "7", "--tau", "0.01", "--alpha", "500", "--format", "csv",
            "--out", str(tmp_path / "dist")]
    assert cli.main(argv) == cli.EXIT_OK
    header = (tmp_path / "dist.csv").read_text().splitlines()[0]
    assert header == "theta,canonical,heterodyne,gaussian_comb,gaussian"
