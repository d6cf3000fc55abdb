import csv
import json
import subprocess
import sys

import pytest

from gaphilbert.cli import main
from gaphilbert.pipeline import ConfigError, RunConfig, parse_config

CSVS = ["surface.csv", "theta_scan.csv", "spectrum.csv", "asymptotics.csv", "continue.csv",
        "instability.csv", "stability.csv"]


@pytest.fixture(scope="module")
def run_all(tmp_path_factory):
    out = tmp_path_factory.mktemp("all")
    code = main(["all", "--out", str(out)])
    return code, out


def test_all_writes_every_table(run_all):
    code, out = run_all
    assert code == 0
    for name in CSVS:
        with open(out / name) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) > 1, name


def test_summary_keys(run_all):
    _, out = run_all
    summary = json.loads((out / "summary.json").read_text())
    keys = [k for k in summary if k.startswith("c")]
    assert len(keys) == 12
    assert {"version", "config_hash", "config"} <= set(summary["provenance"])
    assert summary["all_pass"] == all(summary[k]["pass"] for k in keys)


def test_headers(run_all):
    _, out = run_all
    with open(out / "spectrum.csv") as fh:
        assert next(csv.reader(fh)) == ["n", "lambda", "kappa", "sign_changes", "kappa_tilde", "|kappa-kappa_tilde|"]
    with open(out / "continue.csv") as fh:
        assert next(csv.reader(fh)) == ["z", "recovered", "truth", "abs_err", "tail_bound"]


def test_deterministic(run_all, tmp_path):
    _, out = run_all
    assert main(["all", "--out", str(tmp_path)]) == 0
    for name in CSVS + ["summary.json"]:
        assert (out / name).read_bytes() == (tmp_path / name).read_bytes(), name


def test_single_subcommand_with_flags(tmp_path):
    assert main(["continue", "--out", str(tmp_path), "--phantom-degree", "2", "--points", "3",
                 "--omega", "0.1", "--nmax", "10"]) == 0
    with open(tmp_path / "continue.csv") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 1 + 2 * 3


def test_bad_endpoints_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("endpoints = -3 -2 1 -1 2 3\n")
    assert main(["surface", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "a_3=1.0 >= a_4=-1.0" in capsys.readouterr().err


def test_unknown_key_names_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("# comment\nfoo = 1\n")
    assert main(["surface", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "bad.cfg:2: unknown key 'foo'" in capsys.readouterr().err


def test_missing_config_exit_2(tmp_path):
    assert main(["surface", "--config", str(tmp_path / "none.cfg"), "--out", str(tmp_path)]) == 2


def test_numerical_failure_exit_1(tmp_path):
    cfg = tmp_path / "coarse.cfg"
    cfg.write_text("nystrom_n = 4\n")
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_parse_config_types():
    cfg = parse_config("nq: 64\nomega = 0.1  # margin\nJ = -1.9, -1.2, 1.2, 1.9\n", source="x")
    assert cfg.nq == 64 and cfg.omega == 0.1
    assert cfg.J == [(-1.9, -1.2), (1.2, 1.9)]
    with pytest.raises(ConfigError, match="x:1: bad value"):
        parse_config("nq = many", source="x")
    with pytest.raises(ConfigError, match="expected 'key = value'"):
        parse_config("nq 64")


def test_validate_rejects_out_of_range():
    with pytest.raises(ConfigError):
        RunConfig(s1=5).validate()
    with pytest.raises(ConfigError):
        RunConfig(kappa_max=-1.0).validate()


def test_digest_tracks_config():
    assert RunConfig().digest() == RunConfig().digest()
    assert RunConfig(seed=1).digest() != RunConfig().digest()


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "gaphilbert", "surface", "--out", str(tmp_path)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "surface.csv").exists()
