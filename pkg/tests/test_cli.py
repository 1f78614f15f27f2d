import csv
import json

import pytest

from dioph_adiabatic.cli import dump_experiment, load_experiment, main

DEMO = """\
[experiment]
polynomial = x1 - 2
alphas = 1+0i
cutoff = 12
boundary = antiperiodic
wrap_coefficient = 1+0i
t_initial = 1
t_ratio = 2
t_count = 4
steps_per_unit_time = 100
grid_points = 9
"""


@pytest.fixture
def demo_cfg(tmp_path):
    path = tmp_path / "demo.cfg"
    path.write_text(DEMO)
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_writes_outputs(demo_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", "--config", str(demo_cfg), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["polynomial"] == "x1 - 2"
    rows = _rows(out / "probabilities.csv")
    assert rows[0] == ["T", "label", "probability"]
    assert len(rows) == 1 + 4 * 13
    # full round-trip float formatting
    first = rows[1]
    assert float(first[2]) == report["probabilities"][0][0]
    scan = _rows(out / "condition_scan.csv")
    assert scan[0] == ["s", "pair_i", "pair_j", "abs_element"]
    assert len(scan) == 10
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config_hash"] == report["config_hash"]
    assert "verdict=" in capsys.readouterr().out


def test_run_missing_config(tmp_path, capsys):
    missing = tmp_path / "missing.cfg"
    assert main(["run", "--config", str(missing)]) == 1
    assert str(missing) in capsys.readouterr().err


def test_unknown_subcommand_and_flag(demo_cfg):
    assert main(["fly"]) == 1
    assert main(["run", "--config", str(demo_cfg), "--bogus"]) == 1


def test_bad_config_key(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text(DEMO + "colour = blue\n")
    assert main(["run", "--config", str(path)]) == 1


def test_numerical_guard_exit_code(tmp_path):
    path = tmp_path / "guard.cfg"
    path.write_text(DEMO.replace("x1 - 2", "x1^30").replace("cutoff = 12", "cutoff = 12\n"))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2
    path.write_text(DEMO.replace("cutoff = 12", "cutoff = 4"))
    assert main(["run", "--config", str(path), "--out", str(tmp_path / "o")]) == 2


def test_assert_match_exit_code(tmp_path, monkeypatch):
    import dioph_adiabatic.cli as cli

    real = cli.run_experiment

    def forced(config, workers=None):
        report = real(config, workers)
        report.verdict = "mismatch"
        return report

    monkeypatch.setattr(cli, "run_experiment", forced)
    path = tmp_path / "demo.cfg"
    path.write_text(DEMO.replace("t_count = 4", "t_count = 1"))
    out = str(tmp_path / "o")
    assert main(["run", "--config", str(path), "--out", out, "--assert-match"]) == 3
    assert main(["run", "--config", str(path), "--out", out]) == 0


def test_dump_config_round_trip(demo_cfg, tmp_path):
    dumped = tmp_path / "dumped.cfg"
    assert main(["run", "--config", str(demo_cfg), "--dump-config", str(dumped)]) == 0
    a = load_experiment(demo_cfg)
    b = load_experiment(dumped)
    assert a == b
    assert a.config_hash() == b.config_hash()
    assert dump_experiment(b) == dumped.read_text()


def test_scan_inline_prints_csv(capsys):
    argv = ["scan", "--poly", "x1-2", "--alpha", "1+0i", "--nmax", "8", "--bc", "antiperiodic", "--grid", "19"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "s,pair_i,pair_j,abs_element"
    assert len(lines) == 20
    values = [float(line.split(",")[3]) for line in lines[1:]]
    assert min(values) == pytest.approx(6.17294481694945e-06, rel=1e-6)


def test_scan_threads_do_not_change_output(capsys):
    argv = ["scan", "--poly", "x1-2", "--nmax", "6", "--grid", "7"]
    main(argv + ["--threads", "1"])
    one = capsys.readouterr().out
    main(argv + ["--threads", "3"])
    assert capsys.readouterr().out == one


def test_search_writes_hits(tmp_path):
    cfg = tmp_path / "search.cfg"
    cfg.write_text("[search]\ndimension = 5\ntrials = 480\nseed = 1\nboundary = abrupt\n")
    out = tmp_path / "s"
    assert main(["search", "--config", str(cfg), "--out", str(out)]) == 0
    rows = _rows(out / "search_hits.csv")
    assert rows[0] == ["trial", "seed", "config_hash", "violating_label", "probability", "T"]
    assert [r[0] for r in rows[1:]] == ["357", "381", "405", "472"]
    report = json.loads((out / "search_report.json").read_text())
    assert report["hits"][0]["config_hash"] == rows[1][2]


def test_search_requires_config():
    assert main(["search"]) == 1


def test_probe_outputs_json(capsys):
    argv = ["probe", "--poly", "x1-2", "--nmax", "16", "--bc", "antiperiodic", "--s", "0.5",
            "--index", "3", "--pair", "0,1", "--upto", "10"]
    assert main(argv) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["variation_sum"] == 68
    assert result["max_residual"] <= 1e-8 * result["residual_scale"]


def test_probe_rejects_s_one():
    assert main(["probe", "--poly", "x1-2", "--s", "1.0"]) == 1
