import logging

import numpy as np
import pytest

from dioph_adiabatic import (
    ExperimentConfig,
    TrialConfig,
    counterexample_search,
    has_solution_under_cutoff,
    identify,
    parse,
    run_experiment,
    run_trial,
)
from dioph_adiabatic.criterion import draw_trial
from dioph_adiabatic.errors import ConfigError


@pytest.fixture(scope="module")
def linear_report():
    return run_experiment(ExperimentConfig("x1 - 2", t_count=7))


def test_identify_threshold_and_ties():
    assert identify(np.array([0.3, 0.7])) == (1, False)
    assert identify(np.array([0.5, 0.5])) == (None, True)
    assert identify(np.array([0.5 + 5e-10, 0.5 - 5e-10])) == (None, True)
    assert identify(np.array([0.4, 0.35, 0.25])) == (None, False)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig("x1 - 2", boundary="twisted")
    with pytest.raises(ConfigError):
        ExperimentConfig("x1 - 2", t_ratio=1.0)
    with pytest.raises(ConfigError):
        ExperimentConfig("x1 + x2", alphas=(1.0,))
    with pytest.raises(ConfigError):
        ExperimentConfig("x1 - 2", alphas=(0.0,))
    with pytest.raises(ConfigError):
        ExperimentConfig("x1 -", alphas=(1.0,))


def test_config_hash_is_canonical():
    a = ExperimentConfig("x1 - 2", alphas=("1+0i",))
    b = ExperimentConfig("-2 + x1", alphas=(1.0,))
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != ExperimentConfig("x1 - 3").config_hash()


def test_linear_problem_matches(linear_report):
    r = linear_report
    assert r.verdict == "match"
    assert r.identified[-1] == (2,)
    assert r.ground_label == (2,)
    assert r.ground_energy == 0
    assert r.solution_verdict == "has solution"
    assert r.identified_is_solution is True
    assert r.premise_ok


def test_monotone_trend_and_exclusivity(linear_report):
    r = linear_report
    assert r.probability_of((2,), -1) > r.probability_of((2,), 0)
    for p in r.probabilities:
        assert np.sum(p > 0.5) <= 1
        assert p.sum() == pytest.approx(1.0, abs=1e-9)


def test_solution_consistency(linear_report):
    r = linear_report
    if r.verdict == "match" and r.ground_energy == 0:
        assert (r.solution is not None) == r.identified_is_solution
        assert has_solution_under_cutoff(parse("x1 - 2"), 12) == r.solution


def test_no_solution_case():
    r = run_experiment(ExperimentConfig("3*x1 - 1", t_count=7))
    assert r.identified[-1] == (0,)
    assert r.ground_energy == 1
    assert r.solution_verdict == "no solution under cutoff"
    assert r.identified_is_solution is False
    assert has_solution_under_cutoff(parse("3*x1 - 1"), 12) is None


def test_degenerate_problem_has_no_verdict(caplog):
    with caplog.at_level(logging.WARNING):
        r = run_experiment(ExperimentConfig("0", t_count=2))
    assert r.ground_degenerate
    assert r.verdict == "skipped-degenerate"
    assert "degenerate" in caplog.text


def test_premise_violation_is_reported():
    # small alpha keeps almost all weight on |0>, an excited label of D = x1 - 2
    r = run_experiment(ExperimentConfig("x1 - 2", alphas=(0.1,), cutoff=6, t_count=1))
    assert not r.premise_ok
    assert r.premise_violations[0][0] == (0,)
    assert r.premise_violations[0][1] > 0.5


def test_report_serializes(linear_report):
    d = linear_report.to_dict()
    assert d["verdict"] == "match"
    assert d["solution_verdict"] == "has solution"
    assert len(d["probabilities"]) == 7
    assert d["condition_scan"]["grid_points"] == 19


def test_experiment_is_replayable():
    cfg = ExperimentConfig("x1 - 2", t_count=3, cutoff=9)
    a = run_experiment(cfg, workers=1)
    b = run_experiment(cfg, workers=3)
    for p, q in zip(a.probabilities, b.probabilities):
        np.testing.assert_array_equal(p, q)


def test_draw_trial_distribution_bounds():
    for k in range(200):
        cfg = draw_trial(k, 7, 5, "abrupt")
        assert 0.3 <= abs(cfg.alpha) <= 3.0
        assert all(-5 <= c <= 5 for c in cfg.coefficients)
        assert len(cfg.coefficients) == 3
        assert 0.5 <= cfg.total_time <= 20.0
        assert cfg.cutoff == 4


def test_trial_config_round_trip():
    cfg = draw_trial(3, 11, 5, "antiperiodic", 0.5 + 1j)
    assert TrialConfig.from_dict(cfg.to_dict()) == cfg


def test_search_dimension_two_has_no_hits():
    for bc in ("abrupt", "antiperiodic"):
        report = counterexample_search(dimension=2, trials=300, seed=5, boundary=bc)
        assert report.hits == []
        assert report.evaluated > 0


def test_search_is_thread_independent_and_replayable():
    a = counterexample_search(dimension=5, trials=480, seed=1, workers=1)
    b = counterexample_search(dimension=5, trials=480, seed=1, workers=4)
    assert a.to_dict() == b.to_dict()
    # regression: this stream holds abrupt-truncation hits
    assert [h.trial for h in a.hits] == [357, 381, 405, 472]
    for hit in a.hits:
        replay = run_trial(TrialConfig.from_dict(hit.config.to_dict()))
        assert replay["probabilities"][hit.violating_label] == hit.probability


def test_search_report_counts_add_up():
    r = counterexample_search(dimension=4, trials=60, seed=3)
    assert r.evaluated + r.skipped_degenerate + r.skipped_premise == 60
