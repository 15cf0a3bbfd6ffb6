import csv
import io

import pytest
from sklearn.base import clone

from driftscan import (
    ConformanceDriftDetector,
    DetectorConfig,
    DriftReport,
    EventLog,
    confirm_drift,
    detect,
    identify_drift,
)
from driftscan.exceptions import InputTooSmallError
from driftscan.loggen import LOAN_MODEL, PATTERNS, generate_entry, play_out
from driftscan.process_tree import parse_tree

from conftest import L1, L2

T, F = True, False


def test_identify_drift_examples():
    assert not identify_drift(4, [1.0, 1.0], [F, F])
    assert identify_drift(4, [1.0, 1.0, 1.0, 0.9, 0.8], [F, F, F, F])
    assert identify_drift(4, [0.8] * 5, [F, F, T, T])
    assert not identify_drift(4, [0.8] * 5, [T, T, T, F])
    assert not identify_drift(4, [1.0] * 3, [])


def test_identify_drift_threshold():
    noisy = [1.0, 0.98, 1.01, 0.99, 1.0, 0.97]
    assert not identify_drift(10, noisy, [F] * 5)
    assert identify_drift(10, noisy, [F] * 5, p_threshold=1.0)


def test_confirm_drift_examples():
    assert confirm_drift(4, [T, T, T, T], [])
    assert not confirm_drift(4, [T, T, F, T], [T, F, T, T])
    assert confirm_drift(2, [F, T, T], [])
    assert confirm_drift(3, [F, F, F], [F, T, T, T])
    assert not confirm_drift(3, [T, T], [T, T])


@pytest.mark.parametrize("seed", range(5))
def test_stationary_log_has_no_drift(seed):
    model = parse_tree("seq(A, and(B, C), D, xor(E, F), G)")
    assert detect(play_out(model, 200, seed=seed), DetectorConfig(20)).drift_indices == []


def test_l1_drift_is_driven_by_precision():
    report = detect(EventLog.from_activities(L1), DetectorConfig(4))
    assert report.drift_indices == [12]
    first = [m for m in report.series if m.epoch == 0]
    assert all(m.fitness == 1.0 for m in first)
    assert [m.cand_precision for m in first][-4:] == [T] * 4
    assert not any(m.cand_fitness for m in first)


def test_l2_drift_is_driven_by_fitness():
    report = detect(EventLog.from_activities(L2), DetectorConfig(4))
    assert report.drift_indices == [10]
    first = [m for m in report.series if m.epoch == 0]
    assert all(m.precision == 1.0 for m in first)
    assert [m.cand_fitness for m in first][-4:] == [T] * 4


def test_spliced_parallel_variant():
    entry = generate_entry(LOAN_MODEL, "pl", size=1000, period=500, seed=7, model_name="loan")
    drifts = detect(entry.log, DetectorConfig(100)).drift_indices
    assert len(drifts) == 1 and 500 <= drifts[0] <= 510


@pytest.mark.parametrize("pattern", PATTERNS)
def test_single_change_completeness(pattern):
    n = 100
    entry = generate_entry(LOAN_MODEL, pattern, size=1000, period=500, seed=7, model_name="loan")
    drifts = detect(entry.log, DetectorConfig(n)).drift_indices
    assert len(drifts) == 1
    assert abs(drifts[0] - 500) <= n / 10 + 5


def test_report_invariants_and_epochs():
    entry = generate_entry(LOAN_MODEL, "sw", size=1000, period=250, seed=5, model_name="loan")
    n = 50
    report = detect(entry.log, DetectorConfig(n))
    d = report.drift_indices
    assert d == sorted(set(d)) and all(x <= len(entry.log) - n for x in d)
    assert all(b - a >= n for a, b in zip(d, d[1:]))
    starts = [m.window_start for m in report.series]
    assert starts == list(range(len(starts)))
    # series are cleared per epoch: the |data| > n/2 guard holds the first flags down
    for epoch in {m.epoch for m in report.series}:
        rows = [m for m in report.series if m.epoch == epoch]
        assert not any(m.cand_fitness or m.cand_precision for m in rows[: n // 2])
    assert len(d) == 3


def test_log_must_exceed_window():
    with pytest.raises(InputTooSmallError):
        detect(EventLog.from_activities(L1), DetectorConfig(16))


@pytest.mark.parametrize("kwargs", [{"window_size": 3}, {"window_size": 4.0},
                                    {"window_size": 10, "p_threshold": 0.0},
                                    {"window_size": 10, "replay_budget": 0}])
def test_config_validation(kwargs):
    with pytest.raises((TypeError, ValueError)):
        DetectorConfig(**kwargs)


def test_report_serialization():
    report = detect(EventLog.from_activities(L1), DetectorConfig(4))
    back = DriftReport.from_json(report.to_json())
    assert back == report
    rows = list(csv.reader(io.StringIO(report.series_csv())))
    assert rows[0] == ["window_start", "fitness", "precision"]
    assert len(rows) - 1 == len(report.series)
    assert set(report.to_dict()) == {"config", "log_size", "drift_indices", "series"}
    assert set(report.to_dict()["series"][0]) >= {"window_start", "fitness", "precision",
                                                   "cand_fitness", "cand_precision"}


def test_estimator_api():
    est = ConformanceDriftDetector(window_size=4)
    assert est.get_params() == {"window_size": 4, "p_threshold": 0.05, "replay_budget": 10000}
    assert clone(est).set_params(window_size=8).window_size == 8
    assert est.fit_predict(L1) == [12]
    assert est.drift_indices_ == [12]
    assert len(est.transform()) == len(est.report_.series)
    assert est.score(L1, [8], epsilon=4) == 1.0
    with pytest.raises(ValueError):
        ConformanceDriftDetector(window_size=2).fit(L1)
