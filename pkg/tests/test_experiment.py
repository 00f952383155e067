import numpy as np
import pytest

from delaylearn.experiment import (child_seed, encode_all, prepare, present, run_single,
                                   run_sweep, summarize)


@pytest.fixture(scope="module")
def config(table1):
    return table1.with_overrides(seed=11)


@pytest.fixture(scope="module")
def report(config, dataset):
    return run_single(config, dataset)


def test_train_count_zero_is_identity(config, dataset):
    rep = run_single(config.with_overrides(train_instances=0), dataset)
    assert rep.topology.identical_to(rep.initial_topology)
    assert rep.train_order == []
    for theta in config.pgp_thresholds:
        b, a = rep.scores["baseline"][theta], rep.scores["trained"][theta]
        assert b.trained_accuracy == a.trained_accuracy
        assert b.unseen_accuracy == a.unseen_accuracy


def test_end_to_end_determinism(config, dataset, report):
    again = run_single(config, dataset)
    assert again.topology.identical_to(report.topology)
    assert again.test_ids == report.test_ids and again.train_order == report.train_order
    for phase in report.scores:
        for theta, s in report.scores[phase].items():
            assert np.array_equal(s.assignment, again.scores[phase][theta].assignment)


def test_baseline_never_mutates_delays(config, dataset):
    topology, _, test_set = prepare(config, dataset)
    snapshot = topology.copy()
    present(topology, encode_all(test_set, config), test_set, config)
    assert topology.identical_to(snapshot)


def test_training_changes_delays(report):
    assert not report.topology.identical_to(report.initial_topology)
    assert report.topology.delay.min() >= 1.0 and report.topology.delay.max() <= 60.0


def test_protocol_bookkeeping(config, dataset, report):
    _, train_set, test_set = prepare(config, dataset)
    assert report.test_ids == [i.index for i in test_set]
    assert report.test_labels == [0] * 25 + [1] * 25 + [2] * 25
    assert sorted(report.train_order) == sorted(i.index for i in train_set)
    assert not set(report.train_order) & set(report.test_ids)
    assert {int(dataset.labels[i]) for i in report.train_order} == {0, 1}
    for phase in ("baseline", "trained"):
        for s in report.scores[phase].values():
            assert len(s.assignment) == 75


def test_child_seeds():
    assert [child_seed(100, i) for i in range(3)] == [100, 101, 102]


def test_sweep_of_one_equals_single(config, dataset, report):
    results, summary = run_sweep(config, 1, dataset)
    assert results[0].topology.identical_to(report.topology)
    for theta in config.pgp_thresholds:
        s = report.scores["trained"][theta]
        assert summary.rows[theta, "trained.trained.mean_accuracy"] == s.trained_accuracy
        assert summary.rows[theta, "trained.unseen.max_accuracy"] == s.unseen_accuracy


def test_sweep_independent_of_jobs(config, dataset):
    cfg = config.with_overrides(train_instances=5)
    a, sa = run_sweep(cfg, 3, dataset, jobs=1)
    b, sb = run_sweep(cfg, 3, dataset, jobs=3)
    assert sa.rows == sb.rows
    assert all(np.array_equal(sa.histograms[k], sb.histograms[k]) for k in sa.histograms)
    assert all(x.topology.identical_to(y.topology) for x, y in zip(a, b))


def test_summary_histograms(report, config):
    summary = summarize([report, report], config.pgp_thresholds)
    assert len(summary.histograms) == len(config.pgp_thresholds) * 2 * 2
    assert all(h.sum() == 2 for h in summary.histograms.values())


def test_sweep_needs_a_network(config, dataset):
    with pytest.raises(ValueError):
        run_sweep(config, 0, dataset)
