"""Per-network protocol and multi-network sweeps.

One network: generate it, present every test instance with plasticity off
(baseline), present the training instances with plasticity on, then present
the same test instances in the same order again with plasticity off.  Each
phase's patterns are clustered and scored at every PGP threshold.
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dataio import build_split
from .encoder import encode
from .pgp import decode, extract
from .simulator import run_trial
from .topology import generate_feedforward

log = logging.getLogger(__name__)

PHASES = ("baseline", "trained")
EVALUATIONS = ("trained", "unseen")
HIST_BINS = np.linspace(0.0, 1.0, 11)

# purposes for derived random streams
_TOPOLOGY, _SPLIT, _ORDER = range(3)


def derived_seed(seed, purpose):
    return int(np.random.SeedSequence([int(seed), purpose]).generate_state(1)[0])


def child_seed(master_seed, index):
    """Seed of network ``index`` in a sweep; network 0 reuses the master seed."""
    return int(master_seed) + int(index)


@dataclass
class ExperimentReport:
    seed: int
    scores: dict  # phase -> {theta: ThresholdScore}
    topology: object
    initial_topology: object
    test_ids: list
    test_labels: list
    train_order: list
    readout_spikes: dict = field(default_factory=dict)  # phase -> mean spikes per trial

    def accuracy(self, phase, theta, evaluation="trained"):
        s = self.scores[phase][theta]
        return s.trained_accuracy if evaluation == "trained" else s.unseen_accuracy

    def separable(self, phase, theta, evaluation="trained"):
        s = self.scores[phase][theta]
        return s.trained_separable if evaluation == "trained" else s.unseen_separable


def encode_all(instances, config):
    return [encode(inst, t_max=config.t_max, dt=config.dt, invert=config.invert)
            for inst in instances]


def readout_neurons(config, topology):
    starts = topology.layer_starts
    out = []
    for layer in config.readout_layers:
        out.extend(range(int(starts[layer - 1]), int(starts[layer])))
    return out


def _trial_kwargs(config, backend):
    return dict(duration=config.duration, plasticity_config=config.plasticity,
                params=config.params, dt=config.dt, impulse_ms=config.impulse_ms,
                backend=backend)


def present(topology, patterns, instances, config, backend=None):
    """Test-phase presentations (plasticity off); returns the readout patterns."""
    neurons = readout_neurons(config, topology)
    kwargs = _trial_kwargs(config, backend)
    pgps = []
    for k, (pattern, inst) in enumerate(zip(patterns, instances)):
        record, _ = run_trial(topology, pattern, plasticity_enabled=False, **kwargs)
        pgps.append(extract(record, neurons, trial=k, label=inst.label))
    return pgps


def train(topology, patterns, config, rng, backend=None):
    """Present ``patterns`` with plasticity on, reshuffled every epoch."""
    kwargs = _trial_kwargs(config, backend)
    order = []
    for _ in range(config.epochs):
        perm = rng.permutation(len(patterns)).tolist()
        order.extend(perm)
        for k in perm:
            _, topology = run_trial(topology, patterns[k], plasticity_enabled=True, **kwargs)
    return topology, order


def prepare(config, dataset):
    """Untrained network and (train, test) instances for ``config.seed``."""
    topology = generate_feedforward(
        config.layer_sizes, config.connection_probability, config.weight,
        (config.init_delay_min, config.init_delay_max), derived_seed(config.seed, _TOPOLOGY))
    split = replace(config.split, seed=derived_seed(config.seed, _SPLIT))
    train_set, test_set = build_split(dataset.images, dataset.labels, split)
    return topology, train_set, test_set


def train_network(topology, train_set, config, backend=None):
    rng = np.random.default_rng(derived_seed(config.seed, _ORDER))
    return train(topology, encode_all(train_set, config), config, rng, backend)


def run_single(config, dataset, backend=None):
    seed = config.seed
    topology, train_set, test_set = prepare(config, dataset)
    test_patterns = encode_all(test_set, config)
    trained_cls = tuple(config.digits_trained)
    unseen_cls = tuple(config.digits_unseen)

    scores, spikes = {}, {}
    baseline = present(topology, test_patterns, test_set, config, backend)
    scores["baseline"] = decode(baseline, config.pgp_thresholds, trained_cls, unseen_cls, backend)
    spikes["baseline"] = float(np.mean([len(p) for p in baseline]))

    trained, order = train_network(topology, train_set, config, backend)

    after = present(trained, test_patterns, test_set, config, backend)
    scores["trained"] = decode(after, config.pgp_thresholds, trained_cls, unseen_cls, backend)
    spikes["trained"] = float(np.mean([len(p) for p in after]))
    log.debug("network seed %d: readout spikes %.1f -> %.1f", seed,
              spikes["baseline"], spikes["trained"])
    return ExperimentReport(seed, scores, trained, topology,
                            [inst.index for inst in test_set], [inst.label for inst in test_set],
                            [train_set[k].index for k in order], spikes)


@dataclass
class SweepSummary:
    n_networks: int
    thresholds: tuple
    rows: dict  # (theta, name) -> value
    histograms: dict  # (theta, phase, evaluation) -> counts per HIST_BINS bin


def _histogram(values):
    counts, _ = np.histogram(values, bins=HIST_BINS)
    return counts


def summarize(reports, thresholds):
    rows, hists = {}, {}
    n = len(reports)
    for theta in thresholds:
        for phase in PHASES:
            for ev in EVALUATIONS:
                acc = np.array([r.accuracy(phase, theta, ev) for r in reports])
                sep = np.array([r.separable(phase, theta, ev) for r in reports])
                rows[theta, f"{phase}.{ev}.mean_accuracy"] = float(acc.mean())
                rows[theta, f"{phase}.{ev}.mean_accuracy_separable"] = (
                    float(acc[sep].mean()) if sep.any() else 0.0)
                rows[theta, f"{phase}.{ev}.max_accuracy"] = float(acc.max())
                rows[theta, f"{phase}.{ev}.separable_count"] = int(sep.sum())
                rows[theta, f"{phase}.{ev}.non_separable_fraction"] = float(1.0 - sep.mean())
                hists[theta, phase, ev] = _histogram(acc)
        base = np.array([r.accuracy("baseline", theta) for r in reports])
        post = np.array([r.accuracy("trained", theta) for r in reports])
        both = np.array([r.separable("baseline", theta) and r.separable("trained", theta)
                         for r in reports])
        rows[theta, "both_separable_count"] = int(both.sum())
        rows[theta, "improved_or_equal_count"] = int((post[both] >= base[both]).sum())
        rows[theta, "improved_or_equal_fraction"] = (
            float((post[both] >= base[both]).mean()) if both.any() else 0.0)
        rows[theta, "mean_improvement"] = float((post[both] - base[both]).mean()) if both.any() else 0.0
    return SweepSummary(n, tuple(thresholds), rows, hists)


_worker_dataset = None


def _init_worker(dataset):
    global _worker_dataset
    _worker_dataset = dataset


def _run_child(args):
    config, backend = args
    return run_single(config, _worker_dataset, backend)


def run_sweep(config, n_networks, dataset, jobs=1, backend=None):
    """Run ``n_networks`` independent networks; results ordered by network index."""
    if n_networks < 1:
        raise ValueError("a sweep needs at least one network")
    configs = [config.with_overrides(seed=child_seed(config.seed, i)) for i in range(n_networks)]
    if jobs <= 1:
        reports = [run_single(c, dataset, backend) for c in configs]
    else:
        with ProcessPoolExecutor(max_workers=jobs, initializer=_init_worker,
                                 initargs=(dataset,)) as pool:
            reports = list(pool.map(_run_child, [(c, backend) for c in configs]))
    return reports, summarize(reports, config.pgp_thresholds)
