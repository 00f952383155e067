"""Polychronous group pattern (PGP) decoding.

A trial's output activity becomes a sequence of tokens ``(neuron, ordinal,
time)``, ordinal counting repeated firings of the same neuron.  Two patterns
are compared by the longest common subsequence of their ``(neuron, ordinal)``
keys, normalised by the mean pattern length.  Patterns are clustered in one
pass against cluster centroids, and a class is decoded by the cluster that
holds most of its patterns.
"""
from dataclasses import dataclass, field

import numpy as np

from ._accel import njit, resolve_backend

_ORD_BITS = 20


@dataclass
class Pgp:
    neuron: np.ndarray
    ordinal: np.ndarray
    time: np.ndarray
    trial: int = -1
    label: int = -1

    def __len__(self):
        return len(self.neuron)

    @property
    def keys(self):
        return (self.neuron.astype(np.int64) << _ORD_BITS) | self.ordinal.astype(np.int64)

    def tokens(self):
        return list(zip(self.neuron.tolist(), self.ordinal.tolist(), self.time.tolist()))


def make_pgp(tokens, trial=-1, label=-1):
    """Pgp from ``(neuron, ordinal, time)`` tokens, sorted by (time, neuron)."""
    tokens = sorted(tokens, key=lambda tok: (tok[2], tok[0]))
    if not tokens:
        return Pgp(np.empty(0, np.int64), np.empty(0, np.int64), np.empty(0), trial, label)
    n, o, t = zip(*tokens)
    return Pgp(np.array(n, np.int64), np.array(o, np.int64), np.array(t, np.float64), trial, label)


def extract(record, neurons, trial=-1, label=-1):
    """Pattern of the spikes of ``neurons`` (e.g. the hidden and output layers)."""
    sub = record.select(neurons)
    order = np.lexsort((sub.neuron, sub.time))
    neuron = sub.neuron[order]
    time = sub.time[order]
    ordinal = np.empty(len(neuron), np.int64)
    seen = {}
    for i, n in enumerate(neuron.tolist()):
        seen[n] = seen.get(n, 0) + 1
        ordinal[i] = seen[n]
    return Pgp(neuron, ordinal, time, trial, label)


@njit
def _lcs_numba(a, b):
    m = b.shape[0]
    prev = np.zeros(m + 1, np.int64)
    cur = np.zeros(m + 1, np.int64)
    for i in range(a.shape[0]):
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            elif prev[j + 1] >= cur[j]:
                cur[j + 1] = prev[j + 1]
            else:
                cur[j + 1] = cur[j]
        prev, cur = cur, prev
    return prev[m]


def _lcs_numpy(a, b):
    # Row recurrence as a running maximum:
    #   row[j] = max(prev[j], row[j-1], match_j * (prev[j-1] + 1))
    prev = np.zeros(len(b) + 1, np.int64)
    for ai in a:
        step = np.maximum(prev[1:], np.where(b == ai, prev[:-1] + 1, 0))
        prev[1:] = np.maximum.accumulate(step)
    return int(prev[-1])


def lcs_length(a, b, backend=None):
    a = np.asarray(a, np.int64)
    b = np.asarray(b, np.int64)
    if len(a) == 0 or len(b) == 0:
        return 0
    if resolve_backend(backend) == "numba":
        return int(_lcs_numba(a, b))
    return _lcs_numpy(a, b)


def key_ratio(ka, kb, backend=None):
    if len(ka) == 0 and len(kb) == 0:
        return 1.0
    if len(ka) == 0 or len(kb) == 0:
        return 0.0
    return 2.0 * lcs_length(ka, kb, backend) / (len(ka) + len(kb))


def match_ratio(a, b, backend=None):
    """Matching-spike ratio: LCS of the key sequences over their mean length."""
    return key_ratio(a.keys, b.keys, backend)


@dataclass
class Cluster:
    members: list = field(default_factory=list)
    # key -> [sum of times, number of members containing the key]
    _acc: dict = field(default_factory=dict, repr=False)

    def add(self, pgp, member_id):
        self.members.append(member_id)
        for key, t in zip(pgp.keys.tolist(), pgp.time.tolist()):
            acc = self._acc.setdefault(key, [0.0, 0])
            acc[0] += t
            acc[1] += 1

    def centroid(self):
        """Keys held by at least half the members, ordered by mean time."""
        n = len(self.members)
        rows = [(s / c, key) for key, (s, c) in self._acc.items() if 2 * c >= n]
        rows.sort()
        keys = np.array([k for _, k in rows], np.int64)
        times = np.array([t for t, _ in rows], np.float64)
        return keys, times

    def centroid_pgp(self):
        keys, times = self.centroid()
        return Pgp(keys >> _ORD_BITS, keys & ((1 << _ORD_BITS) - 1), times)


def centroid_of(pgps):
    """Centroid computed from scratch; reference for the incremental one."""
    cluster = Cluster()
    for i, p in enumerate(pgps):
        cluster.add(p, i)
    return cluster.centroid()


def cluster(pgps, theta, backend=None):
    """Single pass, in order: join the best-matching centroid if its ratio is >= theta."""
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"threshold {theta} outside (0, 1]")
    clusters = []
    centroids = []
    for idx, p in enumerate(pgps):
        keys = p.keys
        best, best_ratio = -1, -1.0
        for ci, ck in enumerate(centroids):
            r = key_ratio(keys, ck, backend)
            if r >= theta and r > best_ratio:
                best, best_ratio = ci, r
        if best < 0:
            clusters.append(Cluster())
            centroids.append(None)
            best = len(clusters) - 1
        clusters[best].add(p, idx)
        centroids[best] = clusters[best].centroid()[0]
    return clusters


def assignments(clusters, n):
    out = np.full(n, -1, np.int64)
    for ci, c in enumerate(clusters):
        out[c.members] = ci
    return out


@dataclass
class ThresholdScore:
    theta: float
    assignment: np.ndarray
    n_clusters: int
    modal: dict
    trained_accuracy: float
    trained_separable: bool
    unseen_accuracy: float
    unseen_separable: bool


def _modal(counts):
    return int(np.argmax(counts))  # lowest index wins ties


def score(assignment, labels, trained, unseen=(), theta=float("nan")):
    """Accuracy from each class's modal cluster.

    Trained classes are separable when their modal clusters are pairwise
    distinct; accuracy is then the fraction of trained-class patterns that
    sit in their own class's modal cluster.  An unseen class is separable
    when its modal cluster differs from every other evaluated class's.
    Non-separable means accuracy 0.
    """
    assignment = np.asarray(assignment)
    labels = np.asarray(labels)
    n_clusters = int(assignment.max()) + 1 if len(assignment) else 0
    counts = {}
    modal = {}
    for cls in list(trained) + list(unseen):
        counts[cls] = np.bincount(assignment[labels == cls], minlength=max(n_clusters, 1))
        modal[cls] = _modal(counts[cls])

    trained_modal = [modal[c] for c in trained]
    trained_sep = len(set(trained_modal)) == len(trained_modal) and len(trained_modal) > 0
    total = sum(int(counts[c].sum()) for c in trained)
    trained_acc = 0.0
    if trained_sep and total:
        trained_acc = sum(int(counts[c][modal[c]]) for c in trained) / total

    unseen_sep = len(unseen) > 0
    hits = 0
    for c in unseen:
        others = [modal[o] for o in list(trained) + list(unseen) if o != c]
        if modal[c] in others:
            unseen_sep = False
        hits += int(counts[c][modal[c]])
    n_unseen = sum(int(counts[c].sum()) for c in unseen)
    unseen_acc = hits / n_unseen if unseen_sep and n_unseen else 0.0
    if not unseen_acc:
        unseen_sep = False
    if not trained_acc:
        trained_sep = False
    return ThresholdScore(theta, assignment, n_clusters, modal, trained_acc, trained_sep,
                          unseen_acc, unseen_sep)


def decode(pgps, thresholds, trained, unseen=(), backend=None):
    """Cluster and score the same patterns at every threshold."""
    labels = [p.label for p in pgps]
    out = {}
    for theta in thresholds:
        cl = cluster(pgps, theta, backend)
        out[theta] = score(assignments(cl, len(pgps)), labels, trained, unseen, theta)
    return out
