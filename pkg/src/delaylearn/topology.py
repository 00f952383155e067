"""Layered feedforward network with per-synapse plastic delays.

Neurons are numbered globally, layer by layer: with 100/100/100 the input
layer is 0-99, the hidden layer 100-199 and the output layer 200-299.
Synapses are stored as parallel arrays sorted by (pre, post); a synapse is
referred to by its row index.
"""
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError

DELAY_MIN = 1.0
DELAY_MAX = 60.0
SCHEMA_LINE = "# schema: delaylearn-topology 1"


@dataclass(frozen=True)
class Synapse:
    pre: int
    post: int
    weight: float
    delay: float


@dataclass
class NetworkTopology:
    layer_sizes: tuple
    pre: np.ndarray
    post: np.ndarray
    weight: np.ndarray
    delay: np.ndarray

    def __post_init__(self):
        self.layer_sizes = tuple(int(n) for n in self.layer_sizes)
        self.pre = np.asarray(self.pre, dtype=np.int64)
        self.post = np.asarray(self.post, dtype=np.int64)
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.delay = np.asarray(self.delay, dtype=np.float64)

    @property
    def n_neurons(self):
        return sum(self.layer_sizes)

    @property
    def n_synapses(self):
        return len(self.pre)

    @property
    def layer_starts(self):
        return np.concatenate(([0], np.cumsum(self.layer_sizes))).astype(np.int64)

    def layer_range(self, layer):
        starts = self.layer_starts
        return range(int(starts[layer]), int(starts[layer + 1]))

    def layer_of(self, neuron):
        """Layer index of each neuron in ``neuron`` (scalar or array)."""
        return np.searchsorted(self.layer_starts, neuron, side="right") - 1

    @property
    def n_inputs(self):
        return self.layer_sizes[0]

    def synapse(self, index):
        return Synapse(int(self.pre[index]), int(self.post[index]),
                       float(self.weight[index]), float(self.delay[index]))

    def synapses(self):
        for i in range(self.n_synapses):
            yield self.synapse(i)

    def with_delays(self, delay):
        return NetworkTopology(self.layer_sizes, self.pre, self.post, self.weight,
                               np.array(delay, dtype=np.float64))

    def copy(self):
        return NetworkTopology(self.layer_sizes, self.pre.copy(), self.post.copy(),
                               self.weight.copy(), self.delay.copy())

    def identical_to(self, other):
        """Bit-level equality of shape, edges, weights and delays."""
        return (self.layer_sizes == other.layer_sizes
                and np.array_equal(self.pre, other.pre)
                and np.array_equal(self.post, other.post)
                and self.weight.tobytes() == other.weight.tobytes()
                and self.delay.tobytes() == other.delay.tobytes())


def generate_feedforward(layer_sizes=(100, 100, 100), connection_probability=0.1,
                         weight=6.0, delay_range=(1, 39), seed=0):
    """Random feedforward network between adjacent layers.

    Every ordered (pre, post) pair of adjacent layers becomes a synapse with
    ``connection_probability``; its initial delay is drawn uniformly from the
    integers ``delay_range[0] .. delay_range[1]`` inclusive.
    """
    layer_sizes = tuple(int(n) for n in layer_sizes)
    if len(layer_sizes) < 2:
        raise ConfigError("a feedforward network needs at least 2 layers")
    if any(n <= 0 for n in layer_sizes):
        raise ConfigError(f"layer sizes must be positive, got {layer_sizes}")
    if not 0.0 <= connection_probability <= 1.0:
        raise ConfigError(f"connection probability {connection_probability} outside [0, 1]")
    lo, hi = int(delay_range[0]), int(delay_range[1])
    if lo > hi:
        raise ConfigError(f"empty delay range {delay_range}")

    rng = np.random.default_rng(seed)
    starts = np.concatenate(([0], np.cumsum(layer_sizes)))
    pres, posts, delays = [], [], []
    for k in range(len(layer_sizes) - 1):
        mask = rng.random((layer_sizes[k], layer_sizes[k + 1])) < connection_probability
        i, j = np.nonzero(mask)
        pres.append(i + starts[k])
        posts.append(j + starts[k + 1])
        delays.append(rng.integers(lo, hi + 1, size=len(i)).astype(np.float64))
    pre = np.concatenate(pres)
    post = np.concatenate(posts)
    return NetworkTopology(layer_sizes, pre, post,
                           np.full(len(pre), float(weight)), np.concatenate(delays))


def validate(topology, delay_min=DELAY_MIN, delay_max=DELAY_MAX, weight=None):
    """Return ``None`` when all invariants hold, else a description of the first violation."""
    t = topology
    if len(t.layer_sizes) < 2:
        return "fewer than 2 layers"
    if not (len(t.pre) == len(t.post) == len(t.weight) == len(t.delay)):
        return "synapse arrays differ in length"
    n = t.n_neurons
    if len(t.pre) and (t.pre.min() < 0 or t.post.min() < 0 or t.pre.max() >= n or t.post.max() >= n):
        return "neuron index out of range"
    lp = t.layer_of(t.pre)
    lq = t.layer_of(t.post)
    bad = np.nonzero(lq != lp + 1)[0]
    if len(bad):
        return f"non-adjacent layers at synapse {bad[0]}"
    keys = t.pre * n + t.post
    if len(np.unique(keys)) != len(keys):
        return "duplicate (pre, post) pair"
    if not np.isfinite(t.delay).all():
        return "non-finite delay"
    bad = np.nonzero(t.delay < delay_min)[0]
    if len(bad):
        return f"delay below minimum at synapse {bad[0]}"
    bad = np.nonzero(t.delay > delay_max)[0]
    if len(bad):
        return f"delay above maximum at synapse {bad[0]}"
    if len(t.weight):
        expected = t.weight[0] if weight is None else weight
        bad = np.nonzero(t.weight != expected)[0]
        if len(bad):
            return f"heterogeneous weight at synapse {bad[0]}"
    return None


def format_topology(topology):
    lines = ["layers: " + " ".join(str(n) for n in topology.layer_sizes)]
    for p, q, w, d in zip(topology.pre, topology.post, topology.weight, topology.delay):
        lines.append(f"{p} {q} {w:g} {d:.6f}")
    lines.append(SCHEMA_LINE)
    return "\n".join(lines) + "\n"


def parse_topology(text):
    rows = []
    layer_sizes = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("layers:"):
            layer_sizes = tuple(int(x) for x in line.split(":", 1)[1].split())
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FormatError(f"topology line {lineno}: expected 'pre post weight delay'")
        rows.append((int(parts[0]), int(parts[1]), float(parts[2]), float(parts[3])))
    if layer_sizes is None:
        raise FormatError("topology file has no 'layers:' header")
    if rows:
        pre, post, weight, delay = (np.array(col) for col in zip(*rows))
    else:
        pre = post = np.empty(0, dtype=np.int64)
        weight = delay = np.empty(0)
    return NetworkTopology(layer_sizes, pre, post, weight, delay)


def save_topology(topology, path):
    Path(path).write_text(format_topology(topology))


def load_topology(path):
    return parse_topology(Path(path).read_text())
