"""Delay plasticity: pull causally related arrivals toward their mean.

When a neuron fires at ``t_post``, every incoming spike that arrived in the
half-open window ``0 <= t_post - arrival < window`` takes part.  With
``mean`` the average of those arrival times, each participating synapse
changes its delay by

    delta = -amplitude * tanh((arrival - mean) / slope)

so early arrivals are slowed down and late ones sped up.  New delays are
clamped to ``[delay_min, delay_max]``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SimulationFault
from .topology import DELAY_MAX, DELAY_MIN


@dataclass(frozen=True)
class PlasticityConfig:
    window: float = 10.0
    amplitude: float = 3.0
    slope: float = 3.0
    delay_min: float = DELAY_MIN
    delay_max: float = DELAY_MAX

    def __post_init__(self):
        if not (self.window > 0 and self.amplitude > 0 and self.slope > 0):
            raise ConfigError("plasticity window, amplitude and slope must be positive")
        if not self.delay_min < self.delay_max:
            raise ConfigError(f"delay_min {self.delay_min} must be below delay_max {self.delay_max}")


@dataclass(frozen=True)
class DelayUpdate:
    synapse: int
    delta: float
    new_delay: float


def collect_window(post_spike_time, arrivals, window=10.0):
    """Arrivals ``(synapse, time)`` with ``0 <= post_spike_time - time < window``."""
    return [(syn, t) for syn, t in arrivals if 0.0 <= post_spike_time - t < window]


def mean_arrival(participants):
    if not participants:
        raise ValueError("mean of an empty participant set")
    total = 0.0
    for _, t in participants:
        total += t
    return total / len(participants)


def delay_update(arrival_time, mean, config=PlasticityConfig()):
    return -config.amplitude * math.tanh((arrival_time - mean) / config.slope)


def clamp(delay, config):
    return min(max(delay, config.delay_min), config.delay_max)


def compute_updates(post_spike_time, arrivals, delays, config=PlasticityConfig()):
    """Updates triggered by one post-synaptic spike.

    ``delays`` maps synapse index to its current delay; all updates are
    computed from this snapshot before any of them is applied.
    """
    participants = collect_window(post_spike_time, arrivals, config.window)
    if not participants:
        return []
    mean = mean_arrival(participants)
    updates = []
    for syn, t in participants:
        delta = delay_update(t, mean, config)
        updates.append(DelayUpdate(syn, delta, clamp(delays[syn] + delta, config)))
    return updates


def apply_updates(topology, updates, config=PlasticityConfig()):
    """Return a copy of ``topology`` with each referenced delay shifted and clamped."""
    delay = topology.delay.copy()
    n = len(delay)
    for up in updates:
        if not 0 <= up.synapse < n:
            raise SimulationFault(f"update references unknown synapse {up.synapse}")
        delay[up.synapse] = clamp(delay[up.synapse] + up.delta, config)
    return topology.with_delays(delay)


def contraction(deviation, config=PlasticityConfig()):
    """Deviation from the mean after one update, vectorised over ``deviation``."""
    deviation = np.asarray(deviation, dtype=np.float64)
    return deviation - config.amplitude * np.tanh(deviation / config.slope)
