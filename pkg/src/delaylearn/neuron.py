"""Izhikevich regular-spiking neuron.

    dv/dt = 0.04 v^2 + 5 v + 140 - u + I
    du/dt = a (b v - u)
    if v >= 30 mV:  v <- c,  u <- u + d

Integrated with forward Euler, v first and then u using the updated v.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, SimulationFault

DT = 0.5  # ms
V_PEAK = 30.0  # mV


@dataclass(frozen=True)
class IzhikevichParams:
    a: float = 0.02
    b: float = 0.2
    c: float = -65.0
    d: float = 8.0

    def __post_init__(self):
        if not self.a > 0:
            raise ConfigError(f"recovery time-scale a must be positive, got {self.a}")
        if not self.d >= 0:
            raise ConfigError(f"recovery increment d must be non-negative, got {self.d}")


RS = IzhikevichParams()


@dataclass(frozen=True)
class NeuronState:
    v: float
    u: float


def rest_state(params=RS):
    """Initial state used at the start of every trial: ``v = c, u = b*c``."""
    return NeuronState(v=params.c, u=params.b * params.c)


def step(state, params, input_current, dt=DT):
    """Advance one neuron by ``dt``.

    Returns ``(new_state, fired)``.  When the threshold is reached the
    returned state is already reset, and the spike belongs to the end of
    this step.
    """
    v, u = state.v, state.u
    if not (math.isfinite(v) and math.isfinite(u) and math.isfinite(input_current)):
        raise SimulationFault(f"non-finite neuron input: v={v}, u={u}, I={input_current}")
    v = v + dt * (0.04 * v * v + 5.0 * v + 140.0 - u + input_current)
    u = u + dt * (params.a * (params.b * v - u))
    if not (math.isfinite(v) and math.isfinite(u)):
        raise SimulationFault(f"neuron state diverged: v={v}, u={u}")
    if v >= V_PEAK:
        return NeuronState(params.c, u + params.d), True
    return NeuronState(v, u), False


def step_arrays(v, u, current, params, dt=DT):
    """Vectorised :func:`step` over arrays; updates ``v`` and ``u`` in place.

    Returns the boolean mask of neurons that fired.
    """
    v += dt * (0.04 * v * v + 5.0 * v + 140.0 - u + current)
    u += dt * (params.a * (params.b * v - u))
    if not (np.isfinite(v).all() and np.isfinite(u).all()):
        raise SimulationFault("neuron state diverged")
    fired = v >= V_PEAK
    v[fired] = params.c
    u[fired] += params.d
    return fired


def simulate(params, currents, dt=DT, state=None):
    """Drive a single neuron with a current sequence.

    Returns ``(v_trace, spike_steps)`` where ``spike_steps`` holds the index
    of each step that ended with a spike.
    """
    state = rest_state(params) if state is None else state
    trace = np.empty(len(currents))
    spikes = []
    for k, current in enumerate(currents):
        state, fired = step(state, params, float(current), dt)
        trace[k] = state.v
        if fired:
            spikes.append(k)
    return trace, spikes
