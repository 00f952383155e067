"""Clock-driven simulation of one input presentation.

Each step of length ``dt`` runs, in order:

1. emit input spikes scheduled for this grid time,
2. deliver every synaptic event due at this step (weight -> drive),
3. advance all non-input neurons,
4. record and propagate the spikes of this step,
5. apply delay plasticity for every neuron that fired in this step.

Delayed events sit in a ring buffer indexed by step.  A delivery keeps the
arrival it was given at emission, even if the delay changes while it is in
flight.  Plasticity works on exact (unrounded) arrival times.
"""
import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit, resolve_backend
from .errors import ConfigError, SimulationFault
from .neuron import DT, RS, V_PEAK
from .plasticity import PlasticityConfig

DURATION = 200.0  # ms
IMPULSE_MS = 1.0

_OK, _DIVERGED, _HORIZON, _CAPACITY, _CAUSALITY = range(5)
_FAULTS = {
    _DIVERGED: "neuron state diverged",
    _HORIZON: "event-buffer overflow: arrival beyond the delay horizon",
    _CAPACITY: "event-buffer overflow: too many deliveries in one step",
    _CAUSALITY: "delivery scheduled at or before its emitting step",
}


@dataclass(frozen=True)
class SpikeEvent:
    neuron: int
    time: float


@dataclass(frozen=True)
class PendingDelivery:
    synapse: int
    arrival_time_exact: float
    arrival_step: int


def round_half_even(x):
    return int(round(x))


def schedule_delivery(spike, synapse_index, delay, dt=DT):
    """Delivery of ``spike`` along one synapse whose current delay is ``delay``."""
    exact = spike.time + delay
    return PendingDelivery(synapse_index, exact, round_half_even(exact / dt))


@dataclass
class SpikeRecord:
    """All spikes of one trial, sorted by (time, neuron)."""
    neuron: np.ndarray
    time: np.ndarray
    duration: float
    dt: float = DT

    def __len__(self):
        return len(self.neuron)

    @property
    def steps(self):
        return np.rint(self.time / self.dt).astype(np.int64)

    def events(self):
        return [SpikeEvent(int(n), float(t)) for n, t in zip(self.neuron, self.time)]

    def select(self, neurons):
        """Sub-record restricted to the neuron indices in ``neurons``."""
        mask = np.isin(self.neuron, np.asarray(list(neurons), dtype=np.int64))
        return SpikeRecord(self.neuron[mask], self.time[mask], self.duration, self.dt)

    def raster_lines(self):
        return [f"{t:g} {n}" for n, t in zip(self.neuron, self.time)]


@dataclass
class PlasticityLog:
    """Per-update trace of one trial, filled when ``log_plasticity`` is set."""
    event: np.ndarray  # index of the post spike that caused the update
    post: np.ndarray
    time: np.ndarray
    synapse: np.ndarray
    arrival: np.ndarray
    delta: np.ndarray
    new_delay: np.ndarray

    @property
    def n_events(self):
        return len(np.unique(self.event))


@dataclass
class _Wiring:
    out_ptr: np.ndarray
    out_syn: np.ndarray
    in_ptr: np.ndarray
    in_syn: np.ndarray
    is_input: np.ndarray


def _wiring(topology):
    n = topology.n_neurons
    out_syn = np.argsort(topology.pre, kind="stable")
    in_syn = np.argsort(topology.post, kind="stable")
    out_ptr = np.concatenate(([0], np.cumsum(np.bincount(topology.pre, minlength=n))))
    in_ptr = np.concatenate(([0], np.cumsum(np.bincount(topology.post, minlength=n))))
    is_input = np.zeros(n, dtype=np.bool_)
    is_input[: topology.n_inputs] = True
    return _Wiring(out_ptr.astype(np.int64), out_syn.astype(np.int64),
                   in_ptr.astype(np.int64), in_syn.astype(np.int64), is_input)


def _input_steps(topology, input_spikes, duration, dt):
    """Grid step of each input neuron's spike, -1 for silent neurons."""
    times = getattr(input_spikes, "times", input_spikes)
    times = np.asarray(times if times is not None else [], dtype=np.float64)
    n_in = topology.n_inputs
    if times.size == 0:
        return np.full(n_in, -1, dtype=np.int64)
    if times.shape != (n_in,):
        raise ConfigError(f"input pattern has {times.size} entries for {n_in} input neurons")
    steps = np.full(n_in, -1, dtype=np.int64)
    live = ~np.isnan(times)
    t = times[live]
    if (t < 0).any():
        raise ConfigError("input spike before time 0")
    if (t >= duration).any():
        raise ConfigError(f"input spike at {t.max()} ms is not before the trial end {duration} ms")
    steps[live] = np.rint(t / dt).astype(np.int64)
    return steps


def run_trial(topology, input_spikes, duration=DURATION, plasticity_enabled=False,
              plasticity_config=PlasticityConfig(), params=RS, dt=DT,
              impulse_ms=IMPULSE_MS, backend=None, log_plasticity=False):
    """Simulate one presentation from rest.

    ``input_spikes`` holds one spike time per input neuron (NaN for silent
    neurons; an empty sequence silences all inputs).  Each delivered spike
    adds ``weight * impulse_ms / dt`` to the post-synaptic drive for one
    step, i.e. a ``weight``-sized kick held for ``impulse_ms``.

    Returns ``(record, topology)``; the returned topology is a new object
    carrying the trained delays, and the argument is never mutated.  With
    ``log_plasticity`` a :class:`PlasticityLog` is returned as a third item.
    """
    backend = resolve_backend(backend)
    if duration <= 0:
        raise ConfigError("trial duration must be positive")
    n_steps = int(round(duration / dt))
    inp = _input_steps(topology, input_spikes, duration, dt)
    w = _wiring(topology)
    cfg = plasticity_config
    horizon = int(math.ceil(cfg.delay_max / dt)) + 3
    if topology.n_synapses and topology.delay.max() > cfg.delay_max:
        horizon = int(math.ceil(topology.delay.max() / dt)) + 3
    delay = topology.delay.copy()
    drive = impulse_ms / dt
    args = (inp, w.is_input, w.out_ptr, w.out_syn, w.in_ptr, w.in_syn,
            topology.post, topology.weight, delay, n_steps, dt,
            params.a, params.b, params.c, params.d, V_PEAK, drive,
            bool(plasticity_enabled), cfg.window, cfg.amplitude, cfg.slope,
            cfg.delay_min, cfg.delay_max, horizon, bool(log_plasticity))
    if backend == "numba":
        out = _trial_numba(*args)
    else:
        out = _trial_numpy(*args)
    status, spk_neuron, spk_step = out[0], out[1], out[2]
    if status != _OK:
        raise SimulationFault(_FAULTS[status])
    order = np.lexsort((spk_neuron, spk_step))
    record = SpikeRecord(spk_neuron[order], spk_step[order] * dt, float(duration), dt)
    trained = topology.with_delays(delay) if plasticity_enabled else topology
    if log_plasticity:
        return record, trained, PlasticityLog(*out[3:])
    return record, trained


@njit
def _round_half_even(x):
    r = math.floor(x)
    diff = x - r
    if diff > 0.5 or (diff == 0.5 and r % 2.0 == 1.0):
        r += 1.0
    return int(r)


@njit
def _propagate(fired, n_fired, emit_step, dt, out_ptr, out_syn, delay, n_steps, horizon,
               buf_n, buf_syn, buf_t, spk_neuron, spk_step, n_spk):
    """Record ``fired[:n_fired]`` at ``emit_step`` and queue their deliveries."""
    cap = buf_syn.shape[1]
    t_emit = emit_step * dt
    for f in range(n_fired):
        i = fired[f]
        spk_neuron[n_spk] = i
        spk_step[n_spk] = emit_step
        n_spk += 1
        for idx in range(out_ptr[i], out_ptr[i + 1]):
            s = out_syn[idx]
            exact = t_emit + delay[s]
            st = _round_half_even(exact / dt)
            off = st - emit_step
            if off <= 0:
                return _CAUSALITY, n_spk
            if off >= horizon:
                return _HORIZON, n_spk
            if st >= n_steps:
                continue
            slot = st % horizon
            m = buf_n[slot]
            if m >= cap:
                return _CAPACITY, n_spk
            buf_syn[slot, m] = s
            buf_t[slot, m] = exact
            buf_n[slot] = m + 1
    return _OK, n_spk


@njit
def _trial_numba(input_step, is_input, out_ptr, out_syn, in_ptr, in_syn, syn_post,
                 syn_weight, delay, n_steps, dt, a, b, c, d, v_peak, drive, plastic,
                 window, amp, slope, dmin, dmax, horizon, log):
    n = is_input.shape[0]
    n_syn = syn_post.shape[0]
    v = np.full(n, c)
    u = np.full(n, b * c)
    current = np.zeros(n)
    last_arr = np.full(n_syn, -np.inf)
    buf_n = np.zeros(horizon, np.int64)
    buf_syn = np.empty((horizon, max(n_syn, 1)), np.int64)
    buf_t = np.empty((horizon, max(n_syn, 1)))
    spk_neuron = np.empty(n * (n_steps + 1), np.int64)
    spk_step = np.empty(n * (n_steps + 1), np.int64)
    n_spk = 0
    fired = np.empty(n, np.int64)
    log_cap = n_syn * (n_steps + 1) if log else 0
    lg_event = np.empty(log_cap, np.int64)
    lg_post = np.empty(log_cap, np.int64)
    lg_time = np.empty(log_cap)
    lg_syn = np.empty(log_cap, np.int64)
    lg_arr = np.empty(log_cap)
    lg_delta = np.empty(log_cap)
    lg_new = np.empty(log_cap)
    n_log = 0
    n_event = 0
    status = _OK

    for k in range(n_steps):
        n_fired = 0
        for i in range(input_step.shape[0]):
            if input_step[i] == k:
                fired[n_fired] = i
                n_fired += 1
        status, n_spk = _propagate(fired, n_fired, k, dt, out_ptr, out_syn, delay, n_steps,
                                   horizon, buf_n, buf_syn, buf_t, spk_neuron, spk_step, n_spk)
        if status != _OK:
            break

        slot = k % horizon
        for e in range(buf_n[slot]):
            s = buf_syn[slot, e]
            current[syn_post[s]] += syn_weight[s] * drive
            last_arr[s] = buf_t[slot, e]
        buf_n[slot] = 0

        n_fired = 0
        for j in range(n):
            if is_input[j]:
                continue
            vj = v[j]
            uj = u[j]
            vj = vj + dt * (0.04 * vj * vj + 5.0 * vj + 140.0 - uj + current[j])
            uj = uj + dt * (a * (b * vj - uj))
            current[j] = 0.0
            if not (math.isfinite(vj) and math.isfinite(uj)):
                status = _DIVERGED
            if vj >= v_peak:
                vj = c
                uj = uj + d
                fired[n_fired] = j
                n_fired += 1
            v[j] = vj
            u[j] = uj
        if status != _OK:
            break

        status, n_spk = _propagate(fired, n_fired, k + 1, dt, out_ptr, out_syn, delay, n_steps,
                                   horizon, buf_n, buf_syn, buf_t, spk_neuron, spk_step, n_spk)
        if status != _OK:
            break
        if not plastic:
            continue

        t_post = (k + 1) * dt
        for f in range(n_fired):
            j = fired[f]
            total = 0.0
            count = 0
            for idx in range(in_ptr[j], in_ptr[j + 1]):
                lag = t_post - last_arr[in_syn[idx]]
                if lag >= 0.0 and lag < window:
                    total += last_arr[in_syn[idx]]
                    count += 1
            if count == 0:
                continue
            mean = total / count
            for idx in range(in_ptr[j], in_ptr[j + 1]):
                s = in_syn[idx]
                lag = t_post - last_arr[s]
                if not (lag >= 0.0 and lag < window):
                    continue
                delta = -amp * math.tanh((last_arr[s] - mean) / slope)
                nd = min(max(delay[s] + delta, dmin), dmax)
                delay[s] = nd
                if log:
                    lg_event[n_log] = n_event
                    lg_post[n_log] = j
                    lg_time[n_log] = t_post
                    lg_syn[n_log] = s
                    lg_arr[n_log] = last_arr[s]
                    lg_delta[n_log] = delta
                    lg_new[n_log] = nd
                    n_log += 1
            n_event += 1

    return (status, spk_neuron[:n_spk].copy(), spk_step[:n_spk].copy(),
            lg_event[:n_log].copy(), lg_post[:n_log].copy(), lg_time[:n_log].copy(),
            lg_syn[:n_log].copy(), lg_arr[:n_log].copy(), lg_delta[:n_log].copy(),
            lg_new[:n_log].copy())


def _trial_numpy(input_step, is_input, out_ptr, out_syn, in_ptr, in_syn, syn_post,
                 syn_weight, delay, n_steps, dt, a, b, c, d, v_peak, drive, plastic,
                 window, amp, slope, dmin, dmax, horizon, log):
    n = len(is_input)
    n_syn = len(syn_post)
    hidden = np.nonzero(~is_input)[0]
    v = np.full(len(hidden), c)
    u = np.full(len(hidden), b * c)
    last_arr = np.full(n_syn, -np.inf)
    pending = [[] for _ in range(horizon)]  # per slot: list of (synapse ids, exact times)
    spk_neuron, spk_step = [], []
    logs = [[] for _ in range(7)]
    n_event = 0
    inputs_at = {}
    for i in np.nonzero(input_step >= 0)[0]:
        inputs_at.setdefault(int(input_step[i]), []).append(int(i))
    out_lists = [out_syn[out_ptr[i]:out_ptr[i + 1]] for i in range(n)]
    in_lists = [in_syn[in_ptr[j]:in_ptr[j + 1]] for j in range(n)]

    def emit(neurons, step):
        t_emit = step * dt
        for i in neurons:
            spk_neuron.append(i)
            spk_step.append(step)
            syn = out_lists[i]
            if not len(syn):
                continue
            exact = t_emit + delay[syn]
            st = np.rint(exact / dt).astype(np.int64)
            off = st - step
            if (off <= 0).any():
                return _CAUSALITY
            if (off >= horizon).any():
                return _HORIZON
            keep = st < n_steps
            for s_id, t_exact, s_step in zip(syn[keep], exact[keep], st[keep]):
                pending[s_step % horizon].append((s_id, t_exact))
        return _OK

    def empty():
        e = np.empty(0, dtype=np.int64)
        return (e, e) + tuple(np.empty(0) for _ in range(7))

    for k in range(n_steps):
        status = emit(inputs_at.get(k, ()), k)
        if status != _OK:
            return (status,) + empty()
        slot = k % horizon
        current = np.zeros(n)
        if pending[slot]:
            if len(pending[slot]) > max(n_syn, 1):
                return (_CAPACITY,) + empty()
            syn = np.fromiter((p[0] for p in pending[slot]), dtype=np.int64)
            arr = np.fromiter((p[1] for p in pending[slot]), dtype=np.float64)
            for s, w_s in zip(syn, syn_weight[syn] * drive):
                current[syn_post[s]] += w_s
            last_arr[syn] = arr
            pending[slot] = []
        v += dt * (0.04 * v * v + 5.0 * v + 140.0 - u + current[hidden])
        u += dt * (a * (b * v - u))
        if not (np.isfinite(v).all() and np.isfinite(u).all()):
            return (_DIVERGED,) + empty()
        hit = v >= v_peak
        v[hit] = c
        u[hit] += d
        fired = hidden[hit].tolist()
        status = emit(fired, k + 1)
        if status != _OK:
            return (status,) + empty()
        if not plastic:
            continue
        t_post = (k + 1) * dt
        for j in fired:
            syn = in_lists[j]
            lag = t_post - last_arr[syn]
            part = syn[(lag >= 0.0) & (lag < window)]
            if not len(part):
                continue
            arr = last_arr[part]
            mean = sum(arr.tolist()) / len(part)
            # scalar libm tanh: np.tanh's SIMD path can differ from it by an ulp
            delta = np.array([-amp * math.tanh((x - mean) / slope) for x in arr.tolist()])
            new = np.clip(delay[part] + delta, dmin, dmax)
            delay[part] = new
            if log:
                for col, values in zip(logs, (np.full(len(part), n_event), np.full(len(part), j),
                                              np.full(len(part), t_post), part, arr, delta, new)):
                    col.extend(np.asarray(values).tolist())
            n_event += 1

    dtypes = (np.int64, np.int64, np.float64, np.int64, np.float64, np.float64, np.float64)
    return ((_OK, np.array(spk_neuron, dtype=np.int64), np.array(spk_step, dtype=np.int64))
            + tuple(np.array(col, dtype=dt_) for col, dt_ in zip(logs, dtypes)))
