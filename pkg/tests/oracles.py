"""Independent reference implementations used to freeze expected values.

Nothing here imports the engine: each oracle is a direct, slow transcription
of the model it checks.
"""
import itertools
import math


def brute_lcs(a, b):
    """Longest common subsequence by enumerating every subsequence of ``a``."""
    a, b = list(a), list(b)

    def is_subsequence(sub, seq):
        it = iter(seq)
        return all(x in it for x in sub)

    for length in range(min(len(a), len(b)), 0, -1):
        for idx in itertools.combinations(range(len(a)), length):
            if is_subsequence([a[i] for i in idx], b):
                return length
    return 0


def izhikevich_run(currents, a=0.02, b=0.2, c=-65.0, d=8.0, dt=0.5, v=None, u=None):
    """Forward-Euler RS neuron; returns (v trace, indices of steps ending in a spike)."""
    v = c if v is None else v
    u = b * c if u is None else u
    trace, spikes = [], []
    for k, current in enumerate(currents):
        v = v + dt * (0.04 * v * v + 5.0 * v + 140.0 - u + current)
        u = u + dt * (a * (b * v - u))
        if v >= 30.0:
            v, u = c, u + d
            spikes.append(k)
        trace.append(v)
    return trace, spikes


def convergent_volley(arrival_steps, weight, n_steps=400, dt=0.5, impulse_ms=1.0):
    """Does a neuron at rest fire when kicked at the given steps?"""
    drive = [0.0] * n_steps
    for s in arrival_steps:
        drive[s] += weight * impulse_ms / dt
    _, spikes = izhikevich_run(drive, dt=dt)
    return bool(spikes)


def motif_oracle(delays, weight, presentations, window=10.0, amplitude=3.0, slope=3.0,
                 delay_min=1.0, delay_max=60.0, dt=0.5, duration=60.0, impulse_ms=1.0):
    """Four (or more) inputs firing at t=0 onto one RS neuron, delays learned in place.

    Returns the list of delay vectors after each plasticity event.
    """
    delays = list(map(float, delays))
    history = []
    n_steps = int(round(duration / dt))
    for _ in range(presentations):
        # arrivals are fixed at emission: all inputs fire at 0
        arrivals = [(i, 0.0 + d) for i, d in enumerate(delays)]
        due = {}
        for i, t in arrivals:
            due.setdefault(int(round(t / dt)), []).append((i, t))
        v, u = -65.0, 0.2 * -65.0
        last = {}
        for k in range(n_steps):
            current = 0.0
            for i, t in due.get(k, []):
                current += weight * impulse_ms / dt
                last[i] = t
            v = v + dt * (0.04 * v * v + 5.0 * v + 140.0 - u + current)
            u = u + dt * (0.02 * (0.2 * v - u))
            if v < 30.0:
                continue
            v, u = -65.0, u + 8.0
            t_post = (k + 1) * dt
            part = [(i, t) for i, t in sorted(last.items()) if 0.0 <= t_post - t < window]
            if not part:
                continue
            mean = sum(t for _, t in part) / len(part)
            for i, t in part:
                delta = -amplitude * math.tanh((t - mean) / slope)
                delays[i] = min(max(delays[i] + delta, delay_min), delay_max)
            history.append(list(delays))
    return history


def pstdev(xs):
    m = sum(xs) / len(xs)
    return math.sqrt(sum((x - m) ** 2 for x in xs) / len(xs))
