"""Latency coding of a 10x10 image: one spike per pixel within [0, t_max].

Low values fire first.  Each instance is min-max rescaled on its own, so the
darkest pixel fires at 0 ms and the brightest at ``t_max``.
"""
from dataclasses import dataclass

import numpy as np

from .neuron import DT

T_MAX = 40.0  # ms


@dataclass(frozen=True)
class InputSpikePattern:
    times: np.ndarray  # ms, one entry per input neuron

    def __len__(self):
        return len(self.times)

    def lines(self):
        return [f"{i} {t:g}" for i, t in enumerate(self.times)]


def encode(pixels, t_max=T_MAX, dt=DT, invert=False, quantize=True):
    """Spike time per pixel, flattened row-major.

    ``invert`` encodes ``1 - p`` instead, so bright pixels fire first.
    Times land on the ``dt`` grid (half to even) unless ``quantize`` is off.
    """
    p = np.asarray(getattr(pixels, "pixels", pixels), dtype=np.float64).ravel()
    if p.size and (np.isnan(p).any() or p.min() < 0.0 or p.max() > 1.0):
        raise ValueError("pixel values must lie in [0, 1]")
    if invert:
        p = 1.0 - p
    lo, hi = (p.min(), p.max()) if p.size else (0.0, 0.0)
    if hi == lo:
        times = np.zeros_like(p)
    else:
        times = t_max * (p - lo) / (hi - lo)
    if quantize:
        times = np.rint(times / dt) * dt
    return InputSpikePattern(times)
