"""Time the numba kernels against the pure-numpy fallback.

    python benchmarks/bench_backends.py --repeats 5

Both backends produce identical results; this only compares speed.
"""
import argparse
import time

import numpy as np

from delaylearn.pgp import lcs_length
from delaylearn.simulator import run_trial
from delaylearn.topology import generate_feedforward


def best_of(fn, repeats):
    fn()  # warm-up: compiles the numba kernels on first call
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--trials", type=int, default=20, help="trials per timing")
    args = parser.parse_args(argv)

    net = generate_feedforward((100, 100, 100), 0.1, 6.0, (1, 39), seed=0)
    rng = np.random.default_rng(0)
    patterns = [np.round(rng.uniform(0, 40, 100) * 2) / 2 for _ in range(args.trials)]
    seqs = [(rng.integers(0, 200, 150), rng.integers(0, 200, 150)) for _ in range(50)]

    def trials(backend, plastic):
        def go():
            topo = net
            for p in patterns:
                _, topo = run_trial(topo, p, plasticity_enabled=plastic, backend=backend)
        return go

    def lcs(backend):
        return lambda: [lcs_length(a, b, backend) for a, b in seqs]

    cases = [
        (f"run_trial x{args.trials}, plasticity off", lambda b: trials(b, False)),
        (f"run_trial x{args.trials}, plasticity on", lambda b: trials(b, True)),
        ("LCS x50, length 150", lcs),
    ]
    print(f"{'case':38s} {'numba ms':>10s} {'numpy ms':>10s} {'speed-up':>9s}")
    for name, make in cases:
        fast = best_of(make("numba"), args.repeats) * 1e3
        slow = best_of(make("numpy"), args.repeats) * 1e3
        print(f"{name:38s} {fast:10.2f} {slow:10.2f} {slow / fast:8.1f}x")


if __name__ == "__main__":
    main()
