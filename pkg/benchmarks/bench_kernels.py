#!/usr/bin/env python3
"""Benchmark the observation-sweep kernel backends against each other.

Run after installing the package:

    python benchmarks/bench_kernels.py [--repeats 5]

The sweep is the hot loop behind every expectation (entropy, MMSE
matrix, Hadamard-square averages), so the ratio here is roughly the
end-to-end speedup of the compiled extension.
"""

import argparse
import time

import numpy as np

from entpow.kernels import available_backends, get_backend


def make_case(n, k, m, seed):
    rng = np.random.default_rng(seed)
    atoms = rng.uniform(-2.5, 2.5, size=(k, n))
    means = atoms * rng.uniform(0.5, 2.0)
    log_probs = np.log(rng.dirichlet(np.ones(k)))
    inv_cov = np.ones(n)
    log_norm = -0.5 * n * np.log(2 * np.pi)
    points = rng.normal(scale=2.0, size=(m, n))
    weights = np.full(m, 1.0 / m)
    return atoms, means, log_probs, inv_cov, log_norm, points, weights


def time_backend(backend, case, repeats):
    fn = get_backend(backend).moment_sweep
    fn(*case)  # warm up
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*case)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if len(backends) < 2:
        print("compiled extension missing; timing the numpy fallback only")

    cases = [
        (1, 2, 100_000),
        (1, 64, 100_000),
        (2, 8, 100_000),
        (3, 8, 110_592),  # one full 48^3-node component grid
        (3, 16, 200_000),
    ]
    header = f"{'n':>3} {'K':>4} {'points':>8}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for n, k, m in cases:
        case = make_case(n, k, m, seed=n * 1000 + k)
        times = [time_backend(b, case, args.repeats) for b in backends]
        row = f"{n:>3} {k:>4} {m:>8}" + "".join(f"{t * 1e3:>10.1f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
