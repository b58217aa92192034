"""Benchmark the compiled kernels against the pure-NumPy fallback.

Times the per-update workhorse (fused objective + gradients) and the
posterior-only pass on three representative topologies.

Run:  python benchmarks/bench_backends.py
"""

import time

import numpy as np

from vicon._backend import available_backends
from vicon.model import init_params
from vicon.topology import build_topology

CASES = [
    ("1-D stripes (M=30)", dict(grid_shape=30, retina_shape=30, num_retinae=2,
                                rf_shape=9, inhibition_shape=5, leakage_shape=5)),
    ("2-D stripes (40x40)", dict(grid_shape=(40, 40), num_retinae=2,
                                 rf_shape=(3, 3), inhibition_shape=(5, 5),
                                 leakage_shape=(3, 3))),
    ("orientation (30x30, RF 17x17)", dict(grid_shape=(30, 30), num_retinae=1,
                                           rf_shape=(17, 17), inhibition_shape=(9, 9),
                                           leakage_shape=(3, 3))),
]


def _time(fn, reps):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def main():
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    for label, geometry in CASES:
        topo = build_topology(leakage_sigma=1.0, **geometry)
        rng = np.random.default_rng(0)
        params = init_params(topo, rng)
        x = rng.uniform(-0.5, 0.5, topo.input_dim)
        reps = max(20, int(2_000_000 / max(topo.num_rf_entries, 1)))
        print(f"\n{label}: M={topo.num_neurons}, d={topo.input_dim}, "
              f"rf entries={topo.num_rf_entries}, {reps} reps")
        base = None
        for name, mod in backends.items():
            t_grad = _time(lambda m=mod: m.gradient_pass(
                topo, params.weights, params.biases, params.references, x), reps)
            t_post = _time(lambda m=mod: m.posterior_pass(
                topo, params.weights, params.biases, x), reps)
            speed = "" if base is None else f"  ({base / t_grad:.1f}x vs numpy)"
            if base is None:
                base = t_grad
            print(f"  {name:>9}: gradients {t_grad * 1e6:8.1f} us"
                  f"   posterior {t_post * 1e6:8.1f} us{speed}")


if __name__ == "__main__":
    main()
