"""Benchmark the simulation inner loop: numba-compiled vs pure-python path.

Run: python benchmarks/bench_kernels.py [--steps 100000] [--repeats 5]
(DOBLAB_DISABLE_NUMBA only affects which path the library picks by default;
this script times both explicitly.)
"""

import argparse
import time

import numpy as np

from doblab import _kernels
from doblab.control import PdGains, SineTrajectory
from doblab.disturbance import Sine, Step, Sum
from doblab.plant import ServoParams
from doblab.sim import ContinuousTruth, HpObserver, Scenario, run


def make_scenario(steps):
    return Scenario(
        truth=ServoParams(J=0.006, b=0.0015),
        nominal=ServoParams(J=0.005, b=0.001),
        Ts=1e-3,
        duration=steps * 1e-3,
        mode=ContinuousTruth(10),
        observer=HpObserver(0.5, 0.5),
        pd=PdGains(50.0, 5.0),
        reference=SineTrajectory(amp=0.5, freq=0.5),
        disturbance=Sum((Step(t0=1.0, amp=1.0), Sine(amp=0.5, freq=2.0))),
    )


def time_path(kernel, sc, repeats):
    saved = _kernels.sim_loop
    _kernels.sim_loop = kernel
    try:
        run(sc)  # warmup / compile
        best = np.inf
        for _ in range(repeats):
            t0 = time.perf_counter()
            run(sc)
            best = min(best, time.perf_counter() - t0)
    finally:
        _kernels.sim_loop = saved
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    sc = make_scenario(args.steps)
    t_py = time_path(_kernels.sim_loop_py, sc, args.repeats)
    print(f"pure python: {t_py * 1e3:8.1f} ms  ({args.steps / t_py / 1e6:.2f} Msteps/s)")
    if _kernels.sim_loop_jit is None:
        print("numba not installed; jit path skipped")
        return
    t_jit = time_path(_kernels.sim_loop_jit, sc, args.repeats)
    print(f"numba njit:  {t_jit * 1e3:8.1f} ms  ({args.steps / t_jit / 1e6:.2f} Msteps/s)")
    print(f"speedup: {t_py / t_jit:.1f}x")


if __name__ == "__main__":
    main()
