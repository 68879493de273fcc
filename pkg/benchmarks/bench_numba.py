"""Compare the numba-accelerated kernels against the pure-numpy fallback.

The backend is chosen at import time from ``ISINGRG_DISABLE_NUMBA``, so this
script re-executes itself in a child process per backend and reports the
best-of-N wall times side by side.

Usage: python3 benchmarks/bench_numba.py
"""

import json
import os
import subprocess
import sys
import time

WORKLOADS = ("partition_brute 22-spin torus", "cascade_abs2 32768-point grid")


def run_workloads() -> dict:
    import numpy as np

    from isingrg._accel import HAS_NUMBA, cascade_abs2, partition_brute
    from isingrg.wavelet import make_daubechies_filter

    results = {"numba": HAS_NUMBA}
    # warm up once so jit compilation is not part of the timed section
    partition_brute(0.44, 0.44, 2, 2)
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        partition_brute(0.4407, 0.4407, 11, 2)
        best = min(best, time.perf_counter() - t0)
    results[WORKLOADS[0]] = best

    taps = make_daubechies_filter(4).taps
    k = np.linspace(-np.pi, np.pi, 32768)
    cascade_abs2(taps, k[:8], 4)
    best = float("inf")
    for _ in range(5):
        t0 = time.perf_counter()
        cascade_abs2(taps, k, 12)
        best = min(best, time.perf_counter() - t0)
    results[WORKLOADS[1]] = best
    return results


def child(disable: bool) -> dict:
    env = dict(os.environ)
    if disable:
        env["ISINGRG_DISABLE_NUMBA"] = "1"
    else:
        env.pop("ISINGRG_DISABLE_NUMBA", None)
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--worker"],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.splitlines()[-1])


def main() -> int:
    if "--worker" in sys.argv:
        print(json.dumps(run_workloads()))
        return 0
    accel = child(disable=False)
    plain = child(disable=True)
    if not accel["numba"]:
        print("warning: numba unavailable; both columns use the numpy path")
    print(f"{'workload':<34} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name in WORKLOADS:
        a, p = accel[name], plain[name]
        print(f"{name:<34} {a:>9.4f}s {p:>9.4f}s {p / a:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
