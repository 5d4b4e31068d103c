"""Benchmark the compiled kernels against the pure-numpy fallback.

The OOSPLAN_NUMBA flag is read at import time, so each backend is timed
in a fresh subprocess.  Usage: python benchmarks/bench_kernels.py
"""

import json
import os
import subprocess
import sys
import textwrap

WORKLOAD = textwrap.dedent("""
    import json, time
    import numpy as np
    from oosplan import accel, kernels
    from oosplan.mission import Evaluator
    from oosplan.io import load_scenario
    from oosplan.cli import DEFAULT_SCENARIO

    scenario = load_scenario(DEFAULT_SCENARIO)
    ev = Evaluator(scenario)
    rng = np.random.default_rng(0)
    n = scenario.n_tasks

    # warm up (numba compilation happens here, not in the timed region)
    route = rng.permutation(n).astype(np.int64)
    rot = rng.integers(1, 6, n, dtype=np.int64)
    splits = np.array([n - n // 2, n // 2], dtype=np.int64)
    ev.fitness(route, rot, splits)

    results = {"backend": "numba" if accel.USING_NUMBA else "numpy"}

    reps = int(%(reps)d)
    t0 = time.perf_counter()
    for _ in range(reps):
        route = rng.permutation(n).astype(np.int64)
        rot = rng.integers(1, 6, n, dtype=np.int64)
        ev.fitness(route, rot, splits)
    dt = time.perf_counter() - t0
    results["evals_per_s"] = reps / dt
    results["legs_per_s"] = reps * n / dt
    results["seconds"] = dt
    print("BENCH " + json.dumps(results))
""")


def run_backend(flag: str, reps: int) -> dict:
    env = dict(os.environ, OOSPLAN_NUMBA=flag)
    out = subprocess.run([sys.executable, "-c", WORKLOAD % {"reps": reps}],
                         env=env, capture_output=True, text=True,
                         check=True)
    for line in out.stdout.splitlines():
        if line.startswith("BENCH "):
            return json.loads(line[6:])
    raise RuntimeError(f"no benchmark output:\n{out.stdout}\n{out.stderr}")


def main() -> None:
    reps = int(sys.argv[1]) if len(sys.argv) > 1 else 20000
    rows = [run_backend("1", reps), run_backend("0", max(reps // 20, 100))]
    print(f"{'backend':<8} {'evals/s':>12} {'legs/s':>12} {'seconds':>9}")
    for r in rows:
        print(f"{r['backend']:<8} {r['evals_per_s']:>12.0f} "
              f"{r['legs_per_s']:>12.0f} {r['seconds']:>9.3f}")
    if rows[0]["backend"] == "numba":
        speedup = rows[0]["evals_per_s"] / rows[1]["evals_per_s"]
        print(f"numba speedup: {speedup:.1f}x")


if __name__ == "__main__":
    main()
