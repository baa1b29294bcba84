#!/usr/bin/env python3
"""Compare the compiled (gmpy2/MPC) and Python (mpmath) big-float kernels.

The kernel is fixed at import time, so each backend runs in a child
process with WEYLDISC_BACKEND set.  The workload is the full classifier
(propagation, disc sequence, stabilized chi profile) on every built-in
scenario at the default window and precision.

Usage: python bench/benchmark_backends.py [--n-max N] [--repeat R]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
from weyldisc import big_backend_name, builtin_names, builtin_scenario, classify
import dataclasses

n_max = int(sys.argv[1])
repeat = int(sys.argv[2])
out = {"backend": big_backend_name(), "runs": {}}
for name in builtin_names():
    scenario = dataclasses.replace(builtin_scenario(name), n_max=n_max)
    model = scenario.model()
    options = scenario.classify_options()
    best = None
    verdict = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        verdict = classify(model, scenario.lam, scenario.alpha, options).verdict
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    out["runs"][name] = {"seconds": best, "verdict": verdict}
print(json.dumps(out))
"""


def run_backend(backend: str, n_max: int, repeat: int) -> dict:
    env = dict(os.environ, WEYLDISC_BACKEND=backend)
    proc = subprocess.run(
        [sys.executable, "-c", CHILD, str(n_max), str(repeat)],
        env=env, capture_output=True, text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(f"{backend} run failed:\n{proc.stderr}")
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=200)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    results = {}
    for backend in ("gmpy2", "mpmath"):
        try:
            results[backend] = run_backend(backend, args.n_max, args.repeat)
        except RuntimeError as exc:
            print(f"skipping {backend}: {exc}", file=sys.stderr)

    if len(results) < 2:
        print("need both backends importable for a comparison", file=sys.stderr)
        return 1

    gm = results["gmpy2"]["runs"]
    mp = results["mpmath"]["runs"]
    print(f"classify, n_max={args.n_max}, 256-bit, best of {args.repeat}")
    print(f"{'scenario':10s} {'gmpy2 (s)':>12s} {'mpmath (s)':>12s} {'speedup':>9s}  verdict")
    total_gm = total_mp = 0.0
    for name in gm:
        g, m = gm[name]["seconds"], mp[name]["seconds"]
        total_gm += g
        total_mp += m
        assert gm[name]["verdict"] == mp[name]["verdict"], name
        print(f"{name:10s} {g:12.4f} {m:12.4f} {m / g:8.1f}x  {gm[name]['verdict']}")
    print(f"{'total':10s} {total_gm:12.4f} {total_mp:12.4f} {total_mp / total_gm:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
