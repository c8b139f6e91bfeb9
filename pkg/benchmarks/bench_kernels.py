"""Compare the numba kernels with the pure numpy fallback.

Each backend runs in its own interpreter because the choice is made at
import time from MOVOID_NUMBA. Numba timings exclude the first (compiling)
call.

    python benchmarks/bench_kernels.py                     # W(5,9), all kernels
    python benchmarks/bench_kernels.py --skip-generators   # seconds
"""

import argparse
import json
import os
import subprocess
import sys
import time

WORKER = r"""
import json, sys, time
import numpy as np
from movoid import kernels
from movoid.construct import ConstructionParams, build_candidate

p, ell, t, r, skip_gen = json.loads(sys.argv[1])
cand = build_candidate(ConstructionParams.resolve(p, ell=ell, t=t, r=r))
space, sys_ = cand.space, cand.cyclotomy
F = space.field
logs = sys_.union_logs(cand.J)
out = {"backend": kernels.backend()}

def timed(name, fn, repeat=3):
    fn()  # warm up / compile
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out[name] = best

timed("trace_histograms", lambda: kernels.trace_histograms(
    F.abs_trace_by_log, logs, np.arange(sys_.N, dtype=np.int64), F.p))
ys = np.arange(space.num_points, dtype=np.int64)
timed("perp_counts", lambda: space.perp_counts(ys, cand.M), repeat=1)
if not skip_gen:
    timed("generator_scan", lambda: space.scan_generators(cand.M), repeat=1)
print(json.dumps(out))
"""


def run(backend_flag: str, args) -> dict:
    env = dict(os.environ, MOVOID_NUMBA=backend_flag)
    payload = json.dumps([args.p, args.l, args.t, args.r, args.skip_generators])
    res = subprocess.run([sys.executable, "-c", WORKER, payload], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=3)
    ap.add_argument("--l", type=int, default=3)
    ap.add_argument("--t", type=int, default=2)
    ap.add_argument("--r", type=int, default=3)
    ap.add_argument("--skip-generators", action="store_true")
    args = ap.parse_args()
    t0 = time.perf_counter()
    fast = run("1", args)
    slow = run("0", args)
    print(f"instance p={args.p} l={args.l} t={args.t} r={args.r}"
          f"  (total {time.perf_counter() - t0:.1f}s)")
    print(f"{'kernel':<18}{'numba':>10}{'numpy':>10}{'speedup':>9}")
    for key in fast:
        if key == "backend":
            continue
        a, b = fast[key], slow[key]
        print(f"{key:<18}{a:>9.3f}s{b:>9.3f}s{b / a:>8.1f}x")
    if fast["backend"] != "numba":
        print("warning: numba unavailable, both columns ran numpy")


if __name__ == "__main__":
    main()
