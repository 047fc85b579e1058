"""Time the RK4 kernels compiled with numba and interpreted.

Each path runs in its own interpreter because the choice is fixed at import.

    python benchmarks/bench_kernels.py [--steps N]
"""
import argparse
import os
import subprocess
import sys

CHILD = """
import time
from ieit import _kernels
n = {steps}
args_rwa = (0j, 0j, -4j, -4j, 2.0, 2.0, 2+0j, 3.0, 0.0, 1e-3, n, 1)
args_full = (0j, 0j, 4+0j, 2.0, 2.0, 2+0j, 0.0, 2000.0, 3.0, 0.0, 2.5e-6, n, 1)
for name, fn, args in (("rk4_rwa", _kernels.rk4_rwa, args_rwa),
                       ("rk4_full", _kernels.rk4_full, args_full)):
    fn(*args[:-2], 10, 1)  # compile outside the timed region
    t = time.perf_counter()
    fn(*args)
    print(name, time.perf_counter() - t)
"""


def run(steps, disable):
    env = dict(os.environ, IEIT_DISABLE_NUMBA="1" if disable else "0")
    out = subprocess.run([sys.executable, "-c", CHILD.format(steps=steps)], env=env,
                         check=True, capture_output=True, text=True).stdout
    return {k: float(v) for k, v in (line.split() for line in out.splitlines())}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=200_000)
    args = ap.parse_args()
    jit, py = run(args.steps, False), run(args.steps, True)
    print(f"{'kernel':<10}{'numba (s)':>12}{'python (s)':>12}{'speedup':>10}")
    for name in jit:
        print(f"{name:<10}{jit[name]:>12.4f}{py[name]:>12.4f}{py[name] / jit[name]:>10.1f}")


if __name__ == "__main__":
    main()
