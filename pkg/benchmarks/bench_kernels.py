"""Benchmark the compiled kernels against the pure-numpy reference.

Times the three hot entry points on autocorrelation- and diffraction-shaped
workloads, reports the speedup, and cross-checks that both backends agree.

Usage:
    python benchmarks/bench_kernels.py [--scale 1.0] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from diffcomb._kernels import _ref

try:
    from diffcomb._kernels import _ckern
except ImportError:
    _ckern = None


def _best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _workloads(scale):
    rng = np.random.Generator(np.random.Philox(key=42))
    n = int(200_000 * scale)
    keys = np.flatnonzero(rng.random(2 * n) < 0.5)[:n].astype(np.int64)
    w = rng.standard_normal(keys.shape[0]) + 1j * rng.standard_normal(keys.shape[0])
    deltas = np.arange(1, int(4096 * scale) + 1, dtype=np.int64)

    m = int(40_000 * scale)
    pos = np.sort(rng.uniform(0.0, m, size=m))[:, None]
    wf = rng.standard_normal(m) + 0j
    K = rng.uniform(0.0, 1.0, size=(int(2048 * scale), 1))

    coords = rng.integers(-2_000, 2_000, size=(m, 2)).astype(np.int64)
    C = rng.uniform(0.0, 1.0, size=(int(2048 * scale), 2))

    return [
        ("pair_sums", f"{keys.shape[0]} pts x {deltas.shape[0]} deltas",
         lambda mod: mod.pair_sums(keys, w, deltas)),
        ("expsum_float_batch", f"{m} pts x {K.shape[0]} k",
         lambda mod: mod.expsum_float_batch(pos, wf, K)),
        ("expsum_int_batch", f"{m} pts x {C.shape[0]} rows",
         lambda mod: mod.expsum_int_batch(coords, wf, C)),
    ]


def _max_dev(a, b):
    if isinstance(a, tuple):
        return max(_max_dev(x, y) for x, y in zip(a, b))
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) if np.size(a) else 0.0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=float, default=1.0,
                    help="workload size multiplier (default 1.0)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="timing repeats, best is kept (default 3)")
    args = ap.parse_args(argv)

    if _ckern is None:
        print("compiled backend not available; timing the pure backend only")

    header = f"{'kernel':<20} {'workload':<26} {'pure':>10} {'compiled':>10} {'speedup':>8}  agreement"
    print(header)
    print("-" * len(header))
    for name, desc, call in _workloads(args.scale):
        t_ref, out_ref = _best_of(lambda: call(_ref), args.repeat)
        if _ckern is None:
            print(f"{name:<20} {desc:<26} {t_ref:>9.3f}s {'-':>10} {'-':>8}")
            continue
        t_c, out_c = _best_of(lambda: call(_ckern), args.repeat)
        dev = _max_dev(out_ref, out_c)
        print(f"{name:<20} {desc:<26} {t_ref:>9.3f}s {t_c:>9.3f}s {t_ref / t_c:>7.1f}x  {dev:.2e}")
        if dev > 1e-9:
            raise SystemExit(f"backend mismatch in {name}: {dev}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
