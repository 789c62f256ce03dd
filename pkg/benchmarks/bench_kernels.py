#!/usr/bin/env python3
"""Benchmark the compiled disk-quadrature kernel against the NumPy fallback.

Three levels: raw kernel batches, a 121-point fidelity profile, and one
full ensemble-moments evaluation.  Both backends produce the same numbers
(to ~1e-12 relative); this script only measures speed.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

import telefid.kernels as kernels
from telefid.ensemble import _build_table, conditional_moments
from telefid.model import MbNla, PriorSpec, SurrogateParams
from telefid.profile import Protocol, profile_table
from telefid.quadrature import QuadConfig, gauss_legendre

PARAMS = SurrogateParams(0.5, 0.1, 0.6)
PRIOR = PriorSpec(2.0)
PROTO = Protocol(PARAMS, MbNla(1.2, 3.0))


def time_call(fn, min_repeat=3, min_seconds=0.5):
    fn()  # warm-up
    times = []
    while len(times) < min_repeat or sum(times) < min_seconds:
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
        if len(times) > 200:
            break
    return min(times)


def bench_backend(name, mod):
    kernels.disk_log_nodes = mod.disk_log_nodes
    cfg = QuadConfig()
    ax, aw = gauss_legendre(cfg.angular_order)
    s = np.linspace(0.05, 5.95, 256)

    t_kernel = time_call(
        lambda: mod.disk_log_nodes(s, 2.5, 3.0, 1 - 1 / 1.44, 0.5, ax, aw,
                                   4.0, 60.0))
    radii = np.linspace(0.0, 6.0, 121)
    t_profile = time_call(lambda: profile_table(radii, PROTO, cfg))

    def moments():
        _build_table.cache_clear()
        conditional_moments(PROTO, PRIOR, cfg)

    t_moments = time_call(moments, min_repeat=2, min_seconds=0.3)
    print(f"{name:>8}:  kernel(256 nodes) {t_kernel * 1e6:9.1f} us   "
          f"profile(121 pts) {t_profile * 1e3:9.1f} ms   "
          f"moments {t_moments * 1e3:9.1f} ms")
    return t_kernel, t_profile, t_moments


def main():
    backends = kernels.get_backends()
    print(f"available backends: {', '.join(backends)} "
          f"(selected at import: {kernels.backend_name()})")
    original = kernels.disk_log_nodes
    results = {}
    try:
        for name in sorted(backends):
            results[name] = bench_backend(name, backends[name])
    finally:
        kernels.disk_log_nodes = original
    if len(results) == 2:
        speedup = [results["numpy"][i] / results["cython"][i]
                   for i in range(3)]
        print(f"speedup (numpy / cython): kernel {speedup[0]:.1f}x, "
              f"profile {speedup[1]:.1f}x, moments {speedup[2]:.1f}x")


if __name__ == "__main__":
    main()
