# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend for the disk-quadrature hot loop.

Semantics match ``telefid._diskkern_py.disk_log_nodes`` exactly; see that
module for the contract.  The loops run without the GIL.
"""

from libc.math cimport acos, ceil, cos, exp, log, INFINITY, M_PI

import numpy as np


def disk_log_nodes(s, double r, double m_c, double beta, double V_n,
                   ang_x, ang_w, double exp_step, double exp_cut):
    s_arr = np.ascontiguousarray(s, dtype=np.float64)
    ax_arr = np.ascontiguousarray(ang_x, dtype=np.float64)
    aw_arr = np.ascontiguousarray(ang_w, dtype=np.float64)
    out_arr = np.empty_like(s_arr)

    cdef double[::1] sv = s_arr
    cdef double[::1] ax = ax_arr
    cdef double[::1] aw = aw_arr
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j, k, n = sv.shape[0], q = ax.shape[0]
    cdef int n_pan
    cdef double mc2 = m_c * m_c
    cdef double r2 = r * r
    cdef double base = -log(M_PI * V_n)
    cdef double si, crs, denom, t_raw, t, phi_a, drop_full, drop
    cdef double lvl, lo, hi, half, mid, acc, b_val, step

    with nogil:
        for i in range(n):
            si = sv[i]
            if si <= 0.0:
                out[i] = -INFINITY
                continue
            crs = 2.0 * beta * r * si
            denom = 2.0 * r * si
            if denom > 0.0:
                t_raw = (mc2 - r2 - si * si) / denom
            else:
                t_raw = 1.0 if si <= m_c else -1.0
            if t_raw <= -1.0:
                out[i] = -INFINITY
                continue
            t = t_raw if t_raw < 1.0 else 1.0
            phi_a = acos(t)

            drop_full = crs * (1.0 + t)
            b_val = 0.0
            if drop_full <= exp_step:
                half = 0.5 * (M_PI - phi_a)
                mid = 0.5 * (M_PI + phi_a)
                acc = 0.0
                for j in range(q):
                    acc += aw[j] * exp(crs * (cos(mid + half * ax[j]) - t))
                b_val = half * acc
            else:
                drop = drop_full if drop_full < exp_cut else exp_cut
                n_pan = <int>ceil(drop / exp_step)
                step = drop / n_pan
                hi = phi_a
                for k in range(n_pan):
                    lo = hi
                    lvl = t - step * (k + 1)
                    if lvl < -1.0:
                        lvl = -1.0
                    hi = acos(lvl)
                    half = 0.5 * (hi - lo)
                    mid = 0.5 * (hi + lo)
                    acc = 0.0
                    for j in range(q):
                        acc += aw[j] * exp(crs * (cos(mid + half * ax[j]) - t))
                    b_val += half * acc
            if b_val <= 0.0:
                out[i] = -INFINITY
                continue
            out[i] = (log(si) + base - si * si / V_n
                      + beta * (r2 + si * si - mc2)
                      + log(2.0) + crs * t + log(b_val))
    return out_arr


def backend_name():
    return "cython"
