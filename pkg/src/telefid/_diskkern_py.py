"""Pure-NumPy backend for the disk-quadrature hot loop.

``disk_log_nodes`` evaluates, at a batch of radial nodes ``s`` (radius of
the record noise ``n``), the logarithm of the angularly integrated
integrand

    G(s) = s * p_n(s) * exp(beta * (|m|^2 - m_c^2)) integrated over the
           angles for which |m| <= m_c,   with |m|^2 = r^2 + s^2 + 2 r s cos(phi),

i.e. the radial profile of the filtered-noise integral after the exact-arc
angular reduction.  The angular integral at each node runs over the exact
acceptance arc and is split into Gauss-Legendre panels of bounded exponent
variation, so the result is accurate even when the tilt ``beta`` makes the
integrand vary by hundreds of e-folds along the arc.

The compiled extension ``_diskkern`` implements the same function with
identical semantics; see ``telefid.kernels`` for backend selection.
"""

from __future__ import annotations

import math

import numpy as np

_LOG2 = math.log(2.0)


def disk_log_nodes(s, r, m_c, beta, V_n, ang_x, ang_w, exp_step, exp_cut):
    """Log of the angular-reduced integrand at radial nodes ``s``.

    Parameters
    ----------
    s : ndarray
        Radial nodes, all inside [max(0, r - m_c), r + m_c].
    r : float
        Input radius |alpha| (>= 0).
    m_c, beta, V_n : float
        Cut-off, exponential tilt (>= 0; 0 means a hard disk) and record
        noise variance.
    ang_x, ang_w : ndarray
        Gauss-Legendre nodes/weights on [-1, 1] for the angular panels.
    exp_step, exp_cut : float
        Target exponent drop per angular panel and total drop beyond which
        the arc tail is discarded (relative error ~ exp(-exp_cut)).

    Returns
    -------
    ndarray of log G(s); -inf where the acceptance arc has zero measure.
    """
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)

    mc2 = m_c * m_c
    r2 = r * r
    base = -math.log(math.pi * V_n)

    for i, si in enumerate(s):
        if si <= 0.0:
            out[i] = -np.inf
            continue
        crs = 2.0 * beta * r * si
        denom = 2.0 * r * si
        if denom > 0.0:
            t_raw = (mc2 - r2 - si * si) / denom
        else:
            t_raw = 1.0 if si <= m_c else -1.0
        if t_raw <= -1.0:
            out[i] = -np.inf
            continue
        t = min(t_raw, 1.0)
        phi_a = math.acos(t)

        drop_full = crs * (1.0 + t)
        if drop_full <= exp_step:
            # single panel over the whole arc, integrand within e^(step) of flat
            half = 0.5 * (math.pi - phi_a)
            mid = 0.5 * (math.pi + phi_a)
            phi = mid + half * ang_x
            b_val = half * np.dot(ang_w, np.exp(crs * (np.cos(phi) - t)))
        else:
            drop = min(drop_full, exp_cut)
            n_pan = int(math.ceil(drop / exp_step))
            levels = t - (drop / n_pan) * np.arange(n_pan + 1)
            bounds = np.arccos(np.clip(levels, -1.0, 1.0))
            half = 0.5 * (bounds[1:] - bounds[:-1])
            mid = 0.5 * (bounds[1:] + bounds[:-1])
            phi = mid[:, None] + half[:, None] * ang_x[None, :]
            vals = np.exp(crs * (np.cos(phi) - t))
            b_val = float(np.dot(vals @ ang_w, half))
        if b_val <= 0.0:
            out[i] = -np.inf
            continue
        out[i] = (math.log(si) + base - si * si / V_n
                  + beta * (r2 + si * si - mc2)
                  + _LOG2 + crs * t + math.log(b_val))
    return out


def backend_name() -> str:
    return "numpy"
