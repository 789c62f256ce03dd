"""Deterministic numerical integration for the filtered-teleportation model.

Two geometries occur throughout the package:

* integrals of the record noise over the filter's acceptance set
  ``{n : |alpha + n| <= m_c}``, parameterized in polar coordinates of ``n``
  relative to ``alpha`` with the angular range at each radius solved
  exactly (the hard cut-off never enters an integrand discontinuously);
* one-dimensional radial averages against the Gaussian input prior.

The acceptance-set integrals come in a generic linear-domain form
(``disk_average``, arbitrary integrand callback) and a specialized
log-domain form (``disk_pair_log``) that evaluates the success-probability
and fidelity-numerator integrals on shared nodes so their discretization
errors cancel in the ratio, and that stays finite when both integrals
underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np

from . import kernels

__all__ = [
    "QuadConfig",
    "QuadratureError",
    "DiskPair",
    "gauss_legendre",
    "log_sum_guard",
    "disk_average",
    "disk_pair_log",
    "radial_prior_average",
]

# Angular panels are sized so the integrand varies by at most _EXP_STEP
# e-folds per panel; arc tails more than _EXP_CUT e-folds below the peak
# are dropped (relative error ~ e^-60 ~ 9e-27).
_EXP_STEP = 4.0
_EXP_CUT = 60.0
_MAX_LEAVES = 512


@dataclass(frozen=True)
class QuadConfig:
    """Orders, panel counts and tolerances for all deterministic integrals."""

    radial_order: int = 24
    angular_order: int = 16
    panels: int = 4
    rel_tol: float = 1e-9
    abs_tol: float = 1e-14
    prior_trunc_eps: float = 1e-12

    def __post_init__(self):
        if self.radial_order < 8 or self.angular_order < 8:
            raise ValueError("quadrature orders must be >= 8")
        if self.panels < 1:
            raise ValueError("panels must be >= 1")
        for name in ("rel_tol", "abs_tol", "prior_trunc_eps"):
            if not (getattr(self, name) > 0.0):
                raise ValueError(f"{name} must be > 0")


class QuadratureError(RuntimeError):
    """Non-convergence after the panel refinement limit.

    Carries the best available estimate and its error bound so callers can
    degrade gracefully (sweeps record the flag instead of aborting).
    """

    def __init__(self, message: str, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class DiskPair(NamedTuple):
    """Shared-node log integrals over the acceptance set."""

    log_den: float   # log of the success-probability integral
    log_num: float   # log of the overlap-weighted integral
    converged: bool
    error_bound: float


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def log_sum_guard(log_terms: Sequence[float]) -> float:
    """log(sum(exp(log_terms))) via the max-shift technique; rejects empty input."""
    arr = np.asarray(log_terms, dtype=float)
    if arr.size == 0:
        raise ValueError("log_sum_guard needs at least one term")
    m = float(np.max(arr))
    if not math.isfinite(m):
        return m  # all -inf (empty sum) or an inf term dominates
    return m + math.log(float(np.sum(np.exp(arr - m))))


# ---------------------------------------------------------------------------
# acceptance-set geometry
# ---------------------------------------------------------------------------

def _disk_segments(r: float, m_c: float):
    """Radial segments covering [max(0, r - m_c), r + m_c].

    The full-circle part (every angle accepted) is integrated in the plain
    radial variable; the partial-arc part uses a sin^2 substitution that
    regularizes the square-root behaviour of the arc length at both of its
    endpoints.  Segments are (kind, s_lo, s_hi) with u-domains [s_lo, s_hi]
    for "lin" and [0, pi/2] for "sinsq".
    """
    if r <= 1e-9 * max(1.0, m_c):
        return [("lin", 0.0, m_c)]
    if r < m_c:
        return [("lin", 0.0, m_c - r), ("sinsq", m_c - r, m_c + r)]
    return [("sinsq", r - m_c, r + m_c)]


def _seg_domain(seg):
    return (seg[1], seg[2]) if seg[0] == "lin" else (0.0, 0.5 * math.pi)


def _seg_map(seg, u):
    """Map engine coordinates to (s, jacobian)."""
    kind, p0, p1 = seg
    if kind == "lin":
        return u, np.ones_like(u)
    d = p1 - p0
    sin_u = np.sin(u)
    return p0 + d * sin_u * sin_u, d * np.sin(2.0 * u)


def _arc_cos_limit(s, r, m_c):
    """cos(phi) threshold of the acceptance arc, clipped to [-1, 1]."""
    s = np.asarray(s, dtype=float)
    denom = 2.0 * r * s
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (m_c * m_c - r * r - s * s) / denom
    t = np.where(denom > 0.0, t, np.where(s <= m_c, 1.0, -1.0))
    return np.clip(t, -1.0, 1.0)


# ---------------------------------------------------------------------------
# adaptive panel engine
# ---------------------------------------------------------------------------

class _Leaf:
    __slots__ = ("seg", "a", "b", "value", "err", "left", "right")

    def __init__(self, seg, a, b, value, err, left, right):
        self.seg = seg
        self.a = a
        self.b = b
        self.value = value   # sum of the two half-panel evaluations
        self.err = err       # |halves - whole|, per accumulator
        self.left = left     # cached half values, reused on split
        self.right = right


def _presplit(segments, n):
    """Split each segment's engine domain into n equal initial panels."""
    out = []
    for seg in segments:
        lo, hi = _seg_domain(seg)
        edges = np.linspace(lo, hi, n + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            out.append((seg, float(a), float(b)))
    return out


def _adaptive_sum(panel_eval, panels, rel_tol, abs_tol,
                  max_leaves=_MAX_LEAVES):
    """Adaptive bisection with vector-valued accumulators.

    ``panel_eval(seg, a, b)`` returns an ndarray of accumulator
    contributions for one panel; ``panels`` is a list of (seg, a, b)
    starting windows.  Each leaf's value is the sum over its two halves and
    its error estimate is the whole-vs-halves discrepancy; the leaf with
    the largest normalized error is bisected until every accumulator's
    summed error passes ``max(abs_tol, rel_tol * |total|)``.  Ties split
    the leftmost leaf, so refinement is deterministic.
    """

    def make_leaf(seg, a, b, whole=None):
        if whole is None:
            whole = panel_eval(seg, a, b)
        m = 0.5 * (a + b)
        left = panel_eval(seg, a, m)
        right = panel_eval(seg, m, b)
        value = left + right
        return _Leaf(seg, a, b, value, np.abs(value - whole), left, right)

    leaves = [make_leaf(seg, a, b) for seg, a, b in panels]
    while True:
        total = np.sum([lf.value for lf in leaves], axis=0)
        err = np.sum([lf.err for lf in leaves], axis=0)
        tol = np.maximum(abs_tol, rel_tol * np.abs(total))
        if np.all(err <= tol):
            return total, err, True
        if len(leaves) >= max_leaves:
            return total, err, False
        scores = [float(np.max(lf.err / tol)) for lf in leaves]
        idx = int(np.argmax(scores))
        worst = leaves.pop(idx)
        m = 0.5 * (worst.a + worst.b)
        leaves.insert(idx, make_leaf(worst.seg, m, worst.b, whole=worst.right))
        leaves.insert(idx, make_leaf(worst.seg, worst.a, m, whole=worst.left))


# ---------------------------------------------------------------------------
# specialized log-domain acceptance-set integrals
# ---------------------------------------------------------------------------

def disk_pair_log(r: float, m_c: float, beta: float, gamma: float,
                  V_n: float, cfg: QuadConfig) -> DiskPair:
    """Log of the two acceptance-set integrals behind the fidelity ratio.

    Denominator integrand: ``p_n(|n|) * w(alpha + n)``; numerator carries
    the extra factor ``exp(-gamma |n|^2)``.  Both are evaluated on the same
    radial and angular nodes.  ``beta = 0`` describes a hard-disk filter.
    Results are exact logs: finite for every finite ``r`` even when the
    linear-domain values underflow.
    """
    if not (V_n > 0.0):
        raise ValueError("disk integrals need V_n > 0")
    segments = _disk_segments(r, m_c)
    ax, aw = gauss_legendre(cfg.angular_order)

    # probe the integrand scale so panel sums can be accumulated linearly
    probe_logs = []
    probe_logs_num = []
    for seg in segments:
        lo, hi = _seg_domain(seg)
        u = np.linspace(lo, hi, 33)[1:-1]
        s, _ = _seg_map(seg, u)
        lg = kernels.disk_log_nodes(s, r, m_c, beta, V_n, ax, aw,
                                    _EXP_STEP, _EXP_CUT)
        probe_logs.append(np.max(lg))
        probe_logs_num.append(np.max(lg - gamma * s * s))
    m0 = float(max(probe_logs))
    m1 = float(max(probe_logs_num))
    if not math.isfinite(m0):
        return DiskPair(-math.inf, -math.inf, True, 0.0)

    def panel_eval(seg, a, b):
        x, w = gauss_legendre(cfg.radial_order)
        half = 0.5 * (b - a)
        u = 0.5 * (a + b) + half * x
        s, jac = _seg_map(seg, u)
        wts = w * half * jac
        lg = kernels.disk_log_nodes(s, r, m_c, beta, V_n, ax, aw,
                                    _EXP_STEP, _EXP_CUT)
        den = float(np.dot(wts, np.exp(lg - m0)))
        num = float(np.dot(wts, np.exp(lg - gamma * s * s - m1)))
        return np.array([den, num])

    pre = _presplit(segments, cfg.panels)
    total, err, ok = _adaptive_sum(panel_eval, pre,
                                            cfg.rel_tol, cfg.abs_tol)
    log_den = m0 + math.log(total[0]) if total[0] > 0.0 else -math.inf
    log_num = m1 + math.log(total[1]) if total[1] > 0.0 else -math.inf
    bound = float(np.max(err / np.maximum(np.abs(total), 1e-300)))
    return DiskPair(log_den, log_num, bool(ok), bound)


# ---------------------------------------------------------------------------
# generic acceptance-set average
# ---------------------------------------------------------------------------

def _callable_on_arrays(f: Callable) -> Callable:
    def g(s, cos_phi):
        try:
            out = np.asarray(f(s, cos_phi), dtype=float)
        except (TypeError, ValueError):
            out = np.vectorize(f, otypes=[float])(s, cos_phi)
        if out.shape != s.shape:
            out = np.broadcast_to(out, s.shape).astype(float)
        return out

    return g


def disk_average(integrand: Callable, r: float, m_c: float,
                 cfg: QuadConfig) -> float:
    """Integral of ``integrand(s, cos_phi)`` over the acceptance set.

    ``s`` is the radius of the record noise and ``cos_phi`` the cosine of
    its angle relative to the input displacement (radius ``r``); the radial
    Jacobian ``s`` and the phi -> -phi symmetry factor are applied here, so
    ``integrand = 1`` returns the disk area.  The callback should accept
    NumPy arrays; scalar-only callables are vectorized automatically.
    """
    if not (m_c > 0.0):
        raise ValueError("disk_average needs m_c > 0")
    if not (r >= 0.0 and math.isfinite(r)):
        raise ValueError("disk_average needs finite r >= 0")
    f = _callable_on_arrays(integrand)
    segments = _disk_segments(r, m_c)
    ax, aw = gauss_legendre(cfg.angular_order)
    n_sub = max(2, cfg.panels)

    def panel_eval(seg, a, b):
        x, w = gauss_legendre(cfg.radial_order)
        half = 0.5 * (b - a)
        u = 0.5 * (a + b) + half * x
        s, jac = _seg_map(seg, u)
        wts = w * half * jac * s
        phi_a = np.arccos(_arc_cos_limit(s, r, m_c))
        # composite angular rule on the exact arc [phi_a, pi], doubled
        edges = phi_a[:, None] + (np.pi - phi_a)[:, None] * \
            np.linspace(0.0, 1.0, n_sub + 1)[None, :]
        mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
        hw = 0.5 * (edges[:, 1:] - edges[:, :-1])
        phi = mid[:, :, None] + hw[:, :, None] * ax[None, None, :]
        wang = hw[:, :, None] * aw[None, None, :]
        s_b = np.broadcast_to(s[:, None, None], phi.shape)
        vals = f(s_b, np.cos(phi))
        inner = np.sum(wang * vals, axis=(1, 2))
        return np.array([2.0 * float(np.dot(wts, inner))])

    pre = _presplit(segments, cfg.panels)
    total, err, ok = _adaptive_sum(panel_eval, pre,
                                            cfg.rel_tol, cfg.abs_tol)
    if not ok:
        raise QuadratureError("disk_average did not converge",
                              estimate=float(total[0]),
                              error_bound=float(err[0]))
    return float(total[0])


# ---------------------------------------------------------------------------
# radial prior averages
# ---------------------------------------------------------------------------

def _composite_gl(fvals_at, a: float, b: float, n_panels: int, order: int) -> float:
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return float(np.dot(wts, fvals_at(nodes)))


def prior_trunc_radius(sigma: float, eps: float, tail_sup_hint: float = 0.0) -> float:
    """Radius beyond which the prior tail mass is below ``eps``."""
    base = sigma * math.sqrt(2.0 * math.log(1.0 / eps))
    return base + max(0.0, tail_sup_hint)


def radial_prior_average(gfun: Callable, prior, r_max_hint: float,
                         cfg: QuadConfig) -> float:
    """Prior average ``int_0^inf (2r/sigma^2) exp(-r^2/sigma^2) g(r) dr``.

    Truncated at ``max(r_max_hint, sigma * sqrt(2 ln(1/prior_trunc_eps)))``
    and validated by integrating the doubled range; ``gfun`` should accept
    an ndarray of radii (scalar-only callables are vectorized).
    """
    if not (r_max_hint >= 0.0):
        raise ValueError("r_max_hint must be >= 0")
    sigma2 = prior.sigma * prior.sigma

    def weighted(rr):
        try:
            g = np.asarray(gfun(rr), dtype=float)
        except (TypeError, ValueError):
            g = np.vectorize(gfun, otypes=[float])(rr)
        if g.shape != rr.shape:
            g = np.broadcast_to(g, rr.shape).astype(float)
        return (2.0 * rr / sigma2) * np.exp(-rr * rr / sigma2) * g

    r_max = max(r_max_hint,
                prior.sigma * math.sqrt(2.0 * math.log(1.0 / cfg.prior_trunc_eps)))

    n = max(cfg.panels, 8)
    prev = _composite_gl(weighted, 0.0, r_max, n, cfg.radial_order)
    value = prev
    converged = False
    for _ in range(4):
        n *= 2
        value = _composite_gl(weighted, 0.0, r_max, n, cfg.radial_order)
        if abs(value - prev) <= max(cfg.abs_tol, cfg.rel_tol * abs(value)):
            converged = True
            break
        prev = value
    if not converged:
        raise QuadratureError("radial_prior_average did not converge",
                              estimate=value, error_bound=abs(value - prev))

    tail = _composite_gl(weighted, r_max, 2.0 * r_max, max(cfg.panels, 8),
                         cfg.radial_order)
    total = value + tail
    if abs(tail) > 10.0 * max(cfg.abs_tol, cfg.rel_tol * abs(total)):
        far = _composite_gl(weighted, 2.0 * r_max, 4.0 * r_max,
                            max(cfg.panels, 8), cfg.radial_order)
        total += far
        if abs(far) > 10.0 * max(cfg.abs_tol, cfg.rel_tol * abs(total)):
            raise QuadratureError(
                "radial_prior_average truncation did not stabilize",
                estimate=total, error_bound=abs(far))
    return total
