"""Single-shot conditional quantities as functions of the input amplitude.

For an input of radius ``r`` the success probability is the filtered-noise
integral over the acceptance set, and the conditional fidelity is the
ratio of the overlap-weighted integral to ``(1 + V_eps)`` times it.  The
accept-all control bypasses quadrature entirely: it is the exact
deterministic baseline, flat in the amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .model import AcceptAll, FilterSpec, MbNla, SurrogateParams, \
    deterministic_baseline
from .quadrature import QuadConfig, QuadratureError, disk_pair_log, \
    gauss_legendre, _arc_cos_limit, _disk_segments, _seg_map, _presplit, \
    _adaptive_sum, _EXP_STEP, _EXP_CUT

__all__ = [
    "Protocol",
    "FidelityProfile",
    "SuccessProbability",
    "success_probability",
    "conditional_fidelity",
    "tail_bound",
    "profile_point",
    "profile_table",
    "phase_invariance_probe",
    "default_radii",
]


@dataclass(frozen=True)
class Protocol:
    """A noise model paired with an acceptance rule."""

    params: SurrogateParams
    filter: FilterSpec

    @property
    def overlap_decay(self) -> float:
        """Coefficient kappa^2 / (1 + V_eps) multiplying |n|^2 in the overlap."""
        return self.params.kappa ** 2 / (1.0 + self.params.V_eps)


class SuccessProbability(NamedTuple):
    value: float
    log_value: float


@dataclass(frozen=True)
class FidelityProfile:
    """Tabulated conditional fidelity and success probability on a radius grid."""

    radii: np.ndarray
    f_succ: np.ndarray
    p_succ: np.ndarray
    log_p_succ: np.ndarray

    def __post_init__(self):
        n = len(self.radii)
        if not (len(self.f_succ) == len(self.p_succ) == len(self.log_p_succ) == n):
            raise ValueError("profile sequences must share one length")
        if n == 0:
            raise ValueError("profile must not be empty")
        if np.any(np.diff(self.radii) <= 0.0):
            raise ValueError("radii must be strictly ascending")


def _pair(r: float, proto: Protocol, cfg: QuadConfig):
    """Shared-node (log_den, log_num) for a cut-off filter; raises on failure.

    Any filter exposing ``m_c`` and ``beta`` works here (the weak-filter
    baseline uses a hard disk with ``beta = 0``).
    """
    filt = proto.filter
    pair = disk_pair_log(r, filt.m_c, filt.beta, proto.overlap_decay,
                         proto.params.V_n, cfg)
    if not pair.converged:
        raise QuadratureError(
            f"acceptance-set quadrature did not converge at r={r}",
            estimate=(pair.log_den, pair.log_num),
            error_bound=pair.error_bound)
    return pair


def success_probability(r: float, proto: Protocol,
                        cfg: QuadConfig) -> SuccessProbability:
    """P_succ at input radius ``r``; the log is finite even when the value underflows."""
    if not (r >= 0.0 and math.isfinite(r)):
        raise ValueError("input radius must be finite and >= 0")
    if isinstance(proto.filter, AcceptAll):
        return SuccessProbability(1.0, 0.0)
    pair = _pair(r, proto, cfg)
    return SuccessProbability(math.exp(pair.log_den), pair.log_den)


def conditional_fidelity(r: float, proto: Protocol, cfg: QuadConfig) -> float:
    """Conditional single-shot fidelity at input radius ``r``.

    Accept-all returns the flat deterministic baseline exactly; the
    filtered case forms the integral ratio in the log domain, so it stays
    well defined far outside the cut-off where both integrals underflow.
    """
    if not (r >= 0.0 and math.isfinite(r)):
        raise ValueError("input radius must be finite and >= 0")
    if isinstance(proto.filter, AcceptAll):
        return deterministic_baseline(proto.params)
    pair = _pair(r, proto, cfg)
    return math.exp(pair.log_num - pair.log_den) / (1.0 + proto.params.V_eps)


def tail_bound(r: float, proto: Protocol) -> float:
    """Upper bound on the conditional fidelity beyond the cut-off.

    Valid for ``r >= m_c`` only; the accept-all control has no cut-off and
    is rejected.
    """
    filt = proto.filter
    if not isinstance(filt, MbNla):
        raise ValueError("tail bound is defined only for a cut-off filter")
    if r < filt.m_c:
        raise ValueError(f"tail bound needs r >= m_c, got r={r} < {filt.m_c}")
    c = 1.0 + proto.params.V_eps
    k2 = proto.params.kappa ** 2
    return math.exp(-k2 * (r - filt.m_c) ** 2 / c) / c


def profile_point(r: float, proto: Protocol, cfg: QuadConfig):
    """(f_succ, p_succ, log_p_succ) at one radius from a single shared-node
    evaluation."""
    if isinstance(proto.filter, AcceptAll):
        return deterministic_baseline(proto.params), 1.0, 0.0
    pair = _pair(float(r), proto, cfg)
    f = math.exp(pair.log_num - pair.log_den) / (1.0 + proto.params.V_eps)
    return f, math.exp(pair.log_den), pair.log_den


def profile_table(radii: Sequence[float], proto: Protocol,
                  cfg: QuadConfig) -> FidelityProfile:
    """Evaluate success probability and conditional fidelity on a radius grid."""
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("radius grid must not be empty")
    if not np.all(np.isfinite(radii)):
        raise ValueError("radius grid must be finite")
    if np.any(np.diff(radii) <= 0.0) or radii[0] < 0.0:
        raise ValueError("radius grid must be >= 0 and strictly ascending")

    if isinstance(proto.filter, AcceptAll):
        f0 = deterministic_baseline(proto.params)
        ones = np.ones_like(radii)
        return FidelityProfile(radii, f0 * ones, ones, np.zeros_like(radii))

    f = np.empty_like(radii)
    p = np.empty_like(radii)
    logp = np.empty_like(radii)
    for i, r in enumerate(radii):
        f[i], p[i], logp[i] = profile_point(float(r), proto, cfg)
    return FidelityProfile(radii, f, p, logp)


def default_radii(filt: FilterSpec, n_points: int = 121) -> np.ndarray:
    """Default profile grid: uniform on [0, m_c + 3] (accept-all: [0, 6])."""
    top = (filt.m_c if isinstance(filt, MbNla) else 3.0) + 3.0
    return np.linspace(0.0, top, n_points)


# ---------------------------------------------------------------------------
# independent two-dimensional evaluation at a complex amplitude
# ---------------------------------------------------------------------------

def _graded_psi_edges(phi0: float, c: float, t: float) -> np.ndarray:
    """Panel edges on the relative-angle window [phi0, pi], graded so the
    filter exponent falls by at most a few e-folds per panel (peak at phi0,
    where the record sits on the cut-off circle)."""
    drop_full = c * (t + 1.0)
    if c <= 0.0 or drop_full <= _EXP_STEP:
        return np.array([phi0, math.pi])
    drop = min(drop_full, _EXP_CUT)
    n_pan = int(math.ceil(drop / _EXP_STEP))
    levels = t - (drop / n_pan) * np.arange(n_pan + 1)
    psi = np.arccos(np.clip(levels, -1.0, 1.0))
    psi[0] = phi0
    if drop == drop_full:
        psi[-1] = math.pi  # tail beyond _EXP_CUT e-folds is dropped otherwise
    return psi


def _gl_on_edges(edges: np.ndarray, ax, aw):
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    phi = (mid[:, None] + half[:, None] * ax[None, :]).ravel()
    wts = (half[:, None] * aw[None, :]).ravel()
    return phi, wts


def phase_invariance_probe(alpha: complex, proto: Protocol,
                           cfg: QuadConfig) -> float:
    """Conditional fidelity at a complex amplitude by direct 2-D integration.

    No radial shortcut: record-noise points are generated in absolute polar
    coordinates and the filter is evaluated on the complex sum
    ``alpha + s e^{i phi}``, so a phase dependence of the implementation
    would show up here.  Used in tests to confirm f(alpha) = f(|alpha|).
    """
    params = proto.params
    filt = proto.filter
    r = abs(alpha)
    phi_alpha = math.atan2(alpha.imag, alpha.real) if r > 0 else 0.0
    gamma = proto.overlap_decay
    V_n = params.V_n
    ax, aw = gauss_legendre(cfg.angular_order)

    if isinstance(filt, AcceptAll):
        s_cut = math.sqrt(V_n * math.log(1e20))
        segments = [("lin", 0.0, s_cut)]
        beta = None
        m_c = None
    else:
        segments = _disk_segments(r, filt.m_c)
        beta = filt.beta
        m_c = filt.m_c

    def panel_eval(seg, a, b):
        x, w = gauss_legendre(cfg.radial_order)
        half = 0.5 * (b - a)
        u = 0.5 * (a + b) + half * x
        s, jac = _seg_map(seg, u)
        wts = w * half * jac
        num = 0.0
        den = 0.0
        for si, wi in zip(s, wts):
            if si <= 0.0:
                continue
            if m_c is None:
                edges = np.linspace(0.0, 2.0 * math.pi, max(2, cfg.panels) + 1)
                mid = 0.5 * (edges[1:] + edges[:-1])
                hw = 0.5 * (edges[1:] - edges[:-1])
                phi = (mid[:, None] + hw[:, None] * ax[None, :]).ravel()
                wphi = (hw[:, None] * aw[None, :]).ravel()
                weight = np.ones_like(phi)
            else:
                t = float(_arc_cos_limit(np.array([si]), r, m_c)[0])
                phi0 = math.acos(t)
                if phi0 >= math.pi:
                    continue
                c = 2.0 * beta * r * si
                psi = _graded_psi_edges(phi0, c, t)
                # both halves of the arc carry their own nodes: the probe
                # must not presuppose the mirror symmetry it is checking
                p1, w1 = _gl_on_edges(phi_alpha + psi, ax, aw)
                p2, w2 = _gl_on_edges(phi_alpha + 2.0 * math.pi - psi[::-1],
                                      ax, aw)
                phi = np.concatenate([p1, p2])
                wphi = np.concatenate([w1, w2])
                m_abs2 = np.abs(alpha + si * np.exp(1j * phi)) ** 2
                weight = np.exp(beta * np.minimum(m_abs2 - m_c * m_c, 0.0))
            p_n = math.exp(-si * si / V_n) / (math.pi * V_n)
            base = wi * si * p_n
            ang = float(np.dot(wphi, weight))
            den += base * ang
            num += base * math.exp(-gamma * si * si) * ang
        return np.array([den, num])

    pre = _presplit(segments, cfg.panels)
    total, err, ok = _adaptive_sum(panel_eval, pre, cfg.rel_tol, cfg.abs_tol)
    if not ok or total[0] <= 0.0:
        raise QuadratureError("phase probe did not converge",
                              estimate=list(total), error_bound=float(np.max(err)))
    return float(total[1] / total[0]) / (1.0 + params.V_eps)
