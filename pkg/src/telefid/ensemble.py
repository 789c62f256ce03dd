"""Ensemble figures of merit over the Gaussian input prior.

The conditional triple (F, D, P_succ) reweights the prior by the
input-dependent success probability; all three moments are assembled from
one shared radial node table, evaluated in the log domain so that deeply
suppressed amplitudes contribute exactly rather than as 0/0.  The same
table feeds the selectivity indices and the information functionals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .model import AcceptAll, PriorSpec, deterministic_baseline
from .profile import Protocol
from .quadrature import QuadConfig, QuadratureError, disk_pair_log, \
    gauss_legendre, log_sum_guard

__all__ = [
    "MeritTriple",
    "SelectivityReport",
    "RobustObjective",
    "conditional_moments",
    "effective_prior_density",
    "selectivity_indices",
    "binary_entropy",
    "heralding_mutual_information",
    "selectivity_divergence",
    "robust_objective",
    "cantelli_guarantee",
    "throughput_bound",
]

_NEG_TOL = 1e-12  # round-off window clamped to zero; worse is a bug


@dataclass(frozen=True)
class MeritTriple:
    """Conditional average fidelity, fidelity deviation and success probability."""

    F: float
    D: float
    P_succ: float

    def __post_init__(self):
        if not (0.0 < self.F <= 1.0):
            raise ValueError(f"F must be in (0, 1], got {self.F}")
        if not (self.D >= 0.0):
            raise ValueError(f"D must be >= 0, got {self.D}")
        if not (0.0 < self.P_succ <= 1.0):
            raise ValueError(f"P_succ must be in (0, 1], got {self.P_succ}")


@dataclass(frozen=True)
class SelectivityReport:
    """Dispersion and information diagnostics of a protocol's input response.

    S equals the fidelity deviation; S1 is the effective-prior average
    radial slope magnitude of the fidelity profile; S2 the effective-prior
    variance of its logarithm; I_sel the relative entropy of the effective
    prior against the prior; I_alpha_S the mutual information between the
    input label and the success flag.  All entropic values are in nats.
    """

    S: float
    S1: float
    S2: float
    I_sel: float
    I_alpha_S: float


@dataclass(frozen=True)
class RobustObjective:
    """Confidence weight lambda with its Cantelli level and a fidelity slack."""

    lam: float
    delta: float

    def __post_init__(self):
        if not (self.lam > 0.0):
            raise ValueError("lambda must be > 0")
        if not (self.delta > 0.0):
            raise ValueError("delta must be > 0")

    @property
    def eta(self) -> float:
        return self.lam * self.lam / (1.0 + self.lam * self.lam)


# ---------------------------------------------------------------------------
# shared radial node table
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Table:
    r: np.ndarray         # radial nodes
    lwp: np.ndarray       # log of prior weight * quadrature weight
    log_den: np.ndarray   # log P_succ(r) at the nodes
    log_num: np.ndarray   # log of the overlap-weighted integral
    a0: float             # log of the ensemble success probability
    a1: float             # log int prior * num
    a2: float             # log int prior * num^2 / den
    converged: bool


def _stage_nodes(r_max: float, n_panels: int, order: int):
    x, w = gauss_legendre(order)
    edges = np.linspace(0.0, r_max, n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return nodes, wts


def _accumulate(r, wts, proto: Protocol, prior: PriorSpec, cfg: QuadConfig):
    filt = proto.filter
    gamma = proto.overlap_decay
    sigma2 = prior.sigma * prior.sigma
    log_den = np.empty_like(r)
    log_num = np.empty_like(r)
    ok = True
    for i, ri in enumerate(r):
        pair = disk_pair_log(float(ri), filt.m_c, filt.beta, gamma,
                             proto.params.V_n, cfg)
        ok = ok and pair.converged
        log_den[i] = pair.log_den
        log_num[i] = pair.log_num
    lwp = np.log(wts * 2.0 * r / sigma2) - r * r / sigma2
    a0 = log_sum_guard(lwp + log_den)
    a1 = log_sum_guard(lwp + log_num)
    a2 = log_sum_guard(lwp + 2.0 * log_num - log_den)
    return lwp, log_den, log_num, a0, a1, a2, ok


@lru_cache(maxsize=32)
def _build_table(proto: Protocol, prior: PriorSpec, cfg: QuadConfig) -> _Table:
    filt = proto.filter  # anything with m_c and beta (MbNla or a hard disk)
    r_max = (filt.m_c + 6.0 * math.sqrt(proto.params.V_n)
             + prior.sigma * math.sqrt(2.0 * math.log(1.0 / cfg.prior_trunc_eps)))

    n_panels = 12
    r, wts = _stage_nodes(r_max, n_panels, cfg.radial_order)
    prev = _accumulate(r, wts, proto, prior, cfg)
    converged = False
    for _ in range(3):
        n_panels *= 2
        r, wts = _stage_nodes(r_max, n_panels, cfg.radial_order)
        cur = _accumulate(r, wts, proto, prior, cfg)
        delta = max(abs(cur[3] - prev[3]), abs(cur[4] - prev[4]),
                    abs(cur[5] - prev[5]))
        if delta <= max(cfg.rel_tol, 1e-12):
            converged = True
            break
        prev = cur
    lwp, log_den, log_num, a0, a1, a2, pairs_ok = cur
    return _Table(r, lwp, log_den, log_num, a0, a1, a2,
                  bool(converged and pairs_ok))


def _require_converged(table: _Table):
    if not table.converged:
        raise QuadratureError("ensemble radial quadrature did not converge",
                              estimate=(table.a0, table.a1, table.a2))


def _moments_from_table(table: _Table, v_eps: float):
    c = 1.0 + v_eps
    p = math.exp(table.a0)
    f = math.exp(table.a1 - table.a0) / c
    m2 = math.exp(table.a2 - table.a0) / (c * c)
    var = m2 - f * f
    if var < -_NEG_TOL:
        raise QuadratureError(f"negative fidelity variance {var}")
    return f, math.sqrt(max(var, 0.0)), p, m2


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def conditional_moments(proto: Protocol, prior: PriorSpec,
                        cfg: QuadConfig) -> MeritTriple:
    """Success-reweighted ensemble triple (F, D, P_succ).

    The accept-all control is exact: (flat baseline, 0, 1).  Filtered
    protocols integrate the per-radius success probability and fidelity
    against the prior on one shared radial grid.
    """
    if isinstance(proto.filter, AcceptAll):
        return MeritTriple(deterministic_baseline(proto.params), 0.0, 1.0)
    table = _build_table(proto, prior, cfg)
    _require_converged(table)
    f, d, p, _ = _moments_from_table(table, proto.params.V_eps)
    return MeritTriple(f, d, p)


def effective_prior_density(r: float, proto: Protocol, prior: PriorSpec,
                            cfg: QuadConfig) -> float:
    """Input density of successful events (against the complex-plane measure)."""
    if isinstance(proto.filter, AcceptAll):
        return float(prior.density(r))
    table = _build_table(proto, prior, cfg)
    _require_converged(table)
    pair = disk_pair_log(float(r), proto.filter.m_c, proto.filter.beta,
                         proto.overlap_decay, proto.params.V_n, cfg)
    return float(prior.density(r)) * math.exp(pair.log_den - table.a0)


def _eff_weights(table: _Table):
    w = np.exp(table.lwp + table.log_den - table.a0)
    return w / np.sum(w)


def selectivity_indices(proto: Protocol, prior: PriorSpec, cfg: QuadConfig,
                        slope_step: float = 1e-3) -> SelectivityReport:
    """Dispersion (S = D), mean radial slope (S1), log-fidelity variance (S2)
    and the two information functionals, all from one shared node table."""
    if not (slope_step > 0.0):
        raise ValueError("slope_step must be > 0")
    if isinstance(proto.filter, AcceptAll):
        return SelectivityReport(0.0, 0.0, 0.0, 0.0, 0.0)

    table = _build_table(proto, prior, cfg)
    _require_converged(table)
    params = proto.params
    _, d, _, _ = _moments_from_table(table, params.V_eps)
    omega = _eff_weights(table)
    log_c = math.log(1.0 + params.V_eps)

    log_f = table.log_num - table.log_den - log_c
    mean_lf = float(np.dot(omega, log_f))
    s2 = float(np.dot(omega, (log_f - mean_lf) ** 2))

    filt = proto.filter
    gamma = proto.overlap_decay

    def f_at(rr: float) -> float:
        pair = disk_pair_log(rr, filt.m_c, filt.beta, gamma, params.V_n, cfg)
        return math.exp(pair.log_num - pair.log_den - log_c)

    f_nodes = np.exp(log_f)
    h = slope_step
    slopes = np.empty_like(f_nodes)
    for i, ri in enumerate(table.r):
        ri = float(ri)
        if ri >= h:
            slopes[i] = (f_at(ri + h) - f_at(ri - h)) / (2.0 * h)
        else:
            slopes[i] = (f_at(ri + h) - f_nodes[i]) / h
    s1 = float(np.dot(omega, np.abs(slopes)))

    i_sel = float(np.dot(omega, table.log_den)) - table.a0
    i_sel = _clamp_nonneg(i_sel, "selectivity divergence")
    i_mi = _mutual_information_from_table(table)
    return SelectivityReport(d, s1, s2, i_sel, i_mi)


def binary_entropy(x: float) -> float:
    """Binary entropy in nats with the continuous limits h2(0) = h2(1) = 0."""
    if not (0.0 <= x <= 1.0):
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log(1.0 - x)


def _h2_arr(x: np.ndarray) -> np.ndarray:
    x = np.clip(x, 0.0, 1.0)
    out = np.zeros_like(x)
    inner = (x > 0.0) & (x < 1.0)
    xi = x[inner]
    out[inner] = -xi * np.log(xi) - (1.0 - xi) * np.log1p(-xi)
    return out


def _clamp_nonneg(value: float, what: str) -> float:
    if value < -_NEG_TOL:
        raise QuadratureError(f"{what} is negative beyond round-off: {value}")
    return max(value, 0.0)


def _mutual_information_from_table(table: _Table) -> float:
    p_bar = math.exp(table.a0)
    v = np.exp(table.lwp)
    v = v / np.sum(v)
    avg_h2 = float(np.dot(v, _h2_arr(np.exp(table.log_den))))
    return _clamp_nonneg(binary_entropy(p_bar) - avg_h2,
                         "heralding mutual information")


def heralding_mutual_information(proto: Protocol, prior: PriorSpec,
                                 cfg: QuadConfig) -> float:
    """Mutual information (nats) between the input label and the success flag."""
    if isinstance(proto.filter, AcceptAll):
        return 0.0
    table = _build_table(proto, prior, cfg)
    _require_converged(table)
    return _mutual_information_from_table(table)


def selectivity_divergence(proto: Protocol, prior: PriorSpec,
                           cfg: QuadConfig) -> float:
    """Relative entropy (nats) of the effective prior against the prior."""
    if isinstance(proto.filter, AcceptAll):
        return 0.0
    table = _build_table(proto, prior, cfg)
    _require_converged(table)
    omega = _eff_weights(table)
    val = float(np.dot(omega, table.log_den)) - table.a0
    return _clamp_nonneg(val, "selectivity divergence")


def robust_objective(merit: MeritTriple, lam: float) -> float:
    """Lower-confidence fidelity objective F - lambda * D."""
    if not (lam > 0.0):
        raise ValueError("lambda must be > 0")
    return merit.F - lam * merit.D


def cantelli_guarantee(lam: float) -> float:
    """Fraction lambda^2 / (1 + lambda^2) of successful runs guaranteed above F - lambda D."""
    if not (lam > 0.0):
        raise ValueError("lambda must be > 0")
    return lam * lam / (1.0 + lam * lam)


def throughput_bound(merit: MeritTriple, delta: float) -> float:
    """Per-trial lower bound on producing an output within delta of the mean fidelity."""
    if not (delta > 0.0):
        raise ValueError("delta must be > 0")
    return max(0.0, merit.P_succ * (1.0 - merit.D ** 2 / delta ** 2))
