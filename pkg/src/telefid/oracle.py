"""Independent nested Monte Carlo estimators for cross-validating quadrature.

Streams are counter-based (Philox) and keyed by ``(seed, stream id)`` with
one stream per outer sample, so parallel and serial execution would consume
identical numbers and every estimate is bit-reproducible from its config.

Two inner estimators are provided: ``rao_blackwell`` keeps the acceptance
weight as a continuous weight and averages the analytically
eps-marginalized overlap, matching the integral-ratio fidelity formula
term by term; ``full_brute`` draws a Bernoulli accept flag and an explicit
residual-error sample per shot and scores ``exp(-|kappa n + eps|^2)``,
exercising the whole chain end to end at the price of a strictly larger
variance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensemble import MeritTriple, binary_entropy
from .model import PriorSpec
from .profile import Protocol

__all__ = [
    "OracleConfig",
    "MCPoint",
    "MCEnsemble",
    "mc_point",
    "mc_ensemble",
    "mc_success_flag_mi",
    "sample_effective_prior",
]

_ESTIMATORS = ("rao_blackwell", "full_brute")

# stream ids; outer samples use their own index
_POINT_BASE = 1 << 62
_BOOT_TAG = (1 << 63) + 1
_MI_TAG = (1 << 63) + 2
_EFF_TAG = (1 << 63) + 3


@dataclass(frozen=True)
class OracleConfig:
    seed: int = 1
    n_outer: int = 2000
    n_inner: int = 10_000
    estimator: str = "rao_blackwell"
    n_bootstrap: int = 200
    jackknife: bool = False

    def __post_init__(self):
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.n_outer < 100:
            raise ValueError("n_outer must be >= 100")
        if self.n_inner < 1000:
            raise ValueError("n_inner must be >= 1000")
        if self.estimator not in _ESTIMATORS:
            raise ValueError(f"estimator must be one of {_ESTIMATORS}")
        if self.n_bootstrap < 2:
            raise ValueError("n_bootstrap must be >= 2")


@dataclass(frozen=True)
class MCPoint:
    """Point estimates at one input radius, with delta-method standard errors."""

    p_succ_hat: float
    p_err: float
    f_hat: float
    f_err: float
    n_accepted: int
    ok: bool


@dataclass(frozen=True)
class MCEnsemble:
    """Ensemble triple with nonparametric bootstrap standard errors."""

    merit_hat: MeritTriple
    se_F: float
    se_D: float
    se_P: float
    n_zero_acceptance: int
    ok: bool


def _stream(seed: int, tag: int) -> np.random.Generator:
    key = np.array([seed, tag], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _complex_normal(rng: np.random.Generator, var: float, size: int) -> np.ndarray:
    z = rng.standard_normal((size, 2))
    return math.sqrt(var / 2.0) * (z[:, 0] + 1j * z[:, 1])


def _rb_arrays(alpha: complex, proto: Protocol, rng, n_inner: int):
    n = _complex_normal(rng, proto.params.V_n, n_inner)
    w = proto.filter.weight_abs(np.abs(alpha + n))
    q = np.exp(-proto.overlap_decay * np.abs(n) ** 2)
    return w, w * q


def _rb_point(alpha: complex, proto: Protocol, rng, cfg: OracleConfig) -> MCPoint:
    b, a = _rb_arrays(alpha, proto, rng, cfg.n_inner)
    n = cfg.n_inner
    c = 1.0 + proto.params.V_eps
    p_hat = float(np.mean(b))
    p_err = float(np.std(b, ddof=1) / math.sqrt(n))
    if p_hat <= 0.0:
        return MCPoint(0.0, p_err, math.nan, math.nan, 0, False)
    f_hat = float(np.mean(a) / (c * p_hat))
    resid = (a - f_hat * c * b) / (c * p_hat)
    f_err = float(np.std(resid, ddof=1) / math.sqrt(n))
    if cfg.jackknife:
        a_tot, b_tot = float(np.sum(a)), float(np.sum(b))
        loo = (a_tot - a) / (c * (b_tot - b))
        f_hat = n * f_hat - (n - 1) * float(np.mean(loo))
    return MCPoint(p_hat, p_err, f_hat, f_err, int(np.count_nonzero(b)), True)


def _fb_point(alpha: complex, proto: Protocol, rng, cfg: OracleConfig) -> MCPoint:
    params = proto.params
    n = _complex_normal(rng, params.V_n, cfg.n_inner)
    w = proto.filter.weight_abs(np.abs(alpha + n))
    u = rng.random(cfg.n_inner)
    eps = _complex_normal(rng, params.V_eps, cfg.n_inner)
    acc = u < w
    k = int(np.count_nonzero(acc))
    p_hat = k / cfg.n_inner
    p_err = float(np.std(acc.astype(float), ddof=1) / math.sqrt(cfg.n_inner))
    if k == 0:
        return MCPoint(p_hat, p_err, math.nan, math.nan, 0, False)
    fid = np.exp(-np.abs(params.kappa * n[acc] + eps[acc]) ** 2)
    f_hat = float(np.mean(fid))
    if k == 1:
        # p_hat * f_hat is still an unbiased weighted term, but no spread
        # estimate exists, so the point is flagged inconclusive
        return MCPoint(p_hat, p_err, f_hat, math.inf, 1, False)
    f_err = float(np.std(fid, ddof=1) / math.sqrt(k))
    return MCPoint(p_hat, p_err, f_hat, f_err, k, True)


def mc_point(r: float, proto: Protocol, cfg: OracleConfig,
             stream: int = 0) -> MCPoint:
    """Monte Carlo estimate of (P_succ, f_succ) at input radius ``r``.

    ``stream`` selects an independent substream; identical arguments give
    bit-identical results.
    """
    if not (r >= 0.0 and math.isfinite(r)):
        raise ValueError("input radius must be finite and >= 0")
    rng = _stream(cfg.seed, _POINT_BASE + stream)
    point = _rb_point if cfg.estimator == "rao_blackwell" else _fb_point
    return point(complex(r, 0.0), proto, rng, cfg)


def _outer_estimates(proto: Protocol, prior: PriorSpec, cfg: OracleConfig):
    """Per-outer-sample (P_hat_i, f_hat_i, ok_i) with alpha_i ~ prior."""
    point = _rb_point if cfg.estimator == "rao_blackwell" else _fb_point
    p = np.empty(cfg.n_outer)
    f = np.empty(cfg.n_outer)
    ok = np.empty(cfg.n_outer, dtype=bool)
    for i in range(cfg.n_outer):
        rng = _stream(cfg.seed, i)
        alpha = complex(*(math.sqrt(prior.sigma ** 2 / 2.0)
                          * rng.standard_normal(2)))
        est = point(alpha, proto, rng, cfg)
        p[i] = est.p_succ_hat
        # any accepted shot contributes an unbiased p * f term, even when
        # the per-point spread is not estimable
        good = math.isfinite(est.f_hat)
        f[i] = est.f_hat if good else 0.0
        ok[i] = good
    return p, f, ok


def _triple(p: np.ndarray, f: np.ndarray):
    tot = float(np.sum(p))
    if tot <= 0.0:
        return math.nan, math.nan, 0.0
    f1 = float(np.dot(p, f)) / tot
    m2 = float(np.dot(p, f * f)) / tot
    return f1, math.sqrt(max(m2 - f1 * f1, 0.0)), float(np.mean(p))


def mc_ensemble(proto: Protocol, prior: PriorSpec,
                cfg: OracleConfig) -> MCEnsemble:
    """Nested Monte Carlo estimate of the conditional ensemble triple.

    Standard errors come from a nonparametric bootstrap over the outer
    index (resamples drawn from their own fixed stream, so the whole result
    is reproducible).
    """
    p, f, ok = _outer_estimates(proto, prior, cfg)
    f_hat, d_hat, p_hat = _triple(p, f)
    n_zero = int(np.count_nonzero(~ok))
    if not math.isfinite(f_hat):
        return MCEnsemble(MeritTriple(math.nan, 0.0, math.nan),
                          math.nan, math.nan, math.nan, n_zero, False)

    rng = _stream(cfg.seed, _BOOT_TAG)
    boots = np.empty((cfg.n_bootstrap, 3))
    for b in range(cfg.n_bootstrap):
        idx = rng.integers(0, cfg.n_outer, size=cfg.n_outer)
        boots[b] = _triple(p[idx], f[idx])
    good = np.isfinite(boots).all(axis=1)
    if np.count_nonzero(good) < 2:
        return MCEnsemble(MeritTriple(f_hat, d_hat, p_hat),
                          math.nan, math.nan, math.nan, n_zero, False)
    se = np.std(boots[good], axis=0, ddof=1)
    merit = MeritTriple(f_hat, d_hat, p_hat)
    return MCEnsemble(merit, float(se[0]), float(se[1]), float(se[2]),
                      n_zero, True)


def mc_success_flag_mi(proto: Protocol, prior: PriorSpec, cfg: OracleConfig,
                       n_bins: int = 20) -> float:
    """Histogram estimate (nats) of the input/success-flag mutual information.

    One Bernoulli success flag is drawn per input sample and |alpha| is
    binned into equal-width bins (empty bins merged into their left
    neighbor); the plug-in entropy difference carries a binning bias, so
    this is a cross-check, not a precision estimate.
    """
    if n_bins < 10:
        raise ValueError("n_bins must be >= 10")
    rng = _stream(cfg.seed, _MI_TAG)
    alpha = _complex_normal(rng, prior.sigma ** 2, cfg.n_outer)
    noise = _complex_normal(rng, proto.params.V_n, cfg.n_outer)
    w = proto.filter.weight_abs(np.abs(alpha + noise))
    flags = rng.random(cfg.n_outer) < w
    radii = np.abs(alpha)

    edges = np.linspace(0.0, float(np.max(radii)) * (1 + 1e-12), n_bins + 1)
    which = np.clip(np.digitize(radii, edges) - 1, 0, n_bins - 1)
    counts = np.bincount(which, minlength=n_bins).astype(float)
    succ = np.bincount(which, weights=flags.astype(float), minlength=n_bins)

    # an empty bin carries no samples, so merging it with a neighbor is
    # the same as dropping it
    mask = counts > 0
    counts = counts[mask]
    succ = succ[mask]

    n = float(np.sum(counts))
    p_bar = float(np.sum(succ) / n)
    h_cond = float(np.sum(counts / n *
                          [binary_entropy(s / c) for s, c in zip(succ, counts)]))
    return max(0.0, binary_entropy(p_bar) - h_cond)


def sample_effective_prior(proto: Protocol, prior: PriorSpec,
                           cfg: OracleConfig, n_samples: int) -> np.ndarray:
    """Draw inputs from the success-reweighted prior by pairwise rejection.

    Proposes (alpha, n) from the model and keeps alpha with probability
    equal to the acceptance weight of the resulting record, whose marginal
    over n is exactly the effective prior.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    rng = _stream(cfg.seed, _EFF_TAG)
    out = []
    collected = 0
    budget = 200_000_000
    drawn = 0
    batch = max(10_000, 2 * n_samples)
    while collected < n_samples:
        if drawn >= budget:
            raise RuntimeError("effective-prior sampler exceeded its draw budget; "
                               "success probability appears to be ~0")
        alpha = _complex_normal(rng, prior.sigma ** 2, batch)
        noise = _complex_normal(rng, proto.params.V_n, batch)
        u = rng.random(batch)
        acc = u < proto.filter.weight_abs(np.abs(alpha + noise))
        drawn += batch
        kept = alpha[acc]
        out.append(kept)
        collected += kept.size
    return np.concatenate(out)[:n_samples]
