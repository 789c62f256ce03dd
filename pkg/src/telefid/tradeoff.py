"""Filter-parameter sweeps, trade-off geometry and operating-point selection.

A sweep walks a (g, m_c) grid and records the full diagnostic vector per
point; downstream helpers extract the Pareto frontier under
(maximize F, minimize D, maximize P_succ), pick constrained or
objective-maximizing operating points, and fit the weak-filter slope of
deviation growth against fidelity gain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .ensemble import MeritTriple, SelectivityReport, conditional_moments, \
    robust_objective, selectivity_indices
from .model import AcceptAll, MbNla, PriorSpec, SurrogateParams, \
    deterministic_baseline
from .profile import Protocol
from .quadrature import QuadConfig, QuadratureError

__all__ = [
    "SweepRecord",
    "SlopeEstimate",
    "sweep",
    "sweep_pairs",
    "slope_estimate",
    "pareto_frontier",
    "constrained_best",
    "objective_best",
]


@dataclass(frozen=True)
class SweepRecord:
    """One grid point; ``g``/``m_c`` are None for the accept-all control row."""

    g: Optional[float]
    m_c: Optional[float]
    merit: Optional[MeritTriple]
    report: Optional[SelectivityReport]
    j_lambda: float
    quad_flags: str = "ok"


@dataclass(frozen=True)
class _HardDiskFilter:
    """g -> 1 limit of the bounded amplification filter: a plain cut-off disk.

    Not a public protocol variant; it anchors the weak-filter family at
    zero tilt where the gain type's g > 1 constraint has no member.
    """

    m_c: float

    @property
    def beta(self) -> float:
        return 0.0

    def weight_abs(self, abs_m):
        abs_m = np.asarray(abs_m, dtype=float)
        return np.where(abs_m <= self.m_c, 1.0, 0.0)


@dataclass(frozen=True)
class SlopeEstimate:
    """Weak-filter fit of D against (F - f0) along the tilt family.

    ``slope_c`` and ``intercept`` come from a least-squares line through
    the (F - f0, D) points; ``ratio_smallest`` is the direct quotient at
    the smallest tilt, a second estimator of the same limit.  ``f0`` is
    the computed zero-tilt baseline (hard disk at the same cut-off), which
    removes the exponentially small disk-clipping systematic from the fit.
    """

    theta_values: np.ndarray
    F_values: np.ndarray
    D_values: np.ndarray
    slope_c: float
    intercept: float
    r_squared: float
    ratio_smallest: float
    f0: float
    conclusive: bool
    note: str = ""


def _record_for(filt, params: SurrogateParams, prior: PriorSpec, lam: float,
                cfg: QuadConfig, g: Optional[float], m_c: Optional[float],
                slope_step: float) -> SweepRecord:
    proto = Protocol(params, filt)
    try:
        merit = conditional_moments(proto, prior, cfg)
        report = selectivity_indices(proto, prior, cfg, slope_step=slope_step)
    except QuadratureError as exc:
        return SweepRecord(g, m_c, None, None, math.nan,
                           quad_flags=f"failed: {exc}")
    return SweepRecord(g, m_c, merit, report, robust_objective(merit, lam))


def sweep(g_grid: Sequence[float], m_c_grid: Sequence[float],
          params: SurrogateParams, prior: PriorSpec, lam: float,
          cfg: QuadConfig, include_control: bool = False,
          slope_step: float = 1e-3) -> list[SweepRecord]:
    """One record per (g, m_c) pair, row-major over g then m_c.

    Per-point quadrature failures are recorded in ``quad_flags`` and never
    abort the sweep.  ``include_control`` prepends the accept-all row.
    """
    if len(g_grid) == 0 or len(m_c_grid) == 0:
        raise ValueError("sweep grids must be nonempty")
    pairs = [(g, m_c) for g in g_grid for m_c in m_c_grid]
    records = sweep_pairs(pairs, params, prior, lam, cfg,
                          slope_step=slope_step)
    if include_control:
        records.insert(0, _record_for(AcceptAll(), params, prior, lam, cfg,
                                      None, None, slope_step))
    return records


def sweep_pairs(pairs: Sequence[tuple[float, float]], params: SurrogateParams,
                prior: PriorSpec, lam: float, cfg: QuadConfig,
                slope_step: float = 1e-3) -> list[SweepRecord]:
    """Sweep an explicit list of (g, m_c) settings, in the given order."""
    return [_record_for(MbNla(g, m_c), params, prior, lam, cfg, g, m_c,
                        slope_step)
            for g, m_c in pairs]


def slope_estimate(params: SurrogateParams, prior: PriorSpec, m_c_fixed: float,
                   theta_max: float, n_points: int,
                   cfg: QuadConfig) -> SlopeEstimate:
    """Fit D against (F - f0) for the family theta = 1 - 1/g^2 at fixed m_c.

    The theta grid is geometric, doubling up to ``theta_max``; with the
    default four points and theta_max = 0.04 it is {0.005, 0.01, 0.02,
    0.04}.  Reports the regression slope/intercept/r^2 plus the direct
    ratio at the smallest tilt.
    """
    if n_points < 4:
        raise ValueError("slope fit needs at least 4 points")
    if not (0.0 < theta_max < 1.0):
        raise ValueError("theta_max must be in (0, 1)")
    thetas = theta_max * 2.0 ** -np.arange(n_points - 1, -1, -1, dtype=float)

    base = conditional_moments(Protocol(params, _HardDiskFilter(m_c_fixed)),
                               prior, cfg)
    f0 = base.F

    f_vals = np.empty(n_points)
    d_vals = np.empty(n_points)
    for i, theta in enumerate(thetas):
        g = 1.0 / math.sqrt(1.0 - theta)
        merit = conditional_moments(Protocol(params, MbNla(g, m_c_fixed)),
                                    prior, cfg)
        f_vals[i] = merit.F
        d_vals[i] = merit.D

    x = f_vals - f0
    if np.all(np.abs(x) < 1e-12):
        return SlopeEstimate(thetas, f_vals, d_vals, math.nan, math.nan,
                             math.nan, math.nan, f0, False,
                             note="degenerate: fidelity gain below 1e-12 "
                                  "at every tilt")
    slope, intercept = np.polyfit(x, d_vals, 1)
    resid = d_vals - (slope * x + intercept)
    ss_res = float(np.sum(resid ** 2))
    ss_tot = float(np.sum((d_vals - np.mean(d_vals)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else math.nan
    ratio = d_vals[0] / x[0] if x[0] != 0.0 else math.nan
    return SlopeEstimate(thetas, f_vals, d_vals, float(slope),
                         float(intercept), float(r2), float(ratio), f0, True)


def _dominates(a: MeritTriple, b: MeritTriple) -> bool:
    """Weak Pareto dominance: >= in F and P_succ, <= in D, one strict."""
    if a.F < b.F or a.P_succ < b.P_succ or a.D > b.D:
        return False
    return a.F > b.F or a.P_succ > b.P_succ or a.D < b.D


def _grid_key(rec: SweepRecord):
    g = rec.g if rec.g is not None else -math.inf
    m_c = rec.m_c if rec.m_c is not None else -math.inf
    return (g, m_c)


def pareto_frontier(records: Sequence[SweepRecord]) -> list[SweepRecord]:
    """Undominated subset under (max F, min D, max P_succ), F-descending.

    Records with identical triples are incomparable and all retained;
    failed grid points (no merit) are skipped.
    """
    if len(records) == 0:
        raise ValueError("pareto_frontier needs at least one record")
    ok = [r for r in records if r.merit is not None]
    front = [r for r in ok
             if not any(_dominates(o.merit, r.merit) for o in ok if o is not r)]
    return sorted(front, key=lambda r: (-r.merit.F, r.merit.D,
                                        -r.merit.P_succ, _grid_key(r)))


def _best(records, score):
    feasible = [r for r in records if r.merit is not None]
    if not feasible:
        return None
    return min(feasible, key=lambda r: (-score(r.merit), r.merit.D,
                                        -r.merit.P_succ, _grid_key(r)))


def constrained_best(records: Sequence[SweepRecord], D_max: float,
                     P_min: float) -> Optional[SweepRecord]:
    """Record maximizing F subject to D <= D_max and P_succ >= P_min.

    Absent (None) when nothing is feasible.  Ties break toward smaller D,
    then larger P_succ, then smaller (g, m_c).
    """
    feasible = [r for r in records if r.merit is not None
                and r.merit.D <= D_max and r.merit.P_succ >= P_min]
    return _best(feasible, lambda m: m.F)


def objective_best(records: Sequence[SweepRecord],
                   lam: float) -> SweepRecord:
    """Record maximizing F - lambda * D (same tie-breaking as constrained_best)."""
    if len(records) == 0:
        raise ValueError("objective_best needs at least one record")
    if not (lam > 0.0):
        raise ValueError("lambda must be > 0")
    best = _best(records, lambda m: m.F - lam * m.D)
    if best is None:
        raise QuadratureError("no sweep record carries converged moments")
    return best
