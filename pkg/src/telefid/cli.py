"""Command-line front end: profiles, moments, sweeps, frontiers, checks,
oracle runs and SVG plots.

Configuration is a flat key-value text file (``key = value`` per line,
``#`` comments) with dotted key paths; command-line flags win over the
file.  All CSV output uses 12 significant digits, period decimals and LF
line endings, so emitted files are byte-reproducible and parse back
losslessly.

Exit codes: 0 success, 1 computation failure, 2 usage/config error,
3 check-suite failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import ensemble as ens
from . import svgplot
from .model import AcceptAll, MbNla, PriorSpec, SurrogateParams, \
    deterministic_baseline
from .oracle import OracleConfig, mc_ensemble, mc_point, sample_effective_prior
from .profile import Protocol, conditional_fidelity, default_radii, \
    phase_invariance_probe, profile_point, profile_table, tail_bound
from .quadrature import QuadConfig, QuadratureError
from .tradeoff import constrained_best, objective_best, pareto_frontier, \
    slope_estimate, sweep

__all__ = ["main", "run_checks", "ConfigError", "RunConfig"]

PROFILE_HEADER = ["r", "f_succ", "p_succ", "log_p_succ", "tail_bound", "flag"]
SWEEP_HEADER = ["g", "m_c", "F", "D", "P_succ", "S1", "S2", "I_sel",
                "I_alpha_S", "J_lambda", "flag"]


class ConfigError(ValueError):
    pass


def _parse_bool(s: str) -> bool:
    if s.lower() in ("true", "1", "yes"):
        return True
    if s.lower() in ("false", "0", "no"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_floats(s: str):
    return tuple(float(tok) for tok in s.split(",") if tok.strip())


# key -> (parser, validator, default)
_SCHEMA = {
    "params.V_n": (float, lambda v: v >= 0, 0.5),
    "params.V_eps": (float, lambda v: v >= 0, 0.1),
    "params.kappa": (float, math.isfinite, 0.6),
    "prior.sigma": (float, lambda v: v > 0, 2.0),
    "filter.variant": (str, lambda v: v in ("accept_all", "mbnla"), "mbnla"),
    "filter.g": (float, lambda v: v > 1, 1.2),
    "filter.m_c": (float, lambda v: v > 0, 3.0),
    "grid.g": (_parse_floats, lambda v: len(v) > 0, (1.2, 1.4, 1.6)),
    "grid.m_c": (_parse_floats, lambda v: len(v) > 0, (1.8, 2.2, 2.6, 3.0)),
    "grid.include_control": (_parse_bool, lambda v: True, True),
    "quad.radial_order": (int, lambda v: v >= 8, 24),
    "quad.angular_order": (int, lambda v: v >= 8, 16),
    "quad.panels": (int, lambda v: v >= 1, 4),
    "quad.rel_tol": (float, lambda v: v > 0, 1e-9),
    "quad.abs_tol": (float, lambda v: v > 0, 1e-14),
    "quad.prior_trunc_eps": (float, lambda v: v > 0, 1e-12),
    "oracle.seed": (int, lambda v: 0 <= v < 2 ** 64, 1),
    "oracle.n_outer": (int, lambda v: v >= 100, 2000),
    "oracle.n_inner": (int, lambda v: v >= 1000, 10_000),
    "oracle.estimator": (str, lambda v: v in ("rao_blackwell", "full_brute"),
                         "rao_blackwell"),
    "oracle.n_bootstrap": (int, lambda v: v >= 2, 200),
    "oracle.jackknife": (_parse_bool, lambda v: True, False),
    "lambda": (float, lambda v: v > 0, 3.0),
    "objective.delta": (float, lambda v: v > 0, 0.1),
    "profile.n_points": (int, lambda v: v >= 0, 121),
    "profile.r_max": (float, lambda v: v > 0, None),
    "slope.m_c": (float, lambda v: v > 0, None),
    "slope.theta_max": (float, lambda v: 0 < v < 1, 0.04),
    "slope.n_points": (int, lambda v: v >= 4, 4),
    "check.n_samples": (int, lambda v: v >= 1000, 10_000),
}


@dataclass
class RunConfig:
    """Validated flat configuration; see _SCHEMA for keys and defaults."""

    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @property
    def params(self) -> SurrogateParams:
        return SurrogateParams(self["params.V_n"], self["params.V_eps"],
                               self["params.kappa"])

    @property
    def prior(self) -> PriorSpec:
        return PriorSpec(self["prior.sigma"])

    @property
    def filter(self):
        if self["filter.variant"] == "accept_all":
            return AcceptAll()
        return MbNla(self["filter.g"], self["filter.m_c"])

    @property
    def protocol(self) -> Protocol:
        return Protocol(self.params, self.filter)

    @property
    def quad(self) -> QuadConfig:
        return QuadConfig(self["quad.radial_order"], self["quad.angular_order"],
                          self["quad.panels"], self["quad.rel_tol"],
                          self["quad.abs_tol"], self["quad.prior_trunc_eps"])

    @property
    def oracle(self) -> OracleConfig:
        return OracleConfig(self["oracle.seed"], self["oracle.n_outer"],
                            self["oracle.n_inner"], self["oracle.estimator"],
                            self["oracle.n_bootstrap"],
                            self["oracle.jackknife"])


def _set_key(values: dict, key: str, raw: str, where: str):
    if key not in _SCHEMA:
        raise ConfigError(f"{where}: unknown key {key!r}")
    parser, valid, _ = _SCHEMA[key]
    try:
        val = parser(raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: {key}: {exc}") from exc
    if not valid(val):
        raise ConfigError(f"{where}: {key}: value {raw!r} out of range")
    values[key] = val


def load_config(path: Optional[str], overrides: Sequence[str] = (),
                seed: Optional[int] = None,
                lam: Optional[float] = None) -> RunConfig:
    """Defaults, then the config file, then --set overrides, then flags."""
    values = {k: d for k, (_, _, d) in _SCHEMA.items()}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for ln, line in enumerate(lines, 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{ln}: expected 'key = value'")
            key, raw = (tok.strip() for tok in stripped.split("=", 1))
            _set_key(values, key, raw, f"{path}:{ln}")
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, raw = (tok.strip() for tok in item.split("=", 1))
        _set_key(values, key, raw, "--set")
    if seed is not None:
        _set_key(values, "oracle.seed", str(seed), "--seed")
    if lam is not None:
        _set_key(values, "lambda", str(lam), "--lambda")
    return RunConfig(values)


# ---------------------------------------------------------------------------
# deterministic number formatting (12 significant digits)
# ---------------------------------------------------------------------------

def fmt12(x) -> str:
    """12 significant digits, trailing zeros kept; positional inside
    [1e-4, 1e16), scientific outside.  Idempotent under parse/emit."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0.0:
        return "0.000000000000"
    mant, exp = f"{x:.11e}".split("e")
    e = int(exp)
    if not (-4 <= e < 16):
        return f"{mant}e{'+' if e >= 0 else '-'}{abs(e):02d}"
    sign = "-" if mant.startswith("-") else ""
    digits = mant.lstrip("-").replace(".", "")  # 12 significant digits
    if e >= 0:
        if e + 1 >= len(digits):
            return sign + digits + "0" * (e + 1 - len(digits))
        return sign + digits[:e + 1] + "." + digits[e + 1:]
    return sign + "0." + "0" * (-e - 1) + digits


def _parse_cell(cell: str) -> Optional[float]:
    return None if cell == "" else float(cell)


def _write_csv(path: str, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _read_csv(path: str, expected_header):
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            rows = list(reader)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    if not rows or rows[0] != expected_header:
        raise ConfigError(f"{path}: header mismatch, expected "
                          f"{','.join(expected_header)}")
    out = []
    for ln, row in enumerate(rows[1:], 2):
        if len(row) != len(expected_header):
            raise ConfigError(f"{path}:{ln}: expected {len(expected_header)} "
                              f"columns, got {len(row)}")
        parsed = {}
        for key, cell in zip(expected_header, row):
            if key == "flag":
                parsed[key] = cell
            else:
                try:
                    parsed[key] = _parse_cell(cell)
                except ValueError as exc:
                    raise ConfigError(f"{path}:{ln}: column {key}: "
                                      f"{exc}") from exc
        out.append(parsed)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_profile(rc: RunConfig, out: str, quiet: bool) -> int:
    n = rc["profile.n_points"]
    if n == 0:
        raise ConfigError("profile.n_points: radius grid is empty")
    filt = rc.filter
    r_max = rc["profile.r_max"]
    radii = (np.linspace(0.0, r_max, n) if r_max is not None
             else default_radii(filt, n))
    proto = rc.protocol
    rows = []
    failed = 0
    for r in radii:
        tb = ""
        if isinstance(filt, MbNla) and r >= filt.m_c:
            tb = fmt12(tail_bound(float(r), proto))
        try:
            f, p, logp = profile_point(float(r), proto, rc.quad)
        except QuadratureError as exc:
            failed += 1
            rows.append([fmt12(r), "", "", "", tb, f"failed: {exc}"])
            continue
        rows.append([fmt12(r), fmt12(f), fmt12(p), fmt12(logp), tb, ""])
    _write_csv(out, PROFILE_HEADER, rows)
    if not quiet:
        print(f"profile: {len(rows)} rows -> {out}"
              + (f" ({failed} rows failed)" if failed else ""))
    return 1 if failed else 0


def _moment_report(rc: RunConfig):
    proto = rc.protocol
    lam = rc["lambda"]
    delta = rc["objective.delta"]
    merit = ens.conditional_moments(proto, rc.prior, rc.quad)
    rep = ens.selectivity_indices(proto, rc.prior, rc.quad)
    return [
        ("F", merit.F),
        ("D", merit.D),
        ("P_succ", merit.P_succ),
        ("S1", rep.S1),
        ("S2", rep.S2),
        ("I_sel", rep.I_sel),
        ("I_alpha_S", rep.I_alpha_S),
        ("J_lambda", ens.robust_objective(merit, lam)),
        ("cantelli_guarantee", ens.cantelli_guarantee(lam)),
        ("throughput_bound", ens.throughput_bound(merit, delta)),
    ]


def cmd_moments(rc: RunConfig, out: Optional[str], quiet: bool) -> int:
    report = _moment_report(rc)
    if not quiet or out is None:
        for key, val in report:
            print(f"{key} = {fmt12(val)}")
    if out is not None:
        _write_csv(out, ["key", "value"],
                   [[k, fmt12(v)] for k, v in report])
        if not quiet:
            print(f"moments: -> {out}")
    return 0


def _sweep_rows(records):
    rows = []
    for rec in records:
        if rec.merit is None:
            rows.append([fmt12(rec.g), fmt12(rec.m_c), "", "", "", "", "", "",
                         "", "", rec.quad_flags])
            continue
        rows.append([
            fmt12(rec.g), fmt12(rec.m_c), fmt12(rec.merit.F),
            fmt12(rec.merit.D), fmt12(rec.merit.P_succ), fmt12(rec.report.S1),
            fmt12(rec.report.S2), fmt12(rec.report.I_sel),
            fmt12(rec.report.I_alpha_S), fmt12(rec.j_lambda),
            "" if rec.quad_flags == "ok" else rec.quad_flags,
        ])
    return rows


def cmd_sweep(rc: RunConfig, out: str, quiet: bool) -> int:
    records = sweep(rc["grid.g"], rc["grid.m_c"], rc.params, rc.prior,
                    rc["lambda"], rc.quad,
                    include_control=rc["grid.include_control"])
    _write_csv(out, SWEEP_HEADER, _sweep_rows(records))
    if not quiet:
        print(f"sweep: {len(records)} records -> {out}")
    return 1 if any(r.merit is None for r in records) else 0


def _records_from_rows(rows):
    from .tradeoff import SweepRecord

    records = []
    for row in rows:
        if row["F"] is None:
            records.append(SweepRecord(row["g"], row["m_c"], None, None,
                                       math.nan, row["flag"] or "failed"))
            continue
        merit = ens.MeritTriple(row["F"], row["D"], row["P_succ"])
        rep = ens.SelectivityReport(row["D"], row["S1"], row["S2"],
                                    row["I_sel"], row["I_alpha_S"])
        records.append(SweepRecord(row["g"], row["m_c"], merit, rep,
                                   row["J_lambda"], row["flag"] or "ok"))
    return records


def _describe(rec) -> str:
    where = ("control" if rec.g is None
             else f"g={fmt12(rec.g)} m_c={fmt12(rec.m_c)}")
    return (f"{where}: F={fmt12(rec.merit.F)} D={fmt12(rec.merit.D)} "
            f"P_succ={fmt12(rec.merit.P_succ)}")


def cmd_frontier(in_path: str, d_max: float, p_min: float, lam: float) -> int:
    rows = _read_csv(in_path, SWEEP_HEADER)
    if not rows:
        raise ConfigError(f"{in_path}: no data rows")
    records = _records_from_rows(rows)
    front = pareto_frontier(records)
    print(f"pareto frontier ({len(front)} of {len(records)} records):")
    for rec in front:
        print("  " + _describe(rec))
    best = constrained_best(records, d_max, p_min)
    if best is None:
        print(f"constrained best (D <= {fmt12(d_max)}, P_succ >= "
              f"{fmt12(p_min)}): infeasible")
    else:
        print(f"constrained best (D <= {fmt12(d_max)}, P_succ >= "
              f"{fmt12(p_min)}): " + _describe(best))
    obj = objective_best(records, lam)
    print(f"objective best (lambda = {fmt12(lam)}): " + _describe(obj)
          + f" J={fmt12(obj.merit.F - lam * obj.merit.D)}")
    return 0


def cmd_oracle(rc: RunConfig, r: Optional[float], out: Optional[str],
               quiet: bool) -> int:
    proto = rc.protocol
    if r is not None:
        pt = mc_point(r, proto, rc.oracle)
        pairs = [("r", r), ("p_succ_hat", pt.p_succ_hat), ("p_err", pt.p_err),
                 ("f_hat", pt.f_hat), ("f_err", pt.f_err),
                 ("n_accepted", pt.n_accepted)]
        ok = pt.ok
    else:
        res = mc_ensemble(proto, rc.prior, rc.oracle)
        pairs = [("F", res.merit_hat.F), ("se_F", res.se_F),
                 ("D", res.merit_hat.D), ("se_D", res.se_D),
                 ("P_succ", res.merit_hat.P_succ), ("se_P", res.se_P),
                 ("n_zero_acceptance", res.n_zero_acceptance)]
        ok = res.ok
    if not quiet or out is None:
        for key, val in pairs:
            print(f"{key} = {fmt12(val)}")
    if out is not None:
        _write_csv(out, ["key", "value"], [[k, fmt12(v)] for k, v in pairs])
    if not ok:
        print("oracle: inconclusive (zero acceptance)", file=sys.stderr)
        return 1
    return 0


def cmd_plot(in_path: str, mode: str, out: str, quiet: bool) -> int:
    if mode == "profile":
        rows = _read_csv(in_path, PROFILE_HEADER)
        svg = svgplot.render_profile(rows)
    elif mode == "fd_curves":
        rows = _read_csv(in_path, SWEEP_HEADER)
        svg = svgplot.render_fd_curves(rows)
    elif mode == "fd_density":
        rows = _read_csv(in_path, SWEEP_HEADER)
        svg = svgplot.render_fd_density(rows)
    else:
        raise ConfigError(f"unknown plot mode {mode!r}")
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(svg)
    if not quiet:
        print(f"plot[{mode}]: -> {out}")
    return 0


# ---------------------------------------------------------------------------
# invariant check suite
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    margin: float
    detail: str


def run_checks(rc: RunConfig, baseline_shift: float = 0.0) -> list[CheckResult]:
    """Run the numeric invariant suite; ``baseline_shift`` corrupts the
    expected flat baseline and exists so tests can verify the suite fails."""
    params = rc.params
    prior = rc.prior
    qcfg = rc.quad
    results = []
    settings = [(1.2, 3.0), (1.4, 2.2), (1.6, 1.8)]

    # flat accept-all profile, checked on the table and via the 2-D probe
    f0 = deterministic_baseline(params) + baseline_shift
    proto_aa = Protocol(params, AcceptAll())
    table = profile_table(np.linspace(0.0, 6.0, 121), proto_aa, qcfg)
    dev = float(np.max(np.abs(table.f_succ - f0)))
    for alpha in (1.0 + 0.0j, 0.0 + 1.0j, 1.5 * np.exp(1j * 0.6)):
        dev = max(dev, abs(phase_invariance_probe(complex(alpha), proto_aa,
                                                  qcfg) - f0))
    results.append(CheckResult("flatness", dev < 1e-8, dev,
                               f"max |f - f0| = {dev:.3e}"))

    # filtering cannot move the fidelity when record and error decouple
    params0 = SurrogateParams(params.V_n, params.V_eps, 0.0)
    target = 1.0 / (1.0 + params.V_eps)
    dev = 0.0
    for g, m_c in settings:
        tab = profile_table(np.linspace(0.0, 6.0, 121),
                            Protocol(params0, MbNla(g, m_c)), qcfg)
        dev = max(dev, float(np.max(np.abs(tab.f_succ - target))))
    results.append(CheckResult("futility", dev < 1e-8, dev,
                               f"max |f - 1/(1+V_eps)| = {dev:.3e}"))

    # beyond the cut-off the fidelity obeys the analytic tail bound
    worst = -math.inf
    for g, m_c in settings:
        proto = Protocol(params, MbNla(g, m_c))
        for dr in (0.0, 0.5, 1.0, 2.0):
            r = m_c + dr
            worst = max(worst, conditional_fidelity(r, proto, qcfg)
                        - tail_bound(r, proto))
    results.append(CheckResult("tail_bound", worst < 1e-8, worst,
                               f"max (f - bound) = {worst:.3e}"))

    # radial reduction: the 2-D probe agrees at rotated amplitudes
    proto = Protocol(params, MbNla(1.4, 2.2))
    dev = 0.0
    for r in (0.5, 2.0, 4.0):
        f_r = conditional_fidelity(r, proto, qcfg)
        for phi in (math.pi / 7, math.pi / 3, 2 * math.pi / 3):
            dev = max(dev, abs(phase_invariance_probe(r * np.exp(1j * phi),
                                                      proto, qcfg) - f_r))
    results.append(CheckResult("phase_invariance", dev < 1e-8, dev,
                               f"max |probe - f(r)| = {dev:.3e}"))

    # information functionals are nonnegative and vanish for the control
    worst = math.inf
    for g in (1.2, 1.6):
        for m_c in (1.8, 3.0):
            proto = Protocol(params, MbNla(g, m_c))
            worst = min(worst,
                        ens.heralding_mutual_information(proto, prior, qcfg),
                        ens.selectivity_divergence(proto, prior, qcfg))
    aa_mi = ens.heralding_mutual_information(proto_aa, prior, qcfg)
    aa_kl = ens.selectivity_divergence(proto_aa, prior, qcfg)
    ok = worst >= -1e-12 and aa_mi < 1e-10 and aa_kl < 1e-10
    results.append(CheckResult("jensen_nonnegativity", ok, worst,
                               f"min functional = {worst:.3e}, control = "
                               f"({aa_mi:.1e}, {aa_kl:.1e})"))

    # Monte Carlo agrees with quadrature within 3 standard errors
    proto = Protocol(params, MbNla(1.2, 3.0))
    worst = 0.0
    for r in (0.0, 1.5):
        pt = mc_point(r, proto, rc.oracle, stream=int(10 * r))
        zf = abs(pt.f_hat - conditional_fidelity(r, proto, qcfg)) / pt.f_err
        zp = abs(pt.p_succ_hat
                 - math.exp(profile_table(np.array([max(r, 1e-12)]), proto,
                                          qcfg).log_p_succ[0])) / pt.p_err
        worst = max(worst, zf, zp)
    results.append(CheckResult("oracle_agreement", worst < 3.0, worst,
                               f"max |z| = {worst:.2f}"))

    # weak-filter response: deviation grows linearly with fidelity change
    m_c_slope = rc["slope.m_c"] or 3.0 * prior.sigma
    est = slope_estimate(params, prior, m_c_slope, rc["slope.theta_max"],
                         rc["slope.n_points"], qcfg)
    ok = est.conclusive and est.r_squared >= 0.99
    results.append(CheckResult(
        "slope_linearity", ok, est.r_squared,
        f"r^2 = {est.r_squared:.6f}, slope = {est.slope_c:.3f}, "
        f"intercept = {est.intercept:.2e} "
        f"({abs(est.intercept) / max(est.D_values):.2f} of max D)"))

    # empirical one-sided concentration at the configured sample size
    proto = Protocol(params, MbNla(1.4, 2.2))
    merit = ens.conditional_moments(proto, prior, qcfg)
    n = rc["check.n_samples"]
    alphas = sample_effective_prior(proto, prior, rc.oracle, n)
    grid = np.linspace(0.0, float(np.max(np.abs(alphas))) + 0.1, 2001)
    fline = profile_table(grid[1:], proto, qcfg)
    fvals = np.interp(np.abs(alphas), fline.radii, fline.f_succ)
    worst = math.inf
    detail = []
    for lam in (1.0, 2.0, 3.0):
        frac = float(np.mean(fvals >= merit.F - lam * merit.D))
        bound = ens.cantelli_guarantee(lam)
        se = math.sqrt(bound * (1.0 - bound) / n)
        worst = min(worst, frac - (bound - 3.0 * se))
        detail.append(f"lam={lam:.0f}: {frac:.4f} >= {bound - 3 * se:.4f}")
    delta = 2.0 * merit.D
    frac = float(np.mean(fvals >= merit.F - delta))
    cheb = 1.0 - merit.D ** 2 / delta ** 2
    se = math.sqrt(cheb * (1.0 - cheb) / n)
    worst = min(worst, frac - (cheb - 3.0 * se))
    detail.append(f"chebyshev: {frac:.4f} >= {cheb - 3 * se:.4f}")
    results.append(CheckResult("concentration_bounds", worst >= 0.0, worst,
                               "; ".join(detail)))
    return results


def cmd_check(rc: RunConfig, out: Optional[str], quiet: bool) -> int:
    results = run_checks(rc)
    failed = 0
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status} {res.name}: {res.detail}")
        failed += 0 if res.passed else 1
    if out is not None:
        _write_csv(out, ["check", "passed", "margin"],
                   [[res.name, str(res.passed).lower(), fmt12(res.margin)]
                    for res in results])
    if failed:
        print(f"{failed} of {len(results)} checks failed", file=sys.stderr)
        return 3
    if not quiet:
        print(f"all {len(results)} checks passed")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="telefid",
        description="fidelity / deviation / success-probability trade-offs "
                    "of filtered CV teleportation")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, needs_out=False):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--set", action="append", default=[], metavar="K=V",
                       help="override one config key")
        p.add_argument("--seed", type=int, help="oracle seed override")
        p.add_argument("--lambda", dest="lam", type=float,
                       help="confidence weight override")
        p.add_argument("--quiet", action="store_true")
        if needs_out:
            p.add_argument("--out", required=True, help="output path")
        else:
            p.add_argument("--out", help="output path")

    common(sub.add_parser("profile", help="tabulate f_succ(r), P_succ(r)"),
           needs_out=True)
    common(sub.add_parser("moments", help="ensemble merit and indices"))
    common(sub.add_parser("sweep", help="grid sweep over (g, m_c)"),
           needs_out=True)

    p = sub.add_parser("frontier", help="Pareto / constrained selection")
    p.add_argument("sweep_csv")
    p.add_argument("--d-max", type=float, default=math.inf)
    p.add_argument("--p-min", type=float, default=0.0)
    p.add_argument("--lambda", dest="lam", type=float, default=3.0)
    p.add_argument("--quiet", action="store_true")

    common(sub.add_parser("check", help="run the invariant suite"))

    p = sub.add_parser("oracle", help="Monte Carlo cross-check")
    common(p)
    p.add_argument("--r", type=float, help="point estimate at this radius "
                                           "(default: ensemble)")

    p = sub.add_parser("plot", help="render a CSV to SVG")
    p.add_argument("in_csv")
    p.add_argument("--mode", required=True,
                   choices=["profile", "fd_curves", "fd_density"])
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "frontier":
            return cmd_frontier(args.sweep_csv, args.d_max, args.p_min,
                                args.lam)
        if args.command == "plot":
            return cmd_plot(args.in_csv, args.mode, args.out, args.quiet)

        rc = load_config(args.config, args.set, args.seed, args.lam)
        if args.command == "profile":
            return cmd_profile(rc, args.out, args.quiet)
        if args.command == "moments":
            return cmd_moments(rc, args.out, args.quiet)
        if args.command == "sweep":
            return cmd_sweep(rc, args.out, args.quiet)
        if args.command == "check":
            return cmd_check(rc, args.out, args.quiet)
        if args.command == "oracle":
            return cmd_oracle(rc, args.r, args.out, args.quiet)
        raise AssertionError(args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (QuadratureError, RuntimeError, ValueError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
