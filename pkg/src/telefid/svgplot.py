"""Self-contained, byte-deterministic SVG rendering of sweep and profile data.

No plotting library: a fixed canvas, nice-number ticks and plain SVG 1.1
primitives, so identical input always produces identical bytes and the
files diff cleanly in tests.
"""

from __future__ import annotations

import math
from typing import Sequence

__all__ = ["render_profile", "render_fd_curves", "render_fd_density"]

_W, _H = 800.0, 600.0
_ML, _MR, _MT, _MB = 80.0, 30.0, 40.0, 60.0
_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
# marker fill ramp for P_succ: dark violet (0) to bright yellow (1)
_RAMP_LO = (0x30, 0x12, 0x3B)
_RAMP_HI = (0xF0, 0xF9, 0x21)


def _nice_ticks(lo: float, hi: float, target: int = 6):
    if not (hi > lo):
        hi = lo + 1.0
    span = hi - lo
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def _expand(lo: float, hi: float):
    if hi <= lo:
        pad = max(abs(lo), 1.0) * 0.05
        return lo - pad, hi + pad
    pad = (hi - lo) * 0.06
    return lo - pad, hi + pad


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _ramp(frac: float) -> str:
    frac = min(max(frac, 0.0), 1.0)
    rgb = tuple(round(a + frac * (b - a)) for a, b in zip(_RAMP_LO, _RAMP_HI))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


class _Axes:
    def __init__(self, xlim, ylim, xlabel, ylabel, title):
        self.x0, self.x1 = _expand(*xlim)
        self.y0, self.y1 = _expand(*ylim)
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_W:.0f}" height="{_H:.0f}" '
            f'viewBox="0 0 {_W:.0f} {_H:.0f}">\n',
            f'<rect x="0" y="0" width="{_W:.0f}" height="{_H:.0f}" '
            'fill="white"/>\n',
        ]
        self._frame(xlabel, ylabel, title)

    def px(self, x: float) -> float:
        return _ML + (x - self.x0) / (self.x1 - self.x0) * (_W - _ML - _MR)

    def py(self, y: float) -> float:
        return _H - _MB - (y - self.y0) / (self.y1 - self.y0) * (_H - _MT - _MB)

    def _frame(self, xlabel, ylabel, title):
        p = self.parts
        p.append(f'<rect x="{_ML:.2f}" y="{_MT:.2f}" '
                 f'width="{_W - _ML - _MR:.2f}" height="{_H - _MT - _MB:.2f}" '
                 'fill="none" stroke="black" stroke-width="1"/>\n')
        for t in _nice_ticks(self.x0, self.x1):
            if not (self.x0 <= t <= self.x1):
                continue
            x = self.px(t)
            p.append(f'<line x1="{x:.2f}" y1="{_H - _MB:.2f}" x2="{x:.2f}" '
                     f'y2="{_H - _MB + 6:.2f}" stroke="black"/>\n')
            p.append(f'<text x="{x:.2f}" y="{_H - _MB + 20:.2f}" '
                     'font-family="sans-serif" font-size="12" '
                     f'text-anchor="middle">{_fmt(t)}</text>\n')
        for t in _nice_ticks(self.y0, self.y1):
            if not (self.y0 <= t <= self.y1):
                continue
            y = self.py(t)
            p.append(f'<line x1="{_ML - 6:.2f}" y1="{y:.2f}" x2="{_ML:.2f}" '
                     f'y2="{y:.2f}" stroke="black"/>\n')
            p.append(f'<text x="{_ML - 10:.2f}" y="{y + 4:.2f}" '
                     'font-family="sans-serif" font-size="12" '
                     f'text-anchor="end">{_fmt(t)}</text>\n')
        p.append(f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{_H - 15:.2f}" '
                 'font-family="sans-serif" font-size="14" '
                 f'text-anchor="middle">{xlabel}</text>\n')
        p.append(f'<text x="20" y="{(_MT + _H - _MB) / 2:.2f}" '
                 'font-family="sans-serif" font-size="14" text-anchor="middle" '
                 f'transform="rotate(-90 20 {(_MT + _H - _MB) / 2:.2f})">'
                 f'{ylabel}</text>\n')
        p.append(f'<text x="{(_ML + _W - _MR) / 2:.2f}" y="{_MT - 12:.2f}" '
                 'font-family="sans-serif" font-size="15" '
                 f'text-anchor="middle">{title}</text>\n')

    def polyline(self, xs, ys, color):
        pts = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}"
                       for x, y in zip(xs, ys))
        self.parts.append(f'<polyline points="{pts}" fill="none" '
                          f'stroke="{color}" stroke-width="1.8"/>\n')

    def marker(self, x, y, color):
        self.parts.append(f'<circle cx="{self.px(x):.2f}" cy="{self.py(y):.2f}" '
                          f'r="4.5" fill="{color}" stroke="black" '
                          'stroke-width="0.6"/>\n')

    def legend(self, entries):
        x, y = _W - _MR - 170.0, _MT + 14.0
        self.parts.append(f'<rect x="{x - 8:.2f}" y="{y - 12:.2f}" width="178" '
                          f'height="{16 * len(entries) + 10:.2f}" fill="white" '
                          'stroke="black" stroke-width="0.6"/>\n')
        for i, (label, color) in enumerate(entries):
            yy = y + 16.0 * i
            self.parts.append(f'<line x1="{x:.2f}" y1="{yy:.2f}" '
                              f'x2="{x + 24:.2f}" y2="{yy:.2f}" '
                              f'stroke="{color}" stroke-width="2.5"/>\n')
            self.parts.append(f'<text x="{x + 30:.2f}" y="{yy + 4:.2f}" '
                              'font-family="sans-serif" font-size="12">'
                              f'{label}</text>\n')

    def ramp_legend(self, label):
        x, y, w, h = _W - _MR - 170.0, _MT + 14.0, 120.0, 12.0
        for i in range(12):
            self.parts.append(
                f'<rect x="{x + i * w / 12:.2f}" y="{y:.2f}" '
                f'width="{w / 12 + 0.5:.2f}" height="{h:.2f}" '
                f'fill="{_ramp((i + 0.5) / 12)}"/>\n')
        self.parts.append(f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" '
                          f'height="{h:.2f}" fill="none" stroke="black" '
                          'stroke-width="0.6"/>\n')
        self.parts.append(f'<text x="{x - 6:.2f}" y="{y + 10:.2f}" '
                          'font-family="sans-serif" font-size="11" '
                          'text-anchor="end">0</text>\n')
        self.parts.append(f'<text x="{x + w + 6:.2f}" y="{y + 10:.2f}" '
                          'font-family="sans-serif" font-size="11">1</text>\n')
        self.parts.append(f'<text x="{x + w / 2:.2f}" y="{y + 28:.2f}" '
                          'font-family="sans-serif" font-size="11" '
                          f'text-anchor="middle">{label}</text>\n')

    def render(self) -> str:
        return "".join(self.parts) + "</svg>\n"


def render_profile(rows: Sequence[dict]) -> str:
    """Polyline of conditional fidelity against input radius (rows without
    a converged fidelity are skipped)."""
    rows = [row for row in rows if row["f_succ"] is not None]
    if not rows:
        raise ValueError("profile plot needs at least one converged row")
    xs = [row["r"] for row in rows]
    ys = [row["f_succ"] for row in rows]
    ax = _Axes((min(xs), max(xs)), (min(ys), max(ys)),
               "input radius |alpha|", "conditional fidelity",
               "single-shot conditional fidelity profile")
    ax.polyline(xs, ys, _PALETTE[0])
    return ax.render()


def render_fd_curves(rows: Sequence[dict]) -> str:
    """Fidelity-deviation curves grouped by gain (control rows are skipped)."""
    groups: dict[float, list[dict]] = {}
    for row in rows:
        if row["g"] is None or row["F"] is None:
            continue
        groups.setdefault(row["g"], []).append(row)
    if not groups:
        raise ValueError("fd_curves needs at least one non-control row")
    pts = [r for rs in groups.values() for r in rs]
    ax = _Axes((min(p["F"] for p in pts), max(p["F"] for p in pts)),
               (min(p["D"] for p in pts), max(p["D"] for p in pts)),
               "average fidelity F", "fidelity deviation D",
               "fidelity-deviation trade-off by gain")
    entries = []
    for i, g in enumerate(sorted(groups)):
        rs = sorted(groups[g], key=lambda row: row["m_c"])
        color = _PALETTE[i % len(_PALETTE)]
        ax.polyline([row["F"] for row in rs], [row["D"] for row in rs], color)
        for row in rs:
            ax.marker(row["F"], row["D"], color)
        entries.append((f"g = {_fmt(g)}", color))
    ax.legend(entries)
    return ax.render()


def render_fd_density(rows: Sequence[dict]) -> str:
    """Scatter in the (F, D) plane, marker fill linear in success
    probability (unconverged rows are skipped)."""
    pts = [row for row in rows if row["F"] is not None]
    if not pts:
        raise ValueError("fd_density needs at least one converged row")
    ax = _Axes((min(p["F"] for p in pts), max(p["F"] for p in pts)),
               (min(p["D"] for p in pts), max(p["D"] for p in pts)),
               "average fidelity F", "fidelity deviation D",
               "trade-off density: fill encodes success probability")
    for row in pts:
        ax.marker(row["F"], row["D"], _ramp(row["P_succ"]))
    ax.ramp_legend("P_succ (linear ramp)")
    return ax.render()
