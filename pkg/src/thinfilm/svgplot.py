"""Minimal deterministic SVG log-log plot (no timestamps, fixed viewport)."""

from __future__ import annotations

import math
from typing import Sequence

WIDTH, HEIGHT = 640, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 20, 40, 60


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _decades(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def loglog(x: Sequence[float], y: Sequence[float], reference: Sequence[float] | None = None,
           title: str = "", xlabel: str = "eps", ylabel: str = "scaled energy") -> str:
    """Polyline of (x, y) with an optional dashed reference polyline, both on log axes."""
    pts = [(a, b) for a, b in zip(x, y) if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)]
    ref = []
    if reference is not None:
        ref = [(a, b) for a, b in zip(x, reference) if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b)]
    allx = [math.log10(a) for a, _ in pts + ref]
    ally = [math.log10(b) for _, b in pts + ref]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-size="14">{_escape(title)}</text>']
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{LEFT + pw // 2}" y="{HEIGHT - 15}" text-anchor="middle">{_escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{TOP + ph // 2}" text-anchor="middle" '
               f'transform="rotate(-90 18 {TOP + ph // 2})">{_escape(ylabel)}</text>')
    if not pts and not ref:
        out.append(f'<text x="{LEFT + pw // 2}" y="{TOP + ph // 2}" text-anchor="middle">'
                   'no positive values to plot</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5
    padx, pady = 0.05 * (x1 - x0), 0.08 * (y1 - y0)
    x0, x1, y0, y1 = x0 - padx, x1 + padx, y0 - pady, y1 + pady

    def sx(v):
        return LEFT + (math.log10(v) - x0) / (x1 - x0) * pw

    def sy(v):
        return TOP + ph - (math.log10(v) - y0) / (y1 - y0) * ph

    def ticks(lo, hi, horizontal):
        for k in _decades(lo, hi):
            for m in range(1, 10):
                lv = k + math.log10(m)
                if not lo <= lv <= hi:
                    continue
                major = m == 1
                if horizontal:
                    px = LEFT + (lv - x0) / (x1 - x0) * pw
                    size = 8 if major else 4
                    out.append(f'<line x1="{_fmt(px)}" y1="{TOP + ph}" x2="{_fmt(px)}" y2="{_fmt(TOP + ph - size)}" stroke="black"/>')
                    if major or (hi - lo) < 1.2:
                        out.append(f'<text x="{_fmt(px)}" y="{TOP + ph + 18}" text-anchor="middle">{10.0 ** lv:g}</text>')
                else:
                    py = TOP + ph - (lv - y0) / (y1 - y0) * ph
                    size = 8 if major else 4
                    out.append(f'<line x1="{LEFT}" y1="{_fmt(py)}" x2="{_fmt(LEFT + size)}" y2="{_fmt(py)}" stroke="black"/>')
                    if major or (hi - lo) < 1.2:
                        out.append(f'<text x="{LEFT - 6}" y="{_fmt(py + 4)}" text-anchor="end">{10.0 ** lv:.3g}</text>')

    ticks(x0, x1, True)
    ticks(y0, y1, False)
    if ref:
        coords = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in ref)
        out.append(f'<polyline points="{coords}" fill="none" stroke="gray" stroke-dasharray="6,4"/>')
    if pts:
        coords = " ".join(f"{_fmt(sx(a))},{_fmt(sy(b))}" for a, b in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="navy" stroke-width="2"/>')
        for a, b in pts:
            out.append(f'<circle cx="{_fmt(sx(a))}" cy="{_fmt(sy(b))}" r="3" fill="navy"/>')
    lx = LEFT + pw - 150
    out.append(f'<line x1="{lx}" y1="{TOP + 15}" x2="{lx + 25}" y2="{TOP + 15}" stroke="navy" stroke-width="2"/>')
    out.append(f'<text x="{lx + 30}" y="{TOP + 19}">measured</text>')
    if ref:
        out.append(f'<line x1="{lx}" y1="{TOP + 32}" x2="{lx + 25}" y2="{TOP + 32}" stroke="gray" stroke-dasharray="6,4"/>')
        out.append(f'<text x="{lx + 30}" y="{TOP + 36}">predicted limit</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
