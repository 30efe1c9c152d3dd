"""Minimal hand-written SVG plots.

Data coordinates go in as given (y up); the emitter flips y on output and
sizes the viewBox to the data extents plus a 5% margin.  Non-finite
samples break a polyline into separate pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

MARGIN = 0.05
WIDTH_PX = 800


def _fmt(v: float) -> str:
    return format(float(v), ".6g")


@dataclass
class Plot:
    title: str = ""
    items: list[tuple[str, dict]] = field(default_factory=list)
    hlines: list[tuple[float, dict]] = field(default_factory=list)
    _xs: list[float] = field(default_factory=list)
    _ys: list[float] = field(default_factory=list)

    def _extend(self, xs, ys):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        ok = np.isfinite(xs) & np.isfinite(ys)
        if ok.any():
            self._xs += [xs[ok].min(), xs[ok].max()]
            self._ys += [ys[ok].min(), ys[ok].max()]

    def polyline(self, xs, ys, color="#000", width=1.0, dash: str | None = None, label: str | None = None):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        self._extend(xs, ys)
        self.items.append(("path", dict(xs=xs, ys=ys, color=color, width=width, dash=dash, label=label)))

    def circle(self, x, y, r, color="#000", width=1.0, fill="none"):
        self._extend([x - r, x + r], [y - r, y + r])
        self.items.append(("circle", dict(x=x, y=y, r=r, color=color, width=width, fill=fill)))

    def dots(self, xs, ys, r_px=1.5, color="#000"):
        xs, ys = np.asarray(xs, float), np.asarray(ys, float)
        self._extend(xs, ys)
        self.items.append(("dots", dict(xs=xs, ys=ys, r_px=r_px, color=color)))

    def hline(self, y, color="#888", width=1.0, dash="4 3"):
        """Horizontal line spanning the final x extent (e.g. the directrix)."""
        self._ys.append(float(y))
        self.hlines.append((float(y), dict(color=color, width=width, dash=dash)))

    def extents(self) -> tuple[float, float, float, float]:
        if not self._xs:
            return (-1.0, 1.0, -1.0, 1.0)
        x0, x1 = min(self._xs), max(self._xs)
        y0, y1 = min(self._ys), max(self._ys)
        w = x1 - x0 if x1 > x0 else 1.0
        h = y1 - y0 if y1 > y0 else 1.0
        return (x0 - MARGIN * w, x1 + MARGIN * w, y0 - MARGIN * h, y1 + MARGIN * h)

    def render(self) -> str:
        x0, x1, y0, y1 = self.extents()
        w, h = x1 - x0, y1 - y0
        px_h = max(1, round(WIDTH_PX * h / w)) if w > 0 else WIDTH_PX
        px = w / WIDTH_PX  # one screen pixel in data units
        out = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH_PX}" height="{px_h}" '
            f'viewBox="{_fmt(x0)} {_fmt(-y1)} {_fmt(w)} {_fmt(h)}">',
        ]
        if self.title:
            out.append(f"<title>{_escape(self.title)}</title>")
        out.append(f'<rect x="{_fmt(x0)}" y="{_fmt(-y1)}" width="{_fmt(w)}" height="{_fmt(h)}" fill="#fff"/>')
        for y, st in self.hlines:
            out.append(
                f'<line x1="{_fmt(x0)}" y1="{_fmt(-y)}" x2="{_fmt(x1)}" y2="{_fmt(-y)}" '
                f'{_stroke(st["color"], st["width"], st["dash"])}/>'
            )
        for kind, d in self.items:
            if kind == "path":
                data = _path_data(d["xs"], d["ys"])
                if data:
                    title = f"<title>{_escape(d['label'])}</title>" if d["label"] else ""
                    out.append(
                        f'<path d="{data}" fill="none" {_stroke(d["color"], d["width"], d["dash"])}>{title}</path>'
                    )
            elif kind == "circle":
                out.append(
                    f'<circle cx="{_fmt(d["x"])}" cy="{_fmt(-d["y"])}" r="{_fmt(d["r"])}" '
                    f'fill="{d["fill"]}" {_stroke(d["color"], d["width"], None)}/>'
                )
            else:
                r = d["r_px"] * px
                for x, y in zip(d["xs"], d["ys"]):
                    if math.isfinite(x) and math.isfinite(y):
                        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(-y)}" r="{_fmt(r)}" fill="{d["color"]}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.render())


def _stroke(color, width, dash) -> str:
    s = f'stroke="{color}" stroke-width="{_fmt(width)}" vector-effect="non-scaling-stroke"'
    if dash:
        s += f' stroke-dasharray="{dash}"'
    return s


def _path_data(xs: np.ndarray, ys: np.ndarray) -> str:
    parts = []
    pen_down = False
    for x, y in zip(xs, ys):
        if not (math.isfinite(x) and math.isfinite(y)):
            pen_down = False
            continue
        parts.append(f"{'L' if pen_down else 'M'}{_fmt(x)} {_fmt(-y)}")
        pen_down = True
    return " ".join(parts)


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
