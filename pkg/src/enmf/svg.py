"""SVG drawings of the planar picture of a rank-3 COPE.

The outer polygon is black, the inner one green and the nested witness red.
Coordinates are printed with fixed precision so output bytes are stable.
"""
from __future__ import annotations

__all__ = ["render_planar_svg", "COLORS"]

COLORS = {"outer": "black", "inner": "green", "witness": "red"}


def _f(x: float) -> str:
    s = f"{x:.4f}"
    return "0.0000" if s == "-0.0000" else s


def render_planar_svg(inner, outer, witness=None, size: int = 400, margin: int = 20,
                      title: str | None = None) -> str:
    """SVG text for point lists ``inner``, ``outer`` and optional ``witness``."""
    polys = [("outer", outer), ("inner", inner)]
    if witness:
        polys.append(("witness", witness))
    pts = [(float(x), float(y)) for _, poly in polys for x, y in poly]
    xs, ys = [p[0] for p in pts], [p[1] for p in pts]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) or 1.0
    scale = (size - 2 * margin) / span
    x0, y0 = min(xs), min(ys)

    def tr(p):
        return (margin + (float(p[0]) - x0) * scale,
                size - margin - (float(p[1]) - y0) * scale)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if title:
        lines.append(f"  <title>{title}</title>")
    lines.append(f'  <rect width="{size}" height="{size}" fill="white"/>')
    for name, poly in polys:
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in map(tr, poly))
        width = "2" if name == "witness" else "1.5"
        lines.append(f'  <polygon id="{name}" points="{coords}" fill="none" '
                     f'stroke="{COLORS[name]}" stroke-width="{width}"/>')
        for x, y in map(tr, poly):
            lines.append(f'  <circle cx="{_f(x)}" cy="{_f(y)}" r="2.5" fill="{COLORS[name]}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
