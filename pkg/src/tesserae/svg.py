"""Deterministic SVG rendering of patches."""

from __future__ import annotations

import colorsys
import hashlib
import re
from html import escape

from .geometry import Patch

PALETTE = (
    "#4e79a7",
    "#f28e2b",
    "#e15759",
    "#76b7b2",
    "#59a14f",
    "#edc948",
    "#b07aa1",
    "#ff9da7",
    "#9c755f",
    "#bab0ac",
    "#86bcb6",
    "#d37295",
)
MARGIN = 0.02
_CLASS_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")


def color_for(index: int, key: str) -> str:
    """Palette entry for the first 12 prototiles, then a hash-derived HSL colour."""
    if index < len(PALETTE):
        return PALETTE[index]
    h = hashlib.sha256(key.encode()).digest()
    hue = h[0] / 255.0
    light = 0.45 + 0.2 * h[1] / 255.0
    sat = 0.45 + 0.35 * h[2] / 255.0
    r, g, b = colorsys.hls_to_rgb(hue, light, sat)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def _f(x: float) -> str:
    s = f"{x:.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def render_svg(patch: Patch, prototile_order=None, stroke_width: float | None = None) -> str:
    """One ``<polygon>`` per tile in canonical order; y points up.

    Fill colour is chosen by the prototile's position in ``prototile_order``
    (default: the patch's prototile table).
    """
    order = list(prototile_order) if prototile_order is not None else [p.id for p in patch.prototiles]
    for p in patch.prototiles:
        if p.id not in order:
            order.append(p.id)
    index = {pid: i for i, pid in enumerate(order)}
    labels = {p.id: p.label for p in patch.prototiles}
    patch = patch.canonical()
    if len(patch):
        x0, y0, x1, y1 = patch.bbox
    else:
        x0, y0, x1, y1 = 0.0, 0.0, 1.0, 1.0
    w, h = x1 - x0, y1 - y0
    mx, my = MARGIN * max(w, 1e-12), MARGIN * max(h, 1e-12)
    vx, vy, vw, vh = x0 - mx, -(y1 + my), w + 2 * mx, h + 2 * my
    sw = stroke_width if stroke_width is not None else 0.002 * max(vw, vh)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_f(vx)} {_f(vy)} {_f(vw)} {_f(vh)}">',
        f'<g stroke="#222222" stroke-width="{_f(sw)}" stroke-linejoin="round">',
    ]
    verts, nv = patch.vertex_array if len(patch) else (None, None)
    for i, t in enumerate(patch):
        pid = t.proto.id
        classes = ["tile", "tile-" + re.sub(r"[^A-Za-z0-9_-]", "_", pid)]
        lab = labels.get(pid, "")
        if lab and lab != pid and _CLASS_RE.fullmatch(lab):
            classes.append(lab)
        pts = " ".join(f"{_f(x)},{_f(-y)}" for x, y in verts[i, : nv[i]])
        out.append(
            f'<polygon class="{escape(" ".join(classes))}" fill="{color_for(index[pid], pid)}" points="{pts}"/>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
