"""Brute-force reference implementations used only by the tests."""

import itertools

import numpy as np
import shapely


def support_coords(tile):
    return np.array(tile.support.vertices, dtype=float)


def all_pairs_adjacent(patch, tol=1e-9):
    """Every pair i < j with shared boundary of positive length, by exhaustive comparison.

    Boxes prefilter all N^2 pairs in numpy; survivors get an exact shapely boundary overlay.
    """
    n = len(patch)
    if n < 2:
        return {}
    boxes = np.array([t.support.bbox for t in patch.tiles])
    scale = max(1.0, max(t.diameter for t in patch.tiles))
    pad = 1e-7 * scale
    i, j = np.triu_indices(n, 1)
    ok = (
        (boxes[i, 0] <= boxes[j, 2] + pad)
        & (boxes[j, 0] <= boxes[i, 2] + pad)
        & (boxes[i, 1] <= boxes[j, 3] + pad)
        & (boxes[j, 1] <= boxes[i, 3] + pad)
    )
    i, j = i[ok], j[ok]
    rings = np.array([shapely.LineString(np.vstack([c, c[:1]])) for c in map(support_coords, patch.tiles)])
    # snap so that collinear boundary pieces computed in floating point line up
    inter = shapely.intersection(rings[i], rings[j], grid_size=1e-9 * scale)
    lengths = shapely.length(inter)
    keep = lengths > tol * scale
    return {(int(a), int(b)): float(l) for a, b, l in zip(i[keep], j[keep], lengths[keep])}


def _rounded(pts, q=1e-6):
    return tuple(sorted((round(x / q), round(y / q)) for x, y in pts))


def translation_class(t1, t2):
    """Pair class up to translation: translate so the first tile's smallest vertex is at the origin."""
    best = None
    for a, b in ((t1, t2), (t2, t1)):
        va, vb = support_coords(a), support_coords(b)
        ref = min(map(tuple, va))
        key = (a.id, b.id, _rounded(va - ref), _rounded(vb - ref))
        best = key if best is None or key < best else best
    return best


def _symmetries(poly):
    """Linear isometries (about the origin) together with a translation that map the polygon to itself."""
    pts = np.array(poly.vertices, dtype=float)
    c = pts.mean(axis=0)
    centred = pts - c
    target = _rounded(centred)
    out = []
    for k in range(len(pts)):
        theta = np.arctan2(centred[k, 1], centred[k, 0]) - np.arctan2(centred[0, 1], centred[0, 0])
        for refl in (False, True):
            R = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
            if refl:
                # reflect across the line through the centroid and vertex k
                ang = np.arctan2(centred[k, 1], centred[k, 0]) + np.arctan2(centred[0, 1], centred[0, 0])
                R = np.array([[np.cos(ang), np.sin(ang)], [np.sin(ang), -np.cos(ang)]])
            img = centred @ R.T
            if _rounded(img) == target:
                out.append(R)
    return out, c


def isometry_class(t1, t2):
    """Pair class up to rigid motion: pull the pair back by every motion taking tile one to its prototile."""
    best = None
    for a, b in ((t1, t2), (t2, t1)):
        m = a.placement
        L = np.array([[m.linear.a, m.linear.b], [m.linear.c, m.linear.d]])
        t = np.array(m.translation)
        inv = np.linalg.inv(L)
        base_b = (support_coords(b) - t) @ inv.T
        syms, c = _symmetries(a.proto.shape)
        for R in syms:
            img = (base_b - c) @ R.T + c
            key = (a.id, b.id, _rounded(img))
            best = key if best is None or key < best else best
    return best


def census(patch, mode="translation"):
    f = translation_class if mode == "translation" else isometry_class
    return {f(patch.tiles[i], patch.tiles[j]) for i, j in all_pairs_adjacent(patch)}


def point_in_polygon(px, py, poly):
    """Even-odd ray casting, vectorised over points."""
    inside = np.zeros(px.shape, dtype=bool)
    n = len(poly)
    for k in range(n):
        x1, y1 = poly[k]
        x2, y2 = poly[(k + 1) % n]
        cross = (y1 > py) != (y2 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= cross & (px < xint)
    return inside


def raster_cover_counts(patch, region, res=512):
    """Per-pixel count of tiles containing the pixel centre, over the bounding box of ``region``."""
    x0, y0, x1, y1 = region.bbox
    xs = x0 + (np.arange(res) + 0.5) * (x1 - x0) / res
    ys = y0 + (np.arange(res) + 0.5) * (y1 - y0) / res
    px, py = np.meshgrid(xs, ys)
    counts = np.zeros(px.shape, dtype=int)
    for t in patch.tiles:
        counts += point_in_polygon(px, py, t.support.vertices)
    inside = point_in_polygon(px, py, region.vertices)
    return counts, inside


def spanning_exponent(rows):
    """Smallest n <= (m-1)^2 + 1 with M^n strictly positive, by repeated integer products."""
    M = np.array(rows, dtype=object)
    P = M.copy()
    m = len(rows)
    for n in range(1, (m - 1) ** 2 + 2):
        if all(x > 0 for x in P.flat):
            return n
        P = P.dot(M)
    return None


def subsets(seq):
    for k in range(len(seq) + 1):
        yield from itertools.combinations(seq, k)
