"""Self-intersections of closed polylines and loop decomposition.

Crossings are exact segment-segment intersections of the discrete polyline;
the continuous curve's crossing point is recovered to O(h^2), which is
sufficient for every monitor built on top.  Near-coincident hits from
adjacent segment pairs (a crossing landing on or next to a shared vertex)
are merged into a single reported crossing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import PlaneCurve, curve_length, shoelace_area
from .errors import InvalidSplit, TangentialCrossing

# Parameter slack for the in-segment test; intersections this close to a
# segment end still count, and the cluster merge removes duplicates.
_PARAM_SLACK = 1e-9


@dataclass(frozen=True)
class Crossing:
    """One transversal self-intersection.

    segments: indices (i, j) of the two polyline segments that intersect,
        i < j; segment k runs from sample k to sample k+1 mod N.
    point: planar coordinates of the intersection.
    split: the two parameter arcs (vertex index arrays) forming the two
        loops; together they partition range(N).
    """

    segments: tuple[int, int]
    point: np.ndarray
    split: tuple[np.ndarray, np.ndarray]


def _arc_indices(start: int, stop: int, n: int) -> np.ndarray:
    """Vertex indices start+1, ..., stop (cyclic, inclusive)."""
    length = (stop - start) % n
    return (start + 1 + np.arange(length)) % n


def _candidate_hits(curve: PlaneCurve, ii: np.ndarray, jj: np.ndarray):
    """Intersections among the given segment pairs: (i, j, t, v, point) arrays.

    Raises TangentialCrossing on a genuine collinear overlap.
    """
    pts = curve.points
    starts = pts
    ends = np.roll(pts, -1, axis=0)
    dirs = ends - starts

    # Bounding-box prefilter.
    lo = np.minimum(starts, ends)
    hi = np.maximum(starts, ends)
    pad = 1e-12 * curve_length(curve)
    overlap = (
        (lo[ii, 0] <= hi[jj, 0] + pad) & (lo[jj, 0] <= hi[ii, 0] + pad)
        & (lo[ii, 1] <= hi[jj, 1] + pad) & (lo[jj, 1] <= hi[ii, 1] + pad)
    )
    ii, jj = ii[overlap], jj[overlap]
    if ii.size == 0:
        return ii, jj, np.empty(0), np.empty(0), np.empty((0, 2))

    r = dirs[ii]
    s = dirs[jj]
    qp = starts[jj] - starts[ii]
    denom = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    cross_qp_s = qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]
    cross_qp_r = qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]

    scale = np.linalg.norm(r, axis=1) * np.linalg.norm(s, axis=1)
    parallel = np.abs(denom) <= 1e-14 * scale
    collinear = parallel & (np.abs(cross_qp_s) <= 1e-14 * scale)
    if np.any(collinear):
        for a, b in zip(ii[collinear], jj[collinear]):
            if _collinear_overlap(starts[a], ends[a], starts[b], ends[b]):
                raise TangentialCrossing(f"segments {a} and {b} overlap collinearly")

    valid = ~parallel
    t = np.where(valid, cross_qp_s / np.where(valid, denom, 1.0), -1.0)
    v = np.where(valid, cross_qp_r / np.where(valid, denom, 1.0), -1.0)
    hit = valid & (t >= -_PARAM_SLACK) & (t <= 1.0 + _PARAM_SLACK) \
        & (v >= -_PARAM_SLACK) & (v <= 1.0 + _PARAM_SLACK)
    points = starts[ii[hit]] + t[hit, None] * r[hit]
    return ii[hit], jj[hit], t[hit], v[hit], points


def _merge_hits(curve: PlaneCurve, ii, jj, t, v, points) -> list[Crossing]:
    """Collapse near-coincident hits into one Crossing each."""
    if len(ii) == 0:
        return []
    n = curve.n
    # Interiority score: hits nearest their segment midpoints represent a
    # merged cluster best.
    score = np.abs(t - 0.5) + np.abs(v - 0.5)
    order = np.argsort(score, kind="stable")
    merge_tol = 1e-9 * max(curve_length(curve), 1e-300)

    crossings: list[Crossing] = []
    kept_points: list[np.ndarray] = []
    for k in order:
        p = points[k]
        if any(np.hypot(*(p - q)) <= merge_tol for q in kept_points):
            continue
        kept_points.append(p)
        i = int(ii[k])
        j = int(jj[k])
        arc1 = _arc_indices(i, j, n)
        arc2 = _arc_indices(j, i, n)
        crossings.append(Crossing(segments=(i, j), point=p.copy(), split=(arc1, arc2)))
    crossings.sort(key=lambda c: c.segments)
    return crossings


def find_self_intersections(curve: PlaneCurve) -> list[Crossing]:
    """All transversal intersections of non-adjacent segments, each once.

    Raises TangentialCrossing when two segments overlap collinearly; such a
    configuration is flagged rather than resolved.
    """
    n = curve.n
    ii, jj = np.triu_indices(n, k=2)
    # Exclude the wrap-around adjacency (segment N-1 touches segment 0).
    keep = ~((ii == 0) & (jj == n - 1))
    hits = _candidate_hits(curve, ii[keep], jj[keep])
    return _merge_hits(curve, *hits)


def find_crossing_near(
    curve: PlaneCurve, seg_pair: tuple[int, int], window: int = 12
) -> Crossing | None:
    """Search for a single crossing near a previously known segment pair.

    Scans pairs within `window` segments of (i, j); returns None when that
    neighborhood holds no crossing (caller should fall back to a full scan).
    Much cheaper than the all-pairs search while a crossing drifts slowly.
    """
    n = curve.n
    i0, j0 = seg_pair
    a = (i0 + np.arange(-window, window + 1)) % n
    b = (j0 + np.arange(-window, window + 1)) % n
    ii, jj = np.meshgrid(a, b, indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    lo = np.minimum(ii, jj)
    hi = np.maximum(ii, jj)
    gap = np.minimum(hi - lo, n - (hi - lo))
    keep = gap >= 2
    hits = _candidate_hits(curve, lo[keep], hi[keep])
    merged = _merge_hits(curve, *hits)
    if not merged:
        return None
    if len(merged) == 1:
        return merged[0]
    prev = np.array(seg_pair, dtype=float)
    return min(merged, key=lambda c: np.abs(np.array(c.segments) - prev).sum())


def _collinear_overlap(p1, p2, q1, q2) -> bool:
    d = p2 - p1
    axis = int(np.argmax(np.abs(d)))
    a1, a2 = sorted((p1[axis], p2[axis]))
    b1, b2 = sorted((q1[axis], q2[axis]))
    return max(a1, b1) < min(a2, b2)


def loop_areas(curve: PlaneCurve, crossing: Crossing) -> tuple[float, float]:
    """Unsigned shoelace areas (A1, A2) of the two loops at the crossing.

    Each loop polygon is the crossing point followed by its arc's vertices.
    A1 + A2 is the total enclosed area; for a figure-eight the signed area is
    their difference, up to orientation.
    """
    arc1, arc2 = crossing.split
    merged = np.sort(np.concatenate([arc1, arc2]))
    if len(merged) != curve.n or np.any(merged != np.arange(curve.n)):
        raise InvalidSplit("crossing arcs do not partition the sample indices")
    poly1 = np.vstack([crossing.point, curve.points[arc1]])
    poly2 = np.vstack([crossing.point, curve.points[arc2]])
    return abs(shoelace_area(poly1)), abs(shoelace_area(poly2))


def loop_signed_areas(curve: PlaneCurve, crossing: Crossing) -> tuple[float, float]:
    """Signed shoelace areas of the two loops (orientation preserved)."""
    arc1, arc2 = crossing.split
    poly1 = np.vstack([crossing.point, curve.points[arc1]])
    poly2 = np.vstack([crossing.point, curve.points[arc2]])
    return shoelace_area(poly1), shoelace_area(poly2)


def crossing_interior_angle(curve: PlaneCurve, crossing: Crossing) -> float:
    """Interior angle of the loop wedge at the self-intersection, in (0, pi).

    The angle is measured between the ray leaving the crossing into one loop
    and the reversed ray along which that loop returns.  Two estimates are
    averaged: one from the intersecting segments themselves, one from chords
    twice as wide, which cancels the leading O(h) bias.
    """
    i, j = crossing.segments
    pts = curve.points
    n = curve.n

    def wedge(di, dj) -> float:
        di = di / np.linalg.norm(di)
        dj = dj / np.linalg.norm(dj)
        return float(np.arccos(np.clip(np.dot(di, -dj), -1.0, 1.0)))

    d_i = pts[(i + 1) % n] - pts[i]
    d_j = pts[(j + 1) % n] - pts[j]
    wide_i = pts[(i + 2) % n] - pts[(i - 1) % n]
    wide_j = pts[(j + 2) % n] - pts[(j - 1) % n]
    return 0.5 * (wedge(d_i, d_j) + wedge(wide_i, wide_j))
