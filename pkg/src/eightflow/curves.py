"""Discrete closed plane curves and their pointwise/integral geometry.

A curve is a periodic sequence of N samples (x_i, y_i) of an immersed closed
curve parametrized over u in [0, 2*pi), with uniform parameter step
du = 2*pi/N and index arithmetic mod N (no duplicated endpoint).

Parameter derivatives use 4th-order periodic central differences: robust to
the mild nonuniformity that develops between arclength remeshes, while
frequent remeshing keeps the effective accuracy high.  Signed curvature is

    kappa = (x_u * y_uu - y_u * x_uu) / (x_u^2 + y_u^2)^(3/2),

positive where the curve bends toward the left normal (-y_u, x_u).

Periodic quadratures (signed area, total turning) are plain sums times du,
i.e. the trapezoidal rule on a uniform periodic grid.  This makes several
discrete identities exact by construction; see the contact module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import AllFlat, DegenerateTangent, InvalidCurve

TWO_PI = 2.0 * np.pi

# Discrete tangents shorter than sqrt(1e-24) cannot be normalized reliably.
_TANGENT_FLOOR = 1e-24


@dataclass(frozen=True, eq=False)
class PlaneCurve:
    """Immersed closed plane curve sampled at N >= 16 points.

    The sample array is copied and frozen at construction; all operations on
    curves are pure functions, so curve values are safe to share across
    threads.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise InvalidCurve(f"expected an (N, 2) point array, got shape {pts.shape}")
        n = pts.shape[0]
        if n < 16:
            raise InvalidCurve(f"need at least 16 samples, got {n}")
        if not np.all(np.isfinite(pts)):
            raise InvalidCurve("curve samples must be finite")
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        total = float(seg.sum())
        if total <= 0.0 or seg.min() <= 1e-12 * total:
            raise InvalidCurve(
                "immersion violated: shortest segment "
                f"{seg.min():.3e} vs length {total:.3e}"
            )
        pts.flags.writeable = False
        seg.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_seg_lengths", seg)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def du(self) -> float:
        return TWO_PI / self.n

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]

    @property
    def u(self) -> np.ndarray:
        return np.arange(self.n) * self.du


def _diff1(values: np.ndarray, du: float) -> np.ndarray:
    """4th-order periodic central first derivative along axis 0."""
    p1 = np.roll(values, -1, axis=0)
    p2 = np.roll(values, -2, axis=0)
    m1 = np.roll(values, 1, axis=0)
    m2 = np.roll(values, 2, axis=0)
    return (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * du)


def _diff2(values: np.ndarray, du: float) -> np.ndarray:
    """4th-order periodic central second derivative along axis 0."""
    p1 = np.roll(values, -1, axis=0)
    p2 = np.roll(values, -2, axis=0)
    m1 = np.roll(values, 1, axis=0)
    m2 = np.roll(values, 2, axis=0)
    return (-p2 + 16.0 * p1 - 30.0 * values + 16.0 * m1 - m2) / (12.0 * du * du)


def _diff12(values: np.ndarray, du: float) -> tuple[np.ndarray, np.ndarray]:
    """First and second 4th-order periodic derivatives, sharing the shifts."""
    p1 = np.roll(values, -1, axis=0)
    p2 = np.roll(values, -2, axis=0)
    m1 = np.roll(values, 1, axis=0)
    m2 = np.roll(values, 2, axis=0)
    d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * du)
    d2 = (-p2 + 16.0 * p1 - 30.0 * values + 16.0 * m1 - m2) / (12.0 * du * du)
    return d1, d2


def derivatives(curve: PlaneCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (x_u, y_u, x_uu, y_uu) at every sample."""
    d1, d2 = _diff12(curve.points, curve.du)
    return d1[:, 0], d1[:, 1], d2[:, 0], d2[:, 1]


def speed_squared(curve: PlaneCurve) -> np.ndarray:
    """x_u^2 + y_u^2; raises DegenerateTangent if any sample is unusable."""
    x_u, y_u, _, _ = derivatives(curve)
    g2 = x_u * x_u + y_u * y_u
    if np.any(g2 < _TANGENT_FLOOR):
        raise DegenerateTangent(f"parameter speed collapsed to {g2.min():.3e}")
    return g2


def curvature(curve: PlaneCurve) -> np.ndarray:
    """Signed curvature at every sample; orientation-equivariant."""
    x_u, y_u, x_uu, y_uu = derivatives(curve)
    g2 = x_u * x_u + y_u * y_u
    if np.any(g2 < _TANGENT_FLOOR):
        raise DegenerateTangent(f"parameter speed collapsed to {g2.min():.3e}")
    return (x_u * y_uu - y_u * x_uu) / g2 ** 1.5


def segment_lengths(curve: PlaneCurve) -> np.ndarray:
    """Length of segment i -> i+1 (mod N) for every i (cached at construction)."""
    return curve._seg_lengths


def curve_length(curve: PlaneCurve) -> float:
    """Polygonal length of the closed curve."""
    return float(segment_lengths(curve).sum())


def signed_area(curve: PlaneCurve) -> float:
    """Enclosed signed area as the periodic quadrature of -y * x_u du.

    Agrees with the shoelace sum over samples to quadrature accuracy; the
    quadrature form is kept because the contact lift integrates exactly the
    same sum, making its periodicity defect identically -signed_area.
    """
    x_u = _diff1(curve.points[:, 0], curve.du)
    return float(-(curve.y * x_u).sum() * curve.du)


def shoelace_area(points: np.ndarray) -> float:
    """Signed polygon area of an (N, 2) closed vertex loop."""
    x = points[:, 0]
    y = points[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    return float(0.5 * np.sum(x * yn - xn * y))


def total_curvature(curve: PlaneCurve) -> float:
    """Integral of kappa ds; equals 2*pi*(turning number) up to quadrature error."""
    kappa = curvature(curve)
    g = np.sqrt(speed_squared(curve))
    return float((kappa * g).sum() * curve.du)


def tangent_angle(curve: PlaneCurve) -> np.ndarray:
    """Unwrapped tangent angle at samples 0..N, inclusive of the wrap-around.

    Entry i is atan2(y_u, x_u) at sample i, continued so consecutive jumps
    stay below pi; entry N closes the loop, so theta[N] - theta[0] is the
    total discrete turning (2*pi times the turning number).
    """
    x_u, y_u, _, _ = derivatives(curve)
    g2 = x_u * x_u + y_u * y_u
    if np.any(g2 < _TANGENT_FLOOR):
        raise DegenerateTangent(f"parameter speed collapsed to {g2.min():.3e}")
    raw = np.arctan2(y_u, x_u)
    jumps = np.diff(np.concatenate([raw, raw[:1]]))
    jumps = (jumps + np.pi) % TWO_PI - np.pi
    theta = np.empty(curve.n + 1)
    theta[0] = raw[0]
    np.cumsum(jumps, out=theta[1:])
    theta[1:] += raw[0]
    return theta


def osc_theta(curve: PlaneCurve) -> float:
    """Oscillation (max - min) of the unwrapped tangent angle."""
    theta = tangent_angle(curve)
    return float(theta.max() - theta.min())


def x_extent(curve: PlaneCurve) -> float:
    """Length of the projection onto the x-axis: max x - min x."""
    return float(curve.x.max() - curve.x.min())


def y_extent(curve: PlaneCurve) -> float:
    """Length of the projection onto the y-axis: max y - min y."""
    return float(curve.y.max() - curve.y.min())


def diameter(curve: PlaneCurve) -> float:
    """Maximum pairwise distance between samples."""
    pts = curve.points
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def inflection_count(curve: PlaneCurve, tol: float | None = None) -> int:
    """Number of sign changes of kappa around the periodic sample sequence.

    Samples with |kappa| < tol are transparent: the sign is carried across
    them, so flat plateaus produced by the discretization do not create
    spurious inflections.  Default tol is 1e-6 * max|kappa|.
    """
    kappa = curvature(curve)
    if tol is None:
        tol = 1e-6 * float(np.abs(kappa).max())
    opaque = np.abs(kappa) >= tol
    if not np.any(opaque):
        raise AllFlat(f"all {curve.n} curvature samples below threshold {tol:.3e}")
    signs = np.sign(kappa[opaque])
    return int(np.count_nonzero(signs != np.roll(signs, 1)))


def resample_arclength(curve: PlaneCurve, n_out: int | None = None) -> PlaneCurve:
    """Redistribute samples uniformly in arclength; node 0 stays put.

    Tangential redistribution does not change the image of the curve, so the
    flow engines may remesh freely.  Interpolation is a periodic cubic spline
    in cumulative chord length, giving O(h^4) placement error per call.  On
    coarse meshes one pass leaves an O((kappa h)^2) spread between chord and
    arc spacing, so the redistribution is repeated (at most three passes)
    until the segment-length spread falls below 0.5%.
    """
    if n_out is None:
        n_out = curve.n
    if n_out < 16:
        raise InvalidCurve(f"need at least 16 output samples, got {n_out}")
    out = curve
    for _ in range(3):
        seg = segment_lengths(out)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        closed = np.vstack([out.points, out.points[:1]])
        spline = CubicSpline(s, closed, axis=0, bc_type="periodic")
        targets = s[-1] * np.arange(n_out) / n_out
        out = PlaneCurve(spline(targets))
        seg = segment_lengths(out)
        if (seg.max() - seg.min()) / seg.mean() <= 0.005:
            break
    return out


def reverse(curve: PlaneCurve) -> PlaneCurve:
    """Opposite orientation; sample 0 is kept first."""
    return PlaneCurve(np.roll(curve.points[::-1], 1, axis=0))


def translate(curve: PlaneCurve, offset) -> PlaneCurve:
    return PlaneCurve(curve.points + np.asarray(offset, dtype=float))


def rotate(curve: PlaneCurve, angle: float) -> PlaneCurve:
    c, s = np.cos(angle), np.sin(angle)
    rot = np.array([[c, -s], [s, c]])
    return PlaneCurve(curve.points @ rot.T)


def scale(curve: PlaneCurve, factor: float) -> PlaneCurve:
    if factor <= 0:
        raise InvalidCurve("scale factor must be positive")
    return PlaneCurve(curve.points * factor)


# ---------------------------------------------------------------------------
# Serialization: CSV with header u,x,y, or JSON {"n": N, "points": [[x,y],..]}.
# Values are written with 17 significant digits so round trips are lossless
# well beyond the required 15.

def curve_to_csv(curve: PlaneCurve, path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write("u,x,y\n")
        for u, (x, y) in zip(curve.u, curve.points):
            fh.write(f"{u:.17g},{x:.17g},{y:.17g}\n")


def curve_from_csv(path: str | Path) -> PlaneCurve:
    with open(path) as fh:
        header = fh.readline().strip()
        if header.split(",")[:3] != ["u", "x", "y"]:
            raise InvalidCurve(f"unexpected curve CSV header: {header!r}")
        rows = [line.split(",") for line in fh if line.strip()]
    pts = np.array([[float(r[1]), float(r[2])] for r in rows])
    return PlaneCurve(pts)


def curve_to_json(curve: PlaneCurve, path: str | Path) -> None:
    payload = {"n": curve.n, "points": [[x, y] for x, y in curve.points]}
    with open(path, "w") as fh:
        json.dump(payload, fh)


def curve_from_json(path: str | Path) -> PlaneCurve:
    with open(path) as fh:
        payload = json.load(fh)
    pts = np.asarray(payload["points"], dtype=float)
    if payload.get("n") not in (None, len(pts)):
        raise InvalidCurve("JSON field 'n' disagrees with the point count")
    return PlaneCurve(pts)
