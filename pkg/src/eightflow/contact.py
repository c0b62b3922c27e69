"""Legendrian curves in contact R^3 and lifts of planar flows.

The ambient structure is the standard contact form eta = dz - y dx with
Reeb field xi = d/dz and metric g = dx^2 + dy^2 + eta^2.  The vector fields
X = d/dx + y d/dz, Y = d/dy, Z = d/dz are g-orthonormal.  A closed curve
(x(u), y(u), z(u)) is Legendrian when z_u - y x_u = 0, in which case
{T, N, xi} with

    T = (x_u X + y_u Y) / g_u,    N = (-y_u X + x_u Y) / g_u,

g_u = sqrt(x_u^2 + y_u^2), is an orthonormal frame along the curve.

Discretization convention: heights are transported by the trapezoidal rule,
z_{i+1} = z_i + du * (w_i + w_{i+1}) / 2 with w = y * x_u, and the
Legendrian residual is measured against exactly that transport,

    residual_i = (z_{i+1} - z_i) / du - (w_i + w_{i+1}) / 2,

so a lifted curve is Legendrian to round-off by construction, genuine
violations stand out at full size, and the periodicity defect of the lift
is identically the discrete signed area of the projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import curves as cv
from .errors import InvalidCurve, NotBalanced
from .flow import FlowState, Trajectory, csf_velocity

_BALANCE_AREA_TOL = 1e-6      # |A_signed| < tol * L^2 for lifting
_BALANCE_TURNING_TOL = 1e-3   # |integral of kappa ds| < tol for angle functions


@dataclass(frozen=True, eq=False)
class SpaceCurve:
    """Closed curve in R^3 whose planar projection is immersed.

    Carries no Legendrian guarantee by itself: `legendrian_residual` measures
    the violation, `lift` constructs curves satisfying it to round-off.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=float))
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise InvalidCurve(f"expected an (N, 3) point array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidCurve("curve samples must be finite")
        cv.PlaneCurve(pts[:, :2])  # validates the projection invariants
        pts.flags.writeable = False
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def du(self) -> float:
        return 2.0 * np.pi / self.n

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 2]


def project(curve: SpaceCurve) -> cv.PlaneCurve:
    """Drop the z coordinate; no Legendrian condition is used or checked."""
    return cv.PlaneCurve(curve.points[:, :2])


def _height_increments(plane: cv.PlaneCurve) -> np.ndarray:
    """Trapezoidal increments of integral(y x_u du) per segment."""
    x_u = cv._diff1(plane.points[:, 0], plane.du)
    w = plane.y * x_u
    return 0.5 * plane.du * (w + np.roll(w, -1))


def legendrian_residual_profile(curve: SpaceCurve) -> np.ndarray:
    """Per-segment violation of z_u = y x_u against the trapezoidal transport.

    Entry i compares the height increment across segment i -> i+1 (mod N)
    with the transport of y x_u; for a smooth non-Legendrian curve it
    approximates |z_u - y x_u| at the segment midpoint.  The wrap-around
    entry sees any overall non-periodicity of z.
    """
    plane = project(curve)
    inc = _height_increments(plane)
    dz = np.roll(curve.z, -1) - curve.z
    return np.abs(dz - inc) / curve.du


def legendrian_residual(curve: SpaceCurve) -> float:
    """Max violation of z_u = y x_u against the trapezoidal transport.

    Zero (to round-off) exactly for curves produced by `lift`; for a curve
    that is not Legendrian the value approximates max|z_u - y x_u|.
    """
    return float(legendrian_residual_profile(curve).max())


def lift_defect(plane: cv.PlaneCurve) -> float:
    """Holonomy of the height transport around the curve: equals the
    discrete quadrature of integral(y x_u du) = -signed_area exactly."""
    return float(_height_increments(plane).sum())


def lift(
    plane: cv.PlaneCurve, z_base: float = 0.0, *, require_balanced: bool = True
) -> SpaceCurve:
    """Lift a balanced plane curve to a closed Legendrian curve.

    z is the cumulative trapezoidal transport of y x_u starting from z_base
    at node 0.  The wrap-around periodicity defect equals -signed_area, so
    the lift closes up only for balanced curves; `require_balanced=False`
    skips that precondition (the returned curve then carries the defect in
    its final segment).
    """
    area = cv.signed_area(plane)
    length = cv.curve_length(plane)
    if require_balanced and abs(area) >= _BALANCE_AREA_TOL * length**2:
        raise NotBalanced(
            f"signed area {area:.6g} exceeds {_BALANCE_AREA_TOL:g} * L^2", area
        )
    inc = _height_increments(plane)
    z = z_base + np.concatenate([[0.0], np.cumsum(inc[:-1])])
    return SpaceCurve(np.column_stack([plane.points, z]))


def lift_trajectory(traj: Trajectory, z_base: float = 0.0) -> list[SpaceCurve]:
    """Lift every snapshot with the same base height z(t, 0) = z_base.

    At snapshot resolution this is the normalized Legendrian flow over the
    planar trajectory.  Raises NotBalanced naming the offending time if a
    snapshot fails the balance precondition.
    """
    lifted = []
    for state in traj.states:
        try:
            lifted.append(lift(state.curve, z_base))
        except NotBalanced as exc:
            raise NotBalanced(f"snapshot at t = {state.t:.6g}: {exc}", exc.value) from None
    return lifted


def legendrian_angle(state: FlowState) -> np.ndarray:
    """Reeb-direction speed lambda of the lifted flow at each sample.

        lambda(u) = -y(0) x_t(0) + integral_0^u kappa g du,

    where x_t(0) is the horizontal flow velocity at node 0.  Single-valued
    only for balanced curves (total turning zero); the cumulative quadrature
    reuses the turning quadrature, so the periodicity defect of lambda is
    identically the discrete total curvature.
    """
    curve = state.curve
    turning = cv.total_curvature(curve)
    if abs(turning) > _BALANCE_TURNING_TOL:
        raise NotBalanced(
            f"total turning {turning:.6g} exceeds {_BALANCE_TURNING_TOL:g}", turning
        )
    kappa = cv.curvature(curve)
    g = np.sqrt(cv.speed_squared(curve))
    w = kappa * g
    # Trapezoidal cumulative sum, matching the height-transport quadrature.
    increments = 0.5 * curve.du * (w + np.roll(w, -1))
    cum = np.concatenate([[0.0], np.cumsum(increments[:-1])])
    x_t0 = csf_velocity(curve)[0, 0]
    return -curve.y[0] * x_t0 + cum


def contact_frame(curve: SpaceCurve) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(T, N, xi) along the curve, in coordinate components (N, 3) each.

    For a Legendrian curve the triple is g-orthonormal with eta(T) = 0; the
    z-components encode the contact twisting (X = d/dx + y d/dz).
    """
    plane = project(curve)
    x_u, y_u, _, _ = cv.derivatives(plane)
    g = np.sqrt(cv.speed_squared(plane))
    y = plane.y
    tangent = np.column_stack([x_u / g, y_u / g, y * x_u / g])
    normal = np.column_stack([-y_u / g, x_u / g, -y * y_u / g])
    reeb = np.zeros_like(tangent)
    reeb[:, 2] = 1.0
    return tangent, normal, reeb


def contact_gram(curve: SpaceCurve) -> np.ndarray:
    """(N, 3, 3) Gram matrices of {T, N, xi} under g = dx^2 + dy^2 + eta^2."""
    frame = np.stack(contact_frame(curve), axis=1)  # (N, 3 vectors, 3 comps)
    y = curve.points[:, 1]
    eta = frame[:, :, 2] - y[:, None] * frame[:, :, 0]
    gram = (
        np.einsum("nia,nja->nij", frame[:, :, :2], frame[:, :, :2])
        + np.einsum("ni,nj->nij", eta, eta)
    )
    return gram


def legendrian_variation(
    curve: SpaceCurve,
    f: np.ndarray,
    dt: float,
    *,
    omit_normal_term: bool = False,
) -> SpaceCurve:
    """One explicit Euler step of the Legendrian deformation

        d(gamma)/dt = (f_u / g) N + f xi,

    whose normal coefficient f_u/g is exactly what keeps the motion tangent
    to the space of Legendrian curves: the residual after one step is
    O(dt^2).  With omit_normal_term=True the N term is dropped and the
    residual degrades to O(dt), which quantifies why the coefficient is
    forced.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != (curve.n,):
        raise InvalidCurve(f"scalar field shape {f.shape} != ({curve.n},)")
    plane = project(curve)
    x_u, y_u, _, _ = cv.derivatives(plane)
    g = np.sqrt(cv.speed_squared(plane))
    phi = np.zeros_like(f) if omit_normal_term else cv._diff1(f, curve.du) / g
    y = plane.y
    velocity = np.column_stack([
        -phi * y_u / g,
        phi * x_u / g,
        f - phi * y * y_u / g,
    ])
    return SpaceCurve(curve.points + dt * velocity)


# 3D curve serialization: CSV with header u,x,y,z.

def space_curve_to_csv(curve: SpaceCurve, path) -> None:
    u = np.arange(curve.n) * curve.du
    with open(path, "w") as fh:
        fh.write("u,x,y,z\n")
        for ui, (x, y, z) in zip(u, curve.points):
            fh.write(f"{ui:.17g},{x:.17g},{y:.17g},{z:.17g}\n")


def space_curve_from_csv(path) -> SpaceCurve:
    with open(path) as fh:
        header = fh.readline().strip()
        if header.split(",")[:4] != ["u", "x", "y", "z"]:
            raise InvalidCurve(f"unexpected 3D curve CSV header: {header!r}")
        rows = [line.split(",") for line in fh if line.strip()]
    pts = np.array([[float(r[1]), float(r[2]), float(r[3])] for r in rows])
    return SpaceCurve(pts)
