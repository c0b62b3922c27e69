"""Per-snapshot scalar observables recorded along a flow trajectory."""

from __future__ import annotations

from dataclasses import dataclass

from . import crossings as cx
from . import curves as cv


@dataclass(frozen=True)
class DiagnosticsRecord:
    """Scalar observables of one snapshot.

    area_total is the sum of unsigned loop areas for a curve with exactly one
    self-intersection, |signed area| otherwise.  loop_a1/loop_a2 and
    crossing_point are NaN/None when the curve has no crossing.
    isoperimetric_q is L^2 / area_total.
    """

    t: float
    length: float
    area_signed: float
    area_total: float
    loop_a1: float
    loop_a2: float
    total_curvature: float
    osc_theta: float
    inflections: int
    crossing_count: int
    crossing_point: tuple[float, float] | None
    x_extent: float
    isoperimetric_q: float

    CSV_COLUMNS = (
        "t,L,A_signed,A_total,total_curvature,osc_theta,"
        "inflections,crossings,ell,Q"
    )

    def csv_row(self) -> str:
        vals = (
            self.t, self.length, self.area_signed, self.area_total,
            self.total_curvature, self.osc_theta,
        )
        head = ",".join(f"{v:.17g}" for v in vals)
        tail = f"{self.x_extent:.17g},{self.isoperimetric_q:.17g}"
        return f"{head},{self.inflections},{self.crossing_count},{tail}"


def compute_record(curve: cv.PlaneCurve, t: float) -> DiagnosticsRecord:
    length = cv.curve_length(curve)
    a_signed = cv.signed_area(curve)
    found = cx.find_self_intersections(curve)
    if len(found) == 1:
        a1, a2 = cx.loop_areas(curve, found[0])
        area_total = a1 + a2
        point = (float(found[0].point[0]), float(found[0].point[1]))
    else:
        # Multi-crossing decompositions are out of scope; fall back to the
        # signed area so the record stays well-defined.
        a1 = a2 = float("nan")
        area_total = abs(a_signed)
        point = None if not found else (
            float(found[0].point[0]), float(found[0].point[1])
        )
    q = length**2 / area_total if area_total > 0 else float("inf")
    return DiagnosticsRecord(
        t=t,
        length=length,
        area_signed=a_signed,
        area_total=area_total,
        loop_a1=a1,
        loop_a2=a2,
        total_curvature=cv.total_curvature(curve),
        osc_theta=cv.osc_theta(curve),
        inflections=cv.inflection_count(curve),
        crossing_count=len(found),
        crossing_point=point,
        x_extent=cv.x_extent(curve),
        isoperimetric_q=q,
    )


def theta_min(curve: cv.PlaneCurve) -> float:
    """Minimum of the unwrapped tangent angle.

    Comparable across snapshots of one trajectory as long as the tangent
    direction at node 0 evolves continuously (true for the flow engines,
    which keep node 0 materially anchored).
    """
    return float(cv.tangent_angle(curve).min())
