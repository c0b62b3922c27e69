"""Closed-form comparison solutions and maximum-principle containment checks.

The scaled grim reaper is the leftward-opening, leftward-translating graph

    G(y, t) = -2 C0 tau0 log cos(1/2)
              + 2 C0 tau0 log cos(y / (2 C0 tau0))
              - (t + tau0/2) / (2 C0 tau0),

defined for |y| < pi C0 tau0, an exact solution of curve shortening flow
translating with horizontal speed -1/(2 C0 tau0).  A curve inside the region
{x <= G(y, -tau0/2)} stays inside for later times by the avoidance
principle; running the comparison over [-tau0/2, 0] pushes the barrier left
by 1/(4 C0) + 2 C0 tau0 log cos(1/2) relative to its initial rightmost
reach (positive only when tau0 is small against 1/C0^2).

Orientation convention: leftward = decreasing x.  Callers translate and
reflect their curve so its rightmost points sit at x = 0, matching the
rectangle (-inf, 0] x [-C0 tau0, C0 tau0].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import PlaneCurve
from .errors import Extinct, InvalidCurve, NotInsideReaper, OutOfDomain
from .flow import Trajectory

_LOG_COS_HALF = float(np.log(np.cos(0.5)))  # -0.13058...


@dataclass(frozen=True)
class GrimReaper:
    """Width/time-scale parameters of the scaled translating comparison graph."""

    c0: float
    tau0: float

    def __post_init__(self):
        if self.c0 <= 0 or self.tau0 <= 0:
            raise InvalidCurve("grim reaper parameters must be positive")

    @property
    def half_width(self) -> float:
        """Half-height pi*C0*tau0 of the open domain in y."""
        return np.pi * self.c0 * self.tau0

    @property
    def speed(self) -> float:
        """Horizontal translation speed (leftward): 1 / (2 C0 tau0)."""
        return 1.0 / (2.0 * self.c0 * self.tau0)


def reaper_value(reaper: GrimReaper, y, t: float):
    """Evaluate G(y, t); raises OutOfDomain beyond the cosine window."""
    y = np.asarray(y, dtype=float)
    scale = 2.0 * reaper.c0 * reaper.tau0
    if np.any(np.abs(y) >= 0.5 * np.pi * scale):
        raise OutOfDomain(
            f"|y| must stay below pi*C0*tau0 = {0.5 * np.pi * scale:.6g}"
        )
    value = (
        -scale * _LOG_COS_HALF
        + scale * np.log(np.cos(y / scale))
        - (t + 0.5 * reaper.tau0) / scale
    )
    return value if value.ndim else float(value)


def push_distance(c0: float, tau0: float) -> float:
    """Leftward barrier displacement over [-tau0/2, 0]:

        1/(4 C0) + 2 C0 tau0 log cos(1/2),

    positive iff tau0 < 1 / (8 C0^2 |log cos(1/2)|); the signed value is
    returned either way and interpretation is left to the caller.
    """
    if c0 <= 0 or tau0 <= 0:
        raise InvalidCurve("grim reaper parameters must be positive")
    return 1.0 / (4.0 * c0) + 2.0 * c0 * tau0 * _LOG_COS_HALF


def rectangle_containment(curve: PlaneCurve, c0: float, tau0: float) -> bool:
    """Is every sample inside the closed rectangle (-inf, 0] x [-C0 tau0, C0 tau0]?

    The caller is responsible for translating the curve so its rightmost
    points have x = 0; boundary samples count as contained.
    """
    half = c0 * tau0
    return bool(np.all(curve.x <= 0.0) and np.all(np.abs(curve.y) <= half))


def reaper_margins(curve: PlaneCurve, reaper: GrimReaper, t: float) -> float:
    """min over samples of G(y_i, t) - x_i; -inf if a sample leaves G's domain."""
    y = curve.y
    if np.any(np.abs(y) >= reaper.half_width):
        return float("-inf")
    return float(np.min(reaper_value(reaper, y, t) - curve.x))


def reaper_barrier_check(
    traj: Trajectory, reaper: GrimReaper, t_offset: float
) -> np.ndarray:
    """Per-snapshot barrier margins min_i (G(y_i, t - t_offset) - x_i).

    The reaper clock runs as t_reaper = t_flow - t_offset, so a comparison
    over the window [-tau0/2, 0] uses t_offset = t_start + tau0/2.  The
    initial snapshot must sit strictly inside the reaper region; afterwards
    a nonpositive margin is a reported finding, not an error.
    """
    margins = np.array([
        reaper_margins(state.curve, reaper, state.t - t_offset)
        for state in traj.states
    ])
    if not margins[0] > 0.0:
        raise NotInsideReaper(
            f"initial margin {margins[0]:.6g} is not strictly positive"
        )
    return margins


def shrinking_circle(r0: float, t: float) -> float:
    """Radius sqrt(r0^2 - 2t) of the exact shrinking-circle solution."""
    if r0 <= 0:
        raise InvalidCurve("initial radius must be positive")
    if t >= 0.5 * r0 * r0:
        raise Extinct(f"circle of radius {r0} is extinct at t = {0.5 * r0 * r0:.6g}")
    return float(np.sqrt(r0 * r0 - 2.0 * t))


@dataclass(frozen=True)
class BarrierComparison:
    """Outcome of a matched grim-reaper comparison over half the remaining time."""

    reaper: GrimReaper
    t_offset: float
    times: np.ndarray
    margins: np.ndarray
    push: float
    final_rightmost_x: float
    initial_contained: bool


def matched_barrier_comparison(
    traj: Trajectory, t_max_estimate: float
) -> BarrierComparison:
    """Run the matched-parameter barrier comparison against a trajectory.

    With ell the x-projection length and tau the remaining time at the first
    snapshot, the matched reaper has C0 = 8 pi / ell and tau0 = tau; its
    rectangle has half-height 8 pi tau / ell, which bounds the loop height
    of an area-collapsing figure-eight.  The whole trajectory is translated
    so the initial rightmost point sits at x = 0, the reaper clock starts at
    -tau0/2, and margins are collected over the snapshots of the following
    tau0/2 of flow time.
    """
    from .curves import translate, x_extent  # local import avoids a cycle

    t_first = float(traj.times[0])
    tau0 = t_max_estimate - t_first
    if tau0 <= 0:
        raise InvalidCurve("extinction estimate precedes the first snapshot")
    ell = x_extent(traj.states[0].curve)
    reaper = GrimReaper(c0=8.0 * np.pi / ell, tau0=tau0)
    shift = -float(traj.states[0].curve.x.max())

    t_stop = t_first + 0.5 * tau0
    t_offset = t_first + 0.5 * tau0
    states = [s for s in traj.states if s.t <= t_stop + 1e-12]
    curves = [translate(s.curve, (shift, 0.0)) for s in states]
    times = np.array([s.t for s in states])

    contained = rectangle_containment(curves[0], reaper.c0, reaper.tau0)
    margins = np.array([
        reaper_margins(c, reaper, t - t_offset) for c, t in zip(curves, times)
    ])
    if not margins[0] > 0.0:
        raise NotInsideReaper(
            f"initial margin {margins[0]:.6g} is not strictly positive"
        )
    return BarrierComparison(
        reaper=reaper,
        t_offset=t_offset,
        times=times,
        margins=margins,
        push=push_distance(reaper.c0, reaper.tau0),
        final_rightmost_x=float(curves[-1].x.max()),
        initial_contained=contained,
    )
