"""Self-intersection detection against a brute-force oracle, loop areas."""

import numpy as np
import pytest

from eightflow.crossings import (
    Crossing,
    crossing_interior_angle,
    find_self_intersections,
    loop_areas,
    loop_signed_areas,
)
from eightflow.curves import PlaneCurve, signed_area
from eightflow.errors import InvalidSplit, TangentialCrossing
from eightflow.shapes import make_bernoulli_lemniscate, make_circle


def brute_force_crossing_points(curve, slack=1e-9, merge_tol=None):
    """Independent O(N^2) oracle: solve each segment pair as a 2x2 system."""
    pts = curve.points
    n = len(pts)
    if merge_tol is None:
        seg = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        merge_tol = 1e-9 * seg.sum()
    hits = []
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            a0, a1 = pts[i], pts[(i + 1) % n]
            b0, b1 = pts[j], pts[(j + 1) % n]
            mat = np.column_stack([a1 - a0, b0 - b1])
            if abs(np.linalg.det(mat)) < 1e-14:
                continue
            t, v = np.linalg.solve(mat, b0 - a0)
            if -slack <= t <= 1 + slack and -slack <= v <= 1 + slack:
                hits.append(a0 + t * (a1 - a0))
    merged = []
    for p in hits:
        if not any(np.hypot(*(p - q)) <= merge_tol for q in merged):
            merged.append(p)
    return merged


class TestFinder:
    def test_circle_embedded(self):
        assert find_self_intersections(make_circle(1.0, 256)) == []

    def test_lemniscate_single_origin_crossing(self):
        for n in (64, 128, 256, 500):
            found = find_self_intersections(make_bernoulli_lemniscate(1.0, n))
            assert len(found) == 1
            assert np.hypot(*found[0].point) < 1e-6

    def test_crossing_point_lies_on_both_segments(self):
        from eightflow.curves import curve_length

        def dist_to_segment(p, a, b):
            d = b - a
            t = np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0)
            return float(np.linalg.norm(p - (a + t * d)))

        curve = make_bernoulli_lemniscate(1.0, 256)
        crossing = find_self_intersections(curve)[0]
        tol = 1e-10 * curve_length(curve)
        for seg in crossing.segments:
            a = curve.points[seg]
            b = curve.points[(seg + 1) % curve.n]
            assert dist_to_segment(crossing.point, a, b) < tol

    def test_split_partitions_indices(self):
        curve = make_bernoulli_lemniscate(1.0, 128)
        crossing = find_self_intersections(curve)[0]
        merged = np.sort(np.concatenate(crossing.split))
        assert np.array_equal(merged, np.arange(128))

    def test_hand_built_bowtie_matches_oracle(self):
        # Bowtie quadrilateral, densified to satisfy the sample-count floor.
        corners = np.array([[0.0, 0.0], [2.0, 1.0], [2.0, 0.0], [0.0, 1.0]])
        pts = []
        for k in range(4):
            a, b = corners[k], corners[(k + 1) % 4]
            for s in np.linspace(0, 1, 5, endpoint=False):
                pts.append(a + s * (b - a))
        curve = PlaneCurve(np.array(pts))
        found = find_self_intersections(curve)
        oracle = brute_force_crossing_points(curve)
        assert len(found) == len(oracle) == 1
        assert np.hypot(*(found[0].point - oracle[0])) < 1e-12

    def test_oracle_agreement_random_curves(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n = int(rng.integers(64, 129))
            u = 2 * np.pi * np.arange(n) / n
            x = np.cos(u) + rng.uniform(-0.6, 0.6) * np.cos(2 * u) \
                + rng.uniform(-0.3, 0.3) * np.sin(3 * u)
            y = np.sin(u) + rng.uniform(-0.6, 0.6) * np.sin(2 * u) \
                + rng.uniform(-0.3, 0.3) * np.cos(3 * u)
            try:
                curve = PlaneCurve(np.column_stack([x, y]))
            except Exception:
                continue
            found = find_self_intersections(curve)
            oracle = brute_force_crossing_points(curve)
            assert len(found) == len(oracle)
            for c in found:
                assert min(np.hypot(*(c.point - q)) for q in oracle) < 1e-9

    def test_tangential_overlap_flagged(self):
        # Out, pause on a spike, and retrace along the same line segment.
        pts = [(0.0, 0.0), (4.0, 0.0), (4.0, 1.0), (3.0, 1.0), (3.0, 0.0),
               (1.0, 0.0), (1.0, 2.0), (0.5, 2.5), (0.0, 2.0)]
        dense = []
        for k in range(len(pts)):
            a = np.array(pts[k])
            b = np.array(pts[(k + 1) % len(pts)])
            for s in np.linspace(0, 1, 3, endpoint=False):
                dense.append(a + s * (b - a))
        curve = PlaneCurve(np.array(dense))
        with pytest.raises(TangentialCrossing):
            find_self_intersections(curve)


class TestLoops:
    def test_lemniscate_loops_equal(self):
        curve = make_bernoulli_lemniscate(1.0, 256)
        crossing = find_self_intersections(curve)[0]
        a1, a2 = loop_areas(curve, crossing)
        assert abs(a1 - a2) < 1e-8

    def test_total_area_matches_scale(self):
        # Enclosed area of the width-2a lemniscate is a^2 (high-N quadrature
        # oracle: 0.9999984876678 at a=1, N=4096).
        curve = make_bernoulli_lemniscate(1.0, 4096)
        crossing = find_self_intersections(curve)[0]
        a1, a2 = loop_areas(curve, crossing)
        assert abs((a1 + a2) - 1.0) < 2e-6
        curve = make_bernoulli_lemniscate(2.0, 4096)
        crossing = find_self_intersections(curve)[0]
        a1, a2 = loop_areas(curve, crossing)
        assert abs((a1 + a2) - 4.0) < 8e-6

    def test_invalid_split_rejected(self):
        curve = make_circle(1.0, 64)
        bogus = Crossing(
            segments=(0, 5),
            point=np.array([0.0, 0.0]),
            split=(np.arange(1, 6), np.arange(6, 20)),
        )
        with pytest.raises(InvalidSplit):
            loop_areas(curve, bogus)

    def test_signed_loop_areas_sum_to_signed_area(self):
        curve = make_bernoulli_lemniscate(1.0, 256)
        crossing = find_self_intersections(curve)[0]
        s1, s2 = loop_signed_areas(curve, crossing)
        assert abs((s1 + s2) - signed_area(curve)) < 1e-8 * 5.25**2


class TestInteriorAngle:
    def test_lemniscate_right_angle(self):
        curve = make_bernoulli_lemniscate(1.0, 256)
        crossing = find_self_intersections(curve)[0]
        assert abs(crossing_interior_angle(curve, crossing) - np.pi / 2) < 1e-2

    def test_gerono_eight_analytic_angle(self):
        # Gerono-style eight x = cos u, y = rho sin u cos u crosses itself at
        # the origin with branch tangents (-1, -rho) and (1, -rho); choosing
        # rho = tan(pi/6) makes the interior angle exactly pi/3.
        rho = np.tan(np.pi / 6)
        u = 2 * np.pi * np.arange(256) / 256
        curve = PlaneCurve(np.column_stack([np.cos(u), rho * np.sin(u) * np.cos(u)]))
        crossing = find_self_intersections(curve)[0]
        angle = crossing_interior_angle(curve, crossing)
        assert abs(angle - np.pi / 3) < 1e-3
