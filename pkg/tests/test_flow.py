"""Flow engine: exact-solution regressions, conservation laws, stopping."""

import numpy as np
import pytest

from conftest import measured_radius
from eightflow.curves import curve_length, segment_lengths
from eightflow.errors import (
    AreaNotDecreasing,
    MaxStepsExceeded,
    SingularityReached,
    StepRejected,
)
from eightflow.flow import (
    FlowConfig,
    FlowState,
    Trajectory,
    csf_velocity,
    estimate_extinction_time,
    run,
    step,
)
from eightflow.shapes import make_circle, make_ellipse
from eightflow.solitons import shrinking_circle


class TestVelocity:
    def test_circle_inward_radial(self):
        for r in (1.0, 2.0):
            curve = make_circle(r, 256)
            vel = csf_velocity(curve)
            expected = -curve.points / r**2  # magnitude 1/r, pointing inward
            assert np.abs(vel - expected).max() < 1e-3

    def test_straight_segments_zero(self):
        # Stadium: two semicircular caps joined by straight sides; velocity
        # must vanish identically on the interiors of the straights.
        from eightflow.curves import PlaneCurve
        n = 256
        total = 2 * np.pi + 4.0
        pts = np.empty((n, 2))
        flat_idx = []
        for k, s in enumerate(total * np.arange(n) / n):
            if s < np.pi:
                a = -np.pi / 2 + s
                pts[k] = (1 + np.cos(a), np.sin(a))
            elif s < np.pi + 2:
                pts[k] = (1 - (s - np.pi), 1.0)
                if 0.2 < s - np.pi < 1.8:
                    flat_idx.append(k)
            elif s < 2 * np.pi + 2:
                a = np.pi / 2 + (s - np.pi - 2)
                pts[k] = (-1 + np.cos(a), np.sin(a))
            else:
                pts[k] = (-1 + (s - 2 * np.pi - 2), -1.0)
                if 0.2 < s - 2 * np.pi - 2 < 1.8:
                    flat_idx.append(k)
        vel = csf_velocity(PlaneCurve(pts))
        assert np.all(np.linalg.norm(vel[flat_idx], axis=1) < 1e-10)

    def test_grim_reaper_graph_translates(self):
        # Graph x = log cos(y) (leftward reaper) moves with velocity (-1, 0);
        # the normal part of that is kappa N, i.e. kappa = -(-1,0).N ... with
        # the reaper's own orientation kappa = (-1,0).N holds sample-wise.
        from eightflow.curves import PlaneCurve, curvature, derivatives
        ys = np.linspace(-0.85 * np.pi / 2, 0.85 * np.pi / 2, 200)
        xs = np.log(np.cos(ys))
        x_far = xs.min() - 2.0
        top = np.column_stack([np.linspace(xs[-1], x_far, 30)[1:-1],
                               np.full(28, ys[-1])])
        left = np.column_stack([np.full(28, x_far),
                                np.linspace(ys[-1], ys[0], 30)[1:-1]])
        bot = np.column_stack([np.linspace(x_far, xs[0], 30)[1:-1],
                               np.full(28, ys[0])])
        curve = PlaneCurve(np.vstack([np.column_stack([xs, ys]), top, left, bot]))
        x_u, y_u, _, _ = derivatives(curve)
        g = np.sqrt(x_u**2 + y_u**2)
        normal_dot = -(-y_u / g)  # (-1, 0) . N
        kappa = curvature(curve)
        interior = slice(5, 195)
        assert np.abs(kappa[interior] - normal_dot[interior]).max() < 1e-3


class TestConfig:
    def test_cfl_bounds(self):
        from eightflow.errors import InvalidCurve
        with pytest.raises(InvalidCurve):
            FlowConfig(cfl=0.0)
        with pytest.raises(InvalidCurve):
            FlowConfig(cfl=0.6)

    def test_area_fraction_bounds(self):
        from eightflow.errors import InvalidCurve
        with pytest.raises(InvalidCurve):
            FlowConfig(stop_area_frac=1.0)
        with pytest.raises(InvalidCurve):
            FlowConfig(stop_area_frac=0.0)


class TestStep:
    def test_single_step_advances(self):
        config = FlowConfig()
        state = FlowState(curve=make_circle(1.0, 64), t=0.0, step=0)
        new = step(state, config)
        assert new.t > 0 and new.step == 1
        assert curve_length(new.curve) < curve_length(state.curve)

    def test_kappa_h_stop(self):
        config = FlowConfig(stop_kappa_h=1e-4)
        state = FlowState(curve=make_circle(1.0, 64), t=0.0, step=0)
        with pytest.raises(SingularityReached) as info:
            step(state, config)
        assert info.value.reason == "curvature"

    def test_step_rejected_after_halvings(self):
        config = FlowConfig()
        state = FlowState(curve=make_circle(1.0, 64), t=0.0, step=0)
        bad_speed = lambda curve, kappa: np.full(curve.n, np.nan)
        with pytest.raises(StepRejected):
            step(state, config, speed_fn=bad_speed)

    def test_remesh_cadence(self):
        config = FlowConfig(remesh_every=3)
        state = FlowState(curve=make_ellipse(2.0, 1.0, 128), t=0.0, step=0)
        for _ in range(3):
            state = step(state, config)
        seg = segment_lengths(state.curve)
        assert (seg.max() - seg.min()) / seg.mean() < 0.01


class TestCircleRegression:
    def test_radius_tracks_exact_solution(self, circle_runs):
        traj = circle_runs[256]
        final = traj.states[-1]
        assert abs(final.t - 0.375) < 1e-12
        r_num = measured_radius(final.curve)
        assert abs(r_num - 0.5) / 0.5 < 1e-3

    def test_halving_du_reduces_error(self, circle_runs):
        errors = {}
        for n, traj in circle_runs.items():
            r_num = measured_radius(traj.states[-1].curve)
            errors[n] = abs(r_num - shrinking_circle(1.0, traj.states[-1].t))
        assert errors[256] / errors[512] >= 3.0

    def test_extinction_window(self):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.02)
        traj = run(make_circle(1.0, 128), config)
        assert traj.stop_reason == "area"
        assert 0.485 <= traj.states[-1].t <= 0.5


class TestRunContract:
    def test_empty_output_times(self):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.5)
        traj = run(make_circle(1.0, 64), config)
        assert len(traj.states) == 2  # initial and final only
        assert traj.states[0].t == 0.0

    def test_snapshot_at_first_step_past_request(self):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.5)
        traj = run(make_circle(1.0, 64), config, output_times=[0.05])
        assert any(abs(s.t - 0.05) < 1e-10 for s in traj.states)

    def test_unreached_outputs_reported(self):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.5)
        traj = run(make_circle(1.0, 64), config, output_times=[0.05, 9.0])
        assert traj.unreached_outputs == [9.0]

    def test_max_steps_exceeded(self):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.01, max_steps=5)
        with pytest.raises(MaxStepsExceeded):
            run(make_circle(1.0, 64), config)

    def test_strictly_increasing_snapshot_times(self, lemniscate_run):
        times = lemniscate_run.times
        assert np.all(np.diff(times) > 0)


class TestConservation:
    def test_length_monotone(self, lemniscate_run, ellipse_run):
        for traj in (lemniscate_run, ellipse_run):
            lengths = np.array([r.length for r in traj.records])
            assert np.all(np.diff(lengths) < 0)

    def test_embedded_area_rate(self, ellipse_run):
        areas = np.array([r.area_signed for r in ellipse_run.records])
        slope = np.polyfit(ellipse_run.times, areas, 1)[0]
        assert abs(slope + 2 * np.pi) / (2 * np.pi) < 0.01

    def test_lemniscate_signed_area_stays_zero(self, lemniscate_run):
        for rec in lemniscate_run.records:
            assert abs(rec.area_signed) < 1e-6 * rec.length**2

    def test_signed_area_rate_negligible_for_eights(self, lemniscate_run):
        signed = np.array([r.area_signed for r in lemniscate_run.records])
        rates = np.abs(np.diff(signed) / np.diff(lemniscate_run.times))
        assert rates.max() < 1e-3 * 2 * np.pi

    def test_total_turning_conserved(self, lemniscate_run):
        for rec in lemniscate_run.records:
            assert abs(rec.total_curvature) < 1e-3

    def test_crossing_count_nonincreasing(self, lemniscate_run):
        counts = [r.crossing_count for r in lemniscate_run.records]
        assert all(b <= a for a, b in zip(counts, counts[1:]))
        assert counts[-1] == 1

    def test_inflections_nonincreasing(self, lemniscate_run):
        counts = [r.inflections for r in lemniscate_run.records]
        assert all(b <= a for a, b in zip(counts, counts[1:]))

    def test_osc_theta_nonincreasing(self, lemniscate_run):
        osc = np.array([r.osc_theta for r in lemniscate_run.records])
        assert np.all(np.diff(osc) <= 1e-6)

    def test_doubly_symmetric_loop_areas_equal(self, lemniscate_run):
        for rec in lemniscate_run.records:
            assert abs(rec.loop_a1 - rec.loop_a2) < 1e-6 * rec.length**2

    def test_mirror_symmetry_preserved(self, lemniscate_run):
        final = lemniscate_run.states[-1].curve
        n = final.n
        mirrored = final.points.copy()
        mirrored[:, 1] *= -1.0
        remapped = mirrored[(-np.arange(n)) % n]
        dist = np.abs(final.points - remapped).max()
        assert dist < 1e-6 * curve_length(final)


class TestExtinctionEstimate:
    def test_circle_point_estimate(self):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.3)
        traj = run(make_circle(1.0, 128), config,
                   output_times=np.arange(0.02, 0.4, 0.02))
        est = estimate_extinction_time(traj)
        assert abs(est.t_point - 0.5) / 0.5 < 0.01
        assert est.bracket_low == est.bracket_high  # embedded: rate pinned

    def test_lemniscate_slope_and_bracket(self, lemniscate_run):
        est = estimate_extinction_time(lemniscate_run)
        assert -4 * np.pi <= est.slope <= -2 * np.pi
        # A mid-run estimate must bracket the eventual termination time.
        k = len(lemniscate_run.states) // 2
        partial = Trajectory(
            states=lemniscate_run.states[:k],
            records=lemniscate_run.records[:k],
            stop_reason="partial",
            config=lemniscate_run.config,
        )
        est_mid = estimate_extinction_time(partial)
        t_final = lemniscate_run.times[-1]
        assert est_mid.bracket_low <= t_final <= est_mid.bracket_high

    def test_constant_area_rejected(self):
        curve = make_circle(1.0, 64)
        from eightflow.diagnostics import compute_record
        rec = compute_record(curve, 0.0)
        states = [FlowState(curve, 0.0, 0), FlowState(curve, 1.0, 1)]
        records = [rec, compute_record(curve, 1.0)]
        traj = Trajectory(states=states, records=records,
                          stop_reason="synthetic", config=FlowConfig())
        with pytest.raises(AreaNotDecreasing):
            estimate_extinction_time(traj)


class TestConvergenceOrder:
    def test_halving_du_reduces_circle_error_strongly(self):
        errors = {}
        for n in (64, 128):
            config = FlowConfig(cfl=0.2, stop_area_frac=0.3)
            traj = run(make_circle(1.0, n), config, output_times=[0.2], t_end=0.2)
            errors[n] = abs(measured_radius(traj.states[-1].curve)
                            - shrinking_circle(1.0, 0.2))
        assert errors[64] / errors[128] >= 3.0
