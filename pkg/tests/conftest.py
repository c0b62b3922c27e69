"""Shared fixtures: the expensive reference runs are session-scoped."""

import numpy as np
import pytest

from eightflow.flow import FlowConfig, run
from eightflow.shapes import (
    make_asymmetric_eight,
    make_bernoulli_lemniscate,
    make_circle,
    make_ellipse,
)

# Approximate extinction time of the unit Bernoulli lemniscate under curve
# shortening flow (calibrated once); only used to place snapshot times so
# that tau -> tau/2 pairs are available near the end of the run.
LEMNISCATE_T_MAX = 0.1155


def lemniscate_output_times():
    uniform = np.arange(0.002, 0.120, 0.002)
    dyadic = LEMNISCATE_T_MAX * (1.0 - 0.5 ** np.arange(1, 14))
    return sorted(set(np.round(np.concatenate([uniform, dyadic]), 12)))


@pytest.fixture(scope="session")
def lemniscate_run():
    """Unit lemniscate, N=256, evolved to 1% of its initial total area."""
    config = FlowConfig(cfl=0.1, stop_area_frac=0.01)
    return run(make_bernoulli_lemniscate(1.0, 256), config, lemniscate_output_times())


@pytest.fixture(scope="session")
def circle_runs():
    """Unit circles at N=256 and N=512 evolved to exactly t = 0.375."""
    out = {}
    for n in (256, 512):
        config = FlowConfig(cfl=0.2, stop_area_frac=0.01)
        out[n] = run(make_circle(1.0, n), config, output_times=[0.375], t_end=0.375)
    return out


@pytest.fixture(scope="session")
def ellipse_run():
    """Convex 2:1 ellipse, N=256, evolved to t = 0.5 (area 2*pi -> pi)."""
    config = FlowConfig(cfl=0.2, stop_area_frac=0.05)
    times = np.arange(0.025, 0.5, 0.025)
    return run(make_ellipse(2.0, 1.0, 256), config, times, t_end=0.5)


@pytest.fixture(scope="session")
def asymmetric_run():
    """Ratio-1.5 eight (convex left loop), evolved to 40% of initial area."""
    config = FlowConfig(cfl=0.1, stop_area_frac=0.4)
    times = np.arange(0.005, 0.2, 0.005)
    return run(make_asymmetric_eight(1.5, 256), config, times)


def measured_radius(curve) -> float:
    pts = curve.points
    return float(np.linalg.norm(pts - pts.mean(axis=0), axis=1).mean())
