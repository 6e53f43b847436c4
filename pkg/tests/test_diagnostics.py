import math

import numpy as np
import pytest

from capgeo.errors import SolverError
from capgeo.capacity import (
    SolverConfig,
    equilibrium_diagnostics,
    p1_limit_probe,
    solve_p_capacity,
)
from capgeo.geometry.bodies import Ball, Ellipsoid


@pytest.fixture(scope="module")
def ball_diag(unit_ball, ball48_p2_plain):
    return equilibrium_diagnostics(
        ball48_p2_plain, unit_ball, scaling_config=SolverConfig(grid=48)
    )


class TestFluxConstancy:
    def test_fluxes_near_ball_capacity(self, ball_diag):
        for rec in ball_diag.levels:
            assert rec.flux_corrected == pytest.approx(4 * math.pi, rel=3e-2)

    def test_spread(self, ball_diag):
        assert ball_diag.flux_spread <= 3e-2

    def test_level_convexity(self, ball_diag):
        assert all(rec.convexity_pass for rec in ball_diag.levels)


class TestLevelSetScaling:
    def test_half_level_capacity(self, ball_diag):
        # re-solved obstacle {u >= 1/2} carries 2^{p-1} times the capacity
        assert ball_diag.scaling_ratio == pytest.approx(1.0, abs=5e-2)
        assert ball_diag.scaling_capacity == pytest.approx(2 * 4 * math.pi, rel=5e-2)


class TestEllipsoidLevels:
    def test_convex_level_sets(self, prolate):
        est = solve_p_capacity(
            prolate, 2.0, SolverConfig(grid=48, truncation="plain", refine_passes=0)
        )
        diag = equilibrium_diagnostics(est, prolate, scaling_level=None)
        assert all(rec.convexity_pass for rec in diag.levels)


class TestDiagnosticsPreconditions:
    def test_matched_field_rejected(self, ball48_p2, unit_ball):
        with pytest.raises(SolverError):
            equilibrium_diagnostics(ball48_p2, unit_ball)


class TestP1Probe:
    def test_ball_reaches_area(self, unit_ball):
        res = p1_limit_probe(unit_ball, config=SolverConfig(grid=48))
        assert res.extrapolated == pytest.approx(4 * math.pi, rel=5e-2)
        assert res.relative_gap <= 5e-2

    def test_scaled_ball(self):
        body = Ball(3, np.zeros(3), radius=2.0)
        res = p1_limit_probe(body, p_sequence=(1.4, 1.3, 1.2), config=SolverConfig(grid=48))
        assert res.extrapolated == pytest.approx(16 * math.pi, rel=5e-2)

    def test_rejects_bad_sequence(self, unit_ball):
        with pytest.raises(SolverError):
            p1_limit_probe(unit_ball, p_sequence=(1.7, 1.6))
