import math

import numpy as np
import pytest

from capgeo.errors import SolverError
from capgeo.capacity import (
    PotentialField,
    SolverConfig,
    annulus_capacity,
    ball_capacity,
    solve_p_capacity,
)
from capgeo.geometry.bodies import Ball, Ellipsoid


class TestBallSolves:
    def test_unit_ball_p2(self, ball48_p2):
        exact = 4 * math.pi
        assert ball48_p2.corrected == pytest.approx(exact, rel=2e-2)
        assert ball48_p2.lower <= exact <= ball48_p2.upper
        assert ball48_p2.converged

    def test_disk_accuracy(self):
        body = Ball(2, np.zeros(2), radius=1.0)
        est = solve_p_capacity(body, 1.5, SolverConfig(grid=96))
        exact = ball_capacity(2, 1.5, 1.0)
        assert est.value == pytest.approx(exact, rel=5e-3)
        assert est.lower <= exact <= est.upper

    def test_raw_energy_matches_radial_annulus(self):
        # plain truncation of a centered disk is the concentric-annulus
        # problem; its energy has a closed form
        body = Ball(2, np.zeros(2), radius=1.0)
        est = solve_p_capacity(
            body, 1.5, SolverConfig(grid=128, truncation="plain", refine_passes=0)
        )
        ann = annulus_capacity(2, 1.5, 1.0, est.box_radius)
        assert est.raw_energy == pytest.approx(ann, rel=3e-3)

    def test_comparison_principle(self, ball48_p2):
        assert ball48_p2.field.comparison_violation() <= 1e-6

    def test_normalized_radius(self, ball48_p2):
        assert ball48_p2.normalized_radius == pytest.approx(1.0, rel=1e-2)


class TestValidation:
    def test_p_near_endpoints_rejected(self, unit_ball):
        for p in (1.02, 2.97):
            with pytest.raises(SolverError):
                solve_p_capacity(unit_ball, p, SolverConfig(grid=16))

    def test_box_too_small(self, unit_ball):
        with pytest.raises(SolverError):
            solve_p_capacity(unit_ball, 2.0, SolverConfig(grid=32, box_radius=2.0))

    def test_n4_rejected(self):
        body = Ball(4, np.zeros(4), radius=1.0)
        with pytest.raises(SolverError):
            solve_p_capacity(body, 2.0, SolverConfig(grid=16))


class TestMonotonicity:
    def test_nested_ball_ellipsoid(self, ball48_p2, prolate):
        outer = solve_p_capacity(prolate, 2.0, SolverConfig(grid=48))
        assert ball48_p2.ordered_or_overlapping(outer)
        assert ball48_p2.value <= outer.value

    def test_random_nested_pairs_2d(self):
        rng = np.random.default_rng(42)
        cfg = SolverConfig(grid=64)
        for _ in range(20):
            a1, b1 = rng.uniform(0.5, 1.2, size=2)
            a2 = a1 * rng.uniform(1.05, 1.8)
            b2 = b1 * rng.uniform(1.05, 1.8)
            inner = Ellipsoid(2, np.zeros(2), semi_axes=np.array([a1, b1]))
            outer = Ellipsoid(2, np.zeros(2), semi_axes=np.array([a2, b2]))
            p = rng.uniform(1.2, 1.8)
            e_in = solve_p_capacity(inner, p, cfg)
            e_out = solve_p_capacity(outer, p, cfg)
            assert e_in.ordered_or_overlapping(e_out), (a1, b1, a2, b2, p)


class TestInvariance:
    def test_rotation_translation_2d(self):
        body = Ellipsoid(2, np.zeros(2), semi_axes=np.array([1.0, 1.6]))
        ang = math.pi / 5
        q = np.array([[math.cos(ang), -math.sin(ang)], [math.sin(ang), math.cos(ang)]])
        moved = body.rotated(q).translated([0.3, -0.2])
        cfg = SolverConfig(grid=96)
        e1 = solve_p_capacity(body, 1.5, cfg)
        e2 = solve_p_capacity(moved, 1.5, cfg)
        assert e2.value == pytest.approx(e1.value, rel=1e-2)

    def test_scale_covariance(self, ball48_p2, unit_ball):
        lam = 2.0
        scaled = solve_p_capacity(unit_ball.scaled(lam), 2.0, SolverConfig(grid=48))
        # box and grid scale with the body: identical discrete problem
        assert scaled.value == pytest.approx(lam * ball48_p2.value, rel=1e-9)
        assert scaled.lower == pytest.approx(lam * ball48_p2.lower, rel=1e-9)


class TestEnergyMonotonicity:
    def test_history_decreases(self, unit_ball):
        from capgeo.capacity.solver import _EnergyGrid, _line_search

        g = _EnergyGrid(unit_ball, 2.0, 24, 5.5)
        f = g.initial_field(0.0)
        energy, grad = g.energy_and_grad(f)
        diag = g.precondition(f)
        history = [energy]
        d = -grad / diag
        for _ in range(60):
            slope = float(np.vdot(grad, d))
            t, e_new = _line_search(g, f, d, energy, slope, 1.0)
            if t is None:
                break
            f = f + t * d
            energy, grad = g.energy_and_grad(f)
            history.append(energy)
            d = -grad / diag
        assert all(b <= a + 1e-15 for a, b in zip(history, history[1:]))


class TestFieldExport:
    def test_save_round_trip(self, tmp_path, ball48_p2):
        import json

        stem = str(tmp_path / "field")
        ball48_p2.field.save(stem)
        with open(stem + ".json") as fh:
            meta = json.load(fh)
        data = np.fromfile(stem + ".bin", dtype=np.float64).reshape(meta["shape"])
        assert np.array_equal(data, ball48_p2.field.values)
        assert meta["p"] == 2.0
        assert meta["spacing"] == pytest.approx(ball48_p2.h)
        assert meta["body"] == "ball:r=1"
