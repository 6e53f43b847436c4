import math

import numpy as np
import pytest

from capgeo.errors import FlowError
from capgeo.flow import (
    area_growth_check,
    evolve,
    flow_capacity_bound,
    normalized_flow_capacity_bound,
    stable_dt,
    up_growth_check,
)
from capgeo.geometry.bodies import Ball, Ellipsoid, RoundedBox


def circle(r=1.0):
    return Ball(2, np.zeros(2), radius=r)


def sphere(r=1.0):
    return Ball(3, np.zeros(3), radius=r)


def axisym_ellipsoid():
    return Ellipsoid(3, np.zeros(3), semi_axes=np.array([1.0, 1.0, 2.0]))


class TestExactLaws:
    def test_circle_exponential(self):
        body = circle()
        tr = evolve(body, 0.5 * stable_dt(body), 1.0, p_list=(1.5,), samples=128)
        assert tr.final_rho.mean() == pytest.approx(math.e, rel=5e-3)
        assert area_growth_check(tr) <= 1e-2

    def test_sphere_exponential(self):
        body = sphere()
        tr = evolve(body, 0.5 * stable_dt(body), 1.0, p_list=(2.0,), samples=128)
        assert tr.final_rho.mean() == pytest.approx(math.exp(0.5), rel=1e-2)
        assert tr.areas[-1] == pytest.approx(math.e * 4 * math.pi, rel=1e-2)

    def test_sphere_self_similar(self):
        body = sphere()
        tr = evolve(body, 0.5 * stable_dt(body), 1.0, p_list=(2.0,), samples=128)
        assert tr.anisotropy.max() - 1.0 < 1e-6

    def test_area_strictly_increasing(self):
        body = axisym_ellipsoid()
        tr = evolve(body, 0.5 * stable_dt(body, 96), 1.0, p_list=(2.0,), samples=96)
        assert np.all(np.diff(tr.times) > 0)
        assert np.all(np.diff(tr.areas) > 0)

    def test_step_halving_improves(self):
        body = axisym_ellipsoid()
        dt0 = 0.5 * stable_dt(body, 96)
        devs = []
        for dt in (dt0, dt0 / 2):
            tr = evolve(body, dt, 1.0, p_list=(2.0,), samples=96)
            devs.append(area_growth_check(tr))
        assert devs[0] / devs[1] >= 1.8


class TestGrowthBound:
    def test_sphere_saturates(self):
        body = sphere()
        tr = evolve(body, 0.5 * stable_dt(body), 1.0, p_list=(2.0,), samples=128)
        rec = up_growth_check(tr, 2.0)
        assert rec.passes
        assert abs(rec.min_slack_relative) <= 1e-2
        # U_p follows the exact exponential on the ball
        assert tr.u_p[2.0][-1] / tr.u_p[2.0][0] == pytest.approx(
            math.exp(0.5), rel=1e-2
        )

    def test_ellipsoid_slack(self):
        body = axisym_ellipsoid()
        tr = evolve(body, 0.5 * stable_dt(body, 128), 2.0, p_list=(2.0, 2.5), samples=128)
        for p in (2.0, 2.5):
            rec = up_growth_check(tr, p)
            assert rec.min_slack_relative >= -1e-2

    def test_anisotropy_decays(self):
        body = axisym_ellipsoid()
        tr = evolve(body, 0.5 * stable_dt(body, 128), 2.0, p_list=(2.0,), samples=128)
        assert tr.anisotropy[0] == pytest.approx(2.0, rel=1e-3)
        assert tr.anisotropy[-1] < 1.2
        assert np.all(np.diff(tr.anisotropy) <= 1e-12)

    def test_p_range_enforced(self):
        body = sphere()
        tr = evolve(body, 0.5 * stable_dt(body), 0.2, p_list=(1.5, 2.0), samples=64)
        with pytest.raises(FlowError):
            up_growth_check(tr, 1.5)
        with pytest.raises(FlowError):
            up_growth_check(tr, 3.0)


class TestCapacityBound:
    def test_unit_sphere_equality(self):
        body = sphere()
        tr = evolve(body, 0.5 * stable_dt(body), 1.5, p_list=(2.0, 2.5), samples=128)
        assert normalized_flow_capacity_bound(tr, 2.0) == pytest.approx(1.0, rel=2e-2)
        assert normalized_flow_capacity_bound(tr, 2.5) == pytest.approx(1.0, rel=2e-2)

    def test_radius_two(self):
        body = sphere(2.0)
        tr = evolve(body, 0.5 * stable_dt(body), 1.5, p_list=(2.0,), samples=128)
        assert normalized_flow_capacity_bound(tr, 2.0) == pytest.approx(2.0, rel=2e-2)

    def test_upper_bounds_true_capacity(self):
        from oracles import PROLATE_CAP2

        body = axisym_ellipsoid()
        tr = evolve(body, 0.5 * stable_dt(body, 128), 5.0, p_list=(2.0,), samples=128)
        bound = flow_capacity_bound(tr, 2.0)
        assert bound * 4 * math.pi >= PROLATE_CAP2 * (1 - 1e-9)

    def test_short_trace_rejected(self):
        body = axisym_ellipsoid()
        tr = evolve(body, 0.5 * stable_dt(body, 64), 0.1, p_list=(2.0,), samples=64)
        with pytest.raises(FlowError):
            flow_capacity_bound(tr, 2.0, tail_tol=1e-4)


class TestGuards:
    def test_stability_violation(self):
        body = axisym_ellipsoid()
        with pytest.raises(FlowError):
            evolve(body, 100 * stable_dt(body, 64), 0.5, samples=64)

    def test_blowup_guard(self):
        body = circle()
        with pytest.raises(FlowError):
            evolve(body, 0.5 * stable_dt(body, 64), 3.0, samples=64, rho_blowup=5.0)

    def test_non_axisymmetric_rejected(self):
        body = Ellipsoid(3, np.zeros(3), semi_axes=np.array([0.8, 1.0, 1.2]))
        with pytest.raises(FlowError):
            evolve(body, 1e-4, 0.1, samples=32)
        box = RoundedBox(3, np.zeros(3), half_widths=np.ones(3), rounding=0.2)
        with pytest.raises(FlowError):
            evolve(box, 1e-4, 0.1, samples=32)


class TestTraceExport:
    def test_columns(self):
        body = sphere()
        tr = evolve(body, 0.5 * stable_dt(body, 64), 0.3, p_list=(2.0, 2.5), samples=64)
        rows = tr.to_rows()
        names = tr.column_names()
        assert names == ["t", "area", "U_p=2", "U_p=2.5", "willmore_3"]
        assert rows.shape[1] == len(names)
        assert rows[0, 0] == 0.0
        assert rows[0, 1] == pytest.approx(4 * math.pi, rel=1e-3)
