import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capgeo.errors import SolverError
from capgeo.capacity.formulas import (
    annulus_capacity,
    ball_capacity,
    capacity_radius,
    matched_outer_level,
    normalized_capacity,
)

from oracles import radial_annulus_energy


class TestBallCapacity:
    def test_electrostatic_values(self):
        assert ball_capacity(3, 2.0, 1.0) == pytest.approx(4 * math.pi, rel=1e-14)
        assert ball_capacity(3, 2.0, 5.0) == pytest.approx(20 * math.pi, rel=1e-14)
        assert ball_capacity(4, 2.0, 1.0) == pytest.approx(4 * math.pi**2, rel=1e-14)

    def test_rejects_bad_p(self):
        for p in (1.0, 3.0, 0.5, 4.0):
            with pytest.raises(SolverError):
                ball_capacity(3, p, 1.0)
        with pytest.raises(SolverError):
            ball_capacity(3, 2.0, -1.0)

    @given(st.floats(min_value=1.1, max_value=2.9), st.floats(min_value=0.1, max_value=10))
    @settings(max_examples=50, deadline=None)
    def test_scaling_law(self, p, r):
        assert ball_capacity(3, p, r) == pytest.approx(
            r ** (3 - p) * ball_capacity(3, p, 1.0), rel=1e-12
        )


class TestAnnulusCapacity:
    def test_limit_recovers_ball(self):
        assert annulus_capacity(3, 2.0, 1.0, 1e6) == pytest.approx(
            4 * math.pi, rel=1e-5
        )

    def test_laplace_resistor_value(self):
        # radial oracle 4 pi / (1/r - 1/R)
        assert annulus_capacity(3, 2.0, 1.0, 2.0) == pytest.approx(8 * math.pi, rel=1e-14)

    @given(
        st.integers(min_value=2, max_value=4),
        st.floats(min_value=1.1, max_value=1.9),
        st.floats(min_value=0.2, max_value=2.0),
        st.floats(min_value=2.5, max_value=30.0),
    )
    @settings(max_examples=30, deadline=None)
    def test_exceeds_ball_and_monotone(self, n, p, r, big_r):
        if p >= n - 0.05:
            return
        a1 = annulus_capacity(n, p, r, big_r)
        a2 = annulus_capacity(n, p, r, big_r * 2)
        ball = ball_capacity(n, p, r)
        # ties allowed when the truncation gap underflows float precision
        assert a1 >= a2 * (1 - 1e-12)
        assert a2 >= ball * (1 - 1e-12)
        if (r / big_r) ** ((n - p) / (p - 1)) > 1e-9:
            assert a1 > a2 > ball

    @pytest.mark.parametrize("n,p,r,big_r", [
        (3, 2.0, 1.0, 5.5), (3, 1.3, 1.0, 5.5), (3, 2.5, 0.7, 8.0), (2, 1.5, 1.0, 4.0),
    ])
    def test_series_composition_oracle(self, n, p, r, big_r):
        oracle = radial_annulus_energy(n, p, r, big_r)
        assert annulus_capacity(n, p, r, big_r) == pytest.approx(oracle, rel=1e-6)

    def test_rejects_bad_radii(self):
        with pytest.raises(SolverError):
            annulus_capacity(3, 2.0, 2.0, 1.0)


class TestNormalizations:
    def test_capacity_radius_of_ball(self):
        for p in (1.3, 2.0, 2.5):
            for r in (0.5, 1.0, 2.0):
                cap = ball_capacity(3, p, r)
                assert capacity_radius(cap, 3, p) == pytest.approx(r, rel=1e-12)
                assert normalized_capacity(cap, 3, p) == pytest.approx(
                    r ** (3 - p), rel=1e-12
                )

    def test_matched_outer_level(self):
        cap = ball_capacity(3, 2.0, 1.0)
        assert matched_outer_level(3, 2.0, cap, 10.0) == pytest.approx(0.1, rel=1e-12)
