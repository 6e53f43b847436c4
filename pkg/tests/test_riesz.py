import math

import numpy as np
import pytest

from capgeo.errors import QuadratureError
from capgeo.geometry import Ball, Ellipsoid, mesh_body, functionals
from capgeo.harness.riesz import (
    double_layer_average,
    single_layer_potential,
    sphere_single_layer_exact,
)

from oracles import sphere_single_layer


@pytest.fixture(scope="module")
def sphere_mesh():
    return mesh_body(Ball(3, np.zeros(3), radius=1.0), 48)


@pytest.fixture(scope="module")
def prolate_mesh(prolate):
    return mesh_body(prolate, 48)


class TestSingleLayer:
    def test_oracle_value(self):
        assert sphere_single_layer_exact(3) == pytest.approx(1.0, rel=1e-10)
        assert sphere_single_layer(3) == pytest.approx(1.0, rel=1e-10)

    def test_sphere_quadrature(self, sphere_mesh):
        vals, _ = single_layer_potential(sphere_mesh, np.arange(0, 6000, 97))
        assert vals == pytest.approx(np.ones(len(vals)), rel=1e-2)

    def test_scale_covariance(self):
        # the normalized single-layer value scales like the radius
        mesh2 = mesh_body(Ball(3, np.zeros(3), radius=2.0), 48)
        vals, _ = single_layer_potential(mesh2, np.arange(0, 5000, 131))
        assert vals == pytest.approx(2.0 * np.ones(len(vals)), rel=1e-2)

    def test_curvature_guard(self):
        mesh = mesh_body(Ball(3, np.zeros(3), radius=1.0), 8)
        with pytest.raises(QuadratureError):
            single_layer_potential(mesh, [0], exclusion_factor=20.0)


class TestDoubleLayer:
    def test_sphere_equality(self, sphere_mesh):
        # (n-2) sigma / cap_2 = 1 = double integral / area^2 on the unit ball
        val = double_layer_average(sphere_mesh)
        assert val == pytest.approx(1.0, rel=2e-2)

    def test_prolate_exceeds_reciprocal_capacity(self, prolate_mesh):
        from oracles import PROLATE_CAP2

        val = double_layer_average(prolate_mesh)
        lhs = 4 * math.pi / PROLATE_CAP2
        assert val >= lhs
