import numpy as np
import pytest

from capgeo.capacity.formulas import capacity_normalizer
from capgeo.capacity.solver import PCapacityEstimate, SolverConfig, solve_p_capacity
from capgeo.geometry.bodies import Ball, Ellipsoid


@pytest.fixture(scope="session")
def unit_ball():
    return Ball(3, np.zeros(3), radius=1.0)


@pytest.fixture(scope="session")
def unit_disk():
    return Ball(2, np.zeros(2), radius=1.0)


@pytest.fixture(scope="session")
def prolate():
    return Ellipsoid(3, np.zeros(3), semi_axes=np.array([1.0, 1.0, 2.0]))


def exact_estimate(body, n, p, cap, rel_margin=1e-6):
    """Wrap a closed-form capacity as an estimate, for evaluator tests."""
    m = cap * rel_margin
    return PCapacityEstimate(
        n=n, p=p, raw_energy=cap, corrected=cap, lower=cap - m, upper=cap + m,
        normalized_radius=(cap / capacity_normalizer(n, p)) ** (1.0 / (n - p)),
        h=0.0, box_radius=0.0, outer_level=0.0,
        body_descriptor=body.descriptor(), iterations=0, converged=True,
    )


@pytest.fixture(scope="session")
def ball48_p2(unit_ball):
    """One shared moderate-resolution production solve."""
    return solve_p_capacity(unit_ball, 2.0, SolverConfig(grid=48))


@pytest.fixture(scope="session")
def ball48_p2_plain(unit_ball):
    return solve_p_capacity(
        unit_ball, 2.0, SolverConfig(grid=48, truncation="plain", refine_passes=0)
    )
