"""Closed-form capacities and normalizations.

For 1 < p < n the variational p-capacity of a ball is
cap_p(B_r) = r^{n-p} ((p-1)/(n-p))^{1-p} sigma_{n-1}; the concentric
annulus value below is the radial p-Dirichlet minimum between spheres r and
R and recovers the ball as R -> infinity. The normalized capacity
cap_p / (((p-1)/(n-p))^{1-p} sigma_{n-1}) equals r^{n-p} for a ball, and
its (n-p)-th root is the capacity-equivalent radius C*.
"""

import numpy as np

from capgeo.errors import SolverError
from capgeo.geometry.spherical import unit_sphere_area


def _check_p(n, p):
    if not (1.0 < p < n):
        raise SolverError(f"p must lie in (1, n) = (1, {n}), got {p}")


def capacity_normalizer(n: int, p: float) -> float:
    """((p-1)/(n-p))^{1-p} * sigma_{n-1}."""
    _check_p(n, p)
    return ((p - 1.0) / (n - p)) ** (1.0 - p) * unit_sphere_area(n)


def ball_capacity(n: int, p: float, r: float) -> float:
    """p-capacity of a radius-r ball in R^n."""
    _check_p(n, p)
    if r <= 0:
        raise SolverError(f"ball radius must be positive, got {r}")
    return r ** (n - p) * capacity_normalizer(n, p)


def annulus_capacity(n: int, p: float, r: float, big_r: float) -> float:
    """Radial p-Dirichlet minimum between concentric spheres r < R.

    Monotone decreasing in R; the R -> infinity limit is ball_capacity.
    """
    _check_p(n, p)
    if not (0 < r < big_r):
        raise SolverError(f"need 0 < r < R, got r={r}, R={big_r}")
    kappa = (p - n) / (p - 1.0)  # negative of the far-field decay exponent
    gap = r**kappa - big_r**kappa
    return capacity_normalizer(n, p) * gap ** (1.0 - p)


def normalized_capacity(cap: float, n: int, p: float) -> float:
    """cap / (((p-1)/(n-p))^{1-p} sigma_{n-1}); equals r^{n-p} for balls."""
    return cap / capacity_normalizer(n, p)


def capacity_radius(cap: float, n: int, p: float) -> float:
    """Capacity-equivalent ball radius C* (length)."""
    val = normalized_capacity(cap, n, p)
    if val <= 0:
        raise SolverError("capacity must be positive")
    return val ** (1.0 / (n - p))


def far_field_exponent(n: int, p: float) -> float:
    """Decay rate kappa with u(x) ~ (C*/|x|)^kappa for the potential."""
    _check_p(n, p)
    return (n - p) / (p - 1.0)


def truncated_energy_fraction(n: int, p: float, c_out: float) -> float:
    """Energy fraction captured inside {u > c_out} for a matched truncation.

    The level-set flux of the equilibrium potential is constant, so the
    p-Dirichlet energy between levels c_out and 1 is cap * (1 - c_out).
    """
    if not (0.0 <= c_out < 1.0):
        raise SolverError(f"outer level must lie in [0, 1), got {c_out}")
    return 1.0 - c_out


def matched_outer_level(n: int, p: float, cap: float, big_r: float) -> float:
    """Far-field value (C*/R)^kappa of the potential on the sphere |x| = R."""
    c_star = capacity_radius(cap, n, p)
    return float(np.clip((c_star / big_r) ** far_field_exponent(n, p), 0.0, 0.999999))
