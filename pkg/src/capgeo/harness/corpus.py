"""The standard body corpus: three balls, three ellipsoids (two of them
axisymmetric so the flow checks can reuse them), a superellipsoid, and a
rounded box. Spans near-ball to near-cube convex shapes while keeping every
body resolvable at the default grids."""

import numpy as np

from capgeo.geometry.bodies import Ball, Ellipsoid, RoundedBox, Superellipsoid

CORPUS_P_VALUES = (1.3, 2.0, 2.5)


def corpus_bodies():
    return [
        Ball(3, np.zeros(3), radius=0.5),
        Ball(3, np.zeros(3), radius=1.0),
        Ball(3, np.zeros(3), radius=2.0),
        Ellipsoid(3, np.zeros(3), semi_axes=np.array([1.0, 1.0, 2.0])),
        Ellipsoid(3, np.zeros(3), semi_axes=np.array([1.0, 1.0, 1.3])),
        Ellipsoid(3, np.zeros(3), semi_axes=np.array([0.8, 1.0, 1.2])),
        Superellipsoid(3, np.zeros(3), semi_axes=np.ones(3), exponent=4.0),
        RoundedBox(3, np.zeros(3), half_widths=np.ones(3), rounding=0.25),
    ]


def flowable_corpus_bodies():
    """The axisymmetric subset usable as flow initial data."""
    return [b for b in corpus_bodies() if _axisymmetric(b)]


def _axisymmetric(body):
    if isinstance(body, Ball):
        return True
    if isinstance(body, Ellipsoid):
        a = body.semi_axes
        return abs(a[0] - a[1]) < 1e-12 * a.max()
    return False
