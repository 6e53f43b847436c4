"""Single-layer Riesz potentials on body boundaries.

The kernel |x - y|^{2-n} is integrable on an (n-1)-surface; quadrature
excludes the elements inside a small disk around the evaluation point and
adds back the flat-disk value sigma_{n-2} * delta, with delta chosen so the
flat disk has exactly the excluded quadrature area. On the unit sphere in
R^3 the potential integral of 1/|x-y| over d sigma / (4 pi) equals 1 at
every boundary point, which pins the quadrature accuracy.
"""

import math
from dataclasses import dataclass

import numpy as np

from capgeo.errors import QuadratureError
from capgeo.geometry.meshing import SurfaceMesh
from capgeo.geometry.spherical import unit_sphere_area


def _excluded_disk_radius(n, excluded_area):
    # (n-1)-ball of radius d has volume sigma_{n-2} d^{n-1} / (n-1)
    sig = unit_sphere_area(n - 1)
    return ((n - 1) * excluded_area / sig) ** (1.0 / (n - 1))


def single_layer_potential(mesh: SurfaceMesh, sample_idx=None, exclusion_factor=2.0):
    """Normalized single-layer values S(x) = sum |x-y|^{2-n} dsigma / sigma
    at the requested element sample points.

    Returns (values, sample_idx). exclusion_factor scales the cutoff with
    the median element size. The curvature-validity guard rejects meshes
    whose elements are too coarse for the flat-patch correction.
    """
    n = mesh.n
    if n < 3:
        raise QuadratureError("single-layer potentials implemented for n >= 3")
    sigma = unit_sphere_area(n)
    elem = mesh.element_size()
    cutoff = exclusion_factor * elem
    h_max = float(np.abs(mesh.mean_curvature).max())
    if cutoff * h_max > 0.75:
        raise QuadratureError(
            f"singular-patch correction invalid: cutoff {cutoff:.3g} vs "
            f"curvature radius {1.0 / h_max:.3g}"
        )
    if sample_idx is None:
        sample_idx = np.arange(len(mesh.points))
    sample_idx = np.asarray(sample_idx)

    pts = mesh.points
    w = mesh.weights
    out = np.empty(len(sample_idx))
    for k, i in enumerate(sample_idx):
        x = pts[i]
        d = np.linalg.norm(pts - x[None, :], axis=1)
        near = d < cutoff
        far_sum = float(np.sum(w[~near] * d[~near] ** (2 - n)))
        a_exc = float(w[near].sum())
        delta = _excluded_disk_radius(n, a_exc)
        correction = unit_sphere_area(n - 1) * delta  # flat-disk value
        out[k] = (far_sum + correction) / sigma
    return out, sample_idx


def double_layer_average(mesh: SurfaceMesh, exclusion_factor=2.0, block=512):
    """The double surface integral of |x-y|^{2-n} over both boundary copies,
    divided by area^2."""
    n = mesh.n
    if n < 3:
        raise QuadratureError("double integral implemented for n >= 3")
    elem = mesh.element_size()
    cutoff = exclusion_factor * elem
    sig_cap = unit_sphere_area(n - 1)
    pts = mesh.points
    w = mesh.weights
    total = 0.0
    for start in range(0, len(pts), block):
        stop = min(start + block, len(pts))
        d = np.linalg.norm(pts[None, start:stop, :] - pts[:, None, :], axis=2)
        near = d < cutoff
        kern = np.where(near, 0.0, np.where(near, 1.0, d) ** (2 - n))
        inner = kern.T @ w  # integral over y for each x in the block
        a_exc = near.T @ w
        delta = ((n - 1) * a_exc / sig_cap) ** (1.0 / (n - 1))
        inner = inner + sig_cap * delta
        total += float(np.dot(inner, w[start:stop]))
    return total / mesh.area**2


def sphere_single_layer_exact(n: int) -> float:
    """Closed-form normalized single-layer value on the unit sphere.

    Independent oracle: integral over S^{n-1} of |x - y|^{2-n} d sigma(y)
    equals sigma_{n-1} * I with I = int_0^pi (2 sin(g/2))^{2-n}
    sin^{n-2} g dg / int_0^pi sin^{n-2} g dg; for n = 3 the value is 1.
    """
    from scipy.integrate import quad

    if n < 3:
        raise QuadratureError("needs n >= 3")

    def num(g):
        return (2.0 * math.sin(g / 2.0)) ** (2 - n) * math.sin(g) ** (n - 2)

    def den(g):
        return math.sin(g) ** (n - 2)

    a, _ = quad(num, 0.0, math.pi)
    b, _ = quad(den, 0.0, math.pi)
    return a / b


@dataclass
class RieszScan:
    """Exploratory record for the open single-layer conjecture: no verdict,
    just the worst margin of S(x) against (area/sigma)^{1/(n-1)}."""

    body: str
    n: int
    samples: int
    max_potential: float
    bound: float
    margin: float           # bound - max potential; sign is reported, not judged

    def to_dict(self):
        return {
            "body": self.body, "n": self.n, "samples": self.samples,
            "max_potential": self.max_potential, "bound": self.bound,
            "margin": self.margin, "exploratory": True,
        }
