"""Area, volume, and Willmore-type functionals of a boundary mesh."""

from dataclasses import dataclass

import numpy as np

from capgeo.errors import GeometryError
from capgeo.geometry.meshing import SurfaceMesh
from capgeo.geometry.spherical import unit_sphere_area


@dataclass(frozen=True)
class GeometricFunctionals:
    """Scalar functionals of one boundary.

    willmore maps exponent q to integral of H^{q-1} d sigma / sigma_{n-1};
    willmore_n >= 1 for convex bodies with equality for balls. a_star and
    v_star are the area- and volume-equivalent ball radii, so v_star <=
    a_star is the isoperimetric inequality.
    """

    n: int
    area: float
    volume: float
    willmore: dict
    a_star: float
    v_star: float

    def willmore_at(self, q) -> float:
        key = float(q)
        if key not in self.willmore:
            raise GeometryError(f"willmore exponent {q} was not requested")
        return self.willmore[key]


def functionals(mesh: SurfaceMesh, exponents=()) -> GeometricFunctionals:
    """Evaluate area, divergence-theorem volume, and Willmore integrals.

    exponents is a list of reals q in [1, n]; each yields
    willmore[q] = sum H^{q-1} d sigma / sigma_{n-1}. Requesting q > 1 on a
    mesh with negative curvature raises; H = 0 elements (rounded-box faces)
    contribute zero for q > 1.
    """
    n = mesh.n
    sigma = unit_sphere_area(n)
    area = float(mesh.weights.sum())
    volume = float(
        np.einsum("ij,ij->", mesh.flat_centroids, mesh.normals * mesh.weights[:, None]) / n
    )

    willmore = {}
    for q in exponents:
        q = float(q)
        if not (1.0 <= q <= n):
            raise GeometryError(f"willmore exponent {q} outside [1, {n}]")
        if q == 1.0:
            willmore[q] = area / sigma
            continue
        h = mesh.mean_curvature
        if np.any(h < 0):
            bad = int(np.count_nonzero(h < 0))
            raise GeometryError(
                f"{bad} elements with H < 0: willmore exponent {q} > 1 needs H >= 0"
            )
        willmore[q] = float(np.sum(h ** (q - 1.0) * mesh.weights) / sigma)

    a_star = (area / sigma) ** (1.0 / (n - 1))
    v_star = (volume / (sigma / n)) ** (1.0 / n)
    return GeometricFunctionals(
        n=n, area=area, volume=volume, willmore=willmore, a_star=a_star, v_star=v_star
    )
