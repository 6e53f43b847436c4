"""Unit-sphere helpers: surface area, quadrature grids, real spherical harmonics."""

import math

import numpy as np
from scipy.special import lpmv

from capgeo.errors import GeometryError


def unit_sphere_area(n) -> float:
    """Surface area sigma_{n-1} of the unit sphere in R^n.

    sigma_{n-1} = 2 pi^{n/2} / Gamma(n/2); 2 pi for n=2, 4 pi for n=3,
    2 pi^2 for n=4.
    """
    if not float(n).is_integer() or int(n) < 2:
        raise GeometryError(f"dimension must be an integer >= 2, got {n!r}")
    n = int(n)
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def sphere_vertex_grid(n_theta: int, n_phi: int):
    """Vertex directions of a latitude/longitude grid on S^2.

    Returns (dirs, theta, phi) where dirs has shape (n_theta+1, n_phi, 3).
    Row 0 and row n_theta collapse to the poles.
    """
    theta = np.linspace(0.0, math.pi, n_theta + 1)
    phi = np.arange(n_phi) * (2.0 * math.pi / n_phi)
    st, ct = np.sin(theta), np.cos(theta)
    cp, sp = np.cos(phi), np.sin(phi)
    dirs = np.empty((n_theta + 1, n_phi, 3))
    dirs[..., 0] = st[:, None] * cp[None, :]
    dirs[..., 1] = st[:, None] * sp[None, :]
    dirs[..., 2] = ct[:, None]
    return dirs, theta, phi


def sphere_triangulation(n_theta: int, n_phi: int):
    """Triangulate the lat/long sphere grid.

    Returns (verts, faces): verts is (V, 3) unit directions with merged poles,
    faces is (F, 3) integer indices with outward (counterclockwise seen from
    outside) orientation.
    """
    if n_theta < 2 or n_phi < 3:
        raise GeometryError("sphere triangulation needs n_theta >= 2, n_phi >= 3")
    dirs, _, _ = sphere_vertex_grid(n_theta, n_phi)
    # merged vertex table: north pole, interior rings, south pole
    verts = [np.array([0.0, 0.0, 1.0])]
    index = np.empty((n_theta + 1, n_phi), dtype=np.int64)
    index[0, :] = 0
    k = 1
    for i in range(1, n_theta):
        for j in range(n_phi):
            verts.append(dirs[i, j])
            index[i, j] = k
            k += 1
    verts.append(np.array([0.0, 0.0, -1.0]))
    index[n_theta, :] = k
    verts = np.asarray(verts)

    faces = []
    jp = lambda j: (j + 1) % n_phi
    for j in range(n_phi):  # north cap
        faces.append((index[0, 0], index[1, j], index[1, jp(j)]))
    for i in range(1, n_theta - 1):  # quad bands, split
        for j in range(n_phi):
            a, b = index[i, j], index[i, jp(j)]
            c, d = index[i + 1, j], index[i + 1, jp(j)]
            faces.append((a, c, d))
            faces.append((a, d, b))
    for j in range(n_phi):  # south cap
        faces.append((index[n_theta, 0], index[n_theta - 1, jp(j)], index[n_theta - 1, j]))
    return verts, np.asarray(faces, dtype=np.int64)


def polar_angle_grid(n_theta: int):
    """Half-offset polar samples theta_i = (i + 1/2) pi / n_theta."""
    dt = math.pi / n_theta
    return (np.arange(n_theta) + 0.5) * dt, dt


def chart_quadrature(n: int, resolution: int):
    """Tensor-product midpoint quadrature for S^{n-1} in polar coordinates.

    Angles theta_1..theta_{n-2} in (0, pi) at half-offset nodes, phi in
    [0, 2 pi) uniform. Returns (dirs, weights) with dirs of shape (M, n) and
    sum(weights) -> sigma_{n-1} as resolution grows. The node set is
    symmetric under the antipodal map, so odd integrands cancel exactly.
    """
    if n < 3:
        raise GeometryError("chart quadrature is for n >= 3")
    n_phi = 2 * resolution
    axes = []
    waxes = []
    for k in range(n - 2):
        th, dt = polar_angle_grid(resolution)
        axes.append(th)
        waxes.append(np.sin(th) ** (n - 2 - k) * dt)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * math.pi / n_phi)
    axes.append(phi)
    waxes.append(np.full(n_phi, 2.0 * math.pi / n_phi))

    grids = np.meshgrid(*axes, indexing="ij")
    wgrids = np.meshgrid(*waxes, indexing="ij")
    w = np.ones_like(wgrids[0])
    for wg in wgrids:
        w = w * wg
    # spherical chart: x_1 = cos t1, x_2 = sin t1 cos t2, ...,
    # x_{n-1} = sin t1 .. sin t_{n-2} cos phi, x_n = (..) sin phi
    shape = grids[0].shape
    dirs = np.empty(shape + (n,))
    sprod = np.ones(shape)
    for k in range(n - 2):
        dirs[..., k] = sprod * np.cos(grids[k])
        sprod = sprod * np.sin(grids[k])
    dirs[..., n - 2] = sprod * np.cos(grids[n - 2])
    dirs[..., n - 1] = sprod * np.sin(grids[n - 2])
    return dirs.reshape(-1, n), w.reshape(-1)


def _real_sph_norm(l: int, m: int) -> float:
    num = (2 * l + 1) * math.factorial(l - m)
    den = 4.0 * math.pi * math.factorial(l + m)
    return math.sqrt(num / den)


def real_sph_harm(l: int, m: int, theta, phi):
    """Real orthonormal spherical harmonic on S^2.

    m = 0 is the zonal harmonic; m > 0 pairs with cos(m phi), m < 0 with
    sin(|m| phi). Orthonormal with respect to the standard surface measure.
    """
    am = abs(m)
    if am > l:
        raise GeometryError(f"harmonic order |m|={am} exceeds degree l={l}")
    p = lpmv(am, l, np.cos(theta))
    norm = _real_sph_norm(l, am)
    if m == 0:
        return norm * p
    if m > 0:
        return math.sqrt(2.0) * norm * p * np.cos(am * np.asarray(phi))
    return math.sqrt(2.0) * norm * p * np.sin(am * np.asarray(phi))


def to_polar(dirs):
    """Convert unit directions in R^3 to (theta, phi)."""
    dirs = np.asarray(dirs)
    z = np.clip(dirs[..., 2], -1.0, 1.0)
    theta = np.arccos(z)
    phi = np.arctan2(dirs[..., 1], dirs[..., 0])
    return theta, phi
