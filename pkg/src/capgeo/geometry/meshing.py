"""Boundary discretization.

n = 3 bodies get a flat-triangle mesh: element weights are flat triangle
areas and element normals the triangle normals, so the vector areas of a
closed mesh sum to zero exactly and the divergence-theorem volume is the
exact polyhedron volume. Curvature is sampled analytically at the on-surface
point below each triangle centroid (finite differences of the normal for
radial graphs). n = 2 bodies get the polyline analogue. For n >= 4 only
balls and ellipsoids are supported, through tensor-product quadrature on a
polar chart instead of a simplicial mesh.
"""

import math
from dataclasses import dataclass

import numpy as np

from capgeo.errors import GeometryError
from capgeo.geometry.bodies import Ball, Body, Ellipsoid, RadialGraph
from capgeo.geometry.spherical import (
    chart_quadrature,
    sphere_triangulation,
    to_polar,
)

_MIN_RESOLUTION = 8
_MAX_RESOLUTION = 512
DEFAULT_RESOLUTION = 96


@dataclass(frozen=True)
class SurfaceMesh:
    """Quadrature view of a body boundary.

    points are on-surface element samples used for curvature and kernel
    integrals; flat_centroids/weights/normals describe the flat elements and
    are what area, volume, and closedness use.
    """

    n: int
    points: np.ndarray          # (M, n) on-surface samples
    flat_centroids: np.ndarray  # (M, n) flat element centroids
    weights: np.ndarray         # (M,) element areas d sigma
    normals: np.ndarray         # (M, n) outward unit normals
    mean_curvature: np.ndarray  # (M,) arithmetic-mean H
    resolution: int
    body_descriptor: str
    h_positive: bool
    vertices: np.ndarray | None = None  # (V, n), n = 3 only
    faces: np.ndarray | None = None     # (F, 3), n = 3 only

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    def closedness_flux(self) -> float:
        """Max component of the net vector area, relative to total area."""
        net = (self.normals * self.weights[:, None]).sum(axis=0)
        return float(np.abs(net).max() / self.weights.sum())

    def element_size(self) -> float:
        return float(np.median(self.weights) ** (1.0 / (self.n - 1)))


def _validate_resolution(resolution):
    if not float(resolution).is_integer():
        raise GeometryError("resolution must be an integer")
    resolution = int(resolution)
    if not (_MIN_RESOLUTION <= resolution <= _MAX_RESOLUTION):
        raise GeometryError(
            f"resolution {resolution} outside [{_MIN_RESOLUTION}, {_MAX_RESOLUTION}]"
        )
    return resolution


def mesh_body(body: Body, resolution: int = DEFAULT_RESOLUTION) -> SurfaceMesh:
    """Discretize the boundary of a body at the given resolution.

    Resolution counts polar divisions; azimuthal divisions are doubled.
    """
    resolution = _validate_resolution(resolution)
    if body.n == 2:
        return _mesh_curve(body, resolution)
    if body.n == 3:
        return _mesh_surface(body, resolution)
    return _mesh_chart(body, resolution)


# ---------------------------------------------------------------------------
# n = 2: closed polyline
# ---------------------------------------------------------------------------

def _mesh_curve(body, resolution):
    m = 8 * resolution
    ang = np.arange(m) * (2.0 * math.pi / m)
    dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    verts = body.boundary(dirs)

    nxt = np.roll(verts, -1, axis=0)
    edges = nxt - verts
    lengths = np.linalg.norm(edges, axis=1)
    normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1) / lengths[:, None]
    centroids = 0.5 * (verts + nxt)

    mid_ang = ang + math.pi / m
    mid_dirs = np.stack([np.cos(mid_ang), np.sin(mid_ang)], axis=1)
    pts, _, curv = _sample_curvature(body, mid_dirs, resolution)
    return SurfaceMesh(
        n=2, points=pts, flat_centroids=centroids, weights=lengths,
        normals=normals, mean_curvature=curv, resolution=resolution,
        body_descriptor=body.descriptor(), h_positive=body.h_positive,
    )


# ---------------------------------------------------------------------------
# n = 3: flat triangles on the lat/long sphere grid
# ---------------------------------------------------------------------------

def _mesh_surface(body, resolution):
    n_theta = resolution if resolution % 2 == 0 else resolution + 1
    n_phi = 2 * n_theta
    sphere_verts, faces = sphere_triangulation(n_theta, n_phi)
    verts = body.boundary(sphere_verts)

    tri = verts[faces]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    vec_area = 0.5 * cross
    weights = np.linalg.norm(vec_area, axis=1)
    if np.any(weights <= 0):
        raise GeometryError("degenerate triangle in boundary mesh")
    normals = vec_area / weights[:, None]
    centroids = tri.mean(axis=1)

    centroid_dirs = sphere_verts[faces].mean(axis=1)
    centroid_dirs /= np.linalg.norm(centroid_dirs, axis=1, keepdims=True)
    pts, _, curv = _sample_curvature(body, centroid_dirs, resolution)
    return SurfaceMesh(
        n=3, points=pts, flat_centroids=centroids, weights=weights,
        normals=normals, mean_curvature=curv, resolution=resolution,
        body_descriptor=body.descriptor(), h_positive=body.h_positive,
        vertices=verts, faces=faces,
    )


def _sample_curvature(body, dirs, resolution):
    if isinstance(body, RadialGraph):
        return _radial_graph_curvature(body, dirs, resolution)
    return body.curvature(dirs)


# ---------------------------------------------------------------------------
# radial graphs: curvature from finite differences of the unit normal
# ---------------------------------------------------------------------------

def _radial_graph_curvature(body, dirs, resolution):
    if body.n == 2:
        return _radial_curve_curvature(body, dirs)

    # dense half-offset (theta, phi) grid (no pole rows); differences of
    # position and unit normal give the shape operator
    nt = max(4 * resolution, 16 * (body.max_degree() + 1))
    npx = 2 * nt
    dt = math.pi / nt
    dp = 2.0 * math.pi / npx
    theta = (np.arange(nt) + 0.5) * dt
    phi = np.arange(npx) * dp
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    st, ct = np.sin(tt), np.cos(tt)
    u = np.stack([st * np.cos(pp), st * np.sin(pp), ct], axis=-1)
    rho = body.radial(u.reshape(-1, 3)).reshape(tt.shape)
    x = rho[..., None] * u

    x_t = _dtheta(x, dt)
    x_p = _dphi(x, dp)
    nu = np.cross(x_t, x_p)
    # orientation: align with the radial direction (star-shaped body)
    sgn = np.sign(np.einsum("ijk,ijk->ij", nu, u))
    sgn[sgn == 0] = 1.0
    nu *= sgn[..., None]
    nu /= np.linalg.norm(nu, axis=-1, keepdims=True)

    nu_t = _dtheta(nu, dt)
    nu_p = _dphi(nu, dp)
    E = np.einsum("ijk,ijk->ij", x_t, x_t)
    F = np.einsum("ijk,ijk->ij", x_t, x_p)
    G = np.einsum("ijk,ijk->ij", x_p, x_p)
    # shape operator entries via <d nu, dx>; sign chosen so spheres give +1/r
    e = np.einsum("ijk,ijk->ij", nu_t, x_t)
    f = 0.5 * (np.einsum("ijk,ijk->ij", nu_t, x_p) + np.einsum("ijk,ijk->ij", nu_p, x_t))
    g = np.einsum("ijk,ijk->ij", nu_p, x_p)
    denom = E * G - F * F
    h_grid = 0.5 * (e * G - 2.0 * f * F + g * E) / np.where(denom > 0, denom, 1.0)

    th_q, ph_q = to_polar(dirs)
    h = _bilinear_halfgrid(h_grid, th_q, ph_q, dt, dp)
    rho_q = body.radial(dirs)
    pts = body.to_world(rho_q[:, None] * dirs)
    # normals interpolated the same way, then renormalized
    nx = _bilinear_halfgrid(nu[..., 0], th_q, ph_q, dt, dp)
    ny = _bilinear_halfgrid(nu[..., 1], th_q, ph_q, dt, dp)
    nz = _bilinear_halfgrid(nu[..., 2], th_q, ph_q, dt, dp)
    nrm = np.stack([nx, ny, nz], axis=1)
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    return pts, body.vec_to_world(nrm), h


def _row_reflect(arr, i):
    """Row i of the half-offset polar grid under even pole reflection;
    crossing a pole lands on the opposite meridian (half-turn phi roll)."""
    m = arr.shape[0]
    half = arr.shape[1] // 2
    if 0 <= i < m:
        return arr[i]
    if i < 0:
        return np.roll(arr[-i - 1], half, axis=0)
    return np.roll(arr[2 * m - i - 1], half, axis=0)


def _dtheta(arr, dt):
    out = np.empty_like(arr)
    for i in range(arr.shape[0]):
        out[i] = (
            -_row_reflect(arr, i + 2) + 8.0 * _row_reflect(arr, i + 1)
            - 8.0 * _row_reflect(arr, i - 1) + _row_reflect(arr, i - 2)
        ) / (12.0 * dt)
    return out


def _dphi(arr, dp):
    return (
        -np.roll(arr, -2, axis=1) + 8.0 * np.roll(arr, -1, axis=1)
        - 8.0 * np.roll(arr, 1, axis=1) + np.roll(arr, 2, axis=1)
    ) / (12.0 * dp)


def _bilinear_halfgrid(grid, theta, phi, dt, dp):
    nt, npx = grid.shape
    ti = np.clip(theta / dt - 0.5, 0.0, nt - 1.0 - 1e-9)
    i0 = np.floor(ti).astype(int)
    ft = ti - i0
    pj = (phi % (2.0 * math.pi)) / dp
    j0 = np.floor(pj).astype(int) % npx
    fp = pj - np.floor(pj)
    j1 = (j0 + 1) % npx
    v00 = grid[i0, j0]
    v01 = grid[i0, j1]
    v10 = grid[i0 + 1, j0]
    v11 = grid[i0 + 1, j1]
    return (
        v00 * (1 - ft) * (1 - fp) + v01 * (1 - ft) * fp
        + v10 * ft * (1 - fp) + v11 * ft * fp
    )


def _radial_curve_curvature(body, dirs):
    m = 4096
    dp = 2.0 * math.pi / m
    ang = np.arange(m) * dp
    u = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    rho = body.radial(u)
    d1 = (
        -np.roll(rho, -2) + 8.0 * np.roll(rho, -1) - 8.0 * np.roll(rho, 1) + np.roll(rho, 2)
    ) / (12.0 * dp)
    d2 = (
        -np.roll(rho, -2) + 16.0 * np.roll(rho, -1) - 30.0 * rho
        + 16.0 * np.roll(rho, 1) - np.roll(rho, 2)
    ) / (12.0 * dp**2)
    w2 = rho**2 + d1**2
    kappa = (rho**2 + 2.0 * d1**2 - rho * d2) / w2**1.5

    ang_q = np.arctan2(dirs[:, 1], dirs[:, 0]) % (2.0 * math.pi)
    idx = ang_q / dp
    i0 = np.floor(idx).astype(int) % m
    f = idx - np.floor(idx)
    i1 = (i0 + 1) % m
    h = kappa[i0] * (1 - f) + kappa[i1] * f
    rho_q = body.radial(dirs)
    pts = body.to_world(rho_q[:, None] * dirs)
    tang_rho = d1[i0] * (1 - f) + d1[i1] * f
    # outward normal of a polar curve: (rho u - rho' u_perp)/W
    uperp = np.stack([-dirs[:, 1], dirs[:, 0]], axis=1)
    nrm = rho_q[:, None] * dirs - tang_rho[:, None] * uperp
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    return pts, body.vec_to_world(nrm), h


# ---------------------------------------------------------------------------
# n >= 4: tensor-product chart quadrature (ball / ellipsoid only)
# ---------------------------------------------------------------------------

def _mesh_chart(body, resolution):
    if not isinstance(body, (Ball, Ellipsoid)):
        raise GeometryError("n >= 4 meshes support only balls and ellipsoids")
    res = min(resolution, 64)  # tensor grid grows fast with n
    dirs, w_sphere = chart_quadrature(body.n, res)
    rho = body.radial(dirs)
    pts_body = rho[:, None] * dirs

    # surface measure of a radial graph: rho^{n-2} sqrt(rho^2 + |grad_S rho|^2)
    if isinstance(body, Ball):
        grad_s = np.zeros_like(pts_body)
    else:
        inv2 = 1.0 / body.semi_axes**2
        # rho = q^{-1/2}, q = sum u_i^2 / a_i^2; sphere gradient of rho
        grad_q = 2.0 * dirs * inv2[None, :]
        radial_part = np.einsum("ij,ij->i", grad_q, dirs)
        grad_q_tan = grad_q - radial_part[:, None] * dirs
        grad_s = -0.5 * rho[:, None] ** 3 * grad_q_tan
    slope2 = np.einsum("ij,ij->i", grad_s, grad_s)
    weights = rho ** (body.n - 2) * np.sqrt(rho**2 + slope2) * w_sphere

    _, nrm, h = body.curvature(dirs)
    pts = body.to_world(pts_body)
    return SurfaceMesh(
        n=body.n, points=pts, flat_centroids=pts, weights=weights,
        normals=nrm, mean_curvature=h, resolution=res,
        body_descriptor=body.descriptor(), h_positive=body.h_positive,
    )
