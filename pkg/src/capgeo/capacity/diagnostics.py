"""Equilibrium-potential diagnostics and the p -> 1 extrapolation probe.

The converged potential of a plain-truncated solve (outer value 0) carries
three checkable structures: the flux integral of |grad u|^{p-1} over a level
set {u = t} is independent of t, the superlevel sets {u >= t} are convex for
convex bodies, and re-solving with {u >= t} as the obstacle in the same box
scales the truncated capacity by exactly t^{1-p}. Reported fluxes and
capacities are rescaled by the base solve's truncation correction
(corrected / raw energy), which maps the truncated values onto free-space
ones and is exact for centered balls.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.ndimage import map_coordinates

from capgeo.errors import SolverError
from capgeo.capacity.formulas import capacity_normalizer
from capgeo.capacity.solver import PCapacityEstimate, SolverConfig, solve_p_capacity

DEFAULT_LEVELS = (0.2, 0.4, 0.6, 0.8)


@dataclass
class LevelSetRecord:
    level: float
    flux_raw: float
    flux_corrected: float
    convexity_pass: bool
    convexity_worst: float     # most negative u(mid) - t, in grid-slack units
    vertex_count: int


@dataclass
class EquilibriumDiagnostics:
    body_descriptor: str
    p: float
    levels: list = dc_field(default_factory=list)   # LevelSetRecord
    flux_spread: float = 0.0                        # (max-min)/mean, corrected
    scaling_level: float | None = None
    scaling_ratio: float | None = None              # resolved / (t^{1-p} base), raw
    scaling_capacity: float | None = None           # gauge value, free-space units

    def flux_values(self):
        return [rec.flux_corrected for rec in self.levels]


class _LevelSetBody:
    """Superlevel set {u >= t} of a grid field, wearing the Body interface
    pieces the solver needs (contains, radii, center, descriptor)."""

    def __init__(self, potential, level, verts):
        self.n = potential.n
        self._potential = potential
        self._level = level
        self.center = potential.origin + 0.5 * potential.h * (
            np.asarray(potential.values.shape) - 1
        )
        rad = np.linalg.norm(verts - self.center[None, :], axis=1)
        self._r_in = float(rad.min())
        self._r_out = float(rad.max())

    def contains(self, pts, tol=0.0):
        return self._potential.interp(pts) >= self._level

    def inscribed_radius(self):
        return self._r_in

    def circumscribed_radius(self):
        return self._r_out

    def descriptor(self):
        return f"levelset:u>={self._level:g} of {self._potential.body_descriptor}"


def _extract_level_set(potential, level):
    """Marching extraction of {u = t}: returns (verts, areas, centroids)."""
    if potential.n == 3:
        from skimage.measure import marching_cubes

        verts, faces, _, _ = marching_cubes(
            potential.values, level=level,
            spacing=(potential.h,) * 3,
        )
        verts = verts + potential.origin[None, :]
        tri = verts[faces]
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        areas = 0.5 * np.linalg.norm(cross, axis=1)
        centroids = tri.mean(axis=1)
        return verts, areas, centroids
    from skimage.measure import find_contours

    contours = find_contours(potential.values, level)
    if not contours:
        raise SolverError(f"no contour found at level {level}")
    loop = max(contours, key=len) * potential.h + potential.origin[None, :]
    seg = np.roll(loop, -1, axis=0) - loop
    lengths = np.linalg.norm(seg, axis=1)
    mids = loop + 0.5 * seg
    return loop, lengths, mids


def _masked_gradient_grids(potential):
    """Central-difference gradients, switched to outward one-sided stencils
    at nodes whose central stencil would straddle the obstacle plateau (the
    potential has a gradient kink there and central differences smear it).
    """
    f = potential.values
    h = potential.h
    inside = potential.mask == 1
    grads = list(np.gradient(f, h, edge_order=2))
    nd = f.ndim
    for d in range(nd):
        g = grads[d]
        fwd = np.roll(inside, -1, axis=d)   # neighbor at +1 is inside
        bwd = np.roll(inside, 1, axis=d)    # neighbor at -1 is inside
        # one-sided away from the inside neighbor, second order
        f1 = np.roll(f, -1, axis=d)
        f2 = np.roll(f, -2, axis=d)
        fm1 = np.roll(f, 1, axis=d)
        fm2 = np.roll(f, 2, axis=d)
        use_fwd = bwd & ~fwd & ~inside
        use_bwd = fwd & ~bwd & ~inside
        g[use_fwd] = ((-3.0 * f + 4.0 * f1 - f2) / (2.0 * h))[use_fwd]
        g[use_bwd] = ((3.0 * f - 4.0 * fm1 + fm2) / (2.0 * h))[use_bwd]
    return grads


def _interp_gradient_mag(potential, pts):
    grads = _masked_gradient_grids(potential)
    coords = (pts - potential.origin[None, :]) / potential.h
    comps = [map_coordinates(g, coords.T, order=1, mode="nearest") for g in grads]
    out = np.zeros(len(pts))
    for c in comps:
        out += c * c
    return np.sqrt(out)


def equilibrium_diagnostics(
    estimate: PCapacityEstimate,
    body,
    levels=DEFAULT_LEVELS,
    scaling_level=0.5,
    scaling_config: SolverConfig | None = None,
    convexity_pairs=2000,
    seed=0,
) -> EquilibriumDiagnostics:
    """Level-set diagnostics of a converged plain-truncation solve.

    Checks flux constancy across the given levels, sampled convexity of each
    extracted level set, and (when scaling_level is not None) the t^{1-p}
    law by re-solving with the superlevel set as obstacle in the same box.
    """
    potential = estimate.field
    if potential is None:
        raise SolverError("estimate carries no field; re-solve with keep_field")
    if potential.outer_level != 0.0:
        raise SolverError(
            "diagnostics need a plain-truncation solve (truncation='plain')"
        )
    p = potential.p
    gauge = estimate.corrected / estimate.raw_energy
    rng = np.random.default_rng(seed)

    box_r = estimate.box_radius
    center = body.center
    records = []
    for t in levels:
        verts, areas, centroids = _extract_level_set(potential, t)
        vert_rad = np.linalg.norm(verts - center[None, :], axis=1)
        if vert_rad.max() > box_r - 2.0 * potential.h:
            raise SolverError(f"level set u={t} touches the outer boundary")
        gmag = _interp_gradient_mag(potential, centroids)
        flux_raw = float(np.sum(gmag ** (p - 1.0) * areas))

        # sampled convexity: u at midpoints of random vertex pairs >= t - slack
        k = min(convexity_pairs, len(verts) // 2)
        idx = rng.choice(len(verts), size=(k, 2))
        mids = 0.5 * (verts[idx[:, 0]] + verts[idx[:, 1]])
        u_mid = potential.interp(mids)
        slack = 0.75 * potential.h * np.median(gmag)
        worst = float((u_mid - t).min())
        records.append(
            LevelSetRecord(
                level=t, flux_raw=flux_raw, flux_corrected=flux_raw * gauge,
                convexity_pass=bool(worst >= -slack),
                convexity_worst=worst / slack if slack > 0 else 0.0,
                vertex_count=len(verts),
            )
        )

    fluxes = np.array([r.flux_corrected for r in records])
    spread = float((fluxes.max() - fluxes.min()) / fluxes.mean())
    diag = EquilibriumDiagnostics(
        body_descriptor=body.descriptor(), p=p, levels=records, flux_spread=spread
    )

    if scaling_level is not None:
        t = scaling_level
        verts, _, _ = _extract_level_set(potential, t)
        obstacle = _LevelSetBody(potential, t, verts)
        cfg = scaling_config or SolverConfig()
        cfg = SolverConfig(
            grid=cfg.grid, box_radius=box_r, tol=cfg.tol, max_iter=cfg.max_iter,
            truncation="plain", refine_passes=0, warm_chain=cfg.warm_chain,
            enforce_clearance=False,
        )
        resolved = solve_p_capacity(obstacle, p, cfg)
        expected_raw = t ** (1.0 - p) * estimate.raw_energy
        diag.scaling_level = t
        diag.scaling_ratio = resolved.raw_energy / expected_raw
        diag.scaling_capacity = resolved.raw_energy * gauge
    return diag


# ---------------------------------------------------------------------------
# p -> 1 extrapolation probe
# ---------------------------------------------------------------------------

@dataclass
class P1ProbeResult:
    p_values: list
    capacities: list
    extrapolated: float       # limit estimate of cap_p as p -> 1
    area: float               # boundary area from the mesh
    relative_gap: float
    fit_residual: float


def p1_limit_probe(
    body,
    p_sequence=(1.4, 1.3, 1.2, 1.1),
    config: SolverConfig | None = None,
    area: float | None = None,
    max_residual=0.05,
) -> P1ProbeResult:
    """Extrapolate cap_p to p = 1 and compare with the boundary area.

    The singular prefactor ((p-1)/(n-p))^{1-p} is divided out before a
    log-linear fit in p, which is exact for balls; the raw capacity itself
    approaches the limit only logarithmically and extrapolates poorly.
    """
    ps = sorted(set(float(p) for p in p_sequence), reverse=True)
    if not ps or not (1.05 <= min(ps) and max(ps) <= 1.5):
        raise SolverError("p sequence must lie within [1.05, 1.5]")
    config = config or SolverConfig(grid=64)

    caps = []
    for p in ps:
        est = solve_p_capacity(body, p, config)
        caps.append(est.value)

    n = body.n
    from capgeo.geometry.spherical import unit_sphere_area

    sigma = unit_sphere_area(n)
    z = [math.log(c / capacity_normalizer(n, p) * sigma) for c, p in zip(caps, ps)]
    coeffs = np.polyfit(ps, z, 1)
    fit = np.polyval(coeffs, ps)
    residual = float(np.sqrt(np.mean((np.asarray(z) - fit) ** 2)))
    if residual > max_residual:
        raise SolverError(f"p->1 extrapolation residual {residual:.3g} too large")
    extrapolated = float(math.exp(np.polyval(coeffs, 1.0)))

    if area is None:
        from capgeo.geometry import functionals, mesh_body

        area = functionals(mesh_body(body)).area
    gap = abs(extrapolated - area) / area
    return P1ProbeResult(
        p_values=ps, capacities=caps, extrapolated=extrapolated,
        area=area, relative_gap=gap, fit_residual=residual,
    )
