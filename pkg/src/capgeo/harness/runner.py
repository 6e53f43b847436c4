"""Orchestration: assemble ingredients and run every applicable evaluator.

Which checks run depends on the body class: convex bodies get the
capacity-area family, the chain bounds, and the classical curvature
integrals; the curvature-power capacity bounds additionally ask for
strictly positive mean curvature (rounded boxes, with their flat faces,
skip those); star-shaped non-convex radial graphs get only the bounds that
hold without convexity.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field

from capgeo.capacity.formulas import normalized_capacity
from capgeo.capacity.solver import SolverConfig, solve_p_capacity
from capgeo.geometry.functionals import functionals
from capgeo.geometry.meshing import mesh_body
from capgeo.geometry.spherical import unit_sphere_area
from capgeo.harness import evaluators as ev
from capgeo.harness.reports import Ingredients

DEFAULT_MESH_RESOLUTION = 96
DEFAULT_SWEEP_GRID = 64
RIESZ_MESH_RESOLUTION = 48


def thread_budget() -> int:
    raw = os.environ.get("CAPGEO_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_ingredients(
    body,
    p: float | None,
    solver_config: SolverConfig | None = None,
    mesh_resolution: int = DEFAULT_MESH_RESOLUTION,
    extra_exponents=(),
) -> Ingredients:
    """Mesh the body, evaluate the functionals, and (when p is given) solve
    for the capacity."""
    mesh = mesh_body(body, mesh_resolution)
    n = body.n
    exps = {1.0, 2.0, float(n)}
    if p is not None:
        exps.add(float(p))
    exps.update(float(q) for q in extra_exponents)
    f = functionals(mesh, sorted(exps))
    cap = None
    if p is not None:
        cap = solve_p_capacity(body, p, solver_config or SolverConfig(grid=DEFAULT_SWEEP_GRID))
    return Ingredients(
        body_descriptor=body.descriptor(), n=n, functionals=f, capacity=cap,
        mesh_resolution=mesh_resolution,
    )


@dataclass
class BodyEvaluation:
    body_descriptor: str
    p: float
    reports: list = dc_field(default_factory=list)
    scans: list = dc_field(default_factory=list)   # exploratory records

    @property
    def asserted_pass(self) -> bool:
        return all(r.passed for r in self.reports if r.asserted)


def evaluate_body(
    body,
    p: float,
    q: float | None = None,
    solver_config: SolverConfig | None = None,
    mesh_resolution: int = DEFAULT_MESH_RESOLUTION,
    with_riesz: bool = True,
    ingredients: Ingredients | None = None,
    riesz_mesh=None,
) -> BodyEvaluation:
    """Run every inequality applicable to one body at one p."""
    n = body.n
    if q is None and p < 2.0 and n > 2:
        q = 2.0
    branch_q = None if p >= 2.0 else q
    if ingredients is None:
        ingredients = build_ingredients(
            body, p, solver_config, mesh_resolution,
            extra_exponents=() if q is None else (q,),
        )
    out = BodyEvaluation(body_descriptor=body.descriptor(), p=p)
    rep = out.reports

    if body.convex:
        rep.append(ev.eval_eAV(ingredients, p))
        rep.append(ev.eval_e14(ingredients, p))
        rep.append(ev.eval_willmore(ingredients))
        e29e, sandwich = ev.eval_e29e_and_sandwich(ingredients, p)
        rep.extend([e29e, sandwich])
        if abs(p - 2.0) < 1e-12 and n == 3:
            rep.extend(ev.eval_e12_e13(ingredients))
            rep.append(ev.eval_e11_conjecture(ingredients))
        if body.h_positive:
            rep.append(ev.eval_e29(ingredients, p, branch_q))
            rep.extend(ev.eval_e210_AF_e20aa(ingredients, p, branch_q))
        elif abs(p - 2.0) < 1e-12:
            # flat-faced bodies: keep the classical integrals and the
            # log-convexity capacity bound, which need only H >= 0
            rep.extend(ev.eval_e210_AF_e20aa(ingredients, p, branch_q))
    else:
        # star-shaped only: the curvature-capacity bounds apply when the
        # sampled mean curvature stays positive (checked by the functionals)
        rep.append(ev.eval_e29(ingredients, p, branch_q))
        e29e, _ = ev.eval_e29e_and_sandwich(ingredients, p)
        rep.append(e29e)

    if with_riesz and n >= 3:
        if riesz_mesh is None:
            riesz_mesh = mesh_body(body, min(mesh_resolution, RIESZ_MESH_RESOLUTION))
        rep.extend(ev.eval_riesz_e23_e24(ingredients, riesz_mesh))
        if body.convex and abs(p - 2.0) < 1e-12:
            rep.append(ev.eval_e26(ingredients, riesz_mesh))
        out.scans.append(ev.scan_conjecture_e25(ingredients, riesz_mesh))
    return out


def run_sweep(
    bodies,
    p_values,
    solver_config: SolverConfig | None = None,
    mesh_resolution: int = DEFAULT_MESH_RESOLUTION,
    with_riesz: bool = True,
):
    """Corpus sweep: every body at every p, optionally in parallel.

    Results come back sorted by (body, p) regardless of scheduling, so
    repeated runs produce identical output. CAPGEO_THREADS caps the pool.
    """
    jobs = [(body, float(p)) for body in bodies for p in p_values]

    def _one(job):
        body, p = job
        return evaluate_body(
            body, p, solver_config=solver_config, mesh_resolution=mesh_resolution,
            with_riesz=with_riesz,
        )

    workers = min(thread_budget(), len(jobs))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_one, jobs))
    else:
        results = [_one(job) for job in jobs]
    results.sort(key=lambda r: (r.body_descriptor, r.p))
    return results


PLOT_COLUMNS = ["p", "cap_norm", "ratio_vs_area", "lower_const", "upper_bound"]


def plot_curves(body, p_values, solver_config=None, mesh_resolution=DEFAULT_MESH_RESOLUTION):
    """Rows of the two-sided chain for one body over a p grid.

    Columns: p, normalized capacity, its ratio against the area power, the
    sharp lower constant, and the Willmore-power upper bound. The ratio
    approaches 1 at both admissible endpoints of the p range.
    """
    mesh = mesh_body(body, mesh_resolution)
    n = body.n
    f = functionals(mesh, [1.0, float(n)])
    area_norm = f.area / unit_sphere_area(n)
    rows = []
    for p in sorted(float(p) for p in p_values):
        est = solve_p_capacity(body, p, solver_config or SolverConfig(grid=DEFAULT_SWEEP_GRID))
        cap_norm = normalized_capacity(est.value, n, p)
        ratio = cap_norm / area_norm ** ((n - p) / (n - 1.0))
        lower_const = (n * (p - 1.0) / (p * (n - 1.0))) ** (p - 1.0)
        upper = f.willmore_at(float(n)) ** ((p - 1.0) / (n - 1.0))
        rows.append((p, cap_norm, ratio, lower_const, upper))
    return rows, PLOT_COLUMNS
