"""capgeo: p-capacities, geometric functionals, inverse mean curvature flow,
and numerical verification of the sharp inequalities connecting them.

The package is organized around five parts:

* ``capgeo.geometry``   bodies, boundary meshes, area/volume/Willmore functionals
* ``capgeo.capacity``   closed-form capacities and the grid-based p-Dirichlet solver
* ``capgeo.flow``       inverse mean curvature flow for radial graphs
* ``capgeo.harness``    inequality evaluators, reports, and the body corpus
* ``capgeo.cli``        the ``capgeo`` command line front end
"""

__version__ = "0.1.0"

from capgeo.errors import (
    CapgeoError,
    FlowError,
    GeometryError,
    ParseError,
    QuadratureError,
    SolverError,
)
from capgeo.geometry import (
    Body,
    GeometricFunctionals,
    SurfaceMesh,
    functionals,
    mesh_body,
    parse_body,
    unit_sphere_area,
)
from capgeo.capacity import (
    PCapacityEstimate,
    PotentialField,
    SolverConfig,
    annulus_capacity,
    ball_capacity,
    capacity_radius,
    equilibrium_diagnostics,
    normalized_capacity,
    p1_limit_probe,
    solve_p_capacity,
)
from capgeo.flow import (
    FlowTrace,
    area_growth_check,
    evolve,
    flow_capacity_bound,
    up_growth_check,
)
from capgeo.harness import (
    InequalityReport,
    Ingredients,
    corpus_bodies,
    polya_szego_constants,
)

__all__ = [
    "__version__",
    "CapgeoError",
    "ParseError",
    "GeometryError",
    "SolverError",
    "FlowError",
    "QuadratureError",
    "Body",
    "SurfaceMesh",
    "GeometricFunctionals",
    "parse_body",
    "mesh_body",
    "functionals",
    "unit_sphere_area",
    "ball_capacity",
    "annulus_capacity",
    "normalized_capacity",
    "capacity_radius",
    "SolverConfig",
    "PotentialField",
    "PCapacityEstimate",
    "solve_p_capacity",
    "equilibrium_diagnostics",
    "p1_limit_probe",
    "FlowTrace",
    "evolve",
    "area_growth_check",
    "up_growth_check",
    "flow_capacity_bound",
    "InequalityReport",
    "Ingredients",
    "polya_szego_constants",
    "corpus_bodies",
]
