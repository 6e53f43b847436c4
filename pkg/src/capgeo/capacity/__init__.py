from capgeo.capacity.formulas import (
    annulus_capacity,
    ball_capacity,
    capacity_normalizer,
    capacity_radius,
    far_field_exponent,
    normalized_capacity,
)
from capgeo.capacity.solver import (
    PCapacityEstimate,
    PotentialField,
    SolverConfig,
    solve_p_capacity,
)
from capgeo.capacity.diagnostics import (
    EquilibriumDiagnostics,
    P1ProbeResult,
    equilibrium_diagnostics,
    p1_limit_probe,
)

__all__ = [
    "ball_capacity",
    "annulus_capacity",
    "capacity_normalizer",
    "normalized_capacity",
    "capacity_radius",
    "far_field_exponent",
    "SolverConfig",
    "PotentialField",
    "PCapacityEstimate",
    "solve_p_capacity",
    "EquilibriumDiagnostics",
    "equilibrium_diagnostics",
    "P1ProbeResult",
    "p1_limit_probe",
]
