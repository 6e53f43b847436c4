from capgeo.flow.imcf import (
    FlowTrace,
    GrowthSlack,
    area_growth_check,
    evolve,
    flow_capacity_bound,
    normalized_flow_capacity_bound,
    radial_profile,
    stable_dt,
    up_growth_check,
)

__all__ = [
    "FlowTrace",
    "GrowthSlack",
    "evolve",
    "radial_profile",
    "stable_dt",
    "area_growth_check",
    "up_growth_check",
    "flow_capacity_bound",
    "normalized_flow_capacity_bound",
]
