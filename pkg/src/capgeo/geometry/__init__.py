from capgeo.geometry.bodies import (
    Ball,
    Body,
    Ellipsoid,
    RadialGraph,
    RoundedBox,
    Superellipsoid,
    check_sampled_convexity,
    load_radial_graph,
    parse_body,
)
from capgeo.geometry.functionals import GeometricFunctionals, functionals
from capgeo.geometry.meshing import DEFAULT_RESOLUTION, SurfaceMesh, mesh_body
from capgeo.geometry.spherical import unit_sphere_area

__all__ = [
    "Body",
    "Ball",
    "Ellipsoid",
    "Superellipsoid",
    "RoundedBox",
    "RadialGraph",
    "parse_body",
    "load_radial_graph",
    "check_sampled_convexity",
    "SurfaceMesh",
    "mesh_body",
    "DEFAULT_RESOLUTION",
    "GeometricFunctionals",
    "functionals",
    "unit_sphere_area",
]
