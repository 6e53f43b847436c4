"""Inequality reports and the ingredient bundle the evaluators consume.

Every evaluator returns an InequalityReport: left and right side values with
the conservative end of the capacity bracket substituted wherever numerical
error could fake a pass, the slack, a tolerance derived from the ingredient
brackets (never a global epsilon), and provenance. Numeric fields are
quantized to 12 significant digits at construction so that emitted JSON
re-parses into an identical object.
"""

from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from capgeo.errors import GeometryError
from capgeo.capacity.formulas import normalized_capacity
from capgeo.capacity.solver import PCapacityEstimate
from capgeo.geometry.functionals import GeometricFunctionals
from capgeo.geometry.spherical import unit_sphere_area

INEQUALITY_IDS = (
    "eAV", "e14", "e29_first", "e29_second", "e29e", "sandwich_j", "limits_k",
    "e11_conjecture", "e12", "e13", "e23", "e24", "e25_scan", "e26",
    "e210", "AF", "e20aa", "willmore",
)
EXPLORATORY_IDS = ("e11_conjecture", "e25_scan")

MIN_REL_TOL = 1e-2


def _q12(x):
    """Quantize to 12 significant digits (the output precision contract)."""
    if x is None:
        return None
    return float(f"{float(x):.12g}")


@dataclass
class Ingredients:
    """Everything the evaluators need about one body at one p."""

    body_descriptor: str
    n: int
    functionals: GeometricFunctionals
    capacity: PCapacityEstimate | None = None
    mesh_resolution: int | None = None

    @property
    def area_norm(self):
        return self.functionals.area / unit_sphere_area(self.n)

    def willmore(self, q):
        return self.functionals.willmore_at(q)

    def cap_norm(self, p, end="central"):
        """Normalized capacity at the requested bracket end."""
        est = self.capacity
        if est is None:
            raise GeometryError("capacity estimate missing from ingredients")
        if abs(est.p - p) > 1e-12:
            raise GeometryError(f"capacity was solved at p={est.p}, not p={p}")
        val = {"central": est.value, "lower": est.lower, "upper": est.upper}[end]
        return normalized_capacity(val, self.n, p)

    def cap_halfwidth_norm(self, p):
        est = self.capacity
        return normalized_capacity(est.margin, self.n, p)


@dataclass
class InequalityReport:
    body: str
    n: int
    inequality: str
    left: float
    right: float
    slack: float
    tol: float
    passed: bool
    asserted: bool
    p: float | None = None
    q: float | None = None
    provenance: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        if self.inequality not in INEQUALITY_IDS:
            raise GeometryError(f"unknown inequality id {self.inequality!r}")
        for name in ("left", "right", "slack", "tol", "p", "q"):
            setattr(self, name, _q12(getattr(self, name)))
        self.passed = bool(self.passed)
        self.asserted = bool(self.asserted)
        self.provenance = {
            k: (_q12(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v)
            for k, v in self.provenance.items()
        }

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def make_report(
    inequality, ingredients, left, right, tol_floor, p=None, q=None,
    asserted=True, slack=None, provenance=None,
):
    """Assemble a report with the shared pass rule slack >= -tol."""
    scale = abs(right) if right else 1.0
    tol = max(float(tol_floor), MIN_REL_TOL * scale)
    if slack is None:
        slack = right - left
    passed = slack >= -tol
    prov = {"mesh_resolution": ingredients.mesh_resolution}
    if ingredients.capacity is not None:
        est = ingredients.capacity
        prov.update(
            capacity_value=est.value, capacity_lower=est.lower,
            capacity_upper=est.upper, capacity_grid_h=est.h,
            capacity_box_radius=est.box_radius,
        )
    prov.update(provenance or {})
    return InequalityReport(
        body=ingredients.body_descriptor, n=ingredients.n, inequality=inequality,
        left=left, right=right, slack=slack, tol=tol, passed=passed,
        asserted=asserted, p=p, q=q, provenance=prov,
    )
