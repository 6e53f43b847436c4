import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capgeo.errors import GeometryError, ParseError
from capgeo.geometry import (
    Ball,
    Ellipsoid,
    RadialGraph,
    RoundedBox,
    Superellipsoid,
    check_sampled_convexity,
    mesh_body,
    parse_body,
    unit_sphere_area,
)
from capgeo.geometry.functionals import functionals

from oracles import ellipse_perimeter


class TestUnitSphereArea:
    def test_known_values(self):
        assert unit_sphere_area(2) == pytest.approx(2.0 * math.pi, rel=1e-14)
        assert unit_sphere_area(3) == pytest.approx(4.0 * math.pi, rel=1e-14)
        assert unit_sphere_area(4) == pytest.approx(2.0 * math.pi**2, rel=1e-14)

    def test_rejects_bad_dimension(self):
        for bad in (1, 0, -3, 2.5):
            with pytest.raises(GeometryError):
                unit_sphere_area(bad)

    @given(st.integers(min_value=2, max_value=20))
    def test_recurrence(self, n):
        # sigma_{n+1} = 2 pi sigma_{n-1} / n
        assert unit_sphere_area(n + 2) == pytest.approx(
            2.0 * math.pi * unit_sphere_area(n) / n, rel=1e-12
        )


class TestBodies:
    def test_degenerate_rejected(self):
        with pytest.raises(GeometryError):
            Ball(3, np.zeros(3), radius=1e-12)
        with pytest.raises(GeometryError):
            Ellipsoid(3, np.zeros(3), semi_axes=np.array([1.0, -1.0, 1.0]))
        with pytest.raises(GeometryError):
            Superellipsoid(3, np.zeros(3), semi_axes=np.ones(3), exponent=1.5)
        with pytest.raises(GeometryError):
            RoundedBox(3, np.zeros(3), half_widths=np.ones(3), rounding=1.5)

    def test_contains_and_boundary(self, prolate):
        dirs = np.array([[1.0, 0, 0], [0, 0, 1.0]])
        pts = prolate.boundary(dirs)
        assert pts[0] == pytest.approx([1.0, 0, 0])
        assert pts[1] == pytest.approx([0, 0, 2.0])
        assert prolate.contains([[0.9, 0, 0]])[0]
        assert not prolate.contains([[1.1, 0, 0]])[0]

    def test_transforms(self, prolate):
        moved = prolate.translated([1.0, 2.0, 3.0])
        assert moved.contains([[1.9, 2.0, 3.0]])[0]
        scaled = prolate.scaled(2.0)
        assert scaled.circumscribed_radius() == pytest.approx(4.0)
        ang = math.pi / 2
        q = np.array([[math.cos(ang), -math.sin(ang), 0],
                      [math.sin(ang), math.cos(ang), 0],
                      [0, 0, 1.0]])
        rot = prolate.rotated(q)
        assert rot.contains([[0, 0, 1.9]])[0]
        assert rot.circumscribed_radius() == pytest.approx(2.0)

    def test_sampled_convexity_catches_nonconvex(self):
        # a strong zonal wobble makes the radial graph non-star-convex
        body = RadialGraph(
            3, np.zeros(3),
            coeffs={(0, 0): math.sqrt(4 * math.pi), (4, 0): 1.2},
        )
        with pytest.raises(GeometryError):
            check_sampled_convexity(body)

    def test_radial_positivity_rejected(self):
        with pytest.raises(GeometryError):
            RadialGraph(3, np.zeros(3), coeffs={(0, 0): 0.1, (2, 0): 5.0})


class TestParsing:
    @pytest.mark.parametrize("text,kind,n", [
        ("ball:r=1", "ball", 3),
        ("ball:r=2.5;n=2", "ball", 2),
        ("ellipsoid:1,1,2", "ellipsoid", 3),
        ("ellipsoid:1,2", "ellipsoid", 2),
        ("superellipsoid:1,1,1;e=4", "superellipsoid", 3),
        ("roundedbox:1,1,1;r=0.2", "rounded_box", 3),
    ])
    def test_grammar(self, text, kind, n):
        body = parse_body(text)
        assert body.kind == kind
        assert body.n == n

    def test_round_trip(self):
        for text in ("ball:r=1.5", "ellipsoid:1,1,2", "superellipsoid:1,1,1;e=4",
                     "roundedbox:1,1,1;r=0.2"):
            body = parse_body(text)
            again = parse_body(body.descriptor())
            assert again.kind == body.kind
            assert again.circumscribed_radius() == pytest.approx(
                body.circumscribed_radius(), rel=1e-12
            )

    @given(st.floats(min_value=0.1, max_value=50.0))
    @settings(max_examples=25, deadline=None)
    def test_ball_radius_round_trip(self, r):
        body = parse_body(f"ball:r={r!r}")
        assert body.radius == pytest.approx(r, rel=1e-12)

    def test_errors(self):
        for bad in ("spheroid:1,1", "ball", "ellipsoid:", "superellipsoid:1,1,1",
                    "roundedbox:1,1,1", "ellipsoid:1,abc,2"):
            with pytest.raises(ParseError):
                parse_body(bad)

    def test_radial_file(self, tmp_path):
        import json

        path = tmp_path / "body.json"
        path.write_text(json.dumps({
            "harmonics": [
                {"l": 0, "m": 0, "coef": math.sqrt(4 * math.pi)},
                {"l": 2, "m": 0, "coef": 0.12},
            ]
        }))
        body = parse_body(f"radial:{path}")
        assert body.kind == "radial_graph"
        mesh = mesh_body(body, 32)
        assert mesh.mean_curvature.min() > 0

    def test_radial_samples_fit(self, tmp_path):
        import json

        rng = np.random.default_rng(7)
        dirs = rng.standard_normal((300, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        rows = [[*d, 1.0] for d in dirs]
        path = tmp_path / "samples.json"
        path.write_text(json.dumps({"samples": rows, "lmax": 2}))
        body = parse_body(f"radial:{path}")
        rho = body.radial(dirs)
        assert np.allclose(rho, 1.0, atol=1e-6)
