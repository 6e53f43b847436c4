"""Body kinds: balls, ellipsoids, superellipsoids, rounded boxes, and radial
graphs over the sphere.

Every body is star-shaped about its center, so the boundary is the image of
the unit sphere under u -> center + rho(u) Q u for a positive radial function
rho evaluated in the body frame (rotation Q). Mean curvature is the
arithmetic mean of principal curvatures: H = 1/r on a radius-r sphere, and
H = div(grad F / |grad F|) / (n-1) for an implicit boundary {F = 0} with F
increasing outward.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from capgeo.errors import GeometryError, ParseError
from capgeo.geometry.spherical import real_sph_harm, to_polar

_MIN_LENGTH = 1e-9
_CONVEXITY_PAIRS = 10_000
_CONVEXITY_SEED = 20260314


def _as_matrix(q, n):
    if q is None:
        return None
    q = np.asarray(q, dtype=float)
    if q.shape != (n, n) or not np.allclose(q @ q.T, np.eye(n), atol=1e-10):
        raise GeometryError("rotation must be an orthogonal n x n matrix")
    return q


@dataclass
class Body:
    """Base class. Subclasses fill in the body-frame geometry."""

    n: int
    center: np.ndarray
    rotation: np.ndarray | None = None

    kind = "body"
    convex = False          # validated by sampling at construction
    h_positive = False      # H strictly positive on the whole boundary

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float).reshape(self.n)
        self.rotation = _as_matrix(self.rotation, self.n)
        self._validate()
        if self.convex:
            check_sampled_convexity(self)

    # --- frame helpers -------------------------------------------------
    def to_body(self, pts):
        pts = np.asarray(pts, dtype=float) - self.center
        if self.rotation is not None:
            pts = pts @ self.rotation  # Q^T x done row-wise
        return pts

    def to_world(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self.rotation is not None:
            pts = pts @ self.rotation.T
        return pts + self.center

    def vec_to_world(self, vecs):
        vecs = np.asarray(vecs, dtype=float)
        if self.rotation is not None:
            vecs = vecs @ self.rotation.T
        return vecs

    # --- geometry contract (body frame) --------------------------------
    def radial(self, dirs):
        """Radial function rho(u) for unit directions in the body frame."""
        raise NotImplementedError

    def _inside_body(self, pts, tol):
        raise NotImplementedError

    def _curvature(self, dirs):
        """Return (boundary pts, outward unit normals, mean curvature H),
        all in the body frame, at the given unit directions."""
        raise NotImplementedError

    def _validate(self):
        pass

    # --- world-frame API ------------------------------------------------
    def contains(self, pts, tol=0.0):
        """Inside test in world coordinates; tol > 0 fattens the body."""
        pts = np.atleast_2d(pts)
        return self._inside_body(self.to_body(pts), tol)

    def boundary(self, dirs):
        """Boundary points (world) for body-frame unit directions."""
        dirs = np.atleast_2d(dirs)
        rho = self.radial(dirs)
        return self.to_world(rho[:, None] * dirs)

    def curvature(self, dirs):
        dirs = np.atleast_2d(dirs)
        pts, nrm, h = self._curvature(dirs)
        return self.to_world(pts), self.vec_to_world(nrm), h

    def inscribed_radius(self) -> float:
        raise NotImplementedError

    def circumscribed_radius(self) -> float:
        raise NotImplementedError

    # --- transforms -----------------------------------------------------
    def scaled(self, lam: float):
        if lam <= 0:
            raise GeometryError("scale factor must be positive")
        return self._rebuild(lam, self.center * lam, self.rotation)

    def translated(self, shift):
        return self._rebuild(1.0, self.center + np.asarray(shift, dtype=float), self.rotation)

    def rotated(self, q):
        q = _as_matrix(q, self.n)
        new_rot = q if self.rotation is None else q @ self.rotation
        return self._rebuild(1.0, q @ self.center, new_rot)

    def _rebuild(self, lam, center, rotation):
        raise NotImplementedError

    def descriptor(self) -> str:
        raise NotImplementedError


def _implicit_curvature(pts, grad, hess, n):
    """Mean curvature of {F = 0} from gradient and Hessian of F.

    H = (lap F |g|^2 - g^T Hess g) / ((n-1) |g|^3), positive for convex
    bodies with F increasing outward.
    """
    g2 = np.einsum("ij,ij->i", grad, grad)
    gn = np.sqrt(g2)
    lap = np.einsum("ijj->i", hess)
    ghg = np.einsum("ij,ijk,ik->i", grad, hess, grad)
    h = (lap * g2 - ghg) / ((n - 1) * gn * g2)
    nrm = grad / gn[:, None]
    return nrm, h


@dataclass
class Ball(Body):
    radius: float = 1.0
    kind = "ball"
    convex = True
    h_positive = True

    def _validate(self):
        if self.radius < _MIN_LENGTH:
            raise GeometryError(f"ball radius must exceed {_MIN_LENGTH}")

    def radial(self, dirs):
        return np.full(len(np.atleast_2d(dirs)), self.radius)

    def _inside_body(self, pts, tol):
        return np.einsum("ij,ij->i", pts, pts) <= (self.radius + tol) ** 2

    def _curvature(self, dirs):
        pts = self.radius * dirs
        h = np.full(len(dirs), 1.0 / self.radius)
        return pts, dirs.copy(), h

    def inscribed_radius(self):
        return self.radius

    def circumscribed_radius(self):
        return self.radius

    def _rebuild(self, lam, center, rotation):
        return Ball(self.n, center, rotation, radius=self.radius * lam)

    def descriptor(self):
        return f"ball:r={self.radius:g}" + (f";n={self.n}" if self.n != 3 else "")


@dataclass
class Ellipsoid(Body):
    semi_axes: np.ndarray = field(default_factory=lambda: np.ones(3))
    kind = "ellipsoid"
    convex = True
    h_positive = True

    def _validate(self):
        self.semi_axes = np.asarray(self.semi_axes, dtype=float).reshape(self.n)
        if np.any(self.semi_axes < _MIN_LENGTH):
            raise GeometryError("ellipsoid semi-axes must be positive")

    def radial(self, dirs):
        q = np.einsum("ij,j->i", np.atleast_2d(dirs) ** 2, 1.0 / self.semi_axes**2)
        return 1.0 / np.sqrt(q)

    def _inside_body(self, pts, tol):
        a = self.semi_axes + tol
        return np.einsum("ij,j->i", pts**2, 1.0 / a**2) <= 1.0

    def _curvature(self, dirs):
        pts = self.radial(dirs)[:, None] * dirs
        inv2 = 1.0 / self.semi_axes**2
        grad = 2.0 * pts * inv2[None, :]
        hess = np.zeros((len(pts), self.n, self.n))
        idx = np.arange(self.n)
        hess[:, idx, idx] = 2.0 * inv2[None, :]
        nrm, h = _implicit_curvature(pts, grad, hess, self.n)
        return pts, nrm, h

    def inscribed_radius(self):
        return float(self.semi_axes.min())

    def circumscribed_radius(self):
        return float(self.semi_axes.max())

    def _rebuild(self, lam, center, rotation):
        return Ellipsoid(self.n, center, rotation, semi_axes=self.semi_axes * lam)

    def descriptor(self):
        return "ellipsoid:" + ",".join(f"{a:g}" for a in self.semi_axes)


@dataclass
class Superellipsoid(Body):
    semi_axes: np.ndarray = field(default_factory=lambda: np.ones(3))
    exponent: float = 4.0
    kind = "superellipsoid"
    convex = True
    h_positive = True  # strictly positive at all sample points off the axes

    def _validate(self):
        self.semi_axes = np.asarray(self.semi_axes, dtype=float).reshape(self.n)
        if np.any(self.semi_axes < _MIN_LENGTH):
            raise GeometryError("superellipsoid semi-axes must be positive")
        if self.exponent < 2.0:
            raise GeometryError("superellipsoid exponent must be >= 2")

    def _level(self, pts, axes):
        return np.sum(np.abs(pts / axes) ** self.exponent, axis=1)

    def radial(self, dirs):
        return self._level(np.atleast_2d(dirs), self.semi_axes) ** (-1.0 / self.exponent)

    def _inside_body(self, pts, tol):
        return self._level(pts, self.semi_axes + tol) <= 1.0

    def _curvature(self, dirs):
        e = self.exponent
        pts = self.radial(dirs)[:, None] * dirs
        s = np.abs(pts) / self.semi_axes
        grad = (e / self.semi_axes) * np.sign(pts) * s ** (e - 1)
        hess = np.zeros((len(pts), self.n, self.n))
        idx = np.arange(self.n)
        hess[:, idx, idx] = (e * (e - 1) / self.semi_axes**2) * s ** (e - 2)
        nrm, h = _implicit_curvature(pts, grad, hess, self.n)
        return pts, nrm, h

    def inscribed_radius(self):
        return float(self.semi_axes.min())

    def circumscribed_radius(self):
        # extreme point of sum |x_i/a_i|^e = 1 maximizing |x|
        a = self.semi_axes
        w = a ** (2.0 * self.exponent / (self.exponent - 2.0)) if self.exponent > 2 else a**2
        t = w / w.sum()
        x = a * t ** (1.0 / self.exponent)
        return float(np.linalg.norm(x))

    def _rebuild(self, lam, center, rotation):
        return Superellipsoid(
            self.n, center, rotation, semi_axes=self.semi_axes * lam, exponent=self.exponent
        )

    def descriptor(self):
        axes = ",".join(f"{a:g}" for a in self.semi_axes)
        return f"superellipsoid:{axes};e={self.exponent:g}"


@dataclass
class RoundedBox(Body):
    half_widths: np.ndarray = field(default_factory=lambda: np.ones(3))
    rounding: float = 0.2
    kind = "rounded_box"
    convex = True
    h_positive = False  # flat faces carry H = 0

    def _validate(self):
        self.half_widths = np.asarray(self.half_widths, dtype=float).reshape(self.n)
        if np.any(self.half_widths < _MIN_LENGTH):
            raise GeometryError("rounded box half-widths must be positive")
        if not (_MIN_LENGTH < self.rounding < self.half_widths.min()):
            raise GeometryError("rounding radius must lie in (0, min half-width)")

    @property
    def _core(self):
        return self.half_widths - self.rounding

    def _core_dist(self, pts):
        d = np.abs(pts) - self._core
        return np.linalg.norm(np.maximum(d, 0.0), axis=1)

    def _inside_body(self, pts, tol):
        return self._core_dist(pts) <= self.rounding + tol

    def radial(self, dirs):
        dirs = np.atleast_2d(dirs)
        lo = np.full(len(dirs), self._core.min())
        hi = np.full(len(dirs), np.linalg.norm(self.half_widths) + self.rounding)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            inside = self._core_dist(mid[:, None] * dirs) <= self.rounding
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        return 0.5 * (lo + hi)

    def _curvature(self, dirs):
        pts = self.radial(dirs)[:, None] * dirs
        proj = np.clip(pts, -self._core, self._core)
        d = pts - proj
        dn = np.linalg.norm(d, axis=1)
        nrm = d / dn[:, None]
        active = np.sum(np.abs(d) > 1e-12 * self.rounding, axis=1)
        h = (active - 1) / ((self.n - 1) * self.rounding)
        return pts, nrm, h

    def inscribed_radius(self):
        return float(self.half_widths.min())

    def circumscribed_radius(self):
        return float(np.linalg.norm(self._core) + self.rounding)

    def _rebuild(self, lam, center, rotation):
        return RoundedBox(
            self.n, center, rotation,
            half_widths=self.half_widths * lam, rounding=self.rounding * lam,
        )

    def descriptor(self):
        widths = ",".join(f"{w:g}" for w in self.half_widths)
        return f"roundedbox:{widths};r={self.rounding:g}"


@dataclass
class RadialGraph(Body):
    """Star-shaped body given by a smooth positive radial function.

    The radial function is a finite expansion in real spherical harmonics
    (n=3) or a Fourier series (n=2); coefficients come from a descriptor
    file, either directly or as a least-squares fit to tabulated
    (direction, radius) samples. Curvature is computed by finite differences
    of the unit normal over the parameter grid, not from closed forms.
    """

    coeffs: dict = field(default_factory=dict)  # {(l, m): c} or {k: (a_k, b_k)}
    kind = "radial_graph"
    convex = False
    h_positive = False
    source: str = ""

    def _validate(self):
        if self.n not in (2, 3):
            raise GeometryError("radial_graph bodies support n in {2, 3}")
        if not self.coeffs:
            raise GeometryError("radial_graph needs at least one coefficient")
        probe = _fibonacci_dirs(self.n, 2048)
        if self.radial(probe).min() <= _MIN_LENGTH:
            raise GeometryError("radial function must be strictly positive")

    def radial(self, dirs):
        dirs = np.atleast_2d(dirs)
        if self.n == 2:
            ang = np.arctan2(dirs[:, 1], dirs[:, 0])
            rho = np.zeros(len(dirs))
            for k, (a, b) in self.coeffs.items():
                if k == 0:
                    rho = rho + a
                else:
                    rho = rho + a * np.cos(k * ang) + b * np.sin(k * ang)
            return rho
        theta, phi = to_polar(dirs)
        rho = np.zeros(len(dirs))
        for (l, m), c in self.coeffs.items():
            rho = rho + c * real_sph_harm(l, m, theta, phi)
        return rho

    def _inside_body(self, pts, tol):
        r = np.linalg.norm(pts, axis=1)
        safe = np.where(r > 1e-300, r, 1.0)
        rho = self.radial(pts / safe[:, None])
        return r <= rho + tol

    def _curvature(self, dirs):
        # delegated to the mesher, which differences normals on its own grid
        raise GeometryError("radial_graph curvature is grid-based; use mesh_body")

    def inscribed_radius(self):
        return float(self.radial(_fibonacci_dirs(self.n, 4096)).min())

    def circumscribed_radius(self):
        return float(self.radial(_fibonacci_dirs(self.n, 4096)).max())

    def _rebuild(self, lam, center, rotation):
        if self.n == 2:
            coeffs = {k: (a * lam, b * lam) for k, (a, b) in self.coeffs.items()}
        else:
            coeffs = {lm: c * lam for lm, c in self.coeffs.items()}
        return RadialGraph(self.n, center, rotation, coeffs=coeffs, source=self.source)

    def descriptor(self):
        return f"radial:{self.source}" if self.source else "radial:<inline>"

    def max_degree(self):
        if self.n == 2:
            return max(self.coeffs)
        return max(l for l, _ in self.coeffs)


def _fibonacci_dirs(n, count):
    """Quasi-uniform unit directions for sampling checks."""
    if n == 2:
        ang = np.linspace(0.0, 2.0 * math.pi, count, endpoint=False)
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)
    if n == 3:
        i = np.arange(count) + 0.5
        z = 1.0 - 2.0 * i / count
        r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        golden = math.pi * (3.0 - math.sqrt(5.0))
        ang = golden * i
        return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)
    rng = np.random.default_rng(12345)
    v = rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def check_sampled_convexity(body, pairs=_CONVEXITY_PAIRS, seed=_CONVEXITY_SEED):
    """Sampled convexity test: midpoints of random boundary pairs lie inside.

    Raises GeometryError on failure. This certifies nothing; it catches
    parameter mistakes (e.g. exponents below 2 sneaking in).
    """
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((2 * pairs, body.n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    pts = body.boundary(u)
    mids = 0.5 * (pts[:pairs] + pts[pairs:])
    tol = 1e-9 * body.circumscribed_radius()
    ok = body.contains(mids, tol=tol)
    if not np.all(ok):
        bad = int(np.count_nonzero(~ok))
        raise GeometryError(f"sampled convexity failed for {bad}/{pairs} midpoints")
    return True


# ---------------------------------------------------------------------------
# descriptor grammar: ball:r=1  ellipsoid:1,1,2  superellipsoid:1,1,1;e=4
#                     roundedbox:1,1,1;r=0.2     radial:<path>
# ---------------------------------------------------------------------------

def _split_opts(rest):
    parts = rest.split(";")
    head = parts[0]
    opts = {}
    for raw in parts[1:]:
        if "=" not in raw:
            raise ParseError(f"malformed option {raw!r} in body descriptor")
        key, val = raw.split("=", 1)
        opts[key.strip()] = val.strip()
    return head, opts


def _floats(csv, what):
    try:
        vals = [float(tok) for tok in csv.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ParseError(f"bad {what} list {csv!r}") from exc
    if not vals:
        raise ParseError(f"empty {what} list")
    return np.asarray(vals)


def parse_body(text: str) -> Body:
    """Parse the compact body descriptor grammar used by the CLI."""
    if ":" not in text:
        raise ParseError(f"body descriptor {text!r} lacks a kind prefix")
    kind, rest = text.split(":", 1)
    kind = kind.strip().lower()
    try:
        if kind == "ball":
            head, opts = _split_opts(rest)
            if "=" in head:
                key, val = head.split("=", 1)
                opts.setdefault(key.strip(), val.strip())
            r = float(opts.get("r", "1"))
            n = int(opts.get("n", 3))
            center = _floats(opts["c"], "center") if "c" in opts else np.zeros(n)
            return Ball(n, center, radius=r)
        if kind == "ellipsoid":
            head, opts = _split_opts(rest)
            axes = _floats(head, "semi-axis")
            n = len(axes)
            center = _floats(opts["c"], "center") if "c" in opts else np.zeros(n)
            return Ellipsoid(n, center, semi_axes=axes)
        if kind == "superellipsoid":
            head, opts = _split_opts(rest)
            axes = _floats(head, "semi-axis")
            if "e" not in opts:
                raise ParseError("superellipsoid descriptor needs ;e=<exponent>")
            return Superellipsoid(len(axes), np.zeros(len(axes)), semi_axes=axes,
                                  exponent=float(opts["e"]))
        if kind in ("roundedbox", "rounded_box"):
            head, opts = _split_opts(rest)
            widths = _floats(head, "half-width")
            if "r" not in opts:
                raise ParseError("roundedbox descriptor needs ;r=<radius>")
            return RoundedBox(len(widths), np.zeros(len(widths)), half_widths=widths,
                              rounding=float(opts["r"]))
        if kind == "radial":
            return load_radial_graph(rest.strip())
    except (GeometryError, ParseError):
        raise
    except Exception as exc:
        raise ParseError(f"could not parse body descriptor {text!r}: {exc}") from exc
    raise ParseError(f"unknown body kind {kind!r}")


def load_radial_graph(path: str) -> RadialGraph:
    """Load a radial-graph body from a JSON file.

    Accepted layouts:
      {"harmonics": [{"l": 0, "m": 0, "coef": 3.5}, ...], "center": [...]}
      {"fourier": {"a0": 1.0, "cos": [..], "sin": [..]}}           (n = 2)
      {"samples": [[ux, uy, uz, r], ...], "lmax": 4}               (fit)
    """
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read radial body file {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path!r}: {exc}") from exc

    center = np.asarray(data.get("center", None), dtype=float) if "center" in data else None
    if "fourier" in data:
        spec = data["fourier"]
        coeffs = {0: (float(spec.get("a0", 1.0)), 0.0)}
        for k, a in enumerate(spec.get("cos", []), start=1):
            coeffs.setdefault(k, (0.0, 0.0))
            coeffs[k] = (float(a), coeffs[k][1])
        for k, b in enumerate(spec.get("sin", []), start=1):
            coeffs.setdefault(k, (0.0, 0.0))
            coeffs[k] = (coeffs[k][0], float(b))
        c = center if center is not None else np.zeros(2)
        return RadialGraph(2, c, coeffs=coeffs, source=path)
    if "harmonics" in data:
        coeffs = {}
        for item in data["harmonics"]:
            coeffs[(int(item["l"]), int(item["m"]))] = float(item["coef"])
        c = center if center is not None else np.zeros(3)
        return RadialGraph(3, c, coeffs=coeffs, source=path)
    if "samples" in data:
        samples = np.asarray(data["samples"], dtype=float)
        if samples.ndim != 2 or samples.shape[1] != 4:
            raise ParseError("samples must be rows of [ux, uy, uz, r]")
        lmax = int(data.get("lmax", 4))
        dirs = samples[:, :3]
        dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = samples[:, 3]
        theta, phi = to_polar(dirs)
        cols, keys = [], []
        for l in range(lmax + 1):
            for m in range(-l, l + 1):
                cols.append(real_sph_harm(l, m, theta, phi))
                keys.append((l, m))
        a = np.stack(cols, axis=1)
        sol, *_ = np.linalg.lstsq(a, radii, rcond=None)
        coeffs = {k: float(v) for k, v in zip(keys, sol) if abs(v) > 1e-14}
        c = center if center is not None else np.zeros(3)
        return RadialGraph(3, c, coeffs=coeffs, source=path)
    raise ParseError(f"{path!r} has none of: harmonics, fourier, samples")
