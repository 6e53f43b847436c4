"""Inverse mean curvature flow for radial graphs.

Supported symmetry classes: planar curves (n = 2, radial function of the
polar angle) and axisymmetric surfaces in R^3 (radial function of the polar
angle, revolved). The hypersurface moves with outward normal speed equal to
the reciprocal of the curvature divergence (sum of principal curvatures),
so spheres satisfy r(t) = r0 exp(t/(n-1)) and area grows exactly like e^t.

The radial function obeys d rho / dt = W / (rho * H_div) with
W = sqrt(rho^2 + rho_theta^2): the normal speed divided by the cosine
between the radial direction and the normal. Spatial derivatives use
4th-order central stencils, periodic in the angle for curves and reflected
across the poles for axisymmetric surfaces. Time stepping is explicit Euler
with a stability bound derived from the linearized diffusion coefficient.

Recorded functionals use the arithmetic-mean curvature H (H = 1/r on a
radius-r sphere): area, the flow functionals
U_p = (n-1)^{p-1} * integral H^{p-1} d sigma / sigma_{n-1}, and the
Willmore integral of H^{n-1}.
"""

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from capgeo.errors import FlowError
from capgeo.geometry.bodies import Ball, Body, Ellipsoid, RadialGraph
from capgeo.geometry.spherical import unit_sphere_area

DEFAULT_SAMPLES = 256
_CFL = 0.2


# ---------------------------------------------------------------------------
# initial data
# ---------------------------------------------------------------------------

def radial_profile(body: Body, samples: int = DEFAULT_SAMPLES):
    """Radial samples of a flow-compatible body.

    n = 2: any radial body, rho over a uniform periodic angle grid.
    n = 3: axisymmetric bodies only (ball, ellipsoid with two equal leading
    semi-axes, zonal radial graphs), rho over half-offset polar angles.
    """
    if body.n == 2:
        dp = 2.0 * math.pi / samples
        ang = np.arange(samples) * dp
        dirs = np.stack([np.cos(ang), np.sin(ang)], axis=1)
        return body.radial(dirs), ang, dp
    if body.n != 3:
        raise FlowError("flow supports planar curves and axisymmetric surfaces")
    dt_ang = math.pi / samples
    theta = (np.arange(samples) + 0.5) * dt_ang
    if isinstance(body, Ball):
        return np.full(samples, body.radius), theta, dt_ang
    if isinstance(body, Ellipsoid):
        a = body.semi_axes
        if abs(a[0] - a[1]) > 1e-12 * a.max():
            raise FlowError("ellipsoid initial data must be axisymmetric (a, a, c)")
        rho = 1.0 / np.sqrt(np.sin(theta) ** 2 / a[0] ** 2 + np.cos(theta) ** 2 / a[2] ** 2)
        return rho, theta, dt_ang
    if isinstance(body, RadialGraph):
        phis = np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)
        probes = []
        for ph in phis:
            dirs = np.stack(
                [np.sin(theta) * math.cos(ph), np.sin(theta) * math.sin(ph), np.cos(theta)],
                axis=1,
            )
            probes.append(body.radial(dirs))
        probes = np.stack(probes)
        if probes.ptp(axis=0).max() > 1e-8 * probes.max():
            raise FlowError("radial_graph initial data must be axisymmetric")
        return probes[0], theta, dt_ang
    raise FlowError(f"unsupported initial body kind {body.kind!r}")


# ---------------------------------------------------------------------------
# smooth derivatives
# ---------------------------------------------------------------------------

def _roll_reflect(rho, shift):
    """Index rho at i + shift under even reflection across both poles.

    Half-offset grid: the reflection of sample -1 is sample 0, of sample
    m is sample m-1 (mirror without repeating the boundary node).
    """
    m = len(rho)
    idx = np.arange(m) + shift
    idx = np.where(idx < 0, -idx - 1, idx)
    idx = np.where(idx >= m, 2 * m - idx - 1, idx)
    return rho[idx]


def _derivs(rho, step, periodic):
    if periodic:
        r = lambda s: np.roll(rho, -s)
    else:
        r = lambda s: _roll_reflect(rho, s)
    d1 = (-r(2) + 8.0 * r(1) - 8.0 * r(-1) + r(-2)) / (12.0 * step)
    d2 = (-r(2) + 16.0 * r(1) - 30.0 * rho + 16.0 * r(-1) - r(-2)) / (12.0 * step**2)
    return d1, d2


# ---------------------------------------------------------------------------
# curvature and speed
# ---------------------------------------------------------------------------

def _curve_state(rho, ang, dp):
    d1, d2 = _derivs(rho, dp, periodic=True)
    w2 = rho**2 + d1**2
    w = np.sqrt(w2)
    kappa = (rho**2 + 2.0 * d1**2 - rho * d2) / (w2 * w)
    h_div = kappa                      # n = 2: single principal curvature
    h_mean = kappa
    dsigma = w * dp                    # arc length element
    speed = w / (rho * h_div)          # d rho / dt
    diffusion = 1.0 / (h_div**2 * w2)  # d speed / d rho'' (explicit stability)
    return h_mean, h_div, dsigma, speed, diffusion


def _axisym_state(rho, theta, dt_ang):
    d1, d2 = _derivs(rho, dt_ang, periodic=False)
    w2 = rho**2 + d1**2
    w = np.sqrt(w2)
    st, ct = np.sin(theta), np.cos(theta)
    kappa_m = (rho**2 + 2.0 * d1**2 - rho * d2) / (w2 * w)
    kappa_p = (rho * st - d1 * ct) / (w * rho * st)
    h_div = kappa_m + kappa_p
    h_mean = 0.5 * h_div
    dsigma = 2.0 * math.pi * rho * st * w * dt_ang
    speed = w / (rho * h_div)
    diffusion = 1.0 / (h_div**2 * w2)  # d speed / d rho''
    return h_mean, h_div, dsigma, speed, diffusion


def _state(rho, ang, step, n):
    if n == 2:
        return _curve_state(rho, ang, step)
    return _axisym_state(rho, ang, step)


def stable_dt(body_or_rho, samples: int = DEFAULT_SAMPLES, n: int | None = None) -> float:
    """Stability bound for the explicit stepper at the initial surface."""
    if isinstance(body_or_rho, Body):
        rho, ang, step = radial_profile(body_or_rho, samples)
        n = body_or_rho.n
    else:
        rho = np.asarray(body_or_rho)
        if n is None:
            raise FlowError("stable_dt with raw samples needs the dimension n")
        step = (2.0 * math.pi if n == 2 else math.pi) / len(rho)
        ang = (np.arange(len(rho)) + (0.0 if n == 2 else 0.5)) * step
    h_mean, _, _, _, diffusion = _state(rho, ang, step, n)
    if np.any(h_mean <= 0):
        raise FlowError("initial surface has H <= 0")
    anisotropy = h_mean.min() / h_mean.max()
    return float(_CFL * step**2 * anisotropy / max(diffusion.max(), 1e-300))


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass
class FlowTrace:
    """Time series of one flow run."""

    n: int
    body_descriptor: str
    dt: float
    p_list: tuple
    times: np.ndarray
    areas: np.ndarray
    u_p: dict                      # p -> array over times
    willmore: np.ndarray           # integral H^{n-1} d sigma / sigma_{n-1}
    anisotropy: np.ndarray         # max rho / min rho per record
    final_rho: np.ndarray
    angles: np.ndarray

    def to_rows(self):
        """CSV rows: t, area, U_p columns, willmore_n."""
        cols = [self.times, self.areas]
        for p in self.p_list:
            cols.append(self.u_p[p])
        cols.append(self.willmore)
        return np.stack(cols, axis=1)

    def column_names(self):
        return ["t", "area"] + [f"U_p={p:g}" for p in self.p_list] + [
            f"willmore_{self.n}"
        ]


def evolve(
    body: Body,
    dt: float,
    t_end: float,
    p_list=(2.0,),
    samples: int = DEFAULT_SAMPLES,
    record_every: int | None = None,
    rho_blowup: float = 1e6,
) -> FlowTrace:
    """Integrate the flow from a star-shaped body with H > 0.

    dt is the actual explicit step; it must respect the stability bound and
    the run errors out if the bound is violated along the way. Records every
    record_every steps (default: about 400 records over the run).
    """
    if dt <= 0 or t_end <= 0:
        raise FlowError("dt and T must be positive")
    n = body.n
    rho, ang, step = radial_profile(body, samples)
    sigma = unit_sphere_area(n)
    p_list = tuple(float(p) for p in p_list)

    steps = int(round(t_end / dt))
    if abs(steps * dt - t_end) > 1e-9 * t_end:
        steps = int(math.ceil(t_end / dt))
    if record_every is None:
        record_every = max(1, steps // 400)

    times, areas, wills, anis = [], [], [], []
    ups = {p: [] for p in p_list}

    def record(t, state):
        h_mean, _, dsigma, _, _ = state
        times.append(t)
        areas.append(float(dsigma.sum()))
        for p in p_list:
            val = (n - 1) ** (p - 1.0) * float(np.sum(h_mean ** (p - 1.0) * dsigma)) / sigma
            ups[p].append(val)
        wills.append(float(np.sum(h_mean ** (n - 1.0) * dsigma)) / sigma)
        anis.append(float(rho.max() / rho.min()))

    state = _state(rho, ang, step, n)
    if np.any(state[0] <= 0):
        raise FlowError("initial surface has H <= 0")
    record(0.0, state)

    t = 0.0
    for k in range(steps):
        h_mean, _, _, speed, diffusion = state
        bound = _CFL * step**2 * (h_mean.min() / h_mean.max()) / diffusion.max()
        if dt > bound:
            raise FlowError(
                f"step {dt:g} violates the stability bound {bound:.3g} at t={t:.4f}"
            )
        rho = rho + dt * speed
        t += dt
        if np.any(rho <= 0):
            raise FlowError(f"star-shapedness lost at t={t:.4f}")
        if rho.max() > rho_blowup:
            raise FlowError(f"radial samples exceeded the blow-up bound at t={t:.4f}")
        state = _state(rho, ang, step, n)
        if np.any(state[0] <= 0):
            raise FlowError(f"mean curvature lost positivity at t={t:.4f}")
        if (k + 1) % record_every == 0 or k + 1 == steps:
            record(t, state)

    return FlowTrace(
        n=n, body_descriptor=body.descriptor(), dt=dt, p_list=p_list,
        times=np.asarray(times), areas=np.asarray(areas),
        u_p={p: np.asarray(v) for p, v in ups.items()},
        willmore=np.asarray(wills), anisotropy=np.asarray(anis),
        final_rho=rho, angles=ang,
    )


# ---------------------------------------------------------------------------
# trace checks
# ---------------------------------------------------------------------------

def area_growth_check(trace: FlowTrace) -> float:
    """Max relative deviation of area(t) from e^t * area(0)."""
    exact = trace.areas[0] * np.exp(trace.times)
    return float(np.abs(trace.areas - exact).max() / exact.max())


@dataclass
class GrowthSlack:
    p: float
    min_slack: float           # min over records of bound - U_p(t)
    min_slack_relative: float  # divided by U_p(0)
    passes: bool


def up_growth_check(trace: FlowTrace, p: float, tol: float = 1e-2) -> GrowthSlack:
    """Exponential growth bound on U_p along the flow, for p in [2, n).

    The bound U_p(t) <= U_p(0) exp(t (n-p)/(n-1)) holds for axisymmetric
    traces in R^3 with p >= 2; the ball saturates it.
    """
    n = trace.n
    p = float(p)
    if n != 3 or not (2.0 <= p < n):
        raise FlowError("growth check needs an n=3 trace and p in [2, n)")
    if p not in trace.u_p:
        raise FlowError(f"trace does not carry U_p for p={p}")
    u = trace.u_p[p]
    bound = u[0] * np.exp(trace.times * (n - p) / (n - 1.0))
    slack = bound - u
    rel = float(slack.min() / u[0])
    return GrowthSlack(p=p, min_slack=float(slack.min()), min_slack_relative=rel,
                       passes=bool(rel >= -tol))


def flow_capacity_bound(trace: FlowTrace, p: float, tail_tol: float = 0.01) -> float:
    """Upper bound on cap_p / sigma_{n-1} from the flow functionals.

    Evaluates the trace integral of U_p^{1/(1-p)} by trapezoid rule and
    closes it with the closed-form tail implied by the exponential growth
    bound restarted at the final time. Valid for p in [2, n) on n = 3
    traces; equality for balls. The trace must be long enough that the
    instantaneous growth rate of U_p at the end matches the exponential
    rate to tail_tol of the integral (otherwise the tail model is not yet
    trustworthy and the call errors out).
    """
    n = trace.n
    p = float(p)
    if n != 3 or not (2.0 <= p < n):
        raise FlowError("capacity bound needs an n=3 trace and p in [2, n)")
    if p not in trace.u_p:
        raise FlowError(f"trace does not carry U_p for p={p}")
    u = trace.u_p[p]
    t = trace.times
    if len(t) < 5:
        raise FlowError("trace too short for the capacity bound")
    integrand = u ** (1.0 / (1.0 - p))
    body_part = float(np.trapezoid(integrand, t))

    rate = (n - p) / (n - 1.0)
    # tail of integral of (U_p(T) e^{rate (t-T)})^{1/(1-p)}
    tail = integrand[-1] * (p - 1.0) / rate

    # trustworthiness: compare the measured end rate with the bound's rate
    k = max(2, len(t) // 10)
    measured = (math.log(u[-1]) - math.log(u[-1 - k])) / (t[-1] - t[-1 - k])
    rate_gap = abs(measured - rate) / rate
    tail_fraction = tail / (body_part + tail)
    if rate_gap * tail_fraction > tail_tol:
        raise FlowError(
            "trace too short: the tail estimate is not yet within tolerance "
            f"(rate gap {rate_gap:.3g}, tail fraction {tail_fraction:.3g})"
        )
    return float((body_part + tail) ** (1.0 - p))


def normalized_flow_capacity_bound(trace: FlowTrace, p: float, **kw) -> float:
    """flow_capacity_bound divided by ((p-1)/(n-p))^{1-p}: equals r^{n-p}
    for a ball of radius r."""
    n = trace.n
    bound = flow_capacity_bound(trace, p, **kw)
    return bound / ((p - 1.0) / (n - p)) ** (1.0 - p)
