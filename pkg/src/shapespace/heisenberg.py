"""The Heisenberg toy bundle: R^3 with ds^2 = dx^2 + dy^2 + (dz - y dx)^2,
quotiented by translations in z.

Points and tangents are plain length-3 sequences (or arrays with a trailing
axis of size 3); all metric evaluators broadcast over leading axes.
"""

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import GridMismatchError, ValidationError


class HPoint(NamedTuple):
    x: float
    y: float
    z: float


class HTangent(NamedTuple):
    dx: float
    dy: float
    dz: float


FIBER = HTangent(0.0, 0.0, 1.0)


def _xyz(p):
    p = np.asarray(p, dtype=float)
    return p[..., 0], p[..., 1], p[..., 2]


def _uv(q):
    q = np.asarray(q, dtype=float)
    return q[..., 0], q[..., 1]


# ---------------------------------------------------------------------------
# Closed-form scalar fields on R^2
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial2D:
    """``f(u, v) = sum c_ij u^i v^j`` with analytic partial derivatives."""

    coeffs: dict = field(default_factory=dict)
    name: str = "poly"

    def __post_init__(self):
        clean = {}
        for (i, j), c in dict(self.coeffs).items():
            i, j, c = int(i), int(j), float(c)
            if i < 0 or j < 0 or not np.isfinite(c):
                raise ValidationError(f"bad polynomial term {(i, j)}: {c}")
            if c != 0.0:
                clean[(i, j)] = clean.get((i, j), 0.0) + c
        object.__setattr__(self, "coeffs", clean)

    def __hash__(self):
        return hash((self.name, tuple(sorted(self.coeffs.items()))))

    def __call__(self, u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        out = np.zeros(np.broadcast(u, v).shape)
        for (i, j), c in self.coeffs.items():
            out = out + c * u**i * v**j
        return out

    def du(self, u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        out = np.zeros(np.broadcast(u, v).shape)
        for (i, j), c in self.coeffs.items():
            if i:
                out = out + c * i * u ** (i - 1) * v**j
        return out

    def dv(self, u, v):
        u, v = np.asarray(u, float), np.asarray(v, float)
        out = np.zeros(np.broadcast(u, v).shape)
        for (i, j), c in self.coeffs.items():
            if j:
                out = out + c * j * u**i * v ** (j - 1)
        return out


def scalar_field(kind="zero", coeffs=None):
    """Registry of closed-form fields: ``zero``, ``u``, ``v``, ``uv`` or ``poly``."""
    table = {
        "zero": {},
        "u": {(1, 0): 1.0},
        "v": {(0, 1): 1.0},
        "uv": {(1, 1): 1.0},
    }
    if kind == "poly":
        if coeffs is None:
            raise ValidationError("poly scalar field needs coefficients")
        return Polynomial2D(coeffs, "poly")
    if kind not in table:
        raise ValidationError(f"unknown scalar field {kind!r}; choose from {sorted(table) + ['poly']}")
    return Polynomial2D(table[kind], kind)


ZERO = scalar_field("zero")


# ---------------------------------------------------------------------------
# The four metrics
# ---------------------------------------------------------------------------


def heis_metric(p, u, v):
    """Left-invariant metric ``dx^2 + dy^2 + (dz - y dx)^2``."""
    _, y, _ = _xyz(p)
    ux, uy, uz = _xyz(u)
    vx, vy, vz = _xyz(v)
    return ux * vx + uy * vy + (uz - y * ux) * (vz - y * vx)


def submersion_metric(u2, v2):
    """Quotient metric ``du^2 + dv^2`` on the base plane."""
    ux, uy = _uv(u2)
    vx, vy = _uv(v2)
    return ux * vx + uy * vy


def immersion_metric(psi, base, a2, b2):
    """Metric induced on the graph section ``z = psi(u, v)``."""
    bu, bv = _uv(base)
    au, av = _uv(a2)
    cu, cv = _uv(b2)
    pu, pv = psi.du(bu, bv), psi.dv(bu, bv)
    bracket_a = pv * av + (pu - bv) * au
    bracket_b = pv * cv + (pu - bv) * cu
    return au * cu + av * cv + bracket_a * bracket_b


def gauge_metric(phi1, phi2, p, u, v):
    """Degenerate metric from the normal bundle ``n_k = e_k + phi_k dz``.

    ``dx^2 + dy^2 + [phi2 dy + (phi1 - y) dx]^2``; it never reads ``z`` or
    ``dz``, so it vanishes identically along the fiber.
    """
    x, y, _ = _xyz(p)
    ux, uy, _ = _xyz(u)
    vx, vy, _ = _xyz(v)
    f1, f2 = phi1(x, y), phi2(x, y)
    bu = f2 * uy + (f1 - y) * ux
    bv = f2 * vy + (f1 - y) * vx
    return ux * vx + uy * vy + bu * bv


def project_tangent(u):
    """Push a tangent of R^3 down to the base plane (drop ``dz``)."""
    ux, uy, _ = _xyz(u)
    return np.stack([ux, uy], axis=-1)


@dataclass(frozen=True)
class HeisenbergMetric:
    def __call__(self, p, u, v):
        return heis_metric(p, u, v)


@dataclass(frozen=True)
class GaugeMetric:
    phi1: Polynomial2D = ZERO
    phi2: Polynomial2D = ZERO

    def __call__(self, p, u, v):
        return gauge_metric(self.phi1, self.phi2, p, u, v)


@dataclass(frozen=True)
class SubmersionMetric:
    """Evaluates ``du^2 + dv^2`` on the projection of a tangent of R^3."""

    def __call__(self, p, u, v):
        return submersion_metric(project_tangent(u), project_tangent(v))


@dataclass(frozen=True)
class ReconstructedMetric:
    """Nondegenerate metric that makes the chosen normal bundle horizontal.

    ``g_gauge(u, v) + c (u_z - phi1 u_x - phi2 u_y)(v_z - phi1 v_x - phi2 v_y)``
    """

    phi1: Polynomial2D
    phi2: Polynomial2D
    c: float = 1.0

    def __post_init__(self):
        if not float(self.c) > 0:
            raise ValidationError(f"vertical scale c must be > 0, got {self.c}")

    def vertical_part(self, p, u):
        x, y, _ = _xyz(p)
        ux, uy, uz = _xyz(u)
        return uz - self.phi1(x, y) * ux - self.phi2(x, y) * uy

    def __call__(self, p, u, v):
        return gauge_metric(self.phi1, self.phi2, p, u, v) + self.c * self.vertical_part(
            p, u
        ) * self.vertical_part(p, v)


def normal_to_submersion(phi1, phi2, c=1.0):
    """Metric for which ``span(n1, n2)`` is the orthogonal complement of the fiber."""
    return ReconstructedMetric(phi1, phi2, float(c))


# ---------------------------------------------------------------------------
# Paths, gauge action, horizontal lifts
# ---------------------------------------------------------------------------


def _uniform_times(times, rtol=1e-9):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size < 3:
        raise ValidationError("a path needs K >= 2 (at least 3 samples)")
    K = times.size - 1
    if abs(times[0]) > rtol or abs(times[-1] - 1.0) > rtol:
        raise ValidationError("path times must run from 0 to 1")
    if np.max(np.abs(np.diff(times) - 1.0 / K)) > rtol / K:
        raise ValidationError("path time grid must be uniform")
    return times


@dataclass(frozen=True, eq=False)
class HPath:
    """Path in R^3 sampled on the uniform grid ``t_k = k / K``."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        t = _uniform_times(self.times)
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.shape != (t.size, 3):
            raise ValidationError(f"points must have shape ({t.size}, 3), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValidationError("path coordinates must be finite")
        t = t.copy()
        t.setflags(write=False)
        pts.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_points(cls, points):
        points = np.asarray(points, dtype=float)
        return cls(np.linspace(0.0, 1.0, points.shape[0]), points)

    @property
    def K(self):
        return self.points.shape[0] - 1


@dataclass(frozen=True, eq=False)
class GaugeFunction:
    """Path ``t -> g(t)`` in the additive group, sampled on the path grid."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.ndim != 1 or not np.all(np.isfinite(v)):
            raise ValidationError("gauge values must be a finite 1-d array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


def hpath_length(path, metric):
    """Midpoint-rule length ``sum_k sqrt(g(mid_k; v_k, v_k)) dt``."""
    if not isinstance(path, HPath):
        raise ValidationError("hpath_length expects an HPath")
    P = path.points
    dt = 1.0 / path.K
    vel = np.diff(P, axis=0) / dt
    mid = 0.5 * (P[1:] + P[:-1])
    sq = metric(mid, vel, vel)
    return float(np.sum(np.sqrt(np.maximum(sq, 0.0))) * dt)


def gauge_act(g, path):
    """Pointwise fiber translation ``(x, y, z + g(t))``."""
    if g.values.shape != (path.K + 1,):
        raise GridMismatchError(
            f"gauge has {g.values.size} samples, path has {path.K + 1}"
        )
    pts = np.array(path.points, copy=True)
    pts[:, 2] += g.values
    return HPath(path.times, pts)


def horizontal_lift(base, z0=0.0):
    """Lift a planar path by integrating ``dz = y dx`` with the trapezoidal rule."""
    base = np.asarray(base, dtype=float)
    if base.ndim != 2 or base.shape[1] != 2:
        raise ValidationError("base path must have shape (K+1, 2)")
    x, y = base[:, 0], base[:, 1]
    dz = 0.5 * (y[1:] + y[:-1]) * np.diff(x)
    z = z0 + np.concatenate([[0.0], np.cumsum(dz)])
    return HPath.from_points(np.column_stack([x, y, z]))


def shoelace_area(loop):
    """Signed area enclosed by a closed planar polygon (last point may repeat the first)."""
    loop = np.asarray(loop, dtype=float)
    if np.array_equal(loop[0], loop[-1]):
        loop = loop[:-1]
    x, y = loop[:, 0], loop[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def circle_loop(K, radius=1.0, clockwise=False):
    th = 2 * np.pi * np.arange(K + 1) / K
    if clockwise:
        th = -th
    pts = radius * np.column_stack([np.cos(th), np.sin(th)])
    pts[-1] = pts[0]
    return pts


def holonomy(loop, z0=0.0):
    """Fiber displacement of the horizontal lift of a closed loop, and its area."""
    lift = horizontal_lift(loop, z0)
    return float(lift.points[-1, 2] - lift.points[0, 2]), shoelace_area(loop)
