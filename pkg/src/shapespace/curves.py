"""Sampled planar curves, their discrete Frenet data, reparameterization and
the translation / rotation / scaling normalizations.

A curve with ``N`` samples is the polygon through its points, parameterized
uniformly per segment: sample ``i`` sits at ``t_i = i / M`` with ``M = N - 1``
for open curves and ``M = N`` for closed curves (sample ``N`` is identified
with sample 0 and not stored).
"""

from dataclasses import dataclass

import numpy as np

from . import _discrete as dk
from .errors import (
    AmbiguousAlignmentError,
    DegenerateCurveError,
    GridMismatchError,
    NumericalError,
    ValidationError,
)

MIN_SAMPLES = 8


def _frozen_array(x, ndim=None, name="array"):
    arr = np.array(x, dtype=float, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValidationError(f"{name} must have {ndim} dimensions, got {arr.ndim}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Ordered planar samples of an immersed curve, open or closed.

    Parameters
    ----------
    points : array_like, shape (N, 2)
        Sample coordinates. ``N >= 8``, consecutive samples distinct.
    closed : bool
        If True the last sample connects back to the first.
    """

    points: np.ndarray
    closed: bool = True

    def __post_init__(self):
        pts = _frozen_array(self.points, 2, "points")
        if pts.shape[1] != 2:
            raise ValidationError(f"points must have shape (N, 2), got {pts.shape}")
        if pts.shape[0] < MIN_SAMPLES:
            raise ValidationError(
                f"a curve needs at least {MIN_SAMPLES} samples, got {pts.shape[0]}"
            )
        if not np.all(np.isfinite(pts)):
            raise ValidationError("curve coordinates must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "closed", bool(self.closed))
        dk.check_chords(self.chords)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def intervals(self):
        """Number of parameter intervals ``M``."""
        return self.n if self.closed else self.n - 1

    @property
    def chords(self):
        return np.linalg.norm(dk.edge_diff(self.points, self.closed), axis=-1)

    @property
    def length(self):
        return float(np.sum(self.chords))

    @property
    def signed_area(self):
        """Shoelace area of the closed polygon (counterclockwise positive)."""
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def with_points(self, points):
        return SampledCurve(points, self.closed)

    def same_grid(self, other):
        return self.n == other.n and self.closed == other.closed

    def __eq__(self, other):
        if not isinstance(other, SampledCurve):
            return NotImplemented
        return self.closed == other.closed and np.array_equal(self.points, other.points)

    def __hash__(self):
        return hash((self.closed, self.points.tobytes()))


@dataclass(frozen=True, eq=False)
class FrameData:
    """Per-sample unit tangent, unit normal, arc-length weight and curvature."""

    tangent: np.ndarray
    normal: np.ndarray
    ds: np.ndarray
    curvature: np.ndarray


def compute_frame(curve):
    """Discrete Frenet frame of ``curve``.

    Tangents come from centered chord differences (one-sided at open
    endpoints), ``ds`` are trapezoidal chord weights and the curvature is the
    centered derivative of the tangent along arc length, projected on the
    normal.
    """
    P = curve.points
    closed = curve.closed
    chords = np.linalg.norm(dk.edge_diff(P, closed), axis=-1)
    dk.check_chords(chords)
    t, _, _ = dk.vertex_tangents(P, closed)
    n = dk.rot90(t)
    ds = dk.vertex_weights(chords, closed)
    dt = dk.centered_diff(t, closed)
    if closed:
        span = chords + np.roll(chords, 1)
    else:
        span = np.empty(curve.n)
        span[1:-1] = chords[1:] + chords[:-1]
        span[0] = chords[0]
        span[-1] = chords[-1]
    kappa = dk.dot(dt, n) / span
    for arr in (t, n, ds, kappa):
        arr.setflags(write=False)
    return FrameData(t, n, ds, kappa)


# ---------------------------------------------------------------------------
# Reparameterizations
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class DiffeoGrid:
    """Orientation-preserving reparameterization sampled on a uniform grid.

    ``values[j] = gamma(j / M)`` for ``j = 0..M``.  Open case: ``gamma(0) = 0``
    and ``gamma(1) = 1``.  Closed case: ``values`` is a lift of a degree-one
    circle map, so ``values[M] = values[0] + 1`` and ``values[0]`` is the
    base-point offset.
    """

    values: np.ndarray
    closed: bool = True

    def __post_init__(self):
        v = _frozen_array(self.values, 1, "diffeo values")
        if v.size < 3:
            raise ValidationError("a DiffeoGrid needs at least 3 grid values")
        if not np.all(np.isfinite(v)):
            raise ValidationError("diffeo values must be finite")
        if np.any(np.diff(v) <= 0):
            raise ValidationError("diffeo must be strictly increasing")
        if self.closed:
            if abs(v[-1] - v[0] - 1.0) > 1e-12:
                raise ValidationError("closed diffeo increments must sum to 1")
        elif abs(v[0]) > 1e-12 or abs(v[-1] - 1.0) > 1e-12:
            raise ValidationError("open diffeo must fix the endpoints 0 and 1")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "closed", bool(self.closed))

    @property
    def intervals(self):
        return self.values.size - 1

    @property
    def grid(self):
        return np.linspace(0.0, 1.0, self.intervals + 1)

    @classmethod
    def identity(cls, intervals, closed=True):
        return cls(np.linspace(0.0, 1.0, intervals + 1), closed)

    @classmethod
    def shift(cls, intervals, steps):
        """Closed-curve rotation of the base point by ``steps`` grid cells."""
        return cls(np.linspace(0.0, 1.0, intervals + 1) + steps / intervals, True)

    @classmethod
    def for_curve(cls, curve, func):
        """Sample ``func`` on the parameter grid of ``curve``."""
        t = np.linspace(0.0, 1.0, curve.intervals + 1)
        return cls(func(t), curve.closed)

    def __call__(self, s):
        return _pl_eval(self.grid, self.values, s, self.closed)

    def inverse_at(self, t):
        """Evaluate the inverse map at parameters ``t``."""
        return _pl_eval(self.values, self.grid, t, self.closed)

    def inverse(self):
        t = self.grid
        inv = self.inverse_at(t)
        if self.closed:
            inv = inv[0] + np.concatenate([np.mod(inv[:-1] - inv[0], 1.0), [1.0]])
        else:
            inv[0], inv[-1] = 0.0, 1.0
        return DiffeoGrid(inv, self.closed)


def _pl_eval(x, y, s, closed):
    """Piecewise-linear interpolation, periodic lift when ``closed``."""
    s = np.asarray(s, dtype=float)
    if not closed:
        return np.interp(s, x, y)
    # lift period: x and y both advance by 1 over one turn
    shift = np.floor(x[0])
    x = x - shift
    y = y - np.floor(y[0])
    xe = np.concatenate([x[:-1] - 1.0, x[:-1], x[:-1] + 1.0, x[-1:] + 1.0])
    ye = np.concatenate([y[:-1] - 1.0, y[:-1], y[:-1] + 1.0, y[-1:] + 1.0])
    return np.interp(np.mod(s, 1.0), xe, ye)


def random_diffeo(intervals, closed, rng, amplitude=0.4, modes=3, offset=True):
    """Smooth random reparameterization built from a few Fourier modes.

    The derivative stays within ``1 +/- amplitude`` (``amplitude < 1``).
    """
    if not 0 <= amplitude < 1:
        raise ValidationError("amplitude must lie in [0, 1)")
    t = np.linspace(0.0, 1.0, intervals + 1)
    w = rng.uniform(-1.0, 1.0, modes)
    w *= amplitude / max(np.sum(np.abs(w)), 1e-300)
    phase = rng.uniform(0.0, 2 * np.pi, modes)
    vals = t.copy()
    for k in range(1, modes + 1):
        if closed:
            f = 2 * np.pi * k
            vals += w[k - 1] * (np.sin(f * t + phase[k - 1]) - np.sin(phase[k - 1])) / f
        else:
            f = np.pi * k
            vals += w[k - 1] * np.sin(f * t) / f
    if closed:
        if offset:
            vals += rng.uniform(0.0, 1.0)
        vals[-1] = vals[0] + 1.0
    else:
        vals[0], vals[-1] = 0.0, 1.0
    return DiffeoGrid(vals, closed)


def polygon_eval(points, closed, u):
    """Evaluate the polygon at fractional vertex positions ``u`` (in ``[0, M]``)."""
    n = points.shape[-2]
    u = np.asarray(u, dtype=float)
    r = np.rint(u)
    u = np.where(np.abs(u - r) < 1e-12, r, u)
    if closed:
        u = np.mod(u, n)
        i = np.floor(u).astype(int) % n
        j = (i + 1) % n
    else:
        i = np.clip(np.floor(u).astype(int), 0, n - 2)
        j = i + 1
    f = (u - i)[..., None]
    return points[..., i, :] * (1.0 - f) + points[..., j, :] * f


def resample_values(values, closed, gamma):
    """Per-sample values composed with ``gamma^{-1}`` (``G(t) = V(gamma^{-1}(t))``)."""
    values = np.asarray(values, dtype=float)
    m = values.shape[-2] if closed else values.shape[-2] - 1
    if gamma.closed != closed or gamma.intervals != m:
        raise GridMismatchError(
            f"diffeo grid ({gamma.intervals} intervals, closed={gamma.closed}) does "
            f"not match samples ({m} intervals, closed={closed})"
        )
    s = gamma.inverse_at(gamma.grid[: values.shape[-2]])
    return polygon_eval(values, closed, s * m)


def reparameterize(curve, gamma):
    """Return ``curve o gamma^{-1}`` resampled by linear interpolation."""
    return curve.with_points(resample_values(curve.points, curve.closed, gamma))


# ---------------------------------------------------------------------------
# Arc-length section
# ---------------------------------------------------------------------------


def _chords_of(Q, closed):
    return np.linalg.norm(dk.edge_diff(Q, closed), axis=-1)


def arclength_stations(points, closed, tol=1e-13, max_iter=100):
    """Fractional vertex positions of an equal-chord resampling of the polygon.

    Starts at equal arc-length stations and redistributes until all chords of
    the resampled polygon agree to ``tol`` relative.  Station 0 stays on
    sample 0 (and the last station on the last sample for open curves).
    """
    n = points.shape[0]
    m = n if closed else n - 1
    chords = _chords_of(points, closed)
    dk.check_chords(chords)
    S = np.concatenate([[0.0], np.cumsum(chords)])
    idx = np.arange(S.size, dtype=float)
    u = np.interp(np.arange(n) * S[-1] / m, S, idx)
    if not closed:
        u[-1] = n - 1
    prev = np.inf
    for _ in range(max_iter):
        Q = polygon_eval(points, closed, u)
        q = _chords_of(Q, closed)
        spread = (q.max() - q.min()) / q.mean()
        # stop at tolerance or once round-off stalls the contraction
        if spread <= tol or (spread < 1e-10 and spread > 0.5 * prev):
            break
        prev = spread
        C = np.concatenate([[0.0], np.cumsum(q)])
        ue = np.append(u, float(m)) if closed else u
        u_new = np.interp(np.arange(n) * C[-1] / m, C, ue)
        if not closed:
            u_new[-1] = n - 1
        if np.array_equal(u_new, u):
            break
        u = u_new
    if spread > tol:
        # the redistribution contracts slowly around very short chords
        u, spread = _newton_stations(points, closed, u, tol)
        if spread > 1e-8:
            raise NumericalError(f"equal-chord resampling did not converge (spread {spread:.3g})")
    return u


def to_arclength(curve):
    """Resample so that all chords are equal (the arc-length section).

    The polygonal image is preserved; for closed curves the base point stays
    at sample 0.
    """
    u = arclength_stations(curve.points, curve.closed)
    return curve.with_points(polygon_eval(curve.points, curve.closed, u))


def _station_segments(points, closed, u):
    n = points.shape[0]
    if closed:
        i = np.floor(u).astype(int) % n
        edge = np.roll(points, -1, axis=0)[i] - points[i]
    else:
        i = np.clip(np.floor(u).astype(int), 0, n - 2)
        edge = points[i + 1] - points[i]
    return i, edge


def _chord_jacobian(points, closed, u):
    """Jacobian of ``r_j = |Q_{j+1} - Q_j| - c`` w.r.t. the free stations and ``c``."""
    n = points.shape[0]
    Q = polygon_eval(points, closed, u)
    i, edge = _station_segments(points, closed, u)
    e = dk.edge_diff(Q, closed)
    q = np.linalg.norm(e, axis=-1)
    e = e / q[:, None]
    free = np.arange(1, n) if closed else np.arange(1, n - 1)
    J = np.zeros((e.shape[0], free.size + 1))
    cols = np.arange(free.size)
    J[free - 1, cols] += dk.dot(e[free - 1], edge[free])
    J[free, cols] -= dk.dot(e[free], edge[free])
    J[:, -1] = -1.0
    return J, q, e, free, i, edge


def _newton_stations(points, closed, u, tol, max_iter=30):
    n = points.shape[0]
    c = None
    best, best_spread = u, np.inf
    for _ in range(max_iter):
        J, q, _, free, _, _ = _chord_jacobian(points, closed, u)
        spread = (q.max() - q.min()) / q.mean()
        if spread < best_spread:
            best, best_spread = u, spread
        if spread <= tol:
            break
        if c is None:
            c = q.mean()
        try:
            step = np.linalg.solve(J, -(q - c))
        except np.linalg.LinAlgError:
            break
        u = u.copy()
        u[free] += step[:-1]
        c += step[-1]
        if not np.all(np.diff(u) > 0) or u[-1] >= (n if closed else n - 1 + 1e-12):
            break
    return best, best_spread


def to_arclength_vjp(points, closed, u, grad_out):
    """Gradient of ``loss(to_arclength(P))`` w.r.t. ``P`` given ``dloss/dQ``.

    Uses implicit differentiation of the equal-chord conditions
    ``|Q_{j+1} - Q_j| = c`` at the converged stations ``u``.
    """
    n = points.shape[0]
    J, _, e, free, i, edge = _chord_jacobian(points, closed, u)
    # residual r_j = |Q_{j+1} - Q_j| - c ; unknowns (u_free, c)
    ybar = np.zeros(free.size + 1)
    ybar[:-1] = dk.dot(grad_out[free], edge[free])
    lam = np.linalg.solve(J.T, ybar)
    # effective gradient on Q at fixed stations
    gQ = np.array(grad_out, dtype=float, copy=True)
    gQ -= dk.edge_diff_adjoint(lam[:, None] * e, closed)
    # back through linear interpolation at fixed u
    f = (u - i)
    gP = np.zeros_like(points)
    np.add.at(gP, i, gQ * (1.0 - f)[:, None])
    if closed:
        np.add.at(gP, (i + 1) % n, gQ * f[:, None])
    else:
        np.add.at(gP, i + 1, gQ * f[:, None])
    return gP


# ---------------------------------------------------------------------------
# Normalizations (sections for translations, rotations, scalings)
# ---------------------------------------------------------------------------


def centroid(curve):
    """Arc-length weighted mean of the samples."""
    ds = dk.vertex_weights(curve.chords, curve.closed)
    return ds @ curve.points / ds.sum()


def center_centroid(curve):
    return curve.with_points(curve.points - centroid(curve))


def start_to_origin(curve):
    return curve.with_points(curve.points - curve.points[0])


def _rotate(curve, angle):
    c, s = np.cos(angle), np.sin(angle)
    R = np.array([[c, -s], [s, c]])
    return curve.with_points(curve.points @ R.T)


def second_moment(curve):
    ds = dk.vertex_weights(curve.chords, curve.closed)
    X = curve.points - ds @ curve.points / ds.sum()
    return (X * ds[:, None]).T @ X / ds.sum()


def align_ellipse(curve, rtol=1e-9):
    """Rotate about the origin so the major axis of the second-moment ellipse is +x.

    The axis sign is fixed by requiring the first sample, measured from the
    centroid, to have a nonnegative x-coordinate after rotation.
    """
    C = second_moment(curve)
    lam, vec = np.linalg.eigh(C)
    if lam[1] - lam[0] <= rtol * abs(lam[1]):
        raise AmbiguousAlignmentError(
            "isotropic second moment: the approximating ellipse has no major axis"
        )
    major = vec[:, 1]
    rel = curve.points - centroid(curve)
    proj = rel @ major
    nz = np.nonzero(np.abs(proj) > 1e-12 * np.sqrt(lam[1]))[0]
    if nz.size and proj[nz[0]] < 0:
        major = -major
    return _rotate(curve, -np.arctan2(major[1], major[0]))


def align_start_tangent(curve):
    """Rotate about the origin so the unit tangent at sample 0 is (1, 0)."""
    t0 = compute_frame(curve).tangent[0]
    return _rotate(curve, -np.arctan2(t0[1], t0[0]))


def scale_length(curve):
    return curve.with_points(curve.points / curve.length)


def scale_area(curve):
    """Scale about the origin so the enclosed area is 1 (closed curves only)."""
    if not curve.closed:
        raise ValidationError("scale_area requires a closed curve")
    area = curve.signed_area
    if abs(area) <= 1e-12 * curve.length**2:
        raise ValidationError("scale_area requires a nonzero enclosed area")
    return curve.with_points(curve.points / np.sqrt(abs(area)))


TRANSLATION_SECTIONS = {"centroid": center_centroid, "start": start_to_origin}
ROTATION_SECTIONS = {"ellipse": align_ellipse, "tangent": align_start_tangent}
SCALE_SECTIONS = {"length": scale_length, "area": scale_area}


# ---------------------------------------------------------------------------
# Test shapes
# ---------------------------------------------------------------------------


def circle(n, radius=1.0, center=(0.0, 0.0), clockwise=False):
    th = 2 * np.pi * np.arange(n) / n
    if clockwise:
        th = -th
    pts = np.column_stack([np.cos(th), np.sin(th)]) * radius + np.asarray(center)
    return SampledCurve(pts, closed=True)


def ellipse(n, semi_major=2.0, semi_minor=1.0, angle=0.0, center=(0.0, 0.0)):
    th = 2 * np.pi * np.arange(n) / n
    pts = np.column_stack([semi_major * np.cos(th), semi_minor * np.sin(th)])
    c, s = np.cos(angle), np.sin(angle)
    pts = pts @ np.array([[c, -s], [s, c]]).T + np.asarray(center)
    return SampledCurve(pts, closed=True)


def segment(n, start=(0.0, 0.0), end=(1.0, 0.0)):
    s = np.linspace(0.0, 1.0, n)[:, None]
    pts = (1 - s) * np.asarray(start, float) + s * np.asarray(end, float)
    return SampledCurve(pts, closed=False)


__all__ = [
    "SampledCurve",
    "FrameData",
    "DiffeoGrid",
    "DegenerateCurveError",
    "compute_frame",
    "reparameterize",
    "resample_values",
    "random_diffeo",
    "to_arclength",
    "arclength_stations",
    "center_centroid",
    "start_to_origin",
    "align_ellipse",
    "align_start_tangent",
    "scale_length",
    "scale_area",
    "circle",
    "ellipse",
    "segment",
]
