"""Discrete paths of curves and their energy and length under the four
metric choices.

``ambient``
    the elastic metric itself;
``quotient``
    elastic metric of the horizontal part of the velocity (submersion);
``section``
    ambient energy of the path after moving every slice to the arc-length
    section (immersion of the section);
``gauge``
    elastic metric of the pointwise-normal part (degenerate, gauge invariant).

Velocities are forward differences ``v_k = K (F_{k+1} - F_k)`` attached to
``F_k``; the energy is ``1/2 sum_k g_k(v_k, v_k) / K`` and the length
``sum_k sqrt(g_k(v_k, v_k)) / K``.  :func:`energy_and_gradient` returns the
exact gradient of the discrete energy w.r.t. every sample coordinate.
"""

from dataclasses import dataclass

import numpy as np

from . import _discrete as dk
from .bundles import horizontal_coefficients
from .curves import (
    DiffeoGrid,
    SampledCurve,
    arclength_stations,
    polygon_eval,
    reparameterize,
    to_arclength_vjp,
)
from .elastic import ElasticParams, TangentField
from .errors import GridMismatchError, NumericalError, ValidationError

VARIANTS = ("ambient", "quotient", "section", "gauge")
_ALIASES = {
    "ambient": "ambient",
    "quotienthorizontal": "quotient",
    "quotient": "quotient",
    "horizontal": "quotient",
    "sectionarclength": "section",
    "section": "section",
    "gaugenormal": "gauge",
    "gauge": "gauge",
}


@dataclass(frozen=True)
class MetricChoice:
    variant: str = "gauge"
    params: ElasticParams = ElasticParams()

    def __post_init__(self):
        key = str(self.variant).replace("_", "").replace("-", "").lower()
        if key not in _ALIASES:
            raise ValidationError(f"unknown metric variant {self.variant!r}; use one of {VARIANTS}")
        object.__setattr__(self, "variant", _ALIASES[key])
        if not isinstance(self.params, ElasticParams):
            raise ValidationError("params must be ElasticParams")


@dataclass(frozen=True, eq=False)
class CurvePath:
    """``K + 1`` curves with a common sample count on the grid ``t_k = k / K``."""

    slices: np.ndarray
    closed: bool = True

    def __post_init__(self):
        S = np.array(self.slices, dtype=float, copy=True)
        if S.ndim != 3 or S.shape[2] != 2:
            raise ValidationError(f"slices must have shape (K+1, N, 2), got {S.shape}")
        if S.shape[0] < 3:
            raise ValidationError("a curve path needs K >= 2")
        for k in range(S.shape[0]):
            SampledCurve(S[k], self.closed)  # validates the slice
        S.setflags(write=False)
        object.__setattr__(self, "slices", S)
        object.__setattr__(self, "closed", bool(self.closed))

    @classmethod
    def from_curves(cls, curves):
        curves = list(curves)
        first = curves[0]
        for c in curves[1:]:
            if not c.same_grid(first):
                raise GridMismatchError("all slices must share N and closedness")
        return cls(np.stack([c.points for c in curves]), first.closed)

    @property
    def K(self):
        return self.slices.shape[0] - 1

    @property
    def n(self):
        return self.slices.shape[1]

    def curve(self, k):
        return SampledCurve(self.slices[k], self.closed)

    def curves(self):
        return [self.curve(k) for k in range(self.K + 1)]

    def with_slices(self, slices):
        return CurvePath(slices, self.closed)


def path_velocity(path, k):
    """Forward-difference velocity ``K (F_{k+1} - F_k)`` attached to ``F_k``."""
    if not 0 <= k < path.K:
        raise IndexError(f"velocity index {k} outside [0, {path.K})")
    v = (path.slices[k + 1] - path.slices[k]) * path.K
    return TangentField(path.curve(k), v)


# ---------------------------------------------------------------------------
# Per-slice integrands with gradients
# ---------------------------------------------------------------------------


def _ambient_terms(P, V, a, b, closed):
    return dk.edge_quadratic_grad(P, V, a, b, closed)


def _gauge_terms(P, V, a, b, closed):
    t, _, nrm = dk.vertex_tangents(P, closed)
    n = dk.rot90(t)
    phi = dk.dot(V, n)
    U = phi[..., None] * n
    S, gP, gU = dk.edge_quadratic_grad(P, U, a, b, closed)
    gphi = dk.dot(gU, n)
    gn = gU * phi[..., None] + gphi[..., None] * V
    gV = gphi[..., None] * n
    gP = gP + dk.vertex_tangents_adjoint(dk.rot90_adjoint(gn), t, nrm, closed)
    return S, gP, gV


def _quotient_terms(P, V, a, b, closed):
    # m minimizes the quadratic form over vertical fields, so the gradient at
    # fixed m is exact (the adjoint of the tridiagonal solve vanishes).
    t, _, nrm = dk.vertex_tangents(P, closed)
    m = np.empty(P.shape[:-1])
    for k in range(P.shape[0]):
        m[k] = horizontal_coefficients(P[k], V[k], a, b, closed, t[k])
    U = V - m[..., None] * t
    S, gP, gU = dk.edge_quadratic_grad(P, U, a, b, closed)
    gt = -m[..., None] * gU
    gP = gP + dk.vertex_tangents_adjoint(gt, t, nrm, closed)
    return S, gP, gU


_TERMS = {"ambient": _ambient_terms, "gauge": _gauge_terms, "quotient": _quotient_terms}


def _section_slices(X, closed):
    stations = [arclength_stations(X[k], closed) for k in range(X.shape[0])]
    A = np.stack([polygon_eval(X[k], closed, u) for k, u in enumerate(stations)])
    return A, stations


def slice_terms(X, choice, closed):
    """Per-slice squared speeds ``g_k(v_k, v_k)`` of the raw slice array ``X``."""
    S, _ = _energy_core(X, choice, closed, want_grad=False)
    return S


def _energy_core(X, choice, closed, want_grad=True):
    X = np.asarray(X, dtype=float)
    a, b = choice.params.a, choice.params.b
    K = X.shape[0] - 1
    if choice.variant == "section":
        A, stations = _section_slices(X, closed)
        S, gA = _energy_core(A, MetricChoice("ambient", choice.params), closed, want_grad)
        if not want_grad:
            return S, None
        grad = np.stack(
            [to_arclength_vjp(X[k], closed, stations[k], gA[k]) for k in range(K + 1)]
        )
        return S, grad
    P = X[:-1]
    V = (X[1:] - X[:-1]) * K
    S, gP, gV = _TERMS[choice.variant](P, V, a, b, closed)
    if not want_grad:
        return S, None
    # E = (1 / 2K) sum_k S_k  and  dV_k / dX = K (e_{k+1} - e_k)
    grad = np.zeros_like(X)
    grad[:-1] += gP / (2 * K)
    grad[:-1] -= gV / 2
    grad[1:] += gV / 2
    return S, grad


def energy_and_gradient(X, choice, closed):
    """Discrete path energy of slice array ``X`` (shape (K+1, N, 2)) and its gradient."""
    S, grad = _energy_core(X, choice, closed, want_grad=True)
    K = X.shape[0] - 1
    E = 0.5 * float(np.sum(S)) / K
    if not np.isfinite(E):
        raise NumericalError("path energy is not finite")
    return E, grad


def path_energy(path, choice):
    S = slice_terms(path.slices, choice, path.closed)
    return 0.5 * float(np.sum(S)) / path.K


def path_length(path, choice):
    S = slice_terms(path.slices, choice, path.closed)
    return float(np.sum(np.sqrt(np.maximum(S, 0.0)))) / path.K


def path_report(path, choice):
    """Energy, length and per-slice contributions as a plain dict."""
    S = slice_terms(path.slices, choice, path.closed)
    K = path.K
    return {
        "metric": choice.variant,
        "a": choice.params.a,
        "b": choice.params.b,
        "n": path.n,
        "k": K,
        "closed": path.closed,
        "energy": 0.5 * float(np.sum(S)) / K,
        "length": float(np.sum(np.sqrt(np.maximum(S, 0.0)))) / K,
        "slice_energy": [0.5 * float(s) / K for s in S],
        "slice_length": [float(np.sqrt(max(s, 0.0))) / K for s in S],
    }


# ---------------------------------------------------------------------------
# Gauge group acting on paths
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PathGauge:
    """One reparameterization per slice."""

    diffeos: tuple

    def __post_init__(self):
        d = tuple(self.diffeos)
        if not all(isinstance(g, DiffeoGrid) for g in d):
            raise ValidationError("PathGauge entries must be DiffeoGrid instances")
        object.__setattr__(self, "diffeos", d)

    def __len__(self):
        return len(self.diffeos)

    @classmethod
    def constant(cls, gamma, K):
        return cls((gamma,) * (K + 1))

    @classmethod
    def identity(cls, intervals, K, closed=True):
        return cls.constant(DiffeoGrid.identity(intervals, closed), K)


def gauge_act_path(g, path):
    """Reparameterize slice ``k`` by ``g_k``."""
    if len(g) != path.K + 1:
        raise GridMismatchError(f"gauge has {len(g)} slices, path has {path.K + 1}")
    return CurvePath.from_curves(
        reparameterize(path.curve(k), g.diffeos[k]) for k in range(path.K + 1)
    )


def random_path_gauge(K, intervals, closed, rng, amplitude=0.3, drift=0.1, modes=3):
    """A gauge ``t -> gamma_t`` that varies smoothly in ``t``.

    Each slice is ``s + A(t) sum_j w_j sin(...) + o(t)`` where ``A`` and the
    base-point drift ``o`` (closed curves only) are smooth random functions
    of ``t``.  ``|A| <= amplitude < 1`` keeps every slice a diffeomorphism.
    """
    s = np.linspace(0.0, 1.0, intervals + 1)
    t = np.linspace(0.0, 1.0, K + 1)
    w = rng.uniform(-1.0, 1.0, modes)
    w /= np.sum(np.abs(w))
    ph = rng.uniform(0.0, 2 * np.pi, modes)
    shape = np.zeros_like(s)
    for j in range(1, modes + 1):
        if closed:
            f = 2 * np.pi * j
            shape += w[j - 1] * (np.sin(f * s + ph[j - 1]) - np.sin(ph[j - 1])) / f
        else:
            f = np.pi * j
            shape += w[j - 1] * np.sin(f * s) / f
    ca = rng.uniform(-1.0, 1.0, 3)
    ca /= max(np.sum(np.abs(ca)), 1e-300)
    pa = rng.uniform(0.0, 2 * np.pi, 3)
    amp = amplitude * sum(ca[i] * np.sin(np.pi * (i + 1) * t + pa[i]) for i in range(3))
    co = rng.uniform(-1.0, 1.0, 3)
    po = rng.uniform(0.0, 2 * np.pi, 3)
    off = drift * sum(co[i] * np.sin(np.pi * (i + 1) * t + po[i]) for i in range(3)) / 3
    diffeos = []
    for k in range(K + 1):
        vals = s + amp[k] * shape
        if closed:
            vals = vals + off[k]
            vals[-1] = vals[0] + 1.0
        else:
            vals[0], vals[-1] = 0.0, 1.0
        diffeos.append(DiffeoGrid(vals, closed))
    return PathGauge(tuple(diffeos))


def quotient_agreement_report(path, params):
    """Compare the horizontal (quotient) and pointwise-normal (gauge) squared speeds.

    The two degenerate constructions agree on velocities that are already
    pointwise normal *and* horizontal, and both vanish on vertical
    velocities; in general they are not ordered.
    """
    X = path.slices
    hor = slice_terms(X, MetricChoice("quotient", params), path.closed)
    gau = slice_terms(X, MetricChoice("gauge", params), path.closed)
    amb = slice_terms(X, MetricChoice("ambient", params), path.closed)
    return {
        "horizontal": hor.tolist(),
        "gauge": gau.tolist(),
        "ambient": amb.tolist(),
        "difference": (gau - hor).tolist(),
    }
