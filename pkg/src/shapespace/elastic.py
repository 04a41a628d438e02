"""The elastic metric ``g^{a,b}`` on tangent fields along a sampled curve.

For a field ``h`` along ``F`` the metric integrates

    a (D_s h . t)^2 + b (D_s h . n)^2   against   ds,

where ``D_s`` differentiates along arc length.  The discrete form is
assembled edge by edge: on the edge joining samples ``i`` and ``i+1`` the
derivative is ``(h_{i+1} - h_i) / c_i`` with ``c_i`` the chord length, and
``t, n`` are the edge's unit chord and its +90 degree rotation.  Constant
fields are exactly null, and the projection onto reparameterization
directions (see :mod:`shapespace.bundles`) reduces to a tridiagonal solve.
"""

from dataclasses import dataclass

import numpy as np

from . import _discrete as dk
from .curves import SampledCurve, _frozen_array
from .errors import GridMismatchError, ValidationError


@dataclass(frozen=True)
class ElasticParams:
    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        for name in ("a", "b"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0:
                raise ValidationError(f"elastic parameter {name} must be > 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True, eq=False)
class TangentField:
    """Planar vectors attached to the samples of ``curve``."""

    curve: SampledCurve
    vectors: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.vectors, 2, "field")
        if v.shape != self.curve.points.shape:
            raise GridMismatchError(
                f"field shape {v.shape} does not match curve samples {self.curve.points.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ValidationError("field components must be finite")
        object.__setattr__(self, "vectors", v)

    def __add__(self, other):
        _check_same_base(self.curve, other)
        return TangentField(self.curve, self.vectors + other.vectors)

    def __sub__(self, other):
        _check_same_base(self.curve, other)
        return TangentField(self.curve, self.vectors - other.vectors)

    def __mul__(self, s):
        return TangentField(self.curve, self.vectors * float(s))

    __rmul__ = __mul__

    @classmethod
    def zeros(cls, curve):
        return cls(curve, np.zeros_like(curve.points))

    @classmethod
    def constant(cls, curve, vec):
        return cls(curve, np.broadcast_to(np.asarray(vec, float), curve.points.shape))


def _check_same_base(curve, *fields):
    for h in fields:
        if h.curve is curve:
            continue
        if not (h.curve.same_grid(curve) and np.array_equal(h.curve.points, curve.points)):
            raise GridMismatchError("tangent field is attached to a different curve")


def ds_derivative(curve, h):
    """Arc-length derivative ``D_s h`` at the samples.

    Centered difference quotient ``(h_{i+1} - h_{i-1}) / (c_{i-1} + c_i)``,
    periodic for closed curves, one-sided at open endpoints.
    """
    _check_same_base(curve, h)
    P, closed = curve.points, curve.closed
    chords = np.linalg.norm(dk.edge_diff(P, closed), axis=-1)
    dk.check_chords(chords)
    if closed:
        span = chords + np.roll(chords, 1)
    else:
        span = np.concatenate([[chords[0]], chords[1:] + chords[:-1], [chords[-1]]])
    return TangentField(curve, dk.centered_diff(h.vectors, closed) / span[:, None])


def elastic_inner(curve, h1, h2, params):
    """Discrete ``g^{a,b}(h1, h2)`` at ``curve``; summed in edge order."""
    _check_same_base(curve, h1, h2)
    vals = dk.edge_bilinear(
        curve.points, h1.vectors, h2.vectors, params.a, params.b, curve.closed
    )
    return float(np.sum(vals))


def elastic_norm(curve, h, params):
    return float(np.sqrt(max(elastic_inner(curve, h, h, params), 0.0)))
