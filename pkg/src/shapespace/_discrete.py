"""Array-level kernels shared by the curve, metric and optimizer modules.

Everything here takes raw ``(..., N, 2)`` arrays so the optimizer can
evaluate whole paths at once.  Public wrappers with validation live in
:mod:`shapespace.curves`, :mod:`shapespace.elastic` and
:mod:`shapespace.bundles`.

Conventions
-----------
* Vertex ``i`` is sample ``i``.  Edge ``e`` joins vertices ``e`` and ``e+1``
  (``N-1`` edges for open curves, ``N`` for closed curves, the last one
  wrapping back to vertex 0).
* ``rot90`` rotates by +90 degrees: ``(x, y) -> (-y, x)``.
"""

import numpy as np

from .errors import DegenerateCurveError


def rot90(v):
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def rot90_adjoint(v):
    # transpose of rot90, i.e. rotation by -90 degrees
    out = np.empty_like(v)
    out[..., 0] = v[..., 1]
    out[..., 1] = -v[..., 0]
    return out


def dot(u, v):
    return np.einsum("...i,...i->...", u, v)


def edge_diff(x, closed):
    """Differences ``x[e+1] - x[e]`` along the sample axis (axis -2)."""
    if closed:
        return np.roll(x, -1, axis=-2) - x
    return x[..., 1:, :] - x[..., :-1, :]


def edge_diff_adjoint(g, closed):
    """Adjoint of :func:`edge_diff` (maps edge gradients to vertex gradients)."""
    if closed:
        return np.roll(g, 1, axis=-2) - g
    shape = g.shape[:-2] + (g.shape[-2] + 1, g.shape[-1])
    out = np.zeros(shape, dtype=g.dtype)
    out[..., 1:, :] += g
    out[..., :-1, :] -= g
    return out


def check_chords(chords, rel=0.0):
    if not np.all(np.isfinite(chords)):
        raise DegenerateCurveError("non-finite sample coordinates")
    floor = rel * float(np.mean(chords)) if rel > 0 else 0.0
    bad = np.nonzero(chords.reshape(-1) <= floor)[0]
    if bad.size:
        raise DegenerateCurveError(
            f"discrete immersion violated: chord {int(bad[0])} has length "
            f"{float(chords.reshape(-1)[bad[0]]):.3g}"
        )


def centered_diff(x, closed):
    """``x[i+1] - x[i-1]``; one-sided differences at open endpoints."""
    if closed:
        return np.roll(x, -1, axis=-2) - np.roll(x, 1, axis=-2)
    d = np.empty_like(x)
    d[..., 1:-1, :] = x[..., 2:, :] - x[..., :-2, :]
    d[..., 0, :] = x[..., 1, :] - x[..., 0, :]
    d[..., -1, :] = x[..., -1, :] - x[..., -2, :]
    return d


def centered_diff_adjoint(g, closed):
    if closed:
        return np.roll(g, 1, axis=-2) - np.roll(g, -1, axis=-2)
    out = np.zeros_like(g)
    out[..., 2:, :] += g[..., 1:-1, :]
    out[..., :-2, :] -= g[..., 1:-1, :]
    out[..., 1, :] += g[..., 0, :]
    out[..., 0, :] -= g[..., 0, :]
    out[..., -1, :] += g[..., -1, :]
    out[..., -2, :] -= g[..., -1, :]
    return out


def vertex_tangents(P, closed):
    """Unit tangents from centered chord differences, plus the raw chords."""
    D = centered_diff(P, closed)
    nrm = np.linalg.norm(D, axis=-1)
    check_chords(nrm)
    return D / nrm[..., None], D, nrm


def vertex_tangents_adjoint(gt, t, nrm, closed):
    """Pull a gradient on the unit tangents back to the sample points."""
    gD = (gt - dot(gt, t)[..., None] * t) / nrm[..., None]
    return centered_diff_adjoint(gD, closed)


def vertex_weights(chords, closed):
    """Trapezoidal arc-length weights ``ds_i``; they sum to the polygon length."""
    if closed:
        return 0.5 * (chords + np.roll(chords, 1, axis=-1))
    shape = chords.shape[:-1] + (chords.shape[-1] + 1,)
    ds = np.zeros(shape)
    ds[..., 1:] += 0.5 * chords
    ds[..., :-1] += 0.5 * chords
    return ds


# ---------------------------------------------------------------------------
# Edge-assembled elastic form
#
# For an edge with chord d (length c) and field increment dh the elastic
# integrand times ds is
#     [a (dh.t)^2 + b (dh.n)^2] / c,    t = d/c, n = rot90(t)
# and because (dh.t)^2 + (dh.n)^2 = |dh|^2 this is
#     b |dh|^2 / c + (a - b) (dh.d)^2 / c^3.
# ---------------------------------------------------------------------------


def edge_bilinear(P, H1, H2, a, b, closed):
    """Per-edge values of the elastic bilinear form."""
    d = edge_diff(P, closed)
    c = np.linalg.norm(d, axis=-1)
    t = d / c[..., None]
    n = rot90(t)
    d1 = edge_diff(H1, closed)
    d2 = edge_diff(H2, closed)
    # grouped so that swapping the arguments is bitwise symmetric
    return (a * (dot(d1, t) * dot(d2, t)) + b * (dot(d1, n) * dot(d2, n))) / c


def edge_quadratic_grad(P, H, a, b, closed):
    """Sum of the edge quadratic form and its gradients w.r.t. ``P`` and ``H``.

    Returns ``(value, dP, dH)`` where ``value`` has the batch shape.
    """
    d = edge_diff(P, closed)
    dh = edge_diff(H, closed)
    c2 = dot(d, d)
    c = np.sqrt(c2)
    hh = dot(dh, dh)
    hd = dot(dh, d)
    amb = a - b
    q = b * hh / c + amb * hd * hd / (c2 * c)
    g_dh = (2.0 * b / c)[..., None] * dh + (2.0 * amb * hd / (c2 * c))[..., None] * d
    g_d = (2.0 * amb * hd / (c2 * c))[..., None] * dh + (
        (-b * hh / (c2 * c) - 3.0 * amb * hd * hd / (c2 * c2 * c))[..., None] * d
    )
    return (
        q.sum(axis=-1),
        edge_diff_adjoint(g_d, closed),
        edge_diff_adjoint(g_dh, closed),
    )
