"""Vertical, normal, horizontal and section-tangent decompositions of tangent
fields for the reparameterization action on curves.

Vertical fields ``m t`` move samples along the curve without changing its
image.  Three complements to them are implemented:

* the pointwise normal bundle ``{Phi n}`` (no equation to solve),
* the horizontal bundle, the ``g^{a,b}``-orthogonal complement, obtained by
  a (cyclic) tridiagonal solve for ``m``,
* the tangent space of the arc-length section, obtained by a cumulative sum.

The horizontal solve is the discrete form of the boundary value problem
``(m')' - (b/a) kappa^2 |F'| m = ...`` (primes along the parameter); see
``docs/horizontal_projection.md`` for the derivation.  Because the system is
assembled from the same edge form as :func:`elastic_inner`, the returned
``w`` is orthogonal to every vertical field up to solver round-off.
"""

import numpy as np
from scipy.linalg import solve_banded

from . import _discrete as dk
from .elastic import TangentField, _check_same_base, elastic_inner
from .errors import SolverError, ValidationError


def vertical_field(curve, m):
    m = np.asarray(m, dtype=float)
    if m.shape != (curve.n,):
        raise ValidationError(f"vertical coefficient must have shape ({curve.n},)")
    t, _, _ = dk.vertex_tangents(curve.points, curve.closed)
    return TangentField(curve, m[:, None] * t)


def tangential_component(curve, h):
    _check_same_base(curve, h)
    t, _, _ = dk.vertex_tangents(curve.points, curve.closed)
    return dk.dot(h.vectors, t)


def normal_component(curve, h):
    _check_same_base(curve, h)
    t, _, _ = dk.vertex_tangents(curve.points, curve.closed)
    return dk.dot(h.vectors, dk.rot90(t))


def normal_project(curve, h):
    """Pointwise projection ``(h . n) n`` onto the normal bundle."""
    _check_same_base(curve, h)
    t, _, _ = dk.vertex_tangents(curve.points, curve.closed)
    n = dk.rot90(t)
    return TangentField(curve, dk.dot(h.vectors, n)[:, None] * n)


# ---------------------------------------------------------------------------
# Tridiagonal machinery
# ---------------------------------------------------------------------------


def solve_tridiagonal(lower, diag, upper, rhs):
    """Solve a tridiagonal system; ``lower[i]`` is A[i+1, i], ``upper[i]`` is A[i, i+1]."""
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    try:
        return solve_banded((1, 1), ab, rhs, check_finite=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SolverError(f"tridiagonal solve failed: {exc}") from exc


def solve_cyclic_tridiagonal(lower, diag, upper, rhs):
    """Solve a cyclic tridiagonal system by a Sherman-Morrison correction.

    ``lower`` and ``upper`` have length ``n``: ``upper[i]`` is A[i, i+1 mod n]
    and ``lower[i]`` is A[i+1 mod n, i], so ``upper[n-1]`` and ``lower[n-1]``
    are the corner entries A[n-1, 0] and A[0, n-1].
    """
    n = diag.size
    alpha = upper[n - 1]  # A[n-1, 0]
    beta = lower[n - 1]  # A[0, n-1]
    gamma = -diag[0] if diag[0] != 0 else -1.0
    d = np.array(diag, dtype=float, copy=True)
    d[0] -= gamma
    d[-1] -= alpha * beta / gamma
    u = np.zeros(n)
    u[0], u[-1] = gamma, alpha
    v = np.zeros(n)
    v[0], v[-1] = 1.0, beta / gamma
    sol = solve_tridiagonal(lower[:-1], d, upper[:-1], np.column_stack([rhs, u]))
    y, q = sol[:, 0], sol[:, 1]
    denom = 1.0 + v @ q
    if not np.isfinite(denom) or abs(denom) < 1e-14:
        raise SolverError("cyclic tridiagonal system is singular")
    x = y - (v @ y) / denom * q
    if not np.all(np.isfinite(x)):
        raise SolverError("cyclic tridiagonal solve produced non-finite values")
    return x


def vertical_system(P, tau, a, b, closed):
    """Gram matrix of the vertical fields ``e_i tau_i`` in the edge form.

    Returns ``(diag, off)`` where ``off[e]`` couples the two ends of edge
    ``e`` (cyclically for closed curves).
    """
    d = dk.edge_diff(P, closed)
    c = np.linalg.norm(d, axis=-1)
    te = d / c[:, None]
    ne = dk.rot90(te)
    ti = tau if closed else tau[:-1]
    tj = np.roll(tau, -1, axis=0) if closed else tau[1:]

    def form(x, y):
        return (a * dk.dot(x, te) * dk.dot(y, te) + b * dk.dot(x, ne) * dk.dot(y, ne)) / c

    diag = np.zeros(P.shape[0])
    head = form(ti, ti)
    tail = form(tj, tj)
    if closed:
        diag += head + np.roll(tail, 1)
    else:
        diag[:-1] += head
        diag[1:] += tail
    return diag, -form(ti, tj), form


def vertical_rhs(P, tau, H, form, closed):
    """``B_i = g(H, e_i tau_i)`` for every sample ``i``."""
    dh = dk.edge_diff(H, closed)
    ti = tau if closed else tau[:-1]
    tj = np.roll(tau, -1, axis=0) if closed else tau[1:]
    rhs = np.zeros(P.shape[0])
    head = -form(dh, ti)
    tail = form(dh, tj)
    if closed:
        rhs += head + np.roll(tail, 1)
    else:
        rhs[:-1] += head
        rhs[1:] += tail
    return rhs


def horizontal_coefficients(P, H, a, b, closed, tau=None):
    """Vertical coefficient ``m`` of the g-orthogonal split ``H = m tau + w``.

    Open curves use ``m = 0`` at both endpoints.
    """
    if tau is None:
        tau, _, _ = dk.vertex_tangents(P, closed)
    diag, off, form = vertical_system(P, tau, a, b, closed)
    rhs = vertical_rhs(P, tau, H, form, closed)
    if closed:
        m = solve_cyclic_tridiagonal(off, diag, off, rhs)
    else:
        m = np.zeros(P.shape[0])
        inner = off[1:-1]
        m[1:-1] = solve_tridiagonal(inner, diag[1:-1], inner, rhs[1:-1])
    if not np.all(np.isfinite(m)):
        raise SolverError("horizontal projection produced non-finite coefficients")
    return m


def horizontal_project(curve, h, params):
    """Split ``h = m t + w`` with ``w`` g^{a,b}-orthogonal to all vertical fields.

    Returns
    -------
    m : ndarray, shape (N,)
        Vertical coefficient (zero at open-curve endpoints).
    w : TangentField
        Horizontal part.
    """
    _check_same_base(curve, h)
    tau, _, _ = dk.vertex_tangents(curve.points, curve.closed)
    m = horizontal_coefficients(
        curve.points, h.vectors, params.a, params.b, curve.closed, tau
    )
    return m, TangentField(curve, h.vectors - m[:, None] * tau)


def horizontal_residual(curve, w, params):
    """Pointwise residual of the continuous horizontality condition.

    Evaluates ``d/dt (w'.t / |F'|) - (b/a) kappa (w'.n)`` (primes along the
    parameter) with centered differences.  A consistency check for smooth
    fields only; it vanishes as ``N`` grows when ``w`` is horizontal.
    """
    from .curves import compute_frame

    fr = compute_frame(curve)
    M = curve.intervals
    dw = dk.centered_diff(w.vectors, curve.closed) * (M / 2.0)
    speed = fr.ds * M
    wt = dk.dot(dw, fr.tangent) / speed
    wn = dk.dot(dw, fr.normal)
    dwt = dk.centered_diff(wt[:, None], curve.closed)[:, 0] * (M / 2.0)
    return dwt - params.b / params.a * fr.curvature * wn


def section_tangent_project(curve, h, rtol=1e-6):
    """Split ``h = m t + w`` with ``w`` tangent to the arc-length section.

    ``m`` solves ``m' = h'.t`` by cumulative summation with ``m(0) = 0``.  On a
    closed curve the mean of ``h'.t`` cannot be absorbed by a periodic ``m``;
    it is removed before summation and returned as ``residual``.

    Returns
    -------
    m : ndarray
    w : TangentField
    residual : float
    """
    _check_same_base(curve, h)
    chords = curve.chords
    if np.ptp(chords) > rtol * chords.mean():
        raise ValidationError(
            "section_tangent_project needs an arc-length parameterized curve "
            f"(chord spread {np.ptp(chords) / chords.mean():.2e} > {rtol:.0e})"
        )
    d = dk.edge_diff(curve.points, curve.closed)
    te = d / chords[:, None]
    q = dk.dot(dk.edge_diff(h.vectors, curve.closed), te)
    residual = 0.0
    if curve.closed:
        residual = float(q.mean() * curve.intervals)
        q = q - q.mean()
        m = np.concatenate([[0.0], np.cumsum(q[:-1])])
    else:
        m = np.concatenate([[0.0], np.cumsum(q)])
    tau, _, _ = dk.vertex_tangents(curve.points, curve.closed)
    return m, TangentField(curve, h.vectors - m[:, None] * tau), residual


def gauge_inner(curve, h1, h2, params):
    """Degenerate inner product ``g(p_Nor h1, p_Nor h2)`` with the pointwise normal bundle."""
    return elastic_inner(
        curve, normal_project(curve, h1), normal_project(curve, h2), params
    )


def quotient_inner(curve, h1, h2, params):
    """Degenerate inner product built from the horizontal bundle."""
    _, w1 = horizontal_project(curve, h1, params)
    _, w2 = horizontal_project(curve, h2, params)
    return elastic_inner(curve, w1, w2, params)
