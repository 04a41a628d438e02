import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapespace.bundles import (
    gauge_inner,
    horizontal_project,
    horizontal_residual,
    normal_project,
    quotient_inner,
    section_tangent_project,
    solve_cyclic_tridiagonal,
    solve_tridiagonal,
    tangential_component,
    vertical_field,
)
from shapespace.curves import SampledCurve, circle, compute_frame, ellipse, segment, to_arclength
from shapespace.elastic import ElasticParams, TangentField, elastic_inner, elastic_norm
from shapespace.errors import ValidationError

PARAMS = [(1.0, 1.0), (1.0, 10.0), (10.0, 1.0)]


def wavy_open(N):
    x = np.linspace(0, 2, N)
    return SampledCurve(np.column_stack([x, 0.4 * np.sin(2 * x)]), False)


def frame_fields(F):
    fr = compute_frame(F)
    return TangentField(F, fr.tangent), TangentField(F, fr.normal)


def test_tridiagonal_solvers_match_dense():
    rng = np.random.default_rng(0)
    n = 12
    lo, up = rng.normal(size=n), rng.normal(size=n)
    d = 4 + np.abs(rng.normal(size=n))
    rhs = rng.normal(size=n)
    A = np.diag(d) + np.diag(lo[:-1], -1) + np.diag(up[:-1], 1)
    assert np.allclose(solve_tridiagonal(lo[:-1], d, up[:-1], rhs), np.linalg.solve(A, rhs), atol=1e-13)
    # corners: lower[n-1] = A[0, n-1] and upper[n-1] = A[n-1, 0]
    A[0, -1], A[-1, 0] = lo[-1], up[-1]
    assert np.allclose(solve_cyclic_tridiagonal(lo, d, up, rhs), np.linalg.solve(A, rhs), atol=1e-13)


def test_vertical_field_examples():
    F = circle(256)
    assert np.all(vertical_field(F, np.zeros(256)).vectors == 0)
    t, _ = frame_fields(F)
    one = vertical_field(F, np.ones(256))
    assert np.array_equal(one.vectors, t.vectors)
    assert elastic_inner(F, one, one, ElasticParams(1, 3)) == pytest.approx(2 * np.pi * 3, rel=1e-3)
    m = np.random.default_rng(1).normal(size=256)
    assert np.allclose(tangential_component(F, vertical_field(F, m)), m, rtol=0, atol=1e-15)


def test_normal_project_examples():
    F = ellipse(64)
    t, n = frame_fields(F)
    assert np.abs(normal_project(F, t * 3).vectors).max() < 1e-15
    assert np.allclose(normal_project(F, n * 2).vectors, 2 * n.vectors, atol=1e-15)
    assert np.allclose(normal_project(F, t + n).vectors, n.vectors, atol=1e-15)


@pytest.mark.parametrize("a,b", PARAMS)
@pytest.mark.parametrize("shape", ["circle", "ellipse", "open"])
def test_horizontal_recovers_vertical_input(a, b, shape):
    N = 128
    F = {"circle": circle(N), "ellipse": ellipse(N), "open": wavy_open(N)}[shape]
    s = np.linspace(0, 1, N)
    m0 = np.sin(2 * np.pi * s) + 0.3 * np.cos(4 * np.pi * s)
    if shape == "open":
        m0 = np.sin(np.pi * s) * (1 + s)
        m0[[0, -1]] = 0.0
    h = vertical_field(F, m0)
    m, w = horizontal_project(F, h, ElasticParams(a, b))
    assert np.abs(m - m0).max() <= 1e-8
    assert np.abs(w.vectors).max() <= 1e-8


@pytest.mark.parametrize("a,b", PARAMS)
def test_horizontal_idempotent(a, b):
    rng = np.random.default_rng(3)
    F = ellipse(96, angle=0.4)
    p = ElasticParams(a, b)
    _, w = horizontal_project(F, TangentField(F, rng.normal(size=(96, 2))), p)
    m2, w2 = horizontal_project(F, w, p)
    assert np.abs(m2).max() <= 1e-8 * np.abs(w.vectors).max()
    assert np.allclose(w2.vectors, w.vectors, atol=1e-10)


@pytest.mark.parametrize("a,b", PARAMS)
@pytest.mark.parametrize("closed", [True, False])
def test_horizontal_orthogonality_and_reconstruction(a, b, closed):
    rng = np.random.default_rng(4)
    N = 256
    F = ellipse(N) if closed else wavy_open(N)
    p = ElasticParams(a, b)
    for _ in range(25):
        h = TangentField(F, rng.normal(size=(N, 2)))
        m, w = horizontal_project(F, h, p)
        mv = rng.normal(size=N)
        if not closed:
            # open-curve reparameterizations fix both endpoints
            mv[[0, -1]] = 0.0
        mt = vertical_field(F, mv)
        assert abs(elastic_inner(F, w, mt, p)) <= 1e-6 * elastic_norm(F, w, p) * elastic_norm(F, mt, p)
        rec = vertical_field(F, m).vectors + w.vectors
        assert np.linalg.norm(rec - h.vectors) <= 1e-8 * np.linalg.norm(h.vectors)


def test_horizontal_equivariant_under_cyclic_shift():
    rng = np.random.default_rng(5)
    F = ellipse(64, angle=0.2)
    h = rng.normal(size=(64, 2))
    p = ElasticParams(1, 4)
    m, w = horizontal_project(F, TangentField(F, h), p)
    for j in (1, 17):
        G = F.with_points(np.roll(F.points, j, axis=0))
        mj, wj = horizontal_project(G, TangentField(G, np.roll(h, j, axis=0)), p)
        assert np.allclose(mj, np.roll(m, j), rtol=0, atol=1e-12)
        assert np.allclose(wj.vectors, np.roll(w.vectors, j, axis=0), rtol=0, atol=1e-12)


def test_horizontal_residual_converges_for_smooth_horizontal_field():
    # w = h - m t from a smooth h satisfies the continuous condition up to O(N^-2)
    res = []
    for N in (64, 128, 256, 512):
        F = ellipse(N)
        th = 2 * np.pi * np.arange(N) / N
        h = TangentField(F, np.column_stack([np.cos(2 * th), np.sin(3 * th)]))
        _, w = horizontal_project(F, h, ElasticParams(1, 2))
        res.append(np.abs(horizontal_residual(F, w, ElasticParams(1, 2))).max())
    assert np.all(np.log2(np.array(res[:-1]) / res[1:]) >= 1.8)


def test_section_tangent_examples():
    F = circle(128)
    t, n = frame_fields(F)
    # t' . t = 0 on an arc-length curve, so t is tangent to the section
    m, w, r = section_tangent_project(F, t)
    assert np.abs(m).max() < 1e-12 and abs(r) < 1e-12
    assert np.allclose(w.vectors, t.vectors, atol=1e-12)
    # h' . t = 0: a constant field
    c = TangentField.constant(F, (1.0, 2.0))
    m, w, r = section_tangent_project(F, c)
    assert np.all(m == 0) and r == 0 and np.array_equal(w.vectors, c.vectors)


def test_section_tangent_open_segment():
    for N in (16, 64, 256):
        F = segment(N, (0, 0), (1, 0))
        s = np.linspace(0, 1, N)
        m, w, r = section_tangent_project(F, TangentField(F, np.column_stack([s, 0 * s])))
        assert np.abs(m - s).max() <= 1.0 / N
        assert r == 0.0


def test_section_tangent_residual_for_growth():
    # uniform dilation changes the length, so it is not tangent to the closed section
    F = circle(64)
    _, _, r = section_tangent_project(F, TangentField(F, F.points))
    assert abs(r) > 1.0


def test_section_tangent_requires_arclength():
    F = ellipse(64)
    with pytest.raises(ValidationError):
        section_tangent_project(F, TangentField.zeros(F))
    A = to_arclength(F)
    section_tangent_project(A, TangentField.zeros(A))


def test_section_reconstruction():
    rng = np.random.default_rng(6)
    F = to_arclength(ellipse(128))
    h = TangentField(F, rng.normal(size=(128, 2)))
    m, w, _ = section_tangent_project(F, h)
    assert np.allclose(vertical_field(F, m).vectors + w.vectors, h.vectors, atol=1e-12)


def test_gauge_inner_examples():
    F = circle(256)
    t, n = frame_fields(F)
    p = ElasticParams(2.0, 0.7)
    rng = np.random.default_rng(7)
    h2 = TangentField(F, rng.normal(size=(256, 2)))
    assert abs(gauge_inner(F, vertical_field(F, rng.normal(size=256)), h2, p)) < 1e-12
    assert gauge_inner(F, n, n, p) == pytest.approx(2 * np.pi * 2.0, rel=1e-3)
    assert gauge_inner(F, t + n, n, p) == pytest.approx(2 * np.pi * 2.0, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_gauge_inner_symmetric_psd(seed):
    rng = np.random.default_rng(seed)
    F = ellipse(40, angle=rng.uniform(0, 3))
    p = ElasticParams(*rng.uniform(0.2, 5, 2))
    h1, h2 = (TangentField(F, rng.normal(size=(40, 2))) for _ in range(2))
    assert gauge_inner(F, h1, h2, p) == gauge_inner(F, h2, h1, p)
    assert gauge_inner(F, h1, h1, p) >= 0


def test_quotient_inner_matches_ambient_on_horizontal():
    rng = np.random.default_rng(8)
    F = ellipse(128)
    p = ElasticParams(1, 3)
    _, w1 = horizontal_project(F, TangentField(F, rng.normal(size=(128, 2))), p)
    _, w2 = horizontal_project(F, TangentField(F, rng.normal(size=(128, 2))), p)
    assert quotient_inner(F, w1, w2, p) == pytest.approx(elastic_inner(F, w1, w2, p), rel=1e-9)
    h = TangentField(F, rng.normal(size=(128, 2)))
    assert quotient_inner(F, h, h, p) <= elastic_inner(F, h, h, p)
