import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapespace.curves import circle, compute_frame, ellipse, random_diffeo, resample_values
from shapespace.elastic import ElasticParams, TangentField, ds_derivative, elastic_inner, elastic_norm
from shapespace.errors import GridMismatchError, ValidationError


def orders(errs):
    e = np.asarray(errs)
    return np.log2(e[:-1] / e[1:])


def frame_fields(F):
    fr = compute_frame(F)
    return TangentField(F, fr.tangent), TangentField(F, fr.normal)


def test_params_validation():
    for a, b in ((0, 1), (1, 0), (-1, 1), (np.inf, 1), (np.nan, 1)):
        with pytest.raises(ValidationError):
            ElasticParams(a, b)


def test_field_shape_mismatch():
    with pytest.raises(GridMismatchError):
        TangentField(circle(16), np.zeros((15, 2)))
    with pytest.raises(GridMismatchError):
        elastic_inner(circle(16), TangentField.zeros(circle(16)), TangentField.zeros(circle(17)), ElasticParams())


def test_ds_derivative_examples():
    errs_n, errs_t = [], []
    for N in (64, 128, 256, 512):
        F = circle(N)
        t, n = frame_fields(F)
        assert np.abs(ds_derivative(F, TangentField.constant(F, (2.0, -1.0))).vectors).max() == 0.0
        errs_n.append(np.abs(ds_derivative(F, n).vectors + t.vectors).max())
        errs_t.append(np.abs(ds_derivative(F, t).vectors - n.vectors).max())
    assert np.all(orders(errs_n) >= 1.9)
    assert np.all(orders(errs_t) >= 1.9)


def test_constant_field_is_null():
    rng = np.random.default_rng(0)
    F = ellipse(50, angle=0.7)
    c = TangentField.constant(F, (3.0, -2.0))
    h = TangentField(F, rng.normal(size=(50, 2)))
    assert elastic_inner(F, c, h, ElasticParams(2, 5)) == 0.0


@pytest.mark.parametrize("a,b", [(1, 1), (2, 0.5), (0.3, 7)])
def test_circle_analytic_values(a, b):
    p = ElasticParams(a, b)
    en, et = [], []
    for N in (64, 128, 256, 512):
        F = circle(N)
        t, n = frame_fields(F)
        en.append(abs(elastic_inner(F, n, n, p) / (2 * np.pi * a) - 1))
        et.append(abs(elastic_inner(F, t, t, p) / (2 * np.pi * b) - 1))
    assert en[2] <= 1e-3 and et[2] <= 1e-3
    assert np.all(orders(en) >= 1.95) and np.all(orders(et) >= 1.95)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_symmetric_and_bilinear(seed, a, b, s1, s2):
    rng = np.random.default_rng(seed)
    F = ellipse(24, angle=rng.uniform(0, np.pi))
    p = ElasticParams(a, b)
    h1, h2, h3 = (TangentField(F, rng.normal(size=(24, 2))) for _ in range(3))
    assert elastic_inner(F, h1, h2, p) == elastic_inner(F, h2, h1, p)
    lhs = elastic_inner(F, h1 * s1 + h3 * s2, h2, p)
    rhs = s1 * elastic_inner(F, h1, h2, p) + s2 * elastic_inner(F, h3, h2, p)
    scale = (abs(s1) + abs(s2) + 1) * elastic_norm(F, h2, p) * max(elastic_norm(F, h1, p), elastic_norm(F, h3, p))
    assert abs(lhs - rhs) <= 1e-12 * scale
    assert elastic_inner(F, h1, h1, p) >= 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.05, 20))
def test_scaling(seed, lam):
    rng = np.random.default_rng(seed)
    F = ellipse(32, angle=rng.uniform(0, np.pi))
    h = TangentField(F, rng.normal(size=(32, 2)))
    G = F.with_points(lam * F.points)
    val = elastic_inner(G, TangentField(G, lam * h.vectors), TangentField(G, lam * h.vectors), ElasticParams(1.5, 0.5))
    ref = elastic_inner(F, h, h, ElasticParams(1.5, 0.5))
    assert val == pytest.approx(lam * ref, rel=1e-12)


def test_deterministic():
    rng = np.random.default_rng(9)
    F = ellipse(64)
    h1, h2 = (TangentField(F, rng.normal(size=(64, 2))) for _ in range(2))
    p = ElasticParams(1, 3)
    assert elastic_inner(F, h1, h2, p) == elastic_inner(F, h1, h2, p)


def test_reparameterization_invariance_converges():
    p = ElasticParams(1.0, 2.0)
    worst = []
    for N in (128, 256, 512):
        rng = np.random.default_rng(21)
        F = ellipse(N)
        th = 2 * np.pi * np.arange(N) / N
        h = np.column_stack([np.cos(2 * th), np.sin(th) + 0.5 * np.cos(3 * th)])
        g = random_diffeo(N, True, rng, amplitude=0.5)
        G = F.with_points(resample_values(F.points, True, g))
        k = TangentField(G, resample_values(h, True, g))
        ref = elastic_inner(F, TangentField(F, h), TangentField(F, h), p)
        worst.append(abs(elastic_inner(G, k, k, p) - ref) / ref)
    assert worst[0] <= 5e-2
    assert np.all(orders(worst) >= 1.0)
