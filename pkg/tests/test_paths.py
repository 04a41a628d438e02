import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapespace.bundles import vertical_field
from shapespace.curves import DiffeoGrid, circle, ellipse, random_diffeo, reparameterize, to_arclength
from shapespace.elastic import ElasticParams
from shapespace.errors import GridMismatchError, ValidationError
from shapespace.optimize import init_path
from shapespace.paths import (
    VARIANTS,
    CurvePath,
    MetricChoice,
    PathGauge,
    energy_and_gradient,
    gauge_act_path,
    path_energy,
    path_length,
    path_report,
    path_velocity,
    quotient_agreement_report,
    random_path_gauge,
    slice_terms,
)
from shapespace.selftest import bumpy_path, fd_gradient, random_small_path


def test_metric_choice_aliases():
    assert MetricChoice("GaugeNormal").variant == "gauge"
    assert MetricChoice("QuotientHorizontal").variant == "quotient"
    assert MetricChoice("section_arclength").variant == "section"
    with pytest.raises(ValidationError):
        MetricChoice("riemannian")


def test_curve_path_validation():
    with pytest.raises(ValidationError):
        CurvePath(np.zeros((2, 16, 2)))
    with pytest.raises(GridMismatchError):
        CurvePath.from_curves([circle(16), circle(17), circle(16)])
    with pytest.raises(ValidationError):
        CurvePath(np.zeros((3, 16, 2)))  # degenerate slices


def test_velocity_examples():
    F = ellipse(32)
    const = CurvePath.from_curves([F] * 5)
    assert np.all(path_velocity(const, 2).vectors == 0)
    K = 4
    trans = CurvePath.from_curves([F.with_points(F.points + [k / K, 0]) for k in range(K + 1)])
    for k in range(K):
        assert np.allclose(path_velocity(trans, k).vectors, [1.0, 0.0], atol=1e-14)
    lin = init_path(F, circle(32), 8)
    assert np.allclose(path_velocity(lin, 3).vectors, circle(32).points - F.points, atol=1e-13)
    with pytest.raises(IndexError):
        path_velocity(lin, 8)


def test_zero_energy_examples():
    F = ellipse(32)
    const = CurvePath.from_curves([F] * 4)
    for v in VARIANTS:
        assert path_energy(const, MetricChoice(v)) == 0.0
        assert path_length(const, MetricChoice(v)) == 0.0
    trans = init_path(F, F.with_points(F.points + [1.0, 0.0]), 6)
    assert path_energy(trans, MetricChoice("ambient")) < 1e-25


def _rotating_circle(N, K, cells):
    F = circle(N)
    return CurvePath.from_curves([reparameterize(F, DiffeoGrid.shift(N, cells * k)) for k in range(K + 1)])


@pytest.mark.xfail(strict=True, reason="forward differences cut chords: gauge length is K(1-cos d) sqrt(2 pi a), about 0.024 here")
def test_pure_reparameterization_path_below_1e3():
    assert path_length(_rotating_circle(256, 32, 1), MetricChoice("gauge")) <= 1e-3


def test_pure_reparameterization_path_matches_chord_defect():
    # each step rotates by d = 2 pi / N; the chord has normal part K (1 - cos d)
    N, K = 256, 32
    d = 2 * np.pi / N
    L = path_length(_rotating_circle(N, K, 1), MetricChoice("gauge"))
    assert L == pytest.approx(K * (1 - np.cos(d)) * np.sqrt(2 * np.pi), rel=1e-3)
    assert path_length(_rotating_circle(N, K, 1), MetricChoice("ambient")) > 30 * L


def test_pure_reparameterization_gauge_length_vanishes_as_k_grows():
    # fixed total rotation of a quarter turn, refined in time
    N = 256
    lengths = [path_length(_rotating_circle(N, K, N // (4 * K)), MetricChoice("gauge")) for K in (8, 16, 32, 64)]
    assert np.all(np.log2(np.array(lengths[:-1]) / lengths[1:]) >= 0.95)
    # leading term (pi/2)^2 / (2K) * sqrt(2 pi)
    assert lengths[-1] == pytest.approx((np.pi / 2) ** 2 / 128 * np.sqrt(2 * np.pi), rel=1e-2)


def test_length_energy_inequality():
    rng = np.random.default_rng(0)
    for v in VARIANTS:
        for closed in (True, False):
            path = CurvePath(random_small_path(rng, closed=closed), closed)
            choice = MetricChoice(v, ElasticParams(1, 2))
            L, E = path_length(path, choice), path_energy(path, choice)
            assert L * L <= 2 * E * (1 + 1e-14)


def test_section_equals_ambient_on_section_paths():
    path = init_path(to_arclength(ellipse(64)), to_arclength(ellipse(64, 1.5, 1.0, angle=0.5)), 6)
    path = path.with_slices(np.stack([to_arclength(c).points for c in path.curves()]))
    L_sec = path_length(path, MetricChoice("section"))
    L_amb = path_length(path, MetricChoice("ambient"))
    assert abs(L_sec - L_amb) <= 1e-9 * L_amb


def test_gauge_act_examples():
    path = bumpy_path(64, 8, (0.3, 1.1))
    ident = gauge_act_path(PathGauge.identity(64, 8), path)
    assert np.array_equal(ident.slices, path.slices)
    shifts = PathGauge(tuple(DiffeoGrid.shift(64, k % 5) for k in range(9)))
    shifted = gauge_act_path(shifts, path)
    for k in range(9):
        assert np.allclose(shifted.slices[k], np.roll(path.slices[k], k % 5, axis=0), atol=1e-12, rtol=0)
    with pytest.raises(GridMismatchError):
        gauge_act_path(PathGauge.identity(64, 7), path)


def test_constant_gauge_keeps_ambient_length_to_first_order():
    errs = []
    for N in (64, 128, 256):
        rng = np.random.default_rng(1)
        path = bumpy_path(N, 8, (0.2, 0.9))
        g = PathGauge.constant(random_diffeo(N, True, rng, amplitude=0.3), 8)
        L0 = path_length(path, MetricChoice("ambient"))
        errs.append(abs(path_length(gauge_act_path(g, path), MetricChoice("ambient")) - L0) / L0)
    assert errs[-1] < errs[0]
    assert np.all(np.log2(np.array(errs[:-1]) / errs[1:]) >= 0.9)


def test_gauge_invariance_versus_ambient():
    N, K = 128, 16
    rng = np.random.default_rng(3)
    path = bumpy_path(N, K, (0.5, 2.0))
    g = random_path_gauge(K, N, True, rng, amplitude=0.1, drift=0.03)
    acted = gauge_act_path(g, path)
    drift = abs(path_length(acted, MetricChoice("gauge")) / path_length(path, MetricChoice("gauge")) - 1)
    amb = abs(path_length(acted, MetricChoice("ambient")) / path_length(path, MetricChoice("ambient")) - 1)
    assert drift <= 0.35 * (1 / N + 1 / K)
    assert amb > 10 * drift


def test_random_path_gauge_is_valid():
    rng = np.random.default_rng(4)
    for closed in (True, False):
        g = random_path_gauge(8, 40, closed, rng, amplitude=0.9, drift=0.5)
        assert len(g) == 9
        assert all(d.closed == closed and d.intervals == 40 for d in g.diffeos)


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("closed", [True, False])
def test_gradient_matches_finite_differences(variant, closed):
    rng = np.random.default_rng(10 + VARIANTS.index(variant) + 7 * closed)
    X = random_small_path(rng, closed=closed)
    choice = MetricChoice(variant, ElasticParams(1.0, 2.0))
    E, G = energy_and_gradient(X, choice, closed)
    assert E == pytest.approx(path_energy(CurvePath(X, closed), choice), rel=1e-14)
    fd = fd_gradient(X, choice, closed)
    assert np.linalg.norm(G - fd) <= 1e-5 * np.linalg.norm(fd)


def test_path_report_fields():
    path = bumpy_path(32, 4, (0.0, 0.0))
    rep = path_report(path, MetricChoice("gauge", ElasticParams(2, 1)))
    assert rep["k"] == 4 and rep["n"] == 32 and rep["closed"] is True
    assert len(rep["slice_energy"]) == 4
    assert sum(rep["slice_energy"]) == pytest.approx(rep["energy"], rel=1e-14)
    assert sum(rep["slice_length"]) == pytest.approx(rep["length"], rel=1e-14)


def test_quotient_agreement_examples():
    N, K = 128, 4
    F = ellipse(N)
    p = ElasticParams(1.0, 2.0)
    # pointwise-normal velocity: the gauge term equals the ambient term
    from shapespace.curves import compute_frame

    n = compute_frame(F).normal
    phi = 0.3 * np.cos(2 * np.pi * np.arange(N) / N)
    X = np.stack([F.points + (k / K) * phi[:, None] * n for k in range(K + 1)])
    S_g = slice_terms(X, MetricChoice("gauge", p), True)
    S_a = slice_terms(X, MetricChoice("ambient", p), True)
    assert S_g[0] == pytest.approx(S_a[0], rel=1e-12)
    # vertical velocity: both degenerate constructions vanish at the first slice
    v = vertical_field(F, np.sin(2 * np.pi * np.arange(N) / N)).vectors
    Xv = np.stack([F.points + 1e-3 * (k / K) * v for k in range(K + 1)])
    rep = quotient_agreement_report(CurvePath(Xv, True), p)
    assert rep["horizontal"][0] <= 1e-16 * rep["ambient"][0] + 1e-20
    assert rep["gauge"][0] <= 1e-16 * rep["ambient"][0] + 1e-20


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_horizontal_energy_bounded_by_ambient(seed):
    rng = np.random.default_rng(seed)
    path = CurvePath(random_small_path(rng, N=24, K=3), True)
    rep = quotient_agreement_report(path, ElasticParams(*rng.uniform(0.2, 5, 2)))
    for h, a in zip(rep["horizontal"], rep["ambient"]):
        assert h <= a * (1 + 1e-10)
