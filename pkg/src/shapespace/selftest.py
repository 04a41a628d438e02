"""Acceptance suites 1-9, shared by ``shapespace selftest`` and the pytest
acceptance module.  Each suite returns a :class:`SuiteResult` made of named
checks; a suite passes when every check does.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import heisenberg as hz
from .bundles import horizontal_project, vertical_field
from .curves import (
    DiffeoGrid,
    SampledCurve,
    align_ellipse,
    align_start_tangent,
    center_centroid,
    circle,
    compute_frame,
    ellipse,
    random_diffeo,
    resample_values,
    scale_area,
    scale_length,
    start_to_origin,
)
from .elastic import ElasticParams, TangentField, elastic_inner
from .optimize import OptimizerConfig, init_path, straighten
from .paths import (
    VARIANTS,
    CurvePath,
    MetricChoice,
    energy_and_gradient,
    gauge_act_path,
    path_length,
    random_path_gauge,
)

EPS = np.finfo(float).eps


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self):
        return bool(self.checks) and all(c.passed for c in self.checks)

    def add(self, name, passed, detail=""):
        self.checks.append(Check(name, bool(passed), detail))

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        failed = [c.name for c in self.checks if not c.passed]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        return f"[{status}] {self.number}. {self.title} ({len(self.checks)} checks, {self.seconds:.2f}s){extra}"


def observed_orders(errors):
    e = np.asarray(errors, dtype=float)
    return np.log2(e[:-1] / e[1:])


# ---------------------------------------------------------------------------
# 1-3: Heisenberg bundle
# ---------------------------------------------------------------------------


def _random_poly(rng, degree=2):
    return hz.Polynomial2D(
        {(i, j): rng.normal() for i in range(degree + 1) for j in range(degree + 1 - i)}
    )


def suite_heisenberg_exact(seed=0):
    r = SuiteResult(1, "Heisenberg exact suite")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    zero, u_, v_, uv = (hz.scalar_field(k) for k in ("zero", "u", "v", "uv"))

    r.add("heis fiber", hz.heis_metric((0, 0, 0), (0, 0, 1), (0, 0, 1)) == 1.0)
    r.add("heis y=2", hz.heis_metric((0, 2, 0), (1, 0, 0), (1, 0, 0)) == 5.0)
    u, v = rng.normal(size=3), rng.normal(size=3)
    r.add("heis z-free", hz.heis_metric((7, 2, -3), u, v) == hz.heis_metric((7, 2, 40), u, v))
    r.add("sub e1", hz.submersion_metric((1, 0), (1, 0)) == 1.0)
    r.add("sub orth", hz.submersion_metric((1, 0), (0, 1)) == 0.0)
    r.add("sub 3,4", hz.submersion_metric((3, 4), (3, 4)) == 25.0)
    r.add("imm psi=0", hz.immersion_metric(zero, (1, 3), (1, 0), (1, 0)) == 10.0)
    # psi = u v at base (1, 0): psi_u = v = 0 = base v, psi_v = u... pick base with u = 0
    psi_b = hz.Polynomial2D({(1, 1): 1.0, (2, 0): 0.5})  # psi_u = v + u, psi_v = u
    r.add("imm bracket 0", hz.immersion_metric(psi_b, (0.0, 5.0), (1, 0), (1, 0)) == 1.0)
    r.add("imm uv", hz.immersion_metric(uv, (0, 0), (0, 1), (0, 1)) == 1.0)
    p = rng.normal(size=3)
    phi1, phi2 = _random_poly(rng), _random_poly(rng)
    r.add("gauge fiber", hz.gauge_metric(phi1, phi2, p, (0, 0, 1), (0, 0, 1)) == 0.0)
    r.add("gauge phi1=y", hz.gauge_metric(v_, zero, p, (1, 1, 0), (1, 1, 0)) == 2.0)
    r.add("gauge phi=0", hz.gauge_metric(zero, zero, (0, 1, 0), (1, 0, 0), (1, 0, 0)) == 2.0)

    # degeneracy and z-invariance on random inputs (exact)
    P = rng.normal(size=(1000, 3)) * 5
    V = rng.normal(size=(1000, 3))
    xi = np.broadcast_to([0.0, 0.0, 1.0], P.shape)
    r.add("degeneracy exact", np.all(hz.gauge_metric(phi1, phi2, P, xi, V) == 0.0))
    shift = P + np.array([0.0, 0.0, 1.0]) * rng.normal(size=(1000, 1)) * 100
    W = rng.normal(size=(1000, 3))
    r.add(
        "z-invariance exact",
        np.array_equal(hz.heis_metric(P, V, W), hz.heis_metric(shift, V, W)),
    )

    seg = hz.HPath.from_points(np.column_stack([np.linspace(0, 1, 17), np.zeros(17), np.zeros(17)]))
    const = hz.HPath.from_points(np.ones((9, 3)))
    r.add("length const", hz.hpath_length(const, hz.HeisenbergMetric()) == 0.0)
    r.add("length seg heis", abs(hz.hpath_length(seg, hz.HeisenbergMetric()) - 1) <= 4 * EPS)
    r.add("length seg gauge", abs(hz.hpath_length(seg, hz.GaugeMetric(zero, zero)) - 1) <= 4 * EPS)

    K = 64
    tt = np.linspace(0, 1, K + 1)
    gpath = hz.HPath(tt, np.column_stack([tt, 0 * tt, 0 * tt]))
    acted = hz.gauge_act(hz.GaugeFunction(tt**2), gpath)
    r.add("act t^2", np.array_equal(acted.points[:, 2], tt**2))
    r.add(
        "act t^2 length",
        abs(hz.hpath_length(acted, hz.GaugeMetric(zero, zero)) - 1) <= 10 * EPS * K,
    )
    const_g = hz.gauge_act(hz.GaugeFunction(np.full(K + 1, 2.5)), gpath)
    r.add(
        "act const heis length",
        hz.hpath_length(const_g, hz.HeisenbergMetric()) == hz.hpath_length(gpath, hz.HeisenbergMetric()),
    )
    r.add("act identity", np.array_equal(hz.gauge_act(hz.GaugeFunction(np.zeros(K + 1)), gpath).points, gpath.points))

    worst = 0.0
    for _ in range(100):
        K = int(rng.integers(2, 200))
        path = hz.HPath.from_points(np.cumsum(rng.normal(size=(K + 1, 3)), axis=0))
        g = hz.GaugeFunction(rng.normal(size=K + 1) * 10)
        metric = hz.GaugeMetric(_random_poly(rng), _random_poly(rng))
        a = hz.hpath_length(path, metric)
        b = hz.hpath_length(hz.gauge_act(g, path), metric)
        worst = max(worst, abs(a - b) / (10 * EPS * K * max(a, 1.0)))
    r.add("gauge-act invariance 100x", worst <= 1.0, f"worst/(10 eps K)={worst:.3g}")

    base = np.column_stack([np.linspace(0, 1, 11), np.ones(11)])
    r.add("lift y=1", abs(hz.horizontal_lift(base).points[-1, 2] - 1.0) <= 4 * EPS)
    flat = np.column_stack([np.linspace(0, 3, 11), np.zeros(11)])
    r.add("lift y=0", np.all(hz.horizontal_lift(flat, 0.7).points[:, 2] == 0.7))

    rec = hz.normal_to_submersion(zero, zero, 2.0)
    r.add("recon vertical c=2", rec((0, 0, 0), (0, 0, 1), (0, 0, 1)) == 2.0)
    rec1 = hz.normal_to_submersion(phi1, phi2, 1.0)
    n1 = (1.0, 0.0, float(phi1(p[0], p[1])))
    r.add("recon n1 perp xi", abs(rec1(p, n1, (0, 0, 1))) <= 4 * EPS * (1 + abs(n1[2])))
    n2 = (0.0, 1.0, float(phi2(p[0], p[1])))
    r.add(
        "recon equals gauge on Nor",
        abs(rec1(p, n1, n2) - hz.gauge_metric(phi1, phi2, p, n1, n2)) <= 16 * EPS * (1 + np.dot(n1, n1) + np.dot(n2, n2)),
    )
    r.seconds = time.perf_counter() - t0
    r.add("runtime < 1 s", r.seconds < 1.0, f"{r.seconds:.3f}s")
    return r


def suite_method_agreement(seed=1):
    r = SuiteResult(2, "Method agreement (Heisenberg)")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    phi1, phi2 = hz.scalar_field("v"), hz.scalar_field("zero")
    P = rng.normal(size=(1000, 3)) * 3
    U = rng.normal(size=(1000, 3))
    V = rng.normal(size=(1000, 3))
    g = hz.gauge_metric(phi1, phi2, P, U, V)
    s = hz.submersion_metric(hz.project_tangent(U), hz.project_tangent(V))
    r.add("gauge(y, 0) == submersion, 1000 inputs", np.array_equal(g, s))
    rec = hz.normal_to_submersion(phi1, phi2, 1.0)
    diff = np.abs(rec(P, U, V) - hz.heis_metric(P, U, V))
    scale = np.maximum(np.abs(hz.heis_metric(P, U, V)), 1.0)
    r.add(
        "reconstruction == heisenberg within 4 eps",
        np.all(diff <= 4 * EPS * scale),
        f"max diff {diff.max():.3g}",
    )
    # immersion dominates submersion, equality iff the bracket vanishes
    psi = _random_poly(rng)
    B = rng.normal(size=(1000, 2))
    A2 = rng.normal(size=(1000, 2))
    imm = hz.immersion_metric(psi, B, A2, A2)
    sub = hz.submersion_metric(A2, A2)
    r.add("immersion >= submersion", np.all(imm >= sub))
    r.seconds = time.perf_counter() - t0
    return r


def suite_holonomy():
    r = SuiteResult(3, "Holonomy / non-integrability")
    t0 = time.perf_counter()
    errs = []
    for K in (64, 128, 256, 512):
        dz, area = hz.holonomy(hz.circle_loop(K))
        errs.append(abs(dz + np.pi))
        r.add(f"dz = -shoelace area (K={K})", abs(dz + area) <= 1e-13)
    r.add("|dz + pi| <= 1e-4 at K=512", errs[-1] <= 1e-4, f"{errs[-1]:.3g}")
    orders = observed_orders(errs)
    r.add("order ~2 over K=64..512", np.all(orders >= 1.95), np.array2string(orders, precision=4))
    dz_cw, _ = hz.holonomy(hz.circle_loop(512, clockwise=True))
    r.add("clockwise flips sign", abs(dz_cw - np.pi) <= 1e-4)
    r.seconds = time.perf_counter() - t0
    r.add("runtime < 1 s", r.seconds < 1.0, f"{r.seconds:.3f}s")
    return r


# ---------------------------------------------------------------------------
# 4-6: elastic metric and projections
# ---------------------------------------------------------------------------


def suite_elastic_analytic(a=2.0, b=0.5):
    r = SuiteResult(4, "Elastic metric analytic values")
    t0 = time.perf_counter()
    p = ElasticParams(a, b)
    en, et = [], []
    for N in (64, 128, 256, 512):
        F = circle(N)
        fr = compute_frame(F)
        n = TangentField(F, fr.normal)
        t = TangentField(F, fr.tangent)
        rn = abs(elastic_inner(F, n, n, p) / (2 * np.pi * a) - 1)
        rt = abs(elastic_inner(F, t, t, p) / (2 * np.pi * b) - 1)
        en.append(rn)
        et.append(rt)
        if N == 256:
            r.add("g(n,n) = 2 pi a at N=256", rn <= 1e-3, f"rel {rn:.3g}")
            r.add("g(t,t) = 2 pi b at N=256", rt <= 1e-3, f"rel {rt:.3g}")
    for name, e in (("g(n,n)", en), ("g(t,t)", et)):
        o = observed_orders(e)
        r.add(f"{name} order >= 2", np.all(o >= 1.95), np.array2string(o, precision=4))
    r.seconds = time.perf_counter() - t0
    return r


def _smooth_field(theta, rng):
    c = rng.normal(size=(4, 2))
    return np.column_stack(
        [
            c[0, 0] * np.cos(theta) + c[1, 0] * np.sin(2 * theta) + 0.5 * c[2, 0] * np.cos(3 * theta),
            c[0, 1] * np.sin(theta) + c[1, 1] * np.cos(2 * theta) + 0.5 * c[3, 1] * np.sin(3 * theta),
        ]
    )


def suite_reparam_invariance(seed=4, trials=20):
    r = SuiteResult(5, "Reparameterization invariance")
    t0 = time.perf_counter()
    p = ElasticParams(1.0, 2.0)
    Ns = (128, 256, 512)
    for shape in ("circle", "ellipse"):
        rng = np.random.default_rng(seed)
        worst = np.zeros(len(Ns))
        for _ in range(trials):
            state = rng.bit_generator.state
            for j, N in enumerate(Ns):
                rng.bit_generator.state = state  # same continuum problem at every N
                F = circle(N) if shape == "circle" else ellipse(N, 2.0, 1.0)
                th = 2 * np.pi * np.arange(N) / N
                h1 = _smooth_field(th, rng)
                h2 = _smooth_field(th, rng)
                gam = random_diffeo(N, True, rng, amplitude=0.5)
                G = F.with_points(resample_values(F.points, True, gam))
                k1 = TangentField(G, resample_values(h1, True, gam))
                k2 = TangentField(G, resample_values(h2, True, gam))
                ref = elastic_inner(F, TangentField(F, h1), TangentField(F, h2), p)
                scale = np.sqrt(
                    elastic_inner(F, TangentField(F, h1), TangentField(F, h1), p)
                    * elastic_inner(F, TangentField(F, h2), TangentField(F, h2), p)
                )
                drift = abs(elastic_inner(G, k1, k2, p) - ref) / scale
                worst[j] = max(worst[j], drift)
        r.add(f"{shape}: drift <= 5e-2 at N=128", worst[0] <= 5e-2, f"{worst[0]:.3g}")
        o = observed_orders(worst)
        r.add(f"{shape}: order >= 1", np.all(o >= 1.0), np.array2string(o, precision=3))
    r.seconds = time.perf_counter() - t0
    return r


def suite_horizontal_orthogonality(seed=6, trials=100):
    r = SuiteResult(6, "Horizontal projection orthogonality")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    N = 256
    for shape in ("circle", "ellipse"):
        F = circle(N) if shape == "circle" else ellipse(N, 2.0, 1.0)
        for a, b in ((1.0, 1.0), (1.0, 10.0), (10.0, 1.0)):
            p = ElasticParams(a, b)
            worst_o, worst_r = 0.0, 0.0
            for _ in range(trials):
                h = TangentField(F, rng.normal(size=(N, 2)))
                m, w = horizontal_project(F, h, p)
                mt = vertical_field(F, rng.normal(size=N))
                num = abs(elastic_inner(F, w, mt, p))
                den = np.sqrt(elastic_inner(F, w, w, p) * elastic_inner(F, mt, mt, p))
                worst_o = max(worst_o, num / den)
                rec = vertical_field(F, m).vectors + w.vectors
                worst_r = max(worst_r, np.linalg.norm(rec - h.vectors) / np.linalg.norm(h.vectors))
            r.add(f"{shape} a={a:g} b={b:g} orthogonality", worst_o <= 1e-6, f"{worst_o:.3g}")
            r.add(f"{shape} a={a:g} b={b:g} reconstruction", worst_r <= 1e-8, f"{worst_r:.3g}")
    r.seconds = time.perf_counter() - t0
    r.add("runtime < 5 s", r.seconds < 5.0, f"{r.seconds:.2f}s")
    return r


# ---------------------------------------------------------------------------
# 7: gauge invariance of path length
# ---------------------------------------------------------------------------


def bumpy_path(N, K, phase):
    """Smooth path of closed curves used for the gauge-invariance experiments."""
    t = np.linspace(0.0, 1.0, K + 1)[:, None]
    s = 2 * np.pi * np.arange(N)[None, :] / N
    r = 1 + 0.2 * t * np.cos(2 * s + phase[0]) + 0.1 * np.sin(np.pi * t) * np.sin(3 * s + phase[1])
    X = np.stack([r * np.cos(s) * (1 + 0.5 * t), r * np.sin(s)], axis=-1)
    return CurvePath(X, True)


GAUGE_AMPLITUDE = 0.1
GAUGE_DRIFT = 0.03


def suite_gauge_invariance(seed=2024, trials=50):
    r = SuiteResult(7, "Gauge invariance of path length")
    t0 = time.perf_counter()
    p = ElasticParams(1.0, 1.0)
    gauge, amb = MetricChoice("gauge", p), MetricChoice("ambient", p)
    levels = ((64, 8), (128, 16), (256, 32))
    worst, counts = [], []
    for N, K in levels:
        rng = np.random.default_rng(seed)
        drifts, changes = [], []
        for _ in range(trials):
            path = bumpy_path(N, K, rng.uniform(0, 2 * np.pi, 2))
            g = random_path_gauge(K, N, True, rng, amplitude=GAUGE_AMPLITUDE, drift=GAUGE_DRIFT)
            acted = gauge_act_path(g, path)
            L0 = path_length(path, gauge)
            drifts.append(abs(path_length(acted, gauge) - L0) / L0)
            A0 = path_length(path, amb)
            changes.append(abs(path_length(acted, amb) - A0) / A0)
        drifts, changes = np.array(drifts), np.array(changes)
        worst.append(drifts.max())
        counts.append(int(np.sum(changes > 10 * drifts)))
    h = np.array([1 / N + 1 / K for N, K in levels])
    C = float(np.max(np.array(worst) / h))
    o = observed_orders(worst)
    r.add(
        "drift <= C (1/N + 1/K)",
        C <= 1.0,
        "fitted C=%.3f, drifts %s" % (C, ", ".join(f"{w:.3g}" for w in worst)),
    )
    r.add("drift converges (order >= 0.75 per doubling)", np.all(o >= 0.75), np.array2string(o, precision=3))
    r.add(
        "ambient change > 10x gauge drift on >= 45/50 (N=256, K=32)",
        counts[-1] >= 45,
        "counts per level " + ", ".join(map(str, counts)),
    )
    r.seconds = time.perf_counter() - t0
    return r


# ---------------------------------------------------------------------------
# 8: optimizer
# ---------------------------------------------------------------------------


def fd_gradient(X, choice, closed, h=1e-6):
    fd = np.zeros_like(X)
    for idx in np.ndindex(*X.shape):
        Xp = X.copy()
        Xp[idx] += h
        Xm = X.copy()
        Xm[idx] -= h
        fd[idx] = (energy_and_gradient(Xp, choice, closed)[0] - energy_and_gradient(Xm, choice, closed)[0]) / (2 * h)
    return fd


def random_small_path(rng, N=32, K=5, closed=True):
    if closed:
        base = ellipse(N, 1.5, 1.0, angle=rng.uniform(0, np.pi)).points
    else:
        x = np.linspace(0.0, 2.0, N)
        base = np.column_stack([x, 0.3 * np.sin(3 * x + rng.uniform(0, np.pi))])
    X = np.stack(
        [base * (1 + 0.4 * k / K) + rng.normal(scale=0.02, size=(N, 2)) for k in range(K + 1)]
    )
    return X


def suite_optimizer(seed=8):
    r = SuiteResult(8, "Optimizer")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    params = ElasticParams(1.0, 2.0)
    for variant in VARIANTS:
        choice = MetricChoice(variant, params)
        worst = 0.0
        for closed in (True, False):
            X = random_small_path(rng, closed=closed)
            _, G = energy_and_gradient(X, choice, closed)
            fd = fd_gradient(X, choice, closed)
            worst = max(worst, np.linalg.norm(G - fd) / np.linalg.norm(fd))
        r.add(f"gradient vs FD ({variant})", worst <= 1e-5, f"rel {worst:.3g}")

    N, K = 128, 16
    path = init_path(circle(N), ellipse(N, 2.0, 1.0), K)
    cfg = OptimizerConfig(max_iters=500)
    tb = time.perf_counter()
    finals = {}
    for variant in VARIANTS:
        out, tr = straighten(path, MetricChoice(variant, ElasticParams()), cfg)
        e = np.array(tr.energy)
        mono = bool(np.all(np.diff(e) <= 0))
        ends = np.array_equal(out.slices[0], path.slices[0]) and np.array_equal(out.slices[-1], path.slices[-1])
        r.add(
            f"benchmark monotone ({variant})",
            mono and ends and len(e) <= 501,
            f"{e[0]:.6g} -> {e[-1]:.6g} in {len(e) - 1} iters",
        )
        finals[variant] = e[-1]
    bench = time.perf_counter() - tb
    r.add("benchmark < 60 s", bench < 60.0, f"{bench:.1f}s")
    _, tr1 = straighten(path, MetricChoice("gauge", ElasticParams()), OptimizerConfig(max_iters=500, reparam_every=1))
    rel = abs(tr1.final_energy - finals["gauge"]) / finals["gauge"]
    r.add("reparam_every=1 vs 0 within 1e-2 (gauge)", rel <= 1e-2, f"rel {rel:.3g}")
    r.seconds = time.perf_counter() - t0
    return r


# ---------------------------------------------------------------------------
# 9: normalizations
# ---------------------------------------------------------------------------


def blob(N=96):
    th = 2 * np.pi * np.arange(N) / N
    rad = 1 + 0.3 * np.cos(2 * th) + 0.15 * np.sin(3 * th)
    pts = np.column_stack([1.6 * rad * np.cos(th) + 0.4, rad * np.sin(th) - 0.2])
    return SampledCurve(pts, True)


def _rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def suite_normalizations(seed=9, trials=100):
    r = SuiteResult(9, "Normalization sections")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    F = blob()
    groups = {
        "center_centroid": (center_centroid, "translation"),
        "start_to_origin": (start_to_origin, "translation"),
        "align_ellipse": (align_ellipse, "rotation"),
        "align_start_tangent": (align_start_tangent, "rotation"),
        "scale_length": (scale_length, "scaling"),
        "scale_area": (scale_area, "scaling"),
    }
    for name, (op, group) in groups.items():
        out = op(F)
        scale = np.abs(out.points).max()
        idem = np.abs(op(out).points - out.points).max() / scale
        r.add(f"{name} idempotent", idem <= 1e-9, f"{idem:.3g}")
        worst = 0.0
        for _ in range(trials):
            if group == "translation":
                G = F.with_points(F.points + rng.uniform(-10, 10, 2))
            elif group == "rotation":
                G = F.with_points(F.points @ _rot(rng.uniform(0, 2 * np.pi)).T)
            else:
                G = F.with_points(F.points * np.exp(rng.uniform(np.log(0.1), np.log(10))))
            worst = max(worst, np.abs(op(G).points - out.points).max() / scale)
        r.add(f"{name} orbit-constant", worst <= 1e-9, f"{worst:.3g}")
    for N in (64, 128, 256):
        out = scale_area(circle(N, radius=2.0))
        rel = np.abs(np.linalg.norm(out.points, axis=1) * np.sqrt(np.pi) - 1).max()
        r.add(f"scale_area radius 1/sqrt(pi) at N={N}", rel <= 4.0 / N**2, f"rel {rel:.3g}")
    r.seconds = time.perf_counter() - t0
    return r


SUITES = {
    1: suite_heisenberg_exact,
    2: suite_method_agreement,
    3: suite_holonomy,
    4: suite_elastic_analytic,
    5: suite_reparam_invariance,
    6: suite_horizontal_orthogonality,
    7: suite_gauge_invariance,
    8: suite_optimizer,
    9: suite_normalizations,
}


def run_suites(numbers=None, echo=None):
    numbers = sorted(SUITES) if numbers is None else list(numbers)
    results = []
    for k in numbers:
        t0 = time.perf_counter()
        res = SUITES[k]()
        res.seconds = max(res.seconds, time.perf_counter() - t0)
        results.append(res)
        if echo is not None:
            echo(res.line())
            for c in res.checks:
                echo(f"    {'ok  ' if c.passed else 'FAIL'} {c.name}" + (f"  [{c.detail}]" if c.detail else ""))
    return results
