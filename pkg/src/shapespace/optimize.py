"""Path straightening: gradient descent on the discrete path energy with
fixed endpoints and Armijo backtracking.

Gradients are taken w.r.t. raw sample coordinates, so interior slices are
free to drift off the arc-length section; ``reparam_every`` pulls them back
every few iterations.
"""

from dataclasses import dataclass, field

import logging

import numpy as np

from .curves import arclength_stations, polygon_eval
from .errors import GridMismatchError, OptimizerAbort, ShapeSpaceError, ValidationError
from .paths import CurvePath, energy_and_gradient

log = logging.getLogger(__name__)

DEGENERATE_CHORD = 1e-8


@dataclass(frozen=True)
class OptimizerConfig:
    max_iters: int = 500
    initial_step: float = 1.0
    backtrack: float = 0.5
    grad_tol: float = 1e-8
    reparam_every: int = 0
    armijo: float = 1e-4
    growth: float = 2.0
    min_step: float = 1e-20

    def __post_init__(self):
        if self.max_iters < 0:
            raise ValidationError("max_iters must be >= 0")
        if not self.initial_step > 0:
            raise ValidationError("initial_step must be > 0")
        if not 0 < self.backtrack < 1:
            raise ValidationError("backtrack factor must lie in (0, 1)")
        if not self.grad_tol > 0:
            raise ValidationError("grad_tol must be > 0")
        if self.reparam_every < 0:
            raise ValidationError("reparam_every must be >= 0")


@dataclass
class OptimizerTrace:
    energy: list = field(default_factory=list)
    gradnorm: list = field(default_factory=list)
    step: list = field(default_factory=list)
    reparam: list = field(default_factory=list)
    status: str = "running"

    def rows(self):
        return list(zip(range(len(self.energy)), self.energy, self.gradnorm, self.step))

    @property
    def final_energy(self):
        return self.energy[-1] if self.energy else float("nan")


def init_path(F0, F1, K):
    """Pointwise linear interpolation ``(1 - k/K) F0 + (k/K) F1``."""
    if not F0.same_grid(F1):
        raise GridMismatchError("endpoint curves must share N and closedness")
    if K < 2:
        raise ValidationError("K must be >= 2")
    s = (np.arange(K + 1) / K)[:, None, None]
    X = (1 - s) * F0.points[None] + s * F1.points[None]
    X[0], X[-1] = F0.points, F1.points
    return CurvePath(X, F0.closed)


def _arclength_slice(x, closed):
    return polygon_eval(x, closed, arclength_stations(x, closed))


def reparam_slices(path):
    """Move every interior slice to the arc-length section."""
    X = np.array(path.slices, copy=True)
    for k in range(1, path.K):
        X[k] = _arclength_slice(X[k], path.closed)
    return path.with_slices(X)


def _degenerate(X, closed):
    d = np.roll(X, -1, axis=1) - X if closed else X[:, 1:] - X[:, :-1]
    c = np.linalg.norm(d, axis=-1)
    if not np.all(np.isfinite(c)):
        return True
    return bool(np.any(c.min(axis=1) < DEGENERATE_CHORD * c.mean(axis=1)))


def _energy(X, choice, closed):
    if _degenerate(X, closed):
        return np.inf, None
    try:
        return energy_and_gradient(X, choice, closed)
    except ShapeSpaceError:
        return np.inf, None


def straighten(path, choice, cfg=OptimizerConfig()):
    """Shorten ``path`` by gradient descent on its discrete energy.

    Returns the final path and an :class:`OptimizerTrace`.  ``trace.status``
    is ``"converged"``, ``"max-iters"`` or ``"step-underflow"``.  Accepted
    steps never increase the energy; reparameterization events are logged
    separately in ``trace.reparam`` as ``(iteration, energy_before,
    energy_after)``.
    """
    closed = path.closed
    X = np.array(path.slices, copy=True)
    trace = OptimizerTrace()
    E, G = _energy(X, choice, closed)
    if not np.isfinite(E):
        trace.status = "aborted"
        raise OptimizerAbort("initial path has a degenerate slice or non-finite energy", trace)
    step = cfg.initial_step
    for it in range(cfg.max_iters + 1):
        G[0] = 0.0
        G[-1] = 0.0
        g2 = float(np.sum(G * G))
        gnorm = np.sqrt(g2)
        trace.energy.append(E)
        trace.gradnorm.append(gnorm)
        if gnorm < cfg.grad_tol:
            trace.step.append(0.0)
            trace.status = "converged"
            break
        if it == cfg.max_iters:
            trace.step.append(0.0)
            trace.status = "max-iters"
            break
        while True:
            Xn = X - step * G
            En, Gn = _energy(Xn, choice, closed)
            if En <= E - cfg.armijo * step * g2:
                break
            step *= cfg.backtrack
            if step < cfg.min_step:
                break
        if step < cfg.min_step:
            trace.step.append(0.0)
            trace.status = "step-underflow"
            log.warning("path straightening stopped: step size underflow at iteration %d", it)
            break
        trace.step.append(step)
        X, E, G = Xn, En, Gn
        step *= cfg.growth
        if cfg.reparam_every and (it + 1) % cfg.reparam_every == 0:
            Xr = np.array(X, copy=True)
            for k in range(1, X.shape[0] - 1):
                Xr[k] = _arclength_slice(X[k], closed)
            Er, Gr = _energy(Xr, choice, closed)
            if not np.isfinite(Er):
                trace.status = "aborted"
                raise OptimizerAbort(f"reparameterization at iteration {it} broke a slice", trace)
            trace.reparam.append((it, E, Er))
            X, E, G = Xr, Er, Gr
    X[0] = path.slices[0]
    X[-1] = path.slices[-1]
    return path.with_slices(X), trace
