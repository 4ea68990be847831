"""Pinball iterative hard thresholding.

BIHT is the special case ``tau = 0, c = 0``.
"""
from dataclasses import dataclass, field, replace

import numpy as np

from .loss import PinballParams, pinball_loss

__all__ = ["PihtConfig", "PihtResult", "hard_threshold", "piht_solve", "biht_config",
           "back_projection"]

OK = "ok"
DEGENERATE = "degenerate"


@dataclass(frozen=True)
class PihtConfig:
    """Solver settings.

    ``alpha=None`` means ``1/m``; ``x0=None`` means the normalised
    back-projection ``U y / ||U y||``.
    """

    K: int
    alpha: float | None = None
    l_max: int = 500
    params: PinballParams = field(default_factory=lambda: PinballParams(-0.2, 1.0))
    x0: np.ndarray | None = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.alpha is not None and not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.l_max < 1:
            raise ValueError(f"l_max must be >= 1, got {self.l_max}")


def biht_config(K, **kwargs):
    """PIHT settings reducing to BIHT."""
    return PihtConfig(K=K, params=PinballParams(tau=0.0, c=0.0), **kwargs)


@dataclass
class PihtResult:
    x: np.ndarray
    objective_trace: np.ndarray
    iterations: int
    status: str = OK
    flips: np.ndarray | None = None


def hard_threshold(a, K):
    """Best K-term approximation of ``a``.

    Keeps the ``K`` largest magnitudes; equal magnitudes go to the lower index.
    """
    a = np.asarray(a, dtype=np.float64)
    if not 1 <= K <= a.shape[0]:
        raise ValueError(f"need 1 <= K <= {a.shape[0]}, got {K}")
    keep = np.argsort(-np.abs(a), kind="stable")[:K]
    out = np.zeros_like(a)
    out[keep] = a[keep]
    return out


def back_projection(data, y=None):
    y = data.y if y is None else y
    v = data.U @ y
    nrm = np.linalg.norm(v)
    return v / nrm if nrm > 0 else v


def _initial_point(data, config):
    if config.x0 is None:
        return back_projection(data)
    x0 = np.array(config.x0, dtype=np.float64)
    if x0.shape != (data.n,):
        raise ValueError(f"x0 must have shape ({data.n},), got {x0.shape}")
    return x0


def _iterate(U, y, x, K, alpha, params, steps, trace, z=None):
    # z caches y * (U.T @ x) for the incoming x
    for _ in range(steps):
        if z is None:
            z = y * (U.T @ x)
        trace.append(float(np.mean(pinball_loss(params.c - z, params.tau))))
        g = np.where(z <= params.c, -y, params.tau * y)
        x = hard_threshold(x - alpha * (U @ g), K)
        z = None
    return x


def _finish(x, trace, iterations, **extra):
    nrm = np.linalg.norm(x)
    if nrm == 0.0:
        return PihtResult(x=x, objective_trace=np.asarray(trace), iterations=iterations,
                          status=DEGENERATE, **extra)
    return PihtResult(x=x / nrm, objective_trace=np.asarray(trace), iterations=iterations,
                      **extra)


def piht_solve(data, config):
    """Run exactly ``config.l_max`` PIHT iterations and normalise the result.

    ``objective_trace[l]`` is the averaged pinball objective at the iterate
    entering step ``l``.  An all-zero final iterate is returned as is with
    status ``"degenerate"``.
    """
    if config.K > data.n:
        raise ValueError(f"K={config.K} exceeds the signal dimension {data.n}")
    alpha = 1.0 / data.m if config.alpha is None else config.alpha
    trace = []
    x = _iterate(data.U, data.y, _initial_point(data, config), config.K, alpha,
                 config.params, config.l_max, trace)
    return _finish(x, trace, config.l_max)


def with_tau(config, tau):
    return replace(config, params=replace(config.params, tau=tau))
