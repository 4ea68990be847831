"""Pinball loss, model objectives and the PIHT subgradient.

Measurement vectors are stored column-wise: ``U`` has shape ``(n, m)`` and
column ``i`` is ``u_i``.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "PinballParams",
    "ProblemData",
    "pinball_value",
    "pinball_loss",
    "piht_objective",
    "piht_subgradient",
    "epsvm_primal_objective",
    "epsvm_dual_objective",
]


@dataclass(frozen=True)
class PinballParams:
    """Slope ``tau`` of the negative branch and margin bias ``c``.

    ``tau = 0`` is the hinge (one-sided l1) loss and ``tau = -1`` the
    linear loss.
    """

    tau: float = -0.5
    c: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.tau) or not -1.0 <= self.tau <= 0.0:
            raise ValueError(f"tau must lie in [-1, 0], got {self.tau}")
        if not np.isfinite(self.c) or self.c < 0:
            raise ValueError(f"c must be a finite nonnegative number, got {self.c}")


@dataclass
class ProblemData:
    """Sign measurements ``y`` of ``U.T @ x``."""

    U: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.U = np.ascontiguousarray(self.U, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64).ravel()
        if self.U.ndim != 2 or 0 in self.U.shape:
            raise ValueError(f"U must be a nonempty 2-D array, got shape {self.U.shape}")
        if self.y.shape[0] != self.U.shape[1]:
            raise ValueError(
                f"y has {self.y.shape[0]} entries but U has {self.U.shape[1]} columns")
        if not np.all(np.abs(self.y) == 1.0):
            raise ValueError("every measurement must be +1 or -1")
        if not np.all(np.isfinite(self.U)):
            raise ValueError("U contains non-finite entries")
        if np.any(self.col_norms_sq == 0.0):
            raise ValueError("U has an all-zero column")

    @property
    def n(self):
        return self.U.shape[0]

    @property
    def m(self):
        return self.U.shape[1]

    @cached_property
    def col_norms_sq(self):
        return np.einsum("ij,ij->j", self.U, self.U)

    def margins(self, x):
        """Return ``y_i * u_i^T x`` for every measurement."""
        x = _check_vector(x, self.n)
        return self.y * (self.U.T @ x)


def _check_vector(x, n, name="x"):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (n,):
        raise ValueError(f"{name} must have shape ({n},), got {x.shape}")
    return x


def pinball_value(t, params):
    """Evaluate ``L_tau(t)``: ``t`` for ``t >= 0`` and ``-tau * t`` otherwise."""
    if t >= 0:
        return float(t)
    return float(-params.tau * t)


def pinball_loss(t, tau):
    """Vectorised pinball loss."""
    t = np.asarray(t, dtype=np.float64)
    return np.where(t >= 0, t, -tau * t)


def piht_objective(x, data, params):
    """Average pinball loss ``(1/m) sum_i L_tau(c - y_i u_i^T x)``."""
    z = data.margins(x)
    return float(np.mean(pinball_loss(params.c - z, params.tau)))


def piht_subgradient(x, data, params):
    """Return ``U @ g`` with ``g_i = -y_i`` if ``y_i u_i^T x <= c`` else ``tau * y_i``.

    This is a subgradient of the *summed* loss, i.e. ``m`` times
    :func:`piht_objective`.
    """
    z = data.margins(x)
    g = np.where(z <= params.c, -data.y, params.tau * data.y)
    return data.U @ g


def epsvm_primal_objective(x, data, params, mu):
    """``mu * ||x||_1`` plus the average pinball loss.

    The unit-ball constraint is not checked here.
    """
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    x = _check_vector(x, data.n)
    return float(mu * np.abs(x).sum()) + piht_objective(x, data, params)


def epsvm_dual_objective(state, data, params, mu=None, atol=1e-12):
    """Dual value ``c * sum(xi) - ||sum_i xi_i y_i u_i - beta||_2``.

    ``state`` is a :class:`bitpin.epsvm.DualState`; its cached ``s`` and
    ``w`` are ignored so the value is computed from ``(beta, xi)`` alone.
    Feasibility of ``xi`` (and of ``beta`` when ``mu`` is given) is checked
    with absolute slack ``atol / m``.
    """
    xi = _check_vector(state.xi, data.m, "xi")
    beta = _check_vector(state.beta, data.n, "beta")
    m = data.m
    slack = atol / m
    if np.any(xi < -params.tau / m - slack) or np.any(xi > 1.0 / m + slack):
        raise ValueError("xi lies outside the box [-tau/m, 1/m]")
    if mu is not None and np.max(np.abs(beta), initial=0.0) > mu * (1 + atol):
        raise ValueError("beta violates ||beta||_inf <= mu")
    w = data.U @ (xi * data.y) - beta
    return float(params.c * xi.sum() - np.linalg.norm(w))
