"""Elastic-net pin-SVM solved by dual coordinate ascent.

Primal::

    min_x  mu ||x||_1 + (1/m) sum_i L_tau(c - y_i u_i^T x)   s.t. ||x||_2 <= 1

Dual::

    max  c sum_i xi_i - || sum_i xi_i y_i u_i - beta ||_2
    s.t. ||beta||_inf <= mu,  -tau/m <= xi_i <= 1/m
"""
import math
import warnings
from dataclasses import dataclass, field

import numba
import numpy as np

from .loss import PinballParams, epsvm_primal_objective

__all__ = [
    "EpsvmConfig",
    "DualState",
    "EpsvmResult",
    "default_mu",
    "beta_update",
    "xi_step",
    "epsvm_solve",
    "passive_closed_form",
    "check_optimality",
    "hypercube_separation",
]

ON_SPHERE = "on_sphere"
ZERO_OPTIMAL = "zero_optimal"
DEGENERATE = "degenerate"

# (tau, C) pairs for mu = C sqrt(log n / m)
MU_TABLE = ((-1.0, 1.0), (-0.9, 0.9), (-0.7, 0.8), (-0.5, 0.7), (-0.4, 0.6))


def mu_coefficient(tau):
    """Coefficient C for a given tau, linearly interpolated and clamped at the ends."""
    taus, cs = zip(*MU_TABLE)
    return float(np.interp(tau, taus, cs))


def default_mu(tau, n, m, C=None):
    if C is None:
        C = mu_coefficient(tau)
    return C * math.sqrt(math.log(n) / m)


@dataclass(frozen=True)
class EpsvmConfig:
    """Solver settings.

    ``delta=None`` resolves to ``(1 + tau) / (10 m)``.  The sweep stops
    when the largest change of ``xi`` over a sweep is below ``delta`` (or
    exactly zero).  ``shuffle`` visits coordinates in a fresh random order
    each sweep, drawn from ``seed``.
    """

    params: PinballParams = field(default_factory=PinballParams)
    mu: float = 0.1
    l_max: int = 100
    delta: float | None = None
    shuffle: bool = False
    seed: int | None = None
    refresh: int = 10
    trace: bool = False

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.l_max < 1:
            raise ValueError(f"l_max must be >= 1, got {self.l_max}")
        if self.delta is not None and self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if self.delta == 0 and self.params.tau > -1:
            raise ValueError("delta must be positive when tau > -1")
        if self.refresh < 1:
            raise ValueError("refresh must be >= 1")

    def resolved_delta(self, m):
        if self.delta is None:
            return (1.0 + self.params.tau) / (10.0 * m)
        return self.delta


@dataclass
class DualState:
    """Dual iterate with cached ``s = sum_i xi_i y_i u_i`` and ``w = s - beta``."""

    beta: np.ndarray
    xi: np.ndarray
    s: np.ndarray
    w: np.ndarray

    @classmethod
    def from_dual(cls, beta, xi, data):
        beta = np.array(beta, dtype=np.float64)
        xi = np.array(xi, dtype=np.float64)
        s = data.U @ (xi * data.y)
        return cls(beta=beta, xi=xi, s=s, w=s - beta)

    @classmethod
    def initial(cls, data, params):
        xi = np.full(data.m, -params.tau / data.m)
        return cls.from_dual(np.zeros(data.n), xi, data)


@dataclass
class EpsvmResult:
    x: np.ndarray
    status: str
    dual_objective: float
    primal_objective: float
    kkt_residual: float
    sweeps: int
    converged: bool = True
    xi: np.ndarray | None = None
    beta: np.ndarray | None = None
    dual_trace: np.ndarray | None = None


def beta_update(s, mu):
    """Componentwise clamp of ``s`` to ``[-mu, mu]``."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    return np.clip(np.asarray(s, dtype=np.float64), -mu, mu)


@numba.njit(cache=True)
def _xi_increment(xi_i, unorm2, uw, ww, y_i, tau, c, m):
    # maximiser of  c*d - sqrt(unorm2 d^2 + 2 y_i uw d + ww)  over the box
    lo = -tau / m - xi_i
    hi = 1.0 / m - xi_i
    c2 = c * c
    if unorm2 <= c2:
        return hi
    gap = unorm2 - c2
    a = unorm2 * gap
    b = 2.0 * gap * y_i * uw
    cc = uw * uw - c2 * ww
    # B^2 - 4AC written in factored form, >= 0 by Cauchy-Schwarz
    disc = 4.0 * c2 * gap * (unorm2 * ww - uw * uw)
    if disc < 0.0:
        disc = 0.0
    root = math.sqrt(disc)
    if b <= 0.0:
        d = (-b + root) / (2.0 * a)
    else:
        d = 2.0 * cc / (-b - root)
    if d < lo:
        d = lo
    if d > hi:
        d = hi
    return d


def xi_step(xi_i, u_i, y_i, w, params, m):
    """Optimal increment ``d`` of ``xi_i`` given the current ``w = s - beta``."""
    u_i = np.asarray(u_i, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    tau = params.tau
    slack = 1e-12 / m
    if not (-tau / m - slack <= xi_i <= 1.0 / m + slack):
        raise ValueError(f"xi_i={xi_i} lies outside [{-tau / m}, {1.0 / m}]")
    return float(_xi_increment(float(xi_i), float(u_i @ u_i), float(u_i @ w),
                               float(w @ w), float(y_i), tau, params.c, m))


@numba.njit(cache=True)
def _ascent(U, y, unorm2, tau, c, mu, xi, beta, s, l_max, delta, orders, refresh,
            trace):
    n, m = U.shape
    w = s - beta
    ww = 0.0
    for j in range(n):
        ww += w[j] * w[j]
    xsum = 0.0
    for i in range(m):
        xsum += xi[i]
    n_trace = l_max * (m + 1) + 1 if trace else 0
    dual = np.empty(n_trace)
    k = 0
    if trace:
        dual[0] = c * xsum - math.sqrt(ww)
        k = 1
    sweeps = 0
    change = 0.0
    converged = False
    for sweep in range(l_max):
        order = orders[sweep % orders.shape[0]]
        change = 0.0
        for t in range(m):
            i = order[t]
            uw = 0.0
            for j in range(n):
                uw += U[j, i] * w[j]
            d = _xi_increment(xi[i], unorm2[i], uw, ww, y[i], tau, c, m)
            if d != 0.0:
                yd = y[i] * d
                ww = 0.0
                for j in range(n):
                    inc = yd * U[j, i]
                    s[j] += inc
                    w[j] += inc
                    ww += w[j] * w[j]
                xi[i] += d
                xsum += d
                if abs(d) > change:
                    change = abs(d)
            if trace:
                dual[k] = c * xsum - math.sqrt(ww)
                k += 1
        sweeps += 1
        if sweeps % refresh == 0:
            for j in range(n):
                acc = 0.0
                for i in range(m):
                    acc += U[j, i] * (xi[i] * y[i])
                s[j] = acc
        ww = 0.0
        for j in range(n):
            b = s[j]
            if b > mu:
                b = mu
            elif b < -mu:
                b = -mu
            beta[j] = b
            w[j] = s[j] - b
            ww += w[j] * w[j]
        if trace:
            dual[k] = c * xsum - math.sqrt(ww)
            k += 1
        if change < delta or change == 0.0:
            converged = True
            break
    return sweeps, converged, dual[:k]


def _recover(state, data, params, mu):
    """Primal point and status from a dual iterate."""
    w = state.w
    nrm = np.linalg.norm(w)
    if nrm > 0:
        return w / nrm, ON_SPHERE
    x = np.zeros(data.n)
    if params.c == 0.0 or np.all(state.xi == 1.0 / data.m):
        return x, ZERO_OPTIMAL
    return x, DEGENERATE


def _finish(state, data, config, sweeps, converged, dual_trace=None):
    params, mu = config.params, config.mu
    x, status = _recover(state, data, params, mu)
    if status == DEGENERATE:
        warnings.warn("dual solution has w = 0 with mixed xi; x = 0 returned. "
                      "A smaller mu usually moves the solution onto the sphere.",
                      RuntimeWarning, stacklevel=3)
    dual = float(params.c * state.xi.sum() - np.linalg.norm(state.w))
    return EpsvmResult(
        x=x,
        status=status,
        dual_objective=dual,
        primal_objective=epsvm_primal_objective(x, data, params, mu),
        kkt_residual=check_optimality(x, state.xi, data, config),
        sweeps=sweeps,
        converged=converged,
        xi=state.xi,
        beta=state.beta,
        dual_trace=dual_trace,
    )


def epsvm_solve(data, config):
    """Dual coordinate ascent for the elastic-net pin-SVM.

    Starts from ``beta = 0, xi = -tau/m``, sweeps the ``xi`` coordinates in
    order (each with its closed-form maximiser), then resets ``beta`` to the
    clamp of ``s`` and refreshes ``w``.  With ``config.trace`` the dual value
    after every single update is returned in ``dual_trace``.
    """
    params = config.params
    m = data.m
    if data.m > 0 and params.c > 0 and params.c >= np.median(np.sqrt(data.col_norms_sq)):
        warnings.warn("c is at least the median measurement norm; most dual "
                      "coordinates sit at 1/m and the model is close to the "
                      "passive one", RuntimeWarning, stacklevel=2)
    state = DualState.initial(data, params)
    if config.shuffle:
        rng = np.random.default_rng(config.seed)
        orders = np.array([rng.permutation(m) for _ in range(config.l_max)])
    else:
        orders = np.arange(m)[None, :]
    sweeps, converged, dual = _ascent(
        data.U, data.y, data.col_norms_sq, params.tau, params.c, config.mu,
        state.xi, state.beta, state.s, config.l_max, config.resolved_delta(m),
        orders, config.refresh, config.trace)
    state.w = state.s - state.beta
    return _finish(state, data, config, sweeps, converged,
                   dual if config.trace else None)


def passive_closed_form(data, mu):
    """Closed-form solution at ``tau = -1``: normalised soft-threshold of the back-projection."""
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    params = PinballParams(tau=-1.0, c=1.0)
    state = DualState.initial(data, params)
    state.beta = beta_update(state.s, mu)
    state.w = state.s - state.beta
    config = EpsvmConfig(params=params, mu=mu, l_max=1, delta=0.0)
    return _finish(state, data, config, sweeps=1, converged=True)


def check_optimality(x, xi, data, config, sphere_tol=1e-9):
    """Largest violation of the first-order optimality conditions.

    With ``r_i = c - y_i u_i^T x`` and ``s = sum_i xi_i y_i u_i`` the
    conditions are: ``xi`` in its box; ``xi_i = 1/m`` needs ``r_i >= 0``,
    ``xi_i = -tau/m`` needs ``r_i <= 0`` and any other value needs
    ``r_i = 0``; finally ``s - lam x`` must be a subgradient of
    ``mu ||.||_1`` at ``x`` with ``lam = s^T x - mu ||x||_1 >= 0`` on the
    sphere and ``lam = 0`` inside the ball.  Multiplier terms are scaled by
    ``m``.  Returns 0 exactly when all conditions hold.
    """
    x = np.asarray(x, dtype=np.float64)
    xi = np.asarray(xi, dtype=np.float64)
    if x.shape != (data.n,) or xi.shape != (data.m,):
        raise ValueError(f"expected x of shape ({data.n},) and xi of shape ({data.m},)")
    nrm = np.linalg.norm(x)
    if nrm > 1 + sphere_tol:
        raise ValueError(f"||x||_2 = {nrm} exceeds the unit ball")
    tau, c, mu, m = config.params.tau, config.params.c, config.mu, data.m
    upper, lower = 1.0 / m, -tau / m

    box = m * np.maximum(0.0, np.maximum(lower - xi, xi - upper))
    r = c - data.margins(x)
    comp = np.minimum.reduce([
        m * np.abs(xi - upper) + np.maximum(0.0, -r),
        m * np.abs(xi - lower) + np.maximum(0.0, r),
        np.abs(r),
    ])

    s = data.U @ (xi * data.y)
    lam = 0.0
    violation = 0.0
    if abs(nrm - 1.0) <= sphere_tol:
        lam = float(s @ x - mu * np.abs(x).sum())
        violation = max(0.0, -lam)
    v = s - lam * x
    stat = np.where(x != 0, np.abs(v - mu * np.sign(x)), np.maximum(0.0, np.abs(v) - mu))
    return float(max(box.max(initial=0.0), comp.max(initial=0.0),
                     stat.max(initial=0.0), violation))


def box_image_bounds(data, params):
    """Per-coordinate range of ``sum_i xi_i y_i u_i`` over the ``xi`` box."""
    m = data.m
    lo_xi, hi_xi = -params.tau / m, 1.0 / m
    A = data.U * data.y
    lo = np.where(A > 0, lo_xi * A, hi_xi * A).sum(axis=1)
    hi = np.where(A > 0, hi_xi * A, lo_xi * A).sum(axis=1)
    return lo, hi


def hypercube_separation(data, params, mu):
    """True when the bounding box of the ``xi``-box image misses ``[-mu, mu]^n``.

    A True answer guarantees the two sets are disjoint, so the optimal ``x``
    lies on the unit sphere.
    """
    lo, hi = box_image_bounds(data, params)
    return bool(np.any((lo > mu) | (hi < -mu)))
