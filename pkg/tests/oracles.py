"""Brute-force reference implementations shared by the unit and acceptance tests."""
import itertools

import numpy as np
from scipy.optimize import linprog, minimize_scalar


def best_k_term_bruteforce(a, K):
    """Exhaustive search over all K-subsets; ties resolved to the lexicographically first subset."""
    best, best_err = None, np.inf
    for S in itertools.combinations(range(a.shape[0]), K):
        z = np.zeros_like(a)
        z[list(S)] = a[list(S)]
        err = np.sum((a - z) ** 2)
        if err < best_err:
            best, best_err = z, err
    return best, best_err


def xi_objective(d, u, y, w, c):
    return c * d - np.linalg.norm(y * u * d + w)


def xi_oracle(xi_i, u, y, w, params, m):
    """Grid search followed by bounded Brent refinement of the 1-D concave objective."""
    lo, hi = -params.tau / m - xi_i, 1.0 / m - xi_i
    if hi - lo <= 0:
        return lo
    f = lambda d: xi_objective(d, u, y, w, params.c)  # noqa: E731
    grid = np.linspace(lo, hi, 2001)
    k = int(np.argmax([f(d) for d in grid]))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, len(grid) - 1)]
    res = minimize_scalar(lambda d: -f(d), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-14, "maxiter": 500})
    return max([lo, hi, grid[k], res.x], key=f)


def random_xi_case(rng):
    from bitpin.loss import PinballParams

    n = int(rng.integers(1, 9))
    m = int(rng.integers(1, 21))
    tau = float(rng.choice([rng.uniform(-1, 0), -1.0, 0.0], p=[0.8, 0.1, 0.1]))
    u = rng.standard_normal(n)
    params = PinballParams(tau, float(rng.uniform(0, 1.5) * np.linalg.norm(u)))
    y = float(rng.choice([-1.0, 1.0]))
    w = rng.standard_normal(n) * rng.uniform(0.01, 1.0)
    xi_i = rng.uniform(-tau / m, 1 / m)
    return xi_i, u, y, w, params, m


def box_vertex_bounds(data, params):
    """Per-coordinate range of sum_i xi_i y_i u_i found by enumerating every xi-box vertex."""
    m = data.m
    verts = np.array(list(itertools.product([-params.tau / m, 1 / m], repeat=m)))
    images = verts @ (data.U * data.y).T
    return images.min(axis=0), images.max(axis=0)


def image_meets_cube(data, params, mu):
    """LP feasibility of sum_i xi_i y_i u_i in [-mu, mu]^n with xi in its box."""
    m = data.m
    A = data.U * data.y
    res = linprog(np.zeros(m), A_ub=np.vstack([A, -A]), b_ub=np.full(2 * data.n, mu),
                  bounds=[(-params.tau / m, 1 / m)] * m, method="highs")
    return res.status == 0
