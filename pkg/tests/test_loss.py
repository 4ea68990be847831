import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bitpin.epsvm import DualState
from bitpin.loss import (
    PinballParams,
    ProblemData,
    epsvm_dual_objective,
    epsvm_primal_objective,
    piht_objective,
    piht_subgradient,
    pinball_loss,
    pinball_value,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)
taus = st.floats(-1.0, 0.0)


def scalar_pinball(t, tau):
    # reference branch evaluation, independent of the vectorised kernel
    return t if t >= 0 else -tau * t


def random_data(rng, n, m):
    U = rng.standard_normal((n, m))
    y = rng.choice([-1.0, 1.0], size=m)
    return ProblemData(U, y)


@pytest.mark.parametrize("t, tau, expected", [
    (-3.0, 0.0, 0.0),
    (-3.0, -1.0, -3.0),
    (4.0, -0.5, 4.0),
    (-2.0, -0.5, -1.0),
])
def test_pinball_value_examples(t, tau, expected):
    assert pinball_value(t, PinballParams(tau=tau, c=0.0)) == expected


@pytest.mark.parametrize("tau, c", [(0.1, 1.0), (-1.5, 1.0), (-0.5, -0.1), (np.nan, 1.0)])
def test_params_rejected(tau, c):
    with pytest.raises(ValueError):
        PinballParams(tau=tau, c=c)


@given(finite)
def test_pinball_endpoints(t):
    assert pinball_value(t, PinballParams(0.0, 0.0)) == max(0.0, t)
    assert pinball_value(t, PinballParams(-1.0, 0.0)) == t


@given(finite, finite, st.floats(0, 1), taus)
def test_pinball_convex(t1, t2, lam, tau):
    p = PinballParams(tau, 0.0)
    lhs = pinball_value(lam * t1 + (1 - lam) * t2, p)
    rhs = lam * pinball_value(t1, p) + (1 - lam) * pinball_value(t2, p)
    assert lhs <= rhs + 1e-12 * max(1.0, abs(t1), abs(t2))


@given(finite, taus)
def test_vectorised_matches_scalar(t, tau):
    assert pinball_loss(np.array([t]), tau)[0] == pinball_value(t, PinballParams(tau, 0.0))


def test_problem_data_validation():
    with pytest.raises(ValueError):
        ProblemData(np.array([[1.0, 0.0], [0.0, 0.0]]), [1, 1])  # zero column
    with pytest.raises(ValueError):
        ProblemData(np.eye(2), [1, 0])
    with pytest.raises(ValueError):
        ProblemData(np.eye(2), [1, 1, 1])


def test_piht_objective_examples():
    rng = np.random.default_rng(0)
    data = random_data(rng, 5, 7)
    assert piht_objective(np.zeros(5), data, PinballParams(-0.5, 1.0)) == pytest.approx(1.0)

    one = ProblemData(np.array([[1.0], [0.0]]), [1])
    assert piht_objective(np.array([1.0, 0.0]), one, PinballParams(0.0, 0.0)) == 0.0

    two = ProblemData(np.eye(2), [1, -1])
    params = PinballParams(-0.5, 1.0)
    x = np.array([1.0, 0.0])
    terms = [1.0 - 1 * (np.array([1.0, 0.0]) @ x), 1.0 - (-1) * (np.array([0.0, 1.0]) @ x)]
    assert terms == [0.0, 1.0]
    expected = 0.5 * sum(scalar_pinball(t, -0.5) for t in terms)
    assert expected == 0.5
    assert piht_objective(x, two, params) == pytest.approx(expected)


def test_objective_dimension_mismatch():
    data = ProblemData(np.eye(2), [1, 1])
    with pytest.raises(ValueError):
        piht_objective(np.zeros(3), data, PinballParams())
    with pytest.raises(ValueError):
        piht_subgradient(np.zeros(3), data, PinballParams())


def test_piht_subgradient_branches():
    data = ProblemData(np.array([[1.0], [0.0]]), [1])
    g = piht_subgradient(np.array([0.0, 1.0]), data, PinballParams(-0.3, 1.0))
    np.testing.assert_array_equal(g, [-1.0, 0.0])
    g = piht_subgradient(np.array([1.0, 0.0]), data, PinballParams(-0.2, 0.5))
    np.testing.assert_allclose(g, [-0.2, 0.0])


def test_subgradient_boundary_uses_first_branch():
    data = ProblemData(np.array([[1.0], [0.0]]), [1])
    # y u^T x == c exactly
    g = piht_subgradient(np.array([0.5, 0.0]), data, PinballParams(-0.2, 0.5))
    np.testing.assert_array_equal(g, [-1.0, 0.0])


@pytest.mark.parametrize("seed", range(5))
def test_subgradient_inequality(seed):
    rng = np.random.default_rng(seed)
    n, m = 8, 30
    data = random_data(rng, n, m)
    params = PinballParams(rng.uniform(-1, 0), rng.uniform(0, 2))
    h = 1e-6
    for _ in range(50):
        x = rng.standard_normal(n)
        d = rng.standard_normal(n)
        g = piht_subgradient(x, data, params)
        lhs = piht_objective(x + h * d, data, params)
        rhs = piht_objective(x, data, params) + h / m * (g @ d)
        assert lhs >= rhs - 1e-8


def test_epsvm_primal_examples():
    rng = np.random.default_rng(1)
    data = random_data(rng, 4, 6)
    params = PinballParams(-0.5, 1.0)
    assert epsvm_primal_objective(np.zeros(4), data, params, 0.3) == pytest.approx(1.0)

    one = ProblemData(np.array([[2.0]]), [1])
    val = epsvm_primal_objective(np.array([0.5]), one, PinballParams(-1.0, 1.0), 0.1)
    assert val == pytest.approx(0.1 * 0.5 + scalar_pinball(1.0 - 1.0, -1.0))

    x = rng.standard_normal(4)
    x /= np.linalg.norm(x)
    a = epsvm_primal_objective(x, data, params, 0.2)
    b = epsvm_primal_objective(x, data, params, 0.4)
    assert b - a == pytest.approx(0.2 * np.abs(x).sum())

    with pytest.raises(ValueError):
        epsvm_primal_objective(x, data, params, 0.0)


def test_epsvm_dual_examples():
    rng = np.random.default_rng(2)
    data = random_data(rng, 4, 6)
    zero = DualState.from_dual(np.zeros(4), np.zeros(6), data)
    assert epsvm_dual_objective(zero, data, PinballParams(0.0, 1.0)) == 0.0

    c = 0.7
    xi = np.full(6, 1 / 6)
    state = DualState.from_dual(np.zeros(4), xi, data)
    expected = c - np.linalg.norm(data.U @ data.y / 6)
    assert epsvm_dual_objective(state, data, PinballParams(-1.0, c)) == pytest.approx(expected)

    bad = DualState.from_dual(np.zeros(4), np.full(6, 0.5), data)
    with pytest.raises(ValueError):
        epsvm_dual_objective(bad, data, PinballParams(-0.5, 1.0))


@pytest.mark.parametrize("seed", range(10))
def test_weak_duality(seed):
    rng = np.random.default_rng(seed)
    n, m = 6, 15
    data = random_data(rng, n, m)
    params = PinballParams(rng.uniform(-1, 0), rng.uniform(0, 2))
    mu = rng.uniform(0.01, 1.0)
    for _ in range(20):
        x = rng.standard_normal(n)
        x *= rng.uniform(0, 1) / np.linalg.norm(x)
        beta = rng.uniform(-mu, mu, n)
        xi = rng.uniform(-params.tau / m, 1 / m, m)
        state = DualState.from_dual(beta, xi, data)
        dual = epsvm_dual_objective(state, data, params, mu)
        assert dual <= epsvm_primal_objective(x, data, params, mu) + 1e-12


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_weak_duality_property(seed):
    rng = np.random.default_rng(seed)
    n, m = 3, 5
    data = random_data(rng, n, m)
    params = PinballParams(rng.uniform(-1, 0), rng.uniform(0, 3))
    mu = rng.uniform(0.01, 1.0)
    x = rng.standard_normal(n)
    x /= max(1.0, np.linalg.norm(x))
    state = DualState.from_dual(rng.uniform(-mu, mu, n),
                                rng.uniform(-params.tau / m, 1 / m, m), data)
    assert epsvm_dual_objective(state, data, params, mu) <= \
        epsvm_primal_objective(x, data, params, mu) + 1e-12
