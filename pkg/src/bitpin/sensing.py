"""Synthetic one-bit sensing problems.

Every generator takes a ``seed`` (an int, a :class:`numpy.random.SeedSequence`
or a :class:`numpy.random.Generator`) and is a pure function of its
arguments.  :func:`make_problem` splits one integer seed into four
independent child streams, in the fixed order signal, matrix, noise,
flips, so each artifact can be regenerated on its own via
:func:`child_seeds`.
"""
import math
from dataclasses import dataclass

import numpy as np

from .loss import ProblemData

__all__ = [
    "SparseSignal",
    "Problem",
    "child_seeds",
    "generate_sparse_signal",
    "generate_measurement_system",
    "quantize",
    "flip_count",
    "flip_signs",
    "recovery_error",
    "make_problem",
    "dump_problem",
    "load_problem",
]

STREAMS = ("signal", "matrix", "noise", "flips")


@dataclass(frozen=True)
class SparseSignal:
    x: np.ndarray
    support: np.ndarray

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def K(self):
        return self.support.shape[0]


@dataclass
class Problem:
    """A generated instance together with the parameters that produced it."""

    signal: SparseSignal
    data: ProblemData
    flipped: np.ndarray
    snr: float = math.inf
    flip_ratio: float = 0.0
    seed: int = 0

    @property
    def n(self):
        return self.data.n

    @property
    def m(self):
        return self.data.m

    @property
    def K(self):
        return self.signal.K


def _rng(seed):
    return np.random.default_rng(seed)


def child_seeds(seed):
    """Return ``{stream name: SeedSequence}`` for the four problem artifacts."""
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return dict(zip(STREAMS, children))


def generate_sparse_signal(n, K, seed):
    """Unit-norm vector with ``K`` Gaussian entries on a uniformly drawn support."""
    if not 1 <= K <= n:
        raise ValueError(f"need 1 <= K <= n, got K={K}, n={n}")
    rng = _rng(seed)
    support = np.sort(rng.choice(n, size=K, replace=False))
    x = np.zeros(n)
    vals = rng.standard_normal(K)
    while not np.any(vals):
        vals = rng.standard_normal(K)
    x[support] = vals / np.linalg.norm(vals)
    return SparseSignal(x=x, support=support)


def generate_measurement_system(n, m, seed):
    """``n x m`` matrix of i.i.d. standard Gaussian entries (column i is u_i)."""
    if n < 1 or m < 1:
        raise ValueError(f"dimensions must be positive, got n={n}, m={m}")
    return _rng(seed).standard_normal((n, m))


def _sign(a):
    return np.where(a >= 0, 1.0, -1.0)


def quantize(U, x, snr=math.inf, seed=None):
    """Signs of ``U.T @ x + noise``; ``sgn(0) = +1``.

    The noise is Gaussian with variance ``mean((U.T @ x)**2) / snr``, where
    ``snr`` is a linear power ratio (``inf`` means noiseless).
    """
    U = np.asarray(U, dtype=np.float64)
    x = np.asarray(getattr(x, "x", x), dtype=np.float64)
    if U.ndim != 2 or x.shape != (U.shape[0],):
        raise ValueError(f"dimension mismatch: U {U.shape}, x {x.shape}")
    if not snr > 0:
        raise ValueError(f"snr must be positive, got {snr}")
    analog = U.T @ x
    if math.isfinite(snr):
        sigma = math.sqrt(float(np.mean(analog ** 2)) / snr)
        analog = analog + sigma * _rng(seed).standard_normal(analog.shape[0])
    return _sign(analog)


def flip_count(ratio, m):
    """``round(ratio * m)`` with halves rounded up."""
    return int(math.floor(ratio * m + 0.5))


def flip_signs(y, ratio, seed, return_index=False):
    """Negate exactly ``flip_count(ratio, len(y))`` entries chosen uniformly."""
    if not 0.0 <= ratio <= 1.0:
        raise ValueError(f"flip ratio must lie in [0, 1], got {ratio}")
    y = np.array(y, dtype=np.float64)
    idx = np.sort(_rng(seed).choice(y.shape[0], size=flip_count(ratio, y.shape[0]),
                                    replace=False))
    y[idx] = -y[idx]
    if return_index:
        return y, idx
    return y


def recovery_error(xhat, xbar):
    """Euclidean distance between the estimate and the true signal."""
    xhat = np.asarray(getattr(xhat, "x", xhat), dtype=np.float64)
    xbar = np.asarray(getattr(xbar, "x", xbar), dtype=np.float64)
    if xhat.shape != xbar.shape:
        raise ValueError(f"dimension mismatch: {xhat.shape} vs {xbar.shape}")
    return float(np.linalg.norm(xhat - xbar))


def make_problem(n, m, K, snr=math.inf, flip_ratio=0.0, seed=0):
    """Generate signal, matrix, noisy signs and flips from one integer seed."""
    seeds = child_seeds(seed)
    signal = generate_sparse_signal(n, K, seeds["signal"])
    U = generate_measurement_system(n, m, seeds["matrix"])
    y = quantize(U, signal, snr, seeds["noise"])
    y, flipped = flip_signs(y, flip_ratio, seeds["flips"], return_index=True)
    return Problem(signal=signal, data=ProblemData(U, y), flipped=flipped,
                   snr=float(snr), flip_ratio=float(flip_ratio), seed=int(seed))


# text dump ---------------------------------------------------------------

def _fmt(values):
    return " ".join(repr(float(v)) for v in values)


def dump_problem(problem, path):
    """Write a problem as plain text.

    Layout: a header ``n m K snr flip_ratio seed``, the true signal on one
    line, ``m`` lines holding the columns of ``U``, then ``y`` on one line.
    Floats use the shortest round-trip representation.
    """
    d = problem.data
    lines = [
        f"{d.n} {d.m} {problem.K} {problem.snr!r} {problem.flip_ratio!r} {problem.seed}",
        _fmt(problem.signal.x),
    ]
    lines.extend(_fmt(d.U[:, i]) for i in range(d.m))
    lines.append(" ".join(str(int(v)) for v in d.y))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_problem(path):
    """Inverse of :func:`dump_problem`."""
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty problem file")
    head = lines[0].split()
    if len(head) != 6:
        raise ValueError(f"{path}: malformed header {lines[0]!r}")
    n, m, K = int(head[0]), int(head[1]), int(head[2])
    snr, ratio, seed = float(head[3]), float(head[4]), int(head[5])
    if len(lines) != m + 3:
        raise ValueError(f"{path}: expected {m + 3} lines, found {len(lines)}")
    x = np.array(lines[1].split(), dtype=np.float64)
    U = np.array([ln.split() for ln in lines[2:2 + m]], dtype=np.float64).T
    y = np.array(lines[-1].split(), dtype=np.float64)
    if x.shape != (n,) or U.shape != (n, m) or y.shape != (m,):
        raise ValueError(f"{path}: array sizes do not match header")
    support = np.flatnonzero(x)
    return Problem(signal=SparseSignal(x=x, support=support), data=ProblemData(U, y),
                   flipped=np.array([], dtype=np.int64), snr=snr, flip_ratio=ratio,
                   seed=seed)
