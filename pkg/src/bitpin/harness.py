"""Seeded Monte-Carlo experiments over parameter grids.

A config is a flat mapping of experiment fields.  Any field listed in
``GRID_FIELDS`` may hold a list instead of a scalar; each such field is a
grid axis (at most two per experiment).  Every (grid point, trial) pair
gets its own problem seed, hashed from the base seed, the data-defining
coordinates (n, m, K, r_f, r_n) and the trial index.  Solver-side axes
therefore share problem instances, and results do not depend on the
order in which trials are executed.
"""
import csv
import hashlib
import json
import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from itertools import product

import numpy as np

from .aop import AopConfig, aop_solve
from .epsvm import EpsvmConfig, default_mu, epsvm_solve, passive_closed_form
from .loss import PinballParams
from .piht import PihtConfig, piht_solve
from .sensing import flip_count, make_problem, recovery_error

__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "TrialRecord",
    "PRESETS",
    "preset",
    "run_experiment",
    "emit_results",
    "trial_seed",
    "solve_problem",
]

SOLVERS = ("biht", "piht", "aop_biht", "aop_piht", "passive", "epsvm")
GRID_FIELDS = ("solver", "m", "K", "r_f", "r_n", "tau", "c", "C", "mu", "K_est", "L")
DATA_FIELDS = ("n", "m", "K", "r_f", "r_n")
STAT_COLUMNS = ("mean_error", "std_error", "mean_time_ms", "n_trials")


@dataclass
class ExperimentConfig:
    n: int = 1000
    m: object = 500
    K: object = 10
    r_f: object = 0.1
    r_n: object = math.inf
    trials: int = 100
    base_seed: int = 0
    solver: object = "piht"
    tau: object = -0.2
    c: object = 1.0
    mu: object = None
    C: object = None
    K_est: object = None
    L: object = None
    alpha: float = None
    l_max: int = None
    aop_steps: int = 1
    aop_outer: int = 500
    aop_decay: float = 0.95
    name: str = ""

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        for name in GRID_FIELDS:
            value = getattr(self, name)
            if isinstance(value, (list, tuple)):
                if len(value) == 0:
                    raise ValueError(f"grid for {name!r} is empty")
                setattr(self, name, list(value))
        if len(self.axes) > 2:
            raise ValueError(f"at most two grid axes are supported, got {self.axes}")
        for entry in self._as_list(self.solver):
            name = entry["solver"] if isinstance(entry, dict) else entry
            if name not in SOLVERS:
                raise ValueError(f"unknown solver {name!r}; choose from {SOLVERS}")

    @staticmethod
    def _as_list(v):
        return v if isinstance(v, list) else [v]

    @property
    def axes(self):
        return [f for f in GRID_FIELDS if isinstance(getattr(self, f), list)]

    def points(self):
        """Yield one dict of scalar settings per grid point, axes varying last-fastest."""
        axes = self.axes
        base = {f.name: getattr(self, f.name) for f in fields(self)}
        for combo in product(*(getattr(self, a) for a in axes)):
            point = dict(base)
            point.update(zip(axes, combo))
            yield point

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        d = {k: _decode_inf(v) for k, v in d.items()}
        return cls(**d)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return asdict(self)


def _decode_inf(v):
    if isinstance(v, str) and v.lower() in ("inf", "infinity", "+inf"):
        return math.inf
    if isinstance(v, list):
        return [_decode_inf(x) for x in v]
    return v


@dataclass
class TrialRecord:
    coords: dict
    trial: int
    seed: int
    error: float
    time_ms: float
    status: str


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    axes: list
    records: list = field(default_factory=list)

    def aggregate(self):
        """Mean and population std of the error per grid point, in grid order."""
        groups = {}
        for rec in self.records:
            key = tuple(_axis_key(rec.coords[a]) for a in self.axes)
            groups.setdefault(key, []).append(rec)
        rows = []
        for key, recs in groups.items():
            recs = sorted(recs, key=lambda r: r.trial)
            ok = [r for r in recs if math.isfinite(r.error)]
            err = np.array([r.error for r in ok])
            tms = np.array([r.time_ms for r in ok])
            row = {a: recs[0].coords[a] for a in self.axes}
            row["mean_error"] = float(err.mean()) if len(ok) else math.nan
            row["std_error"] = float(err.std()) if len(ok) else math.nan
            row["mean_time_ms"] = float(tms.mean()) if len(ok) else math.nan
            row["n_trials"] = len(ok)
            rows.append(row)
        return rows

    def errors(self, **coords):
        """Trial errors (ordered by trial) at the grid point matching ``coords``."""
        sel = [r for r in self.records
               if all(_axis_key(r.coords[k]) == _axis_key(v) for k, v in coords.items())]
        return np.array([r.error for r in sorted(sel, key=lambda r: r.trial)])


def _axis_key(v):
    if isinstance(v, dict):
        return _method_label(v)
    return v


def _method_label(entry):
    if isinstance(entry, dict):
        return entry.get("label") or entry["solver"]
    return entry


def trial_seed(base_seed, point, trial):
    """64-bit problem seed from the data coordinates of ``point`` and the trial index."""
    key = "|".join([str(int(base_seed))] + [repr(point[f]) for f in DATA_FIELDS]
                   + [str(int(trial))])
    return int.from_bytes(hashlib.blake2b(key.encode(), digest_size=8).digest(), "little")


def _resolve(point):
    """Apply per-method overrides of a method entry to a grid point."""
    entry = point["solver"]
    if isinstance(entry, dict):
        point = dict(point)
        point.update({k: v for k, v in entry.items() if k != "label"})
    return point


def solve_problem(data, point, K_true=None):
    """Run the solver named in ``point`` and return ``(x, status)``."""
    point = _resolve(point)
    solver = point["solver"]
    n, m = data.n, data.m
    K = point.get("K_est") or K_true or point.get("K")
    tau, c = point.get("tau", -0.5), point.get("c", 1.0)
    l_max = point.get("l_max")
    if solver in ("biht", "piht", "aop_biht", "aop_piht"):
        if solver in ("biht", "aop_biht"):
            tau, c = 0.0, 0.0
        inner_steps = point.get("aop_steps", 1) if solver.startswith("aop") else (l_max or 500)
        cfg = PihtConfig(K=int(K), alpha=point.get("alpha"), l_max=int(inner_steps),
                         params=PinballParams(tau=tau, c=c))
        if solver.startswith("aop"):
            L = point.get("L")
            if L is None:
                L = flip_count(point.get("r_f", 0.0), m)
            res = aop_solve(data, AopConfig(L=int(L), inner=cfg, tau0=tau,
                                            decay=point.get("aop_decay", 0.95),
                                            outer_max=point.get("aop_outer", 500)))
        else:
            res = piht_solve(data, cfg)
        return res.x, res.status
    if solver == "passive":
        mu = point.get("mu") or default_mu(-1.0, n, m, point.get("C") or 1.0)
        res = passive_closed_form(data, mu)
        return res.x, res.status
    mu = point.get("mu") or default_mu(tau, n, m, point.get("C"))
    cfg = EpsvmConfig(params=PinballParams(tau=tau, c=c), mu=mu, l_max=l_max or 100)
    res = epsvm_solve(data, cfg)
    return res.x, res.status


def _run_task(task):
    base_seed, data_point, trial, points = task
    seed = trial_seed(base_seed, data_point, trial)
    problem = make_problem(int(data_point["n"]), int(data_point["m"]), int(data_point["K"]),
                           float(data_point["r_n"]), float(data_point["r_f"]), seed)
    out = []
    for idx, point in points:
        t0 = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                x, status = solve_problem(problem.data, point, problem.K)
            elapsed = 1e3 * (time.perf_counter() - t0)
            err = recovery_error(x, problem.signal)
        except Exception as exc:  # recorded per trial, the sweep continues
            elapsed, err, status = math.nan, math.nan, f"error: {exc}"
        out.append((idx, trial, seed, err, elapsed, status))
    return out


def run_experiment(config, workers=1):
    """Run every (grid point, trial) pair and collect :class:`TrialRecord` rows.

    ``workers > 1`` distributes trials over a process pool; the records are
    identical to a sequential run up to wall time.
    """
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    axes = config.axes
    points = list(config.points())
    groups = {}
    for idx, point in enumerate(points):
        dkey = tuple(point[f] for f in DATA_FIELDS)
        groups.setdefault(dkey, []).append((idx, point))
    tasks = []
    for dkey, members in groups.items():
        data_point = dict(zip(DATA_FIELDS, dkey))
        for t in range(config.trials):
            tasks.append((config.base_seed, data_point, t, members))

    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        chunks = [_run_task(t) for t in tasks]

    flat = sorted((item for chunk in chunks for item in chunk), key=lambda r: (r[0], r[1]))
    records = [TrialRecord(coords={a: _axis_key(points[idx][a]) for a in axes}, trial=trial,
                           seed=seed, error=err, time_ms=elapsed, status=status)
               for idx, trial, seed, err, elapsed, status in flat]
    return ExperimentResult(config=config, axes=axes, records=records)


# output ------------------------------------------------------------------

def _cell(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_results(table, path, fmt="csv", timing=True, records=False):
    """Write aggregate rows (or per-trial records) as CSV or plot data.

    ``table`` is an :class:`ExperimentResult` or a list of aggregate row
    dicts.  ``timing=False`` drops wall-time columns, which makes the output
    reproducible bit for bit.  The plot-data format is whitespace-separated
    columns with one blank-line-separated block per value of the first axis
    (for two-axis sweeps), the layout gnuplot expects for curves and grids.
    """
    if not path:
        raise ValueError("an output path is required")
    if fmt not in ("csv", "plotdata"):
        raise ValueError(f"unknown format {fmt!r}")
    if isinstance(table, ExperimentResult):
        axes = table.axes
        rows = _record_rows(table) if records else table.aggregate()
    else:
        rows = list(table)
        if not rows:
            raise ValueError("nothing to write")
        axes = [k for k in rows[0] if k not in STAT_COLUMNS]
    if not rows:
        raise ValueError("nothing to write")
    columns = list(rows[0].keys())
    if not timing:
        columns = [c for c in columns if c not in ("mean_time_ms", "time_ms")]
    parent = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(parent):
        raise OSError(f"directory does not exist: {parent}")

    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([_cell(row[c]) for c in columns])
            return
        fh.write("# " + " ".join(columns) + "\n")
        block_axis = axes[0] if len(axes) == 2 else None
        prev = object()
        first = True
        for row in rows:
            if block_axis is not None and row[block_axis] != prev:
                if not first:
                    fh.write("\n\n")
                fh.write(f"# {block_axis}={row[block_axis]}\n")
                prev = row[block_axis]
            first = False
            fh.write(" ".join(_cell(row[c]) for c in columns) + "\n")


def _record_rows(result):
    rows = []
    for r in result.records:
        row = {a: r.coords[a] for a in result.axes}
        row.update(trial=r.trial, seed=r.seed, error=r.error, time_ms=r.time_ms,
                   status=r.status)
        rows.append(row)
    return rows


# presets -----------------------------------------------------------------

_PIHT_FAMILY = [
    {"solver": "biht", "label": "biht"},
    {"solver": "piht", "tau": -0.1, "label": "piht_tau-0.1"},
    {"solver": "piht", "tau": -0.2, "label": "piht_tau-0.2"},
    {"solver": "piht", "tau": -0.4, "label": "piht_tau-0.4"},
]
_AOP_FAMILY = ["biht", "piht", "aop_biht", "aop_piht"]
_EPSVM_TAUS = [-0.4, -0.5, -0.7, -0.9, -1.0]
_TABLE_MS = [200, 350, 500, 650, 800, 1100, 1400, 1700, 2000]
_SNRS = [1, 2, 5, 10, 15, 20, 25, 30, 40, 50]

PRESETS = {
    "exp1-tau": dict(n=1000, m=500, K=10, r_f=0.1, r_n=math.inf, solver="piht", c=0.0,
                     tau=[round(-1.0 + 0.1 * i, 1) for i in range(11)]),
    "exp1-c": dict(n=1000, m=500, K=10, r_f=0.1, r_n=math.inf, solver="piht", tau=-0.2,
                   c=[round(0.1 * i, 1) for i in range(21)]),
    "exp2-aop": dict(n=1000, K=15, r_f=0.1, r_n=math.inf, tau=-0.2, c=1.0,
                     solver=_AOP_FAMILY, m=list(range(200, 1501, 100))),
    "exp3-noise": dict(n=1000, m=800, K=15, r_f=0.0, tau=-0.2, c=1.0,
                       solver=_AOP_FAMILY, r_n=_SNRS),
    "exp3-noise-flips": dict(n=1000, m=800, K=15, r_f=0.1, tau=-0.2, c=1.0,
                             solver=_AOP_FAMILY, r_n=_SNRS),
    "exp4-epsvm": dict(n=1000, m=300, K=15, r_f=0.1, r_n=math.inf, solver="epsvm", c=1.0,
                       C=1.0, tau=[round(-1.0 + 0.1 * i, 1) for i in range(11)]),
    "exp4-epsvm-c": dict(n=1000, m=300, K=15, r_f=0.1, r_n=math.inf, solver="epsvm",
                         tau=-0.7, C=1.0, c=[0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 5.0]),
    "contour": dict(n=1000, m=300, K=15, r_f=0.1, r_n=math.inf, solver="epsvm", c=1.0,
                    tau=[round(-1.0 + 0.1 * i, 1) for i in range(11)],
                    C=[round(0.2 * i, 1) for i in range(1, 11)]),
    "fig-piht-m": dict(n=1000, K=20, r_f=0.1, r_n=math.inf, c=1.0, solver=_PIHT_FAMILY,
                       m=[100, 250, 500, 1000, 1500, 2000, 3000, 4000, 5000]),
    "fig-piht-noise": dict(n=1000, m=800, K=20, r_f=0.1, c=1.0, solver=_PIHT_FAMILY,
                           r_n=_SNRS),
    "fig-piht-k": dict(n=1000, m=800, K=20, r_f=0.1, r_n=math.inf, c=1.0,
                       solver=_PIHT_FAMILY, K_est=[5, 10, 15, 20, 25, 30, 35, 40]),
    "fig-epsvm-noise": dict(n=1000, m=2000, K=20, r_f=0.1, c=1.0,
                            solver=[{"solver": "passive"},
                                    {"solver": "epsvm", "tau": -0.5, "C": 0.7}],
                            r_n=_SNRS),
    "fig-epsvm-k": dict(n=1000, m=500, r_n=20.0, r_f=0.1, c=1.0,
                        solver=[{"solver": "passive"},
                                {"solver": "epsvm", "tau": -0.5, "C": 0.7}],
                        K=[5, 10, 15, 20, 25, 30, 35, 40]),
    "table1": dict(n=1000, K=20, r_f=0.1, r_n=math.inf, solver="epsvm", c=1.0,
                   tau=_EPSVM_TAUS, m=_TABLE_MS),
    "table2": dict(n=1000, K=20, r_f=0.1, r_n=10.0, solver="epsvm", c=1.0,
                   tau=_EPSVM_TAUS, m=_TABLE_MS),
}


def preset(name, **overrides):
    """Config for a named preset, with field overrides."""
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}")
    d = dict(PRESETS[name], name=name)
    d.update(overrides)
    return ExperimentConfig.from_dict(d)
