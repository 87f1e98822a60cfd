"""Gram-size and sample-count sweeps, plus helpers for rate checks."""

from __future__ import annotations

import csv
import io
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .divergences import divergence_report
from .errors import InvalidConfig, NonPositiveData
from .kernels import KernelSpec, gram
from .simulation import INNOVATIONS, estimate_from_samples, sample_paths, sample_points

__all__ = [
    "MODES",
    "ExperimentConfig",
    "ResultRow",
    "RESULT_HEADER",
    "trial_points",
    "run_gram_sweep",
    "run_sample_sweep",
    "run_experiment",
    "rows_to_csv",
    "collect",
    "median_curve",
    "first_below",
    "loglog_slope",
]

MODES = ("gram_sweep", "sample_sweep")
RESULT_HEADER = ("mode", "sweep_value", "trial", "metric", "epsilon", "value")

# Stream tags keep point draws and the two path families independent.
_POINTS, _PATHS1, _PATHS2 = 0, 1, 2


def _default_k1():
    return KernelSpec.exponential(1.0, 1)


def _default_k2():
    return KernelSpec.squared_exponential(0.1, 1)


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep configuration. Defaults reproduce the one-dimensional setup:
    exponential kernel with a = 1 against a squared-exponential kernel with
    sigma = 0.1, epsilon in {0.1, 0.5}."""

    d: int = 1
    kernel1: KernelSpec = field(default_factory=_default_k1)
    kernel2: KernelSpec = field(default_factory=_default_k2)
    m_grid: Tuple[int, ...] = tuple(range(10, 1001, 10))
    N_grid: Tuple[int, ...] = tuple(range(10, 1001, 10))
    eps_list: Tuple[float, ...] = (0.1, 0.5)
    trials: int = 20
    seed: int = 0
    delta: float = 0.5
    mode: str = "gram_sweep"
    innovation: str = "gaussian"
    path_seeds: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("m_grid", tuple(int(v) for v in self.m_grid))
        set_("N_grid", tuple(int(v) for v in self.N_grid))
        set_("eps_list", tuple(float(v) for v in self.eps_list))
        if self.path_seeds is not None:
            set_("path_seeds", tuple(int(v) for v in self.path_seeds))
        self.validate()

    def validate(self):
        if self.mode not in MODES:
            raise InvalidConfig(f"mode must be one of {MODES}, got {self.mode!r}")
        if int(self.d) != self.d or self.d < 1:
            raise InvalidConfig("d must be a positive integer")
        for k in (self.kernel1, self.kernel2):
            if not isinstance(k, KernelSpec):
                raise InvalidConfig("kernel1 and kernel2 must be KernelSpec instances")
            if k.dim != self.d:
                raise InvalidConfig(f"kernel dim {k.dim} differs from d={self.d}")
        for name in ("m_grid", "N_grid"):
            grid = getattr(self, name)
            if any(v < 1 for v in grid):
                raise InvalidConfig(f"{name} entries must be positive")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise InvalidConfig(f"{name} must be strictly increasing")
        if not self.m_grid:
            raise InvalidConfig("m_grid must not be empty")
        if self.mode == "sample_sweep" and not self.N_grid:
            raise InvalidConfig("N_grid must not be empty for a sample sweep")
        if not self.eps_list or any(not np.isfinite(e) or e <= 0 for e in self.eps_list):
            raise InvalidConfig("eps_list must hold positive numbers")
        if self.trials < 1:
            raise InvalidConfig("trials must be at least 1")
        if not 0.0 < self.delta < 1.0:
            raise InvalidConfig("delta must lie in (0, 1)")
        if self.innovation not in INNOVATIONS:
            raise InvalidConfig(f"innovation must be one of {INNOVATIONS}")
        if self.path_seeds is not None and len(self.path_seeds) != 2:
            raise InvalidConfig("path_seeds must hold exactly two seeds")

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "kernel1": self.kernel1.to_dict(),
            "kernel2": self.kernel2.to_dict(),
            "m_grid": list(self.m_grid),
            "N_grid": list(self.N_grid),
            "eps_list": list(self.eps_list),
            "trials": self.trials,
            "seed": self.seed,
            "delta": self.delta,
            "mode": self.mode,
            "innovation": self.innovation,
            "path_seeds": None if self.path_seeds is None else list(self.path_seeds),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise InvalidConfig("config must be a JSON object")
        data = dict(data)
        if "n_grid" in data and "N_grid" not in data:
            data["N_grid"] = data.pop("n_grid")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        d = int(data.get("d", 1))
        data["d"] = d
        for key in ("kernel1", "kernel2"):
            if key in data:
                data[key] = KernelSpec.from_dict(data[key], dim=d)
            elif d != 1:
                raise InvalidConfig(f"{key} is required when d != 1")
        try:
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidConfig):
                raise
            raise InvalidConfig(str(exc)) from exc


class ResultRow(NamedTuple):
    mode: str
    sweep_value: int
    trial: int
    metric: str
    epsilon: Optional[float]
    value: float

    def sort_key(self):
        eps = -np.inf if self.epsilon is None else self.epsilon
        return (self.mode, self.sweep_value, self.trial, self.metric, eps)


def _report_rows(mode, sweep_value, trial, report, with_ot: bool) -> List[ResultRow]:
    rows = [
        ResultRow(mode, sweep_value, trial, "hs_sq", None, report.hs_sq),
        ResultRow(mode, sweep_value, trial, "w2_sq", None, report.w2_sq),
    ]
    for eps, val in report.sinkhorn.items():
        rows.append(ResultRow(mode, sweep_value, trial, "sinkhorn", eps, val))
    if with_ot:
        for eps, val in report.ot_eps.items():
            rows.append(ResultRow(mode, sweep_value, trial, "ot_eps", eps, val))
    return rows


def _run_tasks(fn, tasks, jobs: int) -> List[ResultRow]:
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(fn, tasks))
    else:
        chunks = [fn(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    rows.sort(key=ResultRow.sort_key)
    return rows


def trial_points(cfg: ExperimentConfig, trial: int, m: int) -> np.ndarray:
    """Sites used by ``trial`` at size ``m``; depends only on (seed, trial, m)."""
    return sample_points(cfg.d, m, cfg.seed, _POINTS, trial, m).coords


def _gram_task(cfg: ExperimentConfig, task) -> List[ResultRow]:
    trial, m = task
    X = trial_points(cfg, trial, m)
    k1 = gram(cfg.kernel1, X).base.entries / m
    k2 = gram(cfg.kernel2, X).base.entries / m
    report = divergence_report(k1, k2, cfg.eps_list)
    return _report_rows("gram_sweep", m, trial, report, with_ot=False)


def run_gram_sweep(cfg: ExperimentConfig, jobs: int = 1) -> List[ResultRow]:
    """Divergences between ``K1[X]/m`` and ``K2[X]/m`` for each trial and m.

    A fresh set of sites is drawn for every (trial, m).
    """
    if cfg.mode != "gram_sweep":
        raise InvalidConfig("run_gram_sweep needs mode 'gram_sweep'")
    tasks = [(t, m) for t in range(cfg.trials) for m in cfg.m_grid]
    return _run_tasks(lambda task: _gram_task(cfg, task), tasks, jobs)


def _path_seed(cfg: ExperimentConfig, which: int) -> Tuple[int, tuple]:
    if cfg.path_seeds is not None:
        return cfg.path_seeds[which - 1], ()
    return cfg.seed, ((_PATHS1, _PATHS2)[which - 1],)


def _sample_task(cfg: ExperimentConfig, trial: int) -> List[ResultRow]:
    m = cfg.m_grid[0]
    X = trial_points(cfg, trial, m)
    g1 = gram(cfg.kernel1, X)
    g2 = gram(cfg.kernel2, X)
    s1, tag1 = _path_seed(cfg, 1)
    s2, tag2 = _path_seed(cfg, 2)
    rows = []
    for N in cfg.N_grid:
        z1 = sample_paths(g1, N, cfg.innovation, s1, *tag1, trial, N)
        z2 = sample_paths(g2, N, cfg.innovation, s2, *tag2, trial, N)
        report = estimate_from_samples(z1, z2, cfg.eps_list)
        rows.extend(_report_rows("sample_sweep", N, trial, report, with_ot=True))
    return rows


def run_sample_sweep(cfg: ExperimentConfig, jobs: int = 1) -> List[ResultRow]:
    """Finite-sample estimates at a fixed site set of size ``m_grid[0]``.

    Per trial the sites are drawn once; for every N in ``N_grid`` fresh
    realizations of both processes are simulated and fed to
    :func:`gpot.simulation.estimate_from_samples`.
    """
    if cfg.mode != "sample_sweep":
        raise InvalidConfig("run_sample_sweep needs mode 'sample_sweep'")
    return _run_tasks(lambda t: _sample_task(cfg, t), range(cfg.trials), jobs)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> List[ResultRow]:
    if cfg.mode == "gram_sweep":
        return run_gram_sweep(cfg, jobs)
    return run_sample_sweep(cfg, jobs)


def _fmt(v: float) -> str:
    return repr(float(v))


def rows_to_csv(rows: Iterable[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_HEADER)
    for r in sorted(rows, key=ResultRow.sort_key):
        eps = "" if r.epsilon is None else _fmt(r.epsilon)
        w.writerow([r.mode, r.sweep_value, r.trial, r.metric, eps, _fmt(r.value)])
    return buf.getvalue()


def collect(
    rows: Iterable[ResultRow], metric: str, epsilon: Optional[float] = None
) -> Dict[int, Dict[int, float]]:
    """``{sweep_value: {trial: value}}`` for one metric (and epsilon)."""
    out: Dict[int, Dict[int, float]] = defaultdict(dict)
    for r in rows:
        if r.metric == metric and r.epsilon == epsilon:
            out[r.sweep_value][r.trial] = r.value
    return dict(sorted(out.items()))


def median_curve(table: Dict[int, Dict[int, float]]) -> Tuple[np.ndarray, np.ndarray]:
    xs = np.array(sorted(table), dtype=float)
    ys = np.array([np.median(list(table[int(x)].values())) for x in xs])
    return xs, ys


def first_below(xs: Sequence[float], ys: Sequence[float], frac: float = 0.1) -> float:
    """First x at which y has dropped to ``frac`` times its first value.

    Returns ``inf`` if that never happens.
    """
    ys = np.asarray(ys, dtype=float)
    hits = np.nonzero(ys <= frac * ys[0])[0]
    return float(xs[hits[0]]) if hits.size else float("inf")


def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1:
        raise NonPositiveData("xs and ys must be 1-D sequences of equal length")
    if xs.size < 3:
        raise NonPositiveData("need at least three points for a slope")
    if np.any(xs <= 0) or np.any(ys <= 0) or not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ys))):
        raise NonPositiveData("log-log regression needs positive finite data")
    lx, ly = np.log(xs), np.log(ys)
    lx = lx - lx.mean()
    return float(lx @ (ly - ly.mean()) / (lx @ lx))
