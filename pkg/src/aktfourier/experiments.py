"""Seeded Monte Carlo runner, aggregation, rate fits and deterministic emission."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import measures as M
from .constants import akt_upper_constants, mixing_delta_sq, quantitative_bound, subset_constants
from .fourier import optimize_t, prop2_bound
from .lower_bounds import (dist_to_sample_discrete, lower_1d_statistic,
                           mean_shift_statistic)
from .measures import DiscreteMeasure, RngStream
from .transport import MAX_DENSE_N, w1_1d, w1_exact

log = logging.getLogger(__name__)

SAMPLER_PARAMS = {
    "iid_uniform": {},
    "iid_custom": {"name": "uniform"},
    "rotation": {"maps": "default"},
    "renewal_mixing": {"rho_mix": 0.5},
    "subset_of_atoms": {"atoms_factor": 2},
}
COMPARISONS = ("two_samples", "sample_vs_atom_average")
TRIAL_COLUMNS = ("n", "trial", "w1", "bound_total", "t", "lower", "wall_ms")
AGGREGATE_COLUMNS = ("n", "mean", "stderr", "min", "max", "bound_mean", "paper_bound", "pass")
# slack for floating-point noise in the sandwich check
SANDWICH_TOL = 1e-9
# stream key prefixes: trial draws and per-n atom draws never collide
_TRIAL_KEY, _ATOM_KEY = 0, 1


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass(frozen=True)
class SamplerSpec:
    kind: str = "iid_uniform"
    params: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj) -> "SamplerSpec":
        if isinstance(obj, str):
            obj = {"kind": obj}
        obj = dict(obj)
        kind = obj.pop("kind", None)
        if kind not in SAMPLER_PARAMS:
            raise ConfigError(f"unknown sampler kind {kind!r}; expected one of {sorted(SAMPLER_PARAMS)}")
        unknown = set(obj) - set(SAMPLER_PARAMS[kind])
        if unknown:
            raise ConfigError(f"unknown parameters for sampler {kind!r}: {sorted(unknown)}")
        return cls(kind, {**SAMPLER_PARAMS[kind], **obj})

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}


@dataclass(frozen=True)
class ExperimentConfig:
    dimension: int
    n_values: tuple[int, ...]
    trials: int
    seed: int
    sampler: SamplerSpec = SamplerSpec()
    metric: str = "euclidean"
    comparison: str = "two_samples"
    t_policy: str | dict = "half_inv_n"
    compute_bounds: bool = False
    compute_lower: bool = False
    record_timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if isinstance(self.sampler, (dict, str)):
            object.__setattr__(self, "sampler", SamplerSpec.from_json(self.sampler))
        self.validate()

    def validate(self) -> None:
        if self.dimension < 1:
            raise ConfigError("dimension must be >= 1")
        if not self.n_values:
            raise ConfigError("n_values must be nonempty")
        if list(self.n_values) != sorted(set(self.n_values)):
            raise ConfigError("n_values must be strictly ascending")
        if self.n_values[0] < 2:
            raise ConfigError("every n must be >= 2")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.metric not in ("euclidean", "torus"):
            raise ConfigError(f"unknown metric {self.metric!r}")
        if self.comparison not in COMPARISONS:
            raise ConfigError(f"unknown comparison {self.comparison!r}")
        subset = self.sampler.kind == "subset_of_atoms"
        if subset != (self.comparison == "sample_vs_atom_average"):
            raise ConfigError("sampler subset_of_atoms goes with comparison sample_vs_atom_average only")
        if subset and int(self.sampler.params["atoms_factor"]) < 2:
            raise ConfigError("atoms_factor must be an integer >= 2")
        if self.sampler.kind == "renewal_mixing" and not 0 < self.sampler.params["rho_mix"] < 1:
            raise ConfigError("rho_mix must lie in (0, 1)")
        if self.sampler.kind == "iid_custom" and self.sampler.params["name"] not in M.CUSTOM_SAMPLERS:
            raise ConfigError(f"unknown custom sampler {self.sampler.params['name']!r}")
        if self.sampler.kind == "rotation" and self.sampler.params["maps"] not in ("default", "identity"):
            raise ConfigError("rotation maps must be 'default' or 'identity'")
        if self.sampler.kind == "rotation" and self.sampler.params["maps"] == "identity" and self.dimension != 1:
            raise ConfigError("identity rotation maps need dimension 1")
        _parse_t_policy(self.t_policy)
        for n in self.n_values:
            size = n * (int(self.sampler.params["atoms_factor"]) - 1) if subset else n
            if self.dimension > 1 and size > MAX_DENSE_N:
                raise ConfigError(f"n={n} exceeds the dense solver cap of {MAX_DENSE_N}")

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(obj) - names
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        missing = {"dimension", "n_values", "trials", "seed"} - set(obj)
        if missing:
            raise ConfigError(f"missing config keys: {sorted(missing)}")
        try:
            return cls(**obj)
        except (TypeError, KeyError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        try:
            obj = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from None
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: top level must be an object")
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["n_values"] = list(self.n_values)
        d["sampler"] = self.sampler.to_json()
        return d


def _parse_t_policy(policy):
    """Return ("half_inv_n", None), ("fixed", t) or ("grid", [t...])."""
    if policy == "half_inv_n":
        return "half_inv_n", None
    if isinstance(policy, dict) and len(policy) == 1:
        (k, v), = policy.items()
        if k == "fixed" and isinstance(v, (int, float)) and v > 0:
            return "fixed", float(v)
        if k == "grid" and isinstance(v, list) and v and all(isinstance(x, (int, float)) and x > 0 for x in v):
            return "grid", [float(x) for x in v]
    raise ConfigError(f"bad t_policy {policy!r}; use 'half_inv_n', {{'fixed': t}} or {{'grid': [...]}}")


@dataclass(frozen=True)
class TrialRecord:
    n: int
    trial: int
    w1: float
    bound_total: float | None = None
    t: float | None = None
    lower: float | None = None
    wall_ms: float | None = None

    def check_sandwich(self) -> None:
        if self.lower is not None and self.lower > self.w1 + SANDWICH_TOL:
            raise InvariantViolation(f"n={self.n} trial={self.trial}: lower {self.lower!r} > W1 {self.w1!r}")
        if self.bound_total is not None and self.w1 > self.bound_total + SANDWICH_TOL:
            raise InvariantViolation(f"n={self.n} trial={self.trial}: W1 {self.w1!r} > bound {self.bound_total!r}")


@dataclass(frozen=True)
class AggregateRow:
    n: int
    mean: float
    stderr: float
    min: float
    max: float
    bound_mean: float | None
    paper_bound: float
    passed: bool


# -- one trial ---------------------------------------------------------------

def _draw_pair(cfg: ExperimentConfig, n: int, stream: RngStream):
    kind, p, d = cfg.sampler.kind, cfg.sampler.params, cfg.dimension
    if kind == "iid_uniform":
        return M.sample_iid_uniform(n, d, stream)
    if kind == "iid_custom":
        fn = M.CUSTOM_SAMPLERS[p["name"]]
        return M.sample_iid_custom(n, lambda g, k: fn(g, k, d), stream)
    if kind == "rotation":
        if p["maps"] == "identity":
            return M.sample_rotation_sequence(n, M.identity_map, M.identity_map, stream, d=1)
        return M.sample_rotation_sequence(n, rng=stream, d=d)
    if kind == "renewal_mixing":
        return M.sample_renewal_mixing(n, d, float(p["rho_mix"]), stream)
    raise ConfigError(f"sampler {kind!r} does not produce sample pairs")


def atoms_for(cfg: ExperimentConfig, n: int) -> np.ndarray:
    """The fixed atoms x_1..x_N (N = atoms_factor * n) used for a given n."""
    N = int(cfg.sampler.params["atoms_factor"]) * n
    return RngStream(cfg.seed).split(_ATOM_KEY, n).generator().random((N, cfg.dimension))


def _w1(mu: DiscreteMeasure, nu: DiscreteMeasure, metric: str) -> float:
    """W1 in unit-cube units; torus runs go through [0, pi]^d and divide by pi."""
    if mu.dim == 1:
        # monotone coupling is optimal on the line, and the torus metric
        # coincides with |x - y| on [0, pi]
        return w1_1d(mu.points[:, 0], nu.points[:, 0])
    if metric == "torus":
        return w1_exact(mu.to_half_torus(), nu.to_half_torus(), "torus").value / math.pi
    return w1_exact(mu, nu, "euclidean").value


def subset_vs_average_w1(atoms: np.ndarray, tau: np.ndarray, metric: str = "euclidean") -> float:
    """W1(mu_tau, mu) for N = k n atoms, via a matching of tau against its complement.

    mu_tau - mu = (1/N) [(k-1) sum_{tau} delta - sum_{tau^c} delta], so the
    distance is (k-1)/k times the matching cost between tau (each atom
    repeated k-1 times) and the complement.
    """
    N, n = atoms.shape[0], tau.size
    k = N // n
    mask = np.zeros(N, dtype=bool)
    mask[tau] = True
    inside = np.repeat(atoms[mask], k - 1, axis=0)
    outside = atoms[~mask]
    return (k - 1) / k * _w1(DiscreteMeasure(inside), DiscreteMeasure(outside), metric)


def _t_for(cfg: ExperimentConfig, n: int):
    kind, val = _parse_t_policy(cfg.t_policy)
    if kind == "half_inv_n":
        return 1.0 / (2 * n)
    return val


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    start = time.perf_counter()
    stream = RngStream(cfg.seed).split(_TRIAL_KEY, n, trial)
    if cfg.comparison == "two_samples":
        mu, nu = _draw_pair(cfg, n, stream)
        w1 = _w1(mu, nu, cfg.metric)
    else:
        atoms = atoms_for(cfg, n)
        tau = M.random_subset(atoms.shape[0], n, stream)
        mu, nu = DiscreteMeasure(atoms[tau]), DiscreteMeasure(atoms)
        w1 = subset_vs_average_w1(atoms, tau, cfg.metric)

    bound = t_used = lower = None
    if cfg.compute_bounds:
        t_spec = _t_for(cfg, n)
        X, Y = mu.to_half_torus(), nu.to_half_torus()
        if isinstance(t_spec, list):
            t_used, rep = optimize_t(X, Y, t_spec)
        else:
            t_used, rep = t_spec, prop2_bound(X, Y, t_spec)
        bound = rep.total / math.pi
    if cfg.compute_lower:
        if cfg.comparison == "sample_vs_atom_average":
            lower = dist_to_sample_discrete(mu, nu).value
        elif cfg.dimension == 1:
            lower = lower_1d_statistic(mu.points[:, 0], nu.points[:, 0]).value
        else:
            lower = mean_shift_statistic(mu, nu).value
    wall = (time.perf_counter() - start) * 1e3 if cfg.record_timing else None
    rec = TrialRecord(n, trial, w1, bound, t_used, lower, wall)
    rec.check_sandwich()
    return rec


def _trial_task(args):
    cfg_dict, n, trial = args
    return run_trial(ExperimentConfig.from_dict(cfg_dict), n, trial)


# -- aggregation -------------------------------------------------------------

def paper_bound(cfg: ExperimentConfig, n: int) -> float:
    """The explicit published-constant bound matching the experiment's setting."""
    d = cfg.dimension
    if cfg.comparison == "sample_vs_atom_average":
        return subset_constants(n, d)
    if cfg.sampler.kind == "renewal_mixing":
        delta = math.sqrt(mixing_delta_sq(n, M.mixing_alpha_sum(cfg.sampler.params["rho_mix"])))
        return quantitative_bound(delta, d) if delta <= 2.0 else math.inf
    return akt_upper_constants(n, d)


def aggregate(cfg: ExperimentConfig, records: Sequence[TrialRecord]) -> list[AggregateRow]:
    rows = []
    for n in cfg.n_values:
        vals = np.array([r.w1 for r in records if r.n == n])
        if vals.size == 0:
            continue
        bounds = [r.bound_total for r in records if r.n == n and r.bound_total is not None]
        mean = math.fsum(vals) / vals.size
        se = float(np.std(vals, ddof=1) / math.sqrt(vals.size)) if vals.size > 1 else 0.0
        pb = paper_bound(cfg, n)
        rows.append(AggregateRow(n, mean, se, float(vals.min()), float(vals.max()),
                                 math.fsum(bounds) / len(bounds) if bounds else None, pb, mean <= pb))
    return rows


def run_experiment(cfg: ExperimentConfig, jobs: int = 1):
    """All trials for every n, in (n, trial) order, plus per-n aggregates.

    Each trial owns the RNG stream (seed, n, trial), so serial and parallel
    runs give identical records.
    """
    tasks = [(n, k) for n in cfg.n_values for k in range(cfg.trials)]
    if jobs <= 1:
        records = [run_trial(cfg, n, k) for n, k in tasks]
    else:
        payload = [(cfg.to_dict(), n, k) for n, k in tasks]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_trial_task, payload, chunksize=max(1, len(tasks) // (4 * jobs))))
    return records, aggregate(cfg, records)


# -- rate fits ---------------------------------------------------------------

@dataclass(frozen=True)
class RateFit:
    """mean ~ C n^-beta (power) or C sqrt(log n / n) (sqrtlog)."""

    model: str
    C: float
    beta: float | None
    r2: float
    residuals: tuple[float, ...]
    mse_relative: float
    beta_fixed: bool = False

    def predict(self, n):
        n = np.asarray(n, dtype=float)
        if self.model == "power":
            return self.C * n ** (-self.beta)
        return self.C * np.sqrt(np.log(n) / n)


def _points(rows) -> tuple[np.ndarray, np.ndarray]:
    pairs = [(r.n, r.mean) if isinstance(r, AggregateRow) else (r[0], r[1]) for r in rows]
    n = np.array([p[0] for p in pairs], dtype=float)
    y = np.array([p[1] for p in pairs], dtype=float)
    return n, y


def _log_r2(y, pred) -> float:
    ly, lp = np.log(y), np.log(pred)
    ss_res = float(np.sum((ly - lp) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return min(1.0, max(0.0, 1.0 - ss_res / ss_tot))


def _scale_fit(y, g) -> float:
    # argmin_C sum (1 - C g/y)^2
    q = g / y
    return float(np.sum(q) / np.sum(q * q))


def fit_rate(rows, model: str = "power", beta: float | None = None) -> RateFit:
    """Fit a rate model to (n, mean) pairs or AggregateRows.

    power: least squares of log mean on log n; with ``beta`` given only C is
    fitted (minimizing squared relative residuals, like sqrtlog).
    Residuals are relative: (mean - fitted) / mean.
    """
    n, y = _points(rows)
    if np.unique(n).size < 3:
        raise ValueError("need at least 3 distinct n values")
    if np.any(y <= 0) or np.any(n < 2):
        raise ValueError("means must be positive and n >= 2")
    if model == "power" and beta is None:
        slope, intercept = np.polyfit(np.log(n), np.log(y), 1)
        C, b, fixed = float(math.exp(intercept)), float(-slope), False
    elif model == "power":
        b, fixed = float(beta), True
        C = _scale_fit(y, n ** (-b))
    elif model == "sqrtlog":
        b, fixed = None, False
        C = _scale_fit(y, np.sqrt(np.log(n) / n))
    else:
        raise ValueError(f"unknown model {model!r}")
    fit = RateFit(model, C, b, 0.0, (), 0.0, fixed)
    pred = fit.predict(n)
    rel = (y - pred) / y
    return dataclasses.replace(fit, r2=_log_r2(y, pred), residuals=tuple(float(r) for r in rel),
                               mse_relative=float(np.mean(rel**2)))


# -- emission ----------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _json_val(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v) if math.isfinite(v) else None
    if isinstance(v, (tuple, list)):
        return [_json_val(x) for x in v]
    return v


def _trial_row(r: TrialRecord):
    return [r.n, r.trial, r.w1, r.bound_total, r.t, r.lower, r.wall_ms]


def _agg_row(a: AggregateRow):
    return [a.n, a.mean, a.stderr, a.min, a.max, a.bound_mean, a.paper_bound, a.passed]


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def trials_csv(records: Sequence[TrialRecord]) -> str:
    return _csv_text(TRIAL_COLUMNS, [_trial_row(r) for r in records])


def aggregates_csv(rows: Sequence[AggregateRow]) -> str:
    return _csv_text(AGGREGATE_COLUMNS, [_agg_row(a) for a in rows])


def sidecar_paths(path) -> tuple[Path, Path]:
    """Where CSV emission puts the aggregate table and the fit."""
    p = Path(path)
    stem = p.with_suffix("") if p.suffix else p
    return Path(f"{stem}.aggregate.csv"), Path(f"{stem}.fit.json")


def results_json(records, aggregates, fit: RateFit | None = None, config: ExperimentConfig | None = None) -> str:
    doc = {
        "config": config.to_dict() if config else None,
        "records": [dict(zip(TRIAL_COLUMNS, map(_json_val, _trial_row(r)))) for r in records],
        "aggregates": [dict(zip(AGGREGATE_COLUMNS, map(_json_val, _agg_row(a)))) for a in aggregates],
        "fit": {k: _json_val(v) for k, v in dataclasses.asdict(fit).items()} if fit else None,
    }
    return json.dumps(doc, indent=2) + "\n"


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_results(records, aggregates, fit: RateFit | None, fmt: str, path, config=None) -> list[Path]:
    """Serialize results; returns the files written.

    csv: trials at ``path``, aggregates at ``<stem>.aggregate.csv`` and the
    fit (if any) at ``<stem>.fit.json``. json: one document at ``path``.
    """
    path = Path(path)
    if fmt == "json":
        _write(path, results_json(records, aggregates, fit, config))
        return [path]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    agg_path, fit_path = sidecar_paths(path)
    _write(path, trials_csv(records))
    _write(agg_path, aggregates_csv(aggregates))
    written = [path, agg_path]
    if fit is not None:
        _write(fit_path, json.dumps({k: _json_val(v) for k, v in dataclasses.asdict(fit).items()}, indent=2) + "\n")
        written.append(fit_path)
    return written


def read_aggregates_csv(path) -> list[tuple[int, float]]:
    """(n, mean) pairs from an aggregate CSV, or computed from a trials CSV."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no rows")
    if "mean" in rows[0]:
        return [(int(r["n"]), float(r["mean"])) for r in rows]
    if "w1" in rows[0]:
        by_n: dict[int, list[float]] = {}
        for r in rows:
            by_n.setdefault(int(r["n"]), []).append(float(r["w1"]))
        return [(n, math.fsum(v) / len(v)) for n, v in sorted(by_n.items())]
    raise ValueError(f"{path}: expected an aggregate or trials CSV")


def read_trials_csv(path) -> list[TrialRecord]:
    def opt(s):
        return float(s) if s != "" else None

    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRIAL_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        return [TrialRecord(int(r[0]), int(r[1]), float(r[2]), opt(r[3]), opt(r[4]), opt(r[5]), opt(r[6]))
                for r in reader]
