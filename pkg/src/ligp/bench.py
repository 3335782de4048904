# SPDX-FileCopyrightText: Copyright (c) 2025 The ligp authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Benchmarks
Synthetic test functions (Herbie's tooth, borehole), error metrics, CSV
ingestion and the experiment runner behind `ligp bench`.
"""

import json
import logging
import math
import re
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from . import gp_core, local_design
from .gp_core import Domain, KernelConfig
from .predictor import PredictConfig, SiteResult, predict_sites, prescale
from .system_info import get_host_info
from .timing import PhaseTimer, TimingSummary

logger = logging.getLogger(__name__)

PROBLEMS = ("herbie", "borehole", "csv")
HERBIE_DOMAIN = Domain(np.array([-2.0, -2.0]), np.array([2.0, 2.0]))

# (name, low, high) in natural units
BOREHOLE_RANGES = (
    ("r_w", 0.05, 0.15),
    ("r", 100.0, 5000.0),
    ("T_u", 63070.0, 115600.0),
    ("T_l", 63.1, 116.0),
    ("H_u", 990.0, 1100.0),
    ("H_l", 700.0, 820.0),
    ("L", 1120.0, 1680.0),
    ("K_w", 9855.0, 12045.0),
)


class CsvParseError(ValueError):
    def __init__(self, path, row: int, column: int, value: str):
        self.row = row
        self.column = column
        super().__init__(f"{path}: row {row}, column {column}: non-numeric value {value!r}")


def herbie_w(x):
    x = np.asarray(x, dtype=float)
    return (
        np.exp(-((x - 1.0) ** 2))
        + np.exp(-0.8 * (x + 1.0) ** 2)
        - 0.05 * np.sin(8.0 * (x + 0.1))
    )


def herbies_tooth(x):
    """-w(x1) w(x2) for a 2-vector, or row-wise for an N x 2 matrix."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return float(-herbie_w(x[0]) * herbie_w(x[1]))
    return -herbie_w(x[:, 0]) * herbie_w(x[:, 1])


def borehole(x):
    """
    Borehole water flow in natural units, columns ordered as BOREHOLE_RANGES.

    Raises:
        ValueError: any r <= r_w
    """
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[1] != 8:
        raise ValueError(f"borehole takes 8 inputs, got {x.shape[1]}")
    rw, r, tu, tl, hu, hl, ell, kw = x.T
    if np.any(r <= rw):
        raise ValueError("borehole requires r > r_w")
    log_ratio = np.log(r / rw)
    flow = 2.0 * math.pi * tu * (hu - hl) / (
        log_ratio * (1.0 + 2.0 * ell * tu / (log_ratio * rw**2 * kw) + tu / tl)
    )
    return float(flow[0]) if single else flow


def _ranges_array(ranges) -> np.ndarray:
    return np.array([(lo, hi) for *_, lo, hi in ranges], dtype=float)


def unit_scale(x_natural, ranges=BOREHOLE_RANGES) -> np.ndarray:
    r = _ranges_array(ranges)
    return (np.asarray(x_natural, dtype=float) - r[:, 0]) / (r[:, 1] - r[:, 0])


def unit_unscale(x_unit, ranges=BOREHOLE_RANGES) -> np.ndarray:
    r = _ranges_array(ranges)
    return r[:, 0] + np.asarray(x_unit, dtype=float) * (r[:, 1] - r[:, 0])


def _pair(pred, truth):
    pred = np.asarray(pred, dtype=float).ravel()
    truth = np.asarray(truth, dtype=float).ravel()
    if pred.shape != truth.shape:
        raise ValueError(f"length mismatch: {pred.shape[0]} predictions, {truth.shape[0]} truths")
    return pred, truth


def rmse(pred, truth) -> float:
    pred, truth = _pair(pred, truth)
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def rmspe(pred, truth) -> float:
    """Root mean squared percentage error."""
    pred, truth = _pair(pred, truth)
    if np.any(truth == 0):
        raise ValueError("rmspe undefined for zero truth values")
    return float(np.sqrt(np.mean(((pred - truth) / truth) ** 2)) * 100.0)


def interval90(values) -> Tuple[float, float]:
    """Empirical 5% and 95% quantiles."""
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return math.nan, math.nan
    lo, hi = np.quantile(values, [0.05, 0.95])
    return float(lo), float(hi)


def _read_table(path) -> Tuple[np.ndarray, Optional[List[str]]]:
    raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False, skipinitialspace=True)
    if raw.empty:
        raise ValueError(f"{path}: no rows")
    first = pd.to_numeric(raw.iloc[0].str.strip(), errors="coerce")
    has_header = bool(first.isna().any())
    names = [str(v).strip() for v in raw.iloc[0]] if has_header else None
    body = raw.iloc[1:] if has_header else raw
    offset = 2 if has_header else 1

    values = body.apply(lambda col: pd.to_numeric(col.str.strip(), errors="coerce"))
    bad = values.isna().to_numpy()
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise CsvParseError(path, int(i) + offset, int(j) + 1, body.iat[i, j])
    return values.to_numpy(dtype=float), names


def _response_index(path, response_column, ncol: int, names) -> int:
    if isinstance(response_column, str) and not response_column.lstrip("-").isdigit():
        if names is None or response_column not in names:
            raise ValueError(f"{path}: no column named '{response_column}'")
        return names.index(response_column)
    col = int(response_column)
    if not -ncol <= col < ncol:
        raise ValueError(f"{path}: response column {col} out of range for {ncol} columns")
    return col % ncol


def load_csv(path, response_column: Union[int, str] = -1) -> Tuple[np.ndarray, np.ndarray]:
    """
    Read a numeric table; the first row is treated as a header if any of its
    cells is non-numeric.

    Args:
        path: CSV file
        response_column: 0-based position (negative counts from the end) or header name

    Returns:
        (X, Y) with X holding the remaining columns in file order
    """
    data, names = _read_table(path)
    col = _response_index(path, response_column, data.shape[1], names)
    return np.delete(data, col, axis=1), data[:, col]


def load_inputs(path, d: int, response_column: Union[int, str] = -1) -> np.ndarray:
    """Read test inputs: d columns as-is, or d + 1 columns with the response dropped."""
    data, names = _read_table(path)
    ncol = data.shape[1]
    if ncol == d:
        return data
    if ncol == d + 1:
        return np.delete(data, _response_index(path, response_column, ncol, names), axis=1)
    raise ValueError(f"{path}: {ncol} columns, expected {d} inputs or {d + 1} with the response")


def write_csv(
    path, X, Y=None, names: Optional[Sequence[str]] = None, response_name: str = "y"
) -> Path:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    names = list(names) if names else [f"x{j + 1}" for j in range(X.shape[1])]
    frame = pd.DataFrame(X, columns=names)
    if Y is not None:
        frame[response_name] = np.asarray(Y, dtype=float).ravel()
    frame.to_csv(path, index=False, float_format="%.17g")
    return Path(path)


def herbie_design(N: int, seed=None) -> np.ndarray:
    """Half regular grid, half LHS over [-2, 2]^2."""
    side = int(math.floor(math.sqrt(N / 2.0)))
    axis = np.linspace(-2.0, 2.0, max(side, 1))
    grid = np.array(np.meshgrid(axis, axis)).reshape(2, -1).T if side >= 2 else np.zeros((0, 2))
    rest = N - grid.shape[0]
    fill = -2.0 + 4.0 * local_design.lhs(rest, 2, seed) if rest > 0 else np.zeros((0, 2))
    return np.vstack([grid, fill])


def herbie_slice(count: int = 99, x2: float = 0.6) -> np.ndarray:
    x1 = np.linspace(-2.0, 2.0, count)
    return np.column_stack([x1, np.full(count, x2)])


def borehole_design(N: int, seed=None) -> Tuple[np.ndarray, np.ndarray]:
    """Unit-cube LHS and borehole responses at the corresponding natural inputs."""
    X = local_design.lhs(N, len(BOREHOLE_RANGES), seed)
    return X, borehole(unit_unscale(X))


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str
    N: int = 1000
    N_prime: int = 100
    replicates: int = 1
    configs: Tuple[PredictConfig, ...] = ()
    seed: int = 42
    csv_path: Optional[str] = None
    response_column: Union[int, str] = -1
    prescale: bool = True
    subset_size: int = 1000
    folds: int = 10

    def __post_init__(self):
        if self.problem not in PROBLEMS:
            raise ValueError(f"unknown problem '{self.problem}', expected one of {PROBLEMS}")
        if self.problem == "csv" and not self.csv_path:
            raise ValueError("csv problem needs csv_path")
        if self.replicates < 1:
            raise ValueError(f"replicates must be >= 1, got {self.replicates}")
        if self.problem != "csv" and self.N_prime < 1:
            raise ValueError(f"N_prime must be >= 1, got {self.N_prime}")
        object.__setattr__(self, "configs", tuple(self.configs))
        if self.problem != "csv":
            for c in self.configs:
                need = c.m if c.method == "gip-lhs" else c.n
                if need > self.N:
                    raise ValueError(f"config {c.label} needs {need} training points, N={self.N}")


@dataclass
class ConfigReport:
    label: str
    method: str
    m: int
    n: int
    rmse: float = math.nan
    rmspe: float = math.nan
    rmse_interval: Tuple[float, float] = (math.nan, math.nan)
    rmspe_interval: Tuple[float, float] = (math.nan, math.nan)
    rmse_values: List[float] = field(default_factory=list)
    rmspe_values: List[float] = field(default_factory=list)
    failed_sites: List[int] = field(default_factory=list)
    timings: Dict[str, float] = field(default_factory=dict)
    site_stats: Dict[str, Dict[str, float]] = field(default_factory=dict)
    error: Optional[str] = None

    def finalize(self):
        self.rmse = _mean(self.rmse_values)
        self.rmspe = _mean(self.rmspe_values)
        self.rmse_interval = interval90(self.rmse_values)
        self.rmspe_interval = interval90(self.rmspe_values)


def _mean(values) -> float:
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    return float(values.mean()) if values.size else math.nan


@dataclass
class MetricReport:
    problem: str
    configs: List[ConfigReport] = field(default_factory=list)
    host: Dict = field(default_factory=dict)
    settings: Dict = field(default_factory=dict)

    @property
    def rmse(self) -> Dict[str, float]:
        return {c.label: c.rmse for c in self.configs}

    @property
    def failed(self) -> List[str]:
        return [c.label for c in self.configs if c.error]

    def to_dict(self, timings: bool = False) -> Dict:
        configs = []
        for c in self.configs:
            entry = asdict(c)
            if not timings:
                entry.pop("timings")
                entry.pop("site_stats")
            configs.append(entry)
        out = {
            "problem": self.problem,
            "settings": self.settings,
            "rmse": self.rmse,
            "configs": configs,
        }
        if timings:
            out["host"] = self.host
        return out


def _replicate_data(spec: ExperimentSpec, rng: np.random.Generator, csv_data, rep: int):
    if spec.problem == "herbie":
        X = herbie_design(spec.N, rng)
        Xt = -2.0 + 4.0 * local_design.lhs(spec.N_prime, 2, rng)
        return X, herbies_tooth(X), Xt, herbies_tooth(Xt), HERBIE_DOMAIN
    if spec.problem == "borehole":
        X, Y = borehole_design(spec.N, rng)
        Xt, Yt = borehole_design(spec.N_prime, rng)
        return X, Y, Xt, Yt, Domain.cube(len(BOREHOLE_RANGES))
    X_all, Y_all, folds = csv_data
    test = folds[rep % len(folds)]
    train = np.setdiff1d(np.arange(X_all.shape[0]), test)
    X, Y, Xt, Yt = X_all[train], Y_all[train], X_all[test], Y_all[test]
    return X, Y, Xt, Yt, Domain.enclosing(X, Xt)


def run_experiment(spec: ExperimentSpec, invalid: Optional[Dict[str, str]] = None) -> MetricReport:
    """
    Run every config on every replicate and aggregate metrics.

    Args:
        spec: Experiment description
        invalid: Configs rejected before the run (label -> message), reported as failed

    Returns:
        MetricReport with per-replicate values, means and 90% intervals
    """
    report = MetricReport(
        problem=spec.problem,
        host=get_host_info(),
        settings={
            "N": spec.N,
            "N_prime": spec.N_prime,
            "replicates": spec.replicates,
            "seed": spec.seed,
            "prescale": spec.prescale,
        },
    )
    entries = {c.label: ConfigReport(c.label, c.method, c.m, c.n) for c in spec.configs}
    summaries = {c.label: TimingSummary() for c in spec.configs}
    site_summaries = {c.label: TimingSummary() for c in spec.configs}

    csv_data = None
    if spec.problem == "csv":
        X_all, Y_all = load_csv(spec.csv_path, spec.response_column)
        perm = np.random.default_rng(spec.seed).permutation(X_all.shape[0])
        folds = np.array_split(perm, min(spec.folds, X_all.shape[0]))
        csv_data = (X_all, Y_all, [np.sort(f) for f in folds])
        report.settings.update(N=int(X_all.shape[0]), folds=len(folds))

    streams = np.random.SeedSequence(spec.seed).spawn(spec.replicates)
    for rep, stream in enumerate(streams):
        rng = np.random.default_rng(stream)
        X, Y, Xt, Yt, domain = _replicate_data(spec, rng, csv_data, rep)
        if spec.prescale:
            scaled = prescale(X, Y, spec.subset_size, seed=rng, domain=domain)
            X, Xt, domain = scaled.x_scaled, scaled.transform(Xt), scaled.scaled_domain()
        logger.info(f"Replicate {rep + 1}/{spec.replicates}: N={X.shape[0]}, N'={Xt.shape[0]}")

        for config in spec.configs:
            entry = entries[config.label]
            try:
                batch = PhaseTimer()
                results = predict_sites(config, Xt, X, Y, domain, batch_timer=batch)
            except Exception as e:
                logger.error(f"Config {config.label} failed on replicate {rep + 1}: {e}")
                entry.error = f"{type(e).__name__}: {e}"
                continue
            ok = np.array([r.ok for r in results])
            if not ok.any():
                entry.error = results[0].error if results else "no sites"
                continue
            entry.failed_sites.append(int((~ok).sum()))
            means = np.array([r.moments.mean for r in results])
            entry.rmse_values.append(rmse(means[ok], Yt[ok]))
            try:
                entry.rmspe_values.append(rmspe(means[ok], Yt[ok]))
            except ValueError:
                entry.rmspe_values.append(math.nan)
            totals = batch.as_dict()
            for r in results:
                for phase, seconds in r.timings.items():
                    totals[phase] = totals.get(phase, 0.0) + seconds
            summaries[config.label].record(totals)
            site_summaries[config.label].extend(r.timings for r in results)

    for label, entry in entries.items():
        entry.finalize()
        entry.timings = {k: v / spec.replicates for k, v in summaries[label].totals().items()}
        sites = site_summaries[label]
        entry.site_stats = {phase: sites.get_stats(phase) for phase in sites.samples}
        report.configs.append(entry)
    for label, message in (invalid or {}).items():
        report.configs.append(ConfigReport(label, "", 0, 0, error=message))
    return report


def _safe_name(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", label).strip("_") or "config"


def write_report(report: MetricReport, out_dir) -> Path:
    """
    report.json holds metrics only (reproducible at fixed seeds); timings.json
    carries wall-clock timings and host metadata; one CSV of per-replicate
    values per config.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2, default=float) + "\n")
    timing_doc = {
        "host": report.host,
        "timings": {c.label: c.timings for c in report.configs},
        "per_site": {c.label: c.site_stats for c in report.configs},
    }
    (out / "timings.json").write_text(json.dumps(timing_doc, indent=2) + "\n")
    for c in report.configs:
        if c.error and not c.rmse_values:
            continue
        pd.DataFrame(
            {
                "replicate": np.arange(1, len(c.rmse_values) + 1),
                "rmse": c.rmse_values,
                "rmspe": c.rmspe_values,
            }
        ).to_csv(out / f"{_safe_name(c.label)}.csv", index=False, float_format="%.17g")
    logger.info(f"💾 Report written to {out}")
    return out


def slice_table(results: Sequence[SiteResult], sites, truth, label: str = "") -> pd.DataFrame:
    """Plot-ready slice curve: site coordinates, truth, predictive mean/variance and error."""
    sites = np.atleast_2d(np.asarray(sites, dtype=float))
    frame = pd.DataFrame(sites, columns=[f"x{j + 1}" for j in range(sites.shape[1])])
    frame["truth"] = np.asarray(truth, dtype=float)
    frame["mean"] = [r.moments.mean for r in results]
    frame["variance"] = [r.moments.variance for r in results]
    frame["abs_error"] = np.abs(frame["mean"] - frame["truth"])
    frame["method"] = label
    return frame


@dataclass
class SliceStudy:
    table: pd.DataFrame
    rmse: Dict[str, float]
    seconds: Dict[str, float]


def run_slice_study(
    configs: Sequence[PredictConfig],
    N: int = 40000,
    count: int = 99,
    x2: float = 0.6,
    seed: int = 42,
) -> SliceStudy:
    """Herbie's tooth predictions along the x2 slice for each config."""
    rng = np.random.default_rng(seed)
    X = herbie_design(N, rng)
    Y = herbies_tooth(X)
    sites = herbie_slice(count, x2)
    truth = herbies_tooth(sites)
    tables, scores, seconds = [], {}, {}
    for config in configs:
        start = time.perf_counter()
        results = predict_sites(config, sites, X, Y, HERBIE_DOMAIN)
        seconds[config.label] = time.perf_counter() - start
        table = slice_table(results, sites, truth, config.label)
        valid = np.array([r.ok for r in results])
        scores[config.label] = (
            rmse(table["mean"][valid], table["truth"][valid]) if valid.any() else math.nan
        )
        tables.append(table)
        logger.info(
            f"Slice {config.label}: RMSE={scores[config.label]:.3e} "
            f"in {seconds[config.label]:.1f}s"
        )
    return SliceStudy(pd.concat(tables, ignore_index=True), scores, seconds)


def run_grid_study(
    problem: str,
    m_values: Sequence[int],
    n_values: Sequence[int],
    N: int = 10000,
    N_prime: int = 1000,
    seed: int = 42,
    workers: int = 1,
) -> pd.DataFrame:
    """RMSE over (m, n) pairs with m <= n using the qnorm template."""
    spec = ExperimentSpec(problem=problem, N=N, N_prime=N_prime, seed=seed)
    rng = np.random.default_rng(seed)
    X, Y, Xt, Yt, domain = _replicate_data(spec, rng, None, 0)
    scaled = prescale(X, Y, seed=rng, domain=domain)
    X, Xt, domain = scaled.x_scaled, scaled.transform(Xt), scaled.scaled_domain()
    rows = []
    for n in n_values:
        for m in m_values:
            if m > n or m < 2:
                continue
            config = PredictConfig(method="ligp-qnorm", m=m, n=n, workers=workers, seed=seed)
            start = time.perf_counter()
            results = predict_sites(config, Xt, X, Y, domain)
            elapsed = time.perf_counter() - start
            ok = np.array([r.ok for r in results])
            means = np.array([r.moments.mean for r in results])
            score = rmse(means[ok], Yt[ok]) if ok.any() else math.nan
            rows.append({"m": m, "n": n, "rmse": score, "seconds": elapsed})
            logger.info(f"Grid m={m} n={n}: RMSE={score:.4g}")
    return pd.DataFrame(rows, columns=["m", "n", "rmse", "seconds"])


@dataclass
class GlobalPath:
    table: pd.DataFrame
    full_gp_rmse: float
    theta: float


def global_alc_path(
    N: int = 100,
    M0: int = 5,
    M_max: int = 85,
    N_prime: int = 200,
    seed: int = 42,
    criterion: str = "alc",
    grid_size: int = 21,
    g: float = 1e-6,
) -> GlobalPath:
    """
    RMSE of a global induced GP on Herbie's tooth as inducing points are added
    greedily, against the full GP at the same fixed theta.
    """
    rng = np.random.default_rng(seed)
    X = -2.0 + 4.0 * local_design.lhs(N, 2, rng)
    Y = herbies_tooth(X)
    Xt = -2.0 + 4.0 * local_design.lhs(N_prime, 2, rng)
    Yt = herbies_tooth(Xt)

    theta0 = local_design.theta0_quantile(X)
    fit = gp_core.full_gp_mle(X, Y, theta0, (theta0 / 100.0, theta0 * 100.0), g)
    theta = fit.theta_hat
    full_means, _ = gp_core.full_gp_fit(X, Y, theta, g).predict_many(Xt)
    full_rmse = rmse(full_means, Yt)

    axis = np.linspace(-2.0, 2.0, grid_size)
    candidates = np.array(np.meshgrid(axis, axis)).reshape(2, -1).T
    path = local_design.greedy_global_design(
        criterion, M_max, X, Y, HERBIE_DOMAIN, theta, g, candidates, ref_set=Xt, M0=M0, seed=rng
    )
    config = KernelConfig(theta=theta, g=g)
    rows = []
    for size, design in path:
        state = gp_core.build_state(X, Y, design, config)
        means, _ = gp_core.predict_many(state, Xt)
        rows.append({"M": size, "rmse": rmse(means, Yt)})
    logger.info(f"Global {criterion} path: M {M0}..{path.sizes[-1]}, full GP RMSE={full_rmse:.4g}")
    return GlobalPath(pd.DataFrame(rows, columns=["M", "rmse"]), full_rmse, theta)
