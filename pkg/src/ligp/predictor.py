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
Prediction Pipeline
Per-site locally induced GP prediction over many testing locations, global
input pre-scaling, the nearest-neighbor and ALC data-subset comparators, and a
single global inducing-point GP.
"""

import hashlib
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from scipy.linalg import LinAlgError, cho_solve, cholesky
from scipy.optimize import minimize
from scipy.spatial.distance import pdist, squareform

from . import criteria, gp_core, local_design
from .gp_core import Domain, KernelConfig, PredictiveMoments
from .timing import PhaseTimer

try:
    from joblib import Parallel, delayed

    JOBLIB_AVAILABLE = True
except ImportError:
    JOBLIB_AVAILABLE = False

logger = logging.getLogger(__name__)

LIGP_METHODS = ("ligp-wimse-bespoke", "ligp-wimse-template", "ligp-chr", "ligp-qnorm")
LAGP_METHODS = ("lagp-nn", "lagp-alc")
GLOBAL_METHODS = ("gip-lhs",)
METHODS = LIGP_METHODS + LAGP_METHODS + GLOBAL_METHODS
THETA_RANGE = 100.0


def parse_theta_mode(value) -> Optional[float]:
    """'mle' -> None; 'fixed:<v>' or a number -> v."""
    if value is None:
        return None
    if isinstance(value, (int, float)):
        theta = float(value)
    else:
        text = str(value).strip().lower()
        if text == "mle":
            return None
        if text.startswith("fixed:"):
            text = text.split(":", 1)[1]
        try:
            theta = float(text)
        except ValueError:
            raise ValueError(f"theta must be 'mle' or 'fixed:<value>', got '{value}'") from None
    if not theta > 0:
        raise ValueError(f"fixed theta must be positive, got {theta}")
    return theta


@dataclass(frozen=True)
class PredictConfig:
    method: str = "ligp-qnorm"
    m: int = 10
    n: int = 100
    theta_mode: str = "mle"
    g: float = 1e-6
    workers: int = 1
    seed: int = 42
    n_starts: int = 20
    tol: float = 0.01
    fixed_sfd: bool = True
    lagp_n0: int = 1
    lagp_cand_factor: int = 100
    eps_k: float = 1e-6
    eps_q: float = 1e-5
    label: str = ""

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method '{self.method}', expected one of {METHODS}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.method in LIGP_METHODS and self.m > self.n:
            raise ValueError(f"m ({self.m}) must not exceed n ({self.n}) for {self.method}")
        if self.method in ("ligp-chr", "ligp-qnorm") and self.m < 2:
            raise ValueError(f"{self.method} needs m >= 2")
        if self.method == "lagp-alc" and not 1 <= self.lagp_n0 < self.n:
            raise ValueError(f"lagp-alc needs 1 <= n0 < n, got n0={self.lagp_n0}, n={self.n}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if not self.g >= 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")
        parse_theta_mode(self.theta_mode)
        if not self.label:
            object.__setattr__(self, "label", f"{self.method}(m={self.m},n={self.n})")

    @property
    def theta_fixed(self) -> Optional[float]:
        return parse_theta_mode(self.theta_mode)

    def kernel_config(self, theta: float) -> KernelConfig:
        return KernelConfig(theta=theta, g=self.g, eps_k=self.eps_k, eps_q=self.eps_q)


@dataclass
class SiteResult:
    """Prediction at one testing site"""

    moments: PredictiveMoments
    theta_hat: float
    nu_hat: float
    timings: Dict[str, float] = field(default_factory=dict)
    neighbors: Optional[np.ndarray] = None
    error: Optional[str] = None

    @property
    def elapsed(self) -> float:
        return sum(self.timings.values())

    @property
    def ok(self) -> bool:
        return self.error is None


def _failed(message: str, timings: Dict[str, float]) -> SiteResult:
    return SiteResult(
        moments=PredictiveMoments(math.nan, math.nan),
        theta_hat=math.nan,
        nu_hat=math.nan,
        timings=timings,
        error=message,
    )


@dataclass(frozen=True)
class ScaledDesign:
    x_scaled: np.ndarray
    y: np.ndarray
    scale_lengths: np.ndarray
    original_bounds: Domain

    @classmethod
    def from_lengths(cls, X_N, Y_N, scale_lengths, original_bounds: Domain) -> "ScaledDesign":
        """Apply known lengthscales, e.g. the ones a saved template was built under."""
        scale = np.asarray(scale_lengths, dtype=float).ravel()
        X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
        if scale.shape != (X_N.shape[1],):
            raise ValueError(f"{scale.shape[0]} scale lengths for d={X_N.shape[1]} inputs")
        return cls(
            x_scaled=X_N / np.sqrt(scale),
            y=np.asarray(Y_N, dtype=float).ravel().copy(),
            scale_lengths=scale,
            original_bounds=original_bounds,
        )

    @property
    def factors(self) -> np.ndarray:
        return np.sqrt(self.scale_lengths)

    def transform(self, X) -> np.ndarray:
        return np.atleast_2d(np.asarray(X, dtype=float)) / self.factors

    def scaled_domain(self) -> Domain:
        return self.original_bounds.scaled(self.factors)


def _separable_nll(log_theta, d2, y, g):
    """Concentrated negative log-likelihood of a separable SE GP and its log-theta gradient."""
    theta = np.exp(log_theta)
    n = y.shape[0]
    k0 = np.exp(-np.tensordot(1.0 / theta, d2, axes=1))
    k = k0 + g * np.eye(n)
    try:
        chol = cholesky(k, lower=True, check_finite=False)
    except LinAlgError:
        return 1e300, np.zeros_like(log_theta)
    a = cho_solve((chol, True), y, check_finite=False)
    quad = float(y @ a)
    if quad <= 0:
        return 1e300, np.zeros_like(log_theta)
    k_inv = cho_solve((chol, True), np.eye(n), check_finite=False)
    value = 0.5 * n * math.log(quad) + float(np.sum(np.log(np.diag(chol))))
    grad = np.empty_like(log_theta)
    for j in range(theta.shape[0]):
        dk = k0 * d2[j] / theta[j]
        grad[j] = -0.5 * n * float(a @ dk @ a) / quad + 0.5 * float(np.sum(k_inv * dk))
    return value, grad


def prescale(
    X_N,
    Y_N,
    subset_size: int = 1000,
    seed=None,
    g: float = 1e-6,
    domain: Optional[Domain] = None,
) -> ScaledDesign:
    """
    Divide inputs by square roots of separable lengthscales fitted by MLE on a
    random subset. Falls back to identity scaling if the fit fails.
    """
    X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
    Y_N = np.asarray(Y_N, dtype=float).ravel()
    N, d = X_N.shape
    if subset_size > N:
        logger.debug(f"subset_size {subset_size} exceeds N={N}; using all rows")
        subset_size = N
    rng = np.random.default_rng(seed)
    if subset_size < N:
        rows = np.sort(rng.choice(N, size=subset_size, replace=False))
    else:
        rows = np.arange(N)
    xs = X_N[rows]
    ys = Y_N[rows] - Y_N[rows].mean()
    bounds = domain if domain is not None else Domain.enclosing(X_N)

    scale = np.ones(d)
    try:
        d2 = np.stack([squareform(pdist(xs[:, [j]], "sqeuclidean")) for j in range(d)])
        spread = pdist(xs, "sqeuclidean")
        spread = spread[spread > 0]
        if spread.size == 0:
            raise ValueError("subset has no spread")
        theta0 = float(np.quantile(spread, 0.1))
        hi = 100.0 * float(spread.max())
        lo = 1e-3 * theta0
        res = minimize(
            _separable_nll,
            np.full(d, math.log(theta0)),
            args=(d2, ys, g),
            jac=True,
            method="L-BFGS-B",
            bounds=[(math.log(lo), math.log(hi))] * d,
        )
        if not np.all(np.isfinite(res.x)) or res.fun >= 1e299:
            raise ValueError(f"separable MLE failed: {res.message}")
        if not res.success:
            logger.warning(f"Separable MLE not converged ({res.message}); using best iterate")
        scale = np.exp(res.x)
        logger.info(f"Pre-scaling lengthscales: {np.array2string(scale, precision=4)}")
    except Exception as e:
        logger.warning(f"Pre-scaling failed ({e}); using identity scaling")
        scale = np.ones(d)

    return ScaledDesign.from_lengths(X_N, Y_N, scale, bounds)


def site_seed(base: int, x_star: np.ndarray) -> int:
    """Seed tied to the site's coordinates, so results do not depend on batch composition."""
    digest = hashlib.sha256(np.ascontiguousarray(x_star, dtype=float).tobytes()).digest()
    words = np.frombuffer(digest[:16], dtype=np.uint32).tolist()
    return int(np.random.SeedSequence([int(base) & 0xFFFFFFFF, *words]).generate_state(1)[0])


@dataclass(frozen=True)
class SharedContext:
    """Read-only objects shared by every site of a batch"""

    index: local_design.NeighborIndex
    domain: Domain
    template: Optional[local_design.Template] = None


def _theta_bounds(theta0: float):
    return theta0 / THETA_RANGE, theta0 * THETA_RANGE


def _ligp_site(config: PredictConfig, x_star: np.ndarray, ctx: SharedContext) -> SiteResult:
    timer = PhaseTimer()
    try:
        with timer.phase("neighborhood"):
            nbhd = ctx.index.query(x_star, config.n)
        seed = config.seed if config.fixed_sfd else site_seed(config.seed, x_star)
        with timer.phase("design"):
            if config.method == "ligp-wimse-bespoke":
                inducing, _ = local_design.greedy_wimse_design(
                    config.m,
                    config.n,
                    x_star,
                    None,
                    None,
                    ctx.domain,
                    seed=site_seed(config.seed, x_star),
                    neighborhood=nbhd,
                    n_starts=config.n_starts,
                    tol=config.tol,
                    g=config.g,
                )
            elif config.method == "ligp-wimse-template":
                inducing, _ = local_design.displace_template(
                    ctx.template, x_star, None, None, config.n, neighborhood=nbhd
                )
            elif config.method == "ligp-chr":
                inducing, _ = local_design.chr_template(
                    config.m, config.n, x_star, None, None, seed=seed, neighborhood=nbhd
                )
            else:
                inducing, _ = local_design.qnorm_template(
                    config.m, config.n, x_star, None, None, seed=seed, neighborhood=nbhd
                )

        theta = config.theta_fixed
        with timer.phase("mle"):
            if theta is None:
                if config.method == "ligp-qnorm":
                    theta0 = local_design.theta0_gauss(nbhd.x_n, x_star)
                else:
                    theta0 = local_design.theta0_quantile(nbhd.x_n)
                fit = gp_core.mle_theta(
                    nbhd.x_n,
                    nbhd.y_n,
                    inducing,
                    theta0,
                    _theta_bounds(theta0),
                    config.kernel_config(theta0),
                )
                theta = fit.theta_hat
        with timer.phase("predict"):
            state = gp_core.build_state(nbhd.x_n, nbhd.y_n, inducing, config.kernel_config(theta))
            moments = gp_core.predict(state, x_star)
        return SiteResult(moments, theta, state.nu_hat, timer.as_dict(), neighbors=nbhd.indices)
    except Exception as e:
        logger.error(f"Site {x_star} failed ({config.method}): {e}")
        return _failed(f"{type(e).__name__}: {e}", timer.as_dict())


def _dense_fit(config: PredictConfig, x_n, y_n, theta0: float, timer: PhaseTimer) -> gp_core.FullGP:
    theta = config.theta_fixed
    with timer.phase("mle"):
        if theta is None:
            theta = gp_core.full_gp_mle(x_n, y_n, theta0, _theta_bounds(theta0), config.g).theta_hat
    with timer.phase("predict"):
        return gp_core.full_gp_fit(x_n, y_n, theta, config.g)


def _lagp_nn_site(config: PredictConfig, x_star: np.ndarray, ctx: SharedContext) -> SiteResult:
    timer = PhaseTimer()
    try:
        with timer.phase("neighborhood"):
            nbhd = ctx.index.query(x_star, config.n)
        theta0 = local_design.theta0_quantile(nbhd.x_n)
        fit = _dense_fit(config, nbhd.x_n, nbhd.y_n, theta0, timer)
        with timer.phase("predict"):
            moments = fit.predict(x_star)
        return SiteResult(moments, fit.theta, fit.nu_hat, timer.as_dict(), neighbors=nbhd.indices)
    except Exception as e:
        logger.error(f"Site {x_star} failed (lagp-nn): {e}")
        return _failed(f"{type(e).__name__}: {e}", timer.as_dict())


def alc_select(
    candidates: local_design.Neighborhood, x_star, n0: int, n: int, theta: float, g: float
):
    """
    Greedy ALC neighborhood: start from the n0 nearest candidates and add the
    candidate with the largest reduction in v(x*) until n are selected.

    Returns:
        Positions into the candidate neighborhood, in selection order
    """
    n = min(n, candidates.n)
    chosen = list(range(n0))
    fit = gp_core.FullGP(candidates.x_n[:n0], candidates.y_n[:n0], theta, g)
    remaining = np.ones(candidates.n, dtype=bool)
    remaining[:n0] = False
    while len(chosen) < n:
        pool = np.flatnonzero(remaining)
        deltas = criteria.lagp_alc_deltas(candidates.x_n[pool], fit, x_star)
        pick = int(pool[int(np.argmax(deltas))])
        fit = fit.extend(candidates.x_n[pick], candidates.y_n[pick])
        chosen.append(pick)
        remaining[pick] = False
    return np.array(chosen, dtype=int)


def _lagp_alc_site(config: PredictConfig, x_star: np.ndarray, ctx: SharedContext) -> SiteResult:
    timer = PhaseTimer()
    try:
        with timer.phase("neighborhood"):
            n_cand = min(ctx.index.N, config.lagp_cand_factor * config.n)
            cand = ctx.index.query(x_star, n_cand)
        theta0 = local_design.theta0_quantile(cand.x_n[: config.n])
        with timer.phase("design"):
            picks = alc_select(cand, x_star, config.lagp_n0, config.n, theta0, config.g)
        x_n, y_n = cand.x_n[picks], cand.y_n[picks]
        fit = _dense_fit(config, x_n, y_n, theta0, timer)
        with timer.phase("predict"):
            moments = fit.predict(x_star)
        return SiteResult(
            moments, fit.theta, fit.nu_hat, timer.as_dict(), neighbors=cand.indices[picks]
        )
    except Exception as e:
        logger.error(f"Site {x_star} failed (lagp-alc): {e}")
        return _failed(f"{type(e).__name__}: {e}", timer.as_dict())


_SITE_RUNNERS = {
    "lagp-nn": _lagp_nn_site,
    "lagp-alc": _lagp_alc_site,
}


def _run_chunk(config: PredictConfig, X_chunk: np.ndarray, ctx: SharedContext) -> List[SiteResult]:
    runner = _SITE_RUNNERS.get(config.method, _ligp_site)
    return [runner(config, x, ctx) for x in X_chunk]


def _run_batch(config: PredictConfig, X_star: np.ndarray, ctx: SharedContext) -> List[SiteResult]:
    workers = min(config.workers, max(1, X_star.shape[0]))
    if workers > 1 and not JOBLIB_AVAILABLE:
        logger.warning("joblib not available; running sites serially")
        workers = 1
    if workers == 1:
        return _run_chunk(config, X_star, ctx)
    chunks = np.array_split(X_star, workers * 4)
    parts = Parallel(n_jobs=workers)(delayed(_run_chunk)(config, c, ctx) for c in chunks if len(c))
    return [r for part in parts for r in part]


def _prepare(X_star, X_N, Y_N, domain):
    X_star = np.atleast_2d(np.asarray(X_star, dtype=float))
    X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
    Y_N = np.asarray(Y_N, dtype=float).ravel()
    if X_star.shape[1] != X_N.shape[1]:
        raise ValueError(f"X_star has d={X_star.shape[1]}, X_N has d={X_N.shape[1]}")
    if domain is None:
        domain = Domain.enclosing(X_N, X_star)
    return X_star, X_N, Y_N, domain


def ligp_predict(
    config: PredictConfig,
    X_star,
    X_N,
    Y_N,
    domain: Optional[Domain] = None,
    template: Optional[local_design.Template] = None,
    index: Optional[local_design.NeighborIndex] = None,
    batch_timer: Optional[PhaseTimer] = None,
) -> List[SiteResult]:
    """
    Locally induced GP prediction at every row of X_star.

    Template methods build their template once (unless one is passed in);
    every site then gets its neighborhood, inducing set, theta_hat, nu_hat and
    moments. Output order matches input order; failures are recorded per site.

    Args:
        config: Method and sizes
        X_star: Testing sites
        X_N: Training inputs
        Y_N: Training responses
        domain: Study region (defaults to the box enclosing X_N and X_star)
        template: Prebuilt template for ligp-wimse-template
        index: Prebuilt NeighborIndex over X_N
        batch_timer: Receives the one-off index and template build times

    Returns:
        One SiteResult per row of X_star
    """
    if config.method not in LIGP_METHODS:
        raise ValueError(f"ligp_predict handles {LIGP_METHODS}, got '{config.method}'")
    X_star, X_N, Y_N, domain = _prepare(X_star, X_N, Y_N, domain)
    if template is not None and template.d != X_N.shape[1]:
        raise ValueError(f"template has d={template.d}, training inputs have d={X_N.shape[1]}")
    if config.n > X_N.shape[0]:
        raise ValueError(f"n={config.n} exceeds N={X_N.shape[0]}")
    batch_timer = batch_timer if batch_timer is not None else PhaseTimer()
    with batch_timer.phase("index"):
        if index is None:
            index = local_design.NeighborIndex(X_N, Y_N)
    if config.method == "ligp-wimse-template" and template is None:
        with batch_timer.phase("template"):
            template = local_design.build_wimse_template(
                config.m,
                config.n,
                X_N,
                Y_N,
                domain,
                seed=config.seed,
                index=index,
                n_starts=config.n_starts,
                tol=config.tol,
                g=config.g,
            )
    start = time.perf_counter()
    shared = SharedContext(index=index, domain=domain, template=template)
    results = _run_batch(config, X_star, shared)
    failed = sum(not r.ok for r in results)
    logger.info(
        f"✅ {config.label}: {len(results)} sites in {time.perf_counter() - start:.2f}s"
        + (f" ({failed} failed)" if failed else "")
    )
    return results


def lagp_nn_predict(
    n: int,
    X_star,
    X_N,
    Y_N,
    theta_mode="mle",
    g: float = 1e-6,
    workers: int = 1,
    index=None,
) -> List[SiteResult]:
    """Dense local GP on the n nearest neighbors of each site."""
    config = PredictConfig(method="lagp-nn", m=1, n=n, theta_mode=theta_mode, g=g, workers=workers)
    X_star, X_N, Y_N, domain = _prepare(X_star, X_N, Y_N, None)
    if n > X_N.shape[0]:
        raise ValueError(f"n={n} exceeds N={X_N.shape[0]}")
    index = index or local_design.NeighborIndex(X_N, Y_N)
    return _run_batch(config, X_star, SharedContext(index=index, domain=domain))


def lagp_alc_predict(
    n0: int,
    n: int,
    X_star,
    X_N,
    Y_N,
    theta_mode="mle",
    g: float = 1e-6,
    workers: int = 1,
    cand_factor: int = 100,
    index=None,
) -> List[SiteResult]:
    """Dense local GP on a greedy ALC neighborhood grown from the n0 nearest points."""
    config = PredictConfig(
        method="lagp-alc", m=1, n=n, theta_mode=theta_mode, g=g, workers=workers,
        lagp_n0=n0, lagp_cand_factor=cand_factor,
    )
    X_star, X_N, Y_N, domain = _prepare(X_star, X_N, Y_N, None)
    if n > X_N.shape[0]:
        raise ValueError(f"n={n} exceeds N={X_N.shape[0]}")
    index = index or local_design.NeighborIndex(X_N, Y_N)
    return _run_batch(config, X_star, SharedContext(index=index, domain=domain))


def global_inducing_predict(
    X_star, X_N, Y_N, inducing, theta: float, g: float = 1e-6, kernel: Optional[KernelConfig] = None
):
    """
    One induced GP over all of X_N with a fixed inducing set and theta.

    Returns:
        (means, variances, nu_hat)
    """
    kernel = kernel.with_theta(theta) if kernel is not None else KernelConfig(theta=theta, g=g)
    state = gp_core.build_state(X_N, Y_N, inducing, kernel)
    means, variances = gp_core.predict_many(state, X_star)
    return means, variances, state.nu_hat


def _gip_lhs(config: PredictConfig, X_star, X_N, Y_N, domain: Domain) -> List[SiteResult]:
    timer = PhaseTimer()
    try:
        with timer.phase("design"):
            inducing = domain.lower + local_design.lhs(config.m, domain.d, config.seed) * (
                domain.upper - domain.lower
            )
        theta = config.theta_fixed
        with timer.phase("mle"):
            if theta is None:
                rng = np.random.default_rng(config.seed)
                size = min(X_N.shape[0], 1000)
                rows = np.sort(rng.choice(X_N.shape[0], size=size, replace=False))
                theta0 = local_design.theta0_quantile(X_N[rows])
                fit = gp_core.mle_theta(
                    X_N[rows],
                    Y_N[rows],
                    inducing,
                    theta0,
                    _theta_bounds(theta0),
                    config.kernel_config(theta0),
                )
                theta = fit.theta_hat
        with timer.phase("predict"):
            means, variances, nu = global_inducing_predict(
                X_star, X_N, Y_N, inducing, theta, kernel=config.kernel_config(theta)
            )
    except Exception as e:
        logger.error(f"Global inducing-point GP failed: {e}")
        return [_failed(f"{type(e).__name__}: {e}", {}) for _ in range(X_star.shape[0])]
    per_site = {k: v / max(1, X_star.shape[0]) for k, v in timer.as_dict().items()}
    return [
        SiteResult(PredictiveMoments(float(mu), float(var)), theta, nu, dict(per_site))
        for mu, var in zip(means, variances)
    ]


def predict_sites(
    config: PredictConfig,
    X_star,
    X_N,
    Y_N,
    domain: Optional[Domain] = None,
    template: Optional[local_design.Template] = None,
    batch_timer: Optional[PhaseTimer] = None,
) -> List[SiteResult]:
    """Dispatch any configured method."""
    if config.method in LIGP_METHODS:
        return ligp_predict(
            config, X_star, X_N, Y_N, domain, template=template, batch_timer=batch_timer
        )
    X_star, X_N, Y_N, domain = _prepare(X_star, X_N, Y_N, domain)
    if config.method == "gip-lhs":
        return _gip_lhs(config, X_star, X_N, Y_N, domain)
    batch_timer = batch_timer if batch_timer is not None else PhaseTimer()
    with batch_timer.phase("index"):
        index = local_design.NeighborIndex(X_N, Y_N)
    if config.method == "lagp-nn":
        return lagp_nn_predict(
            config.n, X_star, X_N, Y_N, config.theta_mode, config.g, config.workers, index
        )
    return lagp_alc_predict(
        config.lagp_n0, config.n, X_star, X_N, Y_N, config.theta_mode, config.g,
        config.workers, config.lagp_cand_factor, index,
    )


def results_frame(results: Sequence[SiteResult], X_star, timings: bool = True) -> pd.DataFrame:
    """Tabular records: site coordinates, moments, theta_hat, nu_hat, phase timings and errors."""
    X_star = np.atleast_2d(np.asarray(X_star, dtype=float))
    frame = pd.DataFrame(X_star, columns=[f"x{j + 1}" for j in range(X_star.shape[1])])
    frame["mean"] = [r.moments.mean for r in results]
    frame["variance"] = [r.moments.variance for r in results]
    frame["theta_hat"] = [r.theta_hat for r in results]
    frame["nu_hat"] = [r.nu_hat for r in results]
    if timings:
        phases = sorted({p for r in results for p in r.timings})
        for phase in phases:
            frame[f"t_{phase}"] = [r.timings.get(phase, 0.0) for r in results]
    frame["error"] = [r.error or "" for r in results]
    return frame
