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
Validation Suites
Randomized oracle checks of the closed forms: wIMSE against tensor quadrature,
its gradient against central differences, Woodbury algebra against dense
covariances, sequential updates against rebuilds and the full-GP reduction.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from . import criteria, gp_core
from .gp_core import Domain, InducedState, KernelConfig

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    max_error: float
    tolerance: float
    instances: int
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.max_error) and self.max_error < self.tolerance)


def _rel(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def random_instance(rng: np.random.Generator, d: int, m: int, n: int, config: KernelConfig = None):
    """
    Neighborhood, inducing set, site and candidate inside [0, 1]^d.

    Returns:
        (state, domain, x_star, x_cand)
    """
    domain = Domain.cube(d)
    x_n = rng.random((n, d))
    y_n = np.sin(3.0 * x_n).sum(axis=1) + 0.1 * rng.standard_normal(n)
    x_star = 0.2 + 0.6 * rng.random(d)
    x_bar = np.vstack([x_star, rng.random((m - 1, d))]) if m > 1 else x_star[None, :]
    if config is None:
        config = KernelConfig(theta=float(rng.uniform(0.01, 0.1)))
    state = gp_core.build_state(x_n, y_n, x_bar, config)
    return state, domain, x_star, rng.random(d)


def gauss_legendre_grid(domain: Domain, per_dim: int, panels: int) -> Tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on the domain's tensor grid."""
    base_x, base_w = leggauss(per_dim)
    axes, weights = [], []
    for a, b in zip(domain.lower, domain.upper):
        edges = np.linspace(a, b, panels + 1)
        half = np.diff(edges) / 2.0
        mid = (edges[:-1] + edges[1:]) / 2.0
        axes.append((mid[:, None] + half[:, None] * base_x).ravel())
        weights.append((half[:, None] * base_w).ravel())
    mesh = np.meshgrid(*axes, indexing="ij")
    wmesh = np.meshgrid(*weights, indexing="ij")
    nodes = np.column_stack([g.ravel() for g in mesh])
    w = np.prod(np.column_stack([g.ravel() for g in wmesh]), axis=1)
    return nodes, w


def quadrature_wimse(
    augmented: InducedState, x_star, domain: Domain, weighted: bool = True
) -> float:
    """Integral of k(x, x*) (or 1) times the de-scaled variance of the augmented state."""
    d = domain.d
    panels = {1: 50, 2: 16, 3: 12}.get(d, 4)
    nodes, w = gauss_legendre_grid(domain, 8, panels)
    values = gp_core.variance_factor(augmented, nodes)
    if weighted:
        values = values * gp_core.cross_kernel_matrix(nodes, x_star, augmented.config.theta)[:, 0]
    return float(np.dot(w, values))


def dense_reference(state: InducedState, X) -> Dict[str, np.ndarray]:
    """Moments and likelihood from the explicit n x n covariance diag(Omega) + k_nm K^-1 k_mn."""
    cfg = state.config
    k_m = gp_core.cross_kernel_matrix(state.x_bar, state.x_bar, cfg.theta)
    k_m = k_m + cfg.eps_k * np.eye(state.m)
    k_m_inv = np.linalg.inv(k_m)
    sigma = state.k_nm @ k_m_inv @ state.k_nm.T + np.diag(state.omega_n)
    sigma_inv = np.linalg.inv(sigma)
    y = state.y_n
    n = state.n
    nu = float(y @ sigma_inv @ y) / n
    k_star = gp_core.cross_kernel_matrix(X, state.x_bar, cfg.theta)
    c = k_star @ k_m_inv @ state.k_nm.T
    mean = c @ sigma_inv @ y
    var = nu * (1.0 + cfg.g - np.sum((c @ sigma_inv) * c, axis=1))
    _, logdet = np.linalg.slogdet(sigma)
    nll = 0.5 * (n * np.log(n * nu) + logdet)
    return {"mean": mean, "variance": var, "nu_hat": nu, "nll": nll}


def _quadrature_suite(rng, count: int) -> float:
    worst = 0.0
    for i in range(count):
        d = (1, 2, 3)[i % 3]
        m = int(rng.integers(1, 11))
        n = int(rng.integers(max(m + 1, 10), 101))
        state, domain, x_star, x_cand = random_instance(rng, d, m, n)
        closed = criteria.wimse(x_cand, state, domain, x_star)
        augmented, _ = gp_core.update_add_inducing(state, x_cand)
        worst = max(worst, _rel(closed, quadrature_wimse(augmented, x_star, domain)))
    return worst


def _gradient_suite(rng, count: int, h: float = 1e-6) -> float:
    worst = 0.0
    for i in range(count):
        d = (1, 2, 4)[i % 3]
        m = int(rng.integers(2, 9))
        n = int(rng.integers(20, 61))
        state, domain, x_star, x_cand = random_instance(rng, d, m, n)
        grad = criteria.wimse_grad(x_cand, state, domain, x_star)
        fd = np.empty(d)
        for k in range(d):
            step = np.zeros(d)
            step[k] = h
            fd[k] = (
                criteria.wimse(x_cand + step, state, domain, x_star)
                - criteria.wimse(x_cand - step, state, domain, x_star)
            ) / (2.0 * h)
        floor = 1e-3 * max(float(np.max(np.abs(fd))), 1e-12)
        worst = max(worst, float(np.max(np.abs(grad - fd) / np.maximum(np.abs(fd), floor))))
    return worst


def _woodbury_suite(rng, count: int) -> float:
    worst = 0.0
    for _ in range(count):
        d = int(rng.integers(2, 4))
        m = int(rng.integers(2, 21))
        n = int(rng.integers(m + 5, 201))
        config = KernelConfig(theta=float(rng.uniform(0.01, 0.05)), g=1e-4)
        state, _, _, _ = random_instance(rng, d, m, n, config)
        X = rng.random((5, d))
        dense = dense_reference(state, X)
        mean, var = gp_core.predict_many(state, X)
        worst = max(
            worst,
            _rel(mean, dense["mean"]),
            _rel(var, dense["variance"]),
            _rel(state.nu_hat, dense["nu_hat"]),
            _rel(gp_core.neg_conc_loglik(state), dense["nll"]),
        )
    return worst


def _update_suite(rng, count: int) -> float:
    worst = 0.0
    for _ in range(count):
        d = int(rng.integers(2, 4))
        m = int(rng.integers(1, 10))
        n = int(rng.integers(m + 10, 80))
        config = KernelConfig(theta=float(rng.uniform(0.005, 0.02)), g=1e-4)
        state, _, _, x_cand = random_instance(rng, d, m, n, config)
        updated, _ = gp_core.update_add_inducing(state, x_cand)
        rebuilt = gp_core.build_state(
            state.x_n, state.y_n, np.vstack([state.x_bar, x_cand]), config
        )
        X = rng.random((5, d))
        mu_u, var_u = gp_core.predict_many(updated, X)
        mu_r, var_r = gp_core.predict_many(rebuilt, X)
        worst = max(
            worst,
            _rel(updated.alpha, rebuilt.alpha),
            _rel(updated.omega_n, rebuilt.omega_n),
            _rel(updated.nu_hat, rebuilt.nu_hat),
            _rel(mu_u, mu_r),
            _rel(var_u, var_r),
        )
    return worst


def _reduction_suite(rng, count: int) -> float:
    worst = 0.0
    for _ in range(count):
        d = int(rng.integers(1, 4))
        n = int(rng.integers(5, 21))
        x_n = np.sort(rng.random((n, d)), axis=0) if d == 1 else rng.random((n, d))
        y_n = np.cos(4.0 * x_n).sum(axis=1)
        spacing = float(np.min(np.diff(np.sort(x_n[:, 0])))) if d == 1 else 0.1
        theta = max(min(0.01, spacing**2), 1e-4)
        config = KernelConfig(theta=theta, g=1e-3, eps_k=1e-10, eps_q=1e-10)
        state = gp_core.build_state(x_n, y_n, x_n, config)
        full = gp_core.full_gp_fit(x_n, y_n, theta, config.g)
        X = rng.random((5, d))
        mu, var = gp_core.predict_many(state, X)
        mu_f, var_f = full.predict_many(X)
        if np.all(np.abs(mu_f) > 1e-3):
            worst = max(worst, _rel(mu, mu_f))
        else:
            worst = max(worst, float(np.max(np.abs(mu - mu_f))))
        worst = max(worst, _rel(var, var_f))
    return worst


SUITES: Dict[str, Tuple[Callable, float, int, int]] = {
    # name: (runner, tolerance, full count, quick count)
    "quadrature": (_quadrature_suite, 1e-5, 100, 12),
    "gradient": (_gradient_suite, 1e-4, 50, 9),
    "woodbury": (_woodbury_suite, 1e-7, 20, 5),
    "update": (_update_suite, 1e-8, 20, 5),
    "reduction": (_reduction_suite, 1e-6, 20, 5),
}


def run_suites(quick: bool = False, seed: int = 42, names=None) -> List[SuiteResult]:
    """Run the named suites (all by default) and return their worst errors."""
    results = []
    for name, (runner, tolerance, full, short) in SUITES.items():
        if names and name not in names:
            continue
        count = short if quick else full
        rng = np.random.default_rng([seed, len(name)])
        start = time.perf_counter()
        try:
            worst = runner(rng, count)
        except Exception as e:
            logger.error(f"Suite {name} raised: {e}")
            worst = float("inf")
        result = SuiteResult(name, worst, tolerance, count, time.perf_counter() - start)
        status = "✅" if result.passed else "❌"
        logger.info(
            f"{status} {name}: max error {worst:.3e} "
            f"(tolerance {tolerance:.0e}, {count} instances)"
        )
        results.append(result)
    return results
