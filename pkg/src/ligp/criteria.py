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
Design Criteria
Closed-form weighted and unweighted integrated variance for inducing-point
selection, the wIMSE gradient, reference-set ALC and the partitioned ALC
reduction used by the data-subset comparator.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from scipy.special import erf, erfc

from .gp_core import (
    DegenerateUpdateError,
    Domain,
    FullGP,
    InducedState,
    cross_kernel_matrix,
    update_add_inducing,
    variance_factor,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WimseWorkspace:
    w_star: np.ndarray
    factors: np.ndarray  # (d, m+1, m+1) per-dimension W* factors
    erf_const: float
    iota: np.ndarray  # (d, m+1, m+1)


@dataclass(frozen=True)
class GlobalImseWorkspace:
    E: float
    w: np.ndarray


def _erf_diff(u, v):
    """erf(u) - erf(v) without cancellation when both arguments share a sign."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = erf(u) - erf(v)
    pos = (u > 0) & (v > 0)
    neg = (u < 0) & (v < 0)
    out = np.where(pos, erfc(v) - erfc(u), out)
    out = np.where(neg, erfc(-u) - erfc(-v), out)
    return out


def _check_site(x_star: np.ndarray, domain: Domain):
    if x_star.shape[0] != domain.d:
        raise ValueError(f"x_star has d={x_star.shape[0]}, domain has d={domain.d}")
    if not domain.contains(x_star):
        raise ValueError(f"x_star {x_star} lies outside the domain")


def _weighted_factors(x_bar: np.ndarray, x_star: np.ndarray, theta: float, domain: Domain):
    """Per-dimension factors of W*: shape (d, m, m), plus the iota cache."""
    xi = x_bar.T[:, :, None]
    xj = x_bar.T[:, None, :]
    xs = x_star[:, None, None]
    a = domain.lower[:, None, None]
    b = domain.upper[:, None, None]
    expo = (2.0 / (3.0 * theta)) * (xi * xs + xj * xs + xi * xj - xs**2 - xi**2 - xj**2)
    iota = xs + xi + xj
    root = math.sqrt(3.0 * theta)
    factors = (
        math.sqrt(math.pi * theta / 12.0)
        * np.exp(expo)
        * _erf_diff((iota - 3.0 * a) / root, (iota - 3.0 * b) / root)
    )
    return factors, iota


def w_entry(xbar_i, xbar_j, x_star, theta: float, domain: Domain) -> float:
    """One entry of W*: integral over the domain of k(x, x*) k(x, xbar_i) k(x, xbar_j)."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")
    pair = np.vstack([np.asarray(xbar_i, dtype=float), np.asarray(xbar_j, dtype=float)])
    factors, _ = _weighted_factors(pair, np.asarray(x_star, dtype=float).ravel(), theta, domain)
    return float(np.prod(factors[:, 0, 1]))


def weighted_volume(x_star: np.ndarray, theta: float, g: float, domain: Domain) -> float:
    """(1+g) times the integral of k(x, x*) over the domain."""
    root = math.sqrt(theta)
    per_dim = (math.sqrt(math.pi * theta) / 2.0) * _erf_diff(
        (x_star - domain.lower) / root, (x_star - domain.upper) / root
    )
    return (1.0 + g) * float(np.prod(per_dim))


def wimse_workspace(
    x_bar: np.ndarray, x_star, theta: float, g: float, domain: Domain
) -> WimseWorkspace:
    x_star = np.asarray(x_star, dtype=float).ravel()
    factors, iota = _weighted_factors(np.asarray(x_bar, dtype=float), x_star, theta, domain)
    return WimseWorkspace(
        w_star=np.prod(factors, axis=0),
        factors=factors,
        erf_const=weighted_volume(x_star, theta, g, domain),
        iota=iota,
    )


def global_imse_workspace(
    x_bar: np.ndarray, theta: float, g: float, domain: Domain
) -> GlobalImseWorkspace:
    x_bar = np.asarray(x_bar, dtype=float)
    xi = x_bar.T[:, :, None]
    xj = x_bar.T[:, None, :]
    a = domain.lower[:, None, None]
    b = domain.upper[:, None, None]
    root = math.sqrt(2.0 * theta)
    factors = (
        math.sqrt(math.pi * theta / 8.0)
        * np.exp(-((xi - xj) ** 2) / (2.0 * theta))
        * _erf_diff((2.0 * b - xi - xj) / root, (2.0 * a - xi - xj) / root)
    )
    return GlobalImseWorkspace(E=(1.0 + g) * domain.volume(), w=np.prod(factors, axis=0))


def _trace_gap(state: InducedState, w: np.ndarray) -> float:
    """tr{(K^-1 - Q^-1) W}"""
    kw = cho_solve((state.k_m_chol, True), w, check_finite=False)
    qw = cho_solve((state.q_m_chol, True), w, check_finite=False)
    return float(np.trace(kw) - np.trace(qw))


def _augment(state: InducedState, x_cand: np.ndarray):
    try:
        augmented, _ = update_add_inducing(state, x_cand)
    except DegenerateUpdateError as e:
        logger.debug(f"Candidate {x_cand} rejected: {e}")
        return None
    return augmented


def wimse(x_cand, state: InducedState, domain: Domain, x_star) -> float:
    """
    Weighted integrated variance after adding x_cand to the inducing set.

    Args:
        x_cand: Candidate inducing point
        state: Current induced GP state
        domain: Integration region
        x_star: Prediction site, center of the weight kernel

    Returns:
        wIMSE value, or +inf for a degenerate candidate
    """
    x_cand = np.asarray(x_cand, dtype=float).ravel()
    x_star = np.asarray(x_star, dtype=float).ravel()
    _check_site(x_star, domain)
    augmented = _augment(state, x_cand)
    if augmented is None:
        return math.inf
    cfg = state.config
    ws = wimse_workspace(augmented.x_bar, x_star, cfg.theta, cfg.g, domain)
    return ws.erf_const - _trace_gap(augmented, ws.w_star)


def _factor_slope(x_other, c, x_star, theta, lower, upper):
    """Derivative of one W* factor with respect to its second inducing argument c."""
    cross = x_other * x_star + c * x_star + x_other * c
    expo = (2.0 / (3.0 * theta)) * (cross - x_star**2 - x_other**2 - c**2)
    iota = x_star + x_other + c
    root = math.sqrt(3.0 * theta)
    za = (iota - 3.0 * lower) / root
    zb = (iota - 3.0 * upper) / root
    slope = (2.0 / (3.0 * theta)) * (x_star + x_other - 2.0 * c) * _erf_diff(za, zb)
    slope = slope + (2.0 / math.sqrt(3.0 * math.pi * theta)) * (np.exp(-(za**2)) - np.exp(-(zb**2)))
    return math.sqrt(math.pi * theta / 12.0) * np.exp(expo) * slope


def wimse_grad(x_cand, state: InducedState, domain: Domain, x_star) -> np.ndarray:
    """
    Analytic gradient of wimse with respect to the candidate's coordinates.

    Only the last row and column of K, W* and the cross covariances depend on
    the candidate, so every trace reduces to sums over that row.
    """
    x_cand = np.asarray(x_cand, dtype=float).ravel()
    x_star = np.asarray(x_star, dtype=float).ravel()
    _check_site(x_star, domain)
    augmented = _augment(state, x_cand)
    if augmented is None:
        return np.full(x_cand.shape[0], np.nan)

    cfg = augmented.config
    theta = cfg.theta
    x_bar = augmented.x_bar
    x_n = augmented.x_n
    k_nm = augmented.k_nm
    omega = augmented.omega_n
    m1 = x_bar.shape[0]
    last = m1 - 1
    d = x_bar.shape[1]
    kc = (augmented.k_m_chol, True)
    qc = (augmented.q_m_chol, True)

    ws = wimse_workspace(x_bar, x_star, theta, cfg.g, domain)
    w = ws.w_star
    r = cho_solve(kc, cho_solve(kc, w).T)  # K^-1 W K^-1
    p = cho_solve(qc, cho_solve(qc, w).T)  # Q^-1 W Q^-1
    unit = np.zeros(m1)
    unit[last] = 1.0
    gap_col = cho_solve(kc, unit) - cho_solve(qc, unit)

    b = cho_solve(kc, k_nm.T).T  # k_nm K^-1, n x (m+1)
    b_last = b[:, last]
    kp = k_nm @ p
    kp_last = kp[:, last]
    kpk = np.sum(kp * k_nm, axis=1)
    floor = cfg.g + cfg.eps_k
    active = omega > floor

    k_row = cross_kernel_matrix(x_bar[:last], x_cand, theta)[:, 0]
    k_n = k_nm[:, last]
    grad = np.zeros(d)
    for k in range(d):
        dkm = np.zeros(m1)
        dkm[:last] = k_row * (-2.0 * (x_cand[k] - x_bar[:last, k]) / theta)
        dkn = k_n * (-2.0 * (x_cand[k] - x_n[:, k]) / theta)
        domega = -2.0 * dkn * b_last + 2.0 * b_last * (b @ dkm)
        domega = np.where(active, domega, 0.0)

        tr_k = 2.0 * float(np.dot(dkm, r[:, last]))
        tr_q = (
            2.0 * float(np.dot(dkm, p[:, last]))
            + 2.0 * float(np.dot(dkn / omega, kp_last))
            - float(np.dot(domega / omega**2, kpk))
        )

        others = np.prod(np.delete(ws.factors[:, :, last], k, axis=0), axis=0)
        lo, hi = domain.lower[k], domain.upper[k]
        dw = np.zeros(m1)
        dw[:last] = (
            _factor_slope(x_bar[:last, k], x_cand[k], x_star[k], theta, lo, hi) * others[:last]
        )
        dw[last] = (
            2.0 * _factor_slope(x_cand[k], x_cand[k], x_star[k], theta, lo, hi) * others[last]
        )
        tr_w = 2.0 * float(np.dot(gap_col[:last], dw[:last])) + gap_col[last] * dw[last]

        grad[k] = tr_k - tr_q - tr_w
    return grad


def wimse_surface(state: InducedState, domain: Domain, x_star, grid) -> np.ndarray:
    """wimse at every row of grid (candidates)."""
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    return np.array([wimse(c, state, domain, x_star) for c in grid])


def imse_global(x_cand, state: InducedState, domain: Domain) -> float:
    """Unweighted integrated variance over the domain after adding x_cand."""
    x_cand = np.asarray(x_cand, dtype=float).ravel()
    augmented = _augment(state, x_cand)
    if augmented is None:
        return math.inf
    cfg = state.config
    ws = global_imse_workspace(augmented.x_bar, cfg.theta, cfg.g, domain)
    return ws.E - _trace_gap(augmented, ws.w)


def alc_global(x_cand, state: InducedState, ref_set) -> float:
    """
    Variance reduction summed over a reference set (larger is better).

    Variances are de-scaled by nu so the comparison is free of the
    response-dependent scale estimate.
    """
    ref = np.atleast_2d(np.asarray(ref_set, dtype=float))
    if ref.size == 0:
        raise ValueError("ref_set must be nonempty")
    x_cand = np.asarray(x_cand, dtype=float).ravel()
    augmented = _augment(state, x_cand)
    if augmented is None:
        return -math.inf
    return float(np.sum(variance_factor(state, ref) - variance_factor(augmented, ref)))


def lagp_alc_deltas(candidates, local_fit: FullGP, x_star) -> np.ndarray:
    """
    Reduction in v_n(x*) from adding each candidate row to a dense local fit.

    With the bordered inverse [[G, g], [g', 1/v]] of the augmented covariance,
    g = -K^-1 k(c) / v, the reduction is
    v (k*' g)^2 + 2 (k*' g) k(c, x*) + k(c, x*)^2 / v.
    """
    cand = np.atleast_2d(np.asarray(candidates, dtype=float))
    x_star = np.asarray(x_star, dtype=float).ravel()
    theta = local_fit.theta
    k_cn = cross_kernel_matrix(cand, local_fit.x_n, theta)  # C x n
    k_star = cross_kernel_matrix(local_fit.x_n, x_star, theta)[:, 0]
    k_c_star = cross_kernel_matrix(cand, x_star, theta)[:, 0]
    solved = local_fit.solve(k_cn.T)  # n x C
    v = 1.0 + local_fit.g - np.sum(k_cn.T * solved, axis=0)
    v = np.maximum(v, np.finfo(float).tiny)
    g_dot = -(k_star @ solved) / v
    return v * g_dot**2 + 2.0 * g_dot * k_c_star + k_c_star**2 / v


def lagp_alc_delta(x_cand: int, local_fit: FullGP, x_star, X_N) -> float:
    """
    Reduction for one candidate given by its row index into X_N.

    Raises:
        ValueError: the candidate is already in the local fit
    """
    if local_fit.indices is not None and int(x_cand) in set(local_fit.indices.tolist()):
        raise ValueError(f"candidate {x_cand} is already in the neighborhood")
    X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
    point = X_N[int(x_cand)]
    if local_fit.indices is None and np.any(np.all(local_fit.x_n == point, axis=1)):
        raise ValueError(f"candidate {x_cand} is already in the neighborhood")
    return float(lagp_alc_deltas(point[None, :], local_fit, x_star)[0])
