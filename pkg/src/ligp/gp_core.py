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
Induced GP Core
Squared exponential kernel, diagonal-corrected Nystrom state over a local
neighborhood, Woodbury likelihood/prediction and partitioned updates when an
inducing point is appended.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_solve, cholesky, solve_triangular
from scipy.optimize import minimize, minimize_scalar
from scipy.spatial.distance import cdist

logger = logging.getLogger(__name__)

# Minimum separation (scaled input units) between an added and an existing inducing point
DUPLICATE_TOL = 1e-8


class IllConditionedError(np.linalg.LinAlgError):
    """Cholesky factorization failed even after diagonal jitter"""

    def __init__(self, matrix: str, detail: str = ""):
        self.matrix = matrix
        message = f"{matrix} is not positive definite after jitter"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class DegenerateUpdateError(ValueError):
    """Sequential inducing-point update rejected (non-positive Schur complement)"""

    def __init__(self, quantity: str, value: float):
        self.quantity = quantity
        self.value = value
        super().__init__(f"degenerate update: {quantity}={value:.3e} <= 0")


@dataclass(frozen=True)
class KernelConfig:
    """Lengthscale, nugget and diagonal jitters shared by every covariance evaluation"""

    theta: float
    g: float = 1e-6
    eps_k: float = 1e-6
    eps_q: float = 1e-5

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not self.g >= 0:
            raise ValueError(f"g must be nonnegative, got {self.g}")
        if not (self.eps_k > 0 and self.eps_q > 0):
            raise ValueError(
                f"jitters must be positive, got eps_k={self.eps_k}, eps_q={self.eps_q}"
            )
        if self.eps_q < self.eps_k:
            raise ValueError(f"eps_q ({self.eps_q}) must be >= eps_k ({self.eps_k})")

    def with_theta(self, theta: float) -> "KernelConfig":
        return replace(self, theta=float(theta))


@dataclass(frozen=True)
class Domain:
    """Hyperrectangular study region"""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lower.shape != upper.shape:
            raise ValueError("domain bounds must have matching lengths")
        if np.any(lower >= upper):
            raise ValueError(f"domain requires a_k < b_k for all k, got {lower} and {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_bounds(cls, bounds) -> "Domain":
        """Build from a list of (a_k, b_k) pairs."""
        arr = np.asarray(bounds, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    @classmethod
    def cube(cls, d: int, a: float = 0.0, b: float = 1.0) -> "Domain":
        return cls(np.full(d, a), np.full(d, b))

    @classmethod
    def enclosing(cls, *arrays: np.ndarray, pad: float = 1e-9) -> "Domain":
        """Smallest box around the rows of all arrays, padded so it is never flat."""
        stacked = np.vstack([np.atleast_2d(a) for a in arrays])
        lower = stacked.min(axis=0)
        upper = stacked.max(axis=0)
        width = np.maximum(upper - lower, 1.0)
        return cls(lower - pad * width, upper + pad * width)

    @property
    def d(self) -> int:
        return self.lower.shape[0]

    @property
    def bounds(self) -> list:
        return [(float(a), float(b)) for a, b in zip(self.lower, self.upper)]

    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def scaled(self, factors: np.ndarray) -> "Domain":
        """Divide each coordinate's bounds by a positive factor."""
        return Domain(self.lower / factors, self.upper / factors)


@dataclass(frozen=True)
class PredictiveMoments:
    mean: float
    variance: float


@dataclass(frozen=True)
class InducedState:
    """
    Cached factors for one neighborhood and inducing set.

    k_m_chol factors K_m + eps_k*I and q_m_chol factors
    K_m + k_nm' Omega^-1 k_nm + q_jitter*I, both lower triangular. q_jitter is
    eps_k unless that factorization failed and eps_q was needed; with eps_k the
    Woodbury forms are exact for diag(Omega) + k_nm (K_m + eps_k*I)^-1 k_mn.
    """

    x_n: np.ndarray
    y_n: np.ndarray
    x_bar: np.ndarray
    k_m_chol: np.ndarray
    k_nm: np.ndarray
    omega_n: np.ndarray
    q_m_chol: np.ndarray
    alpha: np.ndarray
    nu_hat: float
    config: KernelConfig
    q_jitter: float

    @property
    def m(self) -> int:
        return self.x_bar.shape[0]

    @property
    def n(self) -> int:
        return self.x_n.shape[0]


@dataclass(frozen=True)
class UpdateWorkspace:
    rho: float
    eta: np.ndarray
    zeta: np.ndarray
    gamma: np.ndarray
    psi: float
    upsilon: float
    xi: np.ndarray


@dataclass(frozen=True)
class ThetaFit:
    """Result of a local lengthscale search"""

    theta_hat: float
    nu_hat: float
    objective: float
    converged: bool
    evaluations: int


def _as_matrix(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d matrix, got shape {arr.shape}")
    return arr


def _check_theta(theta: float):
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")


def _freeze(*arrays: np.ndarray):
    for a in arrays:
        a.setflags(write=False)


def _cholesky(a: np.ndarray, name: str) -> np.ndarray:
    try:
        chol = cholesky(a, lower=True, check_finite=False)
    except LinAlgError as e:
        raise IllConditionedError(name, str(e)) from e
    if not np.all(np.isfinite(chol)) or np.any(np.diag(chol) <= 0):
        raise IllConditionedError(name, "non-positive pivot")
    return chol


def _append_cholesky(chol: np.ndarray, row: np.ndarray, pivot: float) -> np.ndarray:
    """
    Lower factor of [[A, b], [b', c]] given chol(A).

    row is chol(A)^-1 b and pivot is sqrt(c - row'row).
    """
    m = chol.shape[0]
    out = np.zeros((m + 1, m + 1))
    out[:m, :m] = chol
    out[m, :m] = row
    out[m, m] = pivot
    return out


def _logdet(chol: np.ndarray) -> float:
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def kernel(x, z, theta: float) -> float:
    """
    Squared exponential kernel exp(-||x - z||^2 / theta)

    Args:
        x: d-vector
        z: d-vector
        theta: Lengthscale in squared input units

    Returns:
        Correlation in (0, 1]
    """
    _check_theta(theta)
    diff = np.asarray(x, dtype=float) - np.asarray(z, dtype=float)
    return float(np.exp(-np.dot(diff.ravel(), diff.ravel()) / theta))


def cross_kernel_matrix(X, Z, theta: float) -> np.ndarray:
    """Kernel between every row of X (a x d) and every row of Z (b x d)."""
    _check_theta(theta)
    X = _as_matrix(X, "X")
    Z = _as_matrix(Z, "Z")
    if X.shape[1] != Z.shape[1]:
        raise ValueError(f"dimension mismatch: X has d={X.shape[1]}, Z has d={Z.shape[1]}")
    return np.exp(-cdist(X, Z, "sqeuclidean") / theta)


def _omega(k_nm: np.ndarray, k_m_chol: np.ndarray, config: KernelConfig) -> np.ndarray:
    v = solve_triangular(k_m_chol, k_nm.T, lower=True, check_finite=False)
    omega = 1.0 + config.g - np.sum(v * v, axis=0)
    return _clamp_omega(omega, config)


def _clamp_omega(omega: np.ndarray, config: KernelConfig) -> np.ndarray:
    floor = config.g + config.eps_k
    low = omega < floor
    if np.any(low):
        logger.debug(f"Clamped {int(low.sum())} Omega entries to {floor:.1e}")
        omega = np.where(low, floor, omega)
    return omega


def _factor_q(
    k_m: np.ndarray, k_nm: np.ndarray, omega: np.ndarray, jitters
) -> Tuple[np.ndarray, float]:
    """Factor K_m + k_nm' Omega^-1 k_nm, trying each diagonal jitter in turn."""
    q = k_m + (k_nm.T / omega) @ k_nm
    error = None
    for jitter in jitters:
        shifted = q.copy()
        shifted[np.diag_indices_from(shifted)] += jitter
        try:
            return _cholesky(shifted, "Q_m"), float(jitter)
        except IllConditionedError as e:
            logger.debug(f"Q_m failed with jitter {jitter:.1e}: {e}")
            error = e
    raise error


def _q_jitters(config: KernelConfig, current: Optional[float] = None) -> Tuple[float, ...]:
    if current is not None and current > config.eps_k:
        return (config.eps_q,)
    return (config.eps_k, config.eps_q)


def _assemble(x_n, y_n, x_bar, k_m_chol, k_nm, omega, q_m_chol, config, q_jitter) -> InducedState:
    n = x_n.shape[0]
    b = k_nm.T @ (y_n / omega)
    alpha = cho_solve((q_m_chol, True), b, check_finite=False)
    quad = float(np.dot(y_n, y_n / omega) - np.dot(b, alpha))
    if not np.any(y_n):
        logger.warning("Zero response vector in neighborhood; nu_hat set to 0")
        nu = 0.0
    else:
        nu = max(quad, 0.0) / n
    _freeze(x_n, y_n, x_bar, k_m_chol, k_nm, omega, q_m_chol, alpha)
    return InducedState(
        x_n=x_n,
        y_n=y_n,
        x_bar=x_bar,
        k_m_chol=k_m_chol,
        k_nm=k_nm,
        omega_n=omega,
        q_m_chol=q_m_chol,
        alpha=alpha,
        nu_hat=nu,
        config=config,
        q_jitter=q_jitter,
    )


def build_state(x_n, y_n, x_bar, config: KernelConfig) -> InducedState:
    """
    Build the induced GP state for a neighborhood and an inducing set.

    Args:
        x_n: n x d neighborhood inputs
        y_n: n responses
        x_bar: m x d inducing inputs, n >= m >= 1
        config: Kernel configuration

    Returns:
        InducedState with Cholesky factors, Omega, alpha and nu_hat

    Raises:
        IllConditionedError: K_m or Q_m could not be factored
    """
    x_n = _as_matrix(x_n, "x_n").copy()
    x_bar = _as_matrix(x_bar, "x_bar").copy()
    y_n = np.asarray(y_n, dtype=float).ravel().copy()
    n, d = x_n.shape
    m = x_bar.shape[0]
    if y_n.shape[0] != n:
        raise ValueError(f"y_n has {y_n.shape[0]} entries for {n} inputs")
    if x_bar.shape[1] != d:
        raise ValueError(f"x_bar has d={x_bar.shape[1]}, x_n has d={d}")
    if not n >= m >= 1:
        raise ValueError(f"need n >= m >= 1, got n={n}, m={m}")
    if not (np.all(np.isfinite(x_n)) and np.all(np.isfinite(x_bar)) and np.all(np.isfinite(y_n))):
        raise ValueError("inputs must be finite")

    k_m = cross_kernel_matrix(x_bar, x_bar, config.theta)
    k_m_chol = _cholesky(k_m + config.eps_k * np.eye(m), "K_m")
    k_nm = cross_kernel_matrix(x_n, x_bar, config.theta)
    omega = _omega(k_nm, k_m_chol, config)
    q_m_chol, q_jitter = _factor_q(k_m, k_nm, omega, _q_jitters(config))
    return _assemble(x_n, y_n, x_bar, k_m_chol, k_nm, omega, q_m_chol, config, q_jitter)


def nu_hat(state: InducedState) -> float:
    """Closed-form scale estimate n^-1 y' Sigma^-1 y (zero for an all-zero response)."""
    return state.nu_hat


def neg_conc_loglik(state: InducedState) -> float:
    """
    Negative concentrated log-likelihood, nu profiled out.

    Half of n*log(y' S^-1 y) + log|Q_m| - log|K_m| + sum(log Omega), which equals
    -log N(y; 0, nu_hat * S) up to an additive constant in (n, pi).
    """
    n = state.n
    quad = state.nu_hat * n
    if quad <= 0:
        return math.inf
    return 0.5 * (
        n * math.log(quad)
        + _logdet(state.q_m_chol)
        - _logdet(state.k_m_chol)
        + float(np.sum(np.log(state.omega_n)))
    )


def variance_factor(state: InducedState, X) -> np.ndarray:
    """De-scaled predictive variance 1 + g - k'(K^-1 - Q^-1)k at each row of X."""
    k = cross_kernel_matrix(X, state.x_bar, state.config.theta)
    vk = solve_triangular(state.k_m_chol, k.T, lower=True, check_finite=False)
    vq = solve_triangular(state.q_m_chol, k.T, lower=True, check_finite=False)
    return 1.0 + state.config.g - np.sum(vk * vk, axis=0) + np.sum(vq * vq, axis=0)


def predict_many(state: InducedState, X) -> Tuple[np.ndarray, np.ndarray]:
    """Predictive means and variances at every row of X."""
    X = _as_matrix(X, "X")
    k = cross_kernel_matrix(X, state.x_bar, state.config.theta)
    means = k @ state.alpha
    variances = state.nu_hat * variance_factor(state, X)
    return means, np.maximum(variances, 0.0)


def predict(state: InducedState, x_star) -> PredictiveMoments:
    """Predictive mean and variance at a single site, O(m^2) after state build."""
    means, variances = predict_many(state, np.asarray(x_star, dtype=float).reshape(1, -1))
    return PredictiveMoments(mean=float(means[0]), variance=float(variances[0]))


def update_add_inducing(state: InducedState, x_new) -> Tuple[InducedState, UpdateWorkspace]:
    """
    Append one inducing point using partitioned updates.

    The K_m factor grows by one row in O(m^2), Omega is downdated in O(mn), and
    Q is rebuilt against the new Omega then bordered with the new column.

    Raises:
        DegenerateUpdateError: x_new duplicates an inducing point or a Schur
            complement (rho, upsilon) is not positive
    """
    cfg = state.config
    x_new = np.asarray(x_new, dtype=float).ravel()
    if x_new.shape[0] != state.x_bar.shape[1]:
        raise ValueError(f"x_new has d={x_new.shape[0]}, state has d={state.x_bar.shape[1]}")
    gap = np.sqrt(np.min(np.sum((state.x_bar - x_new) ** 2, axis=1)))
    if gap < DUPLICATE_TOL:
        raise DegenerateUpdateError("rho", 0.0)

    k_m_new = cross_kernel_matrix(state.x_bar, x_new, cfg.theta)[:, 0]
    lk = solve_triangular(state.k_m_chol, k_m_new, lower=True, check_finite=False)
    rho = 1.0 + cfg.eps_k - float(np.dot(lk, lk))
    if rho <= 0:
        raise DegenerateUpdateError("rho", rho)
    eta = solve_triangular(state.k_m_chol.T, lk, lower=False, check_finite=False)
    k_m_chol = _append_cholesky(state.k_m_chol, lk, math.sqrt(rho))

    k_n_new = cross_kernel_matrix(state.x_n, x_new, cfg.theta)[:, 0]
    zeta = state.k_nm @ eta
    omega = _clamp_omega(state.omega_n - (zeta - k_n_new) ** 2 / rho, cfg)

    k_m = cross_kernel_matrix(state.x_bar, state.x_bar, cfg.theta)
    q_star_chol, q_jitter = _factor_q(k_m, state.k_nm, omega, _q_jitters(cfg, state.q_jitter))
    gamma = k_m_new + state.k_nm.T @ (k_n_new / omega)
    psi = 1.0 + q_jitter + float(np.dot(k_n_new, k_n_new / omega))
    lq = solve_triangular(q_star_chol, gamma, lower=True, check_finite=False)
    upsilon = psi - float(np.dot(lq, lq))
    if upsilon <= 0:
        raise DegenerateUpdateError("upsilon", upsilon)
    xi = -cho_solve((q_star_chol, True), gamma, check_finite=False) / upsilon
    q_m_chol = _append_cholesky(q_star_chol, lq, math.sqrt(upsilon))

    new_state = _assemble(
        state.x_n,
        state.y_n,
        np.vstack([state.x_bar, x_new]),
        k_m_chol,
        np.column_stack([state.k_nm, k_n_new]),
        omega,
        q_m_chol,
        cfg,
        q_jitter,
    )
    workspace = UpdateWorkspace(
        rho=rho, eta=eta, zeta=zeta, gamma=gamma, psi=psi, upsilon=upsilon, xi=xi
    )
    return new_state, workspace


def _search_log_theta(objective, theta0: float, lo: float, hi: float):
    """
    Bounded L-BFGS-B over log(theta) with a bounded-Brent fallback.

    Returns (theta, value, success, evaluations).
    """
    best = {"theta": theta0, "value": math.inf}
    evaluations = [0]

    def wrapped(log_theta: float) -> float:
        theta = float(np.exp(np.clip(log_theta, math.log(lo), math.log(hi))))
        evaluations[0] += 1
        value = objective(theta)
        if value < best["value"]:
            best.update(theta=theta, value=value)
        return value if np.isfinite(value) else 1e300

    success = False
    try:
        res = minimize(
            lambda v: wrapped(float(v[0])),
            x0=[math.log(theta0)],
            method="L-BFGS-B",
            bounds=[(math.log(lo), math.log(hi))],
            options={"maxiter": 100},
        )
        success = bool(res.success)
    except Exception as e:
        logger.debug(f"L-BFGS-B lengthscale search failed: {e}")

    if not success:
        logger.debug("Falling back to bounded scalar search for theta")
        try:
            res = minimize_scalar(
                wrapped, bounds=(math.log(lo), math.log(hi)), method="bounded"
            )
            success = bool(res.success)
        except Exception as e:
            logger.warning(f"Lengthscale search did not converge: {e}")
    return best["theta"], best["value"], success, evaluations[0]


def mle_theta(
    x_n, y_n, x_bar, theta0: float, bounds: Tuple[float, float], config: KernelConfig
) -> ThetaFit:
    """
    Local lengthscale by minimizing the negative concentrated log-likelihood.

    Args:
        x_n: Neighborhood inputs
        y_n: Neighborhood responses
        x_bar: Inducing inputs
        theta0: Starting lengthscale
        bounds: (lo, hi) with 0 < lo <= theta0 <= hi; lo == hi fixes theta
        config: Supplies g and jitters (its theta is ignored)

    Returns:
        ThetaFit with theta_hat, nu_hat at theta_hat and a convergence flag
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (0 < lo <= theta0 <= hi):
        raise ValueError(f"need 0 < lo <= theta0 <= hi, got lo={lo}, theta0={theta0}, hi={hi}")

    if math.isclose(lo, hi):
        state = build_state(x_n, y_n, x_bar, config.with_theta(theta0))
        return ThetaFit(theta0, state.nu_hat, neg_conc_loglik(state), True, 1)

    def objective(theta: float) -> float:
        try:
            return neg_conc_loglik(build_state(x_n, y_n, x_bar, config.with_theta(theta)))
        except IllConditionedError as e:
            logger.debug(f"theta={theta:.4g} rejected: {e}")
            return math.inf

    theta_hat, value, success, evaluations = _search_log_theta(objective, theta0, lo, hi)
    if not success:
        logger.warning(f"Lengthscale MLE not converged; best iterate theta={theta_hat:.4g}")
    state = build_state(x_n, y_n, x_bar, config.with_theta(theta_hat))
    return ThetaFit(theta_hat, state.nu_hat, value, success, evaluations)


class FullGP:
    """
    Dense GP on a (small) conditioning set, used by the data-subset comparators
    and as the full-GP reference.
    """

    def __init__(self, x_n, y_n, theta: float, g: float, indices: Optional[np.ndarray] = None):
        _check_theta(theta)
        self.x_n = _as_matrix(x_n, "x_n")
        self.y_n = np.asarray(y_n, dtype=float).ravel()
        self.theta = float(theta)
        self.g = float(g)
        self.indices = None if indices is None else np.asarray(indices, dtype=int)
        k = cross_kernel_matrix(self.x_n, self.x_n, theta)
        k[np.diag_indices_from(k)] += g
        self.chol = _cholesky(k, "K_n")
        self._refresh()

    def _refresh(self):
        self.ki_y = cho_solve((self.chol, True), self.y_n, check_finite=False)
        n = self.y_n.shape[0]
        self.nu_hat = max(float(np.dot(self.y_n, self.ki_y)), 0.0) / n

    @property
    def n(self) -> int:
        return self.x_n.shape[0]

    def solve(self, b: np.ndarray) -> np.ndarray:
        return cho_solve((self.chol, True), b, check_finite=False)

    def extend(self, x_new, y_new: float, index: Optional[int] = None) -> "FullGP":
        """New fit with one more conditioning point, bordering the Cholesky factor in O(n^2)."""
        x_new = np.asarray(x_new, dtype=float).ravel()
        k_new = cross_kernel_matrix(self.x_n, x_new, self.theta)[:, 0]
        row = solve_triangular(self.chol, k_new, lower=True, check_finite=False)
        pivot = 1.0 + self.g - float(np.dot(row, row))
        if pivot <= 0:
            raise DegenerateUpdateError("v_n", pivot)
        out = object.__new__(FullGP)
        out.x_n = np.vstack([self.x_n, x_new])
        out.y_n = np.append(self.y_n, y_new)
        out.theta = self.theta
        out.g = self.g
        out.indices = None
        if self.indices is not None and index is not None:
            out.indices = np.append(self.indices, index)
        out.chol = _append_cholesky(self.chol, row, math.sqrt(pivot))
        out._refresh()
        return out

    def predict_many(self, X) -> Tuple[np.ndarray, np.ndarray]:
        X = _as_matrix(X, "X")
        k = cross_kernel_matrix(X, self.x_n, self.theta)
        means = k @ self.ki_y
        v = solve_triangular(self.chol, k.T, lower=True, check_finite=False)
        variances = self.nu_hat * (1.0 + self.g - np.sum(v * v, axis=0))
        return means, np.maximum(variances, 0.0)

    def predict(self, x_star) -> PredictiveMoments:
        means, variances = self.predict_many(np.asarray(x_star, dtype=float).reshape(1, -1))
        return PredictiveMoments(mean=float(means[0]), variance=float(variances[0]))

    def neg_conc_loglik(self) -> float:
        quad = self.nu_hat * self.n
        if quad <= 0:
            return math.inf
        return 0.5 * (self.n * math.log(quad) + _logdet(self.chol))


def full_gp_fit(x_n, y_n, theta: float, g: float) -> FullGP:
    return FullGP(x_n, y_n, theta, g)


def full_gp_mle(x_n, y_n, theta0: float, bounds: Tuple[float, float], g: float) -> ThetaFit:
    """Dense analogue of mle_theta."""
    lo, hi = float(bounds[0]), float(bounds[1])
    if not (0 < lo <= theta0 <= hi):
        raise ValueError(f"need 0 < lo <= theta0 <= hi, got lo={lo}, theta0={theta0}, hi={hi}")
    if math.isclose(lo, hi):
        fit = FullGP(x_n, y_n, theta0, g)
        return ThetaFit(theta0, fit.nu_hat, fit.neg_conc_loglik(), True, 1)

    def objective(theta: float) -> float:
        try:
            return FullGP(x_n, y_n, theta, g).neg_conc_loglik()
        except IllConditionedError:
            return math.inf

    theta_hat, value, success, evaluations = _search_log_theta(objective, theta0, lo, hi)
    fit = FullGP(x_n, y_n, theta_hat, g)
    return ThetaFit(theta_hat, fit.nu_hat, value, success, evaluations)
