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
Local Design
Nearest-neighbor neighborhoods, Latin hypercube samples, greedy wIMSE
inducing-point designs and the template schemes (wIMSE, rectangular LHS,
Gaussian-quantile LHS) that are built once and displaced to every site.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist
from scipy.stats import norm

from . import criteria
from .gp_core import (
    DegenerateUpdateError,
    Domain,
    KernelConfig,
    build_state,
    update_add_inducing,
)

logger = logging.getLogger(__name__)

TEMPLATE_KINDS = ("wimse", "chr", "qnorm")
QNORM_CLAMP = 1e-10
SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]


class DegenerateGeometryError(ValueError):
    """Neighborhood has no spread to derive a lengthscale or template from"""


@dataclass(frozen=True)
class Neighborhood:
    indices: np.ndarray
    x_n: np.ndarray
    y_n: Optional[np.ndarray]
    center: np.ndarray

    @property
    def n(self) -> int:
        return self.indices.shape[0]

    def bounding_box(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.x_n.min(axis=0), self.x_n.max(axis=0)


@dataclass(frozen=True)
class Template:
    """
    Origin-centered inducing pattern; offsets[0] is the zero vector.

    scale_lengths is set when the pattern was built on pre-scaled inputs; the
    offsets and build_center are then in scaled units.
    """

    offsets: np.ndarray
    theta0: float
    build_center: np.ndarray
    kind: str = "wimse"
    scale_lengths: Optional[np.ndarray] = None

    def __post_init__(self):
        offsets = np.atleast_2d(np.asarray(self.offsets, dtype=float))
        if offsets.shape[0] < 1:
            raise ValueError("template needs at least one inducing point")
        if np.any(offsets[0] != 0.0):
            raise ValueError("first template offset must be the zero vector")
        if self.kind not in TEMPLATE_KINDS:
            raise ValueError(
                f"unknown template kind '{self.kind}', expected one of {TEMPLATE_KINDS}"
            )
        if not self.theta0 > 0:
            raise ValueError(f"theta0 must be positive, got {self.theta0}")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "build_center", np.asarray(self.build_center, dtype=float).ravel())
        if self.scale_lengths is not None:
            scale = np.asarray(self.scale_lengths, dtype=float).ravel()
            if scale.shape != (offsets.shape[1],) or not np.all(scale > 0):
                raise ValueError(
                    f"scale_lengths must be {offsets.shape[1]} positive values, got {scale}"
                )
            object.__setattr__(self, "scale_lengths", scale)

    @property
    def m(self) -> int:
        return self.offsets.shape[0]

    @property
    def d(self) -> int:
        return self.offsets.shape[1]


class NeighborIndex:
    """
    k-d tree over the full design, built once and queried per site.

    Ties at the neighborhood boundary go to the lowest row index.
    """

    def __init__(self, X_N, Y_N=None):
        self.X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
        self.Y_N = None if Y_N is None else np.asarray(Y_N, dtype=float).ravel()
        if self.Y_N is not None and self.Y_N.shape[0] != self.X_N.shape[0]:
            raise ValueError(f"Y_N has {self.Y_N.shape[0]} entries for {self.X_N.shape[0]} rows")
        self.tree = cKDTree(self.X_N)
        logger.debug(f"Built k-d tree over {self.N} points in d={self.d}")

    @property
    def N(self) -> int:
        return self.X_N.shape[0]

    @property
    def d(self) -> int:
        return self.X_N.shape[1]

    def query(self, x_star, n: int) -> Neighborhood:
        x_star = np.asarray(x_star, dtype=float).ravel()
        if not 1 <= n <= self.N:
            raise ValueError(f"need 1 <= n <= N, got n={n}, N={self.N}")
        if x_star.shape[0] != self.d:
            raise ValueError(f"x_star has d={x_star.shape[0]}, design has d={self.d}")
        dist, _ = self.tree.query(x_star, k=n)
        radius = float(np.atleast_1d(dist)[-1])
        reach = radius * (1.0 + 1e-12) + 1e-300
        pool = np.asarray(self.tree.query_ball_point(x_star, reach), dtype=int)
        d2 = np.sum((self.X_N[pool] - x_star) ** 2, axis=1)
        order = np.lexsort((pool, d2))
        indices = pool[order[:n]]
        y_n = None if self.Y_N is None else self.Y_N[indices]
        return Neighborhood(indices=indices, x_n=self.X_N[indices], y_n=y_n, center=x_star)


def nearest_neighbors(
    X_N, x_star, n: int, Y_N=None, index: Optional[NeighborIndex] = None
) -> Neighborhood:
    """Exact n nearest rows of X_N to x_star."""
    if index is None:
        index = NeighborIndex(X_N, Y_N)
    return index.query(x_star, n)


def theta0_quantile(x_n) -> float:
    """10% quantile of the squared pairwise distances in the neighborhood."""
    x_n = np.atleast_2d(np.asarray(x_n, dtype=float))
    if x_n.shape[0] < 2:
        raise ValueError(f"need at least 2 points, got {x_n.shape[0]}")
    d2 = pdist(x_n, "sqeuclidean")
    if not np.any(d2 > 0):
        raise DegenerateGeometryError("all neighborhood points are identical")
    q = float(np.quantile(d2, 0.1))
    if q <= 0:
        q = float(np.min(d2[d2 > 0]))
        logger.warning(f"Duplicate points dominate the neighborhood; theta0 falls back to {q:.3e}")
    return q


def theta0_gauss(x_n, x_star) -> float:
    """((1/3) max |x_nk - x*_k|)^2, zero (with a warning) when the neighborhood is {x*}."""
    x_n = np.atleast_2d(np.asarray(x_n, dtype=float))
    spread = float(np.max(np.abs(x_n - np.asarray(x_star, dtype=float).ravel())))
    if spread == 0.0:
        logger.warning("Neighborhood collapses onto x_star; theta0_gauss is 0")
    return (spread / 3.0) ** 2


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def lhs(count: int, d: int, seed: SeedLike = None) -> np.ndarray:
    """
    Latin hypercube sample in [0, 1)^d.

    Each column is a random permutation of the strata 0..count-1 plus uniform
    jitter, divided by count.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    rng = _rng(seed)
    strata = np.column_stack([rng.permutation(count) for _ in range(d)]).astype(float)
    return (strata + rng.random((count, d))) / count


def fraction_inside(inducing, neighborhood: Neighborhood) -> float:
    """Share of inducing points inside the neighborhood's bounding box in every coordinate."""
    inducing = np.atleast_2d(np.asarray(inducing, dtype=float))
    lo, hi = neighborhood.bounding_box()
    inside = np.all((inducing >= lo) & (inducing <= hi), axis=1)
    return float(np.mean(inside))


def _neighborhood(x_star, n, X_N, Y_N, index, neighborhood) -> Neighborhood:
    if neighborhood is not None:
        return neighborhood
    return nearest_neighbors(X_N, x_star, n, Y_N=Y_N, index=index)


def _log_wimse(state, domain, x_star):
    def fun(x):
        value = criteria.wimse(x, state, domain, x_star)
        if not np.isfinite(value) or value <= 0:
            return 1e300, np.zeros_like(x)
        grad = criteria.wimse_grad(x, state, domain, x_star)
        if not np.all(np.isfinite(grad)):
            grad = np.zeros_like(x)
        return math.log(value), grad / value

    return fun


def greedy_wimse_design(
    m: int,
    n: int,
    x_star,
    X_N,
    Y_N,
    domain: Domain,
    seed: SeedLike = None,
    index: Optional[NeighborIndex] = None,
    neighborhood: Optional[Neighborhood] = None,
    n_starts: int = 20,
    tol: float = 0.01,
    g: float = 1e-6,
    history: Optional[List[float]] = None,
) -> Tuple[np.ndarray, Neighborhood]:
    """
    Greedy inducing-point design minimizing wIMSE around x_star.

    The first inducing point is x_star itself; every later point is the best of
    an L-BFGS-B multi-start (starts from an LHS over the neighborhood's bounding
    box) on log wIMSE with the analytic gradient. theta stays at the quantile
    heuristic for the whole build.

    Args:
        m: Number of inducing points
        n: Neighborhood size, n >= m
        x_star: Prediction site
        X_N: Full design
        Y_N: Full responses
        domain: Integration region for wIMSE
        seed: Seed for the multi-start LHS
        index: Prebuilt NeighborIndex
        neighborhood: Precomputed neighborhood (skips the NN query)
        n_starts: Multi-start count
        tol: L-BFGS-B ftol on log wIMSE for each start
        g: Nugget
        history: If given, receives the achieved wIMSE after each selection

    Returns:
        (inducing points, neighborhood); fewer than m points if every start
        of some step was degenerate
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if n < m:
        raise ValueError(f"need n >= m, got n={n}, m={m}")
    x_star = np.asarray(x_star, dtype=float).ravel()
    nbhd = _neighborhood(x_star, n, X_N, Y_N, index, neighborhood)
    inducing = x_star[None, :]
    if m == 1:
        return inducing, nbhd

    config = KernelConfig(theta=theta0_quantile(nbhd.x_n), g=g)
    y_n = nbhd.y_n if nbhd.y_n is not None else np.ones(nbhd.n)
    state = build_state(nbhd.x_n, y_n, inducing, config)
    lo, hi = nbhd.bounding_box()
    width = hi - lo
    box = list(zip(lo, hi))
    rng = _rng(seed)

    for step in range(2, m + 1):
        starts = lo + lhs(n_starts, lo.shape[0], rng) * width
        fun = _log_wimse(state, domain, x_star)
        best_x, best_val = None, math.inf
        for s in starts:
            res = minimize(fun, s, jac=True, method="L-BFGS-B", bounds=box, options={"ftol": tol})
            if res.fun < best_val:
                best_x, best_val = res.x, float(res.fun)
        if best_x is None or best_val >= 1e299:
            logger.warning(
                f"All {n_starts} starts degenerate at step {step}; stopping at m={state.m}"
            )
            break
        try:
            state, _ = update_add_inducing(state, best_x)
        except DegenerateUpdateError as e:
            logger.warning(f"Selected point rejected at step {step} ({e}); stopping at m={state.m}")
            break
        logger.debug(f"Step {step}: log wIMSE={best_val:.4f} at {best_x}")
        if history is not None:
            history.append(math.exp(best_val))
    return state.x_bar.copy(), nbhd


def build_wimse_template(
    m: int,
    n: int,
    X_N,
    Y_N,
    domain: Domain,
    seed: SeedLike = None,
    index: Optional[NeighborIndex] = None,
    **kwargs,
) -> Template:
    """Greedy wIMSE design at the coordinatewise median of X_N, stored as offsets."""
    X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
    center = np.median(X_N, axis=0)
    inducing, nbhd = greedy_wimse_design(
        m, n, center, X_N, Y_N, domain, seed=seed, index=index, **kwargs
    )
    theta0 = theta0_quantile(nbhd.x_n) if nbhd.n >= 2 else 1.0
    logger.info(f"Built wIMSE template: m={inducing.shape[0]}, n={n}, theta0={theta0:.4g}")
    return Template(offsets=inducing - center, theta0=theta0, build_center=center, kind="wimse")


def displace_template(
    template: Template,
    x_star,
    X_N,
    Y_N,
    n: int,
    index: Optional[NeighborIndex] = None,
    neighborhood: Optional[Neighborhood] = None,
) -> Tuple[np.ndarray, Neighborhood]:
    """Translate the template to x_star; points outside the domain are kept."""
    x_star = np.asarray(x_star, dtype=float).ravel()
    if x_star.shape[0] != template.d:
        raise ValueError(f"template has d={template.d}, x_star has d={x_star.shape[0]}")
    nbhd = _neighborhood(x_star, n, X_N, Y_N, index, neighborhood)
    return template.offsets + x_star, nbhd


def chr_template(
    m: int,
    n: int,
    x_star,
    X_N,
    Y_N,
    seed: SeedLike = None,
    index: Optional[NeighborIndex] = None,
    neighborhood: Optional[Neighborhood] = None,
) -> Tuple[np.ndarray, Neighborhood]:
    """LHS of m-1 points rescaled to the neighborhood's bounding box, with x_star first."""
    if m < 2:
        raise ValueError(f"chr template needs m >= 2, got {m}")
    x_star = np.asarray(x_star, dtype=float).ravel()
    nbhd = _neighborhood(x_star, n, X_N, Y_N, index, neighborhood)
    lo, hi = nbhd.bounding_box()
    width = hi - lo
    points = lo + lhs(m - 1, x_star.shape[0], seed) * width
    flat = width == 0
    if np.any(flat):
        points[:, flat] = x_star[flat]
    return np.vstack([x_star, points]), nbhd


def qnorm_template(
    m: int,
    n: int,
    x_star,
    X_N,
    Y_N,
    seed: SeedLike = None,
    index: Optional[NeighborIndex] = None,
    neighborhood: Optional[Neighborhood] = None,
) -> Tuple[np.ndarray, Neighborhood]:
    """
    LHS warped through the Gaussian quantile function centered at x_star.

    The standard deviation is sqrt(theta0_gauss), a third of the widest
    coordinate deviation in the neighborhood.
    """
    if m < 2:
        raise ValueError(f"qnorm template needs m >= 2, got {m}")
    x_star = np.asarray(x_star, dtype=float).ravel()
    nbhd = _neighborhood(x_star, n, X_N, Y_N, index, neighborhood)
    theta0 = theta0_gauss(nbhd.x_n, x_star)
    if theta0 <= 0:
        raise DegenerateGeometryError("neighborhood has no spread around x_star")
    u = np.clip(lhs(m - 1, x_star.shape[0], seed), QNORM_CLAMP, 1.0 - QNORM_CLAMP)
    points = norm.ppf(u, loc=x_star, scale=math.sqrt(theta0))
    return np.vstack([x_star, points]), nbhd


def build_sfd_template(
    kind: str,
    m: int,
    n: int,
    X_N,
    Y_N,
    seed: SeedLike = None,
    index: Optional[NeighborIndex] = None,
) -> Template:
    """Space-filling (chr or qnorm) design at the median of X_N, stored as a reusable template."""
    X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
    center = np.median(X_N, axis=0)
    if kind == "chr":
        inducing, nbhd = chr_template(m, n, center, X_N, Y_N, seed=seed, index=index)
    elif kind == "qnorm":
        inducing, nbhd = qnorm_template(m, n, center, X_N, Y_N, seed=seed, index=index)
    else:
        raise ValueError(f"space-filling template kind must be 'chr' or 'qnorm', got '{kind}'")
    # same starting heuristic the predictor uses for this kind
    theta0 = theta0_gauss(nbhd.x_n, center) if kind == "qnorm" else theta0_quantile(nbhd.x_n)
    return Template(offsets=inducing - center, theta0=theta0, build_center=center, kind=kind)


def save_template(template: Template, path) -> Path:
    """
    Write a template as plain text: a header line "m d theta0 kind", comments
    with the build center (and scale lengths, if any), then one
    space-separated row per inducing offset.
    """
    path = Path(path)
    lines = [f"{template.m} {template.d} {template.theta0!r} {template.kind}"]
    lines.append("# build_center " + " ".join(repr(float(c)) for c in template.build_center))
    if template.scale_lengths is not None:
        lines.append("# scale_lengths " + " ".join(repr(float(s)) for s in template.scale_lengths))
    for row in template.offsets:
        lines.append(" ".join(repr(float(v)) for v in row))
    path.write_text("\n".join(lines) + "\n")
    logger.info(f"💾 Template written to {path}")
    return path


def load_template(path) -> Template:
    path = Path(path)
    text = path.read_text().splitlines()
    if not text:
        raise ValueError(f"{path}: empty template file")
    header = text[0].split()
    if len(header) != 4:
        raise ValueError(f"{path}:1: expected 'm d theta0 kind', got '{text[0]}'")
    m, d, theta0, kind = int(header[0]), int(header[1]), float(header[2]), header[3]
    center = np.zeros(d)
    scale = None
    rows = []
    for lineno, line in enumerate(text[1:], start=2):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            parts = stripped.lstrip("#").split()
            if parts and parts[0] == "build_center":
                center = np.array([float(v) for v in parts[1:]])
            elif parts and parts[0] == "scale_lengths":
                scale = np.array([float(v) for v in parts[1:]])
            continue
        values = stripped.split()
        if len(values) != d:
            raise ValueError(f"{path}:{lineno}: expected {d} values, got {len(values)}")
        rows.append([float(v) for v in values])
    if len(rows) != m:
        raise ValueError(f"{path}: header declares m={m} rows, found {len(rows)}")
    return Template(
        offsets=np.array(rows),
        theta0=theta0,
        build_center=center,
        kind=kind,
        scale_lengths=scale,
    )


@dataclass
class GlobalDesignPath:
    """Inducing sets recorded at each size of a global greedy build"""

    sizes: List[int] = field(default_factory=list)
    designs: List[np.ndarray] = field(default_factory=list)

    def __iter__(self) -> Iterator[Tuple[int, np.ndarray]]:
        return iter(zip(self.sizes, self.designs))


def greedy_global_design(
    criterion: str,
    M: int,
    X_N,
    Y_N,
    domain: Domain,
    theta: float,
    g: float,
    candidates,
    ref_set=None,
    M0: int = 5,
    seed: SeedLike = None,
) -> GlobalDesignPath:
    """
    Grow a global inducing set from an M0-point LHS by greedy ALC (maximize)
    or IMSE (minimize) over a discrete candidate set.
    """
    if criterion not in ("alc", "imse"):
        raise ValueError(f"criterion must be 'alc' or 'imse', got '{criterion}'")
    X_N = np.atleast_2d(np.asarray(X_N, dtype=float))
    if not 1 <= M0 <= M <= X_N.shape[0]:
        raise ValueError(f"need 1 <= M0 <= M <= N, got M0={M0}, M={M}, N={X_N.shape[0]}")
    if criterion == "alc" and ref_set is None:
        raise ValueError("alc criterion needs a reference set")
    pool = np.atleast_2d(np.asarray(candidates, dtype=float)).copy()
    config = KernelConfig(theta=theta, g=g)
    x_bar = domain.lower + lhs(M0, domain.d, seed) * (domain.upper - domain.lower)
    state = build_state(X_N, Y_N, x_bar, config)
    path = GlobalDesignPath(sizes=[state.m], designs=[state.x_bar.copy()])

    while state.m < M and pool.shape[0] > 0:
        if criterion == "alc":
            scores = np.array([criteria.alc_global(c, state, ref_set) for c in pool])
            pick = int(np.argmax(scores))
            usable = np.isfinite(scores[pick])
        else:
            scores = np.array([criteria.imse_global(c, state, domain) for c in pool])
            pick = int(np.argmin(scores))
            usable = np.isfinite(scores[pick])
        if not usable:
            logger.warning(f"No usable candidate left at M={state.m}")
            break
        try:
            state, _ = update_add_inducing(state, pool[pick])
        except DegenerateUpdateError as e:
            logger.warning(f"Global update rejected at M={state.m}: {e}")
            break
        pool = np.delete(pool, pick, axis=0)
        path.sizes.append(state.m)
        path.designs.append(state.x_bar.copy())
        logger.debug(f"Global {criterion}: M={state.m}, score={scores[pick]:.4e}")
    return path
