"""Seeded joint-Gaussian sampling with a prescribed kernel covariance.

Draw i, component j is a pure function of (seed, i, j): each draw row owns a
counter-based Philox stream at offset i * 2^64, consumed as uniforms and
pushed through the inverse normal CDF.  Chunking rows across threads can
therefore never change the output.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .core import GramMatrix, NotPSD, PointSet, _unpermuted_factor
from .errors import MissingNeighbor, NotPositiveSemidefinite
from .network import Network, resistance

_ROW_BLOCK = 8192


def _uniform_rows(seed: int, start: int, stop: int, cols: int) -> np.ndarray:
    out = np.empty((stop - start, cols))
    for i in range(start, stop):
        stream = np.random.Philox(key=seed, counter=i << 64)
        out[i - start] = np.random.Generator(stream).random(cols)
    return out


def _normal_rows(seed: int, start: int, stop: int, cols: int) -> np.ndarray:
    u = _uniform_rows(seed, start, stop, cols)
    # random() can return exactly 0; keep the inverse CDF finite
    np.clip(u, 1e-300, None, out=u)
    return ndtri(u)


@dataclass(frozen=True)
class GFFSampleSet:
    """Joint mean-zero Gaussian draws with covariance equal to a Gram matrix."""

    points: PointSet
    samples: np.ndarray
    seed: int
    covariance: GramMatrix

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    def column(self, label) -> np.ndarray:
        return self.samples[:, self.points.index(label)]


def sample(gram: GramMatrix, n: int, seed: int, workers: int = 1) -> GFFSampleSet:
    """Draw ``n`` joint Gaussians with covariance ``gram``.

    Rank-deficient covariances are sampled in their numerical column span via
    the truncated pivoted factor.  Identical (gram, n, seed) gives bit-exact
    identical output for any ``workers``.
    """
    if n < 1:
        raise ValueError("need at least one draw")
    fact = gram.factorization()
    if isinstance(fact.status, NotPSD):
        raise NotPositiveSemidefinite(fact.status.witness)
    lo = _unpermuted_factor(fact)
    rank = lo.shape[1]
    blocks = [(s, min(s + _ROW_BLOCK, n)) for s in range(0, n, _ROW_BLOCK)]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _normal_rows(seed, b[0], b[1], rank), blocks))
    else:
        parts = [_normal_rows(seed, a, b, rank) for a, b in blocks]
    z = np.vstack(parts)
    draws = z @ lo.T
    return GFFSampleSet(points=gram.points, samples=draws, seed=seed, covariance=gram)


def empirical_mean(samples: GFFSampleSet) -> np.ndarray:
    return samples.samples.mean(axis=0)


def empirical_covariance(samples: GFFSampleSet) -> np.ndarray:
    """Second-moment estimate (the mean is zero by construction)."""
    x = samples.samples
    return (x.T @ x) / x.shape[0]


def covariance_standard_error(gram: GramMatrix, n: int) -> np.ndarray:
    """Entrywise standard error of the empirical covariance of n Gaussian
    draws: sqrt((K_xx K_yy + K_xy^2) / n)."""
    k = gram.matrix
    d = np.diagonal(k)
    return np.sqrt((np.outer(d, d) + k ** 2) / n)


def delta_realization(net: Network, samples: GFFSampleSet, x) -> np.ndarray:
    """Per-draw Gaussian realization of the point mass at x:
    c(x) X_x - sum over neighbors y of c_xy X_y.

    The base vertex is pinned to zero and contributes nothing.  Its variance
    converges to the point-mass energy c(x).
    """
    if x == net.base:
        raise ValueError("the base vertex is pinned to zero in the sampled field")
    if x not in samples.points:
        raise MissingNeighbor(f"vertex {x!r} is not in the sample base")
    out = net.total_conductance(x) * samples.column(x)
    for y, c in net.neighbors(x):
        if y == net.base:
            continue
        if y not in samples.points:
            raise MissingNeighbor(f"neighbor {y!r} of {x!r} is not in the sample base")
        out = out - c * samples.column(y)
    return out


@dataclass(frozen=True)
class TriangleCheck:
    holds: bool
    margin: float


def covariance_triangle_check(net: Network, x, y, z) -> TriangleCheck:
    """Deterministic covariance inequality
    k(x,z) + k(z,y) <= k(x,y) + R(o,z), checked on exact kernel values.

    This is the resistance-metric triangle inequality in disguise, so the
    margin is nonnegative up to solver rounding.  The base vertex enters with
    k(base, .) = 0, matching the pinned field.
    """
    g = net.green_matrix()
    grounded = net.grounded_vertices()

    def kval(a, b):
        if a == net.base or b == net.base:
            return 0.0
        return float(g[grounded.index(a), grounded.index(b)])

    margin = kval(x, y) + resistance(net, net.base, z) - kval(x, z) - kval(z, y)
    scale = 1.0 + abs(kval(x, y)) + abs(resistance(net, net.base, z))
    return TriangleCheck(holds=margin >= -1e-9 * scale, margin=float(margin))
