"""Clustering of DOA unit vectors and of scalar frame weights.

Directions are clustered with spherical k-means (cosine dissimilarity,
renormalized-mean centroid update).  Scalar weights are split into two
groups either by an exact 1-D two-means or by fuzzy c-means.  Evaluation
matches estimated to true directions by exhaustive permutation, which is
cheap at the source counts involved.
"""

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import angular_error

__all__ = [
    "ClusterResult",
    "spherical_kmeans",
    "scalar_two_means",
    "fuzzy_cmeans_scalar",
    "match_sources",
]


@dataclass(frozen=True)
class ClusterResult:
    """Outcome of a direction clustering.

    ``centroids`` is [S, 3] with unit rows, ``assignments`` maps each
    input vector to its nearest centroid, and ``inertia`` is the summed
    cosine dissimilarity ``1 - u . c`` of members to their centroids.
    """

    centroids: np.ndarray
    assignments: np.ndarray
    inertia: float

    @property
    def n_clusters(self):
        return self.centroids.shape[0]


def _assign(vs, centroids):
    dots = vs @ centroids.T
    assignments = np.argmax(dots, axis=1)
    inertia = float(np.sum(1.0 - dots[np.arange(vs.shape[0]), assignments]))
    return assignments, inertia


def _plusplus_init(vs, s, rng):
    # for unit vectors 1 - u.c equals ||u - c||^2 / 2, so weighting by
    # cosine dissimilarity is exactly the classic D^2 seeding
    n = vs.shape[0]
    centroids = np.empty((s, 3))
    centroids[0] = vs[rng.integers(n)]
    for j in range(1, s):
        d = np.min(1.0 - vs @ centroids[:j].T, axis=1)
        d = np.clip(d, 0.0, None)
        total = d.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))
        else:
            idx = int(rng.choice(n, p=d / total))
        centroids[j] = vs[idx]
    return centroids


def _lloyd(vs, centroids, max_iter):
    n, s = vs.shape[0], centroids.shape[0]
    assignments = np.full(n, -1)
    for _ in range(max_iter):
        new_assign, _ = _assign(vs, centroids)
        if np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
        for j in range(s):
            members = vs[assignments == j]
            if members.shape[0] == 0:
                # reseed an empty cluster at the worst-fit point
                own = (vs @ centroids.T)[np.arange(n), assignments]
                worst = int(np.argmin(own))
                centroids[j] = vs[worst]
                assignments[worst] = j
                continue
            m = members.mean(axis=0)
            norm = np.linalg.norm(m)
            if norm > 1e-12:
                centroids[j] = m / norm
    assignments, inertia = _assign(vs, centroids)
    return centroids, assignments, inertia


def spherical_kmeans(vs, s, seed=0, restarts=10, max_iter=100):
    """Cluster unit vectors into ``s`` groups by cosine dissimilarity.

    Runs ``restarts`` independent seeded k-means++ initializations and
    keeps the solution with the lowest inertia.  Deterministic for a
    fixed seed.

    Parameters
    ----------
    vs : array_like, shape (n, 3)
        Unit vectors, n >= s.
    s : int
        Number of clusters (the known source count).
    seed : int
    restarts : int
    max_iter : int

    Returns
    -------
    ClusterResult
    """
    vs = np.asarray(vs, dtype=float).reshape(-1, 3)
    n = vs.shape[0]
    if s < 1:
        raise ValueError("need at least one cluster")
    if n < s:
        raise ValueError(f"cannot form {s} clusters from {n} vectors")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        centroids = _plusplus_init(vs, s, rng)
        centroids, assignments, inertia = _lloyd(vs, centroids.copy(), max_iter)
        if best is None or inertia < best.inertia:
            best = ClusterResult(
                centroids=centroids.copy(),
                assignments=assignments.copy(),
                inertia=inertia,
            )
    return best


def scalar_two_means(xs):
    """Optimal two-cluster split of scalars, returned as (c0, c1).

    Computes the exact minimum within-cluster sum of squares over all
    splits of the sorted data (prefix-sum scan), which for two clusters
    in one dimension is the global two-means optimum.  Plain Lloyd
    iteration from extreme-point seeds can stall in a locally stable
    but suboptimal split, so the exhaustive scan is used instead; it is
    deterministic and O(n log n).

    Parameters
    ----------
    xs : array_like
        At least two values.

    Returns
    -------
    (float, float)
        Cluster means with c0 <= c1.  If all inputs are identical both
        centroids equal that value and a warning is issued.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    n = xs.size
    if n < 2:
        raise ValueError("two-means needs at least two values")
    s = np.sort(xs, kind="stable")
    if s[0] == s[-1]:
        warnings.warn("two-means input is degenerate (all values identical)")
        return float(s[0]), float(s[0])
    prefix = np.cumsum(s)
    prefix2 = np.cumsum(s * s)
    i = np.arange(1, n)  # left cluster takes the first i sorted values
    left_sum = prefix[:-1]
    right_sum = prefix[-1] - left_sum
    sse = (
        prefix2[:-1]
        - left_sum**2 / i
        + (prefix2[-1] - prefix2[:-1])
        - right_sum**2 / (n - i)
    )
    k = int(i[np.argmin(sse)])
    return float(left_sum[k - 1] / k), float(right_sum[k - 1] / (n - k))


def fuzzy_cmeans_scalar(xs, c=2, m=2.0, tol=1e-9, max_iter=200):
    """Fuzzy c-means on scalars; returns the sorted converged centroids.

    Standard Bezdek iteration with fuzzifier ``m``: memberships
    ``1 / sum_k (d_i/d_k)^(2/(m-1))``, centroids as membership^m
    weighted means, repeated until centroid movement falls below
    ``tol``.  Points coinciding with a centroid get crisp membership.

    Parameters
    ----------
    xs : array_like
        At least two values.
    c : int
        Number of clusters.
    m : float
        Fuzzifier, > 1.  Larger values pull centroids together.
    tol, max_iter : convergence controls.

    Returns
    -------
    tuple of float, length ``c``, ascending.
    """
    xs = np.asarray(xs, dtype=float).ravel()
    if xs.size < 2:
        raise ValueError("fuzzy c-means needs at least two values")
    if m <= 1.0:
        raise ValueError("fuzzifier must exceed 1")
    if xs.min() == xs.max():
        warnings.warn("fuzzy c-means input is degenerate (all values identical)")
        return tuple(float(xs[0]) for _ in range(c))
    centroids = np.linspace(xs.min(), xs.max(), c)
    expo = 2.0 / (m - 1.0)
    for _ in range(max_iter):
        d = np.abs(xs[:, None] - centroids[None, :])
        exact = d < 1e-300
        inv = np.where(exact, 1.0, d) ** (-expo)
        u = inv / inv.sum(axis=1, keepdims=True)
        hit = exact.any(axis=1)
        u[hit] = exact[hit] / exact[hit].sum(axis=1, keepdims=True)
        um = u**m
        new = (um * xs[:, None]).sum(axis=0) / um.sum(axis=0)
        if np.max(np.abs(new - centroids)) < tol:
            centroids = new
            break
        centroids = new
    return tuple(float(v) for v in np.sort(centroids))


def _fcm_objective(xs, centroids, m):
    d = np.abs(xs[:, None] - np.asarray(centroids)[None, :])
    expo = 2.0 / (m - 1.0)
    exact = d < 1e-300
    inv = np.where(exact, 1.0, d) ** (-expo)
    u = inv / inv.sum(axis=1, keepdims=True)
    hit = exact.any(axis=1)
    u[hit] = exact[hit] / exact[hit].sum(axis=1, keepdims=True)
    return float(((u**m) * d**2).sum())


def match_sources(est, truth):
    """Optimal pairing of estimated to true directions.

    Tries every permutation (source counts here never exceed 8) and
    keeps the pairing minimizing the total angular error.

    Parameters
    ----------
    est, truth : array_like, shape (S, 3)
        Unit vectors; equal lengths, S <= 8.

    Returns
    -------
    (pairing, errors)
        ``pairing[i]`` is the index into ``est`` matched to
        ``truth[i]``; ``errors[i]`` the corresponding angular error in
        radians.
    """
    est = np.asarray(est, dtype=float).reshape(-1, 3)
    truth = np.asarray(truth, dtype=float).reshape(-1, 3)
    if est.shape[0] != truth.shape[0]:
        raise ValueError("estimate and truth counts differ")
    s = est.shape[0]
    if s == 0:
        raise ValueError("nothing to match")
    if s > 8:
        raise ValueError("exhaustive matching is limited to 8 sources")
    cost = np.empty((s, s))
    for i in range(s):
        for j in range(s):
            cost[i, j] = angular_error(truth[i], est[j])
    best_perm, best_total = None, np.inf
    for perm in itertools.permutations(range(s)):
        total = cost[np.arange(s), perm].sum()
        if total < best_total:
            best_total = total
            best_perm = perm
    pairing = np.array(best_perm)
    return pairing, cost[np.arange(s), pairing]
