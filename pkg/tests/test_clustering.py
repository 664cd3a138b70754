"""Clustering oracles: exhaustive partitions, split scans, permutations.

The spherical k-means oracle leans on a separation fact: in an optimal
2-partition with centroids c0, c1, every point sits weakly on its own
side of the plane through the origin normal to c0 - c1 (moving a
misplaced point strictly lowers the cost against fixed centroids, and
re-optimizing centroids only helps).  Optimal partitions are therefore
found by enumerating all great-circle splits, which we do with perturbed
pair normals; that oracle is itself validated against a true 2^(n-1)
exhaustive enumeration at small n.
"""

import warnings

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from sphdoa.clustering import (
    _fcm_objective,
    fuzzy_cmeans_scalar,
    match_sources,
    scalar_two_means,
    spherical_kmeans,
)
from sphdoa.geometry import angular_error


def partition_inertia(vs, mask):
    """Inertia of a 2-partition under optimal (normalized-mean) centroids.

    For members M of a cluster with centroid sum(M)/||sum(M)||, the
    summed dissimilarity is |M| - ||sum(M)||, so the total over both
    clusters is n - ||S_A|| - ||S_B||.
    """
    s_a = vs[mask].sum(axis=0)
    s_b = vs[~mask].sum(axis=0)
    return vs.shape[0] - np.linalg.norm(s_a) - np.linalg.norm(s_b)


def exhaustive_best_inertia(vs):
    """True optimum over all nonempty 2-partitions; n <= 18."""
    n = vs.shape[0]
    masks = np.arange(0, 2 ** (n - 1) - 1)  # point 0 pinned to cluster A
    bits = ((masks[:, None] >> np.arange(n - 1)) & 1).astype(float)
    s_a = vs[0] + bits @ vs[1:]
    s_b = vs.sum(axis=0) - s_a
    inertia = n - np.linalg.norm(s_a, axis=1) - np.linalg.norm(s_b, axis=1)
    return float(inertia.min())


def hyperplane_best_inertia(vs):
    """Optimum over great-circle-separable 2-partitions (any n)."""
    n = vs.shape[0]
    eps = 1e-6
    best = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            base = np.cross(vs[i], vs[j])
            nb = np.linalg.norm(base)
            if nb < 1e-12:
                continue
            base = base / nb
            for da in (-eps, 0.0, eps):
                for db in (-eps, 0.0, eps):
                    nu = base + da * vs[i] + db * vs[j]
                    mask = vs @ nu > 0.0
                    k = mask.sum()
                    if k == 0 or k == n:
                        continue
                    best = min(best, partition_inertia(vs, mask))
    return float(best)


def two_blob_sample(rng, n, spread=0.35):
    c0 = rng.standard_normal(3)
    c0 /= np.linalg.norm(c0)
    c1 = rng.standard_normal(3)
    c1 -= (c1 @ c0) * c0
    c1 /= np.linalg.norm(c1)
    half = n // 2
    pts = np.concatenate(
        [
            np.repeat(c0[None, :], half, axis=0),
            np.repeat(c1[None, :], n - half, axis=0),
        ]
    )
    pts = pts + spread * rng.standard_normal((n, 3))
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def random_rotation(rng):
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


class TestSphericalKmeans:
    def test_separated_point_masses(self):
        vs = np.concatenate(
            [np.tile([0.0, 0.0, 1.0], (50, 1)), np.tile([1.0, 0.0, 0.0], (50, 1))]
        )
        res = spherical_kmeans(vs, 2, seed=1)
        assert res.inertia < 1e-12
        got = sorted(map(tuple, np.round(res.centroids, 9)))
        assert got == [(0.0, 0.0, 1.0), (1.0, 0.0, 0.0)]
        assert len(set(res.assignments[:50])) == 1
        assert len(set(res.assignments[50:])) == 1

    def test_single_cluster_is_normalized_mean(self):
        rng = np.random.default_rng(2)
        vs = rng.standard_normal((40, 3))
        vs /= np.linalg.norm(vs, axis=1, keepdims=True)
        res = spherical_kmeans(vs, 1, seed=0)
        mean = vs.mean(axis=0)
        mean /= np.linalg.norm(mean)
        np.testing.assert_allclose(res.centroids[0], mean, atol=1e-12)

    def test_hyperplane_oracle_matches_exhaustive(self):
        # validates the oracle itself before it is trusted at n=30
        for seed in range(6):
            rng = np.random.default_rng(100 + seed)
            vs = two_blob_sample(rng, 14)
            assert hyperplane_best_inertia(vs) == pytest.approx(
                exhaustive_best_inertia(vs), abs=1e-12
            )

    @pytest.mark.parametrize("seed", range(5))
    def test_attains_bruteforce_optimum_n30(self, seed):
        rng = np.random.default_rng(300 + seed)
        vs = two_blob_sample(rng, 30)
        res = spherical_kmeans(vs, 2, seed=seed, restarts=20)
        oracle = hyperplane_best_inertia(vs)
        assert res.inertia <= oracle + 1e-9

    def test_assignments_beat_alternatives(self):
        rng = np.random.default_rng(4)
        vs = two_blob_sample(rng, 60)
        res = spherical_kmeans(vs, 3, seed=5)
        dots = vs @ res.centroids.T
        for _ in range(20):
            alt = rng.integers(0, 3, size=60)
            alt_inertia = float(np.sum(1.0 - dots[np.arange(60), alt]))
            assert res.inertia <= alt_inertia + 1e-12

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(6)
        vs = two_blob_sample(rng, 40)
        rot = random_rotation(rng)
        a = spherical_kmeans(vs, 2, seed=7)
        b = spherical_kmeans(vs @ rot.T, 2, seed=7)
        expected = a.centroids @ rot.T
        for c in b.centroids:
            errs = [angular_error(c, e) for e in expected]
            assert min(errs) < 1e-7

    def test_determinism(self):
        rng = np.random.default_rng(8)
        vs = two_blob_sample(rng, 50)
        a = spherical_kmeans(vs, 2, seed=9)
        b = spherical_kmeans(vs, 2, seed=9)
        np.testing.assert_array_equal(a.centroids, b.centroids)
        np.testing.assert_array_equal(a.assignments, b.assignments)

    def test_coincident_points_degenerate(self):
        vs = np.tile([0.0, 1.0, 0.0], (10, 1))
        res = spherical_kmeans(vs, 2, seed=0)
        assert res.inertia < 1e-12

    def test_errors(self):
        vs = np.eye(3)
        with pytest.raises(ValueError):
            spherical_kmeans(vs, 4)
        with pytest.raises(ValueError):
            spherical_kmeans(vs, 0)


def split_oracle(xs):
    """Brute-force scan over every sorted split point (naive arithmetic).

    Returns the best centroid pair, its cost, and the gap to the
    second-best split; a tiny gap means two splits tie to roundoff and
    either centroid pair is a legitimate optimum.
    """
    s = np.sort(np.asarray(xs, dtype=float))
    n = s.size
    costs, pairs = [], []
    for i in range(1, n):
        left, right = s[:i], s[i:]
        costs.append(left.var() * i + right.var() * (n - i))
        pairs.append((left.mean(), right.mean()))
    order = np.argsort(costs, kind="stable")
    best = order[0]
    gap = costs[order[1]] - costs[best] if n > 2 else np.inf
    return pairs[best], costs[best], gap


def assignment_sse(xs, centroids):
    d = (np.asarray(xs, dtype=float)[:, None] - np.asarray(centroids)[None, :]) ** 2
    return float(d.min(axis=1).sum())


class TestScalarTwoMeans:
    def test_simple_pairs(self):
        np.testing.assert_allclose(scalar_two_means([0, 0, 1, 1]), (0.0, 1.0))
        np.testing.assert_allclose(
            scalar_two_means([0.1, 0.1, 0.9, 0.95]), (0.1, 0.925), atol=1e-12
        )

    def test_lloyd_stall_case(self):
        # extreme-seeded Lloyd stabilizes on {0, 1.999} | {3, 4} here,
        # which is not the optimal split; the scan must not
        xs = [0.0, 1.999, 3.0, 4.0]
        got = scalar_two_means(xs)
        np.testing.assert_allclose(got, split_oracle(xs)[0], atol=1e-12)
        np.testing.assert_allclose(got, (0.0, np.mean([1.999, 3.0, 4.0])), atol=1e-12)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_split_oracle(self, seed):
        rng = np.random.default_rng(500 + seed)
        for _ in range(25):
            n = int(rng.integers(2, 60))
            kind = rng.integers(3)
            if kind == 0:
                xs = rng.uniform(0, 1, n)
            elif kind == 1:
                xs = np.concatenate(
                    [rng.normal(0.2, 0.05, n // 2 + 1), rng.normal(0.8, 0.05, n // 2 + 1)]
                )[:n]
            else:
                xs = np.round(rng.uniform(0, 1, n), 1)  # heavy duplicates
            if xs.min() == xs.max():
                continue
            got = scalar_two_means(xs)
            want, cost, gap = split_oracle(xs)
            # achieved cost must equal the optimum; centroids must match
            # outright whenever the optimal split is unique by a margin
            assert assignment_sse(xs, got) <= cost + 1e-10 * (1 + cost)
            if gap > 1e-9:
                np.testing.assert_allclose(got, want, atol=1e-10)

    def test_degenerate_warns(self):
        with pytest.warns(UserWarning):
            c0, c1 = scalar_two_means([0.5, 0.5, 0.5])
        assert c0 == c1 == 0.5

    def test_too_few(self):
        with pytest.raises(ValueError):
            scalar_two_means([1.0])


class TestFuzzyCmeansScalar:
    def test_separated_masses(self):
        c0, c1 = fuzzy_cmeans_scalar([0.0, 0.0, 1.0, 1.0])
        assert abs(c0) < 1e-3 and abs(c1 - 1.0) < 1e-3

    def test_fuzzifier_pulls_centroids_together(self):
        # large fuzzifiers flatten memberships toward 1/c, dragging both
        # centroids toward the global mean
        rng = np.random.default_rng(99)
        xs = rng.uniform(0, 1, 60)
        lo = fuzzy_cmeans_scalar(xs, m=1.5)
        hi = fuzzy_cmeans_scalar(xs, m=3.0)
        huge = fuzzy_cmeans_scalar(xs, m=8.0)
        assert (hi[1] - hi[0]) < (lo[1] - lo[0])
        assert (huge[1] - huge[0]) < (hi[1] - hi[0])

    def test_objective_nonincreasing(self):
        rng = np.random.default_rng(32)
        xs = rng.uniform(0, 1, 40)
        objs = [
            _fcm_objective(xs, fuzzy_cmeans_scalar(xs, max_iter=k), 2.0)
            for k in (1, 2, 4, 8, 16, 200)
        ]
        for a, b in zip(objs, objs[1:]):
            assert b <= a + 1e-12

    def test_degenerate_warns(self):
        with pytest.warns(UserWarning):
            c0, c1 = fuzzy_cmeans_scalar([2.0, 2.0])
        assert c0 == c1 == 2.0

    def test_errors(self):
        with pytest.raises(ValueError):
            fuzzy_cmeans_scalar([1.0])
        with pytest.raises(ValueError):
            fuzzy_cmeans_scalar([0.0, 1.0], m=1.0)


class TestMatchSources:
    def test_identity(self):
        truth = np.eye(3)
        pairing, errs = match_sources(truth, truth)
        np.testing.assert_array_equal(pairing, [0, 1, 2])
        np.testing.assert_allclose(errs, 0.0, atol=1e-12)

    def test_crossed_pair(self):
        truth = np.array([[1.0, 0, 0], [0, 1.0, 0]])
        est = np.array([[0, 1.0, 0], [1.0, 0, 0]])
        pairing, errs = match_sources(est, truth)
        np.testing.assert_array_equal(pairing, [1, 0])
        np.testing.assert_allclose(errs, 0.0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_assignment_oracle(self, seed):
        rng = np.random.default_rng(700 + seed)
        truth = rng.standard_normal((4, 3))
        truth /= np.linalg.norm(truth, axis=1, keepdims=True)
        est = truth[rng.permutation(4)] + 0.3 * rng.standard_normal((4, 3))
        est /= np.linalg.norm(est, axis=1, keepdims=True)
        pairing, errs = match_sources(est, truth)
        cost = np.array(
            [[angular_error(t, e) for e in est] for t in truth]
        )
        rows, cols = linear_sum_assignment(cost)
        assert errs.sum() == pytest.approx(cost[rows, cols].sum(), abs=1e-12)

    def test_errors(self):
        with pytest.raises(ValueError):
            match_sources(np.eye(3), np.eye(3)[:2])
        with pytest.raises(ValueError):
            match_sources(np.zeros((0, 3)), np.zeros((0, 3)))
        nine = np.tile([0.0, 0.0, 1.0], (9, 1))
        with pytest.raises(ValueError):
            match_sources(nine, nine)


class TestWarningHygiene:
    def test_kmeans_quiet_on_clean_input(self):
        rng = np.random.default_rng(40)
        vs = two_blob_sample(rng, 20)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            spherical_kmeans(vs, 2, seed=0)
