"""Shared fixtures and independent test oracles.

The oracles here (dense row-reduction rank, brute-force subset enumeration)
deliberately do not reuse the library's column-reduction or clique-expansion
code paths.
"""

import math
from itertools import combinations

import numpy as np
import pytest

from mvbetti.core import Chain, PointCloud

HEX_H = math.sqrt(3) / 2
# Regular hexagon with side exactly 1 (all six side lengths compare <= 1.0).
HEX_POINTS = [
    [1.0, 0.0], [0.5, HEX_H], [-0.5, HEX_H],
    [-1.0, 0.0], [-0.5, -HEX_H], [0.5, -HEX_H],
]

# Regular tetrahedron: all pairwise distances are exactly sqrt(8).
TETRA_POINTS = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
TETRA_SIDE = math.sqrt(8)

UNIT_SQUARE = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]


@pytest.fixture
def hexagon():
    return PointCloud(HEX_POINTS)


@pytest.fixture
def unit_square():
    return PointCloud(UNIT_SQUARE)


def hexagon_cycle(p: int) -> Chain:
    """The oriented sum of the six hexagon sides; a 1-cycle over any field."""
    terms = {}
    for i in range(6):
        a, b = i, (i + 1) % 6
        s = (min(a, b), max(a, b))
        terms[s] = terms.get(s, 0) + (1 if a < b else -1)
    return Chain(1, p, terms)


def dense_rank_mod_p(M, p: int) -> int:
    """Row-based Gauss-Jordan rank over Z/p (independent of the library)."""
    A = (np.asarray(M, dtype=np.int64) % p).copy()
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if A[i, c] % p:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == rows:
            break
    return r


def brute_force_simplices(points, cloud: PointCloud, scale: float, max_dim: int):
    """All subsets of size <= max_dim+1 with diameter <= scale, per dimension."""
    pts = sorted(points)
    out = [[] for _ in range(max_dim + 1)]
    for q in range(max_dim + 1):
        for sub in combinations(pts, q + 1):
            if cloud.diameter(sub) <= scale:
                out[q].append(tuple(sub))
    return out


def dense_boundary(simplices_lower, simplices_upper, p: int):
    """Dense boundary matrix built independently from face formulas."""
    idx = {s: i for i, s in enumerate(simplices_lower)}
    M = np.zeros((len(simplices_lower), len(simplices_upper)), dtype=np.int64)
    for j, s in enumerate(simplices_upper):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            M[idx[face], j] = 1 if i % 2 == 0 else p - 1
    return M


def brute_force_betti(points, cloud, scale, n_max, p):
    """Betti numbers via subset enumeration plus dense rank, fully independent."""
    levels = brute_force_simplices(points, cloud, scale, n_max + 1)
    betti = []
    for n in range(n_max + 1):
        cn = len(levels[n])
        rank_n = 0
        if n >= 1 and cn:
            rank_n = dense_rank_mod_p(dense_boundary(levels[n - 1], levels[n], p), p)
        rank_next = 0
        if levels[n + 1]:
            rank_next = dense_rank_mod_p(dense_boundary(levels[n], levels[n + 1], p), p)
        betti.append(cn - rank_n - rank_next)
    return betti


def random_cloud(rng, n, d) -> PointCloud:
    return PointCloud(rng.random((n, d)))


def distance_quantile(cloud: PointCloud, q: float) -> float:
    dm = cloud.pairwise(range(cloud.n))
    iu = np.triu_indices(cloud.n, 1)
    return float(np.quantile(dm[iu], q))
