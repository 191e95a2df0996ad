"""Shared fixtures: the three pedagogical example graphs, a seeded random
digraph suite, and dense oracle helpers used to derive expected values."""

import numpy as np
import pytest
import scipy.linalg

from hubauth import from_edges

# three small example digraphs with known score tables (stored 0-based)
EX1_EDGES = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 1), (2, 3), (3, 1)]
EX2_EDGES = [(0, 2), (1, 0), (1, 3), (2, 1), (3, 1)]
EX3_EDGES = [(1, 0), (2, 0), (3, 0), (4, 0), (5, 1), (5, 2), (5, 3), (5, 4)]

RANDOM_SUITE_SEED = 987654321
RANDOM_SUITE_SIZE = 50


@pytest.fixture(scope="session")
def ex1():
    return from_edges(EX1_EDGES)


@pytest.fixture(scope="session")
def ex2():
    return from_edges(EX2_EDGES)


@pytest.fixture(scope="session")
def ex3():
    return from_edges(EX3_EDGES)


def path_graph(n):
    return from_edges([(i, i + 1) for i in range(n - 1)], n=n)


def edgeless_graph(n):
    return from_edges([], n=n)


def random_digraph(rng):
    """One random simple digraph: n <= 40, edge probability 0.1 to 0.5."""
    n = int(rng.integers(2, 41))
    density = rng.uniform(0.1, 0.5)
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    edges = [(int(u), int(v)) for u, v in zip(*np.nonzero(mask))]
    return from_edges(edges, n=n)


@pytest.fixture(scope="session")
def random_suite():
    rng = np.random.default_rng(RANDOM_SUITE_SEED)
    return [random_digraph(rng) for _ in range(RANDOM_SUITE_SIZE)]


# ---------------------------------------------------------------------------
# dense oracles (independent of the implementation paths they check)
# ---------------------------------------------------------------------------


def dense_adjacency(g):
    return g.forward.toarray()


def dense_bipartite(g):
    """Assemble [[0, A], [A^T, 0]] directly from the adjacency matrix."""
    A = dense_adjacency(g)
    n = g.n
    M = np.zeros((2 * n, 2 * n))
    M[:n, n:] = A
    M[n:, :n] = A.T
    return M


def scipy_expm(M):
    """Third-party exponential used as an oracle against the in-package one."""
    return scipy.linalg.expm(M)


def svd_block_oracle(g):
    """Blocks of the bipartite exponential straight from the SVD of A.

    Returns (hub_block, authority_block, cross_block) where the full
    exponential is [[hub, cross], [cross^T, authority]].
    """
    A = dense_adjacency(g)
    U, s, Vt = np.linalg.svd(A)
    hub = (U * np.cosh(s)) @ U.T
    authority = (Vt.T * np.cosh(s)) @ Vt
    cross = (U * np.sinh(s)) @ Vt
    return hub, authority, cross


def google_stationary_dense(g, alpha):
    """Stationary vector of the damped walk matrix by a dense linear solve."""
    A = dense_adjacency(g)
    n = g.n
    row_sums = A.sum(axis=1)
    P = np.where(row_sums[:, None] > 0, A / np.where(row_sums[:, None] > 0, row_sums[:, None], 1.0), 1.0 / n)
    G = alpha * P + (1 - alpha) / n
    # solve x^T G = x^T with sum(x) = 1
    M = G.T - np.eye(n)
    M[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    return np.linalg.solve(M, rhs)


def permuted_graph(g, perm):
    """Relabel nodes by perm (perm[old] = new)."""
    edges = [(perm[u], perm[v], w) for u, v, w in g.edges()]
    return from_edges(edges, n=g.n, weighted=g.weighted)
