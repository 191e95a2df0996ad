"""Gauss/Radau/Lobatto estimates: bracketing, monotonicity, exactness."""

import math

import numpy as np
import pytest

from hubauth import (
    EXP,
    JacobiMatrix,
    ParameterError,
    ResolventKernel,
    bilinear_estimate,
    bipartite_operator,
    from_edges,
    gauss_estimate,
    lobatto_bound,
    power_singular_pair,
    radau_bounds,
    spectrum_interval,
)
from hubauth.linalg import LanczosRun
from hubauth.quadrature import radau_bounds_from_run

from conftest import dense_bipartite, edgeless_graph, path_graph, scipy_expm


# ---------------------------------------------------------- spectrum_interval


def test_spectrum_interval_two_cycle():
    g = from_edges([(0, 1), (1, 0)])
    iv = spectrum_interval(g)
    # Gershgorin row sum 1 beats the padded singular value 1.01
    assert iv.b == pytest.approx(1.0, abs=1e-10)
    assert iv.a == -iv.b


def test_spectrum_interval_example3(ex3):
    iv = spectrum_interval(ex3)
    # sigma_1 = 2 exactly (dense SVD oracle), Gershgorin bound is 4
    assert iv.b == pytest.approx(2.02, abs=1e-6)


def test_spectrum_interval_contains_dense_spectrum():
    g = path_graph(5)
    iv = spectrum_interval(g)
    eigs = np.linalg.eigvalsh(dense_bipartite(g))
    assert iv.a <= eigs.min() and eigs.max() <= iv.b


# -------------------------------------------------------------- gauss_estimate


def test_gauss_estimate_scalar_exp():
    J = JacobiMatrix(np.array([2.0]), np.array([]))
    assert gauss_estimate(J, EXP) == pytest.approx(math.exp(2.0), abs=1e-12)


def test_gauss_estimate_symmetric_pair_is_cosh():
    # two symmetric nodes +-1 with equal weights: the node-0 hub score of the
    # 2-cycle, and the printed value 1.5431
    J = JacobiMatrix(np.zeros(2), np.array([1.0]))
    assert gauss_estimate(J, EXP) == pytest.approx(math.cosh(1.0), abs=1e-12)
    assert gauss_estimate(J, EXP) == pytest.approx(1.5431, abs=5e-5)


def test_gauss_estimate_lower_bounds_dense_truth(ex1):
    truth = scipy_expm(dense_bipartite(ex1))[0, 0]
    run = LanczosRun(bipartite_operator(ex1), 0).extend(3)
    value = gauss_estimate(run.jacobi(3), EXP)
    assert value <= truth + 1e-12


def test_gauss_estimate_rejects_foreign_functions():
    J = JacobiMatrix(np.array([0.0]), np.array([]))
    with pytest.raises(ParameterError, match="kernel"):
        gauss_estimate(J, np.exp)


def test_resolvent_pole_inside_interval_rejected():
    J = JacobiMatrix(np.array([0.0, 0.0]), np.array([2.0]))  # nodes at +-2
    with pytest.raises(ParameterError, match="pole"):
        gauss_estimate(J, ResolventKernel(1.0))


# ---------------------------------------------------------------- radau_bounds


def test_radau_breakdown_is_exact_star_hub(ex3):
    op = bipartite_operator(ex3)
    iv = spectrum_interval(ex3)
    nb = radau_bounds(op, 5, 6, iv, EXP)
    assert nb.exact
    assert nb.lower == nb.upper
    assert nb.lower == pytest.approx(math.cosh(2.0), abs=1e-10)
    assert nb.lower == pytest.approx(3.7622, abs=5e-5)


def test_radau_edgeless_node_scores_one():
    g = edgeless_graph(3)
    op = bipartite_operator(g)
    iv = spectrum_interval(g)
    for node in range(6):
        nb = radau_bounds(op, node, 4, iv, EXP)
        assert nb.exact
        assert nb.lower == pytest.approx(1.0, abs=1e-12)


def test_radau_brackets_shrink_and_contain(ex1):
    truth = scipy_expm(dense_bipartite(ex1))[0, 0]
    op = bipartite_operator(ex1)
    iv = spectrum_interval(ex1)
    prev_width = math.inf
    for p in range(2, 7):
        nb = radau_bounds(op, 0, p, iv, EXP)
        assert nb.lower - 1e-12 <= truth <= nb.upper + 1e-12
        width = nb.upper - nb.lower
        assert width <= prev_width + 1e-12
        prev_width = width


def test_radau_reused_run_matches_fresh(ex1):
    op = bipartite_operator(ex1)
    iv = spectrum_interval(ex1)
    run = LanczosRun(op, 1)
    for p in (2, 3, 4):
        incremental = radau_bounds_from_run(run, p, iv, EXP)
        fresh = radau_bounds(op, 1, p, iv, EXP)
        assert incremental.lower == pytest.approx(fresh.lower, abs=1e-13)
        assert incremental.upper == pytest.approx(fresh.upper, abs=1e-13)


# --------------------------------------------------------------- lobatto_bound


def test_lobatto_trivial_operator():
    iv = spectrum_interval(edgeless_graph(2))
    assert lobatto_bound(np.array([[0.0]]), 0, 3, iv, EXP) == pytest.approx(1.0, abs=1e-12)


def test_lobatto_upper_bounds_truth(ex1):
    truth = scipy_expm(dense_bipartite(ex1))[0, 0]
    op = bipartite_operator(ex1)
    iv = spectrum_interval(ex1)
    assert lobatto_bound(op, 0, 4, iv, EXP) >= truth - 1e-12
    assert truth == pytest.approx(2.3319, abs=5e-5)


def test_lobatto_versus_radau_upper(ex1):
    op = bipartite_operator(ex1)
    iv = spectrum_interval(ex1)
    for p in (2, 3, 4, 5):
        radau_upper = radau_bounds(op, 0, p, iv, EXP).upper
        lob = lobatto_bound(op, 0, p, iv, EXP)
        assert lob >= radau_upper - 1e-12


# ----------------------------------------------------------- bilinear_estimate


def test_bilinear_hub_authority_on_path():
    g = path_graph(3)
    op = bipartite_operator(g)
    E = scipy_expm(dense_bipartite(g))
    got = bilinear_estimate(op, 0, g.n + 1, 8, EXP)
    assert got == pytest.approx(E[0, g.n + 1], abs=1e-10)


def test_bilinear_disconnected_nodes_are_zero():
    g = from_edges([], n=4)
    op = bipartite_operator(g)
    assert bilinear_estimate(op, 0, 1, 4, EXP) == pytest.approx(0.0, abs=1e-14)


def test_bilinear_hub_block_matches_dense(ex1):
    op = bipartite_operator(ex1)
    E = scipy_expm(dense_bipartite(ex1))
    got = bilinear_estimate(op, 0, 1, 10, EXP)
    assert got == pytest.approx(E[0, 1], abs=1e-8)


def test_bilinear_rejects_equal_indices(ex1):
    with pytest.raises(ParameterError, match="distinct"):
        bilinear_estimate(bipartite_operator(ex1), 2, 2, 4, EXP)


# ------------------------------------------------------- bounded-rule sanity


def test_gauss_below_radau_upper_at_equal_p(ex1):
    op = bipartite_operator(ex1)
    iv = spectrum_interval(ex1)
    for p in (2, 3, 4):
        run = LanczosRun(op, 0).extend(p + 1)
        gauss = gauss_estimate(run.jacobi(p), EXP)
        upper = radau_bounds(op, 0, p, iv, EXP).upper
        assert gauss <= upper + 1e-12


def test_resolvent_brackets_reproduce_dense_diagonal(ex1):
    sigma1 = power_singular_pair(ex1).sigma1
    c = 0.9 / sigma1
    kernel = ResolventKernel(c)
    M = dense_bipartite(ex1)
    truth = np.linalg.inv(np.eye(2 * ex1.n) - c * M)
    op = bipartite_operator(ex1)
    iv = spectrum_interval(ex1)
    for node in range(2 * ex1.n):
        nb = radau_bounds(op, node, 10, iv, kernel)
        assert nb.lower - 1e-8 <= truth[node, node] <= nb.upper + 1e-8
        assert nb.upper - nb.lower < 1e-6


def test_breakdown_gauss_matches_dense(ex3):
    # star center: Krylov space exhausts quickly, the estimate must be exact
    E = scipy_expm(dense_bipartite(ex3))
    op = bipartite_operator(ex3)
    run = LanczosRun(op, 5).extend(12)
    assert run.breakdown
    value = gauss_estimate(run.jacobi(), EXP)
    assert value == pytest.approx(E[5, 5], abs=1e-10)
