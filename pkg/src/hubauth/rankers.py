"""Hub/authority scoring schemes behind a uniform ScoreVector interface.

Every ranker returns nonnegative per-node scores plus diagnostics; the
tie-aware RankTable derived from a ScoreVector is what rankings and
comparisons operate on.  Hub scores always live on the original node ids;
the bipartite doubling is internal.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ParameterError, SizeLimitError
from .graph import bipartite_operator, degrees, spmv
from .linalg import (
    DENSE_DIM_LIMIT,
    LanczosRun,
    dense_expm,
    expm_action,
    power_singular_pair,
    spectral_radius,
)
from .quadrature import (
    EXP,
    ResolventKernel,
    bilinear_estimate,
    radau_bounds_from_run,
    spectrum_interval,
)

__all__ = [
    "TIE_REL_TOL",
    "ScoreVector",
    "RankTable",
    "rank_table",
    "hits",
    "exp_centrality_exact",
    "exp_centrality_quadrature",
    "truncated_spectral_scores",
    "katz_row_col",
    "resolvent_bipartite",
    "expA_row_col_sums",
    "pagerank",
    "degree_scores",
    "communicability",
]

# Scores closer than this (relative to max(1, score)) are treated as tied.
TIE_REL_TOL = 1e-8


@dataclass
class ScoreVector:
    """Per-node scores for one method and one side of the hub/authority pair."""

    method: str
    side: str
    scores: np.ndarray
    params: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        if not np.all(np.isfinite(self.scores)):
            raise ValueError(f"{self.method}/{self.side}: non-finite scores")


@dataclass
class RankTable:
    """Descending-score node ordering with explicit tie groups.

    ``order`` lists node ids best-first (ids ascending inside a tie group);
    ``ranks[v]`` is the competition rank of node v (tied nodes share the
    rank of their group's first slot).
    """

    order: list
    ranks: np.ndarray
    groups: list
    source: ScoreVector

    def same_ranking(self, other):
        return np.array_equal(self.ranks, other.ranks)

    def top(self, k):
        return self.order[:k]


def rank_table(sv, tie_tol=TIE_REL_TOL):
    """Build the tie-aware ranking induced by a score vector."""
    scores = sv.scores
    n = len(scores)
    order = sorted(range(n), key=lambda i: (-scores[i], i))
    groups = []
    current = [order[0]] if n else []
    for prev, node in zip(order, order[1:]):
        gap = scores[prev] - scores[node]
        if gap <= tie_tol * max(1.0, abs(scores[prev])):
            current.append(node)
        else:
            groups.append(sorted(current))
            current = [node]
    if current:
        groups.append(sorted(current))
    flat = [v for grp in groups for v in grp]
    ranks = np.zeros(n, dtype=int)
    pos = 1
    for grp in groups:
        for v in grp:
            ranks[v] = pos
        pos += len(grp)
    return RankTable(order=flat, ranks=ranks, groups=groups, source=sv)


def _sum_normalize(v):
    s = v.sum()
    return v / s if s > 0 else v


def hits(g, tol=1e-10, max_iter=1000, init=None):
    """Kleinberg's alternating iteration for hub and authority weights.

    Starting from a constant authority vector (or ``init``), repeat
    y <- A x and x <- A^T y with 2-norm normalization after each half-step
    until the max-norm change of both iterates drops below ``tol``.
    Reported scores are rescaled to sum 1.  When the dominant eigenvalue of
    A^T A is (near-)degenerate the result depends on the start vector; the
    ``degenerate`` diagnostic flags that condition.
    """
    if g.m < 1:
        raise ParameterError("HITS requires at least one edge")
    n = g.n
    if init is None:
        x = np.ones(n) / math.sqrt(n)
    else:
        x = np.asarray(init, dtype=float)
        if x.shape != (n,) or np.any(x < 0) or not x.any():
            raise ParameterError("init must be a nonnegative nonzero vector of length n")
        x = x / np.linalg.norm(x)
    y = np.zeros(n)
    converged = False
    iterations = 0
    change = math.inf
    for _ in range(max_iter):
        y_new = spmv(g, x)
        ny = np.linalg.norm(y_new)
        if ny == 0.0:
            break
        y_new /= ny
        x_new = spmv(g, y_new, transpose=True)
        nx = np.linalg.norm(x_new)
        if nx == 0.0:
            break
        x_new /= nx
        iterations += 1
        change = max(
            np.linalg.norm(x_new - x, np.inf),
            np.linalg.norm(y_new - y, np.inf),
        )
        x, y = x_new, y_new
        if change < tol:
            converged = True
            break
    est = power_singular_pair(g, tol=min(tol, 1e-10))
    degenerate = est.sigma1 - est.sigma2 < max(tol, 1e-12) * est.sigma1 if est.sigma1 > 0 else True
    diag = {
        "iterations": iterations,
        "residual": change,
        "converged": converged,
        "degenerate": degenerate,
        "sigma1": est.sigma1,
        "sigma2": est.sigma2,
    }
    params = {"tol": tol, "max_iter": max_iter}
    hub = ScoreVector("hits", "hub", _sum_normalize(y), params, dict(diag))
    authority = ScoreVector("hits", "authority", _sum_normalize(x), params, dict(diag))
    return hub, authority


def exp_centrality_exact(g):
    """Exponential hub/authority centrality from the dense bipartite exponential.

    hub_i is the i-th diagonal entry of e^{[[0,A],[A^T,0]]} (equivalently of
    cosh applied to the singular structure of A); authority_i is entry n+i.
    """
    n = g.n
    if 2 * n > DENSE_DIM_LIMIT:
        raise SizeLimitError(f"dense path limited to 2n <= {DENSE_DIM_LIMIT}")
    E = dense_expm(bipartite_operator(g).dense())
    diag = np.diag(E)
    hub = ScoreVector("exp-exact", "hub", diag[:n].copy())
    authority = ScoreVector("exp-exact", "authority", diag[n:].copy())
    return hub, authority


def _refine_bracket(run, iv, f, p_max, width_tol, p_start=3, p_step=2):
    """Grow a node's Lanczos run until its Radau bracket is narrow enough.

    Brackets from successive orders are intersected, which keeps the
    reported bracket monotone even under roundoff jitter.
    """
    best = None
    p = p_start
    while True:
        nb = radau_bounds_from_run(run, p, iv, f)
        if best is None:
            best = nb
        else:
            lower = max(best.lower, nb.lower)
            upper = min(best.upper, nb.upper)
            if lower > upper:
                lower = upper = 0.5 * (lower + upper)
            best = type(nb)(nb.node, lower, upper, nb.p, nb.exact)
        if best.exact or best.width <= width_tol * max(1.0, abs(best.lower)):
            return best, True
        if run.breakdown:
            # Krylov space exhausted: one more pass at the full order is exact
            p = run.steps
            continue
        if p >= p_max:
            return best, best.exact
        p = min(p + p_step, p_max)


def exp_centrality_quadrature(g, p_max=40, width_tol=1e-8, threads=1):
    """Exponential centrality scored by certified Gauss-Radau brackets.

    Per node the bracket is refined (p = 3, 5, ...) until its width falls
    below ``width_tol`` relative to the score or ``p_max`` is reached; the
    reported score is the bracket midpoint and the bracket itself lands in
    the diagnostics.  Nodes whose brackets stay wide are flagged, never
    dropped.
    """
    n = g.n
    op = bipartite_operator(g)
    iv = spectrum_interval(g)

    def solve(index):
        run = LanczosRun(op, index)
        return _refine_bracket(run, iv, EXP, p_max, width_tol)

    indices = range(2 * n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, indices))
    else:
        results = [solve(i) for i in indices]
    bounds = [r[0] for r in results]
    resolved = [r[1] for r in results]
    scores = np.array([b.midpoint for b in bounds])
    params = {"p_max": p_max, "width_tol": width_tol}
    hub = ScoreVector(
        "exp-quad",
        "hub",
        scores[:n],
        params,
        {"bounds": bounds[:n], "unresolved": [i for i in range(n) if not resolved[i]]},
    )
    authority = ScoreVector(
        "exp-quad",
        "authority",
        scores[n:],
        params,
        {"bounds": bounds[n:], "unresolved": [i for i in range(n) if not resolved[n + i]]},
    )
    return hub, authority


def truncated_spectral_scores(g, k, tol=TIE_REL_TOL):
    """Centrality from the k leading eigenpairs of the bipartite operator.

    The bipartite eigenvalues are the signed singular values of A; summing
    e^lambda * (eigvec entries)^2 over the k largest interpolates between
    HITS (k=1, squared dominant singular vectors) and the full exponential
    centrality (k=2n).  When the cut falls inside a group of (numerically)
    equal eigenvalues, the whole group enters with fractional weight: the
    group projector is basis-independent, so the scores stay deterministic
    and permutation-equivariant even for degenerate spectra (which are
    still flagged).
    """
    n = g.n
    if not 1 <= k <= 2 * n:
        raise ParameterError(f"k must be in [1, {2 * n}], got {k}")
    if n <= DENSE_DIM_LIMIT:
        U, s, Vt = np.linalg.svd(g.forward.toarray())
        lams = np.concatenate([s, -s[::-1]])
    else:
        if k >= n - 8:
            raise SizeLimitError("full singular spectrum of a large graph is out of reach")
        import scipy.sparse.linalg as spla

        try:
            U, s, Vt = spla.svds(g.forward.astype(float), k=min(k + 8, n - 1))
        except Exception as exc:  # pragma: no cover - solver specific
            raise ConvergenceError(f"singular-triplet solver failed: {exc}") from exc
        desc = np.argsort(-s)
        U, s, Vt = U[:, desc], s[desc], Vt[desc]
        lams = s
    group_tol = tol * max(1.0, float(s[0]) if len(s) else 1.0)
    weights = np.zeros(len(lams))
    cut_ambiguous = False
    filled = 0
    t = 0
    while filled < k:
        t_end = t + 1
        while t_end < len(lams) and abs(lams[t_end] - lams[t_end - 1]) <= group_tol:
            t_end += 1
        if t_end == len(lams) and len(lams) < 2 * n:
            raise ConvergenceError(
                "eigenvalue group at the truncation cut extends beyond the computed triplets"
            )
        size = t_end - t
        slots = min(k - filled, size)
        weights[t:t_end] = slots / size
        cut_ambiguous = cut_ambiguous or slots < size
        filled += slots
        t = t_end
    hub = np.zeros(n)
    authority = np.zeros(n)
    for term in np.nonzero(weights)[0]:
        idx = term if term < n else 2 * n - 1 - term
        lam = s[idx] if term < n else -s[idx]
        w = 0.5 * weights[term] * math.exp(lam)
        hub += w * U[:, idx] ** 2
        authority += w * Vt[idx] ** 2
    degenerate = len(s) > 1 and s[0] - s[1] < tol * max(s[0], 1e-300)
    diag = {
        "degenerate": bool(degenerate),
        "cut_ambiguous": bool(cut_ambiguous),
        "eigenvalues": lams[: min(k, len(lams))].tolist(),
    }
    params = {"k": k}
    return (
        ScoreVector("spectral", "hub", hub, params, dict(diag)),
        ScoreVector("spectral", "authority", authority, params, dict(diag)),
    )


def katz_row_col(g, c=None, tol=1e-10, max_iter=200000):
    """Katz hub/authority scores from (I - cA) y = 1 and (I - cA^T) x = 1.

    Solved by the fixed-point iteration y <- 1 + cAy (a Neumann series);
    converges for 0 < c < 1/rho(A).  Default c = 1/(rho(A) + 0.1).
    """
    rad = spectral_radius(g)
    if c is None:
        c = 1.0 / (rad.value + 0.1)
    if c <= 0 or (rad.value > 0 and c >= 1.0 / rad.value):
        raise ParameterError(
            f"katz parameter must satisfy 0 < c < 1/rho(A) ~= {1.0 / rad.value if rad.value > 0 else math.inf:.6g}, got {c}"
        )

    def solve(transpose):
        ones = np.ones(g.n)
        y = ones.copy()
        for _ in range(max_iter):
            y_new = ones + c * spmv(g, y, transpose=transpose)
            resid = np.linalg.norm(y_new - y, np.inf)
            y = y_new
            if not np.all(np.isfinite(y)) or np.linalg.norm(y, np.inf) > 1e150:
                raise ConvergenceError("katz iteration diverged; parameter c too large")
            if resid <= tol * max(np.linalg.norm(y, np.inf), 1.0):
                return y
        raise ConvergenceError("katz iteration did not converge")

    hub_scores = solve(False)
    auth_scores = solve(True)
    params = {"c": c, "tol": tol}
    diag = {"rho_estimate": rad.value, "rho_converged": rad.converged}
    return (
        ScoreVector("katz", "hub", hub_scores, params, dict(diag)),
        ScoreVector("katz", "authority", auth_scores, params, dict(diag)),
    )


def resolvent_bipartite(g, c=None, mode="auto", p_max=40, width_tol=1e-9, threads=1):
    """Diagonals of (I - c^2 A A^T)^{-1} (hubs) and (I - c^2 A^T A)^{-1} (authorities).

    These are the diagonal blocks of the bipartite resolvent (I - c op)^{-1},
    so the quadrature path runs the Radau machinery with the resolvent
    kernel; the dense path solves directly.  Requires 0 < c < 1/sigma_1.
    """
    n = g.n
    est = power_singular_pair(g)
    if c is None:
        c = 0.9 / est.sigma1 if est.sigma1 > 0 else 0.5
    if c <= 0 or (est.sigma1 > 0 and c >= 1.0 / est.sigma1):
        raise ParameterError(
            f"resolvent parameter must satisfy 0 < c < 1/sigma_1 ~= {1.0 / est.sigma1 if est.sigma1 > 0 else math.inf:.6g}, got {c}"
        )
    if mode not in ("auto", "dense", "quadrature"):
        raise ParameterError(f"unknown mode '{mode}'")
    if mode == "auto":
        mode = "dense" if 2 * n <= DENSE_DIM_LIMIT else "quadrature"
    params = {"c": c, "mode": mode}
    if mode == "dense":
        if 2 * n > DENSE_DIM_LIMIT:
            raise SizeLimitError(f"dense path limited to 2n <= {DENSE_DIM_LIMIT}")
        A = g.forward.toarray()
        hub = np.diag(np.linalg.inv(np.eye(n) - c**2 * (A @ A.T)))
        authority = np.diag(np.linalg.inv(np.eye(n) - c**2 * (A.T @ A)))
        return (
            ScoreVector("resolvent", "hub", hub.copy(), params),
            ScoreVector("resolvent", "authority", authority.copy(), params),
        )
    op = bipartite_operator(g)
    iv = spectrum_interval(g, estimate=est)
    kernel = ResolventKernel(c)

    def solve(index):
        return _refine_bracket(LanczosRun(op, index), iv, kernel, p_max, width_tol)

    indices = range(2 * n)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve, indices))
    else:
        results = [solve(i) for i in indices]
    scores = np.array([r[0].midpoint for r in results])
    diag = {"bounds": [r[0] for r in results]}
    return (
        ScoreVector("resolvent", "hub", scores[:n], params, dict(diag)),
        ScoreVector("resolvent", "authority", scores[n:], params, dict(diag)),
    )


def expA_row_col_sums(g):
    """Row sums of e^A as hub scores, column sums as authority scores."""
    ones = np.ones(g.n)
    hub = expm_action(g, ones)
    authority = expm_action(g, ones, transpose=True)
    return (
        ScoreVector("expsum", "hub", hub),
        ScoreVector("expsum", "authority", authority),
    )


def pagerank(g, alpha=0.85, tol=1e-12, max_iter=20000, reverse=False):
    """Stationary distribution of the damped random-walk matrix.

    Rows of the walk matrix are out-edge distributions; dangling rows are
    replaced by the uniform distribution.  ``reverse=True`` runs the same
    computation on the edge-reversed graph, which ranks hubs.
    """
    if not 0 < alpha < 1:
        raise ParameterError(f"alpha must be in (0, 1), got {alpha}")
    work = g.reversed() if reverse else g
    n = work.n
    out_strength = work.out_strengths()
    dangling = out_strength == 0.0
    inv_out = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out_strength))
    x = np.ones(n) / n
    converged = False
    iterations = 0
    for _ in range(max_iter):
        contrib = spmv(work, x * inv_out, transpose=True)
        dangling_mass = float(x[dangling].sum())
        x_new = alpha * (contrib + dangling_mass / n) + (1.0 - alpha) / n
        x_new /= x_new.sum()
        iterations += 1
        delta = np.linalg.norm(x_new - x, 1)
        x = x_new
        if delta < tol:
            converged = True
            break
    side = "hub" if reverse else "authority"
    return ScoreVector(
        "pagerank",
        side,
        x,
        {"alpha": alpha, "tol": tol, "reverse": reverse},
        {"iterations": iterations, "converged": converged},
    )


def degree_scores(g):
    """Out-degree as hub score, in-degree as authority score."""
    out_deg, in_deg = degrees(g)
    return (
        ScoreVector("degree", "hub", out_deg.astype(float)),
        ScoreVector("degree", "authority", in_deg.astype(float)),
    )


def communicability(g, i, j, kind="hub_authority", mode="dense", p=20):
    """One off-diagonal entry of the bipartite exponential.

    kind selects the block: 'hub' compares i and j as hubs, 'authority'
    as authorities, 'hub_authority' couples i's hub role to j's authority
    role.  Dense mode reads the entry off the full exponential; quadrature
    mode estimates it by polarization.
    """
    n = g.n
    if not (0 <= i < n and 0 <= j < n):
        raise ParameterError("node ids out of range")
    if kind == "hub":
        a, b = i, j
    elif kind == "authority":
        a, b = n + i, n + j
    elif kind == "hub_authority":
        a, b = i, n + j
    else:
        raise ParameterError(f"unknown communicability kind '{kind}'")
    if a == b and kind != "hub_authority":
        raise ParameterError("communicability needs two distinct nodes; use centrality for i == j")
    op = bipartite_operator(g)
    if mode == "dense":
        if op.dim > DENSE_DIM_LIMIT:
            raise SizeLimitError(f"dense path limited to 2n <= {DENSE_DIM_LIMIT}")
        return float(dense_expm(op.dense())[a, b])
    if mode == "quadrature":
        return float(bilinear_estimate(op, a, b, p, EXP))
    raise ParameterError(f"unknown mode '{mode}'")
