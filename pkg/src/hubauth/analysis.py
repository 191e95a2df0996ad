"""Cross-method ranking comparison and spectral diagnostics."""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import kendalltau

from .errors import SizeLimitError
from .linalg import DENSE_DIM_LIMIT, power_singular_pair

__all__ = [
    "ComparisonReport",
    "GapReport",
    "compare",
    "spectral_gap",
    "symmetry_fraction",
    "estrada_index",
]


@dataclass
class ComparisonReport:
    """Agreement between two rankings: tie-aware Kendall tau-b plus top-k overlap."""

    method_a: str
    method_b: str
    kendall_tau_b: float
    overlap_at: dict
    top_members: dict = field(default_factory=dict)


@dataclass
class GapReport:
    """Gap between the two leading singular values, with a HITS-reliability note."""

    sigma1: float
    sigma2: float
    relative_gap: float
    annotation: str


def _topk_weights(table, k):
    """Fractional top-k membership: a tie group straddling rank k shares its slots."""
    weights = {}
    filled = 0
    for grp in table.groups:
        if filled >= k:
            break
        slots = min(k - filled, len(grp))
        w = slots / len(grp)
        for v in grp:
            weights[v] = w
        filled += len(grp)
    return weights


def compare(a, b, ks=(1, 3, 5, 10)):
    """Compare two RankTables over the same node set.

    Kendall tau-b is computed on the tie-grouped rank vectors, so it is
    invariant under any strictly monotone rescaling of either score vector.
    overlap_at[k] weighs straddling tie groups fractionally, which keeps the
    measure deterministic and permutation-fair.
    """
    if len(a.ranks) != len(b.ranks):
        raise ValueError(f"rankings cover different node sets ({len(a.ranks)} vs {len(b.ranks)})")
    n = len(a.ranks)
    if np.array_equal(a.ranks, b.ranks):
        tau = 1.0
    else:
        tau = float(kendalltau(a.ranks, b.ranks)[0])
        if math.isnan(tau):
            # one ranking is a single all-tied group: correlation is undefined,
            # report 0 agreement strength
            tau = 0.0
    overlap = {}
    tops = {}
    for k in ks:
        kk = min(k, n)  # beyond n every node is in both top-k sets
        wa = _topk_weights(a, kk)
        wb = _topk_weights(b, kk)
        shared = sum(min(wa.get(v, 0.0), wb.get(v, 0.0)) for v in set(wa) | set(wb))
        overlap[k] = shared / kk
        tops[k] = {"a": a.top(kk), "b": b.top(kk)}
    return ComparisonReport(
        method_a=f"{a.source.method}/{a.source.side}",
        method_b=f"{b.source.method}/{b.source.side}",
        kendall_tau_b=tau,
        overlap_at=overlap,
        top_members=tops,
    )


def spectral_gap(g, tol=1e-10):
    """Relative gap (sigma1 - sigma2) / sigma1 with a plain-language annotation."""
    est = power_singular_pair(g, tol=tol)
    if est.sigma1 <= 0:
        return GapReport(0.0, 0.0, 0.0, "empty spectrum; no meaningful rankings")
    gap = (est.sigma1 - est.sigma2) / est.sigma1
    gap = min(max(gap, 0.0), 1.0)
    if gap < 1e-8:
        note = "degenerate dominant singular value; HITS result depends on the start vector"
    elif gap < 0.05:
        note = "small spectral gap; exponential and HITS rankings may diverge"
    else:
        note = "well-separated dominant singular value; HITS should track the exponential ranking"
    return GapReport(est.sigma1, est.sigma2, gap, note)


def symmetry_fraction(g):
    """Fraction of directed edges whose reverse edge is also present."""
    if g.m == 0:
        return 0.0
    pattern = g.forward.astype(bool)
    mutual = pattern.multiply(g.reverse.astype(bool)).nnz
    return mutual / g.m


def estrada_index(g):
    """Trace of the bipartite exponential: twice the cosh-sum of the singular values."""
    if g.n > DENSE_DIM_LIMIT:
        raise SizeLimitError(f"estrada index needs the dense singular spectrum (n <= {DENSE_DIM_LIMIT})")
    s = np.linalg.svd(g.forward.toarray(), compute_uv=False)
    return float(2.0 * np.cosh(s).sum())
