"""Top-k hub/authority identification by pruning with certified brackets.

Every candidate node carries a Gauss-Radau bracket for its exponential
centrality.  In each round the k-th largest lower bound is the survival
threshold: any node whose upper bound falls below it can never reach the
top k and is discarded for good (upper bounds only move down as the
bracket order grows).  Survivors get two more Lanczos steps and the round
repeats.  Nodes with no out-edges (hub side) or no in-edges (authority
side) score exactly cosh(0) = 1 and never enter Lanczos at all.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .graph import bipartite_operator, degrees
from .linalg import LanczosRun
from .quadrature import EXP, NodeBounds, radau_bounds_from_run, spectrum_interval
from .rankers import TIE_REL_TOL

__all__ = ["TopKReport", "identify_top_k", "rank_in_top_m"]

P_START = 3
P_STEP = 2


@dataclass
class TopKReport:
    """Outcome of a top-k (or top-k-within-top-m) selection run."""

    k: int
    side: str
    members: list
    certified: bool
    fully_ordered: bool
    iterations: dict
    bounds: dict
    candidates: list = field(default_factory=list)
    excluded_zero_degree: int = 0
    excluded_degree_one: int = 0
    ties_note: str = None
    m: int = None
    params: dict = field(default_factory=dict)

    @property
    def max_iterations(self):
        return max(self.iterations.values(), default=0)


def _tied(a, b, tie_tol):
    return abs(a - b) <= tie_tol * max(1.0, abs(a), abs(b))


class _BracketPool:
    """Per-node Lanczos state plus the tightest bracket seen so far."""

    def __init__(self, g, side, exclude_degree_one, threads):
        self.op = bipartite_operator(g)
        self.iv = spectrum_interval(g)
        self.threads = threads
        n = g.n
        out_deg, in_deg = degrees(g)
        relevant_deg = out_deg if side == "hub" else in_deg
        degree_one = (out_deg == 1) & (in_deg == 1)
        self.offset = 0 if side == "hub" else n
        self.excluded_degree_one = int(np.count_nonzero(degree_one)) if exclude_degree_one else 0
        self.eligible = [
            v for v in range(n) if not (exclude_degree_one and degree_one[v])
        ]
        self.zero_degree = {v for v in self.eligible if relevant_deg[v] == 0}
        self.runs = {}
        self.bounds = {}
        self.p = {}
        for v in self.eligible:
            if v in self.zero_degree:
                self.bounds[v] = NodeBounds(v, 1.0, 1.0, p=0, exact=True)
                self.p[v] = 0
            else:
                self.runs[v] = LanczosRun(self.op, self.offset + v)
                self.p[v] = 0

    def refinable(self, v, p_max):
        run = self.runs.get(v)
        if run is None:
            return False
        return not self.bounds.get(v, NodeBounds(v, 0, 1, 0)).exact and self.p[v] < p_max

    def refine(self, nodes, p_max):
        """Push each node's bracket order up by one schedule step."""
        todo = [v for v in sorted(nodes) if self.refinable(v, p_max)]

        def work(v):
            p_new = min(max(self.p[v] + P_STEP, P_START), p_max)
            nb = radau_bounds_from_run(self.runs[v], p_new, self.iv, EXP)
            return v, p_new, nb

        if self.threads > 1 and len(todo) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as pool:
                results = list(pool.map(work, todo))
        else:
            results = [work(v) for v in todo]
        for v, p_new, nb in results:
            old = self.bounds.get(v)
            if old is not None:
                # brackets only tighten; intersect to wash out roundoff jitter
                lower = max(old.lower, nb.lower)
                upper = min(old.upper, nb.upper)
                if lower > upper:
                    lower = upper = 0.5 * (lower + upper)
                nb = NodeBounds(nb.node, lower, upper, nb.p, nb.exact)
            self.bounds[v] = nb
            self.p[v] = max(p_new, self.p[v])
        return len(todo) > 0

    def iterations(self):
        return {v: (self.runs[v].steps if v in self.runs else 0) for v in self.eligible}


def _select_members(candidates, pool, k, tie_tol):
    """Pick k members from the surviving candidates, ids ascending inside ties."""
    mids = {v: pool.bounds[v].midpoint for v in candidates}
    ordered = sorted(candidates, key=lambda v: (-mids[v], v))
    groups = []
    current = [ordered[0]]
    for prev, v in zip(ordered, ordered[1:]):
        if _tied(mids[prev], mids[v], tie_tol):
            current.append(v)
        else:
            groups.append(sorted(current))
            current = [v]
    groups.append(sorted(current))
    members = []
    ties_note = None
    for grp in groups:
        if len(members) + len(grp) <= k:
            members.extend(grp)
        else:
            slots = k - len(members)
            if slots > 0:
                members.extend(grp[:slots])
                ties_note = (
                    f"{len(grp)} candidates tied at the rank-{len(members) - slots + 1} "
                    f"boundary; admitted lowest node ids"
                )
            break
        if len(members) == k:
            break
    return members, ties_note


def _topk_engine(g, k, side, p_max, m, exclude_degree_one, order_members, threads, tie_tol):
    if side not in ("hub", "authority"):
        raise ParameterError(f"side must be 'hub' or 'authority', got '{side}'")
    if p_max < P_START:
        raise ParameterError(f"p_max must be at least {P_START}")
    pool = _BracketPool(g, side, exclude_degree_one, threads)
    eligible = pool.eligible
    if not 1 <= k <= len(eligible):
        raise ParameterError(f"k must be in [1, {len(eligible)}] (eligible nodes), got {k}")
    m_eff = k if m is None else m
    if not k <= m_eff <= len(eligible):
        raise ParameterError(f"m must be in [{k}, {len(eligible)}], got {m_eff}")

    candidates = set(eligible)
    pool.refine(candidates, P_START)  # initial brackets at the starting order
    pruned_upper_max = -np.inf
    while True:
        lowers = sorted((pool.bounds[v].lower for v in candidates), reverse=True)
        threshold = lowers[k - 1]
        # keep anything within tie tolerance of the cut: genuinely tied nodes
        # must be resolved by the id rule, not by floating-point noise
        slack = tie_tol * max(1.0, abs(threshold))
        survivors = set()
        for v in candidates:
            if pool.bounds[v].upper < threshold - slack:
                pruned_upper_max = max(pruned_upper_max, pool.bounds[v].upper)
            else:
                survivors.add(v)
        candidates = survivors
        if len(candidates) <= m_eff:
            break
        progressed = pool.refine(candidates, p_max)
        if not progressed:
            break  # every survivor is exact or at p_max: resolve by tie rule

    members, ties_note = _select_members(candidates, pool, k, tie_tol)
    member_set = set(members)
    min_member_lower = min(pool.bounds[v].lower for v in members)
    outside_upper = max(
        (pool.bounds[v].upper for v in candidates if v not in member_set),
        default=pruned_upper_max,
    )
    outside_upper = max(outside_upper, pruned_upper_max)
    certified = outside_upper == -np.inf or min_member_lower >= outside_upper - tie_tol * max(
        1.0, abs(min_member_lower)
    )

    fully_ordered = False
    if order_members:
        while True:
            pairs_ok = all(
                pool.bounds[a].lower >= pool.bounds[b].upper - tie_tol * max(1.0, pool.bounds[a].lower)
                for a, b in zip(members, members[1:])
            )
            if pairs_ok:
                fully_ordered = True
                break
            if not pool.refine(member_set, p_max):
                break
        members, extra_note = _select_members(member_set, pool, k, tie_tol)
        ties_note = ties_note or extra_note

    return TopKReport(
        k=k,
        side=side,
        members=members,
        certified=certified,
        fully_ordered=fully_ordered,
        iterations=pool.iterations(),
        bounds={v: pool.bounds[v] for v in sorted(pool.bounds)},
        candidates=sorted(candidates),
        excluded_zero_degree=len(pool.zero_degree),
        excluded_degree_one=pool.excluded_degree_one,
        ties_note=ties_note,
        m=m,
        params={"p_max": p_max, "exclude_degree_one": exclude_degree_one},
    )


def identify_top_k(g, k, side="hub", p_max=64, exclude_degree_one=False, order_members=True, threads=1, tie_tol=TIE_REL_TOL):
    """Certified top-k nodes on one side, refining brackets only where needed.

    Round structure: prune candidates whose upper bound sits below the k-th
    largest lower bound, then deepen the survivors' Lanczos runs by two
    steps.  Stops when exactly k candidates survive (certified), or when no
    bracket can improve, in which case near-identical scores are resolved by
    ascending node id and flagged in ``ties_note``.
    """
    return _topk_engine(g, k, side, p_max, None, exclude_degree_one, order_members, threads, tie_tol)


def rank_in_top_m(g, k, m, side="hub", p_max=64, exclude_degree_one=False, threads=1, tie_tol=TIE_REL_TOL):
    """Relaxed selection: stop once the true top-k provably lies within top-m.

    Identical machinery to ``identify_top_k`` but rounds stop as soon as at
    most m candidates remain, which typically takes fewer Lanczos steps per
    node.  With m == k the two functions coincide.
    """
    return _topk_engine(g, k, side, p_max, m, exclude_degree_one, False, threads, tie_tol)
