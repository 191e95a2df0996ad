"""Directed-graph representation, file ingestion, and the bipartite operator.

A directed graph is stored in compressed sparse row form twice: once for the
adjacency matrix A (``forward``) and once for its transpose (``reverse``), so
that both A.x and A^T.x are row-major products over contiguous rows.  Graphs
are immutable after construction and safe to share across workers.
"""

import io
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import GraphFormatError

__all__ = [
    "DirectedGraph",
    "BipartiteOperator",
    "from_edges",
    "load_edge_list",
    "load_matrix_market",
    "write_edge_list",
    "degrees",
    "bipartite_operator",
    "spmv",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Immutable sparse digraph holding A and A^T in CSR form.

    Attributes
    ----------
    n : int
        Node count (>= 1).  Internal node ids are 0-based.
    forward : scipy.sparse.csr_matrix
        Adjacency matrix A; row i lists the out-neighbors of node i.
    reverse : scipy.sparse.csr_matrix
        A^T; row i lists the in-neighbors of node i.
    m : int
        Number of directed edges after normalization.
    weighted : bool
        True if the input carried explicit weights.
    self_loops_dropped : int
        How many self-loop entries were discarded during construction.
    index_base : int
        Base (0 or 1) of the node labels in the source file; used only
        for echoing ids back to the user.
    """

    n: int
    forward: sp.csr_matrix
    reverse: sp.csr_matrix
    m: int
    weighted: bool = False
    self_loops_dropped: int = 0
    index_base: int = 0

    def out_degrees(self):
        """Structural out-degree of every node (edge counts, not weights)."""
        return np.diff(self.forward.indptr)

    def in_degrees(self):
        return np.diff(self.reverse.indptr)

    def out_strengths(self):
        """Weighted out-degree (row sums of A)."""
        return np.asarray(self.forward.sum(axis=1)).ravel()

    def in_strengths(self):
        return np.asarray(self.reverse.sum(axis=1)).ravel()

    def reversed(self):
        """The graph with every edge direction flipped (A <-> A^T)."""
        return DirectedGraph(
            n=self.n,
            forward=self.reverse,
            reverse=self.forward,
            m=self.m,
            weighted=self.weighted,
            self_loops_dropped=self.self_loops_dropped,
            index_base=self.index_base,
        )

    def edges(self):
        """Iterate canonical (u, v, w) triples in row-major order."""
        A = self.forward
        for u in range(self.n):
            for idx in range(A.indptr[u], A.indptr[u + 1]):
                yield u, int(A.indices[idx]), float(A.data[idx])


@dataclass(frozen=True)
class BipartiteOperator:
    """Symmetric operator [[0, A], [A^T, 0]] of dimension 2n, matvec only.

    Index i < n addresses node i in its hub role; index n + i addresses the
    same node in its authority role.  The matrix itself is never formed for
    large graphs; ``dense()`` materializes it for dense-path computations.
    """

    graph: DirectedGraph

    @property
    def dim(self):
        return 2 * self.graph.n

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {x.shape}")
        n = self.graph.n
        top = self.graph.forward @ x[n:]
        bottom = self.graph.reverse @ x[:n]
        return np.concatenate([top, bottom])

    def dense(self):
        n = self.graph.n
        out = np.zeros((2 * n, 2 * n))
        out[:n, n:] = self.forward_dense()
        out[n:, :n] = out[:n, n:].T
        return out

    def forward_dense(self):
        return self.graph.forward.toarray()


def from_edges(edges, n=None, index_base=0, weighted=False):
    """Build a canonical DirectedGraph from (u, v) or (u, v, w) triples.

    Node ids must already be 0-based.  Duplicate edges have their weights
    summed (weight 1 each when unweighted); self-loops are dropped and
    counted.  ``n`` may declare a node count larger than the largest id so
    isolated trailing nodes are preserved.
    """
    us, vs, ws = [], [], []
    dropped = 0
    for e in edges:
        if len(e) == 3:
            u, v, w = e
        else:
            u, v = e
            w = 1.0
        if w < 0:
            raise GraphFormatError(f"negative weight {w} on edge ({u}, {v})")
        if u == v:
            dropped += 1
            continue
        us.append(u)
        vs.append(v)
        ws.append(w)
    max_id = max(max(us, default=-1), max(vs, default=-1))
    n_eff = max(n if n is not None else 0, max_id + 1)
    if n_eff < 1:
        raise GraphFormatError("graph has no edges and no declared node count")
    if n is not None and max_id >= n:
        raise GraphFormatError(f"node id {max_id} out of declared range [0, {n})")
    coo = sp.coo_matrix(
        (np.asarray(ws, dtype=float), (np.asarray(us, dtype=np.int64), np.asarray(vs, dtype=np.int64))),
        shape=(n_eff, n_eff),
    )
    forward = coo.tocsr()
    forward.sum_duplicates()
    forward.sort_indices()
    reverse = coo.T.tocsr()
    reverse.sum_duplicates()
    reverse.sort_indices()
    # merged duplicates can leave non-unit weights even in unweighted input
    weighted = weighted or bool(forward.nnz and np.any(forward.data != 1.0))
    return DirectedGraph(
        n=n_eff,
        forward=forward,
        reverse=reverse,
        m=forward.nnz,
        weighted=weighted,
        self_loops_dropped=dropped,
        index_base=index_base,
    )


def _open_text(source):
    if hasattr(source, "read"):
        return source, False
    return open(source, "r", encoding="utf-8"), True


def load_edge_list(source, index_base=0, n=None):
    """Load a whitespace-separated edge list ("u v" or "u v w" per line).

    Parameters
    ----------
    source : path or text stream
    index_base : 0 or 1
        Base of the node labels in the file.
    n : int, optional
        Declared node count; indices at or beyond it are rejected.

    Lines starting with ``#`` and blank lines are skipped.  Duplicates are
    merged with weights summed, self-loops dropped with a counter.
    """
    if index_base not in (0, 1):
        raise GraphFormatError(f"index base must be 0 or 1, got {index_base}")
    stream, owned = _open_text(source)
    edges = []
    try:
        for lineno, raw in enumerate(stream, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) not in (2, 3):
                raise GraphFormatError(f"line {lineno}: expected 2 or 3 tokens, got {len(tokens)}")
            try:
                u = int(tokens[0])
                v = int(tokens[1])
                w = float(tokens[2]) if len(tokens) == 3 else 1.0
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: {exc}") from None
            if not np.isfinite(w):
                raise GraphFormatError(f"line {lineno}: non-finite weight {tokens[2]}")
            if w < 0:
                raise GraphFormatError(f"line {lineno}: negative weight {w}")
            u -= index_base
            v -= index_base
            if u < 0 or v < 0:
                raise GraphFormatError(f"line {lineno}: node id below index base {index_base}")
            if n is not None and (u >= n or v >= n):
                raise GraphFormatError(f"line {lineno}: node id out of declared range")
            edges.append((u, v, w))
    finally:
        if owned:
            stream.close()
    weighted = any(w != 1.0 for _, _, w in edges)
    return from_edges(edges, n=n, index_base=index_base, weighted=weighted)


_MM_FIELDS = {"real", "integer", "pattern"}
_MM_SYMMETRIES = {"general", "symmetric"}


def load_matrix_market(source):
    """Load a Matrix Market coordinate file as a directed graph.

    Supports pattern/real/integer fields with general or symmetric symmetry;
    symmetric files are expanded to both edge directions.  Complex fields,
    array format, and non-square matrices are rejected.
    """
    stream, owned = _open_text(source)
    try:
        header = stream.readline()
        parts = header.strip().split()
        if len(parts) != 5 or not parts[0].startswith("%%MatrixMarket"):
            raise GraphFormatError("missing MatrixMarket header")
        _, obj, fmt, fld, sym = (p.lower() for p in parts)
        if obj != "matrix" or fmt != "coordinate":
            raise GraphFormatError(f"unsupported MatrixMarket format '{obj} {fmt}' (need matrix coordinate)")
        if fld not in _MM_FIELDS:
            raise GraphFormatError(f"unsupported MatrixMarket field '{fld}'")
        if sym not in _MM_SYMMETRIES:
            raise GraphFormatError(f"unsupported MatrixMarket symmetry '{sym}'")
        pattern = fld == "pattern"
        dims = None
        entries = []
        declared_nnz = 0
        entry_lines = 0
        for lineno, raw in enumerate(stream, start=2):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            tokens = line.split()
            if dims is None:
                if len(tokens) != 3:
                    raise GraphFormatError(f"line {lineno}: bad size line")
                nrows, ncols, declared_nnz = (int(t) for t in tokens)
                if nrows != ncols:
                    raise GraphFormatError(f"matrix is {nrows}x{ncols}, graphs require square")
                dims = (nrows, ncols)
                continue
            expected = 2 if pattern else 3
            if len(tokens) != expected:
                raise GraphFormatError(f"line {lineno}: expected {expected} tokens, got {len(tokens)}")
            try:
                u = int(tokens[0]) - 1
                v = int(tokens[1]) - 1
                w = 1.0 if pattern else float(tokens[2])
            except ValueError as exc:
                raise GraphFormatError(f"line {lineno}: {exc}") from None
            if u < 0 or v < 0 or u >= dims[0] or v >= dims[0]:
                raise GraphFormatError(f"line {lineno}: entry index out of range")
            if w < 0:
                raise GraphFormatError(f"line {lineno}: negative weight {w}")
            entry_lines += 1
            entries.append((u, v, w))
            if sym == "symmetric" and u != v:
                entries.append((v, u, w))
        if dims is None:
            raise GraphFormatError("missing size line")
        if entry_lines != declared_nnz:
            raise GraphFormatError(f"size line declares {declared_nnz} entries, file has {entry_lines}")
        weighted = not pattern and any(w != 1.0 for _, _, w in entries)
        return from_edges(entries, n=dims[0], weighted=weighted)
    finally:
        if owned:
            stream.close()


def write_edge_list(g, target=None):
    """Write the canonical 0-based sorted edge list; returns the text if no target."""
    buf = target if target is not None and hasattr(target, "write") else io.StringIO()
    for u, v, w in g.edges():
        if g.weighted:
            buf.write(f"{u} {v} {w:.17g}\n")
        else:
            buf.write(f"{u} {v}\n")
    if target is None:
        return buf.getvalue()
    if not hasattr(target, "write"):
        with open(target, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    return None


def degrees(g):
    """Return (out_degrees, in_degrees) as integer vectors."""
    return g.out_degrees(), g.in_degrees()


def bipartite_operator(g):
    """Read-only symmetric bipartite view [[0, A], [A^T, 0]] of the graph."""
    return BipartiteOperator(g)


def spmv(g, x, transpose=False):
    """Sparse product A.x (or A^T.x); row-major accumulation, deterministic."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValueError(f"expected vector of length {g.n}, got {x.shape}")
    mat = g.reverse if transpose else g.forward
    return mat @ x
