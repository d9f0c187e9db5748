"""Multigraph container for sphere-embedded evolving graphs.

Edges are stored as parallel arrays (src, dst, kind); parallel edges are kept
as separate records and a self-loop (src == dst) contributes exactly 1 to its
vertex's degree.  Flexible self-loops of the self-loop model are not edge
records; they live in a per-vertex counter, since they are removable.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .capindex import CapIndex
from .sphere import as_unit_vectors


class EdgeKind(IntEnum):
    PLAIN = 0
    LONG = 1
    FLEXIBLE = 2


KIND_NAMES = {EdgeKind.PLAIN: "plain", EdgeKind.LONG: "long", EdgeKind.FLEXIBLE: "flexible"}

MODEL_NAMES = ("base", "hybrid", "selfloop")

# accepted spellings for degree-kind arguments
_KIND_ALIASES = {
    "total": "total",
    "with-flexible": "total",
    "plain": "plain",
    "local": "plain",
    "long": "long",
    "non-flexible": "non-flexible",
    "nonflexible": "non-flexible",
    "flexible": "flexible",
}


@dataclass(frozen=True)
class VertexRecord:
    id: int
    position: np.ndarray
    birth_time: int
    plain_degree: int
    long_degree: int
    flexible_loop_count: int
    flexible_edge_degree: int
    isolated_birth: bool

    @property
    def total_degree(self) -> int:
        return (self.plain_degree + self.long_degree
                + self.flexible_loop_count + self.flexible_edge_degree)


def _loop_aware_degrees(src, dst, n) -> np.ndarray:
    """Degree contribution of an edge set, with self-loops counting 1."""
    deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
    loops = src == dst
    if loops.any():
        deg -= np.bincount(src[loops], minlength=n)
    return deg


class EvolvingGraph:
    """Frozen result of a generation run (or a hand-built instance in tests).

    Vertex ids are 0-based array indices; vertex i is the (i+1)-th born, so
    birth_time defaults to i+1.
    """

    def __init__(self, model: str, positions, edge_src, edge_dst, edge_kind,
                 flexible_loops=None, isolated_birth=None, birth_time=None,
                 config=None):
        self.model = str(model)
        if self.model not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.model!r}; expected one of {MODEL_NAMES}")
        self.positions = np.ascontiguousarray(as_unit_vectors(positions), dtype=np.float64)
        if self.positions.ndim != 2:
            raise ValueError("positions must have shape (n, 3)")
        n = self.positions.shape[0]
        norms = np.einsum("ij,ij->i", self.positions, self.positions)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise ValueError("positions must be unit vectors")

        self.edge_src = np.asarray(edge_src, dtype=np.int64)
        self.edge_dst = np.asarray(edge_dst, dtype=np.int64)
        self.edge_kind = np.asarray(edge_kind, dtype=np.int8)
        if not (self.edge_src.shape == self.edge_dst.shape == self.edge_kind.shape):
            raise ValueError("edge arrays must have equal length")
        if self.edge_src.size:
            lo = min(self.edge_src.min(), self.edge_dst.min())
            hi = max(self.edge_src.max(), self.edge_dst.max())
            if lo < 0 or hi >= n:
                raise ValueError("edge endpoint out of range")
            if not np.isin(self.edge_kind, list(EdgeKind)).all():
                raise ValueError("unknown edge kind")

        if flexible_loops is None:
            flexible_loops = np.zeros(n, dtype=np.int64)
        self.flexible_loops = np.asarray(flexible_loops, dtype=np.int64)
        if self.flexible_loops.shape != (n,) or (self.flexible_loops < 0).any():
            raise ValueError("flexible_loops must be n nonnegative counts")
        if isolated_birth is None:
            isolated_birth = np.zeros(n, dtype=bool)
        self.isolated_birth = np.asarray(isolated_birth, dtype=bool)
        if birth_time is None:
            birth_time = np.arange(1, n + 1, dtype=np.int64)
        self.birth_time = np.asarray(birth_time, dtype=np.int64)
        self.config = config

        # degree tallies are always recomputed from the edge list; generators
        # cross-check their running counters against these
        kinds = self.edge_kind
        self.plain_degree = _loop_aware_degrees(
            self.edge_src[kinds == EdgeKind.PLAIN], self.edge_dst[kinds == EdgeKind.PLAIN], n)
        self.long_degree = _loop_aware_degrees(
            self.edge_src[kinds == EdgeKind.LONG], self.edge_dst[kinds == EdgeKind.LONG], n)
        self.flexible_edge_degree = _loop_aware_degrees(
            self.edge_src[kinds == EdgeKind.FLEXIBLE], self.edge_dst[kinds == EdgeKind.FLEXIBLE], n)
        self.total_degree = (self.plain_degree + self.long_degree
                             + self.flexible_edge_degree + self.flexible_loops)
        self._csr = None
        self._cap_index = None

    # -- basic accessors ---------------------------------------------------

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    @property
    def num_edges(self) -> int:
        return self.edge_src.size

    def degree(self, v: int | None = None, kind: str = "total"):
        """Degree of vertex v (or the whole array for v=None) under a kind.

        Kinds: total (= with-flexible), plain (= local), long, non-flexible
        (plain + long), flexible (flexible edges + remaining flexible loops).
        """
        try:
            canon = _KIND_ALIASES[kind.lower()]
        except KeyError:
            raise ValueError(f"unknown degree kind {kind!r}") from None
        arr = {
            "total": self.total_degree,
            "plain": self.plain_degree,
            "long": self.long_degree,
            "non-flexible": self.plain_degree + self.long_degree,
            "flexible": self.flexible_edge_degree + self.flexible_loops,
        }[canon]
        if v is None:
            return arr
        return int(arr[int(v)])

    def vertex(self, v: int) -> VertexRecord:
        v = int(v)
        if not 0 <= v < self.n:
            raise ValueError(f"vertex {v} out of range")
        return VertexRecord(
            id=v,
            position=self.positions[v].copy(),
            birth_time=int(self.birth_time[v]),
            plain_degree=int(self.plain_degree[v]),
            long_degree=int(self.long_degree[v]),
            flexible_loop_count=int(self.flexible_loops[v]),
            flexible_edge_degree=int(self.flexible_edge_degree[v]),
            isolated_birth=bool(self.isolated_birth[v]),
        )

    def edges_of_kind(self, kind: EdgeKind) -> tuple[np.ndarray, np.ndarray]:
        sel = self.edge_kind == kind
        return self.edge_src[sel], self.edge_dst[sel]

    # -- vertex-set utilities ----------------------------------------------

    def _as_mask(self, S) -> np.ndarray:
        S = np.asarray(S)
        if S.dtype == bool:
            if S.shape != (self.n,):
                raise ValueError("boolean mask must have length n")
            return S
        S = S.astype(np.int64, copy=False)
        if S.size and (S.min() < 0 or S.max() >= self.n):
            raise ValueError("vertex id out of range")
        mask = np.zeros(self.n, dtype=bool)
        mask[S] = True
        return mask

    def volume(self, S) -> int:
        """Sum of total degrees over S (self-loops counting 1 each)."""
        return int(self.total_degree[self._as_mask(S)].sum())

    def boundary_edge_count(self, S) -> int:
        """Edges with exactly one endpoint in S, multiplicity counted; loops never cross."""
        mask = self._as_mask(S)
        return int(np.count_nonzero(mask[self.edge_src] != mask[self.edge_dst]))

    def conductance(self, S) -> float:
        """Boundary edge count over min(vol(S), vol(complement))."""
        mask = self._as_mask(S)
        k = int(mask.sum())
        if k == 0:
            raise ValueError("conductance undefined for empty S")
        if k == self.n:
            raise ValueError("conductance undefined for S = V")
        vol_s = int(self.total_degree[mask].sum())
        vol_c = int(self.total_degree.sum()) - vol_s
        denom = min(vol_s, vol_c)
        if denom == 0:
            raise ValueError("conductance undefined: zero-volume side")
        return self.boundary_edge_count(mask) / denom

    def induced_connected(self, S) -> bool:
        """Whether the subgraph induced by S is connected (singletons count)."""
        mask = self._as_mask(S)
        ids = np.flatnonzero(mask)
        k = ids.size
        if k == 0:
            raise ValueError("connectivity undefined for empty S")
        if k == 1:
            return True
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[ids] = np.arange(k)
        sel = mask[self.edge_src] & mask[self.edge_dst] & (self.edge_src != self.edge_dst)
        rows = pos[self.edge_src[sel]]
        cols = pos[self.edge_dst[sel]]
        adj = sp.csr_matrix((np.ones(rows.size, dtype=np.int8), (rows, cols)), shape=(k, k))
        ncomp, _ = connected_components(adj, directed=False)
        return ncomp == 1

    # -- derived structures --------------------------------------------------

    @property
    def adjacency_csr(self) -> sp.csr_matrix:
        """Symmetric adjacency over all edge kinds, self-loops dropped."""
        if self._csr is None:
            sel = self.edge_src != self.edge_dst
            s, d = self.edge_src[sel], self.edge_dst[sel]
            data = np.ones(2 * s.size, dtype=np.int8)
            self._csr = sp.csr_matrix(
                (data, (np.concatenate([s, d]), np.concatenate([d, s]))),
                shape=(self.n, self.n))
        return self._csr

    @property
    def cap_index(self) -> CapIndex:
        if self._cap_index is None:
            self._cap_index = CapIndex.from_points(self.positions)
        return self._cap_index

    # -- export ---------------------------------------------------------------

    def write_edges_csv(self, path) -> None:
        """One record per edge: src,dst,kind with kind in {plain,long,flexible}."""
        with open(path, "w") as f:
            f.write("src,dst,kind\n")
            names = np.array([KIND_NAMES[EdgeKind(k)] for k in range(3)])
            kind_names = names[self.edge_kind]
            for s, d, k in zip(self.edge_src, self.edge_dst, kind_names):
                f.write(f"{s},{d},{k}\n")

    def write_vertices_csv(self, path) -> None:
        """Vertex table: id,colatitude,longitude,birth_time."""
        z = np.clip(self.positions[:, 2], -1.0, 1.0)
        colat = np.arccos(z)
        lon = np.arctan2(self.positions[:, 1], self.positions[:, 0]) % (2.0 * np.pi)
        with open(path, "w") as f:
            f.write("id,colatitude,longitude,birth_time\n")
            for i in range(self.n):
                f.write(f"{i},{colat[i]:.17g},{lon[i]:.17g},{self.birth_time[i]}\n")
