"""Measurements on frozen graphs: degree laws, diameters, neighborhoods,
community certification, expander scans, tree statistics, concentration.

All operations are read-only.  Neighborhoods C_R(v) are geometric (angular
balls around the vertex position), not graph-distance balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
from scipy.optimize import minimize_scalar
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.special import gammaln, zeta

from .graph import EdgeKind, EvolvingGraph
from .sphere import cap_area

# ---------------------------------------------------------------------------
# degree histograms and the analytic degree law


@dataclass(frozen=True)
class DegreeHistogram:
    """Counts d_k of vertices with degree k, for one degree kind."""

    counts: dict[int, int]
    kind: str
    n: int

    def __post_init__(self):
        if any(k < 0 for k in self.counts):
            raise ValueError("negative degree in histogram")
        if sum(self.counts.values()) != self.n:
            raise ValueError("histogram counts must sum to n")

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        ks = np.array(sorted(self.counts), dtype=np.int64)
        return ks, np.array([self.counts[int(k)] for k in ks], dtype=np.int64)

    def total_samples(self, k_min: int = 0) -> int:
        return sum(c for k, c in self.counts.items() if k >= k_min)

    def write_csv(self, path) -> None:
        ks, cs = self.as_arrays()
        with open(path, "w") as f:
            f.write("k,count\n")
            for k, c in zip(ks, cs):
                f.write(f"{k},{c}\n")

    def to_json_dict(self) -> dict:
        ks, cs = self.as_arrays()
        return {"kind": self.kind, "n": self.n,
                "k": ks.tolist(), "count": cs.tolist()}


def degree_histogram(g: EvolvingGraph, kind: str = "total") -> DegreeHistogram:
    deg = g.degree(None, kind)
    binned = np.bincount(deg)
    counts = {int(k): int(c) for k, c in enumerate(binned) if c > 0}
    return DegreeHistogram(counts=counts, kind=kind, n=g.n)


def analytic_fk(k, m: int, xi: float, delta: float):
    """Stationary fraction of degree-k vertices under attachment weight
    deg + delta with m contacts per arrival.

    Solves (2+xi+k+delta) f_k = (k-1+delta) f_{k-1} + (2+xi) 1[k=m], so
    f_m = (2+xi)/(2+xi+m+delta) and for k > m the product of the recurrence
    ratios telescopes into a Gamma form, evaluated through log-Gamma.
    Scalar or array k; f_k = 0 below k = m.
    """
    m = int(m)
    xi = float(xi)
    delta = float(delta)
    if m < 1:
        raise ValueError("m must be >= 1")
    if not np.isfinite(xi) or xi <= 0.0:
        raise ValueError("xi must be a positive finite float")
    if not np.isfinite(delta) or delta <= 0.0:
        raise ValueError("delta must be a positive finite float")
    karr = np.asarray(k)
    if not np.issubdtype(karr.dtype, np.number):
        raise ValueError("k must be numeric")
    kf = karr.astype(np.float64)
    log_fm = math.log(2.0 + xi) - math.log(2.0 + xi + m + delta)
    with np.errstate(invalid="ignore"):
        log_ratio = (gammaln(kf + delta) + gammaln(m + 3.0 + xi + delta)
                     - gammaln(kf + 3.0 + xi + delta) - gammaln(m + delta))
    out = np.where(karr >= m, np.exp(log_fm + log_ratio), 0.0)
    if karr.ndim == 0:
        return float(out)
    return out


class PowerLawFit(NamedTuple):
    exponent: float
    stderr: float
    k_min: int
    tail_count: int


def fit_power_law_exponent(h: DegreeHistogram, k_min: int) -> PowerLawFit:
    """Discrete maximum-likelihood exponent over the histogram tail k >= k_min.

    Model: P(k) = k^-alpha / zeta(alpha, k_min) on k = k_min, k_min+1, ...
    The estimate depends only on sample proportions; the standard error comes
    from the observed information (numeric second derivative at the optimum).
    """
    k_min = int(k_min)
    if k_min < 1:
        raise ValueError("k_min must be >= 1")
    ks, cs = h.as_arrays()
    sel = ks >= k_min
    ks, cs = ks[sel].astype(np.float64), cs[sel].astype(np.float64)
    n_tail = int(cs.sum())
    if n_tail < 100:
        raise ValueError(f"only {n_tail} samples with k >= {k_min}; need at least 100")
    if ks.size < 2:
        raise ValueError("degenerate tail: a single distinct degree value")
    slogk = float(np.dot(cs, np.log(ks)))

    def nll(alpha: float) -> float:
        return alpha * slogk + n_tail * math.log(zeta(alpha, k_min))

    res = minimize_scalar(nll, bounds=(1.0001, 12.0), method="bounded",
                          options={"xatol": 1e-8})
    alpha = float(res.x)
    eps = 1e-4
    info = (nll(alpha + eps) - 2.0 * nll(alpha) + nll(alpha - eps)) / eps ** 2
    stderr = float(1.0 / math.sqrt(info)) if info > 0 else float("inf")
    return PowerLawFit(exponent=alpha, stderr=stderr, k_min=k_min, tail_count=n_tail)


# ---------------------------------------------------------------------------
# shortest-path diameters


@dataclass(frozen=True)
class DiameterReport:
    diameter: int
    connected: bool
    method: str
    mode: str
    n_components: int
    component_diameters: tuple[int, ...] | None = None

    def to_json_dict(self) -> dict:
        d = {"diameter": self.diameter, "connected": self.connected,
             "method": self.method, "mode": self.mode,
             "n_components": self.n_components}
        if self.component_diameters is not None:
            d["component_diameters"] = list(self.component_diameters)
        return d


_BFS_ALL_MAX_N = 10 ** 4


def _sssp(csr, source: int) -> np.ndarray:
    return dijkstra(csr, unweighted=True, indices=source)


def _diameter_bfs_all(csr) -> int:
    """Exact diameter by BFS from every vertex, 64 sources per pass.

    Frontier and visited sets carry one bit per source lane, so each level
    is a single gather + or-reduce over the edge array shared by 64 BFS
    runs at once.
    """
    n = csr.shape[0]
    if n <= 1:
        return 0
    indptr = csr.indptr.astype(np.int64)
    indices = csr.indices.astype(np.int64)
    if (np.diff(indptr) == 0).any():
        raise ValueError("component not connected")
    best = 0
    gathered = np.empty(indices.size, dtype=np.uint64)
    red_idx = indptr[:-1]
    first = True
    for lo in range(0, n, 64):
        k = min(64, n - lo)
        visited = np.zeros(n, dtype=np.uint64)
        visited[lo:lo + k] = np.uint64(1) << np.arange(k, dtype=np.uint64)
        frontier = visited.copy()
        level = 0
        while True:
            np.take(frontier, indices, out=gathered)
            nxt = np.bitwise_or.reduceat(gathered, red_idx)
            nxt &= ~visited
            if not nxt.any():
                break
            level += 1
            visited |= nxt
            frontier = nxt
        if first:
            # connectivity is lane-independent; checking one batch suffices
            if not (visited == np.uint64((1 << k) - 1)).all():
                raise ValueError("component not connected")
            first = False
        best = max(best, level)
    return best


def _diameter_prune(csr, bail_at: int | None = None) -> int | None:
    """Exact diameter via double-sweep lower bound plus fringe-level pruning.

    From a midpoint u of an (approximately) diametral path, every vertex at
    level i from u has eccentricity at most 2i, so scanning levels downward
    can stop once the lower bound reaches 2i.  Pruning pays off only when
    few vertices sit on levels above lb/2; on low-diameter graphs nearly
    everything does.  When bail_at is given and the pending fringe exceeds
    it, returns None so the caller can switch to the batched-BFS method.
    """
    n = csr.shape[0]
    if n == 1:
        return 0
    deg = np.diff(csr.indptr)
    start = int(np.argmax(deg))
    d0 = _sssp(csr, start)
    if not np.isfinite(d0).all():
        raise ValueError("component not connected")
    lb = 0
    mid = start
    for _ in range(2):  # repeated double sweeps sharpen the lower bound
        a = int(np.argmax(d0))
        d_a, pred = dijkstra(csr, unweighted=True, indices=a,
                             return_predecessors=True)
        b = int(np.argmax(d_a))
        if d_a[b] > lb:
            lb = int(d_a[b])
            v = b
            for _ in range(lb // 2):  # walk halfway back along the path
                v = int(pred[v])
            mid = v
        d0 = _sssp(csr, b)
    d_mid = _sssp(csr, mid)
    ecc_mid = int(d_mid.max())
    levels = [np.flatnonzero(d_mid == i) for i in range(ecc_mid + 1)]
    if bail_at is not None:
        pending = sum(levels[i].size for i in range(ecc_mid, 0, -1)
                      if 2 * i > lb)
        if pending > bail_at:
            return None
    for i in range(ecc_mid, 0, -1):
        if lb >= 2 * i:
            break
        for v in levels[i]:
            ecc = int(_sssp(csr, int(v)).max())
            if ecc > lb:
                lb = ecc
    return lb


def _component_diameter(csr, method: str | None) -> tuple[int, str]:
    n = csr.shape[0]
    if method is None:
        if n > _BFS_ALL_MAX_N:
            # pruning wins on long thin graphs; batched BFS on compact ones
            d = _diameter_prune(csr, bail_at=max(64, n // 1000))
            if d is not None:
                return d, "double-sweep-prune"
        return _diameter_bfs_all(csr), "bfs-all"
    if method == "bfs-all":
        return _diameter_bfs_all(csr), method
    if method == "double-sweep-prune":
        return _diameter_prune(csr), method
    raise ValueError(f"unknown diameter method {method!r}")


def diameter(g: EvolvingGraph, mode: str = "exact",
             method: str | None = None) -> DiameterReport:
    """Exact hop-count diameter.

    mode "exact" requires a connected graph; mode "component-wise" reports a
    diameter per connected component (sorted descending) and the maximum.
    method is chosen by component size unless forced.
    """
    if mode not in ("exact", "component-wise"):
        raise ValueError(f"unknown mode {mode!r}")
    adj = g.adjacency_csr
    ncomp, labels = connected_components(adj, directed=False)
    if mode == "exact":
        if ncomp > 1:
            raise ValueError(f"graph has {ncomp} components; use mode='component-wise'")
        d, used = _component_diameter(adj, method)
        return DiameterReport(diameter=d, connected=True, method=used,
                              mode=mode, n_components=1)
    comp_sizes = np.bincount(labels, minlength=ncomp)
    largest = int(np.argmax(comp_sizes))
    diams = []
    used = None
    for c in range(ncomp):
        members = np.flatnonzero(labels == c)
        sub = adj[members][:, members]
        d, meth = _component_diameter(sub, method)
        diams.append(d)
        if c == largest:
            used = meth  # record the method used on the largest component
    diams.sort(reverse=True)
    return DiameterReport(diameter=diams[0], connected=(ncomp == 1), method=used,
                          mode=mode, n_components=ncomp,
                          component_diameters=tuple(diams))


# ---------------------------------------------------------------------------
# geometric neighborhoods and communities


def r_neighborhood(g: EvolvingGraph, v: int, R: float) -> np.ndarray:
    """Sorted ids of all vertices within angular distance R of vertex v."""
    v = int(v)
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} out of range")
    return g.cap_index.query_cap(g.positions[v], min(float(R), np.pi))


@dataclass(frozen=True)
class CommunityReport:
    center: int
    radius: float
    size: int
    connected: bool
    conductance: float
    alpha: float
    beta: float
    size_cap: float
    satisfies: bool

    def to_json_dict(self) -> dict:
        return {"center": self.center, "radius": self.radius, "size": self.size,
                "connected": self.connected, "conductance": self.conductance,
                "alpha": self.alpha, "beta": self.beta,
                "size_cap": self.size_cap, "satisfies": self.satisfies}


def community_check(g: EvolvingGraph, v: int, R: float, alpha: float,
                    beta: float, size_cap: float) -> CommunityReport:
    """Certify the angular neighborhood C_R(v) as a community.

    satisfies means: induced-connected, conductance <= alpha / size**beta,
    and size <= size_cap (the caller evaluates its own polylog size bound).
    Conductance domain errors (e.g. C_R(v) = V) propagate.
    """
    members = r_neighborhood(g, v, R)
    size = int(members.size)
    connected = g.induced_connected(members)
    phi = g.conductance(members)
    ok = bool(connected and phi <= alpha / size ** beta and size <= size_cap)
    return CommunityReport(center=int(v), radius=float(R), size=size,
                           connected=connected, conductance=float(phi),
                           alpha=float(alpha), beta=float(beta),
                           size_cap=float(size_cap), satisfies=ok)


def long_degree_sum(g: EvolvingGraph, v: int, R: float) -> int:
    """Sum of long-edge degrees over the neighborhood C_R(v); 0 when the
    graph has no long edges."""
    members = r_neighborhood(g, v, R)
    return int(g.degree(None, "long")[members].sum())


# ---------------------------------------------------------------------------
# tree statistics for the recursive subtrees


class TreeStats(NamedTuple):
    diameter: int
    max_degree: int


def urt_stats(g: EvolvingGraph) -> TreeStats:
    """Diameter and maximum degree of the recursive-tree subgraph.

    Hybrid graphs contribute their long edges, self-loop graphs their
    flexible edges.  Raises if the selected edges do not form a spanning
    tree (wrong model, cycles, or disconnection).
    """
    if g.model == "hybrid":
        kind = EdgeKind.LONG
    elif g.model == "selfloop":
        kind = EdgeKind.FLEXIBLE
    else:
        raise ValueError(f"model {g.model!r} has no tree-edge kind")
    sel = g.edge_kind == kind
    src, dst = g.edge_src[sel], g.edge_dst[sel]
    n = g.n
    if src.size != n - 1:
        raise ValueError(f"{src.size} tree edges for {n} vertices; not a spanning tree")
    if (src == dst).any():
        raise ValueError("tree edges contain a self-loop")
    ones = np.ones(src.size, dtype=np.int8)
    adj = sp.csr_matrix((ones, (src, dst)), shape=(n, n))
    adj = adj + adj.T
    ncomp, _ = connected_components(adj, directed=False)
    if ncomp != 1:
        raise ValueError(f"tree edges split into {ncomp} components; not a spanning tree")
    # n-1 edges + connected => a tree; its diameter falls out of two sweeps
    d0 = _sssp(adj, 0)
    a = int(np.argmax(d0))
    diam = int(_sssp(adj, a).max())
    deg = np.bincount(src, minlength=n) + np.bincount(dst, minlength=n)
    return TreeStats(diameter=diam, max_degree=int(deg.max()))


# ---------------------------------------------------------------------------
# occupancy/attachment-mass concentration


@dataclass(frozen=True)
class ConcentrationReport:
    """Relative deviations of cap occupancy and attachment mass against
    their drift targets A_r t and (2+xi) m A_r t = (2m+delta) A_r t.

    Cells with zero occupancy are undefined (NaN), not zero.  Worst-case
    summaries cover checkpoints t >= t_r; the probe-averaged variants
    compare the mean over probes to the target before taking the worst.
    """

    times: np.ndarray
    a_r: float
    t_r: float
    t_r_effective: int
    t_r_clamped: bool
    z_dev: np.ndarray           # (n_times, n_probes) signed relative deviation
    t_dev: np.ndarray           # same shape
    z_mean_dev: np.ndarray      # (n_times,) deviation of the probe mean
    t_mean_dev: np.ndarray
    worst_z_dev: float          # max |z_dev| over probes and t >= t_r_effective
    worst_t_dev: float
    worst_z_mean_dev: float     # max |z_mean_dev| over t >= t_r_effective
    worst_t_mean_dev: float

    def to_json_dict(self) -> dict:
        def clean(a):
            return [None if not np.isfinite(x) else float(x) for x in np.ravel(a)]

        def cleanf(x):
            return None if not np.isfinite(x) else float(x)

        return {
            "times": self.times.tolist(), "a_r": self.a_r, "t_r": self.t_r,
            "t_r_effective": self.t_r_effective, "t_r_clamped": self.t_r_clamped,
            "n_probes": int(self.z_dev.shape[1]),
            "z_dev": [clean(row) for row in self.z_dev],
            "t_dev": [clean(row) for row in self.t_dev],
            "z_mean_dev": clean(self.z_mean_dev),
            "t_mean_dev": clean(self.t_mean_dev),
            "worst_z_dev": cleanf(self.worst_z_dev),
            "worst_t_dev": cleanf(self.worst_t_dev),
            "worst_z_mean_dev": cleanf(self.worst_z_mean_dev),
            "worst_t_mean_dev": cleanf(self.worst_t_mean_dev),
        }


def concentration_report(trace, cfg, t_r: float | None = None) -> ConcentrationReport:
    """Score a generation trace against the drift targets.

    t_r is the first time the concentration regime is claimed to hold
    (derive it from the harness parameter rules); checkpoints before it
    still appear in the per-cell tables but not in the worst-case summary.
    A t_r beyond the final checkpoint is clamped to it, with a flag.
    """
    times = np.asarray(trace.times, dtype=np.int64)
    if times.size == 0:
        raise ValueError("trace has no checkpoints")
    if trace.occupancy.shape[0] != times.size:
        raise ValueError("trace shape mismatch")
    a_r = float(cap_area(cfg.r))
    if a_r <= 0.0:
        raise ValueError("cap area is zero; no drift target")
    occ = np.asarray(trace.occupancy, dtype=np.float64)
    mass = np.asarray(trace.attach_mass, dtype=np.float64)
    z_target = a_r * times.astype(np.float64)
    t_target = (2.0 * cfg.m + cfg.delta) * a_r * times.astype(np.float64)

    undef = occ <= 0
    with np.errstate(invalid="ignore"):
        z_dev = occ / z_target[:, None] - 1.0
        t_dev = mass / t_target[:, None] - 1.0
    z_dev = np.where(undef, np.nan, z_dev)
    t_dev = np.where(undef, np.nan, t_dev)
    z_mean_dev = occ.mean(axis=1) / z_target - 1.0
    t_mean_dev = mass.mean(axis=1) / t_target - 1.0

    if t_r is None:
        t_r = float(times[0])
    t_r = float(t_r)
    clamped = t_r > times[-1]
    threshold = min(t_r, float(times[-1]))
    t_r_eff = int(threshold)
    late = times.astype(np.float64) >= threshold
    if not late.any():
        late = times == times[-1]

    def worst(a):
        a = np.abs(a[late])
        return float(np.nanmax(a)) if np.isfinite(a).any() else float("nan")

    return ConcentrationReport(
        times=times, a_r=a_r, t_r=t_r, t_r_effective=t_r_eff,
        t_r_clamped=bool(clamped), z_dev=z_dev, t_dev=t_dev,
        z_mean_dev=z_mean_dev, t_mean_dev=t_mean_dev,
        worst_z_dev=worst(z_dev), worst_t_dev=worst(t_dev),
        worst_z_mean_dev=worst(z_mean_dev),
        worst_t_mean_dev=worst(t_mean_dev),
    )


# ---------------------------------------------------------------------------
# conductance scans over sampled centers


# flag values for neighborhoods whose conductance measures nothing
FLAG_OK = ""
FLAG_ALL = "all-vertices"
FLAG_EMPTY = "empty"
FLAG_ZERO_VOLUME = "zero-volume"
FLAG_LOOP_ONLY = "loop-only"


@dataclass(frozen=True)
class ExpanderScanReport:
    radii: tuple[float, ...]
    centers: np.ndarray
    sizes: np.ndarray           # (n_radii, n_centers)
    conductance: np.ndarray     # NaN where flagged
    flags: np.ndarray           # '' where conductance is meaningful
    min_phi: np.ndarray         # per radius, over unflagged centers
    median_phi: np.ndarray

    def n_degenerate(self, ri: int) -> int:
        return int((self.flags[ri] != FLAG_OK).sum())

    def to_json_dict(self) -> dict:
        def clean(row):
            return [None if not np.isfinite(x) else float(x) for x in row]

        return {
            "radii": list(self.radii),
            "centers": self.centers.tolist(),
            "sizes": self.sizes.tolist(),
            "conductance": [clean(row) for row in self.conductance],
            "flags": self.flags.tolist(),
            "min_phi": clean(self.min_phi),
            "median_phi": clean(self.median_phi),
        }


def expander_scan(g: EvolvingGraph, v_sample, R_list) -> ExpanderScanReport:
    """Conductance of C_R(v) for each sampled center and radius.

    Neighborhoods whose conductance measures nothing are flagged and
    excluded from the min/median summaries: the whole vertex set, a
    zero-volume side, and loop-only sets whose entire volume comes from
    self-loops (no incident proper edge exists, so the boundary is empty
    by construction and the zero says nothing about expansion).
    """
    centers = np.asarray(v_sample, dtype=np.int64)
    if centers.ndim != 1 or centers.size == 0:
        raise ValueError("v_sample must be a nonempty 1-d list of vertex ids")
    if centers.min() < 0 or centers.max() >= g.n:
        raise ValueError("sampled center out of range")
    radii = tuple(float(R) for R in np.atleast_1d(R_list))
    if any(R < 0 for R in radii):
        raise ValueError("radii must be nonnegative")

    loops = g.edge_src == g.edge_dst
    loop_deg = np.bincount(g.edge_src[loops], minlength=g.n) + g.flexible_loops
    total = g.degree()
    vol_all = int(total.sum())

    nr, nc = len(radii), centers.size
    sizes = np.zeros((nr, nc), dtype=np.int64)
    phi = np.full((nr, nc), np.nan)
    flags = np.full((nr, nc), FLAG_OK, dtype=object)
    for ri, R in enumerate(radii):
        for ci, v in enumerate(centers):
            members = r_neighborhood(g, int(v), R)
            sizes[ri, ci] = members.size
            if members.size == 0:
                flags[ri, ci] = FLAG_EMPTY
                continue
            if members.size == g.n:
                flags[ri, ci] = FLAG_ALL
                continue
            vol_s = int(total[members].sum())
            if vol_s == 0 or vol_all - vol_s == 0:
                flags[ri, ci] = FLAG_ZERO_VOLUME
                continue
            if vol_s == int(loop_deg[members].sum()):
                flags[ri, ci] = FLAG_LOOP_ONLY
                continue
            phi[ri, ci] = g.conductance(members)

    with np.errstate(all="ignore"):
        min_phi = np.array([np.nanmin(row) if np.isfinite(row).any() else np.nan
                            for row in phi])
        median_phi = np.array([np.nanmedian(row) if np.isfinite(row).any() else np.nan
                               for row in phi])
    return ExpanderScanReport(radii=radii, centers=centers, sizes=sizes,
                              conductance=phi, flags=flags,
                              min_phi=min_phi, median_phi=median_phi)
