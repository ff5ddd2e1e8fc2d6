"""Weak separation: find a cluster constraint violated by a relaxation point.

The cluster score of a point x* is

    w(C) = sum_{i in C} sum_{J : J meets C} x*_{i<-J}  -  |C|,

and C separates exactly when w(C) > -1 (then the inside-form cluster
inequality is violated by w(C) + 1).  The exact search maximises w by
depth-first search over node inclusion; this is the separation sub-IP
after eliminating the per-family indicator variables, whose optimal value
is 1 precisely when the child is in C and the parent set meets C (the
point is componentwise non-negative, so setting them greedily is optimal).

Also here: the k-cluster violation check and the vertex-cover gadget that
makes weak separation encode an NP-hard question.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from .model import BnslInstance, Family, FamilyIndex

EPS_CUT = 1e-6
EXACT_NODE_LIMIT = 24
MAX_CUTS = 20
MAX_CYCLES = 10000


@dataclass(frozen=True)
class ClusterCut:
    """A violated cluster inequality: cluster, level and violation at x*."""

    cluster: frozenset[int]
    kappa: int
    violation: float

    def __post_init__(self):
        if not 1 <= self.kappa < len(self.cluster):
            raise ValueError("need 1 <= kappa < |C|")

    def row(self, idx: FamilyIndex) -> tuple[tuple[tuple[int, float], ...], str, float]:
        """The inequality as an LP row over the family index.

        Sums family variables with at least ``kappa`` parents inside the
        cluster; right-hand side is ``|C| - kappa``.
        """
        coeffs = []
        for i in sorted(self.cluster):
            for k in idx.columns_of_child(i):
                if len(self.cluster.intersection(idx.families[k].parents)) >= self.kappa:
                    coeffs.append((k, 1.0))
        return tuple(coeffs), "<=", float(len(self.cluster) - self.kappa)

    def lhs(self, x: Sequence[float], idx: FamilyIndex) -> float:
        coeffs, _, _ = self.row(idx)
        return sum(x[k] for k, _ in coeffs)


@dataclass
class SeparationReport:
    """Outcome of one separation call.

    ``outcome`` is ``"cuts"``, ``"none"`` (proven, exact search only) or
    ``"gave_up"`` (heuristic found nothing; no claim of absence).
    """

    outcome: str
    cuts: list[ClusterCut] = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return bool(self.cuts)


def subip_objective(x: Sequence[float], idx: FamilyIndex, cluster: Iterable[int]) -> float:
    """The cluster score w(C); C separates iff |C| >= 2 and w(C) > -1."""
    cset = frozenset(cluster)
    if not cset:
        raise ValueError("cluster must be non-empty")
    total = 0.0
    for i in cset:
        for k in idx.columns_of_child(i):
            if cset.intersection(idx.families[k].parents):
                total += x[k]
    return total - len(cset)


def _family_masks(x, idx):
    """Per child: list of (parent bitmask, value) for positive-mass families."""
    per_child: list[list[tuple[int, float]]] = [[] for _ in range(idx.p)]
    for k, fam in enumerate(idx.families):
        if x[k] > 0:
            mask = 0
            for j in fam.parents:
                mask |= 1 << j
            per_child[fam.child].append((mask, float(x[k])))
    return per_child


def weak_separate_exact(x: Sequence[float], idx: FamilyIndex,
                        eps: float = EPS_CUT,
                        node_limit: int = EXACT_NODE_LIMIT,
                        max_cuts: int = MAX_CUTS) -> SeparationReport:
    """Maximise w(C) exactly by DFS over node inclusion.

    Only nodes carrying positive non-empty-family mass can help, so the
    search runs over those, ordered by descending total mass.  The bound
    for a state (In, Und) is

        sum_{i in In} sigma_i(In u Und)
        + sum_{i in Und} max(0, sigma_i(In u Und) - 1) - |In|,

    where sigma_i(S) is i's mass on families meeting S: fixing the
    undecided set cannot beat it since dropping i from C removes at least
    sigma_i(...) - 1 net score, and keeping it adds at most that.

    Returns a proven ``"none"`` outcome when no cluster scores above
    ``-1 + eps``; falls back to the heuristic above ``node_limit`` nodes,
    marking the report accordingly.
    """
    start = time.perf_counter()
    per_child = _family_masks(x, idx)
    active = [i for i in range(idx.p) if per_child[i]]
    if len(active) > node_limit:
        report = weak_separate_heuristic(x, idx, eps=eps, max_cuts=max_cuts)
        report.outcome = "gave_up" if not report.cuts else report.outcome
        report.stats["exact"] = False
        return report

    import heapq

    def sigma(i: int, mask: int) -> float:
        return sum(v for m, v in per_child[i] if m & mask)

    order = sorted(active, key=lambda i: (-sigma(i, (1 << idx.p) - 1), i))
    found: dict[frozenset[int], float] = {}
    top: list[float] = []                   # min-heap of best scores kept
    nodes_explored = 0

    def rec(pos: int, in_mask: int, in_count: int):
        nonlocal nodes_explored
        nodes_explored += 1
        und = order[pos:]
        both = in_mask
        for i in und:
            both |= 1 << i
        ub = -in_count
        for i in _bits(in_mask):
            ub += sigma(i, both)
        for i in und:
            ub += max(0.0, sigma(i, both) - 1.0)
        # Prune below the violation threshold, and, once enough clusters
        # are on hand, below the weakest kept one: neither the best w nor
        # the up-to-max_cuts most violated clusters can live down there
        # (ties with the weakest kept value survive the strict test).
        if ub <= -1.0 + eps - 1e-15:
            return
        if len(top) == max_cuts and ub < top[0] - 1e-15:
            return
        if in_count >= 2:
            w = sum(sigma(i, in_mask) for i in _bits(in_mask)) - in_count
            if w > -1.0 + eps:
                cset = frozenset(_bits(in_mask))
                prev = found.get(cset)
                if prev is None or w > prev:
                    found[cset] = w
                    heapq.heappush(top, w)
                    if len(top) > max_cuts:
                        heapq.heappop(top)
        if pos == len(order):
            return
        i = order[pos]
        rec(pos + 1, in_mask | (1 << i), in_count + 1)
        rec(pos + 1, in_mask, in_count)

    rec(0, 0, 0)
    cuts = [ClusterCut(c, 1, w + 1.0) for c, w in found.items()]
    cuts.sort(key=lambda cut: (-cut.violation, sorted(cut.cluster)))
    cuts = cuts[:max_cuts]
    stats = {"nodes": nodes_explored, "time": time.perf_counter() - start, "exact": True}
    if cuts:
        return SeparationReport("cuts", cuts, stats)
    return SeparationReport("none", [], stats)


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def roundup_digraph(x: Sequence[float], idx: FamilyIndex) -> nx.DiGraph:
    """Edge j -> i present iff some positive-mass family i<-J has j in J."""
    g = nx.DiGraph()
    g.add_nodes_from(range(idx.p))
    for k, fam in enumerate(idx.families):
        if x[k] > 0:
            for j in fam.parents:
                g.add_edge(j, fam.child)
    return g


def weak_separate_heuristic(x: Sequence[float], idx: FamilyIndex,
                            eps: float = EPS_CUT,
                            max_cuts: int = MAX_CUTS,
                            max_cycles: int = MAX_CYCLES) -> SeparationReport:
    """Cycle-based heuristic: test node sets of rounding-up-digraph cycles.

    A separating cluster must induce a cycle in the rounding-up digraph,
    so its cycles are the natural candidates; each candidate is verified
    against the cluster score before being returned.  Finding nothing
    proves nothing, hence the ``"gave_up"`` outcome.
    """
    start = time.perf_counter()
    g = roundup_digraph(x, idx)
    tested = 0
    found: dict[frozenset[int], float] = {}
    for cycle in nx.simple_cycles(g):
        tested += 1
        if tested > max_cycles:
            break
        cset = frozenset(cycle)
        if len(cset) < 2 or cset in found:
            continue
        w = subip_objective(x, idx, cset)
        if w > -1.0 + eps:
            found[cset] = w
    cuts = [ClusterCut(c, 1, w + 1.0) for c, w in found.items()]
    cuts.sort(key=lambda cut: (-cut.violation, sorted(cut.cluster)))
    cuts = cuts[:max_cuts]
    stats = {"cycles": tested, "time": time.perf_counter() - start, "exact": False}
    return SeparationReport("cuts" if cuts else "gave_up", cuts, stats)


def kcluster_separate(x: Sequence[float], idx: FamilyIndex, cluster: Iterable[int],
                      eps: float = EPS_CUT) -> list[ClusterCut]:
    """All violated levels of the k-cluster inequality family on one cluster.

    Level kappa requires at most |C| - kappa members with at least kappa
    parents inside C; every level from 1 to |C| - 1 is checked.
    """
    cset = frozenset(cluster)
    if len(cset) < 2:
        raise ValueError("cluster must have at least 2 nodes")
    cuts = []
    for kappa in range(1, len(cset)):
        lhs = 0.0
        for i in cset:
            for k in idx.columns_of_child(i):
                if len(cset.intersection(idx.families[k].parents)) >= kappa:
                    lhs += x[k]
        slack = lhs - (len(cset) - kappa)
        if slack > eps:
            cuts.append(ClusterCut(cset, kappa, slack))
    return cuts


def exhaustive_cluster_scan(x: Sequence[float], idx: FamilyIndex):
    """Oracle: best w(C) over every cluster by brute force (2^p sets)."""
    best_w = float("-inf")
    best_c = None
    for size in range(2, idx.p + 1):
        for combo in combinations(range(idx.p), size):
            w = subip_objective(x, idx, combo)
            if w > best_w:
                best_w, best_c = w, frozenset(combo)
    return best_c, best_w


def build_vc_gadget(edges: Sequence[tuple[int, int]], n: int, k: int):
    """Instance and point whose separation encodes vertex cover (G, k).

    One new node per edge; the point puts mass 1/m on each new node's
    edge-pair families and mass k/(m(k+1)) on each original node's
    singleton families from the new nodes.  A separating cluster exists
    iff G has a vertex cover of size at most k.

    Returns:
        (instance, x) with x indexed by the instance's family index.
    """
    m = len(edges)
    if m < 1:
        raise ValueError("gadget needs at least one edge")
    if k < 1:
        raise ValueError("k must be positive")
    norm_edges = []
    for u, v in edges:
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise ValueError("edge %r is not a simple edge on %d vertices" % ((u, v), n))
        norm_edges.append(tuple(sorted((u, v))))
    if len(set(norm_edges)) != len(norm_edges):
        raise ValueError("duplicate edge")

    names = tuple("v%d" % i for i in range(n)) + tuple("s%d" % e for e in range(m))
    permitted: list[list[tuple[int, ...]]] = []
    for v in range(n):
        sets = [()] + [(n + e,) for e in range(m)]
        permitted.append(sorted(sets))
    for _ in range(m):
        sets = [()] + [edge for edge in sorted(set(norm_edges))]
        permitted.append(sorted(sets))
    scores = {Family(i, ps): 0.0 for i, sets in enumerate(permitted) for ps in sets}
    inst = BnslInstance(names, tuple(tuple(s) for s in permitted), scores)
    idx = FamilyIndex.from_instance(inst)
    x = [0.0] * len(idx)
    for e in range(m):
        s = n + e
        for edge in set(norm_edges):
            x[idx.position(Family(s, edge))] = 1.0 / m
    for v in range(n):
        for e in range(m):
            x[idx.position(Family(v, (n + e,)))] = k / (m * (k + 1))
    return inst, x


def min_vertex_cover_size(edges: Sequence[tuple[int, int]], n: int) -> int:
    """Brute-force minimum vertex cover size (oracle for the gadget)."""
    if not edges:
        return 0
    for size in range(0, n + 1):
        for cover in combinations(range(n), size):
            cs = set(cover)
            if all(u in cs or v in cs for u, v in edges):
                return size
    raise AssertionError("unreachable")
