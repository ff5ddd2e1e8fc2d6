"""Branch-and-cut driver for exact structure learning.

The working formulation is full-dimensional: one [0,1] column per
non-empty permitted family, objective coefficient c(i<-J) - c(i<-empty),
plus the constant offset sum_i c(i<-empty).  Initial rows are the modified
convexity constraints (and by default the level-2 cluster rows on all node
triples, which are redundant but speed things up); cluster cutting planes
arrive on demand from the separation module; branching closes the
remaining integrality gap.  Every cut is valid for all acyclic digraphs of
the instance, so cuts found anywhere in the tree are pooled globally.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

from . import lp
from .model import (BnslInstance, Family, FamilyIndex, decode_digraph,
                    is_acyclic, total_score)
from .separation import (EPS_CUT, ClusterCut, SeparationReport,
                         kcluster_separate, weak_separate_exact,
                         weak_separate_heuristic)

#: redundant-but-helpful initial triple rows are skipped above this size
TRIPLE_ROW_NODE_CAP = 30


@dataclass(frozen=True)
class SolveConfig:
    """Knobs of one solve; defaults mirror the cluster-cuts-only setup."""

    cuts: tuple[str, ...] = ("cluster",)       # subset of cluster|kcluster|class4b
    branch_rule: str = "variable"              # variable | sum
    node_select: str = "best"                  # best | dfs
    eps_cut: float = EPS_CUT
    integrality_tol: float = 1e-6
    time_limit: float | None = None
    max_cut_rounds: int = 50
    exact_node_limit: int = 24
    initial_triples: bool = True
    exact_lp: bool = False                     # solve every relaxation in rationals
    collect_cuts: bool = False                 # keep every added cut in the result

    def __post_init__(self):
        for c in self.cuts:
            if c not in ("cluster", "kcluster", "class4b"):
                raise ValueError("unknown cut class %r" % c)
        if self.branch_rule not in ("variable", "sum"):
            raise ValueError("unknown branch rule %r" % self.branch_rule)
        if self.node_select not in ("best", "dfs"):
            raise ValueError("unknown node selection %r" % self.node_select)
        if self.max_cut_rounds < 1 or self.exact_node_limit < 1:
            raise ValueError("limits must be positive")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("limits must be positive")


@dataclass
class SearchNode:
    """Open subproblem: bound fixings, local branch rows, a warm basis."""

    node_id: int
    depth: int
    fixings: dict[int, tuple[float, float]]
    extra_rows: tuple
    upper_bound: float
    basis: tuple | None = None
    pool_size: int = 0


@dataclass
class SolveResult:
    assignment: tuple
    objective: float
    upper_bound: float
    status: str                    # "optimal" | "timelimit"
    stats: dict
    cuts: list[ClusterCut] = field(default_factory=list)

    @property
    def gap(self) -> float:
        return max(0.0, self.upper_bound - self.objective)


class _Session:
    def __init__(self, inst: BnslInstance, cfg: SolveConfig):
        self.inst = inst
        self.cfg = cfg
        self.idx = FamilyIndex.from_instance(inst)
        self.offset = sum(inst.scores[Family(i, ())] for i in range(inst.p))
        self.objcoef = [inst.scores[f] - inst.scores[Family(f.child, ())]
                        for f in self.idx.families]
        self.base_rows = self._initial_rows()
        self.pool: list[tuple] = []
        self.pool_keys: set = set()
        self.all_cuts: list[ClusterCut] = []
        self.stats = {"nodes": 0, "lp_solves": 0, "cuts": 0, "rounds": 0,
                      "cuts_by_class": {"cluster": 0, "kcluster": 0, "class4b": 0},
                      "clusters_seen": 0}
        self.counter = 0

    # -- model assembly ----------------------------------------------------

    def _initial_rows(self):
        rows = []
        for i in range(self.inst.p):
            cols = self.idx.columns_of_child(i)
            if cols:
                rows.append((tuple((k, 1.0) for k in cols), lp.LE, 1.0))
        if self.cfg.initial_triples and self.inst.p <= TRIPLE_ROW_NODE_CAP:
            for triple in combinations(range(self.inst.p), 3):
                coeffs = []
                tset = frozenset(triple)
                for i in triple:
                    for k in self.idx.columns_of_child(i):
                        if len(tset.intersection(self.idx.families[k].parents)) >= 2:
                            coeffs.append((k, 1.0))
                if coeffs:
                    rows.append((tuple(coeffs), lp.LE, 1.0))
        return rows

    def build_model(self, node: SearchNode) -> lp.LpModel:
        m = lp.LpModel()
        for k in range(len(self.idx)):
            lo, hi = node.fixings.get(k, (0.0, 1.0))
            m.add_column(lo, hi, self.objcoef[k])
        for row in self.base_rows:
            m.add_row(*row)
        for row in self.pool:
            m.add_row(*row)
        for row in node.extra_rows:
            m.add_row(*row)
        return m

    # -- cuts ---------------------------------------------------------------

    def add_cut(self, cut: ClusterCut, cls: str) -> bool:
        key = (cut.cluster, cut.kappa)
        if key in self.pool_keys:
            return False
        self.pool_keys.add(key)
        self.pool.append(cut.row(self.idx))
        self.all_cuts.append(cut)
        self.stats["cuts"] += 1
        self.stats["cuts_by_class"][cls] += 1
        return True

    def _absorb(self, cuts: Iterable[ClusterCut], x) -> int:
        added = 0
        for cut in cuts:
            self.stats["clusters_seen"] += 1
            if "cluster" in self.cfg.cuts and self.add_cut(cut, "cluster"):
                added += 1
            if "kcluster" in self.cfg.cuts:
                for kcut in kcluster_separate(x, self.idx, cut.cluster, self.cfg.eps_cut):
                    if kcut.kappa > 1 and self.add_cut(kcut, "kcluster"):
                        added += 1
        return added

    def separate(self, x) -> tuple[SeparationReport, int]:
        """One separation round; returns the last report and cuts added."""
        report = weak_separate_heuristic(x, self.idx, eps=self.cfg.eps_cut)
        added = self._absorb(report.cuts, x)
        if added == 0:
            # Heuristic empty-handed or only duplicates: ask the exact search.
            report = weak_separate_exact(x, self.idx, eps=self.cfg.eps_cut,
                                         node_limit=self.cfg.exact_node_limit)
            added = self._absorb(report.cuts, x)
        if "class4b" in self.cfg.cuts:
            for coeffs, rhs, key in _class4b_violations(x, self.idx, self.cfg.eps_cut):
                if key not in self.pool_keys:
                    self.pool_keys.add(key)
                    self.pool.append((coeffs, lp.LE, rhs))
                    self.stats["cuts"] += 1
                    self.stats["cuts_by_class"]["class4b"] += 1
                    added += 1
        return report, added

    # -- node processing ----------------------------------------------------

    def cutting_plane_loop(self, node: SearchNode, deadline: float | None):
        """Alternate LP solves and separation until settled.

        Returns ``(outcome, x, objective, trace)`` where outcome is one of
        ``"integral"`` (x encodes a DAG), ``"fractional"`` (no more cluster
        cuts or round cap hit), ``"infeasible"``, ``"timeout"``; trace is
        the sequence of LP objective values, one per round (non-increasing).
        """
        trace = []
        warm = node.basis if node.pool_size == len(self.pool) else None
        for round_no in range(self.cfg.max_cut_rounds):
            model = self.build_model(node)
            try:
                sol = lp.lp_solve(model, warm=warm, exact=self.cfg.exact_lp)
            except lp.LpIterationLimit:
                sol = lp.lp_solve(model, exact=True)
            self.stats["lp_solves"] += 1
            if not sol.optimal:
                return "infeasible", None, float("-inf"), trace
            warm = sol.basis
            node.basis = sol.basis
            node.pool_size = len(self.pool)
            obj = sol.objective + self.offset
            trace.append(obj)
            node.upper_bound = obj
            x = sol.x
            self.stats["rounds"] += 1
            if deadline is not None and time.monotonic() > deadline:
                return "timeout", x, obj, trace
            if not self.cfg.cuts:
                break
            report, added = self.separate(x)
            if added == 0:
                # Nothing new to add: either proven clean, or only branching
                # can make progress from here.
                break
            node.pool_size = len(self.pool)
            warm = sol.basis
        else:
            model = self.build_model(node)
            sol = lp.lp_solve(model, warm=warm)
            self.stats["lp_solves"] += 1
            if not sol.optimal:
                return "infeasible", None, float("-inf"), trace
            x, obj = sol.x, sol.objective + self.offset
            trace.append(obj)
        if _is_integral_dag(x, self.idx, self.cfg.integrality_tol):
            return "integral", x, obj, trace
        return "fractional", x, obj, trace


def _is_integral_dag(x, idx, tol) -> bool:
    try:
        assignment = decode_digraph(x, idx, tol)
    except ValueError:
        return False
    return is_acyclic(assignment)


def _is_integral_point(x, tol) -> bool:
    return all(v <= tol or v >= 1 - tol for v in x)


# -- branching ---------------------------------------------------------------

def branch(node: SearchNode, x: Sequence[float], idx: FamilyIndex, rule: str,
           next_id, tol: float = 1e-6) -> tuple[SearchNode, SearchNode]:
    """Split a node on a fractional variable or a fractional exclusive sum.

    The variable rule fixes the most fractional family variable to 0 and
    to 1 (the latter forcing the child's sibling families to 0); the sum
    rule picks the most fractional pairwise edge sum and pins it to 0 or 1.
    Both children exclude the current point x.

    Raises:
        ValueError: if x is integral to within ``tol``.
    """
    if rule == "sum":
        pair = _most_fractional_pair(x, idx, tol)
        if pair is not None:
            cols, value = pair
            row = (tuple((k, 1.0) for k in cols), lp.EQ, 1.0)
            if row in node.extra_rows:
                pair = None          # already pinned here; fall back to a variable
        if pair is not None:
            zero = dict(node.fixings)
            for k in cols:
                zero[k] = (0.0, 0.0)
            child0 = SearchNode(next_id(), node.depth + 1, zero, node.extra_rows,
                                node.upper_bound, node.basis, node.pool_size)
            child1 = SearchNode(next_id(), node.depth + 1, dict(node.fixings),
                                node.extra_rows + (row,),
                                node.upper_bound, node.basis, node.pool_size)
            return child0, child1
    col = _most_fractional_column(x, node.fixings, tol)
    if col is None:
        raise ValueError("branch called on an integral point")
    zero = dict(node.fixings)
    zero[col] = (0.0, 0.0)
    child0 = SearchNode(next_id(), node.depth + 1, zero, node.extra_rows,
                        node.upper_bound, node.basis, node.pool_size)
    one = dict(node.fixings)
    one[col] = (1.0, 1.0)
    child = idx.families[col].child
    for k in idx.columns_of_child(child):
        if k != col:
            one[k] = (0.0, 0.0)
    child1 = SearchNode(next_id(), node.depth + 1, one, node.extra_rows,
                        node.upper_bound, node.basis, node.pool_size)
    return child0, child1


def _most_fractional_column(x, fixings, tol):
    best, best_frac = None, tol
    for k, v in enumerate(x):
        lo, hi = fixings.get(k, (0.0, 1.0))
        if lo == hi:
            continue
        frac = min(v, 1.0 - v)
        if frac > best_frac + 1e-12:
            best, best_frac = k, frac
    return best


def _most_fractional_pair(x, idx, tol):
    """Most fractional sum over a node pair of both-direction family masses."""
    best = None
    best_frac = tol
    for i, j in combinations(range(idx.p), 2):
        cols = [k for k in idx.columns_of_child(i) if j in idx.families[k].parents]
        cols += [k for k in idx.columns_of_child(j) if i in idx.families[k].parents]
        if not cols:
            continue
        s = sum(x[k] for k in cols)
        frac = min(s, 1.0 - s)
        if frac > best_frac + 1e-12:
            best, best_frac = (tuple(cols), s), frac
    return best


def _cycle_branch_column(x, idx, fixings, tol):
    """A set-to-1 family variable of a cyclic integral point, for branching."""
    assignment = decode_digraph(x, idx, tol)
    children: list[list[int]] = [[] for _ in range(idx.p)]
    for i, ps in enumerate(assignment):
        for j in ps:
            children[j].append(i)
    on_cycle = set()
    for start in range(idx.p):
        stack, seen = [start], set()
        while stack:
            v = stack.pop()
            for w in children[v]:
                if w == start:
                    on_cycle.add(start)
                elif w not in seen:
                    seen.add(w)
                    stack.append(w)
    for k, fam in enumerate(idx.families):
        lo, hi = fixings.get(k, (0.0, 1.0))
        if lo == hi:
            continue
        if x[k] >= 1 - tol and fam.child in on_cycle:
            return k
    return None


# -- 4B separation -------------------------------------------------------------

_REP_4B = {
    (0, (1,)): 1, (0, (1, 2)): 1, (0, (1, 3)): 1, (0, (2, 3)): 1, (0, (1, 2, 3)): 1,
    (1, (0,)): 1, (1, (0, 2)): 1, (1, (0, 3)): 1, (1, (2, 3)): 1, (1, (0, 2, 3)): 1,
    (2, (0, 3)): 1, (2, (1, 3)): 1, (2, (0, 1, 3)): 1,
    (3, (0, 2)): 1, (3, (1, 2)): 1, (3, (0, 1, 2)): 1,
}


def _orbit_4b():
    seen = {}
    for perm in permutations(range(4)):
        mapped = {}
        for (child, parents), coef in _REP_4B.items():
            mapped[(perm[child], tuple(sorted(perm[j] for j in parents)))] = coef
        seen[frozenset(mapped.items())] = mapped
    return list(seen.values())


_ORBIT_4B = _orbit_4b()


def _class4b_violations(x, idx: FamilyIndex, eps):
    """Violated liftings of the 4B facet class over every 4-node subset."""
    if idx.p < 4:
        return
    for subset in combinations(range(idx.p), 4):
        pos = {node: t for t, node in enumerate(subset)}
        sset = set(subset)
        for variant_no, coeffs4 in enumerate(_ORBIT_4B):
            lhs = 0.0
            cols = []
            for k, fam in enumerate(idx.families):
                if fam.child not in sset:
                    continue
                inter = tuple(sorted(pos[j] for j in fam.parents if j in sset))
                coef = coeffs4.get((pos[fam.child], inter), 0)
                if coef:
                    lhs += coef * x[k]
                    cols.append((k, float(coef)))
            if lhs > 2.0 + eps:
                yield tuple(cols), 2.0, ("4b", subset, variant_no)


# -- driver -------------------------------------------------------------------

def solve(inst: BnslInstance, cfg: SolveConfig | None = None) -> SolveResult:
    """Find a provably optimal acyclic assignment by branch and cut.

    The empty graph is always feasible, so an optimum exists; on a time
    limit expiry the best incumbent is returned with an honest bound and
    status ``"timelimit"``.
    """
    cfg = cfg or SolveConfig()
    session = _Session(inst, cfg)
    deadline = None if cfg.time_limit is None else time.monotonic() + cfg.time_limit
    tol = cfg.integrality_tol

    incumbent = tuple(() for _ in range(inst.p))
    incumbent_val = total_score(incumbent, inst)

    root = SearchNode(0, 0, {}, (), float("inf"))
    session.counter = 1
    open_nodes: list = []

    def push(node):
        if cfg.node_select == "best":
            heapq.heappush(open_nodes, (-node.upper_bound, node.node_id, node))
        else:
            open_nodes.append((0, node.node_id, node))

    def pop():
        if cfg.node_select == "best":
            return heapq.heappop(open_nodes)[2]
        return open_nodes.pop()[2]

    def next_id():
        session.counter += 1
        return session.counter - 1

    push(root)
    timed_out = False
    while open_nodes:
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        node = pop()
        if node.upper_bound <= incumbent_val + tol:
            continue
        session.stats["nodes"] += 1
        outcome, x, obj, trace = session.cutting_plane_loop(node, deadline)
        if node.node_id == 0:
            session.stats["root_trace"] = trace
        if outcome == "timeout":
            node.upper_bound = obj
            push(node)
            timed_out = True
            break
        if outcome == "infeasible" or obj <= incumbent_val + tol:
            continue
        if outcome == "integral":
            assignment = decode_digraph(x, session.idx, tol)
            value = total_score(assignment, inst)
            if value > incumbent_val:
                incumbent, incumbent_val = assignment, value
            continue
        # Fractional, or integral-but-cyclic with cuts disabled.
        if _is_integral_point(x, tol):
            col = _cycle_branch_column(x, session.idx, node.fixings, tol)
            if col is None:
                continue
            zero = dict(node.fixings)
            zero[col] = (0.0, 0.0)
            one = dict(node.fixings)
            one[col] = (1.0, 1.0)
            for k in session.idx.columns_of_child(session.idx.families[col].child):
                if k != col:
                    one[k] = (0.0, 0.0)
            kids = (SearchNode(next_id(), node.depth + 1, zero, node.extra_rows,
                               obj, node.basis, node.pool_size),
                    SearchNode(next_id(), node.depth + 1, one, node.extra_rows,
                               obj, node.basis, node.pool_size))
        else:
            kids = branch(node, x, session.idx, cfg.branch_rule, next_id, tol)
            for kid in kids:
                kid.upper_bound = obj
        for kid in kids:
            push(kid)

    open_bound = max((item[2].upper_bound for item in open_nodes), default=float("-inf"))
    upper = max(incumbent_val, open_bound) if timed_out else incumbent_val
    status = "timelimit" if timed_out else "optimal"
    if inst.p <= 30:
        # share of all possible cluster constraints actually generated
        session.stats["cluster_fraction"] = (
            session.stats["cuts"] / float(2 ** inst.p - inst.p - 1)
            if inst.p > 1 else 0.0)
    return SolveResult(incumbent, incumbent_val, upper, status, dict(session.stats),
                       session.all_cuts if cfg.collect_cuts else [])


def initial_relaxation(inst: BnslInstance, triples: bool = False):
    """The starting LP (convexity rows only unless ``triples``), for study.

    Returns ``(model, idx, offset)``; solving it yields an integral point
    choosing a best parent set per node.
    """
    cfg = SolveConfig(initial_triples=triples)
    session = _Session(inst, cfg)
    model = session.build_model(SearchNode(0, 0, {}, (), float("inf")))
    return model, session.idx, session.offset
