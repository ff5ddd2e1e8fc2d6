"""Instance transformations between structure learning and acyclic subgraphs.

Three constructions live here, each with the bookkeeping needed to pull an
optimal solution of the transformed instance back to the original:

* the parent-set splitting rewrite producing an equivalent instance whose
  parent sets all have size at most two;
* the reduction of a structure-learning instance to a weighted acyclic
  subgraph problem (ASP) over parent-set and family gadget nodes;
* the cheap reverse direction assembling local scores from edge weights.

Plus the linear algebra glue (edge projection of family vectors and of
edge-space inequalities) and exhaustive ASP oracles used by the tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Mapping, Sequence

from .model import (BnslInstance, DigraphAssignment, Family, FamilyIndex,
                    default_names, is_acyclic)

#: exhaustive-scan ceilings for the ASP oracle
ASP_EDGE_LIMIT = 22
ASP_NODE_LIMIT = 8


# ---------------------------------------------------------------------------
# Parent sets of size at most two (splitting rewrite)

def _penalty(inst: BnslInstance) -> float:
    worst = min(inst.scores.values())
    return min(-float(inst.p), worst * inst.p)


def _split(members: tuple) -> tuple[tuple, tuple]:
    """Deterministic balanced split; members are sorted node keys."""
    half = (len(members) + 1) // 2
    return members[:half], members[half:]


@dataclass(frozen=True)
class K2Map:
    """Pullback data for the size-two rewrite.

    ``family_origin`` maps each kept non-subset family of the new instance
    to the original parent set it encodes; ``subset_nodes`` maps new node
    index to the frozenset of original nodes it represents.
    """

    original_p: int
    family_origin: Mapping[Family, tuple[int, ...]]
    subset_nodes: Mapping[int, frozenset[int]]
    penalty: float


def reduce_to_k2(inst: BnslInstance) -> tuple[BnslInstance, K2Map]:
    """Rewrite an instance so every permitted parent set has size <= 2.

    A parent set of size three keeps one member and delegates the other
    two to a fresh subset node; larger sets are split into two balanced
    halves, each a subset node.  Subset nodes permit only the empty set
    (heavily penalised so optima never use it) and their own split pair
    at score zero, hence optima of both instances correspond with equal
    objective value.  Subset nodes are created once and shared.
    """
    penalty = _penalty(inst)
    # Node keys: original index, or a frozenset of original indices.
    subset_keys: dict[frozenset[int], None] = {}
    pending: list[frozenset[int]] = []

    def subset_key(members: Iterable[int]) -> frozenset[int]:
        key = frozenset(members)
        if key not in subset_keys:
            subset_keys[key] = None
            pending.append(key)
        return key

    def rewrite(parents: tuple[int, ...]):
        """New-parent key tuple for an original parent set (size kept <= 2)."""
        if len(parents) <= 2:
            return tuple(parents)
        if len(parents) == 3:
            return (parents[0], subset_key(parents[1:]))
        left, right = _split(parents)
        return (subset_key(left), subset_key(right))

    top: dict[int, list[tuple[tuple, tuple[int, ...]]]] = {i: [] for i in range(inst.p)}
    for i in range(inst.p):
        for ps in inst.permitted[i]:
            top[i].append((rewrite(ps), ps))

    # Each subset node wants exactly one non-empty parent set: its members,
    # split with the same rules (members may be nodes or smaller subsets).
    subset_choice: dict[frozenset[int], tuple] = {}
    while pending:
        key = pending.pop(0)
        members = tuple(sorted(key))
        if len(members) == 2:
            subset_choice[key] = members
        elif len(members) == 3:
            subset_choice[key] = (members[0], subset_key(members[1:]))
        else:
            left, right = _split(members)
            subset_choice[key] = (subset_key(left), subset_key(right))

    ordered_subsets = sorted(subset_keys, key=lambda k: (len(k), tuple(sorted(k))))
    node_of: dict = {i: i for i in range(inst.p)}
    names = list(inst.names)
    for key in ordered_subsets:
        node_of[key] = len(names)
        names.append("{%s}" % ",".join(inst.names[j] for j in sorted(key)))

    def to_indices(parent_keys: tuple) -> tuple[int, ...]:
        return tuple(sorted(node_of[k] for k in parent_keys))

    permitted: list[list[tuple[int, ...]]] = [[] for _ in names]
    scores: dict[Family, float] = {}
    family_origin: dict[Family, tuple[int, ...]] = {}
    for i in range(inst.p):
        for parent_keys, original in top[i]:
            ps = to_indices(parent_keys)
            fam = Family(i, ps)
            if fam in scores:
                raise ValueError("split rewrite collided two parent sets of %s"
                                 % inst.names[i])
            permitted[i].append(ps)
            scores[fam] = inst.scores[Family(i, original)]
            family_origin[fam] = original
    for key in ordered_subsets:
        node = node_of[key]
        pair = to_indices(subset_choice[key])
        permitted[node] = [(), pair]
        scores[Family(node, ())] = penalty
        scores[Family(node, pair)] = 0.0

    reduced = BnslInstance(tuple(names),
                           tuple(tuple(sorted(s)) for s in permitted),
                           scores, kappa=2)
    nfam = sum(len(s) for s in inst.permitted)
    bound = inst.p + nfam
    if not _downward_closed(inst):
        kappa = max(len(ps) for sets in inst.permitted for ps in sets)
        bound = inst.p + max(1, kappa) * nfam
    assert reduced.p <= bound, "size bound of the splitting rewrite violated"
    subset_nodes = {node_of[k]: k for k in ordered_subsets}
    return reduced, K2Map(inst.p, family_origin, subset_nodes, penalty)


def _downward_closed(inst: BnslInstance) -> bool:
    from itertools import combinations
    for i in range(inst.p):
        have = set(inst.permitted[i])
        for ps in inst.permitted[i]:
            for r in range(len(ps)):
                if any(sub not in have for sub in combinations(ps, r)):
                    return False
    return True


def lift_k2_solution(solution: DigraphAssignment, mapping: K2Map) -> DigraphAssignment:
    """Read an original assignment off a reduced one.

    Raises:
        ValueError: if a subset node chose the empty set, which means the
            input was not optimal-grade (the penalty fired).
    """
    for node, members in mapping.subset_nodes.items():
        if not solution[node]:
            raise ValueError("subset node %d chose the empty set; "
                             "solution is not optimal-grade" % node)
    original = []
    for i in range(mapping.original_p):
        fam = Family(i, tuple(solution[i]))
        try:
            original.append(mapping.family_origin[fam])
        except KeyError:
            raise ValueError("reduced family %r has no original counterpart" % (fam,)) \
                from None
    return tuple(original)


# ---------------------------------------------------------------------------
# ASP instances

@dataclass(frozen=True)
class AspInstance:
    """A weighted digraph; an arc (tail, head) must have tail ordered first.

    ``tags`` marks gadget roles ("V1", "V2", "V3") or "plain" for generic
    instances.  Objective: a maximum-weight arc subset with no directed
    cycle.
    """

    labels: tuple[str, ...]
    edges: Mapping[tuple[int, int], float]
    tags: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.labels)

    def __post_init__(self):
        for (u, v) in self.edges:
            if u == v:
                raise ValueError("self-loop %d" % u)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError("arc endpoint out of range")

    def to_text(self) -> str:
        """Arc-list text: header "n m", then one "head tail weight" per arc.

        A line "u v w" encodes the weighted relation u <- v (v precedes u).
        Gadget tags are emitted as comments.
        """
        lines = ["%d %d" % (self.n, len(self.edges))]
        if self.tags:
            for i, label in enumerate(self.labels):
                lines.append("# node %d %s %s" % (i, self.tags[i], label))
        for (tail, head) in sorted(self.edges):
            lines.append("%d %d %s" % (head, tail, repr(float(self.edges[(tail, head)]))))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "AspInstance":
        rows = []
        header = None
        for line in text.splitlines():
            body = line.split("#", 1)[0].split()
            if not body:
                continue
            if header is None:
                header = (int(body[0]), int(body[1]))
                continue
            head, tail, w = int(body[0]), int(body[1]), float(body[2])
            rows.append(((tail, head), w))
        if header is None:
            raise ValueError("missing header")
        n, m = header
        if len(rows) != m:
            raise ValueError("expected %d arcs, found %d" % (m, len(rows)))
        return cls(default_names(n), dict(rows))


def edge_set_is_acyclic(edges: Iterable[tuple[int, int]], n: int) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for (u, v) in edges:
        adj[u].append(v)
    colour = [0] * n
    for root in range(n):
        if colour[root]:
            continue
        stack = [(root, iter(adj[root]))]
        colour[root] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if colour[nxt] == 1:
                    return False
                if colour[nxt] == 0:
                    colour[nxt] = 1
                    stack.append((nxt, iter(adj[nxt])))
                    break
            else:
                colour[node] = 2
                stack.pop()
    return True


@dataclass(frozen=True)
class AspMap:
    """Pullback data for the gadget reduction.

    ``red`` maps each score-carrying arc to its family; ``shift`` holds
    minus each child's empty-set score (score arcs are weighted net of the
    empty choice), and ``mandatory_weight`` the total weight of arcs every
    optimum contains, so the two optima reconcile as

        bnsl_optimum = asp_optimum - mandatory_weight - sum(shift).
    """

    p: int
    red: Mapping[tuple[int, int], Family]
    mandatory: frozenset[tuple[int, int]]
    shift: tuple[float, ...]
    mandatory_weight: float

    @property
    def shift_total(self) -> float:
        return sum(self.shift)


def bnsl_to_asp(inst: BnslInstance) -> tuple[AspInstance, AspMap]:
    """Encode an instance as a weighted acyclic subgraph problem.

    Three node rows: the original nodes; one candidate node per (child,
    non-empty permitted set) pair; one node per non-empty family.  A
    score arc runs from each candidate node to its family node, weighted
    by the score gain of that set over the child's empty choice.  All
    other arcs share one weight too large to ever drop: members feed each
    candidate (so chosen parents precede children through the gadget),
    families reach their child, and each family points at its child's
    other candidates, which makes two score arcs into the same child close
    a directed cycle.  Acyclic arc subsets therefore correspond exactly to
    acyclic assignments (children without a score arc chose the empty
    set), with objective values matching up to the mandatory mass and the
    empty-choice scores.
    """
    cands = [(i, ps) for i in range(inst.p)
             for ps in inst.permitted[i] if ps]
    cand_node = {key: inst.p + t for t, key in enumerate(cands)}
    fam_node = {Family(i, ps): inst.p + len(cands) + t
                for t, (i, ps) in enumerate(cands)}

    shift = tuple(-inst.scores[Family(i, ())] for i in range(inst.p))
    gain = {Family(i, ps): inst.scores[Family(i, ps)] + shift[i]
            for (i, ps) in cands}
    big = sum(abs(v) for v in gain.values()) + 1.0

    labels = list(inst.names)
    tags = ["V1"] * inst.p
    for i, ps in cands:
        labels.append("%s:{%s}" % (inst.names[i],
                                   ",".join(inst.names[j] for j in ps)))
        tags.append("V2")
    for i, ps in cands:
        labels.append("%s<-{%s}" % (inst.names[i],
                                    ",".join(inst.names[j] for j in ps)))
        tags.append("V3")

    edges: dict[tuple[int, int], float] = {}
    red: dict[tuple[int, int], Family] = {}
    for (i, ps) in cands:
        for j in ps:                                  # members feed the candidate
            edges[(j, cand_node[(i, ps)])] = big
    for fam, node in fam_node.items():                # family reaches its child
        edges[(node, fam.child)] = big
    for (i, ps) in cands:                             # score-carrying choice arcs
        fam = Family(i, ps)
        arc = (cand_node[(i, ps)], fam_node[fam])
        edges[arc] = gain[fam]
        red[arc] = fam
    for (i, ps) in cands:                             # blockers to sibling candidates
        fam = Family(i, ps)
        for other in inst.permitted[i]:
            if other and other != ps:
                edges[(fam_node[fam], cand_node[(i, other)])] = big

    mandatory = frozenset(a for a in edges if a not in red)
    asp = AspInstance(tuple(labels), edges, tuple(tags))
    assert asp.n <= inst.p + 2 * sum(len(s) for s in inst.permitted), \
        "gadget node bound violated"
    return asp, AspMap(inst.p, red, mandatory, tuple(shift),
                       big * len(mandatory))


def recover_bnsl_solution(edge_set: Iterable[tuple[int, int]],
                          mapping: AspMap) -> DigraphAssignment:
    """Pull an optimal-grade ASP arc set back to a parent-set assignment.

    A child with no score arc chose the empty set.

    Raises:
        ValueError: if a mandatory arc is missing, a child holds two
            score arcs, or the pullback is cyclic (all of which mean the
            input was not an optimal-grade arc set).
    """
    chosen = set(map(tuple, edge_set))
    missing = mapping.mandatory - chosen
    if missing:
        raise ValueError("arc set is missing %d mandatory arcs" % len(missing))
    parents: dict[int, tuple[int, ...]] = {}
    for arc, fam in mapping.red.items():
        if arc in chosen:
            if fam.child in parents:
                raise ValueError("child %d holds two score arcs" % fam.child)
            parents[fam.child] = fam.parents
    assignment = tuple(parents.get(i, ()) for i in range(mapping.p))
    if not is_acyclic(assignment):
        raise ValueError("pullback of an optimal-grade arc set must be acyclic")
    return assignment


def asp_weights_to_bnsl(asp: AspInstance, kappa: int | None = None) -> BnslInstance:
    """Scores from arc weights: c(i <- J) sums the weights of j -> i, j in J."""
    p = asp.n

    def score(f: Family) -> float:
        return sum(asp.edges.get((j, f.child), 0.0) for j in f.parents)

    return BnslInstance.full(p, score, kappa=kappa,
                             names=asp.labels)


# ---------------------------------------------------------------------------
# Projections between family space and edge space

def project_to_edges(x: Sequence, idx: FamilyIndex):
    """Edge marginals y[i][j] = sum of x over families i <- J with j in J."""
    zero = x[0] * 0 if len(x) else 0.0       # preserves Fraction inputs
    y = [[zero for _ in range(idx.p)] for _ in range(idx.p)]
    for k, fam in enumerate(idx.families):
        for j in fam.parents:
            y[fam.child][j] = y[fam.child][j] + x[k]
    return y


def project_inequality(pi_edges: Sequence[Sequence], rhs, idx: FamilyIndex):
    """Family-space inequality from an edge-space one: spread over parents."""
    from .polytope.inequality import LinearInequality
    coeffs = []
    for fam in idx.families:
        coeffs.append(sum(Fraction(pi_edges[fam.child][j]) for j in fam.parents))
    return LinearInequality(tuple(coeffs), Fraction(rhs))


# ---------------------------------------------------------------------------
# Exhaustive ASP oracles

def asp_brute_force(asp: AspInstance,
                    edge_limit: int = ASP_EDGE_LIMIT,
                    node_limit: int = ASP_NODE_LIMIT,
                    strategy: str | None = None) -> tuple[frozenset, float]:
    """Maximum-weight acyclic arc subset by exhaustive search.

    Non-positive arcs never help, so the search runs over positive arcs:
    either all orders of the nodes (``strategy="order"``, needs few nodes)
    or the full include/exclude tree over arcs with an upper-bound prune
    (``strategy="edges"``, needs few arcs).  Default picks whichever limit
    admits the instance, preferring the order scan.

    Raises:
        ValueError: if the instance exceeds both oracle limits.
    """
    pos = {a: w for a, w in asp.edges.items() if w > 0}
    if strategy is None:
        if asp.n <= node_limit:
            strategy = "order"
        elif len(pos) <= edge_limit:
            strategy = "edges"
        else:
            raise ValueError("instance above oracle limits (%d nodes, %d arcs)"
                             % (asp.n, len(pos)))
    if strategy == "order":
        if asp.n > node_limit:
            raise ValueError("order scan limited to %d nodes" % node_limit)
        return _order_scan(asp.n, pos)
    if strategy == "edges":
        if len(pos) > edge_limit:
            raise ValueError("edge scan limited to %d arcs" % edge_limit)
        return _edge_scan(asp.n, pos)
    raise ValueError("unknown strategy %r" % strategy)


def _order_scan(n: int, pos: dict) -> tuple[frozenset, float]:
    arcs = sorted(pos.items())
    best_val = float("-inf")
    best_set: frozenset = frozenset()
    for order in permutations(range(n)):
        rank = {v: t for t, v in enumerate(order)}
        val = 0.0
        taken = []
        for (u, v), w in arcs:
            if rank[u] < rank[v]:
                val += w
                taken.append((u, v))
        if val > best_val + 1e-12:
            best_val = val
            best_set = frozenset(taken)
    return best_set, best_val


def _edge_scan(n: int, pos: dict) -> tuple[frozenset, float]:
    arcs = sorted(pos.items(), key=lambda item: (-item[1], item[0]))
    suffix = [0.0] * (len(arcs) + 1)
    for t in range(len(arcs) - 1, -1, -1):
        suffix[t] = suffix[t + 1] + arcs[t][1]
    best_val = float("-inf")
    best_set: frozenset = frozenset()
    chosen: list[tuple[int, int]] = []

    def rec(t: int, val: float):
        nonlocal best_val, best_set
        if val + suffix[t] <= best_val + 1e-12:
            return
        if t == len(arcs):
            if val > best_val:
                best_val = val
                best_set = frozenset(chosen)
            return
        arc, w = arcs[t]
        chosen.append(arc)
        if edge_set_is_acyclic(chosen, n):
            rec(t + 1, val + w)
        chosen.pop()
        rec(t + 1, val)

    rec(0, 0.0)
    return best_set, best_val
