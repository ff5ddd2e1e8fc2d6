"""Core domain types for score-based Bayesian network structure learning.

A problem instance assigns each node a collection of permitted parent sets,
each with a local score; the goal is an acyclic digraph (one parent set per
node) maximising the sum of local scores.  Everything downstream (LP
relaxation, separation, polytope work) is phrased over *family variables*:
one indicator per (child, non-empty parent set) pair.

Instances, indices and enumeration outputs are immutable once built and
safe to share across threads; an enumeration stream itself is a plain
generator, single-consumer.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple, Sequence

INTEGRALITY_TOL = 1e-6

#: Default cap on exhaustive digraph enumeration.
ENUMERATION_LIMIT = 6


class Family(NamedTuple):
    """A child node paired with a candidate parent set (sorted index tuple)."""

    child: int
    parents: tuple[int, ...]


def family(child: int, parents: Iterable[int]) -> Family:
    """Build a :class:`Family`, sorting the parents and checking child not in them."""
    ps = tuple(sorted(parents))
    if child in ps:
        raise ValueError("node %d listed as its own parent" % child)
    if len(set(ps)) != len(ps):
        raise ValueError("duplicate parent in %r" % (ps,))
    return Family(child, ps)


def default_names(p: int) -> tuple[str, ...]:
    if p <= 26:
        return tuple(string.ascii_lowercase[:p])
    return tuple("v%d" % i for i in range(p))


@dataclass(frozen=True)
class BnslInstance:
    """A structure-learning instance: nodes, permitted parent sets, local scores.

    Attributes:
        names: display name per node, in index order.
        permitted: per node, the sorted tuple of permitted parent sets
            (each a sorted tuple of node indices).  Always contains ().
        scores: local score for every permitted family, including the
            empty-parent families.
        kappa: optional cap on parent set size; when set every permitted
            set obeys it.
    """

    names: tuple[str, ...]
    permitted: tuple[tuple[tuple[int, ...], ...], ...]
    scores: Mapping[Family, float]
    kappa: int | None = None

    def __post_init__(self):
        p = len(self.names)
        if len(self.permitted) != p:
            raise ValueError("permitted sets given for %d nodes, expected %d"
                             % (len(self.permitted), p))
        # Canonical per-node ordering (size, then lexicographic) so that
        # structurally equal instances compare equal whatever their source.
        object.__setattr__(self, "permitted",
                           tuple(tuple(sorted(sets, key=lambda s: (len(s), s)))
                                 for sets in self.permitted))
        if self.kappa is not None and self.kappa < 1:
            raise ValueError("kappa must be positive")
        seen_scores = 0
        for i, sets in enumerate(self.permitted):
            if () not in sets:
                raise ValueError("node %s lacks the empty parent set" % self.names[i])
            if len(set(sets)) != len(sets):
                raise ValueError("duplicate permitted set for node %s" % self.names[i])
            for ps in sets:
                if any(j == i for j in ps):
                    raise ValueError("node %s permitted as its own parent" % self.names[i])
                if any(j < 0 or j >= p for j in ps):
                    raise ValueError("parent index out of range in %r" % (ps,))
                if tuple(sorted(ps)) != ps:
                    raise ValueError("parent set %r not sorted" % (ps,))
                if self.kappa is not None and len(ps) > self.kappa:
                    raise ValueError("parent set %r exceeds kappa=%d" % (ps, self.kappa))
                if Family(i, ps) not in self.scores:
                    raise ValueError("missing score for %s <- %r" % (self.names[i], ps))
                seen_scores += 1
        if seen_scores != len(self.scores):
            raise ValueError("scores contain entries for non-permitted families")

    @property
    def p(self) -> int:
        return len(self.names)

    def score(self, child: int, parents: Iterable[int]) -> float:
        return self.scores[family(child, parents)]

    @classmethod
    def full(cls, p: int, scores: Mapping[Family, float] | Callable[[Family], float],
             kappa: int | None = None,
             names: Sequence[str] | None = None) -> "BnslInstance":
        """Instance permitting every parent set (up to ``kappa``) for every node."""
        permitted = tuple(tuple(parent_set_lattice(p, i, kappa)) for i in range(p))
        if callable(scores):
            table = {Family(i, ps): float(scores(Family(i, ps)))
                     for i in range(p) for ps in permitted[i]}
        else:
            table = dict(scores)
        return cls(tuple(names) if names else default_names(p), permitted, table, kappa)


def parent_set_lattice(p: int, child: int, kappa: int | None = None) -> Iterator[tuple[int, ...]]:
    """All parent sets for ``child`` from ``p`` nodes, smallest first then lexicographic."""
    others = [j for j in range(p) if j != child]
    top = len(others) if kappa is None else min(kappa, len(others))
    for size in range(top + 1):
        for combo in combinations(others, size):
            yield combo


class FamilyIndex:
    """Deterministic column order for the non-empty families of an instance.

    Columns are sorted by child index, then lexicographically by parent
    tuple.  Empty-parent families are deliberately excluded: the model is
    full-dimensional over the remaining coordinates and the value of an
    empty-parent variable is recovered as one minus its siblings' mass.
    """

    def __init__(self, p: int, families: Iterable[Family]):
        self.p = p
        self.families: tuple[Family, ...] = tuple(sorted(families))
        if any(not f.parents for f in self.families):
            raise ValueError("empty-parent family in index")
        self._pos = {f: k for k, f in enumerate(self.families)}
        if len(self._pos) != len(self.families):
            raise ValueError("duplicate family in index")
        self._by_child: list[list[int]] = [[] for _ in range(p)]
        for k, f in enumerate(self.families):
            self._by_child[f.child].append(k)

    @classmethod
    def from_instance(cls, inst: BnslInstance) -> "FamilyIndex":
        fams = [Family(i, ps) for i in range(inst.p)
                for ps in inst.permitted[i] if ps]
        return cls(inst.p, fams)

    @classmethod
    def full(cls, p: int, kappa: int | None = None) -> "FamilyIndex":
        fams = [Family(i, ps) for i in range(p)
                for ps in parent_set_lattice(p, i, kappa) if ps]
        return cls(p, fams)

    def position(self, fam: Family) -> int:
        try:
            return self._pos[fam]
        except KeyError:
            raise KeyError("family %r not in index" % (fam,)) from None

    def __contains__(self, fam: Family) -> bool:
        return fam in self._pos

    def __len__(self) -> int:
        return len(self.families)

    def __iter__(self) -> Iterator[Family]:
        return iter(self.families)

    def columns_of_child(self, child: int) -> list[int]:
        return self._by_child[child]


# A digraph assignment is one parent set per node; () means no parents.
DigraphAssignment = tuple

EMPTY_CHOICE: tuple[int, ...] = ()


def empty_digraph(p: int) -> DigraphAssignment:
    return tuple(EMPTY_CHOICE for _ in range(p))


def edges_of(assignment: DigraphAssignment) -> list[tuple[int, int]]:
    """Directed edges (parent, child) induced by an assignment."""
    return [(j, i) for i, ps in enumerate(assignment) for j in ps]


def is_acyclic(assignment: DigraphAssignment) -> bool:
    """True iff the induced digraph has no directed cycle.

    Iterative depth-first search with the usual three colours (unseen,
    on stack, finished); parents point to children, but cycle existence
    does not depend on edge orientation conventions being fixed here.
    """
    p = len(assignment)
    children: list[list[int]] = [[] for _ in range(p)]
    for i, ps in enumerate(assignment):
        for j in ps:
            children[j].append(i)
    colour = [0] * p
    for root in range(p):
        if colour[root]:
            continue
        stack = [(root, iter(children[root]))]
        colour[root] = 1
        while stack:
            node, it = stack[-1]
            for nxt in it:
                if colour[nxt] == 1:
                    return False
                if colour[nxt] == 0:
                    colour[nxt] = 1
                    stack.append((nxt, iter(children[nxt])))
                    break
            else:
                colour[node] = 2
                stack.pop()
    return True


def validate_assignment(assignment: DigraphAssignment, inst: BnslInstance) -> None:
    if len(assignment) != inst.p:
        raise ValueError("assignment length %d != %d nodes" % (len(assignment), inst.p))
    for i, ps in enumerate(assignment):
        if ps not in inst.permitted[i]:
            raise ValueError("parent set %r not permitted for node %s"
                             % (ps, inst.names[i]))


def total_score(assignment: DigraphAssignment, inst: BnslInstance) -> float:
    """Sum of local scores of the chosen families."""
    total = 0.0
    for i, ps in enumerate(assignment):
        fam = Family(i, ps)
        if fam not in inst.scores:
            raise KeyError("no score for %s <- %r" % (inst.names[i], ps))
        total += inst.scores[fam]
    return total


def encode_digraph(assignment: DigraphAssignment, idx: FamilyIndex) -> list[int]:
    """Family-variable encoding of a digraph: 0/1 over the index columns.

    Empty parent choices leave the child's whole row at zero; the encoding
    is exact (integers), so it can feed both float LP code and the rational
    polytope code.
    """
    x = [0] * len(idx)
    for i, ps in enumerate(assignment):
        if ps:
            x[idx.position(Family(i, ps))] = 1
    return x


def decode_digraph(x: Sequence[float], idx: FamilyIndex,
                   tol: float = INTEGRALITY_TOL) -> DigraphAssignment:
    """Invert :func:`encode_digraph`, rounding within ``tol``.

    Raises:
        ValueError: if a component is fractional beyond ``tol`` or two
            families of the same child are set.
    """
    chosen: dict[int, Family] = {}
    for k, v in enumerate(x):
        if abs(v) <= tol:
            continue
        if abs(v - 1) > tol:
            raise ValueError("component %d is fractional (%r)" % (k, v))
        fam = idx.families[k]
        if fam.child in chosen:
            raise ValueError("two families set for child %d" % fam.child)
        chosen[fam.child] = fam
    return tuple(chosen[i].parents if i in chosen else EMPTY_CHOICE
                 for i in range(idx.p))


def is_integral(x: Sequence[float], tol: float = INTEGRALITY_TOL) -> bool:
    return all(abs(v) <= tol or abs(v - 1) <= tol for v in x)


def child_mass(x: Sequence[float], idx: FamilyIndex, child: int) -> float:
    """Total non-empty-family mass of one child (the derived 1 - x_{i<-empty})."""
    return sum(x[k] for k in idx.columns_of_child(child))


def cluster_lhs(x: Sequence[float], idx: FamilyIndex, cluster: Iterable[int],
                form: str = "outside") -> float:
    """Left-hand side of a cluster inequality at ``x``.

    The ``outside`` form sums, over cluster members, the mass of families
    whose parents avoid the cluster, *including* the implicit empty-parent
    rows; on an integral point it counts cluster nodes with no parents
    inside the cluster, and validity is ``>= 1``.  The ``inside`` form sums
    the mass of families meeting the cluster; validity is ``<= |C| - 1``.
    """
    cset = frozenset(cluster)
    if len(cset) < 2:
        raise ValueError("cluster must have at least 2 nodes")
    inside = 0.0
    for i in cset:
        for k in idx.columns_of_child(i):
            if cset.intersection(idx.families[k].parents):
                inside += x[k]
    if form == "inside":
        return inside
    if form == "outside":
        return len(cset) - inside
    raise ValueError("form must be 'outside' or 'inside'")


def _acyclic_assignments(candidates: Sequence[Sequence[tuple[int, ...]]]) -> Iterator[DigraphAssignment]:
    """Depth-first product of per-node candidates, pruning partial cycles.

    A cycle can only use nodes whose parent set is already fixed, so after
    fixing node k we just test whether k now lies on a cycle among nodes
    0..k; unassigned nodes have no incoming edges yet.
    """
    p = len(candidates)
    chosen: list[tuple[int, ...]] = [EMPTY_CHOICE] * p

    def on_cycle(k: int, upto: int) -> bool:
        # DFS from k following parent -> child edges within assigned nodes.
        stack = [k]
        seen = set()
        while stack:
            node = stack.pop()
            for i in range(upto + 1):
                if node in chosen[i]:
                    if i == k:
                        return True
                    if i not in seen:
                        seen.add(i)
                        stack.append(i)
        return False

    def rec(k: int) -> Iterator[DigraphAssignment]:
        if k == p:
            yield tuple(chosen)
            return
        for ps in candidates[k]:
            chosen[k] = ps
            if not ps or not on_cycle(k, k):
                yield from rec(k + 1)
        chosen[k] = EMPTY_CHOICE

    return rec(0)


def enumerate_acyclic_digraphs(p: int, kappa: int | None = None,
                               limit: int = ENUMERATION_LIMIT) -> Iterator[DigraphAssignment]:
    """Yield every acyclic digraph on ``p`` nodes exactly once.

    Parent sets run over the full lattice, optionally capped at ``kappa``
    parents.  Deterministic order (per-node candidates smallest first,
    then lexicographic).  Counts for small ``p`` are pinned by tests:
    3, 25, 543 for p = 2, 3, 4 and 443 for p = 4 with ``kappa`` = 2.

    Raises:
        ValueError: if ``p`` exceeds ``limit``.
    """
    if p > limit:
        raise ValueError("enumeration for p=%d exceeds limit %d" % (p, limit))
    candidates = [tuple(parent_set_lattice(p, i, kappa)) for i in range(p)]
    return _acyclic_assignments(candidates)


def enumerate_acyclic_assignments(inst: BnslInstance,
                                  limit: int = ENUMERATION_LIMIT) -> Iterator[DigraphAssignment]:
    """Exhaustive acyclic assignments of an instance (its permitted sets only)."""
    if inst.p > limit:
        raise ValueError("enumeration for p=%d exceeds limit %d" % (inst.p, limit))
    return _acyclic_assignments(inst.permitted)


def best_assignment_brute_force(inst: BnslInstance,
                                limit: int = ENUMERATION_LIMIT) -> tuple[DigraphAssignment, float]:
    """Reference optimum by exhaustive enumeration (first optimum in order)."""
    best = None
    best_val = float("-inf")
    for a in enumerate_acyclic_assignments(inst, limit):
        v = total_score(a, inst)
        if v > best_val + 1e-12:
            best, best_val = a, v
    assert best is not None
    return best, best_val
