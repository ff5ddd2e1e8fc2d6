"""Validity and facet-rank certification against enumerated digraphs.

A face is a facet of the full-dimensional polytope exactly when its tight
points contain dim-many affinely independent ones, i.e. the matrix of rows
``(x, 1)`` over tight points has rank equal to the number of columns of
the family index.  Rank decisions are exact: a fast rank over a large
prime field is a lower bound for the rational rank, the affine relation
``pi x = pi0`` caps it from above, and whenever the two disagree a
fraction-free integer elimination settles it.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from ..model import (FamilyIndex, encode_digraph, enumerate_acyclic_digraphs,
                     is_acyclic)
from .inequality import LinearInequality

_RANK_PRIME = (1 << 31) - 1


@lru_cache(maxsize=32)
def dag_points(p: int, kappa: int | None = None):
    """All acyclic digraph encodings over the full lattice, with their index."""
    idx = FamilyIndex.full(p, kappa)
    pts = tuple(tuple(encode_digraph(a, idx))
                for a in enumerate_acyclic_digraphs(p, kappa))
    return idx, pts


def rank_mod_p(rows: Iterable[Sequence[int]], prime: int = _RANK_PRIME) -> int:
    mat = [[int(v) % prime for v in row] for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], prime - 2, prime)
        prow = mat[rank]
        for r in range(rank + 1, len(mat)):
            f = mat[r][col]
            if f:
                f = f * inv % prime
                row = mat[r]
                for c in range(col, ncols):
                    row[c] = (row[c] - f * prow[c]) % prime
        rank += 1
        if rank == min(len(mat), ncols):
            break
    return rank


def integer_rank(rows: Iterable[Sequence[int]]) -> int:
    """Exact rank by fraction-free (Bareiss) elimination over the integers."""
    mat = [[int(v) for v in row] for row in rows]
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        prow = mat[rank]
        p = prow[col]
        for r in range(rank + 1, len(mat)):
            row = mat[r]
            q = row[col]
            for c in range(col, ncols):
                row[c] = (p * row[c] - q * prow[c]) // prev
        prev = p
        rank += 1
        if rank == min(len(mat), ncols):
            break
    return rank


def affine_rank(points: Sequence[Sequence[int]]) -> int:
    """Rank of the homogenised point matrix ``(x, 1)``; dim + 1 of their hull."""
    rows = [tuple(pt) + (1,) for pt in points]
    if not rows:
        return 0
    cap = min(len(rows), len(rows[0]))
    fast = rank_mod_p(rows)
    if fast == cap:
        return fast
    return integer_rank(rows)


def verify_validity(ineq: LinearInequality, points: Sequence[Sequence[int]]):
    """Check ``pi x <= pi0`` on every point; return (ok, first witness)."""
    for pt in points:
        if not ineq.satisfied_by(pt):
            return False, pt
    return True, None


def facet_rank(ineq: LinearInequality, points: Sequence[Sequence[int]]):
    """Tight-point count and the affine rank of the tight set.

    The inequality is facet-defining for the hull of ``points`` (assumed
    full-dimensional) iff the returned rank equals the column count.
    """
    tight = [pt for pt in points if ineq.tight_at(pt)]
    if not tight:
        return 0, 0
    rows = [tuple(pt) + (1,) for pt in tight]
    ncols = len(rows[0])
    # pi x = pi0 is one honest affine relation, so rank <= ncols - 1 always;
    # hitting that cap over the prime field certifies the exact rank.
    cap = min(len(rows), ncols - 1)
    fast = rank_mod_p(rows)
    rank = fast if fast == cap else integer_rank(rows)
    return len(tight), rank


def is_facet(ineq: LinearInequality, points: Sequence[Sequence[int]],
             ambient: int) -> bool:
    ok, _ = verify_validity(ineq, points)
    if not ok:
        return False
    _, rank = facet_rank(ineq, points)
    return rank == ambient


def check_monotone_form(entries: Iterable[LinearInequality]) -> bool:
    """Every entry is a variable lower bound or has pi >= 0 and pi0 > 0."""
    for ineq in entries:
        if ineq.is_lower_bound():
            continue
        if ineq.rhs <= 0 or any(c < 0 for c in ineq.coeffs):
            return False
    return True


def check_coeff_monotonicity(entries: Iterable[LinearInequality],
                             idx: FamilyIndex) -> bool:
    """Coefficients never decrease when a parent set grows (same child)."""
    for ineq in entries:
        if ineq.is_lower_bound():
            continue
        for a, fam_a in enumerate(idx.families):
            for b in idx.columns_of_child(fam_a.child):
                fam_b = idx.families[b]
                if fam_a != fam_b and set(fam_a.parents) <= set(fam_b.parents):
                    if ineq.coeffs[a] > ineq.coeffs[b]:
                        return False
    return True


def integral_cluster_points_are_dags(p: int, kappa: int | None = None) -> bool:
    """0/1 points with unit child mass satisfy all cluster rows iff acyclic.

    Exhausts every digraph assignment (cyclic included) and compares
    "satisfies every cluster inequality" with acyclicity.
    """
    from itertools import combinations, product
    from ..model import parent_set_lattice
    idx = FamilyIndex.full(p, kappa)
    clusters = [frozenset(c) for size in range(2, p + 1)
                for c in combinations(range(p), size)]
    choices = [tuple(parent_set_lattice(p, i, kappa)) for i in range(p)]
    for assignment in product(*choices):
        x = encode_digraph(assignment, idx)
        ok = True
        for cset in clusters:
            inside = sum(x[k] for i in cset for k in idx.columns_of_child(i)
                         if cset.intersection(idx.families[k].parents))
            if inside > len(cset) - 1:
                ok = False
                break
        if ok != is_acyclic(assignment):
            return False
    return True
