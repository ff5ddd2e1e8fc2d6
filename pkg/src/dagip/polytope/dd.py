"""Facet enumeration of a full-dimensional polytope by double description.

Valid inequalities ``pi x <= pi0`` of conv(points) form a polyhedral cone
in homogeneous coordinates z = (pi, -pi0): one constraint ``(x, 1) . z <= 0``
per point.  The cone is pointed when the points affinely span, and its
extreme rays are exactly the facet-defining inequalities.  The double
description method builds the ray set incrementally: start from the
simplicial cone of d+1 independent point constraints, then clip with the
remaining points, combining adjacent rays across each new hyperplane.
Arithmetic is exact throughout.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .inequality import LinearInequality
from .verify import integer_rank


def _normalise(ray: list[Fraction]) -> tuple[int, ...]:
    denom = 1
    for e in ray:
        denom = denom * e.denominator // gcd(denom, e.denominator)
    ints = [int(e * denom) for e in ray]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return tuple(ints)


def _solve_columns(M: list[list[Fraction]]) -> list[list[Fraction]]:
    """Columns of -M^{-1}: the extreme rays of {z : Mz <= 0} for square M."""
    d = len(M)
    aug = [row[:] + [Fraction(-int(r == c)) for c in range(d)]
           for r, row in enumerate(M)]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col]), None)
        if piv is None:
            raise ValueError("initial point set does not affinely span")
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col]
        aug[col] = [v / inv for v in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [[aug[r][d + c] for r in range(d)] for c in range(d)]


def facet_enumeration(points: Sequence[Sequence],
                      labels: bool = False) -> list[LinearInequality]:
    """All facet-defining inequalities of conv(points), canonicalised.

    The points must affinely span their space (full-dimensional hull).
    Rays are tracked with the active sets of already-processed point
    constraints; two rays are adjacent, hence combinable when a hyperplane
    splits them, iff no third ray's active set contains the intersection
    of theirs.
    """
    if not points:
        raise ValueError("no points")
    dim = len(points[0])
    rows = [[Fraction(v) for v in pt] + [Fraction(1)] for pt in points]
    d1 = dim + 1
    if integer_rank([[int(v) for v in r] for r in rows]) != d1:
        raise ValueError("points do not affinely span dimension %d" % dim)

    # Greedy independent subset for the simplicial start.
    chosen: list[int] = []
    for t in range(len(rows)):
        trial = chosen + [t]
        if integer_rank([[int(v) for v in rows[i]] for i in trial]) == len(trial):
            chosen.append(t)
        if len(chosen) == d1:
            break
    M = [rows[i] for i in chosen]
    rays = []
    for col_ray in _solve_columns(M):
        active = frozenset(i for i in chosen
                           if sum(a * b for a, b in zip(rows[i], col_ray)) == 0)
        rays.append((col_ray, active))

    remaining = [t for t in range(len(rows)) if t not in set(chosen)]
    for t in remaining:
        row = rows[t]
        vals = [sum(a * b for a, b in zip(row, ray)) for ray, _ in rays]
        keep = []
        plus, minus = [], []
        for (ray, active), v in zip(rays, vals):
            if v < 0:
                keep.append((ray, active))
                minus.append((ray, active, v))
            elif v == 0:
                keep.append((ray, active | {t}))
            else:
                plus.append((ray, active, v))
        if not plus:
            rays = keep
            continue
        for rp, ap, vp in plus:
            for rn, an, vn in minus:
                # Combinatorial adjacency in the pre-clip cone: no third
                # ray's active set may contain the pair's intersection.
                if _adjacent(ap, an, rays):
                    new = [vp * b - vn * a for a, b in zip(rp, rn)]
                    newf = [Fraction(v) for v in _normalise(new)]
                    keep.append((newf, (ap & an) | {t}))
        # Deduplicate rays (same normalised direction).
        bykey = {}
        for ray, active in keep:
            key = _normalise(list(ray))
            if key in bykey:
                prev_ray, prev_active = bykey[key]
                bykey[key] = (prev_ray, prev_active | active)
            else:
                bykey[key] = ([Fraction(v) for v in key], active)
        rays = list(bykey.values())

    out = []
    for ray, _ in rays:
        norm = _normalise(list(ray))
        out.append(LinearInequality(tuple(Fraction(v) for v in norm[:dim]),
                                    Fraction(-norm[dim])).canonical())
    out.sort(key=lambda q: (q.rhs, q.coeffs))
    if labels:
        out = [q.relabel(label="dd#%d" % t) for t, q in enumerate(out)]
    return out


def _adjacent(ap: frozenset, an: frozenset, rays) -> bool:
    common = ap & an
    for _, active in rays:
        if active == ap or active == an:
            continue
        if common <= active:
            return False
    return True
