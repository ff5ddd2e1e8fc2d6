"""Lifting facets to larger node sets and restricting parent sets.

Lifting spreads each coefficient over all parent-set supersets inside the
enlarged node set: the coefficient of i <- J' in the lift is the original
coefficient of i <- (J' intersect V).  Restriction deletes one parent-set
column; it is guaranteed to stay facet-defining when the column's
coefficient is matched by some non-empty indexed subset of it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from ..model import Family, FamilyIndex
from .inequality import LinearInequality


def lift_facet(ineq: LinearInequality, small: FamilyIndex, big: FamilyIndex,
               embed: Sequence[int] | None = None) -> LinearInequality:
    """Lift an inequality from a node subset to a larger node set.

    Args:
        ineq: inequality over ``small``; must not be a variable lower bound
            (those do not lift by coefficient spreading).
        small: index over p nodes, all parent sets allowed.
        big: index over the enlarged node set, all parent sets allowed.
        embed: image of each small node inside the big node set, default
            the identity on 0..p-1.

    Returns:
        The lifted inequality over ``big`` with the same right-hand side.
    """
    if ineq.is_lower_bound():
        raise ValueError("variable lower bounds do not lift")
    if embed is None:
        embed = tuple(range(small.p))
    image = {embed[i] for i in range(small.p)}
    back = {embed[i]: i for i in range(small.p)}
    coeffs = [Fraction(0)] * len(big)
    for k, fam in enumerate(big.families):
        if fam.child not in image:
            continue
        inter = tuple(sorted(back[j] for j in fam.parents if j in image))
        if not inter:
            continue
        src = Family(back[fam.child], inter)
        if src in small:
            coeffs[k] = ineq.coeffs[small.position(src)]
    return LinearInequality(tuple(coeffs), ineq.rhs,
                            ineq.label and ineq.label + "^lift", ineq.tag)


def restrict_facet(ineq: LinearInequality, idx: FamilyIndex, drop: Family,
                   force: bool = False) -> tuple[LinearInequality, FamilyIndex]:
    """Delete one parent-set column from an inequality and its index.

    The restriction theorem applies when some indexed non-empty proper
    subset of the dropped parent set carries the same coefficient; then
    the result is facet-defining for the restricted polytope.  Without the
    precondition the drop is refused unless ``force`` is set (the caller
    may drop anyway and re-certify by rank).

    Returns:
        The restricted inequality and the restricted index.
    """
    pos = idx.position(drop)
    witness = False
    for k in idx.columns_of_child(drop.child):
        fam = idx.families[k]
        if fam != drop and set(fam.parents) < set(drop.parents):
            if ineq.coeffs[k] == ineq.coeffs[pos]:
                witness = True
                break
    if not witness and not force:
        raise ValueError("unsupported by the restriction theorem: no matching "
                         "proper subset coefficient for %r" % (drop,))
    kept = [k for k in range(len(idx)) if k != pos]
    new_idx = FamilyIndex(idx.p, [idx.families[k] for k in kept])
    new_coeffs = tuple(ineq.coeffs[k] for k in kept)
    return (LinearInequality(new_coeffs, ineq.rhs,
                             ineq.label and ineq.label + "^restr", ineq.tag),
            new_idx)
