"""Faces of the family-variable polytope fixed by an order or by a sink.

Clamping every family variable inconsistent with a total order to zero
leaves a face of dimension 2^p - p - 1 whose facets are the remaining
lower bounds and per-node modified convexity rows.  Clamping every family
that would give a chosen node a child leaves the sink face, of dimension
(p+1) 2^(p-2) - p, whose stated facet list is the full catalogue of the
polytope on the other p - 1 nodes plus the sink's modified convexity.
Both faces are returned in their own coordinates (clamped columns
removed) together with their extreme points for rank certification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..model import Family, FamilyIndex, encode_digraph, enumerate_acyclic_digraphs
from .catalog import catalog_facets
from .inequality import LinearInequality, lower_bound, modified_convexity


@dataclass(frozen=True)
class FaceDescription:
    """A face in its own coordinate system.

    ``clamped`` lists the families fixed to zero in the ambient polytope;
    ``facets`` is the complete stated facet list in face coordinates.
    """

    kind: str
    p: int
    face_idx: FamilyIndex
    clamped: tuple[Family, ...]
    dimension: int
    facets: tuple[LinearInequality, ...]
    points: tuple[tuple[int, ...], ...]


def order_face(p: int, order: Sequence[int]) -> FaceDescription:
    """The face of digraphs consistent with a total order (parents first).

    Contains exactly one acyclic tournament; its points are all digraphs
    whose every family draws its parents from the order prefix.
    """
    if sorted(order) != list(range(p)):
        raise ValueError("order must be a permutation of 0..p-1")
    rank = {v: t for t, v in enumerate(order)}
    full = FamilyIndex.full(p)
    consistent = [f for f in full.families
                  if all(rank[j] < rank[f.child] for j in f.parents)]
    clamped = tuple(f for f in full.families if f not in set(consistent))
    face_idx = FamilyIndex(p, consistent)
    dim = 2 ** p - p - 1
    assert len(face_idx) == dim
    # One modified-convexity row per node; the order minimum gets the
    # vacuous empty-support row, kept so the list stays per-node complete.
    facets = [lower_bound(face_idx, f) for f in face_idx.families]
    for i in range(p):
        facets.append(modified_convexity(face_idx, i))
    points = tuple(tuple(encode_digraph(a, face_idx))
                   for a in enumerate_acyclic_digraphs(p)
                   if all(Family(i, ps) in face_idx or not ps
                          for i, ps in enumerate(a)))
    return FaceDescription("order", p, face_idx, clamped, dim, tuple(facets), points)


def sink_face(p: int, sink: int) -> FaceDescription:
    """The face of digraphs in which ``sink`` has no children.

    The stated facet list maps the complete (p-1)-node catalogue onto the
    other nodes and appends the sink's modified convexity; the sink's own
    variable lower bounds are inherited bounds, kept alongside so that the
    list describes a bounded region in face coordinates.
    """
    if not 0 <= sink < p:
        raise ValueError("sink out of range")
    full = FamilyIndex.full(p)
    allowed = [f for f in full.families if sink not in f.parents]
    clamped = tuple(f for f in full.families if sink in f.parents)
    face_idx = FamilyIndex(p, allowed)
    dim = (p + 1) * 2 ** (p - 2) - p
    assert len(face_idx) == dim
    others = [i for i in range(p) if i != sink]
    small = catalog_facets(p - 1)
    facets: list[LinearInequality] = []
    for entry in small.entries:
        coeffs = [Fraction(0)] * len(face_idx)
        for k, fam in enumerate(small.idx.families):
            if entry.coeffs[k]:
                image = Family(others[fam.child],
                               tuple(sorted(others[j] for j in fam.parents)))
                coeffs[face_idx.position(image)] = entry.coeffs[k]
        facets.append(LinearInequality(tuple(coeffs), entry.rhs,
                                       entry.label, entry.tag))
    facets.append(modified_convexity(face_idx, sink))
    sink_bounds = tuple(lower_bound(face_idx, Family(sink, ps))
                        for size in range(1, p)
                        for ps in combinations(others, size))
    points = tuple(tuple(encode_digraph(a, face_idx))
                   for a in enumerate_acyclic_digraphs(p)
                   if all(sink not in ps for ps in a))
    return FaceDescription("sink", p, face_idx, clamped, dim,
                           tuple(facets) + sink_bounds, points)
