"""Complete facet catalogues of small family-variable polytopes.

For two, three and four nodes (and four nodes capped at two parents) the
facet list is fully known: variable lower bounds, modified convexity, the
k-cluster inequalities, and for four unrestricted nodes nine further
permutation classes, here called 4B..4J after the solver that first
catalogued them.  One representative per class is transcribed below over
nodes ``a,b,c,d`` = 0,1,2,3; the annotated symmetry gives the orbit size
under node permutations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

from ..model import Family, FamilyIndex
from .inequality import (LinearInequality, from_terms, kcluster_inequality,
                         lower_bound, modified_convexity)

# (child, parents) -> coefficient; rhs; symmetry annotation; orbit size.
CLASS_REPRESENTATIVES = {
    "4B": ({(0, (1,)): 1, (0, (1, 2)): 1, (0, (1, 3)): 1, (0, (2, 3)): 1,
            (0, (1, 2, 3)): 1,
            (1, (0,)): 1, (1, (0, 2)): 1, (1, (0, 3)): 1, (1, (2, 3)): 1,
            (1, (0, 2, 3)): 1,
            (2, (0, 3)): 1, (2, (1, 3)): 1, (2, (0, 1, 3)): 1,
            (3, (0, 2)): 1, (3, (1, 2)): 1, (3, (0, 1, 2)): 1},
           2, "ab|cd", 6),
    "4C": ({(0, (2,)): 1, (0, (3,)): 1, (0, (1, 2)): 1, (0, (1, 3)): 1,
            (0, (2, 3)): 1, (0, (1, 2, 3)): 1,
            (1, (2, 3)): 1, (1, (0, 2, 3)): 1,
            (2, (0, 1)): 1, (2, (1, 3)): 1, (2, (0, 1, 3)): 1,
            (3, (0, 1)): 1, (3, (1, 2)): 1, (3, (0, 1, 2)): 1},
           2, "a|b|cd", 12),
    "4D": ({(0, (1,)): 1, (0, (2,)): 1, (0, (3,)): 1, (0, (1, 2)): 1,
            (0, (1, 3)): 1, (0, (2, 3)): 2, (0, (1, 2, 3)): 2,
            (1, (0,)): 1, (1, (2,)): 1, (1, (3,)): 1, (1, (0, 2)): 1,
            (1, (0, 3)): 1, (1, (2, 3)): 1, (1, (0, 2, 3)): 1,
            (2, (0,)): 1, (2, (0, 1)): 1, (2, (0, 3)): 1, (2, (0, 1, 3)): 1,
            (3, (0,)): 1, (3, (0, 1)): 1, (3, (0, 2)): 1, (3, (0, 1, 2)): 1},
           3, "a|b|cd", 12),
    "4E": ({(0, (1, 2)): 1, (0, (1, 3)): 1, (0, (2, 3)): 1, (0, (1, 2, 3)): 2,
            (1, (0, 2)): 1, (1, (0, 3)): 1, (1, (0, 2, 3)): 1,
            (2, (0, 1)): 1, (2, (0, 3)): 1, (2, (0, 1, 3)): 1,
            (3, (0, 1)): 1, (3, (0, 2)): 1, (3, (0, 1, 2)): 1},
           2, "a|bcd", 4),
    "4F": ({(0, (2, 3)): 1, (0, (1, 2, 3)): 1,
            (1, (2, 3)): 1, (1, (0, 2, 3)): 1,
            (2, (0,)): 1, (2, (1,)): 1, (2, (3,)): 1, (2, (0, 1)): 1,
            (2, (0, 3)): 1, (2, (1, 3)): 1, (2, (0, 1, 3)): 2,
            (3, (0,)): 1, (3, (1,)): 1, (3, (2,)): 1, (3, (0, 1)): 1,
            (3, (0, 2)): 1, (3, (1, 2)): 1, (3, (0, 1, 2)): 2},
           3, "ab|cd", 6),
    "4G": ({(0, (2, 3)): 1, (0, (1, 2, 3)): 1,
            (1, (2,)): 1, (1, (0, 2)): 1, (1, (2, 3)): 1, (1, (0, 2, 3)): 1,
            (2, (1,)): 1, (2, (3,)): 1, (2, (0, 1)): 1, (2, (0, 3)): 1,
            (2, (1, 3)): 1, (2, (0, 1, 3)): 2,
            (3, (0,)): 1, (3, (1,)): 1, (3, (2,)): 1, (3, (0, 1)): 1,
            (3, (0, 2)): 2, (3, (1, 2)): 1, (3, (0, 1, 2)): 2},
           3, "a|b|c|d", 24),
    "4H": ({(0, (2,)): 1, (0, (3,)): 1, (0, (1, 2)): 1, (0, (1, 3)): 1,
            (0, (2, 3)): 1, (0, (1, 2, 3)): 2,
            (1, (0, 2, 3)): 1,
            (2, (0, 1)): 1, (2, (0, 1, 3)): 1,
            (3, (0, 1)): 1, (3, (0, 1, 2)): 1},
           2, "a|b|cd", 12),
    "4I": ({(0, (2,)): 1, (0, (3,)): 1, (0, (1, 2)): 1, (0, (1, 3)): 1,
            (0, (2, 3)): 1, (0, (1, 2, 3)): 2,
            (1, (2,)): 1, (1, (3,)): 1, (1, (0, 2)): 1, (1, (0, 3)): 1,
            (1, (2, 3)): 1, (1, (0, 2, 3)): 2,
            (2, (0,)): 1, (2, (1,)): 1, (2, (3,)): 1, (2, (0, 1)): 2,
            (2, (0, 3)): 1, (2, (1, 3)): 1, (2, (0, 1, 3)): 2,
            (3, (0,)): 1, (3, (1,)): 1, (3, (2,)): 1, (3, (0, 1)): 2,
            (3, (0, 2)): 1, (3, (1, 2)): 1, (3, (0, 1, 2)): 2},
           4, "ab|cd", 6),
    "4J": ({(0, (1,)): 1, (0, (2,)): 1, (0, (3,)): 1, (0, (1, 2)): 2,
            (0, (1, 3)): 2, (0, (2, 3)): 2, (0, (1, 2, 3)): 2,
            (1, (0,)): 1, (1, (0, 2)): 1, (1, (0, 3)): 1, (1, (2, 3)): 1,
            (1, (0, 2, 3)): 1,
            (2, (0,)): 1, (2, (0, 1)): 1, (2, (0, 3)): 1, (2, (1, 3)): 1,
            (2, (0, 1, 3)): 1,
            (3, (0,)): 1, (3, (0, 1)): 1, (3, (0, 2)): 1, (3, (1, 2)): 1,
            (3, (0, 1, 2)): 1},
           3, "a|bcd", 4),
}

#: classes that survive the two-parent restriction (drop 3-parent columns)
K2_SURVIVORS = ("4B", "4C", "4D", "4J")

EXPECTED_TOTALS = {(2, None): 3, (3, None): 17, (4, None): 135, (4, 2): 78}


def class_inequality(name: str, idx: FamilyIndex,
                     restrict: bool = False) -> LinearInequality:
    """A class representative realised over ``idx`` (node count 4).

    With ``restrict`` the coefficients on missing (three-parent) columns
    are dropped, which is the two-parent restriction of the class.
    """
    terms, rhs, _, _ = CLASS_REPRESENTATIVES[name]
    kept = {}
    for (child, parents), coef in terms.items():
        fam = Family(child, parents)
        if fam in idx:
            kept[fam] = coef
        elif not restrict:
            raise KeyError("index lacks %r" % (fam,))
    return from_terms(idx, kept, rhs, label=name, tag=name)


def permutation_orbit(ineq: LinearInequality, idx: FamilyIndex) -> list[LinearInequality]:
    """All distinct images of an inequality under node permutations."""
    seen = {}
    for perm in permutations(range(idx.p)):
        coeffs = [Fraction(0)] * len(idx)
        for k, fam in enumerate(idx.families):
            if ineq.coeffs[k]:
                image = Family(perm[fam.child],
                               tuple(sorted(perm[j] for j in fam.parents)))
                coeffs[idx.position(image)] = ineq.coeffs[k]
        cand = LinearInequality(tuple(coeffs), ineq.rhs, ineq.label, ineq.tag)
        seen.setdefault(cand.key(), cand)
    out = [v.relabel(label="%s#%d" % (ineq.label, t))
           for t, (_, v) in enumerate(sorted(seen.items()))]
    return out


@dataclass(frozen=True)
class FacetCatalog:
    """Labelled complete facet list of one small polytope."""

    p: int
    kappa: int | None
    idx: FamilyIndex
    entries: tuple[LinearInequality, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def by_tag(self, prefix: str) -> list[LinearInequality]:
        return [e for e in self.entries if e.tag.startswith(prefix)]

    def class_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.tag] = counts.get(e.tag, 0) + 1
        return counts

    def render(self, header: bool = False) -> str:
        """Text listing, one inequality per line; optional column header."""
        out = []
        if header:
            columns = " ".join("%d:%d<-{%s}" % (k, f.child,
                                                ",".join(map(str, f.parents)))
                               for k, f in enumerate(self.idx.families))
            out.append("# p=%d kappa=%s columns %s\n"
                       % (self.p, self.kappa, columns))
        out.extend(e.render(self.idx) + "\n" for e in self.entries)
        return "".join(out)


def _effective(p: int, kappa: int | None) -> int | None:
    if kappa is not None and kappa >= p - 1:
        return None
    return kappa


def catalog_facets(p: int, kappa: int | None = None) -> FacetCatalog:
    """The complete facet catalogue for supported sizes.

    Supported: p = 2 or 3 (any cap, which cannot bite below p - 1),
    p = 4 unrestricted, and p = 4 with a two-parent cap.  Counts are
    pinned: 3, 17, 135 and 78 entries respectively.

    Raises:
        ValueError: outside the supported range.
    """
    kappa = _effective(p, kappa)
    if (p, kappa) not in EXPECTED_TOTALS:
        raise ValueError("no complete catalogue for p=%r, kappa=%r" % (p, kappa))
    idx = FamilyIndex.full(p, kappa)
    entries: list[LinearInequality] = []
    for fam in idx.families:
        entries.append(lower_bound(idx, fam))
    if p > 2:
        for i in range(p):
            entries.append(modified_convexity(idx, i))
    for size in range(2, p + 1):
        for cluster in combinations(range(p), size):
            for level in range(1, size):
                ineq = kcluster_inequality(idx, cluster, level)
                if any(ineq.coeffs):
                    entries.append(ineq)
    if p == 4:
        for name in sorted(CLASS_REPRESENTATIVES):
            if kappa == 2 and name not in K2_SURVIVORS:
                continue
            rep = class_inequality(name, idx, restrict=kappa == 2)
            _, _, _, orbit_size = CLASS_REPRESENTATIVES[name]
            orbit = permutation_orbit(rep, idx)
            if len(orbit) != orbit_size:
                raise AssertionError("class %s orbit has %d members, expected %d"
                                     % (name, len(orbit), orbit_size))
            entries.extend(e.relabel(tag=name) for e in orbit)
    catalog = FacetCatalog(p, kappa, idx, tuple(entries))
    expect = EXPECTED_TOTALS[(p, kappa)]
    if len(catalog) != expect:
        raise AssertionError("catalogue for (p=%d, kappa=%r) has %d entries, "
                             "expected %d" % (p, kappa, len(catalog), expect))
    return catalog
