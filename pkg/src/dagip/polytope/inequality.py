"""Exact linear inequalities over a family-variable index.

Everything in the polytope package is rational: coefficients are
``fractions.Fraction`` and comparisons are exact.  An inequality is always
stored in "less-or-equal" orientation; lower bounds on variables appear as
``-x <= 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Sequence

from ..model import Family, FamilyIndex


@dataclass(frozen=True)
class LinearInequality:
    """``coeffs . x <= rhs`` over the columns of a family index."""

    coeffs: tuple[Fraction, ...]
    rhs: Fraction
    label: str = ""
    tag: str = ""

    def evaluate(self, x: Sequence) -> Fraction:
        return sum((c * v for c, v in zip(self.coeffs, x) if c), Fraction(0))

    def satisfied_by(self, x: Sequence) -> bool:
        return self.evaluate(x) <= self.rhs

    def tight_at(self, x: Sequence) -> bool:
        return self.evaluate(x) == self.rhs

    def is_lower_bound(self) -> bool:
        nonzero = [c for c in self.coeffs if c]
        return self.rhs == 0 and len(nonzero) == 1 and nonzero[0] < 0

    def canonical(self) -> "LinearInequality":
        """Scale by a positive rational to coprime integers.

        Orientation cannot flip under positive scaling, so lower bounds
        stay ``-x <= 0`` while every monotone facet keeps its nonnegative
        coefficients.
        """
        entries = list(self.coeffs) + [self.rhs]
        denom = 1
        for e in entries:
            denom = denom * e.denominator // gcd(denom, e.denominator)
        ints = [int(e * denom) for e in entries]
        g = 0
        for v in ints:
            g = gcd(g, abs(v))
        if g > 1:
            ints = [v // g for v in ints]
        return LinearInequality(tuple(Fraction(v) for v in ints[:-1]),
                                Fraction(ints[-1]), self.label, self.tag)

    def key(self) -> tuple:
        c = self.canonical()
        return (c.coeffs, c.rhs)

    def relabel(self, label: str | None = None, tag: str | None = None) -> "LinearInequality":
        return LinearInequality(self.coeffs, self.rhs,
                                self.label if label is None else label,
                                self.tag if tag is None else tag)

    def render(self, idx: FamilyIndex) -> str:
        """One-line text form ``label: sum coef*family <= rhs``."""
        parts = []
        for c, fam in zip(self.coeffs, idx.families):
            if not c:
                continue
            name = "x[%d<-{%s}]" % (fam.child, ",".join(map(str, fam.parents)))
            parts.append(("%s*%s" % (c, name)) if c != 1 else name)
        body = " + ".join(parts) if parts else "0"
        head = ("%s: " % self.label) if self.label else ""
        return "%s%s <= %s" % (head, body, self.rhs)


def from_terms(idx: FamilyIndex, terms: Mapping[Family, int | Fraction],
               rhs, label: str = "", tag: str = "") -> LinearInequality:
    coeffs = [Fraction(0)] * len(idx)
    for fam, coef in terms.items():
        coeffs[idx.position(fam)] += Fraction(coef)
    return LinearInequality(tuple(coeffs), Fraction(rhs), label, tag)


def lower_bound(idx: FamilyIndex, fam: Family) -> LinearInequality:
    coeffs = [Fraction(0)] * len(idx)
    coeffs[idx.position(fam)] = Fraction(-1)
    name = "lb(%d<-{%s})" % (fam.child, ",".join(map(str, fam.parents)))
    return LinearInequality(tuple(coeffs), Fraction(0), name, "lower-bound")


def modified_convexity(idx: FamilyIndex, child: int) -> LinearInequality:
    """At most one non-empty parent set per child (the empty one absorbed)."""
    coeffs = [Fraction(0)] * len(idx)
    for k in idx.columns_of_child(child):
        coeffs[k] = Fraction(1)
    return LinearInequality(tuple(coeffs), Fraction(1),
                            "mc(%d)" % child, "modified-convexity")


def kcluster_inequality(idx: FamilyIndex, cluster: Iterable[int],
                        kappa: int) -> LinearInequality:
    """At most ``|C| - kappa`` members of C with >= kappa parents inside C."""
    cset = frozenset(cluster)
    if not 1 <= kappa < len(cset):
        raise ValueError("need 1 <= kappa < |C|")
    coeffs = [Fraction(0)] * len(idx)
    for i in sorted(cset):
        for k in idx.columns_of_child(i):
            if len(cset.intersection(idx.families[k].parents)) >= kappa:
                coeffs[k] = Fraction(1)
    name = "cluster(%s;k=%d)" % (",".join(map(str, sorted(cset))), kappa)
    return LinearInequality(tuple(coeffs), Fraction(len(cset) - kappa),
                            name, "kcluster(%d)" % kappa)
