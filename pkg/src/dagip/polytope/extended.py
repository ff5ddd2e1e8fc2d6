"""Sink-based extended representation of the four-node polytope.

Choosing a distinguished sink j for each acyclic digraph writes the
polytope as the convex hull of the union of its p sink faces.  The
standard union-of-polytopes model introduces a variable per sink, a copy
x[j, i<-J] of each family variable compatible with sink j, linking
equations tying copies to originals, and the sink-face facet rows scaled
by the sink variable.  The copy of a sink's own full parent set is
eliminated through its single-term linking equation, which leaves, for
four nodes, 92 variables, 25 equations and 100 inequalities (36 facet
rows plus a lower bound for each sink and extended variable).

Nonnegative combinations of the facet rows, reduced by the linking
equations and weakened by variable lower bounds, project to valid
inequalities over the original variables; the nine published multiplier
vectors reproduce the nine four-node facet classes exactly.

The printed form of this model in its source carries a handful of typos;
the rows are transcribed verbatim below and audited against enumerated
sink-face points, applying the canonical construction wherever a printed
row names an impossible variable or fails validity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from ..model import Family, FamilyIndex, enumerate_acyclic_digraphs
from .inequality import LinearInequality

LETTERS = "abcd"
P = 4

# VarKey forms: ("sink", j) | ("fam", Family) | ("ext", j, Family)


def _fam(child: int, parents) -> Family:
    return Family(child, tuple(sorted(parents)))


def _full_set(child: int) -> Family:
    return _fam(child, tuple(j for j in range(P) if j != child))


def _ext_families(j: int):
    """Families copied for sink j: sink not a parent, own full set dropped."""
    out = []
    for fam in FamilyIndex.full(P).families:
        if j in fam.parents:
            continue
        if fam.child == j and len(fam.parents) == P - 1:
            continue
        out.append(fam)
    return out


def _ext_key(j: int, fam: Family):
    """Variable carrying the copy of ``fam`` under sink j, post-elimination."""
    if fam.child == j and len(fam.parents) == P - 1:
        return ("fam", fam)
    return ("ext", j, fam)


@dataclass(frozen=True)
class ExtendedModel:
    """The lifted model: variables, equations, facet rows, lower bounds.

    Rows and bounds are stored as term maps with an implicit ``<= 0``;
    sink variables enter facet rows with coefficient minus the face
    right-hand side.  ``inequalities`` is rows plus lower bounds.
    """

    variables: tuple
    equations: tuple            # (terms, rhs) pairs, exact
    rows: Mapping[str, Mapping]
    lower_bounds: tuple         # var keys owning an explicit 0 <= var row

    @property
    def inequalities(self) -> list:
        out = [("row:%s" % label, dict(terms)) for label, terms in self.rows.items()]
        out.extend(("bound:%r" % (key,), {key: Fraction(-1)})
                   for key in self.lower_bounds)
        return out

    def counts(self) -> tuple[int, int, int]:
        return len(self.variables), len(self.equations), len(self.inequalities)


def _canonical_rows() -> dict[str, dict]:
    """The 36 per-sink facet rows of the construction, by label."""
    rows: dict[str, dict] = {}
    for j in range(P):
        others = [i for i in range(P) if i != j]
        sj = LETTERS[j]
        # Modified convexity of each other child within the face.
        for i in others:
            terms: dict = {}
            for size in (1, 2):
                for ps in combinations([t for t in others if t != i], size):
                    terms[_ext_key(j, _fam(i, ps))] = Fraction(1)
            terms[("sink", j)] = Fraction(-1)
            rows["%s-%s" % (sj, LETTERS[i])] = terms
        # Level-1 cluster rows on every subset of the other nodes.
        for size in (2, 3):
            for cluster in combinations(others, size):
                cset = set(cluster)
                terms = {}
                for i in cluster:
                    for sz in (1, 2):
                        for ps in combinations([t for t in others if t != i], sz):
                            if cset.intersection(ps):
                                terms[_ext_key(j, _fam(i, ps))] = Fraction(1)
                terms[("sink", j)] = Fraction(-(size - 1))
                rows["%s-%s" % (sj, "".join(LETTERS[i] for i in cluster))] = terms
        # Level-2 cluster row on all three other nodes.
        triple = tuple(others)
        terms = {}
        for i in triple:
            ps = tuple(t for t in others if t != i)
            terms[_ext_key(j, _fam(i, ps))] = Fraction(1)
        terms[("sink", j)] = Fraction(-1)
        rows["%s-2-%s" % (sj, "".join(LETTERS[i] for i in triple))] = terms
        # The sink's own modified convexity (full set already substituted).
        terms = {}
        for size in (1, 2, 3):
            for ps in combinations(others, size):
                terms[_ext_key(j, _fam(j, ps))] = Fraction(1)
        terms[("sink", j)] = Fraction(-1)
        rows["%s-%s" % (sj, sj)] = terms
    return rows


def build_extended_model(p: int = 4) -> ExtendedModel:
    """Construct the four-node extended representation.

    Counts are pinned: 92 variables, 25 equations (one sink-convexity
    plus 24 linking), 100 inequalities (36 facet rows, 4 sink lower
    bounds, 60 extended lower bounds).  Original-variable box bounds are
    not part of the inventory, matching the published tally.

    Raises:
        ValueError: for any ``p`` other than 4; only the worked case
            carries the verification data (labels and multipliers).
    """
    if p != P:
        raise ValueError("the extended representation is materialised for "
                         "four nodes only")
    idx = FamilyIndex.full(P)
    variables = [("sink", j) for j in range(P)]
    variables += [("fam", f) for f in idx.families]
    ext = [("ext", j, f) for j in range(P) for f in _ext_families(j)]
    variables += ext

    equations = [({("sink", j): Fraction(1) for j in range(P)}, Fraction(1))]
    for f in idx.families:
        if len(f.parents) == P - 1:
            continue                       # eliminated by substitution
        terms = {("fam", f): Fraction(1)}
        for j in range(P):
            if j not in f.parents:
                terms[("ext", j, f)] = Fraction(-1)
        equations.append((terms, Fraction(0)))

    rows = _canonical_rows()
    lower_bounds = tuple([("sink", j) for j in range(P)] + ext)
    model = ExtendedModel(tuple(variables), tuple(equations), rows, lower_bounds)
    assert model.counts() == (92, 25, 100)
    return model


def sink_face_points(model: ExtendedModel):
    """Extended encodings of every (acyclic digraph, childless sink) pair."""
    idx = FamilyIndex.full(P)
    points = []
    for a in enumerate_acyclic_digraphs(P):
        children = set(j for ps in a for j in ps)
        base = {("fam", Family(i, ps)): 1 for i, ps in enumerate(a) if ps}
        for j in range(P):
            if j in children:
                continue
            pt = dict(base)
            pt[("sink", j)] = 1
            for i, ps in enumerate(a):
                if ps and len(ps) < P - 1:
                    pt[("ext", j, Family(i, ps))] = 1
            points.append(pt)
    return points


def _value(terms: Mapping, point: Mapping) -> Fraction:
    return sum((coef * point.get(key, 0) for key, coef in terms.items()),
               Fraction(0))


def model_holds_at(model: ExtendedModel, point: Mapping) -> bool:
    if any(_value(terms, point) != rhs for terms, rhs in model.equations):
        return False
    return all(_value(terms, point) <= 0 for _, terms in model.inequalities)


# ---------------------------------------------------------------------------
# Projection with published multipliers

MULTIPLIERS = {
    "4B": {"a-a": 1, "a-2-bcd": 1, "b-b": 1, "b-2-acd": 1,
           "c-c": 1, "c-ab": 1, "d-d": 1, "d-ab": 1},
    "4C": {"a-a": 1, "a-2-bcd": 1, "b-b": 1, "b-a": 1,
           "c-c": 1, "c-ad": 1, "d-d": 1, "d-ac": 1},
    "4D": {"a-a": 2, "a-b": 1, "b-b": 1, "b-ac": 1, "b-ad": 1,
           "c-c": 1, "c-abd": 1, "d-d": 1, "d-abc": 1},
    "4E": {"a-a": 2, "b-b": 1, "b-2-acd": 1, "c-c": 1, "c-2-abd": 1,
           "d-d": 1, "d-2-abc": 1},
    "4F": {"a-a": 1, "a-bcd": 1, "b-b": 1, "b-acd": 1,
           "c-c": 2, "c-d": 1, "d-d": 2, "d-c": 1},
    "4G": {"a-a": 1, "a-bcd": 1, "b-b": 1, "b-ad": 1, "b-cd": 1,
           "c-c": 2, "c-d": 1, "d-d": 2, "d-bc": 1},
    "4H": {"a-a": 2, "b-b": 1, "b-a": 1, "c-c": 1, "c-ad": 1,
           "d-d": 1, "d-ac": 1},
    "4I": {"a-a": 2, "a-bcd": 1, "b-b": 2, "b-acd": 1,
           "c-c": 2, "c-ad": 1, "c-bd": 1, "d-d": 2, "d-ac": 1, "d-bc": 1},
    "4J": {"a-a": 2, "a-2-bcd": 1, "b-b": 1, "b-ac": 1, "b-ad": 1,
           "c-c": 1, "c-ab": 1, "c-ad": 1, "d-d": 1, "d-ab": 1, "d-ac": 1},
}


def project_with_multipliers(model: ExtendedModel,
                             u: Mapping[str, int | Fraction]) -> LinearInequality:
    """Project a nonnegative row combination onto the original variables.

    The sink variables are removed with the sink-convexity equation
    (weakening by sink lower bounds if their coefficients differ), each
    linking group is replaced by its original variable at the group's
    minimum coefficient, and the nonnegative residues on extended
    variables are weakened away by their lower bounds.

    Raises:
        ValueError: on an unknown label, a negative multiplier, or a
            residual extended variable with negative coefficient (the
            combination is then not projectable by weakening).
    """
    acc: dict = {}
    for label, mult in u.items():
        if label not in model.rows:
            raise ValueError("unknown row label %r" % label)
        mult = Fraction(mult)
        if mult < 0:
            raise ValueError("multipliers must be nonnegative")
        if not mult:
            continue
        for key, coef in model.rows[label].items():
            acc[key] = acc.get(key, Fraction(0)) + mult * coef

    sink_load = [-acc.pop(("sink", j), Fraction(0)) for j in range(P)]
    if any(s < 0 for s in sink_load):
        raise ValueError("positive sink coefficient cannot be projected")
    mu = max(sink_load)
    # add mu * (sum of sinks - 1 = 0), then weaken the nonnegative leftovers

    idx = FamilyIndex.full(P)
    for f in idx.families:
        if len(f.parents) == P - 1:
            continue
        slots = [("ext", j, f) for j in range(P) if j not in f.parents]
        lam = min(acc.get(s, Fraction(0)) for s in slots)
        if lam:
            acc[("fam", f)] = acc.get(("fam", f), Fraction(0)) + lam
            for s in slots:
                acc[s] = acc.get(s, Fraction(0)) - lam
    residues = {k: v for k, v in acc.items() if k[0] == "ext" and v}
    if any(v < 0 for v in residues.values()):
        raise ValueError("residual extended variable with negative coefficient")

    coeffs = [acc.get(("fam", f), Fraction(0)) for f in idx.families]
    return LinearInequality(tuple(coeffs), mu).canonical()


# ---------------------------------------------------------------------------
# Verbatim transcription of the printed rows and its audit

PRINTED_ROWS = [
    ("a-b", "a,b<-c a,b<-d a,b<-cd", 1),
    ("a-c", "a,c<-b a,c<-d a,c<-bd", 1),
    ("a-d", "a,d<-b a,d<-c a,d<-cd", 1),
    ("a-bc", "a,b<-c a,b<-cd a,c<-b a,c<-bd", 1),
    ("a-bd", "a,b<-d a,b<-cd a,d<-b a,d<-bd", 1),
    ("a-cd", "a,c<-d a,c<-bd a,d<-c a,d<-cd", 1),
    ("a-bcd", "a,b<-c a,b<-d a,b<-cd a,c<-b a,c<-d a,c<-bd a,d<-b a,d<-c a,d<-cb", 2),
    ("a-2-bcd", "a,b<-cd a,c<-bd a,d<-bc", 1),
    ("a-a", "a,a<-b a,a<-c a,a<-d a,a<-bc a,a<-bd a,a<-cd a,a<-bcd", 1),
    ("b-a", "b,a<-c b,a<-c b,a<-cd", 1),
    ("b-c", "b,c<-a b,c<-d b,c<-ad", 1),
    ("b-d", "b,d<-a b,d<-c b,d<-ac", 1),
    ("b-ac", "b,a<-c b,a<-cd b,c<-a b,c<-ad", 1),
    ("b-ad", "b,a<-d b,a<-cd b,d<-a b,d<-ac", 1),
    ("b-cd", "b,c<-d b,c<-bd b,d<-c b,d<-cd", 1),
    ("b-acd", "b,a<-c b,a<-d b,a<-cd b,c<-a b,c<-d b,c<-ad b,d<-a b,d<-c b,d<-ac", 2),
    ("b-2-acd", "b,a<-cd b,c<-ad b,d<-ac", 1),
    ("b-b", "b,b<-a b,b<-c b,b<-d b,b<-ac b,b<-ad b,b<-cd b,b<-acd", 1),
    ("c-a", "c,a<-b c,a<-d c,a<-bd", 1),
    ("c-b", "c,b<-a c,b<-d c,b<-ad", 1),
    ("c-d", "c,d<-a c,d<-b c,d<-ab", 1),
    ("c-ab", "c,a<-b c,a<-bd c,b<-a c,b<-ad", 1),
    ("c-ad", "c,a<-d c,a<-bd c,d<-a c,d<-ab", 1),
    ("c-bd", "c,b<-d c,b<-ad c,d<-b c,d<-ab", 1),
    ("c-abd", "c,a<-b c,a<-d c,a<-bd c,b<-a c,b<-d c,b<-ad c,d<-a c,d<-b c,d<-ab", 2),
    ("c-2-abd", "c,a<-bd c,b<-ad c,d<-ab", 1),
    ("c-c", "c,c<-a c,c<-b c,c<-d c,c<-ab c,c<-ad c,c<-bd c,c<-abd", 1),
    ("d-a", "d,a<-b d,a<-c d,a<-bc", 1),
    ("d-b", "d,b<-a d,b<-c d,b<-ac", 1),
    ("d-c", "d,c<-a d,c<-a d,c<-ab", 1),
    ("d-ab", "d,a<-b d,a<-bc d,b<-a d,b<-ac", 1),
    ("d-ac", "d,a<-c d,a<-bc d,c<-a d,c<-ab", 1),
    ("d-cd", "d,b<-c d,b<-ac d,c<-b d,c<-ab", 1),
    ("d-abc", "d,a<-b d,a<-c d,a<-bc d,b<-a d,b<-c d,b<-ac d,c<-a d,c<-b d,c<-ab", 2),
    ("d-2-abd", "d,a<-bc d,b<-ac d,c<-ab", 1),
    ("d-d", "d,d<-a d,d<-b d,d<-c d,d<-ab d,d<-ac d,d<-bc d,d<-abc", 1),
]


def _parse_term(term: str):
    """Key of a printed term "j,i<-K"; None when it names no legal variable."""
    sink, rest = term.split(",")
    child, parents = rest.split("<-")
    j = LETTERS.index(sink)
    i = LETTERS.index(child)
    ps = tuple(sorted(LETTERS.index(ch) for ch in parents))
    if i in ps or j in ps or len(set(ps)) != len(ps):
        return None
    return _ext_key(j, Family(i, ps))


def audit_printed_rows(model: ExtendedModel | None = None) -> dict[str, str]:
    """Classify every printed row against the canonical construction.

    Returns a map from label to one of ``"ok"``, ``"invalid-variable"``
    (a term names an impossible copy), ``"fails-validity"`` (legal terms
    but some sink-face point violates the row), or ``"label-mismatch"``
    (a valid row printed under the wrong label).  The model in use keeps
    the canonical row wherever the audit flags the printed one.
    """
    model = model or build_extended_model()
    points = sink_face_points(model)
    canonical = {label: dict(terms) for label, terms in model.rows.items()}
    verdicts: dict[str, str] = {}
    for label, body, mult in PRINTED_ROWS:
        sink = LETTERS.index(label[0])
        terms: dict = {("sink", sink): Fraction(-mult)}
        ok = True
        for term in body.split():
            key = _parse_term(term)
            if key is None:
                verdicts[label] = "invalid-variable"
                ok = False
                break
            terms[key] = terms.get(key, Fraction(0)) + 1
        if not ok:
            continue
        if any(_value(terms, pt) > 0 for pt in points):
            verdicts[label] = "fails-validity"
            continue
        if label in canonical and terms == canonical[label]:
            verdicts[label] = "ok"
        elif any(terms == row for row in canonical.values()):
            verdicts[label] = "label-mismatch"
        else:
            verdicts[label] = "fails-validity"
    return verdicts
