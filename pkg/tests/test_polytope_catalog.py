from fractions import Fraction

import pytest

from dagip.model import Family, FamilyIndex
from dagip.polytope import (CLASS_REPRESENTATIVES, catalog_facets,
                            check_coeff_monotonicity, check_monotone_form,
                            class_inequality, dag_points, facet_rank,
                            from_terms, kcluster_inequality,
                            lower_bound, modified_convexity,
                            permutation_orbit, verify_validity)


@pytest.mark.parametrize("p,kappa,total", [(2, None, 3), (3, None, 17),
                                           (4, None, 135), (4, 2, 78)])
def test_catalog_sizes(p, kappa, total):
    assert len(catalog_facets(p, kappa)) == total


def test_catalog_p2_is_two_bounds_and_one_cluster():
    cat = catalog_facets(2)
    tags = sorted(e.tag for e in cat.entries)
    assert tags == ["kcluster(1)", "lower-bound", "lower-bound"]


def test_catalog_p3_breakdown():
    counts = catalog_facets(3).class_counts()
    assert counts == {"lower-bound": 9, "modified-convexity": 3,
                      "kcluster(1)": 4, "kcluster(2)": 1}


def test_catalog_p4_breakdown():
    counts = catalog_facets(4).class_counts()
    assert counts["lower-bound"] == 28
    assert counts["modified-convexity"] == 4
    assert counts["kcluster(1)"] == 11
    assert counts["kcluster(2)"] == 5
    assert counts["kcluster(3)"] == 1
    for name, orbit in [("4B", 6), ("4C", 12), ("4D", 12), ("4E", 4),
                        ("4F", 6), ("4G", 24), ("4H", 12), ("4I", 6),
                        ("4J", 4)]:
        assert counts[name] == orbit


def test_catalog_k2_breakdown_matches_published_tally():
    counts = catalog_facets(4, 2).class_counts()
    assert counts == {"lower-bound": 24, "modified-convexity": 4,
                      "kcluster(1)": 11, "kcluster(2)": 5,
                      "4B": 6, "4C": 12, "4D": 12, "4J": 4}
    assert sum(counts.values()) == 24 + 4 + 6 + 4 + 1 + 4 + 1 + 6 + 12 + 12 + 4


def test_unsupported_sizes_rejected():
    with pytest.raises(ValueError):
        catalog_facets(5)
    with pytest.raises(ValueError):
        catalog_facets(4, 1)


def test_kappa_equivalent_to_unrestricted_accepted():
    assert len(catalog_facets(3, 2)) == 17
    assert len(catalog_facets(2, 1)) == 3


def test_orbit_sizes():
    idx = FamilyIndex.full(4)
    assert len(permutation_orbit(class_inequality("4B", idx), idx)) == 6
    assert len(permutation_orbit(class_inequality("4G", idx), idx)) == 24
    # fully symmetric whole-set cluster: orbit of one
    whole = kcluster_inequality(idx, range(4), 1)
    assert len(permutation_orbit(whole, idx)) == 1


def test_p3_catalog_all_facet_defining():
    idx, pts = dag_points(3)
    cat = catalog_facets(3)
    for entry in cat.entries:
        ok, witness = verify_validity(entry, pts)
        assert ok, entry.label
        tight, rank = facet_rank(entry, pts)
        assert rank == 9, entry.label


def test_modified_convexity_is_facet_p3():
    idx, pts = dag_points(3)
    _, rank = facet_rank(modified_convexity(idx, 0), pts)
    assert rank == 9


def test_invalid_inequality_has_witness():
    idx, pts = dag_points(3)
    bogus = from_terms(idx, {Family(0, (1,)): 1}, -1)
    ok, witness = verify_validity(bogus, pts)
    assert not ok
    assert witness == tuple([0] * 9)     # empty digraph already violates it


def test_dominated_restricted_two_cluster_not_facet():
    # Drop c's pair from the whole-set 2-cluster at p=3: dominated, not facet.
    idx = FamilyIndex.full(3)
    ineq = from_terms(idx, {Family(0, (1, 2)): 1, Family(1, (0, 2)): 1}, 1)
    restricted = FamilyIndex(3, [f for f in idx.families if f != Family(2, (0, 1))])
    coeffs = tuple(ineq.coeffs[idx.position(f)] for f in restricted.families)
    from dagip.polytope.inequality import LinearInequality
    from dagip.model import encode_digraph, enumerate_acyclic_digraphs
    pts = [tuple(encode_digraph(a, restricted))
           for a in enumerate_acyclic_digraphs(3) if a[2] != (0, 1)]
    cut = LinearInequality(coeffs, Fraction(1))
    ok, _ = verify_validity(cut, pts)
    assert ok
    _, rank = facet_rank(cut, pts)
    assert rank < len(restricted)


def test_monotone_form_checks():
    cat = catalog_facets(3)
    assert check_monotone_form(cat.entries)
    idx = cat.idx
    mixed = from_terms(idx, {Family(0, (1,)): 1, Family(1, (0,)): -1}, 1)
    assert not check_monotone_form([mixed])
    assert check_monotone_form(catalog_facets(4).entries)


def test_coefficient_monotonicity_checks():
    idx = FamilyIndex.full(4)
    rep = class_inequality("4D", idx)
    assert rep.coeffs[idx.position(Family(0, (2, 3)))] == 2
    assert rep.coeffs[idx.position(Family(0, (2,)))] == 1
    assert check_coeff_monotonicity([rep], idx)
    shrink = from_terms(idx, {Family(0, (1,)): 2, Family(0, (1, 2)): 1}, 1)
    assert not check_coeff_monotonicity([shrink], idx)
    cat = catalog_facets(4)
    assert check_coeff_monotonicity(cat.entries, cat.idx)


def test_class_representatives_symmetry_annotations():
    # The annotated symmetry group sizes match the orbit arithmetic.
    total = 0
    for name, (_, _, sym, orbit) in CLASS_REPRESENTATIVES.items():
        groups = sym.split("|")
        stab = 1
        for g in groups:
            stab *= {1: 1, 2: 2, 3: 6, 4: 24}[len(g)]
        assert 24 // stab == orbit, name
        total += orbit
    assert total == 86


def test_canonical_scaling():
    idx = FamilyIndex.full(2)
    ineq = from_terms(idx, {Family(0, (1,)): Fraction(2, 3),
                            Family(1, (0,)): Fraction(4, 3)}, Fraction(2))
    canon = ineq.canonical()
    assert canon.coeffs == (Fraction(1), Fraction(2))
    assert canon.rhs == Fraction(3)
    lb = lower_bound(idx, Family(0, (1,)))
    assert lb.canonical().coeffs[0] == -1
    assert lb.is_lower_bound()


@pytest.mark.parametrize("p", [2, 3, 4])
def test_integral_cluster_points_are_exactly_the_dags(p):
    from dagip.polytope import integral_cluster_points_are_dags
    assert integral_cluster_points_are_dags(p)
