import random
from itertools import combinations

import pytest

from dagip.model import Family, FamilyIndex, encode_digraph, enumerate_acyclic_digraphs
from dagip.polytope import (catalog_facets, class_inequality, dag_points,
                            facet_rank, from_terms, kcluster_inequality,
                            lift_facet, lower_bound, modified_convexity,
                            restrict_facet, verify_validity)


def test_lift_pair_cluster_to_three_nodes():
    idx2, idx3 = FamilyIndex.full(2), FamilyIndex.full(3)
    lifted = lift_facet(kcluster_inequality(idx2, (0, 1), 1), idx2, idx3)
    expected = from_terms(idx3, {Family(0, (1,)): 1, Family(0, (1, 2)): 1,
                                 Family(1, (0,)): 1, Family(1, (0, 2)): 1}, 1)
    assert lifted.key() == expected.key()


def test_lift_identity_on_same_node_set():
    idx = FamilyIndex.full(3)
    mc = modified_convexity(idx, 1)
    assert lift_facet(mc, idx, idx).key() == mc.key()


def test_lift_rejects_lower_bounds():
    idx2, idx3 = FamilyIndex.full(2), FamilyIndex.full(3)
    with pytest.raises(ValueError):
        lift_facet(lower_bound(idx2, Family(0, (1,))), idx2, idx3)


def test_lifted_kclusters_reproduce_direct_construction():
    idx4 = FamilyIndex.full(4)
    for size in (2, 3):
        small = FamilyIndex.full(size)
        for cluster in combinations(range(4), size):
            for kappa in range(1, size):
                via_lift = lift_facet(kcluster_inequality(small, range(size), kappa),
                                      small, idx4, embed=cluster)
                direct = kcluster_inequality(idx4, cluster, kappa)
                assert via_lift.key() == direct.key()


def test_lifted_cluster_facets_stay_facets():
    idx3, idx4 = FamilyIndex.full(3), FamilyIndex.full(4)
    _, pts4 = dag_points(4)
    for entry in catalog_facets(3).entries:
        if not entry.tag.startswith("kcluster"):
            continue
        lifted = lift_facet(entry, idx3, idx4)
        ok, _ = verify_validity(lifted, pts4)
        assert ok
        _, rank = facet_rank(lifted, pts4)
        assert rank == 28, entry.label


def test_lifted_modified_convexity_is_dominated():
    # Coefficient spreading misses the new node's singleton column, so the
    # wider modified convexity strictly dominates the lift: valid, not a
    # facet.  The facet-preservation theorem needs, for every node, a
    # tight point leaving that node parentless, which convexity rows
    # cannot offer.
    idx3, idx4 = FamilyIndex.full(3), FamilyIndex.full(4)
    _, pts4 = dag_points(4)
    lifted = lift_facet(modified_convexity(idx3, 0), idx3, idx4)
    assert lifted.coeffs[idx4.position(Family(0, (3,)))] == 0
    ok, _ = verify_validity(lifted, pts4)
    assert ok
    _, rank = facet_rank(lifted, pts4)
    assert rank == 27


def test_restrict_classes_to_two_parents():
    idx4 = FamilyIndex.full(4)
    idxk2, ptsk2 = dag_points(4, 2)
    for name in ("4B", "4C", "4D", "4J"):
        ineq, idx = class_inequality(name, idx4), idx4
        for child in range(4):
            wide = Family(child, tuple(j for j in range(4) if j != child))
            if wide in idx:
                ineq, idx = restrict_facet(ineq, idx, wide)
        assert idx.families == idxk2.families
        ok, _ = verify_validity(ineq, ptsk2)
        assert ok
        _, rank = facet_rank(ineq, ptsk2)
        assert rank == 24, name


def test_restrict_requires_matching_subset_coefficient():
    idx = FamilyIndex.full(3)
    # In the whole-set 2-cluster, pair coefficients have no smaller twin.
    two = kcluster_inequality(idx, (0, 1, 2), 2)
    with pytest.raises(ValueError, match="unsupported"):
        restrict_facet(two, idx, Family(2, (0, 1)))
    # force mode performs the drop anyway
    dropped, ridx = restrict_facet(two, idx, Family(2, (0, 1)), force=True)
    assert len(ridx) == len(idx) - 1


def test_restrict_dominated_convexity_not_facet():
    idx = FamilyIndex.full(3)
    mc = modified_convexity(idx, 0)
    restricted, ridx = restrict_facet(mc, idx, Family(0, (2,)), force=True)
    pts = [tuple(encode_digraph(a, ridx))
           for a in enumerate_acyclic_digraphs(3) if a[0] != (2,)]
    ok, _ = verify_validity(restricted, pts)
    assert ok
    _, rank = facet_rank(restricted, pts)
    assert rank < len(ridx)


def test_random_eligible_drops_stay_facets():
    rng = random.Random(6)
    idx4 = FamilyIndex.full(4)
    cat = catalog_facets(4)
    candidates = [e for e in cat.entries if not e.is_lower_bound()]
    done = 0
    while done < 8:
        entry = rng.choice(candidates)
        eligible = []
        for k, fam in enumerate(idx4.families):
            if len(fam.parents) < 2:
                continue
            for j in idx4.columns_of_child(fam.child):
                sub = idx4.families[j]
                if sub != fam and set(sub.parents) < set(fam.parents) \
                        and entry.coeffs[j] == entry.coeffs[k]:
                    eligible.append(fam)
                    break
        if not eligible:
            continue
        drop = rng.choice(eligible)
        restricted, ridx = restrict_facet(entry, idx4, drop)
        pts = [tuple(encode_digraph(a, ridx))
               for a in enumerate_acyclic_digraphs(4)
               if a[drop.child] != drop.parents]
        ok, _ = verify_validity(restricted, pts)
        assert ok
        _, rank = facet_rank(restricted, pts)
        assert rank == len(ridx), (entry.label, drop)
        done += 1


def test_lift_then_restrict_returns_column_deletion():
    idx3, idx4 = FamilyIndex.full(3), FamilyIndex.full(4)
    for entry in catalog_facets(3).entries[:20]:
        if entry.is_lower_bound():
            continue
        lifted = lift_facet(entry, idx3, idx4)
        for k, fam in enumerate(idx4.families):
            if 3 in fam.parents and len(fam.parents) >= 2 and lifted.coeffs[k]:
                base = Family(fam.child, tuple(j for j in fam.parents if j != 3))
                if base.parents and lifted.coeffs[idx4.position(base)] == lifted.coeffs[k]:
                    restricted, ridx = restrict_facet(lifted, idx4, fam)
                    assert restricted.coeffs == tuple(
                        lifted.coeffs[t] for t in range(len(idx4)) if t != k)
                    break
