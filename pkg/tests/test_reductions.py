import random
from fractions import Fraction

import pytest

from dagip.model import (BnslInstance, Family, FamilyIndex,
                         best_assignment_brute_force, encode_digraph,
                         enumerate_acyclic_digraphs, total_score)
from dagip.polytope import kcluster_inequality
from dagip.reductions import (AspInstance, asp_brute_force, asp_weights_to_bnsl,
                              bnsl_to_asp, edge_set_is_acyclic, lift_k2_solution,
                              project_inequality, project_to_edges,
                              recover_bnsl_solution, reduce_to_k2)

from helpers import (random_downward_closed_instance, random_full_instance,
                     random_restricted_instance)


# -- parent sets of size at most two ------------------------------------------

def test_k2_seven_parent_split_shape():
    p = 8                      # child 0 with parents 1..7
    permitted = [((), tuple(range(1, 8)))] + [((),)] * 7
    scores = {Family(0, ()): 0.0, Family(0, tuple(range(1, 8))): 9.0}
    scores.update({Family(i, ()): 0.0 for i in range(1, 8)})
    inst = BnslInstance(tuple("n%d" % i for i in range(p)),
                        tuple(permitted), scores)
    reduced, mapping = reduce_to_k2(inst)
    new = [ps for ps in reduced.permitted[0] if ps]
    assert len(new) == 1 and len(new[0]) == 2
    halves = {frozenset(mapping.subset_nodes.get(n, {n})) for n in new[0]}
    assert halves == {frozenset({1, 2, 3, 4}), frozenset({5, 6, 7})}
    # subset nodes have exactly the empty set and one pair, scores 0/penalty
    for node, members in mapping.subset_nodes.items():
        sets = reduced.permitted[node]
        assert len(sets) == 2 and sets[0] == () and len(sets[1]) <= 2
        assert reduced.scores[Family(node, ())] == mapping.penalty
        assert reduced.scores[Family(node, sets[1])] == 0.0
    # the reduced optimum reads back off to the wide parent set
    ropt, rbest = best_assignment_brute_force(reduced, limit=reduced.p)
    assert rbest == pytest.approx(9.0)
    assert lift_k2_solution(ropt, mapping) == inst_optimum(inst)


def inst_optimum(inst):
    return best_assignment_brute_force(inst, limit=8)[0]


def test_k2_identity_when_already_narrow():
    rng = random.Random(0)
    inst = random_full_instance(rng, 4, kappa=2)
    reduced, mapping = reduce_to_k2(inst)
    assert reduced.p == inst.p
    assert not mapping.subset_nodes
    assert reduced.permitted == inst.permitted
    assert {f: s for f, s in reduced.scores.items()} == dict(inst.scores)


def test_k2_optimum_preserved_random():
    rng = random.Random(21)
    for _ in range(25):
        inst = random_downward_closed_instance(rng, rng.randint(3, 5))
        reduced, mapping = reduce_to_k2(inst)
        assert all(len(ps) <= 2 for sets in reduced.permitted for ps in sets)
        opt, best = best_assignment_brute_force(inst)
        ropt, rbest = best_assignment_brute_force(reduced, limit=reduced.p)
        assert rbest == pytest.approx(best, abs=1e-9)
        lifted = lift_k2_solution(ropt, mapping)
        assert total_score(lifted, inst) == pytest.approx(best, abs=1e-9)
        # no optimal reduced solution parks a subset node on the empty set
        for node in mapping.subset_nodes:
            assert ropt[node] != ()


def test_k2_size_bounds():
    rng = random.Random(33)
    for _ in range(20):
        inst = random_downward_closed_instance(rng, 5, max_size=4)
        reduced, _ = reduce_to_k2(inst)
        nfam = sum(len(s) for s in inst.permitted)
        assert reduced.p <= inst.p + nfam


def test_k2_non_downward_closed_supported():
    # A lone 4-parent set without its subsets (weaker bound applies).
    permitted = [((), (1, 2, 3, 4)), ((),), ((),), ((),), ((),)]
    scores = {Family(0, ()): 0.0, Family(0, (1, 2, 3, 4)): 5.0}
    scores.update({Family(i, ()): 0.0 for i in range(1, 5)})
    inst = BnslInstance(tuple("n%d" % i for i in range(5)),
                        tuple(permitted), scores)
    reduced, mapping = reduce_to_k2(inst)
    ropt, rbest = best_assignment_brute_force(reduced, limit=reduced.p)
    assert rbest == pytest.approx(5.0)
    assert lift_k2_solution(ropt, mapping)[0] == (1, 2, 3, 4)


def test_k2_lift_rejects_empty_subset_choice():
    permitted = [((), (1, 2, 3)), ((),), ((),), ((),)]
    scores = {Family(0, ()): 0.0, Family(0, (1, 2, 3)): 1.0}
    scores.update({Family(i, ()): 0.0 for i in range(1, 4)})
    inst = BnslInstance(("w", "x", "y", "z"), tuple(permitted), scores)
    reduced, mapping = reduce_to_k2(inst)
    lazy = tuple(() for _ in range(reduced.p))
    with pytest.raises(ValueError, match="optimal-grade"):
        lift_k2_solution(lazy, mapping)


# -- the acyclic subgraph encoding ---------------------------------------------

def test_asp_gadget_shape_three_nodes():
    rng = random.Random(1)
    inst = random_full_instance(rng, 3)
    asp, mapping = bnsl_to_asp(inst)
    tags = {t: asp.tags.count(t) for t in set(asp.tags)}
    # one candidate and one family node per non-empty permitted set
    assert tags == {"V1": 3, "V2": 9, "V3": 9}
    assert asp.n <= 3 + 2 * 12
    # score arcs carry exactly the gain over the child's empty choice
    for arc, fam in mapping.red.items():
        assert asp.edges[arc] == pytest.approx(inst.scores[fam] +
                                               mapping.shift[fam.child])
    # everything mandatory is acyclic on its own
    assert edge_set_is_acyclic(mapping.mandatory, asp.n)


def test_asp_round_trip_small():
    rng = random.Random(2)
    for _ in range(10):
        inst = random_restricted_instance(rng, 3, rng.randint(0, 2))
        asp, mapping = bnsl_to_asp(inst)
        arcs, value = asp_brute_force(asp)
        assignment = recover_bnsl_solution(arcs, mapping)
        _, best = best_assignment_brute_force(inst)
        assert total_score(assignment, inst) == pytest.approx(best, abs=1e-9)
        assert value - mapping.mandatory_weight - mapping.shift_total == \
            pytest.approx(best, abs=1e-9)


def test_recover_rejects_broken_inputs():
    rng = random.Random(3)
    inst = random_restricted_instance(rng, 3, 1)
    asp, mapping = bnsl_to_asp(inst)
    with pytest.raises(ValueError, match="mandatory"):
        recover_bnsl_solution(frozenset(), mapping)
    arcs, _ = asp_brute_force(asp)
    extra = set(arcs)
    reds = [a for a in mapping.red if a not in arcs]
    if reds:
        extra.add(reds[0])
        with pytest.raises(ValueError, match="two score arcs|acyclic"):
            recover_bnsl_solution(extra, mapping)


def test_asp_weights_to_bnsl_uniform_and_single_edge():
    uniform = AspInstance(("a", "b", "c"),
                          {(i, j): 1.0 for i in range(3) for j in range(3) if i != j})
    inst = asp_weights_to_bnsl(uniform)
    for f, score in inst.scores.items():
        assert score == len(f.parents)

    single = AspInstance(("a", "b"), {(1, 0): 3.0})   # arc b -> a
    inst2 = asp_weights_to_bnsl(single)
    result, best = best_assignment_brute_force(inst2)
    assert best == pytest.approx(3.0)
    assert result == ((1,), ())


def test_asp_weights_round_trip_optimum():
    rng = random.Random(9)
    for _ in range(10):
        edges = {(i, j): rng.uniform(-2, 3)
                 for i in range(4) for j in range(4) if i != j}
        asp = AspInstance(tuple("abcd"), edges)
        inst = asp_weights_to_bnsl(asp)
        _, bnsl_best = best_assignment_brute_force(inst)
        _, asp_best = asp_brute_force(asp, strategy="order")
        assert bnsl_best == pytest.approx(asp_best, abs=1e-9)


# -- projections ---------------------------------------------------------------

def test_project_integral_digraph_gives_adjacency():
    idx = FamilyIndex.full(3)
    x = encode_digraph(((1,), (), (0, 1)), idx)
    y = project_to_edges(x, idx)
    assert y[0][1] == 1 and y[2][0] == 1 and y[2][1] == 1
    assert sum(sum(row) for row in y) == 3


def test_project_fractional_and_linear():
    idx = FamilyIndex.full(3)
    x = [0.0] * len(idx)
    x[idx.position(Family(0, (1, 2)))] = 0.5
    y = project_to_edges(x, idx)
    assert y[0][1] == pytest.approx(0.5) and y[0][2] == pytest.approx(0.5)

    rng = random.Random(12)
    u = [rng.random() for _ in range(len(idx))]
    v = [rng.random() for _ in range(len(idx))]
    a, b = 0.3, 1.7
    combo = [a * uu + b * vv for uu, vv in zip(u, v)]
    yu, yv, yc = (project_to_edges(z, idx) for z in (u, v, combo))
    for i in range(3):
        for j in range(3):
            assert yc[i][j] == pytest.approx(a * yu[i][j] + b * yv[i][j])


def test_project_inequality_two_dicycle_gives_one_cluster():
    idx = FamilyIndex.full(3)
    pi = [[Fraction(0)] * 3 for _ in range(3)]
    pi[0][1] = Fraction(1)     # y[a<-b]
    pi[1][0] = Fraction(1)     # y[b<-a]
    projected = project_inequality(pi, 1, idx)
    assert projected.key() == kcluster_inequality(idx, (0, 1), 1).key()


def test_project_inequality_zero_and_validity_audit():
    idx = FamilyIndex.full(3)
    zero = project_inequality([[0] * 3 for _ in range(3)], 0, idx)
    assert not any(zero.coeffs) and zero.rhs == 0

    rng = random.Random(14)
    digraphs = list(enumerate_acyclic_digraphs(3))
    encodings = [encode_digraph(a, idx) for a in digraphs]
    for _ in range(10):
        pi = [[Fraction(rng.randint(-3, 3)) for _ in range(3)] for _ in range(3)]
        # make it valid over acyclic adjacency vectors by picking the max rhs
        best = max(sum(pi[i][j] for i, ps in enumerate(a) for j in ps)
                   for a in digraphs)
        projected = project_inequality(pi, best, idx)
        assert all(projected.satisfied_by(x) for x in encodings)


def test_projection_maps_digraphs_onto_adjacency_vectors():
    for p in (2, 3, 4):
        idx = FamilyIndex.full(p)
        seen = set()
        for a in enumerate_acyclic_digraphs(p):
            y = project_to_edges(encode_digraph(a, idx), idx)
            key = tuple(tuple(row) for row in y)
            assert key not in seen
            seen.add(key)
            assert edge_set_is_acyclic([(j, i) for i in range(p)
                                        for j in range(p) if y[i][j]], p)
        adjacency = set()
        for a in enumerate_acyclic_digraphs(p):
            mat = [[0] * p for _ in range(p)]
            for i, ps in enumerate(a):
                for j in ps:
                    mat[i][j] = 1
            adjacency.add(tuple(tuple(row) for row in mat))
        assert seen == adjacency


# -- oracles and text format ----------------------------------------------------

def test_asp_brute_force_basics():
    single = AspInstance(("a", "b"), {(0, 1): 2.0})
    arcs, value = asp_brute_force(single)
    assert arcs == frozenset({(0, 1)}) and value == 2.0

    dicycle = AspInstance(("a", "b"), {(0, 1): 3.0, (1, 0): 5.0})
    arcs, value = asp_brute_force(dicycle)
    assert value == 5.0 and arcs == frozenset({(1, 0)})


def test_asp_brute_force_strategies_agree():
    rng = random.Random(40)
    for _ in range(15):
        n = rng.randint(3, 5)
        edges = {}
        for i in range(n):
            for j in range(n):
                if i != j and rng.random() < 0.5:
                    edges[(i, j)] = rng.uniform(-1, 2)
        if not edges:
            continue
        asp = AspInstance(tuple("v%d" % t for t in range(n)), edges)
        _, by_order = asp_brute_force(asp, strategy="order")
        _, by_edges = asp_brute_force(asp, strategy="edges")
        assert by_order == pytest.approx(by_edges, abs=1e-9)


def test_asp_brute_force_limits():
    big = AspInstance(tuple("v%d" % t for t in range(30)),
                      {(i, i + 1): 1.0 for i in range(29)})
    with pytest.raises(ValueError, match="order scan"):
        asp_brute_force(big, strategy="order")
    dense = {(i, j): 1.0 for i in range(9) for j in range(9) if i != j}
    with pytest.raises(ValueError, match="oracle limits"):
        asp_brute_force(AspInstance(tuple("v%d" % t for t in range(9)), dense))


def test_asp_text_round_trip():
    rng = random.Random(50)
    edges = {(0, 1): 1.5, (2, 0): -0.25, (1, 2): 3.0}
    asp = AspInstance(("a", "b", "c"), edges)
    again = AspInstance.from_text(asp.to_text())
    assert again.edges == asp.edges
    tagged, _ = bnsl_to_asp(random_restricted_instance(rng, 3, 1))
    text = tagged.to_text()
    assert "# node 0 V1" in text
    assert AspInstance.from_text(text).edges == tagged.edges
