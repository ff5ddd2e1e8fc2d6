"""Shared generators for randomised checks; everything takes a seeded rng."""

from __future__ import annotations

import random
from itertools import combinations

from dagip.model import BnslInstance, Family, FamilyIndex, encode_digraph


def random_full_instance(rng: random.Random, p: int, kappa: int | None = None,
                         lo: float = -10.0, hi: float = 10.0) -> BnslInstance:
    return BnslInstance.full(p, lambda f: rng.uniform(lo, hi), kappa=kappa)


def random_digraph(rng: random.Random, idx: FamilyIndex):
    """A random (possibly cyclic) parent-set assignment over the full lattice."""
    assignment = []
    for i in range(idx.p):
        options = [()] + [idx.families[k].parents for k in idx.columns_of_child(i)]
        assignment.append(rng.choice(options))
    return tuple(assignment)


def random_polytope_point(rng: random.Random, idx: FamilyIndex,
                          max_digraphs: int = 8):
    """A random convex combination of digraph encodings (cyclic included)."""
    n = rng.randint(1, max_digraphs)
    weights = [rng.random() for _ in range(n)]
    total = sum(weights)
    x = [0.0] * len(idx)
    for w in weights:
        enc = encode_digraph(random_digraph(rng, idx), idx)
        for k, v in enumerate(enc):
            if v:
                x[k] += w / total
    return x


def random_downward_closed_instance(rng: random.Random, p: int,
                                    max_size: int = 3,
                                    extra_chance: float = 0.3) -> BnslInstance:
    """Per node, the downward closure of one (sometimes two) random sets."""
    permitted = []
    for i in range(p):
        others = [j for j in range(p) if j != i]
        closed = {()}
        seeds = 1 + (rng.random() < extra_chance)
        for _ in range(seeds):
            size = rng.randint(1, min(max_size, len(others)))
            base = tuple(sorted(rng.sample(others, size)))
            for r in range(len(base) + 1):
                closed.update(combinations(base, r))
        permitted.append(tuple(sorted(closed)))
    scores = {Family(i, ps): rng.uniform(-10, 10)
              for i in range(p) for ps in permitted[i]}
    return BnslInstance(tuple("n%d" % i for i in range(p)),
                        tuple(permitted), scores)


def random_restricted_instance(rng: random.Random, p: int,
                               extra_families: int) -> BnslInstance:
    """Empty sets everywhere plus a few random non-empty permitted sets."""
    permitted = [{()} for _ in range(p)]
    for _ in range(extra_families):
        i = rng.randrange(p)
        others = [j for j in range(p) if j != i]
        size = rng.randint(1, min(2, len(others)))
        permitted[i].add(tuple(sorted(rng.sample(others, size))))
    scores = {Family(i, ps): float(rng.randint(-9, 9))
              for i in range(p) for ps in permitted[i]}
    return BnslInstance(tuple("n%d" % i for i in range(p)),
                        tuple(tuple(sorted(s)) for s in permitted), scores)


def connected_graphs(n: int):
    """Every connected simple graph on n labelled vertices, as edge lists."""
    if n == 1:
        return
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        edges = [pairs[t] for t in range(len(pairs)) if mask >> t & 1]
        if not edges:
            continue
        adj = {v: set() for v in range(n)}
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
        seen = {0}
        stack = [0]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) == n:
            yield edges
