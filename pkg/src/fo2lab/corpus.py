"""Seeded random structures and formulas for property checks and ``selftest``."""

import itertools
import random

from . import fixtures
from .structures import FinStructure
from .syntax import And, Atom, Equals, Exists, Forall, Iff, Implies, Not, Or

REL_NAMES = ("E", "F")


def random_structure(rng, max_size=6, density=0.3, max_relations=2, name=None):
    n = rng.randint(1, max_size)
    k = rng.randint(1, max_relations)
    rels = {r: {(a, b) for a in range(n) for b in range(n) if rng.random() < density}
            for r in REL_NAMES[:k]}
    return FinStructure(name or "rand", n, rels)


def random_corpus(seed=0, count=200, max_size=6, density=0.3):
    rng = random.Random(seed)
    return [random_structure(rng, max_size, density, name=f"rand{i:03d}") for i in range(count)]


def fixture_corpus():
    return [fixtures.loop1(), fixtures.edge(), fixtures.c3(), fixtures.c7(), fixtures.c3c7()]


def all_structures(n, rel="E"):
    """Every structure on n elements with one binary relation (2**(n*n) of them)."""
    cells = [(a, b) for a in range(n) for b in range(n)]
    out = []
    for mask in range(1 << len(cells)):
        pairs = {cells[i] for i in range(len(cells)) if mask >> i & 1}
        out.append(FinStructure(f"s{n}_{mask}", n, {rel: pairs}))
    return out


def random_formula(rng, depth, rels, variables=("x", "y"), free=None):
    """Random formula of quantifier depth at most ``depth``."""
    leaf = depth == 0 or rng.random() < 0.25
    if leaf:
        u, v = rng.choice(variables), rng.choice(variables)
        if rng.random() < 0.2:
            return Equals(u, v)
        return Atom(rng.choice(rels), u, v)
    kind = rng.randrange(7)
    if kind == 0:
        return Not(random_formula(rng, depth, rels, variables))
    if kind in (1, 2):
        q = Exists if kind == 1 else Forall
        return q(rng.choice(variables), random_formula(rng, depth - 1, rels, variables))
    ctor = (And, Or, Implies, Iff)[kind - 3]
    return ctor(random_formula(rng, depth - 1, rels, variables),
                random_formula(rng, depth - 1, rels, variables))


def random_sentence(rng, depth, rels, variables=("x", "y")):
    f = random_formula(rng, max(depth - 1, 0), rels, variables)
    for v in variables:
        f = (Exists if rng.random() < 0.5 else Forall)(v, f)
    return f


def relation_subsets(pairs):
    pairs = sorted(pairs)
    for k in range(len(pairs) + 1):
        for combo in itertools.combinations(pairs, k):
            yield frozenset(combo)
