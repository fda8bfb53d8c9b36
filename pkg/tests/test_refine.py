import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fo2lab import fixtures
from fo2lab.corpus import all_structures, random_corpus
from fo2lab.refine import (BudgetExceeded, characteristic_formula, refine_pairs, refine_triples,
                           type_view)
from fo2lab.structures import FinStructure, StructureError, disjoint_union
from fo2lab.syntax import And, Equals, Not, Atom, dag_size, evaluate, satisfying_pairs

from oracles import game_positions, same_pair_type


def _pairs(n):
    return [(a, b) for a in range(n) for b in range(n)]


def _agrees_with_oracle(s):
    cols = refine_pairs(s).colors(0)
    same = same_pair_type(s)
    eq = cols[:, :, None, None] == cols[None, None, :, :]
    return np.array_equal(eq, same)


@pytest.mark.parametrize("name, count", [("LOOP1", 1), ("EDGE", 4), ("C3", 3), ("C7", 4),
                                         ("C3C7", 4)])
def test_fixture_color_counts(name, count):
    table = refine_pairs(fixtures.BUILDERS[name]())
    assert table.num_colors == count


def test_c3_classes():
    table = refine_pairs(fixtures.c3())
    assert sorted(table.class_sizes().values()) == [3, 3, 3]
    assert table.colors()[0, 0] == 0
    view = type_view(table)
    succ, pred = table.color(0, 0, 1), table.color(0, 1, 0)
    assert len(view.classes) == 1
    assert set(view.types_between[(0, 0)]) == {0, succ, pred}
    assert view.converse[succ] == pred


def test_c3c7_single_diagonal():
    table = refine_pairs(fixtures.c3c7())
    assert len(set(table.diag_colors().tolist())) == 1
    view = type_view(table)
    far = table.color(0, 0, 5)
    assert len(view.classes[0]) == 10 and view.converse[far] == far


def test_edge_view():
    view = type_view(refine_pairs(fixtures.edge()))
    assert [len(c) for c in view.classes] == [1, 1]
    assert view.types_between[(0, 0)] == (view.identity_of[0],)


def test_exhaustive_oracle_three_elements():
    for s in all_structures(3):
        assert _agrees_with_oracle(s), s.name


def test_oracle_sample_four_elements():
    rng = random.Random(2)
    cells = _pairs(4)
    for _ in range(300):
        rel = {c for c in cells if rng.random() < 0.4}
        assert _agrees_with_oracle(FinStructure("s", 4, {"E": rel}))


def test_oracle_on_corpus(corpus):
    for s in corpus[:80]:
        assert _agrees_with_oracle(s), s.name


@pytest.mark.parametrize("s", [fixtures.c3(), fixtures.edge(), fixtures.loop1()],
                         ids=["c3", "edge", "loop1"])
def test_triples_against_three_pebble_oracle(s):
    cols = refine_triples(s).colors(0)
    same = game_positions(s, s, 3)
    eq = cols[:, :, :, None, None, None] == cols[None, None, None, :, :, :]
    assert np.array_equal(eq, same)


def test_triple_examples():
    assert refine_triples(fixtures.loop1()).num_colors == 1
    diag = refine_triples(fixtures.c3()).diag_colors()
    assert len(set(diag.tolist())) == 1


def test_triple_budget():
    with pytest.raises(BudgetExceeded):
        refine_triples(fixtures.c7(), budget=100)
    assert refine_triples(fixtures.c7(), budget=343).num_colors > 0


def test_signature_mismatch():
    with pytest.raises(StructureError):
        refine_pairs([fixtures.c3(), FinStructure("f", 2, {"F": set()})])
    with pytest.raises(ValueError):
        refine_pairs([])


def test_joint_refinement_differs_from_union():
    joint = refine_pairs([fixtures.c3(), fixtures.c7()])
    assert set(joint.diag_colors(0).tolist()).isdisjoint(joint.diag_colors(1).tolist())
    union = refine_pairs(disjoint_union(fixtures.c3(), fixtures.c7()))
    assert len(set(union.diag_colors().tolist())) == 1


def test_view_invariants(corpus, enriched):
    for s in corpus + enriched:
        table = refine_pairs(s)
        view = type_view(table)
        cols = table.colors()
        for c, cv in view.converse.items():
            assert view.converse[cv] == c
        for (u, v), ts in view.types_between.items():
            assert set(ts) == {view.converse[t] for t in view.types_between[(v, u)]}
            if u == v:
                assert [t for t in ts if view.is_identity(t)] == [view.identity_of[u]]
        for a in range(s.size):
            ids = {int(cols[a, c]) for c in range(s.size) if table.atomic[int(cols[a, c])].equal}
            assert ids == {int(cols[a, a])}
        for c in range(table.num_colors):
            diag = all(a == b for a, b in view.pair_classes[c])
            assert table.atomic[c].equal == diag


def test_type_view_needs_pairs():
    with pytest.raises(ValueError):
        type_view(refine_triples(fixtures.loop1()))


def test_characteristic_examples():
    table = refine_pairs(fixtures.c3())
    chi = characteristic_formula(table, 0, 0)
    assert isinstance(chi, And)
    atoms = set()
    stack = [chi]
    while stack:
        f = stack.pop()
        if isinstance(f, And):
            stack += [f.left, f.right]
        else:
            atoms.add(f)
    assert Equals("x", "y") in atoms and Not(Atom("E", "x", "y")) in atoms
    assert satisfying_pairs(fixtures.c3(), chi) == {(0, 0), (1, 1), (2, 2)}
    succ = table.color(0, 0, 1)
    assert satisfying_pairs(fixtures.c3(), characteristic_formula(table, succ)) == {(0, 1), (1, 2), (2, 0)}


def test_characteristic_errors():
    table = refine_pairs(fixtures.c3())
    with pytest.raises(KeyError):
        characteristic_formula(table, 99)
    with pytest.raises(ValueError):
        characteristic_formula(table, 0, -1)


def test_characteristic_sound_at_every_depth(corpus):
    for s in corpus[:25] + [fixtures.c3c7()]:
        table = refine_pairs(s)
        for d in range(table.rounds + 2):
            at_d = table.colors_at_depth(d)
            for c in sorted(set(at_d.reshape(-1).tolist())):
                rep = tuple(int(v) for v in np.argwhere(at_d == c)[0])
                final = table.color(0, *rep)
                sat = satisfying_pairs(s, characteristic_formula(table, final, d))
                assert sat == {(a, b) for a, b in _pairs(s.size) if at_d[a, b] == c}


def test_characteristic_monotone(corpus):
    for s in corpus[:20]:
        table = refine_pairs(s)
        for c in range(table.num_colors):
            for d in range(table.rounds):
                deeper = satisfying_pairs(s, characteristic_formula(table, c, d + 1))
                assert deeper <= satisfying_pairs(s, characteristic_formula(table, c, d))


def test_characteristic_is_shared_dag():
    table = refine_pairs(fixtures.c3c7())
    chi = characteristic_formula(table, 1)
    assert dag_size(chi) < 400


def test_stabilization_bound_and_canonical_numbering(corpus):
    for s in corpus:
        table = refine_pairs(s)
        assert table.rounds <= s.size ** 2
        first = {}
        for c in table.flat.tolist():
            first.setdefault(c, len(first))
        assert all(k == v for k, v in first.items())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_permutation_invariance(seed):
    rng = random.Random(seed)
    s = random_corpus(seed=seed, count=1, max_size=6)[0]
    perm = list(range(s.size))
    rng.shuffle(perm)
    a, b = refine_pairs(s), refine_pairs(s.permuted(perm))
    assert sorted(a.class_sizes().values()) == sorted(b.class_sizes().values())
    cols_a, cols_b = a.colors(), b.colors()
    for x, y in _pairs(s.size):
        # same atomic type where the permutation sends the pair
        assert a.atomic[int(cols_a[x, y])] == b.atomic[int(cols_b[perm[x], perm[y]])]


def test_deterministic():
    s = fixtures.c3c7()
    assert np.array_equal(refine_pairs(s).flat, refine_pairs(s).flat)


def test_evaluate_uses_structure():
    assert evaluate(fixtures.c3(), characteristic_formula(refine_pairs(fixtures.c3()), 0), {"x": 1, "y": 1})
