import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fo2lab import fixtures
from fo2lab.adn import (B_BLOCKS, B_TABLE, G_CYCLES, LEVELS, POINTS, R_BLOCKS, R_TABLE, S_CYCLES,
                        BinRel, block_product, build_adn_model, encode, identity_rel,
                        perm_from_cycles, ra_apply, ra_closure)


def test_sizes():
    m = build_adn_model()
    assert m.size == 45
    assert {k: len(v) for k, v in m.relations.items()} == {"S": 45, "G": 45, "R": 135, "B": 135}
    assert m == fixtures.adn45()


def test_tables_match_block_products():
    assert frozenset(R_TABLE) == block_product(R_BLOCKS) and len(R_TABLE) == 27
    assert frozenset(B_TABLE) == block_product(B_BLOCKS) and len(B_TABLE) == 27


def test_perm_from_cycles():
    assert perm_from_cycles(S_CYCLES) == (1, 2, 0, 4, 5, 3, 7, 8, 6)
    assert perm_from_cycles(G_CYCLES) == (3, 4, 5, 6, 7, 8, 0, 1, 2)
    with pytest.raises(ValueError):
        perm_from_cycles(((1, 3, 6), (1, 4, 7), (2, 5, 8)))


def test_level_permutation_graphs():
    m = build_adn_model()
    for name in ("S", "G"):
        rel = m.relations[name]
        for i in range(LEVELS):
            level = {encode(i, j) for j in range(POINTS)}
            out = [b for a, b in rel if a in level]
            assert sorted(out) == sorted(level)
            assert all(b in level for a, b in rel if a in level)
    for name, step in (("R", 1), ("B", 2)):
        assert all(b // POINTS == (a // POINTS + step) % LEVELS for a, b in m.relations[name])


def _c3_rel():
    return BinRel.from_pairs(3, fixtures.c3().relations["E"])


def test_ra_examples():
    e = _c3_rel()
    pred = {(0, 2), (1, 0), (2, 1)}
    assert ra_apply("compose", e, e).pairs == pred
    assert ra_apply("converse", e).pairs == pred
    assert ra_apply("identity", e).pairs == {(0, 0), (1, 1), (2, 2)}
    assert len(ra_apply("complement", e)) == 6


def test_ra_errors():
    e = _c3_rel()
    with pytest.raises(ValueError):
        ra_apply("compose", e)
    with pytest.raises(ValueError):
        ra_apply("union", e, identity_rel(4))
    with pytest.raises(ValueError):
        ra_apply("converse", e, e)
    with pytest.raises(ValueError):
        ra_apply("meet", e, e)
    with pytest.raises(ValueError):
        BinRel.from_pairs(2, [(0, 2)])


rels = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.booleans(), min_size=n, max_size=n), min_size=3 * n, max_size=3 * n)
    .map(lambda rows, n=n: [BinRel(np.array(rows[k * n:(k + 1) * n])) for k in range(3)]))


@settings(max_examples=80, deadline=None)
@given(rels)
def test_ra_laws(triple):
    a, b, c = triple
    assert ra_apply("converse", ra_apply("converse", a)) == a
    ab_c = ra_apply("compose", ra_apply("compose", a, b), c)
    assert ab_c == ra_apply("compose", a, ra_apply("compose", b, c))
    one = identity_rel(a.n)
    assert ra_apply("compose", one, a) == a == ra_apply("compose", a, one)
    lhs = ra_apply("complement", ra_apply("union", a, b))
    rhs = ra_apply("complement", ra_apply("union", ra_apply("complement", ra_apply("complement", a)), b))
    assert lhs == rhs
    meet = ra_apply("complement", ra_apply("union", ra_apply("complement", a), ra_apply("complement", b)))
    assert meet.pairs == a.pairs & b.pairs


def test_closure_examples():
    two = ra_closure(2, [identity_rel(2)])
    assert two.complete and len(two) == 4
    assert {frozenset(r.pairs) for r in two.elements} == {
        frozenset({(0, 0), (1, 1)}), frozenset({(0, 1), (1, 0)}),
        frozenset((a, b) for a in range(2) for b in range(2)), frozenset()}
    assert two.is_closed()
    c3 = ra_closure(3, [_c3_rel()])
    assert c3.complete and c3.is_closed() and len(c3) == 8
    for cls in ({(0, 0), (1, 1), (2, 2)}, {(0, 1), (1, 2), (2, 0)}, {(0, 2), (1, 0), (2, 1)}):
        assert BinRel.from_pairs(3, cls) in c3


def test_closure_generator_base_mismatch():
    with pytest.raises(ValueError):
        ra_closure(3, [identity_rel(2)])


def test_adn_closure_cap_reported():
    m = build_adn_model()
    gens = [BinRel.from_pairs(45, m.relations[k]) for k in sorted(m.relations)]
    res = ra_closure(45, gens, cap=50)
    assert not res.complete and len(res) == 50


def _random_rel(rng, n, density=0.3):
    return BinRel(np.array([[rng.random() < density for _ in range(n)] for _ in range(n)]))


def test_base_automorphism_reduction():
    rng = random.Random(12)
    for trial in range(30):
        n = rng.randint(3, 5)
        gens = [_random_rel(rng, n) for _ in range(rng.randint(1, 2))]
        # a truncated closure still contains the generators, so both
        # directions are meaningful without completeness
        closure = ra_closure(n, gens, cap=400)
        perms = [tuple(rng.sample(range(n), n)) for _ in range(6)]
        perms.append(tuple(range(n)))
        for perm in perms:
            keeps_gens = all(g.permuted(perm) == g for g in gens)
            keeps_all = all(r.permuted(perm) == r for r in closure.elements)
            assert keeps_gens == keeps_all


def test_base_automorphism_reduction_with_symmetry():
    e = _c3_rel()
    closure = ra_closure(3, [e])
    rot = (1, 2, 0)
    assert e.permuted(rot) == e
    assert all(r.permuted(rot) == r for r in closure.elements)
    flip = (0, 2, 1)
    assert e.permuted(flip) != e
    assert not all(r.permuted(flip) == r for r in closure.elements)


def test_verify_report(adn_report):
    assert adn_report["sizes"] == {"universe": 45, "S": 45, "G": 45, "R": 135, "B": 135}
    assert adn_report["diag_color_count_2"] == 1
    assert adn_report["diag_color_count_3"] == 1
    assert adn_report["orbit_count"] >= 2
    assert adn_report["conclusions"] == ["not 3,1-transitive", "not transitive"]
    assert adn_report["ok"]
