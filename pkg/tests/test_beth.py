import random

import pytest

from fo2lab import fixtures
from fo2lab.automorphism import check_transitive
from fo2lab.beth import (BethError, CapExceeded, DefinitionProblem, NotTransitive, cut_context,
                         cuts_types, definition_check_sentence, double_cut, flip_preserves_equivalence,
                         flip_relation, parse_definition, pattern_flip, reverse_patterns,
                         search_solutions, synthesize_explicit, transfer_relation,
                         transfer_witness_report)
from fo2lab.companion import build_companion
from fo2lab.corpus import all_structures, random_formula
from fo2lab.equivalence import equiv2
from fo2lab.refine import refine_pairs
from fo2lab.structures import converse_pairs, expand_with_relation
from fo2lab.syntax import Exists, Forall, FormulaError, evaluate, parse_formula, satisfying_pairs

from instances import cut_instances, second_case

SUCC = frozenset({(0, 1), (1, 2), (2, 0)})
PRED = frozenset({(0, 2), (1, 0), (2, 1)})
DIAG3 = frozenset({(0, 0), (1, 1), (2, 2)})


@pytest.fixture(scope="module")
def c3c7_companion():
    return build_companion(fixtures.c3c7()).companion


def test_cuts_types_examples():
    c3 = fixtures.c3()
    succ = refine_pairs(c3).color(0, 0, 1)
    assert cuts_types(c3, {(0, 1)}) == succ
    assert cuts_types(c3, SUCC) is None
    assert cuts_types(c3, set()) is None
    with pytest.raises(BethError):
        cuts_types(c3, {(0, 3)})


def test_flip_first_case_c3():
    ctx = cut_context(fixtures.c3(), {(0, 1)})
    assert ctx.converse_color != ctx.color
    assert flip_relation(ctx) == {(1, 2), (2, 0)}


def test_flip_on_c3_is_not_preserving():
    # {(0,1)} is not Aut-invariant: E x . (E y . R(x,y) & E y . R(y,x)) separates the expansions
    report = flip_preserves_equivalence(fixtures.c3(), {(0, 1)}, {(1, 2), (2, 0)})
    assert {"iv.3", "iv.4"} <= set(report.clauses())
    f = parse_formula("E x . (E y . R(x,y) & E y . R(y,x))")
    left = expand_with_relation(fixtures.c3(), "R", {(0, 1)})
    right = expand_with_relation(fixtures.c3(), "R", {(1, 2), (2, 0)})
    assert not evaluate(left, f) and evaluate(right, f)


def test_flip_requires_cut():
    c3 = fixtures.c3()
    with pytest.raises(BethError):
        cut_context(c3, SUCC)
    ctx = cut_context(c3, {(0, 1)})
    object.__setattr__(ctx, "relation", SUCC)
    with pytest.raises(BethError):
        flip_relation(ctx)
    with pytest.raises(BethError):
        cut_context(c3, {(0, 1)}, color=42)


def test_corrupt_flip_violates_local_iso():
    report = flip_preserves_equivalence(fixtures.c3(), {(0, 1)}, {(1, 2), (2, 0), (0, 0)})
    assert "ii" in report.clauses()


def test_flip_needs_transitive():
    with pytest.raises(NotTransitive):
        flip_preserves_equivalence(fixtures.c3c7(), {(0, 1)}, {(1, 2)})


def test_second_case_on_companion(c3c7_companion):
    m = c3c7_companion
    n = m.size
    # difference 2 is a symmetric color; take r = pairs at difference +2 only
    far = refine_pairs(m).color(0, 0, 2)
    r = frozenset((a, (a + 2) % n) for a in range(n))
    ctx = cut_context(m, r, far)
    assert ctx.converse_color == ctx.color and second_case(ctx)
    s = flip_relation(ctx)
    assert s == converse_pairs(r)
    assert flip_preserves_equivalence(m, r, s).ok


def test_flip_differs_only_inside_t(c3c7_companion):
    for ctx in cut_instances(c3c7_companion)[:120]:
        s = flip_relation(ctx)
        assert s != ctx.relation and (s ^ ctx.relation) <= ctx.t


def test_flip_sweep(c3c7_companion):
    verbatim_fail = double = 0
    total = 0
    for ctx in cut_instances(c3c7_companion):
        total += 1
        r = ctx.relation
        ok = flip_preserves_equivalence(c3c7_companion, r, flip_relation(ctx), check=False).ok
        if double_cut(ctx):
            double += 1
            verbatim_fail += not ok
            s = pattern_flip(ctx)
            assert s != r
            assert flip_preserves_equivalence(c3c7_companion, r, s, check=False).ok
        else:
            assert ok
    assert total == 496 and double == 128 and verbatim_fail == 128


def test_double_cut_is_a_real_obstruction(c3c7_companion):
    m = c3c7_companion
    ctx = next(c for c in cut_instances(m) if double_cut(c))
    s = flip_relation(ctx)
    assert not equiv2(expand_with_relation(m, "R", ctx.relation), expand_with_relation(m, "R", s))
    assert equiv2(expand_with_relation(m, "R", ctx.relation),
                  expand_with_relation(m, "R", pattern_flip(ctx)))
    assert len(reverse_patterns(ctx)) >= 2


def test_transfer_examples(c3c7_companion):
    m = fixtures.c3c7()
    # the successor color of the companion covers differences 1 and 3
    succ_bar = frozenset((a, (a + d) % 9) for a in range(9) for d in (1, 3))
    assert cuts_types(c3c7_companion, succ_bar) is None
    r = transfer_relation(m, c3c7_companion, succ_bar)
    assert r == m.relations["E"]
    assert transfer_witness_report(m, c3c7_companion, r, succ_bar).ok
    c3 = fixtures.c3()
    assert transfer_relation(c3, c3, SUCC) == SUCC
    assert transfer_relation(c3, c3, set()) == set()


def test_transfer_errors(c3c7_companion):
    with pytest.raises(BethError, match="2-equivalent"):
        transfer_relation(fixtures.c3(), fixtures.c7(), set())
    with pytest.raises(BethError, match="cuts"):
        transfer_relation(fixtures.c3c7(), c3c7_companion, {(0, 1)})


def test_synthesis_examples():
    c3 = fixtures.c3()
    phi = synthesize_explicit(c3, SUCC)
    assert satisfying_pairs(c3, phi) == SUCC
    psi = synthesize_explicit(c3, DIAG3)
    assert "x=y" in str(psi)
    assert satisfying_pairs(c3, psi) == satisfying_pairs(c3, parse_formula("x=y"))
    assert synthesize_explicit(c3, {(0, 1)}) is None
    check = definition_check_sentence("R", phi)
    assert evaluate(expand_with_relation(c3, "R", SUCC), check)


def test_synthesis_iff_no_cut(corpus):
    rng = random.Random(6)
    for m in corpus[:60]:
        table = refine_pairs(m)
        classes = {}
        for a in range(m.size):
            for b in range(m.size):
                classes.setdefault(table.color(0, a, b), set()).add((a, b))
        for _ in range(3):
            r = set().union(*(c for c in classes.values() if rng.random() < 0.5))
            phi = synthesize_explicit(m, r, table)
            assert phi is not None and satisfying_pairs(m, phi) == r
            cut = set(r) | {(rng.randrange(m.size), rng.randrange(m.size))}
            assert (synthesize_explicit(m, cut, table) is None) == (cuts_types(m, cut, table) is not None)


CONVERSE = "sigma:\nA x . A y . (R(x,y) <-> E(y,x))\ndefines: R\n"
SUBSET = "sigma:\nA x . A y . (R(x,y) -> E(x,y))\nE x . E y . R(x,y)\ndefines: R\n"
INCONSISTENT = "sigma:\nA x . A y . ~R(x,y)\nE x . E y . R(x,y)\ndefines: R\n"


def test_solve_examples():
    c3 = fixtures.c3()
    res = search_solutions(parse_definition(CONVERSE), c3)
    assert res.classification == "unique" and res.solutions == [PRED]
    assert res.candidates == 512
    res = search_solutions(parse_definition(SUBSET), c3)
    assert res.classification == "multiple" and len(res.solutions) == 7
    assert search_solutions(parse_definition(SUBSET), c3, mode="type-union").classification == "unique"
    for mode in ("brute", "type-union"):
        assert search_solutions(parse_definition(INCONSISTENT), c3, mode).classification == "none"


def test_solve_errors():
    c3 = fixtures.c3()
    with pytest.raises(CapExceeded):
        search_solutions(parse_definition(CONVERSE), fixtures.c7())
    with pytest.raises(CapExceeded):
        search_solutions(parse_definition(CONVERSE), c3, mode="type-union", cap=2)
    with pytest.raises(ValueError):
        search_solutions(parse_definition(CONVERSE), c3, mode="smart")
    bad_th = "theory:\nA x . ~E(x,x)\nA x . E(x,x)\nsigma:\nE x . R(x,x)\ndefines: R\n"
    with pytest.raises(BethError, match="theory"):
        search_solutions(parse_definition(bad_th), c3)
    with pytest.raises(BethError, match="already"):
        search_solutions(DefinitionProblem((), [parse_formula("E x . E(x,x)")], "E"), c3)


def test_parse_definition_errors():
    with pytest.raises(BethError, match="defines"):
        parse_definition("sigma:\nE x . R(x,x)\n")
    with pytest.raises(BethError, match="outside"):
        parse_definition("E x . R(x,x)\ndefines: R\n")
    with pytest.raises(BethError, match="theory"):
        parse_definition("theory:\nE x . R(x,x)\ndefines: R\n")
    with pytest.raises(BethError, match="sentence"):
        parse_definition("sigma:\nR(x,y)\ndefines: R\n")
    with pytest.raises(FormulaError):
        parse_definition("sigma:\nE z . R(z,z)\ndefines: R\n")
    p = parse_definition("# comment\ntheory:\nA x . E y . E(x,y)\nsigma:\n" + SUBSET.split("\n", 1)[1])
    assert p.base_signature == ("E",) and len(p.theory) == 1 and len(p.sigma) == 2


def test_no_cut_property():
    """A unique solution on a transitive model never cuts a 2-type."""
    rng = random.Random(14)
    models = [m for n in (1, 2) for m in all_structures(n) if check_transitive(m)]
    models += [m for m in all_structures(3) if check_transitive(m)][::9]
    uniques = 0
    for trial in range(400):
        m = rng.choice(models)
        sigma = []
        for _ in range(rng.randint(1, 3)):
            body = random_formula(rng, 2, ["E", "R"])
            sigma.append(Forall("x", Forall("y", body)) if rng.random() < 0.6
                         else Exists("x", Forall("y", body)))
        sols = search_solutions(DefinitionProblem((), sigma, "R"), m)
        if sols.classification == "unique":
            uniques += 1
            assert cuts_types(m, sols.solutions[0]) is None
    assert uniques >= 20
