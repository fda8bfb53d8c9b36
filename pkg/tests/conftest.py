import os
import random
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from fo2lab import fixtures  # noqa: E402
from fo2lab.corpus import fixture_corpus, random_corpus  # noqa: E402
from fo2lab.structures import FinStructure, disjoint_union  # noqa: E402

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture(scope="session")
def corpus():
    """The seeded acceptance corpus: 200 random structures plus the fixtures."""
    return random_corpus(seed=0, count=200, max_size=6, density=0.3) + fixture_corpus()


def _circulant(n, diffs, name):
    return FinStructure(name, n, {"E": {(a, (a + d) % n) for a in range(n) for d in diffs}})


def enriched_structures(seed=1, count=40):
    """Structures with large 1-type classes (the random corpus has mostly
    singleton classes): doubled copies, circulants and mixed unions."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        kind = i % 4
        if kind == 0:
            n = rng.randint(2, 4)
            rel = {(a, b) for a in range(n) for b in range(n) if rng.random() < 0.4}
            s = FinStructure("base", n, {"E": rel})
            perm = list(range(n))
            rng.shuffle(perm)
            out.append(disjoint_union(s, s.permuted(perm), name=f"double{i}"))
        elif kind == 1:
            n = rng.randint(3, 8)
            diffs = {d for d in range(1, n) if rng.random() < 0.4}
            out.append(_circulant(n, diffs, f"circ{i}"))
        elif kind == 2:
            n, m = rng.randint(2, 4), rng.randint(2, 5)
            out.append(disjoint_union(fixtures.cycle(n), fixtures.cycle(m), name=f"cycles{i}"))
        else:
            n = rng.randint(2, 3)
            a = _circulant(n, {1}, "a")
            b = FinStructure("b", 2, {"E": {(0, 1)}})
            s = disjoint_union(disjoint_union(a, a), b, name=f"mixed{i}")
            extra = {(rng.randrange(s.size), rng.randrange(s.size)) for _ in range(2)}
            out.append(FinStructure(s.name, s.size, {"E": s.relations["E"] | extra}))
    return out


@pytest.fixture(scope="session")
def enriched():
    return enriched_structures()


@pytest.fixture(scope="session")
def adn_report():
    from fo2lab.adn import verify_adn

    return verify_adn()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in range(1, 10):
        if k in ACCEPTANCE:
            ok, detail = ACCEPTANCE[k]
            terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
        else:
            terminalreporter.write_line(f"criterion {k}: NOT RUN")
