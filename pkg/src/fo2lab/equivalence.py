"""2- and 3-equivalence of finite structures, and explicit 2-isomorphisms.

A 2-isomorphism ``I`` between M and N links elements (``a ~ b``) and pairs
(``(a,a') ~ (b,b')``) such that

* (i)   links have the right shape,
* (ii)  every link is a partial isomorphism of its (one- or two-element)
        domain, equality included,
* (iii) a linked pair projects to linked elements, and
* (iv)  every element has a partner on the other side, and every element
        link extends forth and back to pair links with that first coordinate.

``verify_iso2`` checks these clauses directly on the structures and shares
no code with ``build_iso2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .refine import refine_pairs, refine_triples
from .structures import check_same_signature


@dataclass(frozen=True)
class PartialIso2:
    element_links: frozenset = frozenset()
    pair_links: frozenset = frozenset()  # ((a, a2), (b, b2))

    def __post_init__(self):
        object.__setattr__(self, "element_links",
                           frozenset((int(a), int(b)) for a, b in self.element_links))
        object.__setattr__(self, "pair_links", frozenset(
            ((int(a), int(a2)), (int(b), int(b2))) for (a, a2), (b, b2) in self.pair_links))

    def __len__(self):
        return len(self.element_links) + len(self.pair_links)


@dataclass(frozen=True, order=True)
class Violation:
    clause: str
    message: str
    witness: tuple = ()

    def __str__(self):
        return f"({self.clause}) {self.message} {self.witness}"


@dataclass
class IsoReport:
    violations: list = field(default_factory=list)
    checked_links: int = 0

    @property
    def ok(self):
        return not self.violations

    def clauses(self):
        return sorted({v.clause for v in self.violations})


# -- decisions ---------------------------------------------------------------

def equiv2(m, n) -> bool:
    table = refine_pairs([m, n])
    return set(table.diag_colors(0).tolist()) == set(table.diag_colors(1).tolist())


def equiv3(m, n, budget=None) -> bool:
    table = refine_triples([m, n], budget=budget)
    return set(table.diag_colors(0).tolist()) == set(table.diag_colors(1).tolist())


def equiv2_classes(structures):
    """Partition indices of ``structures`` into 2-equivalence classes with one
    joint refinement (colors of a structure do not depend on its companions)."""
    structures = list(structures)
    table = refine_pairs(structures)
    keys = {}
    out = []
    for i in range(len(structures)):
        key = frozenset(table.diag_colors(i).tolist())
        if key not in keys:
            keys[key] = len(out)
            out.append([])
        out[keys[key]].append(i)
    return out


def build_iso2(m, n, table=None):
    """The canonical 2-isomorphism (links between equal joint colors), or
    ``None`` when m and n are not 2-equivalent."""
    if table is None:
        table = refine_pairs([m, n])
    dm, dn = table.diag_colors(0), table.diag_colors(1)
    if set(dm.tolist()) != set(dn.tolist()):
        return None
    elems = {(a, b) for a in range(m.size) for b in range(n.size) if dm[a] == dn[b]}
    cm, cn = table.colors(0), table.colors(1)
    by_color = {}
    for b, b2 in zip(*np.nonzero(np.ones_like(cn, dtype=bool))):
        by_color.setdefault(int(cn[b, b2]), []).append((int(b), int(b2)))
    pairs = set()
    for a in range(m.size):
        for a2 in range(m.size):
            for q in by_color.get(int(cm[a, a2]), ()):
                pairs.add(((a, a2), q))
    return PartialIso2(frozenset(elems), frozenset(pairs))


# -- verification ------------------------------------------------------------

def _local_iso(m, n, dom, img):
    """Name of the first atom on which ``dom -> img`` fails, or None."""
    (a, a2), (b, b2) = dom, img
    if (a == a2) != (b == b2):
        return "="
    for rname in m.signature:
        rm, rn = m.relations[rname], n.relations[rname]
        for u, v, p, q in ((a, a, b, b), (a, a2, b, b2), (a2, a, b2, b), (a2, a2, b2, b2)):
            if ((u, v) in rm) != ((p, q) in rn):
                return rname
    return None


def verify_iso2(iso: PartialIso2, m, n) -> IsoReport:
    report = IsoReport(checked_links=len(iso))
    bad = report.violations
    if m.signature != n.signature:
        bad.append(Violation("i", "signature mismatch", (m.signature, n.signature)))
        return report

    # (i) shape
    for a, b in iso.element_links:
        if not (0 <= a < m.size and 0 <= b < n.size):
            bad.append(Violation("i", "element link out of range", (a, b)))
    for (a, a2), (b, b2) in iso.pair_links:
        if not (0 <= a < m.size and 0 <= a2 < m.size and 0 <= b < n.size and 0 <= b2 < n.size):
            bad.append(Violation("i", "pair link out of range", (a, a2, b, b2)))
    if bad:
        bad.sort()
        return report

    # (ii) local isomorphism
    for a, b in iso.element_links:
        atom = _local_iso(m, n, (a, a), (b, b))
        if atom:
            bad.append(Violation("ii", f"element link breaks {atom}", (a, b)))
    for dom, img in iso.pair_links:
        atom = _local_iso(m, n, dom, img)
        if atom:
            bad.append(Violation("ii", f"pair link breaks {atom}", dom + img))

    # (iii) restriction
    for (a, a2), (b, b2) in iso.pair_links:
        for u, v in ((a, b), (a2, b2)):
            if (u, v) not in iso.element_links:
                bad.append(Violation("iii", f"projection ({u},{v}) is not linked",
                                     (a, a2, b, b2)))

    # (iv) back and forth
    left = {a for a, _ in iso.element_links}
    right = {b for _, b in iso.element_links}
    for a in range(m.size):
        if a not in left:
            bad.append(Violation("iv.1", "element of M has no partner", (a,)))
    for b in range(n.size):
        if b not in right:
            bad.append(Violation("iv.2", "element of N has no partner", (b,)))
    forth, back = {}, {}
    for (a, a2), (b, b2) in iso.pair_links:
        forth.setdefault((a, b), set()).add(a2)
        back.setdefault((a, b), set()).add(b2)
    for a, b in sorted(iso.element_links):
        got = forth.get((a, b), set())
        for a2 in range(m.size):
            if a2 not in got:
                bad.append(Violation("iv.3", "no b' with ((a,a'),(b,b')) linked", (a, b, a2)))
        got = back.get((a, b), set())
        for b2 in range(n.size):
            if b2 not in got:
                bad.append(Violation("iv.4", "no a' with ((a,a'),(b,b')) linked", (a, b, b2)))
    bad.sort()
    return report


# -- witness files -----------------------------------------------------------

def write_iso(iso: PartialIso2) -> str:
    lines = [f"e {a} {b}" for a, b in sorted(iso.element_links)]
    lines += [f"p {a} {a2} {b} {b2}" for (a, a2), (b, b2) in sorted(iso.pair_links)]
    return "\n".join(lines) + "\n"


def parse_iso(text: str) -> PartialIso2:
    elems, pairs = set(), set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        words = line.split()
        if not words or words[0].startswith("#"):
            continue
        try:
            nums = [int(w) for w in words[1:]]
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer field in {line!r}") from None
        if words[0] == "e" and len(nums) == 2:
            elems.add(tuple(nums))
        elif words[0] == "p" and len(nums) == 4:
            pairs.add((tuple(nums[:2]), tuple(nums[2:])))
        else:
            raise ValueError(f"line {lineno}: expected 'e a b' or 'p a a2 b b2', got {line!r}")
    return PartialIso2(frozenset(elems), frozenset(pairs))


__all__ = ["PartialIso2", "Violation", "IsoReport", "equiv2", "equiv3", "equiv2_classes",
           "build_iso2", "verify_iso2", "write_iso", "parse_iso", "check_same_signature"]
