"""Automorphisms, orbits and the transitivity notions.

``find_automorphism`` is an exact individualization/refinement search: pins
are installed as fresh singleton relations on a source and a target copy,
both copies are refined jointly, and the search branches on the smallest
non-trivial color cell.  Any automorphism respecting the pins respects the
joint colors, so branching over one cell is exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .refine import refine_pairs, refine_triples
from .structures import FinStructure

Permutation = tuple  # image tuple over 0..n-1


@dataclass(frozen=True)
class Decision:
    holds: bool
    witness: tuple = None

    def __bool__(self):
        return self.holds


def is_automorphism(m: FinStructure, perm) -> bool:
    if sorted(perm) != list(range(m.size)):
        return False
    for pairs in m.relations.values():
        if {(perm[a], perm[b]) for a, b in pairs} != pairs:
            return False
    return True


def compose(p, q):
    """``p`` after ``q``."""
    return tuple(p[i] for i in q)


def inverse(p):
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _pin_names(m, k):
    names, i = [], 0
    while len(names) < k:
        name = f"_pin{i}"
        if name not in m.relations:
            names.append(name)
        i += 1
    return names


def _individualize(m, points, names):
    rels = dict(m.relations)
    for name, p in zip(names, points):
        rels[name] = {(p, p)}
    return FinStructure(m.name, m.size, rels)


class _Search:
    def __init__(self, m):
        self.m = m
        self.nodes = 0

    def run(self, pins):
        self.nodes += 1
        m = self.m
        names = _pin_names(m, len(pins))
        src = _individualize(m, [a for a, _ in pins], names)
        tgt = _individualize(m, [b for _, b in pins], names)
        table = refine_pairs([src, tgt])
        ds, dt = table.diag_colors(0), table.diag_colors(1)
        if sorted(ds.tolist()) != sorted(dt.tolist()):
            return None
        cells = {}
        for a, c in enumerate(ds.tolist()):
            cells.setdefault(c, []).append(a)
        open_cells = [(len(v), c) for c, v in cells.items() if len(v) > 1]
        if not open_cells:
            where = {c: b for b, c in enumerate(dt.tolist())}
            perm = tuple(where[c] for c in ds.tolist())
            return perm if is_automorphism(m, perm) else None
        _, c = min(open_cells)
        v = cells[c][0]
        for w in np.flatnonzero(dt == c).tolist():
            found = self.run(pins + [(v, w)])
            if found is not None:
                return found
        return None


def find_automorphism(m: FinStructure, pins=()):
    """An automorphism of ``m`` sending each pinned source to its target, or None."""
    pins = [(int(a), int(b)) for a, b in pins]
    for a, b in pins:
        if not (0 <= a < m.size and 0 <= b < m.size):
            raise ValueError(f"pin {a}->{b} outside universe of size {m.size}")
    return _Search(m).run(pins)


def _uf_find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def _uf_union(parent, x, y):
    x, y = _uf_find(parent, x), _uf_find(parent, y)
    if x != y:
        parent[max(x, y)] = min(x, y)


class OrbitResult(list):
    """Orbit partition (sorted lists) plus the automorphisms found on the way."""

    generators: list


def orbits(m: FinStructure, fixed=(), table=None):
    """Orbits of the automorphisms of ``m`` fixing every element of ``fixed``."""
    fixed = list(fixed)
    if table is None:
        names = _pin_names(m, len(fixed))
        table = refine_pairs(_individualize(m, fixed, names))
    diag = table.diag_colors(0).tolist()
    parent = list(range(m.size))
    gens = []
    by_class = {}
    for a, c in enumerate(diag):
        by_class.setdefault(c, []).append(a)
    base = [(a, a) for a in fixed]
    for members in by_class.values():
        reps = []
        for b in members:
            placed = False
            for r in reps:
                if _uf_find(parent, r) == _uf_find(parent, b):
                    placed = True
                    break
                perm = find_automorphism(m, base + [(r, b)])
                if perm is not None:
                    gens.append(perm)
                    for x, y in enumerate(perm):
                        _uf_union(parent, x, y)
                    placed = True
                    break
            if not placed:
                reps.append(b)
    groups = {}
    for a in range(m.size):
        groups.setdefault(_uf_find(parent, a), []).append(a)
    out = OrbitResult(sorted(groups.values()))
    out.generators = gens
    return out


def check_transitive(m: FinStructure) -> Decision:
    """Equal 1-type elements are always related by an automorphism."""
    diag = refine_pairs(m).diag_colors(0).tolist()
    orbit_of = {}
    for k, orb in enumerate(orbits(m)):
        for a in orb:
            orbit_of[a] = k
    for a in range(m.size):
        for b in range(a + 1, m.size):
            if diag[a] == diag[b] and orbit_of[a] != orbit_of[b]:
                return Decision(False, (a, b))
    return Decision(True)


def check_31_transitive(m: FinStructure, budget=None) -> Decision:
    """Equal 3-type elements are always related by an automorphism."""
    diag3 = refine_triples(m, budget=budget).diag_colors(0).tolist()
    orbit_of = {}
    for k, orb in enumerate(orbits(m)):
        for a in orb:
            orbit_of[a] = k
    for a in range(m.size):
        for b in range(a + 1, m.size):
            if diag3[a] == diag3[b] and orbit_of[a] != orbit_of[b]:
                return Decision(False, (a, b))
    return Decision(True)


def pair_orbits(m: FinStructure):
    """Orbits of Aut(m) acting on ordered pairs, as a list of frozensets."""
    result = []
    for orb in orbits(m):
        rep = orb[0]
        # an automorphism carrying rep to each c of its orbit
        carry = {rep: tuple(range(m.size))}
        for c in orb[1:]:
            carry[c] = find_automorphism(m, [(rep, c)])
        for sub in orbits(m, fixed=[rep]):
            result.append(frozenset((carry[c][rep], carry[c][b]) for c in orb for b in sub))
    return sorted(result, key=lambda s: min(s))


def invariant_under(rel, perms):
    rel = frozenset(rel)
    return all({(p[a], p[b]) for a, b in rel} == rel for p in perms)
