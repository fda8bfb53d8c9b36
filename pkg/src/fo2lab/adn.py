"""The 45-element model with a uniform 3-type but no transitive automorphism
group, plus relation-algebra operations on concrete binary relations.

Elements are pairs (level i in Z5, point j in 0..8) encoded as ``9*i + j``.
On each level the nine points form a 3x3 grid: ``s`` cycles the rows
{0,1,2}, {3,4,5}, {6,7,8} and ``g`` cycles the columns {0,3,6}, {1,4,7},
{2,5,8}.  ``R`` links level i to level i+1 through ``r``; ``B`` links level
i to level i+2 through ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .structures import FinStructure

LEVELS = 5
POINTS = 9

S_CYCLES = ((0, 1, 2), (3, 4, 5), (6, 7, 8))
G_CYCLES = ((0, 3, 6), (1, 4, 7), (2, 5, 8))

R_BLOCKS = (((0, 3, 6), (0, 1, 2)), ((1, 4, 7), (3, 4, 5)), ((2, 5, 8), (6, 7, 8)))
B_BLOCKS = (((0, 4, 8), (0, 5, 7)), ((1, 5, 6), (1, 3, 8)), ((2, 3, 7), (2, 4, 6)))

# literal 27-pair tables for r and b (cross-checked against the block products)
R_TABLE = (
    (0, 0), (0, 1), (0, 2), (1, 3), (1, 4), (1, 5), (2, 6), (2, 7), (2, 8),
    (3, 0), (3, 1), (3, 2), (4, 3), (4, 4), (4, 5), (5, 6), (5, 7), (5, 8),
    (6, 0), (6, 1), (6, 2), (7, 3), (7, 4), (7, 5), (8, 6), (8, 7), (8, 8),
)
B_TABLE = (
    (0, 0), (0, 5), (0, 7), (1, 1), (1, 3), (1, 8), (2, 2), (2, 4), (2, 6),
    (3, 2), (3, 4), (3, 6), (4, 0), (4, 5), (4, 7), (5, 1), (5, 3), (5, 8),
    (6, 1), (6, 3), (6, 8), (7, 2), (7, 4), (7, 6), (8, 0), (8, 5), (8, 7),
)


def perm_from_cycles(cycles, n=POINTS):
    """Permutation (image tuple) from disjoint cycles; rejects overlaps."""
    img = list(range(n))
    seen = set()
    for cyc in cycles:
        for k, x in enumerate(cyc):
            if x in seen:
                raise ValueError(f"cycles are not disjoint: {x} repeats")
            seen.add(x)
            img[x] = cyc[(k + 1) % len(cyc)]
    return tuple(img)


def block_product(blocks):
    return frozenset((j, k) for left, right in blocks for j in left for k in right)


def encode(i, j):
    return POINTS * (i % LEVELS) + j


def build_adn_model() -> FinStructure:
    s = perm_from_cycles(S_CYCLES)
    g = perm_from_cycles(G_CYCLES)
    rels = {
        "S": {(encode(i, j), encode(i, s[j])) for i in range(LEVELS) for j in range(POINTS)},
        "G": {(encode(i, j), encode(i, g[j])) for i in range(LEVELS) for j in range(POINTS)},
        "R": {(encode(i, j), encode(i + 1, k)) for i in range(LEVELS) for j, k in R_TABLE},
        "B": {(encode(i, j), encode(i + 2, k)) for i in range(LEVELS) for j, k in B_TABLE},
    }
    return FinStructure("ADN45", LEVELS * POINTS, rels)


# -- relation algebra --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BinRel:
    """Binary relation on 0..n-1 stored as a boolean matrix."""

    matrix: np.ndarray
    key: bytes = field(init=False, repr=False)

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=bool)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("relation matrix must be square")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "key", np.packbits(mat).tobytes() + mat.shape[0].to_bytes(4, "little"))

    @classmethod
    def from_pairs(cls, n, pairs):
        mat = np.zeros((n, n), dtype=bool)
        for a, b in pairs:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"pair ({a},{b}) outside base {n}")
            mat[a, b] = True
        return cls(mat)

    @property
    def n(self):
        return self.matrix.shape[0]

    @property
    def pairs(self):
        return frozenset(map(tuple, np.argwhere(self.matrix).tolist()))

    def __len__(self):
        return int(self.matrix.sum())

    def __eq__(self, other):
        return isinstance(other, BinRel) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def permuted(self, perm):
        perm = np.asarray(perm)
        mat = np.zeros_like(self.matrix)
        a, b = np.nonzero(self.matrix)
        mat[perm[a], perm[b]] = True
        return BinRel(mat)


UNARY_OPS = ("complement", "converse")
BINARY_OPS = ("union", "compose")
RA_OPS = ("union", "complement", "converse", "compose", "identity")


def ra_apply(op, a: BinRel, b: BinRel = None) -> BinRel:
    if op not in RA_OPS:
        raise ValueError(f"unknown operation {op!r}")
    if op in BINARY_OPS:
        if b is None:
            raise ValueError(f"{op} needs two operands")
        if a.n != b.n:
            raise ValueError(f"base size mismatch: {a.n} vs {b.n}")
    elif b is not None:
        raise ValueError(f"{op} takes one operand")
    if op == "union":
        return BinRel(a.matrix | b.matrix)
    if op == "compose":
        prod = a.matrix.astype(np.int32) @ b.matrix.astype(np.int32)
        return BinRel(prod > 0)
    if op == "complement":
        return BinRel(~a.matrix)
    if op == "converse":
        return BinRel(a.matrix.T)
    return identity_rel(a.n)


def identity_rel(n) -> BinRel:
    return BinRel(np.eye(n, dtype=bool))


@dataclass
class RAClosure:
    base: int
    generators: list
    elements: list
    cap: int
    complete: bool

    def __len__(self):
        return len(self.elements)

    def __contains__(self, rel):
        return rel in self._members()

    def _members(self):
        cache = getattr(self, "_set", None)
        if cache is None or len(cache) != len(self.elements):
            cache = set(self.elements)
            self._set = cache
        return cache

    def is_closed(self):
        members = self._members()
        if identity_rel(self.base) not in members:
            return False
        for x in self.elements:
            for op in UNARY_OPS:
                if ra_apply(op, x) not in members:
                    return False
            for y in self.elements:
                for op in BINARY_OPS:
                    if ra_apply(op, x, y) not in members:
                        return False
        return True


def ra_closure(base, generators, cap=10**5) -> RAClosure:
    """Breadth-first closure under union, complement, converse, composition
    and the identity constant, stopping at ``cap`` elements."""
    gens = list(generators)
    for g in gens:
        if g.n != base:
            raise ValueError(f"generator on base {g.n}, expected {base}")
    elements = []
    seen = set()

    def add(rel):
        if rel in seen:
            return False
        seen.add(rel)
        elements.append(rel)
        return True

    frontier = [r for r in [identity_rel(base)] + gens if add(r)]
    done = 0
    while frontier and len(elements) < cap:
        nxt = []
        for x in frontier:
            for op in UNARY_OPS:
                y = ra_apply(op, x)
                if add(y):
                    nxt.append(y)
            # pair x with everything known so far, in insertion order
            for y in elements[:]:
                for op, args in (("union", (x, y)), ("compose", (x, y)), ("compose", (y, x))):
                    z = ra_apply(op, *args)
                    if add(z):
                        nxt.append(z)
                if len(elements) >= cap:
                    break
            done += 1
            if len(elements) >= cap:
                break
        frontier = nxt
    complete = not frontier and len(elements) <= cap
    if len(elements) >= cap and frontier:
        complete = False
    return RAClosure(base, gens, elements[:cap], cap, complete)


# -- verification report -----------------------------------------------------

def verify_adn(triple_budget=None):
    """Desk-checkable consequences for the 45-element model; returns a dict."""
    from .automorphism import orbits
    from .companion import check_homogeneous
    from .refine import refine_pairs, refine_triples

    m = build_adn_model()
    sizes = {"universe": m.size}
    sizes.update({k: len(v) for k, v in m.relations.items()})
    checks = {}
    checks["sizes"] = sizes == {"universe": 45, "S": 45, "G": 45, "R": 135, "B": 135}
    diag2 = len(set(refine_pairs(m).diag_colors(0).tolist()))
    diag3 = len(set(refine_triples(m, budget=triple_budget).diag_colors(0).tolist()))
    orbs = orbits(m)
    checks["uniform_2_type"] = diag2 == 1
    checks["uniform_3_type"] = diag3 == 1
    checks["several_orbits"] = len(orbs) >= 2
    checks["homogeneous"] = bool(check_homogeneous(m))
    conclusions = []
    if checks["uniform_3_type"] and checks["several_orbits"]:
        conclusions.append("not 3,1-transitive")
        # a transitive model is 3,1-transitive
        conclusions.append("not transitive")
    return {
        "sizes": sizes,
        "diag_color_count_2": diag2,
        "diag_color_count_3": diag3,
        "orbit_count": len(orbs),
        "orbit_sizes": sorted(len(o) for o in orbs),
        "checks": checks,
        "conclusions": conclusions,
        "ok": all(checks.values()) and len(conclusions) == 2,
    }
