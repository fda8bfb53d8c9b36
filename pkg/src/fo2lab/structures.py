"""Finite binary relational structures and the ``.fos`` text format.

A structure has universe ``0..size-1`` and a family of named binary
relations.  Structures are immutable; every construction returns a new one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class StructureError(ValueError):
    """Malformed structure or structure text."""


class FosSyntaxError(StructureError):
    def __init__(self, msg, line, column=1):
        super().__init__(f"line {line}, column {column}: {msg}")
        self.line = line
        self.column = column


def _freeze(pairs):
    return frozenset((int(a), int(b)) for a, b in pairs)


@dataclass(frozen=True, eq=False)
class FinStructure:
    name: str
    size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise StructureError(f"universe must be nonempty, got size {self.size!r}")
        object.__setattr__(self, "size", int(self.size))
        rels = {}
        for rname in sorted(self.relations):
            if not isinstance(rname, str) or not NAME_RE.match(rname):
                raise StructureError(f"bad relation name {rname!r}")
            pairs = _freeze(self.relations[rname])
            for a, b in pairs:
                if not (0 <= a < self.size and 0 <= b < self.size):
                    raise StructureError(
                        f"pair ({a},{b}) of {rname} out of range for universe {self.size}")
            rels[rname] = pairs
        object.__setattr__(self, "relations", rels)

    def __eq__(self, other):
        if not isinstance(other, FinStructure):
            return NotImplemented
        return (self.name, self.size, self.relations) == (other.name, other.size, other.relations)

    def __hash__(self):
        return hash((self.name, self.size, tuple(self.relations.items())))

    def __repr__(self):
        rels = ", ".join(f"{k}:{len(v)}" for k, v in self.relations.items())
        return f"FinStructure({self.name!r}, size={self.size}, {{{rels}}})"

    @property
    def signature(self):
        return tuple(self.relations)

    def same_content(self, other):
        """Equality ignoring the structure name."""
        return self.size == other.size and self.relations == other.relations

    @cached_property
    def matrices(self):
        """Relation name -> read-only boolean adjacency matrix."""
        out = {}
        for rname, pairs in self.relations.items():
            mat = np.zeros((self.size, self.size), dtype=bool)
            if pairs:
                idx = np.array(sorted(pairs), dtype=np.int64)
                mat[idx[:, 0], idx[:, 1]] = True
            mat.setflags(write=False)
            out[rname] = mat
        return out

    def holds(self, rname, a, b):
        return (a, b) in self.relations[rname]

    def renamed(self, name):
        return FinStructure(name, self.size, self.relations)

    def permuted(self, perm):
        """Image of the structure under the bijection ``i -> perm[i]``."""
        perm = list(perm)
        if sorted(perm) != list(range(self.size)):
            raise StructureError("not a permutation of the universe")
        rels = {k: {(perm[a], perm[b]) for a, b in v} for k, v in self.relations.items()}
        return FinStructure(self.name, self.size, rels)


@dataclass(frozen=True)
class AtomicPairType:
    """Quantifier-free type of a pair: per relation R the truth of
    R(x,x), R(x,y), R(y,x), R(y,y), plus whether x = y."""

    names: tuple
    atoms: tuple  # one (xx, xy, yx, yy) tuple per name
    equal: bool

    def __post_init__(self):
        if self.equal:
            for xx, xy, yx, yy in self.atoms:
                if not (xx == xy == yx == yy):
                    raise StructureError("diagonal atomic type with inconsistent atoms")

    @classmethod
    def of(cls, s: FinStructure, a: int, b: int) -> "AtomicPairType":
        atoms = []
        for rname in s.signature:
            m = s.matrices[rname]
            atoms.append((bool(m[a, a]), bool(m[a, b]), bool(m[b, a]), bool(m[b, b])))
        return cls(s.signature, tuple(atoms), a == b)

    def converse(self):
        return AtomicPairType(self.names, tuple((yy, yx, xy, xx) for xx, xy, yx, yy in self.atoms),
                              self.equal)

    def holds(self, rname):
        """Truth of R(x,y)."""
        return self.atoms[self.names.index(rname)][1]

    def signed_atoms(self):
        """Literal list in a fixed order, e.g. ``['~x=y', 'E(x,x)', '~E(x,y)', ...]``."""
        out = ["x=y" if self.equal else "~x=y"]
        for rname, vals in zip(self.names, self.atoms):
            for (u, v), val in zip((("x", "x"), ("x", "y"), ("y", "x"), ("y", "y")), vals):
                out.append(f"{'' if val else '~'}{rname}({u},{v})")
        return out


# -- text format -------------------------------------------------------------

def parse_structure(text: str) -> FinStructure:
    name = "anon"
    size = None
    rels = {}
    current = None
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        col = raw.index(line[0]) + 1
        words = line.split()
        head = words[0]
        if current is not None:
            if head == "end" and len(words) == 1:
                current = None
                continue
            if len(words) != 2 or not all(w.isdigit() for w in words):
                raise FosSyntaxError(f"expected 'I J' or 'end', got {line!r}", lineno, col)
            i, j = int(words[0]), int(words[1])
            if i >= size or j >= size:
                raise FosSyntaxError(f"index out of range for universe {size}: {i} {j}",
                                     lineno, col)
            rels[current[0]].add((i, j))
            continue
        if head == "structure":
            if seen_header or size is not None or len(words) != 2 or not NAME_RE.match(words[1]):
                raise FosSyntaxError("bad 'structure NAME' header", lineno, col)
            name = words[1]
            seen_header = True
        elif head == "universe":
            if size is not None or len(words) != 2 or not words[1].isdigit():
                raise FosSyntaxError("bad 'universe N' line", lineno, col)
            size = int(words[1])
            if size == 0:
                raise FosSyntaxError("empty universe (size 0) is not allowed", lineno, col)
        elif head == "rel":
            if size is None:
                raise FosSyntaxError("'rel' before 'universe'", lineno, col)
            if len(words) != 2 or not NAME_RE.match(words[1]):
                raise FosSyntaxError("bad 'rel NAME' line", lineno, col)
            if words[1] in rels:
                raise FosSyntaxError(f"duplicate relation name {words[1]!r}", lineno, col)
            rels[words[1]] = set()
            current = (words[1], lineno)
        else:
            raise FosSyntaxError(f"unexpected {head!r}", lineno, col)
    if current is not None:
        raise FosSyntaxError(f"relation {current[0]!r} not terminated by 'end'", current[1])
    if size is None:
        raise FosSyntaxError("missing 'universe N' line", max(1, len(text.splitlines())))
    return FinStructure(name, size, rels)


def write_structure(s: FinStructure) -> str:
    lines = [f"structure {s.name}", f"universe {s.size}"]
    for rname, pairs in s.relations.items():
        lines.append(f"rel {rname}")
        lines.extend(f"{a} {b}" for a, b in sorted(pairs))
        lines.append("end")
    return "\n".join(lines) + "\n"


def load_structure(path) -> FinStructure:
    with open(path, encoding="utf-8") as fh:
        return parse_structure(fh.read())


def save_structure(s: FinStructure, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_structure(s))


# -- constructions -----------------------------------------------------------

def check_same_signature(structures: Iterable[FinStructure]):
    structures = list(structures)
    sig = structures[0].signature
    for s in structures[1:]:
        if s.signature != sig:
            raise StructureError(f"signature mismatch: {sig} vs {s.signature}")
    return sig


def disjoint_union(a: FinStructure, b: FinStructure, name=None) -> FinStructure:
    check_same_signature([a, b])
    k = a.size
    rels = {r: set(a.relations[r]) | {(i + k, j + k) for i, j in b.relations[r]}
            for r in a.signature}
    return FinStructure(name or f"{a.name}_{b.name}", a.size + b.size, rels)


def expand_with_relation(s: FinStructure, name: str, rel) -> FinStructure:
    if name in s.relations:
        raise StructureError(f"relation name clash: {name!r}")
    rels = dict(s.relations)
    rels[name] = _freeze(rel)
    return FinStructure(s.name, s.size, rels)


def drop_relation(s: FinStructure, name: str) -> FinStructure:
    rels = dict(s.relations)
    del rels[name]
    return FinStructure(s.name, s.size, rels)


def fresh_name(s: FinStructure, base="R"):
    name, k = base, 0
    while name in s.relations:
        k += 1
        name = f"{base}{k}"
    return name


def full_relation(n):
    return frozenset((a, b) for a in range(n) for b in range(n))


def converse_pairs(rel):
    return frozenset((b, a) for a, b in rel)
