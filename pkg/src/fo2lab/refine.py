"""Stable colorings of pairs and triples.

On a finite structure the stable pair coloring computed here is exactly the
partition of M x M into FO2 2-types (and the triple coloring gives FO3
3-types): the refinement step mirrors one round of the pebble game, using
*sets* of extension colors because FO2 cannot count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import kernels
from .structures import AtomicPairType, FinStructure, check_same_signature
from .syntax import Atom, Equals, Exists, Forall, Not, conjunction, disjunction

DEFAULT_TRIPLE_BUDGET = 10**6


class BudgetExceeded(RuntimeError):
    pass


# -- index plumbing ----------------------------------------------------------

@lru_cache(maxsize=256)
def _pair_index(sizes):
    tg, members, offsets = [], [], []
    off = gbase = 0
    for n in sizes:
        a, b = np.divmod(np.arange(n * n), n)
        tg.append(np.column_stack([gbase + a, gbase + n + b]))
        z = np.arange(n)
        rows = off + z[:, None] * n + z[None, :]  # row group a: off + a*n + z
        members.append(rows.reshape(-1))
        members.append(rows.T.reshape(-1))  # col group b: off + z*n + b
        offsets.append(off)
        off += n * n
        gbase += 2 * n
    return _freeze_index(tg, members, gbase, offsets)


@lru_cache(maxsize=32)
def _triple_index(sizes):
    tg, members, offsets = [], [], []
    off = gbase = 0
    for n in sizes:
        n2 = n * n
        t = np.arange(n2 * n)
        a, rest = np.divmod(t, n2)
        b, c = np.divmod(rest, n)
        tg.append(np.column_stack([gbase + b * n + c, gbase + n2 + a * n + c,
                                   gbase + 2 * n2 + a * n + b]))
        cube = off + np.arange(n2 * n).reshape(n, n, n)
        # group (axis k, other two coords) lists tuples varying coordinate k
        members.append(np.moveaxis(cube, 0, -1).reshape(-1))
        members.append(np.moveaxis(cube, 1, -1).reshape(-1))
        members.append(cube.reshape(-1))
        offsets.append(off)
        off += n2 * n
        gbase += 3 * n2
    return _freeze_index(tg, members, gbase, offsets)


def _freeze_index(tg, members, ngroups, offsets):
    tg = np.ascontiguousarray(np.concatenate(tg), dtype=np.int64)
    members = np.ascontiguousarray(np.concatenate(members), dtype=np.int64)
    assert tg.max() < ngroups
    for arr in (tg, members):
        arr.setflags(write=False)
    return tg, members, None, tuple(offsets)


def _group_ptr(sizes, arity):
    counts = []
    for n in sizes:
        counts.extend([n] * (arity * n ** (arity - 1)))
    ptr = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    ptr.setflags(write=False)
    return ptr


@lru_cache(maxsize=256)
def _index(sizes, arity):
    tg, members, _, offsets = (_pair_index if arity == 2 else _triple_index)(sizes)
    return tg, members, _group_ptr(sizes, arity), offsets


# -- atomic types ------------------------------------------------------------

def _pair_atomic_codes(s):
    n = s.size
    eye = np.eye(n, dtype=np.int8)
    cols = [eye.reshape(-1)]
    for rname in s.signature:
        m = s.matrices[rname].astype(np.int8)
        d = np.diag(m)
        cols += [np.repeat(d, n), m.reshape(-1), m.T.reshape(-1), np.tile(d, n)]
    return np.column_stack(cols)


def _triple_atomic_codes(s):
    n = s.size
    a, b, c = np.indices((n, n, n)).reshape(3, -1)
    pos = (a, b, c)
    cols = [(a == b), (a == c), (b == c)]
    for rname in s.signature:
        m = s.matrices[rname]
        for i in range(3):
            for j in range(3):
                cols.append(m[pos[i], pos[j]])
    return np.column_stack(cols).astype(np.int8)


# -- color tables ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ColorTable:
    arity: int
    structures: tuple
    flat: np.ndarray  # final colors, all tuples of all structures in scan order
    num_colors: int
    rounds: int
    history: tuple = ()  # flat colorings at depth 0..rounds (arity 2)
    offsets: tuple = ()
    atomic: dict = field(default_factory=dict)

    def colors(self, i=0):
        """Color array of structure ``i`` with shape (n,)*arity."""
        n = self.structures[i].size
        off = self.offsets[i]
        return self.flat[off:off + n ** self.arity].reshape((n,) * self.arity)

    def color(self, i, *tup):
        return int(self.colors(i)[tup])

    def diag_colors(self, i=0):
        c = self.colors(i)
        idx = np.arange(self.structures[i].size)
        return c[(idx,) * self.arity]

    def colors_at_depth(self, d, i=0):
        """Pair colors after ``d`` rounds (``d`` beyond stabilization allowed)."""
        flat = self.history[min(d, self.rounds)]
        n = self.structures[i].size
        off = self.offsets[i]
        return flat[off:off + n * n].reshape(n, n)

    def class_of(self, color, i=0):
        return [tuple(int(v) for v in t) for t in np.argwhere(self.colors(i) == color)]

    def color_set(self, i=0):
        return set(np.unique(self.colors(i)).tolist())

    def class_sizes(self, i=0):
        vals, counts = np.unique(self.colors(i), return_counts=True)
        return dict(zip(vals.tolist(), counts.tolist()))

    def atomic_of(self, color):
        return self.atomic[color]

    def _locate(self, t):
        for i, off in enumerate(self.offsets):
            n = self.structures[i].size
            if t < off + n ** self.arity:
                return i, t - off
        raise IndexError(t)


def _refine(structures, arity, budget=None):
    structures = tuple(structures)
    if not structures:
        raise ValueError("need at least one structure")
    check_same_signature(structures)
    sizes = tuple(s.size for s in structures)
    if arity == 3:
        total = sum(n ** 3 for n in sizes)
        limit = DEFAULT_TRIPLE_BUDGET if budget is None else budget
        if total > limit:
            raise BudgetExceeded(f"{total} triples exceed budget {limit}")
    codes = np.concatenate([(_pair_atomic_codes if arity == 2 else _triple_atomic_codes)(s)
                            for s in structures])
    colors, count = kernels.relabel(codes)
    tg, members, ptr, offsets = _index(sizes, arity)
    history = [colors]
    rounds = 0
    while True:
        new, new_count = kernels.refine_round(colors, tg, ptr, members)
        if new_count == count:
            break
        colors, count = new, new_count
        rounds += 1
        history.append(colors)
    for h in history:
        h.setflags(write=False)
    atomic = {}
    if arity == 2:
        _, first = np.unique(colors, return_index=True)
        table = ColorTable(2, structures, colors, count, rounds, tuple(history), offsets)
        for c, t in enumerate(first):
            i, local = table._locate(int(t))
            a, b = divmod(local, sizes[i])
            atomic[c] = AtomicPairType.of(structures[i], a, b)
        return ColorTable(2, structures, colors, count, rounds, tuple(history), offsets, atomic)
    return ColorTable(3, structures, colors, count, rounds, (), offsets)


def refine_pairs(structures) -> ColorTable:
    """Jointly refine pair colors of one or more same-signature structures."""
    if isinstance(structures, FinStructure):
        structures = [structures]
    return _refine(structures, 2)


def refine_triples(structures, budget=None) -> ColorTable:
    if isinstance(structures, FinStructure):
        structures = [structures]
    return _refine(structures, 3, budget)


# -- the type vocabulary -----------------------------------------------------

@dataclass(frozen=True, eq=False)
class TypeView:
    """1-Types, 2-types and converses of one structure of a pair table.

    Classes are numbered by increasing diagonal color id."""

    table: ColorTable
    index: int
    classes: tuple  # tuple of element tuples
    class_of: tuple  # element -> class id
    class_color: tuple  # class id -> diagonal color
    pair_classes: dict  # color -> sorted list of pairs
    converse: dict  # color -> color
    identity_of: tuple  # class id -> identity color
    types_between: dict  # (u, v) -> sorted tuple of colors

    @property
    def structure(self):
        return self.table.structures[self.index]

    def color(self, a, b):
        return self.table.color(self.index, a, b)

    def is_symmetric(self, c):
        return self.converse[c] == c

    def is_identity(self, c):
        return self.table.atomic[c].equal

    def singleton(self, u):
        return len(self.classes[u]) == 1


def type_view(table: ColorTable, index=0) -> TypeView:
    if table.arity != 2:
        raise ValueError("type_view needs a pair (arity 2) table")
    cols = table.colors(index)
    n = cols.shape[0]
    diag = cols[np.arange(n), np.arange(n)]
    class_colors = sorted(set(diag.tolist()))
    cid = {c: u for u, c in enumerate(class_colors)}
    class_of = tuple(cid[int(c)] for c in diag)
    classes = tuple(tuple(a for a in range(n) if class_of[a] == u) for u in range(len(class_colors)))
    pair_classes, converse = {}, {}
    between = {}
    for a in range(n):
        for b in range(n):
            c = int(cols[a, b])
            pair_classes.setdefault(c, []).append((a, b))
            cv = int(cols[b, a])
            if converse.setdefault(c, cv) != cv:
                raise RuntimeError(f"color {c} has no well-defined converse")
            between.setdefault((class_of[a], class_of[b]), set()).add(c)
    identity = []
    for u, c in enumerate(class_colors):
        ids = [t for t in between[(u, u)] if table.atomic[t].equal]
        if ids != [c]:
            raise RuntimeError(f"class {u} has identity colors {ids}")
        identity.append(c)
    return TypeView(table, index, classes, class_of, tuple(class_colors), pair_classes,
                    converse, tuple(identity),
                    {k: tuple(sorted(v)) for k, v in sorted(between.items())})


# -- characteristic formulas ---------------------------------------------------

def atomic_formula(t: AtomicPairType):
    lits = [Equals("x", "y") if t.equal else Not(Equals("x", "y"))]
    for rname, vals in zip(t.names, t.atoms):
        for (u, v), val in zip((("x", "x"), ("x", "y"), ("y", "x"), ("y", "y")), vals):
            atom = Atom(rname, u, v)
            lits.append(atom if val else Not(atom))
    return conjunction(lits)


class _CharBuilder:
    def __init__(self, table):
        self.table = table
        self.memo = {}
        sizes = tuple(s.size for s in table.structures)
        self.tg, self.members, self.ptr, _ = _index(sizes, 2)

    def flat_at(self, d):
        return self.table.history[min(d, self.table.rounds)]

    def chi(self, d, c):
        key = (d, c)
        if key in self.memo:
            return self.memo[key]
        cur = self.flat_at(d)
        rep = int(np.flatnonzero(cur == c)[0])
        if d == 0:
            i, local = self.table._locate(rep)
            n = self.table.structures[i].size
            f = atomic_formula(AtomicPairType.of(self.table.structures[i], *divmod(local, n)))
        else:
            prev = self.flat_at(d - 1)
            row_g, col_g = self.tg[rep]
            right = sorted(set(prev[self.members[self.ptr[row_g]:self.ptr[row_g + 1]]].tolist()))
            left = sorted(set(prev[self.members[self.ptr[col_g]:self.ptr[col_g + 1]]].tolist()))
            rsub = [self.chi(d - 1, e) for e in right]
            lsub = [self.chi(d - 1, e) for e in left]
            parts = [self.chi(d - 1, int(prev[rep]))]
            parts += [Exists("y", g) for g in rsub]
            parts.append(Forall("y", disjunction(rsub)))
            parts += [Exists("x", g) for g in lsub]
            parts.append(Forall("x", disjunction(lsub)))
            f = conjunction(parts)
        self.memo[key] = f
        return f


def characteristic_formula(table: ColorTable, color: int, depth: int = None):
    """FO2 formula chi(x, y) true exactly on pairs whose depth-``depth``
    color is the depth-``depth`` ancestor of ``color``.  With ``depth`` at
    least ``table.rounds`` (the default) it defines the class of ``color``."""
    if table.arity != 2:
        raise ValueError("characteristic formulas exist for pair tables only")
    if not 0 <= color < table.num_colors:
        raise KeyError(f"unknown color {color}")
    if depth is None:
        depth = table.rounds
    if depth < 0:
        raise ValueError("depth must be >= 0")
    builder = getattr(table, "_char_builder", None)
    if builder is None:
        builder = _CharBuilder(table)
        object.__setattr__(table, "_char_builder", builder)
    rep = int(np.flatnonzero(table.flat == color)[0])
    return builder.chi(depth, int(builder.flat_at(depth)[rep]))
