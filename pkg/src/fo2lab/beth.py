"""Cutting 2-types, flipping, transfer and explicit definitions on finite models.

Everything here works one model at a time.  Whether a definition is
explicit over a whole theory (all of its models) is not decided here.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import SimpleNamespace

from .automorphism import check_transitive
from .equivalence import PartialIso2, build_iso2, verify_iso2
from .refine import characteristic_formula, refine_pairs, type_view
from .structures import FinStructure, converse_pairs, expand_with_relation, fresh_name
from .syntax import (FO2, Atom, Forall, Iff, check_mode, disjunction, evaluate, free_variables,
                     parse_formula, relation_names)

BRUTE_MAX_SIZE = 4
TYPE_UNION_CAP = 2**20


class BethError(ValueError):
    pass


class CapExceeded(RuntimeError):
    pass


# -- problems ------------------------------------------------------------------

@dataclass(frozen=True)
class DefinitionProblem:
    theory: tuple
    sigma: tuple
    defines: str

    def __post_init__(self):
        object.__setattr__(self, "theory", tuple(self.theory))
        object.__setattr__(self, "sigma", tuple(self.sigma))
        for f in self.theory + self.sigma:
            check_mode(f, FO2)
            if free_variables(f):
                raise BethError(f"not a sentence (free {sorted(free_variables(f))}): {f}")
        for f in self.theory:
            if self.defines in relation_names(f):
                raise BethError(f"defined symbol {self.defines} occurs in the theory: {f}")

    @property
    def base_signature(self):
        names = set()
        for f in self.theory + self.sigma:
            names |= relation_names(f)
        return tuple(sorted(names - {self.defines}))


def parse_definition(text: str) -> DefinitionProblem:
    blocks = {"theory": [], "sigma": []}
    current = None
    defines = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line in ("theory:", "sigma:"):
            current = line[:-1]
            continue
        if line.startswith("defines:"):
            defines = line.split(":", 1)[1].strip()
            current = None
            continue
        if current is None:
            raise BethError(f"line {lineno}: formula outside a 'theory:' or 'sigma:' block")
        blocks[current].append(parse_formula(line, FO2))
    if not defines:
        raise BethError("missing 'defines: R' line")
    return DefinitionProblem(tuple(blocks["theory"]), tuple(blocks["sigma"]), defines)


# -- cuts ----------------------------------------------------------------------

def _check_pairs(m, r):
    r = frozenset((int(a), int(b)) for a, b in r)
    for a, b in r:
        if not (0 <= a < m.size and 0 <= b < m.size):
            raise BethError(f"pair ({a},{b}) outside universe of size {m.size}")
    return r


def cuts_types(m: FinStructure, r, table=None):
    """Smallest color whose class meets both ``r`` and its complement, or None."""
    r = _check_pairs(m, r)
    table = table or refine_pairs(m)
    cols = table.colors(0)
    inside, outside = set(), set()
    for a in range(m.size):
        for b in range(m.size):
            (inside if (a, b) in r else outside).add(int(cols[a, b]))
    cut = inside & outside
    return min(cut) if cut else None


@dataclass(frozen=True)
class CutContext:
    structure: FinStructure
    relation: frozenset
    view: object
    color: int
    t: frozenset

    @property
    def converse_color(self):
        return self.view.converse[self.color]


def cut_context(m: FinStructure, r, color=None, table=None) -> CutContext:
    r = _check_pairs(m, r)
    table = table or refine_pairs(m)
    view = type_view(table)
    if color is None:
        color = cuts_types(m, r, table)
        if color is None:
            raise BethError("relation does not cut any 2-type")
    if color not in view.pair_classes:
        raise BethError(f"unknown color {color}")
    return CutContext(m, r, view, color, frozenset(view.pair_classes[color]))


def flip_relation(ctx: CutContext) -> frozenset:
    r, t = ctx.relation, ctx.t
    if not (t & r) or not (t - r):
        raise BethError(f"relation does not cut color {ctx.color}")
    r_inv = converse_pairs(r)
    t_r = t & r
    if ctx.converse_color != ctx.color or t_r == converse_pairs(t_r):
        s = (r - t) | (t - r)
    else:
        s = (r - (t_r - r_inv)) | ((t & r_inv) - r)
    assert s != r and (r ^ s) <= t
    return frozenset(s)


def reverse_patterns(ctx: CutContext):
    """Realized (R(p), R(p^-1)) patterns over p in t."""
    r = ctx.relation
    return sorted({((a, b) in r, (b, a) in r) for a, b in ctx.t})


def double_cut(ctx: CutContext):
    """T differs from its converse and r cuts both.

    Flipping t alone then changes the set of reverse patterns, and the
    link set J can fail; ``pattern_flip`` handles this case."""
    if ctx.converse_color == ctx.color:
        return False
    inv = frozenset(ctx.view.pair_classes[ctx.converse_color])
    return bool(inv & ctx.relation) and bool(inv - ctx.relation)


def pattern_flip(ctx: CutContext) -> frozenset:
    """Like ``flip_relation`` but safe when r cuts both T and its converse.

    Outside that case it returns ``flip_relation(ctx)``.  Inside it, two
    realized reverse patterns that differ in the first coordinate are
    exchanged over t and its inverse; the set of patterns met from every
    element stays the same, so J links every pair to a partner again."""
    if not double_cut(ctx):
        return flip_relation(ctx)
    r = ctx.relation
    pats = reverse_patterns(ctx)
    p1 = pats[0]
    p2 = next(p for p in pats if p[0] != p1[0])
    swap = {p1: p2, p2: p1}
    s = set(r - ctx.t - converse_pairs(ctx.t))
    for a, b in ctx.t:
        here, back = swap.get(((a, b) in r, (b, a) in r), ((a, b) in r, (b, a) in r))
        if here:
            s.add((a, b))
        if back:
            s.add((b, a))
    s = frozenset(s)
    assert s != r
    return s


class NotTransitive(BethError):
    pass


def flip_witness(m: FinStructure, r, s, table=None) -> PartialIso2:
    """The link set J between <m, r> and <m, s>: equal types, and agreeing
    membership of the pair and of its reverse."""
    table = table or refine_pairs(m)
    cols = table.colors(0)
    n = m.size
    elems = frozenset((a, b) for a in range(n) for b in range(n) if cols[a, a] == cols[b, b])
    by_color = {}
    for a in range(n):
        for b in range(n):
            key = (int(cols[a, b]), (a, b) in s, (b, a) in s)
            by_color.setdefault(key, []).append((a, b))
    links = set()
    for a in range(n):
        for b in range(n):
            key = (int(cols[a, b]), (a, b) in r, (b, a) in r)
            for q in by_color.get(key, ()):
                links.add(((a, b), q))
    return PartialIso2(elems, frozenset(links))


def flip_preserves_equivalence(m: FinStructure, r, s, color=None, table=None, check=True):
    """Verify that J is a 2-isomorphism between <m, r> and <m, s>.

    Requires m transitive.  The report is empty when r is invariant under
    the automorphisms of m and does not cut an identity type; ``color``
    is accepted for symmetry with ``flip_relation`` and does not change J.
    """
    r, s = _check_pairs(m, r), _check_pairs(m, s)
    if check:
        trans = check_transitive(m)
        if not trans:
            raise NotTransitive(f"structure is not transitive, witness {trans.witness}")
    j = flip_witness(m, r, s, table)
    name = fresh_name(m, "R")
    return verify_iso2(j, expand_with_relation(m, name, r), expand_with_relation(m, name, s))


# -- transfer ------------------------------------------------------------------

def transfer_relation(m: FinStructure, mbar: FinStructure, rbar, table=None) -> frozenset:
    rbar = _check_pairs(mbar, rbar)
    table = table or refine_pairs([m, mbar])
    dm, dn = table.diag_colors(0), table.diag_colors(1)
    if set(dm.tolist()) != set(dn.tolist()):
        raise BethError("structures are not 2-equivalent")
    cm, cn = table.colors(0), table.colors(1)
    inside = {int(cn[c, d]) for c, d in rbar}
    for c in range(mbar.size):
        for d in range(mbar.size):
            if int(cn[c, d]) in inside and (c, d) not in rbar:
                raise BethError(f"relation cuts a 2-type of the second structure at ({c},{d})")
    r = frozenset((a, b) for a in range(m.size) for b in range(m.size) if int(cm[a, b]) in inside)
    if cuts_types(m, r) is not None:
        raise AssertionError("transferred relation cuts a 2-type")
    return r


def transfer_witness_report(m, mbar, r, rbar, table=None):
    """Check that the 2-isomorphism between m and mbar still works once r and
    rbar are added under a common name."""
    table = table or refine_pairs([m, mbar])
    iso = build_iso2(m, mbar, table)
    if iso is None:
        raise BethError("structures are not 2-equivalent")
    name = fresh_name(m, "R")
    if name in mbar.relations:
        name = fresh_name(mbar, name)
    return verify_iso2(iso, expand_with_relation(m, name, r), expand_with_relation(mbar, name, rbar))


# -- explicit definitions --------------------------------------------------------

def synthesize_explicit(m: FinStructure, r, table=None):
    """phi(x, y) over the base signature with ``r = phi(m)``, or None if r
    cuts a 2-type (no FO2 formula can then define it on m)."""
    r = _check_pairs(m, r)
    table = table or refine_pairs(m)
    if cuts_types(m, r, table) is not None:
        return None
    cols = table.colors(0)
    inside = sorted({int(cols[a, b]) for a, b in r})
    return disjunction([characteristic_formula(table, c) for c in inside])


def definition_check_sentence(rel_name, phi):
    return Forall("x", Forall("y", Iff(Atom(rel_name, "x", "y"), phi)))


# -- solution search -------------------------------------------------------------

@dataclass
class SolutionSet:
    solutions: list
    classification: str  # none | unique | multiple
    mode: str
    candidates: int
    note: str


def _satisfies(m, rel_name, rel, sentences):
    rels = dict(m.relations)
    rels[rel_name] = rel
    view = SimpleNamespace(size=m.size, relations=rels)
    return all(evaluate(view, f) for f in sentences)


def search_solutions(problem: DefinitionProblem, m: FinStructure, mode="brute", cap=None):
    if problem.defines in m.relations:
        raise BethError(f"model already interprets {problem.defines}")
    missing = set(problem.base_signature) - set(m.relations)
    if missing:
        raise BethError(f"model lacks relation(s) {sorted(missing)}")
    for f in problem.theory:
        if not evaluate(m, f):
            raise BethError(f"model does not satisfy theory sentence {f}")
    n = m.size
    if mode == "brute":
        if n > BRUTE_MAX_SIZE:
            raise CapExceeded(f"brute mode needs |M| <= {BRUTE_MAX_SIZE}, got {n}")
        cells = [(a, b) for a in range(n) for b in range(n)]
        candidates = (frozenset(c for i, c in enumerate(cells) if mask >> i & 1)
                      for mask in range(1 << len(cells)))
        total = 1 << len(cells)
        note = "exhaustive over all relations on the model"
    elif mode == "type-union":
        table = refine_pairs(m)
        view = type_view(table)
        colors = sorted(view.pair_classes)
        total = 1 << len(colors)
        limit = TYPE_UNION_CAP if cap is None else cap
        if total > limit:
            raise CapExceeded(f"{total} type unions exceed cap {limit}")
        classes = [frozenset(view.pair_classes[c]) for c in colors]
        candidates = (frozenset().union(*(classes[i] for i in range(len(classes)) if mask >> i & 1))
                      for mask in range(total))
        note = ("exhaustive over relations that are unions of 2-type classes only; "
                "complete for transitive models (such solutions never cut 2-types)")
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sols = [rel for rel in candidates if _satisfies(m, problem.defines, rel, problem.sigma)]
    sols.sort(key=lambda rel: sorted(rel))
    kind = "none" if not sols else "unique" if len(sols) == 1 else "multiple"
    return SolutionSet(sols, kind, mode, total, note)
