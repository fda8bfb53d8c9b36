"""Transitive companions of finite binary structures.

Given M, build N on ``{(class, g)}`` with g in an odd cyclic group Z_n and
give the pair ``((u, g), (v, h))`` the 2-type ``lambda_{u,v}(h - g)``.  The
lambda maps are surjective onto the types realized between the two classes,
respect converses (``lambda_{u,v}(g)`` is the converse of
``lambda_{v,u}(-g)``) and send 0 to the identity type on a class.  Shifting
every group coordinate by a constant is then an automorphism of N, so N is
transitive, and linking equal types gives a 2-isomorphism M ~ N.

A one-element class contributes a single element (its only self-type is the
identity, so it cannot be spread over the group); every lambda map touching
it is constant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .automorphism import check_transitive
from .equivalence import PartialIso2, verify_iso2
from .refine import refine_pairs, type_view
from .structures import FinStructure


class CompanionError(RuntimeError):
    def __init__(self, msg, violations=()):
        super().__init__(msg)
        self.violations = list(violations)


@dataclass(frozen=True)
class CyclicGroup:
    modulus: int

    def __post_init__(self):
        if self.modulus < 1 or self.modulus % 2 == 0:
            raise ValueError(f"modulus must be odd and positive, got {self.modulus}")

    @property
    def elements(self):
        return range(self.modulus)

    def add(self, g, h):
        return (g + h) % self.modulus

    def neg(self, g):
        return (-g) % self.modulus

    def sub(self, h, g):
        return (h - g) % self.modulus

    @property
    def positive(self):
        """P with P, -P and {0} partitioning the group."""
        return tuple(range(1, (self.modulus - 1) // 2 + 1))


@dataclass(frozen=True)
class LambdaSystem:
    group: CyclicGroup
    maps: dict  # (u, v) -> tuple of colors indexed by group element

    def __call__(self, u, v, g):
        return self.maps[(u, v)][g % self.group.modulus]

    def problems(self, view):
        """Violations of surjectivity, the converse law and the identity law."""
        out = []
        grp = self.group
        for (u, v), lam in sorted(self.maps.items()):
            if set(lam) != set(view.types_between[(u, v)]):
                out.append(f"lambda[{u},{v}] not onto types between the classes")
            for g in grp.elements:
                if lam[g] != view.converse[self.maps[(v, u)][grp.neg(g)]]:
                    out.append(f"converse law fails at lambda[{u},{v}]({g})")
                    break
            if u == v:
                if lam[0] != view.identity_of[u]:
                    out.append(f"lambda[{u},{u}](0) is not the identity type")
                if not view.singleton(u) and any(view.is_identity(c) for c in lam[1:]):
                    out.append(f"lambda[{u},{u}] hits the identity type off 0")
        return out


@dataclass
class CompanionResult:
    companion: FinStructure
    witness: PartialIso2
    element_map: list  # companion index -> (class id, group element)
    lam: LambdaSystem
    view: object
    report: dict = field(default_factory=dict)


def _t_max(view):
    big = [u for u in range(len(view.classes)) if not view.singleton(u)]
    return max((len(view.types_between[(u, v)]) for u in big for v in big), default=0)


def choose_group(view) -> CyclicGroup:
    n = max(3, 2 * _t_max(view))
    if n % 2 == 0:
        n += 1
    return CyclicGroup(n)


def build_lambda(view, group: CyclicGroup) -> LambdaSystem:
    k = len(view.classes)
    n = group.modulus
    maps = {}
    for u in range(k):
        for v in range(k):
            if view.singleton(u) or view.singleton(v):
                types = view.types_between[(u, v)]
                if len(types) != 1:
                    raise CompanionError(f"classes {u},{v}: singleton pair realizes {len(types)} types")
                maps[(u, v)] = (types[0],) * n
            elif n < 2 * len(view.types_between[(u, v)]):
                raise CompanionError(f"group of size {n} too small for classes {u},{v} (g1)")
    for u in range(k):
        if view.singleton(u):
            continue
        for v in range(u + 1, k):
            if view.singleton(v):
                continue
            types = view.types_between[(u, v)]
            lam = tuple(types[g % len(types)] for g in range(n))
            maps[(u, v)] = lam
            maps[(v, u)] = tuple(view.converse[lam[group.neg(g)]] for g in range(n))
        own = view.types_between[(u, u)]
        sym = [c for c in own if view.is_symmetric(c) and c != view.identity_of[u]]
        asym = [c for c in own if not view.is_symmetric(c) and c < view.converse[c]]
        targets = sorted(sym + asym)
        lam = [None] * n
        lam[0] = view.identity_of[u]
        for i, g in enumerate(group.positive):
            lam[g] = targets[i % len(targets)]
            lam[group.neg(g)] = view.converse[lam[g]]
        maps[(u, u)] = tuple(lam)
    system = LambdaSystem(group, maps)
    problems = system.problems(view)
    if problems:
        raise CompanionError("lambda system is inconsistent", problems)
    return system


def build_companion(m: FinStructure, verify=True) -> CompanionResult:
    table = refine_pairs(m)
    view = type_view(table)
    group = choose_group(view)
    lam = build_lambda(view, group)
    n = group.modulus

    element_map = []
    for u in range(len(view.classes)):
        element_map.extend((u, g) for g in ([0] if view.singleton(u) else range(n)))
    size = len(element_map)

    def ty(p, q):
        (u, g), (v, h) = element_map[p], element_map[q]
        return lam(u, v, h - g)

    types = [[ty(p, q) for q in range(size)] for p in range(size)]
    rels = {}
    for rname in m.signature:
        rels[rname] = {(p, q) for p in range(size) for q in range(size)
                       if table.atomic[types[p][q]].holds(rname)}
    name = f"{m.name}_companion"
    comp = FinStructure(name, size, rels)

    elems = frozenset((a, p) for a in range(m.size) for p in range(size)
                      if view.class_of[a] == element_map[p][0])
    n_by_type = {}
    for p in range(size):
        for q in range(size):
            n_by_type.setdefault(types[p][q], []).append((p, q))
    links = set()
    for c, pairs in view.pair_classes.items():
        for ab in pairs:
            for pq in n_by_type.get(c, ()):
                links.add((ab, pq))
    witness = PartialIso2(elems, frozenset(links))

    result = CompanionResult(comp, witness, element_map, lam, view)
    result.report = {
        "group_modulus": n,
        "class_sizes": [len(c) for c in view.classes],
        "t_max": _t_max(view),
        "companion_size": size,
        "verified": False,
        "violations": [],
    }
    if verify:
        violations = [str(v) for v in verify_iso2(witness, m, comp).violations]
        t1 = [(p, q) for p in range(size) for q in range(size)
              if types[p][q] != view.converse[types[q][p]]]
        violations += [f"(t1) ty{pq} is not the converse of its reverse" for pq in t1[:10]]
        trans = check_transitive(comp)
        if not trans:
            violations.append(f"companion not transitive, witness {trans.witness}")
        result.report["violations"] = violations
        result.report["verified"] = not violations
        if violations:
            raise CompanionError(f"companion of {m.name} failed verification", violations)
    return result


@dataclass(frozen=True)
class HomogeneityDecision:
    holds: bool
    witness: tuple = None  # (a, b, c): no d with type(a,c) == type(b,d)

    def __bool__(self):
        return self.holds


def check_homogeneous(m: FinStructure) -> HomogeneityDecision:
    cols = refine_pairs(m).colors(0)
    n = m.size
    rows = [set(cols[a].tolist()) for a in range(n)]
    for a in range(n):
        for b in range(n):
            if a != b and cols[a, a] == cols[b, b] and rows[a] != rows[b]:
                c = next(c for c in range(n) if int(cols[a, c]) not in rows[b])
                return HomogeneityDecision(False, (a, b, c))
    return HomogeneityDecision(True)
