"""FO2/FO3 formulas over binary relational signatures.

Concrete syntax (ASCII)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := or ("->" imp)?          right-associative
    or      := and ("|" and)*
    and     := unary ("&" unary)*
    unary   := "~" unary | "E" var "." unary | "A" var "." unary
             | NAME "(" var "," var ")" | var "=" var | "(" formula ")"
    var     := "x" | "y" | "z"

``E`` and ``A`` double as relation names: ``E(x,y)`` is an atom because the
name is followed by ``(``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

FO2 = "FO2"
FO3 = "FO3"
VARIABLES = ("x", "y", "z")
_VAR_INDEX = {"x": 0, "y": 1, "z": 2}


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, msg, pos, text):
        super().__init__(f"{msg} at offset {pos}: {text[max(0, pos - 10):pos + 10]!r}")
        self.pos = pos


class EvaluationError(FormulaError):
    pass


# -- abstract syntax ---------------------------------------------------------

class Formula:
    __slots__ = ()

    def __str__(self):
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    rel: str
    left: str
    right: str


@dataclass(frozen=True)
class Equals(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
FALSE = Not(Equals("x", "x"))
TRUE = Equals("x", "x")


def conjunction(parts):
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disjunction(parts):
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def _children(f):
    if isinstance(f, (Atom, Equals)):
        return ()
    if isinstance(f, (Not, Exists, Forall)):
        return (f.body,)
    return (f.left, f.right)


def _walk_dag(f):
    """Each distinct node object once (formulas may share subtrees)."""
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        yield g
        stack.extend(_children(g))


def variables(f):
    out = set()
    for g in _walk_dag(f):
        if isinstance(g, Atom | Equals):
            out.update((g.left, g.right))
        elif isinstance(g, Exists | Forall):
            out.add(g.var)
    return out


def relation_names(f):
    return {g.rel for g in _walk_dag(f) if isinstance(g, Atom)}


def free_variables(f, _memo=None):
    memo = {} if _memo is None else _memo
    key = id(f)
    if key in memo:
        return memo[key]
    if isinstance(f, (Atom, Equals)):
        out = frozenset((f.left, f.right))
    elif isinstance(f, (Exists, Forall)):
        out = free_variables(f.body, memo) - {f.var}
    else:
        out = frozenset().union(*(free_variables(c, memo) for c in _children(f)))
    memo[key] = out
    return out


def dag_size(f):
    return sum(1 for _ in _walk_dag(f))


def quantifier_depth(f):
    if isinstance(f, (Atom, Equals)):
        return 0
    if isinstance(f, (Exists, Forall)):
        return 1 + quantifier_depth(f.body)
    return max(quantifier_depth(c) for c in _children(f))


def check_mode(f, mode):
    if mode == FO2 and "z" in variables(f):
        raise FormulaError("variable z is not allowed in FO2 mode")


# -- parser ------------------------------------------------------------------

_TOKEN_RE = re.compile(r"\s*(?:(<->|->|[~&|().,=])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokenize(text):
    toks = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise FormulaSyntaxError("unknown token", pos, text)
        start = m.start(1) if m.group(1) else m.start(2)
        toks.append((m.group(1) or m.group(2), start))
        pos = m.end()
    toks.append(("<eof>", len(text)))
    return toks


class _Parser:
    def __init__(self, text, mode):
        self.text = text
        self.mode = mode
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)][0]

    def error(self, msg):
        raise FormulaSyntaxError(msg, self.toks[self.i][1], self.text)

    def take(self, expected=None):
        tok = self.peek()
        if expected is not None and tok != expected:
            self.error(f"expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def var(self):
        tok = self.peek()
        if tok not in _VAR_INDEX:
            self.error(f"expected a variable, got {tok!r}")
        if tok == "z" and self.mode == FO2:
            self.error("variable z is not allowed in FO2 mode")
        return self.take()

    def parse(self):
        f = self.iff()
        if self.peek() != "<eof>":
            self.error(f"unexpected {self.peek()!r}")
        return f

    def iff(self):
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = Iff(f, self.imp())
        return f

    def imp(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(f, self.imp())
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek() == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self):
        tok = self.peek()
        if tok == "~":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if tok in ("E", "A") and self.peek(1) in _VAR_INDEX and self.peek(2) == ".":
            self.take()
            v = self.var()
            self.take(".")
            body = self.unary()
            return Exists(v, body) if tok == "E" else Forall(v, body)
        if tok in _VAR_INDEX and self.peek(1) == "=":
            left = self.var()
            self.take("=")
            return Equals(left, self.var())
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) and self.peek(1) == "(":
            self.take()
            self.take("(")
            left = self.var()
            self.take(",")
            right = self.var()
            self.take(")")
            return Atom(tok, left, right)
        self.error(f"unexpected {tok!r}")


def parse_formula(text: str, mode: str = FO2) -> Formula:
    if mode not in (FO2, FO3):
        raise ValueError(f"mode must be {FO2} or {FO3}")
    return _Parser(text, mode).parse()


# -- printer -----------------------------------------------------------------

def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f"{f.rel}({f.left},{f.right})"
    if isinstance(f, Equals):
        return f"{f.left}={f.right}"
    if isinstance(f, Not):
        return "~" + print_formula(f.body)
    if isinstance(f, Exists):
        return f"E {f.var} . {print_formula(f.body)}"
    if isinstance(f, Forall):
        return f"A {f.var} . {print_formula(f.body)}"
    op = BINARY[type(f)]
    return f"({print_formula(f.left)} {op} {print_formula(f.right)})"


# -- evaluation --------------------------------------------------------------

def _prepare(s, f, asg):
    missing = relation_names(f) - set(s.relations)
    if missing:
        raise EvaluationError(f"unknown relation name(s): {sorted(missing)}")
    env = [None, None, None]
    for v, val in (asg or {}).items():
        if v not in _VAR_INDEX:
            raise EvaluationError(f"not a variable: {v!r}")
        if not 0 <= val < s.size:
            raise EvaluationError(f"{v}={val} outside universe of size {s.size}")
        env[_VAR_INDEX[v]] = int(val)
    unbound = [v for v in free_variables(f) if env[_VAR_INDEX[v]] is None]
    if unbound:
        raise EvaluationError(f"unassigned free variable(s): {sorted(unbound)}")
    return tuple(env)


class _Evaluator:
    # Memoised on (node identity, relevant variable values) so that shared
    # subformulas are evaluated once per assignment.

    def __init__(self, s):
        self.s = s
        self.rels = {k: v for k, v in s.relations.items()}
        self.memo = {}
        self.fv = {}

    def __call__(self, f, env):
        fv = free_variables(f, self.fv)
        key = (id(f),) + tuple(env[_VAR_INDEX[v]] if v in fv else None for v in VARIABLES)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        val = self._eval(f, env)
        self.memo[key] = val
        return val

    def _eval(self, f, env):
        if isinstance(f, Atom):
            return (env[_VAR_INDEX[f.left]], env[_VAR_INDEX[f.right]]) in self.rels[f.rel]
        if isinstance(f, Equals):
            return env[_VAR_INDEX[f.left]] == env[_VAR_INDEX[f.right]]
        if isinstance(f, Not):
            return not self(f.body, env)
        if isinstance(f, And):
            return self(f.left, env) and self(f.right, env)
        if isinstance(f, Or):
            return self(f.left, env) or self(f.right, env)
        if isinstance(f, Implies):
            return (not self(f.left, env)) or self(f.right, env)
        if isinstance(f, Iff):
            return self(f.left, env) == self(f.right, env)
        if isinstance(f, (Exists, Forall)):
            k = _VAR_INDEX[f.var]
            want = isinstance(f, Exists)
            for val in range(self.s.size):
                env2 = env[:k] + (val,) + env[k + 1:]
                if self(f.body, env2) == want:
                    return want
            return not want
        raise TypeError(f"not a formula: {f!r}")


def evaluate(s, f: Formula, asg=None) -> bool:
    """Truth of ``f`` in ``s`` under the assignment ``asg`` (dict var -> element)."""
    env = _prepare(s, f, asg)
    return _Evaluator(s)(f, env)


def satisfying_pairs(s, f: Formula):
    """All (a, b) with ``s |= f[x:=a, y:=b]``; shares work across assignments."""
    if not free_variables(f) <= {"x", "y"}:
        raise EvaluationError("formula has free variables outside {x, y}")
    _prepare(s, f, {"x": 0, "y": 0})
    ev = _Evaluator(s)
    return {(a, b) for a in range(s.size) for b in range(s.size) if ev(f, (a, b, None))}
