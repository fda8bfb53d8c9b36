"""``fo2lab`` command line.

Exit codes: 0 affirmative or success, 1 negative decision, 2 usage or input
error, 3 budget or cap exceeded.  ``--json`` prints a JSON document instead
of text; on subcommands it may also be given a path, in which case the JSON
goes to that file and the text to stdout.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from . import __version__
from .adn import verify_adn
from .automorphism import check_31_transitive, check_transitive, find_automorphism, orbits
from .beth import (BethError, CapExceeded, cut_context, cuts_types, flip_preserves_equivalence,
                   flip_relation, parse_definition, pattern_flip, search_solutions, synthesize_explicit,
                   transfer_relation, transfer_witness_report)
from .companion import CompanionError, build_companion, check_homogeneous
from .equivalence import build_iso2, equiv2, equiv3, parse_iso, verify_iso2, write_iso
from .refine import BudgetExceeded, DEFAULT_TRIPLE_BUDGET, characteristic_formula, refine_pairs, \
    refine_triples, type_view
from .structures import StructureError, drop_relation, expand_with_relation, load_structure, \
    save_structure
from .syntax import FO2, FO3, FormulaError, dag_size, evaluate, parse_formula, print_formula

OK, NO, ERROR, BUDGET = 0, 1, 2, 3
MAX_PRINT_DEPTH = 3


class UsageError(ValueError):
    pass


# -- output --------------------------------------------------------------------

class Output:
    def __init__(self, args):
        self.target = getattr(args, "json", None)
        self.lines = []

    def line(self, text=""):
        self.lines.append(str(text))

    def emit(self, payload):
        if self.target == "-":
            print(json.dumps(payload, indent=2, sort_keys=True))
            return
        if self.target:
            with open(self.target, "w", encoding="utf-8") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        for text in self.lines:
            print(text)


def _pairs_text(rel):
    return " ".join(f"{a}:{b}" for a, b in sorted(rel)) or "(empty)"


def _pairs_json(rel):
    return [list(p) for p in sorted(rel)]


def _violation_lines(out, report, limit=20):
    for v in report.violations[:limit]:
        out.line(f"({v.clause}) {v.message}")
    if len(report.violations) > limit:
        out.line(f"... {len(report.violations) - limit} more")


def _split_relation(m, name):
    if name not in m.relations:
        raise UsageError(f"structure {m.name} has no relation {name}")
    return drop_relation(m, name), m.relations[name]


# -- subcommands ---------------------------------------------------------------

def cmd_types(args):
    m = load_structure(args.file)
    out = Output(args)
    if args.arity == 3:
        table = refine_triples(m, budget=args.budget)
        sizes = table.class_sizes()
        colors = [{"id": c, "size": sizes[c]} for c in sorted(sizes)]
        for c in colors:
            out.line(f"color {c['id']} arity=3 size={c['size']}")
        out.emit({"arity": 3, "rounds": table.rounds, "colors": colors})
        return OK
    table = refine_pairs(m)
    sizes = table.class_sizes()
    colors = []
    for c in sorted(sizes):
        atoms = table.atomic_of(c).signed_atoms()
        colors.append({"id": c, "size": sizes[c], "atomic": atoms})
        out.line(f"color {c} arity=2 size={sizes[c]} atomic={','.join(atoms)}")
    payload = {"arity": 2, "rounds": table.rounds, "colors": colors}
    if args.classes:
        view = type_view(table)
        payload["classes"] = []
        for u, elems in enumerate(view.classes):
            payload["classes"].append({"id": u, "color": view.class_color[u], "elements": list(elems)})
            out.line(f"class {u} color={view.class_color[u]} elements={','.join(map(str, elems))}")
    if args.formula is not None:
        if args.formula not in sizes:
            raise UsageError(f"no color {args.formula}")
        depth = table.rounds if args.depth is None else args.depth
        f = characteristic_formula(table, args.formula, depth)
        info = {"color": args.formula, "depth": depth, "dag_size": dag_size(f)}
        if depth <= args.max_print_depth:
            info["text"] = print_formula(f)
            out.line(f"formula color={args.formula} depth={depth}: {info['text']}")
        else:
            out.line(f"formula color={args.formula} depth={depth} dag_size={info['dag_size']} "
                     f"(not printed, depth > {args.max_print_depth})")
        payload["formula"] = info
    out.emit(payload)
    return OK


def cmd_equiv2(args):
    m, n = load_structure(args.a), load_structure(args.b)
    holds = equiv2(m, n)
    out = Output(args)
    out.line("2-equivalent" if holds else "not 2-equivalent")
    if holds and args.witness:
        with open(args.witness, "w", encoding="utf-8") as fh:
            fh.write(write_iso(build_iso2(m, n)))
        out.line(f"witness written to {args.witness}")
    out.emit({"equivalent": holds})
    return OK if holds else NO


def cmd_equiv3(args):
    m, n = load_structure(args.a), load_structure(args.b)
    holds = equiv3(m, n, budget=args.budget)
    out = Output(args)
    out.line("3-equivalent" if holds else "not 3-equivalent")
    out.emit({"equivalent": holds})
    return OK if holds else NO


def cmd_iso(args):
    m, n = load_structure(args.a), load_structure(args.b)
    with open(args.witness, encoding="utf-8") as fh:
        iso = parse_iso(fh.read())
    report = verify_iso2(iso, m, n)
    out = Output(args)
    _violation_lines(out, report)
    out.line(f"checked {report.checked_links} links, {len(report.violations)} violations")
    out.emit({"ok": report.ok, "checked_links": report.checked_links,
              "violations": [{"clause": v.clause, "message": v.message} for v in report.violations]})
    return OK if report.ok else NO


def cmd_companion(args):
    m = load_structure(args.file)
    out = Output(args)
    try:
        res = build_companion(m, verify=True)
        report, code = res.report, OK
    except CompanionError as exc:
        report = {"verified": False, "violations": exc.violations, "error": str(exc)}
        res, code = None, NO
    if res is not None:
        save_structure(res.companion, args.output)
        out.line(f"companion of {m.name}: {res.companion.size} elements over Z_{report['group_modulus']}, "
                  f"written to {args.output}")
        if args.witness:
            with open(args.witness, "w", encoding="utf-8") as fh:
                fh.write(write_iso(res.witness))
    for v in report["violations"]:
        out.line(f"violation: {v}")
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    out.emit(report)
    return code


def cmd_check(args):
    m = load_structure(args.file)
    if args.property == "homogeneous":
        dec = check_homogeneous(m)
    elif args.property == "transitive":
        dec = check_transitive(m)
    else:
        dec = check_31_transitive(m, budget=args.budget)
    out = Output(args)
    witness = list(dec.witness) if dec.witness is not None else None
    out.line(f"{args.property}: {'yes' if dec.holds else 'no'}")
    if witness:
        out.line("witness " + " ".join(map(str, witness)))
    out.emit({"property": args.property, "holds": dec.holds, "witness": witness})
    return OK if dec.holds else NO


def _parse_map(items, size):
    pins = []
    for item in items:
        try:
            a, b = (int(v) for v in item.split(":"))
        except ValueError:
            raise UsageError(f"bad --map entry {item!r}, expected a:b") from None
        if not (0 <= a < size and 0 <= b < size):
            raise UsageError(f"--map entry {item} outside universe of size {size}")
        pins.append((a, b))
    return pins


def cmd_aut(args):
    m = load_structure(args.file)
    out = Output(args)
    payload = {}
    code = OK
    if args.map:
        perm = find_automorphism(m, _parse_map(args.map, m.size))
        payload["automorphism"] = list(perm) if perm is not None else None
        out.line("automorphism " + " ".join(map(str, perm)) if perm is not None else "no automorphism")
        code = OK if perm is not None else NO
    if args.orbits or not args.map:
        orbs = orbits(m)
        payload["orbits"] = [list(o) for o in orbs]
        for o in orbs:
            out.line("orbit " + " ".join(map(str, o)))
    if not args.map:
        dec = check_transitive(m)
        payload["transitive"] = dec.holds
        payload["witness"] = list(dec.witness) if dec.witness else None
        out.line(f"transitive: {'yes' if dec.holds else 'no'}")
        code = OK if dec.holds else NO
    out.emit(payload)
    return code


def _parse_assign(items):
    asg = {}
    for item in items:
        var, _, val = item.partition("=")
        if var not in ("x", "y", "z") or not val.isdigit():
            raise UsageError(f"bad --assign entry {item!r}, expected x=<element>")
        asg[var] = int(val)
    return asg


def cmd_eval(args):
    m = load_structure(args.file)
    f = parse_formula(args.formula, args.mode)
    holds = evaluate(m, f, _parse_assign(args.assign))
    out = Output(args)
    out.line("true" if holds else "false")
    out.emit({"value": holds})
    return OK if holds else NO


def cmd_beth_solve(args):
    with open(args.problem, encoding="utf-8") as fh:
        problem = parse_definition(fh.read())
    m = load_structure(args.model)
    out = Output(args)
    if args.mode == "type-union" and not check_transitive(m):
        print("warning: model is not transitive; type-union search may miss solutions", file=sys.stderr)
    res = search_solutions(problem, m, mode=args.mode, cap=args.cap)
    out.line(f"{len(res.solutions)} solution(s) among {res.candidates} candidates: {res.classification}")
    for rel in res.solutions:
        out.line(f"{problem.defines} = {_pairs_text(rel)}")
    out.line(f"note: {res.note}")
    out.emit({"classification": res.classification, "mode": res.mode, "candidates": res.candidates,
              "solutions": [_pairs_json(r) for r in res.solutions], "note": res.note})
    return OK if res.classification == "unique" else NO


def cmd_beth_synth(args):
    m, r = _split_relation(load_structure(args.model), args.rel)
    phi = synthesize_explicit(m, r)
    out = Output(args)
    if phi is None:
        cut = cuts_types(m, r)
        out.line(f"{args.rel} cuts color {cut}; no explicit definition on this model")
        out.emit({"defined": False, "cut_color": cut})
        return NO
    text = print_formula(phi)
    out.line(text)
    out.emit({"defined": True, "formula": text, "dag_size": dag_size(phi)})
    return OK


def cmd_beth_flip(args):
    m, r = _split_relation(load_structure(args.model), args.rel)
    out = Output(args)
    color = args.type if args.type is not None else cuts_types(m, r)
    if color is None:
        out.line(f"{args.rel} cuts no 2-type")
        out.emit({"cut_color": None})
        return NO
    ctx = cut_context(m, r, color)
    s = pattern_flip(ctx) if args.pattern else flip_relation(ctx)
    report = flip_preserves_equivalence(m, r, s, color)
    out.line(f"cut color {color}; flipped relation: {_pairs_text(s)}")
    _violation_lines(out, report)
    out.line(f"checked {report.checked_links} links, {len(report.violations)} violations")
    out.emit({"cut_color": color, "flipped": _pairs_json(s), "checked_links": report.checked_links,
              "violations": [{"clause": v.clause, "message": v.message} for v in report.violations]})
    return OK if report.ok else NO


def cmd_beth_transfer(args):
    m = load_structure(args.m)
    mbar, rbar = _split_relation(load_structure(args.mbar), args.rel)
    r = transfer_relation(m, mbar, rbar)
    report = transfer_witness_report(m, mbar, r, rbar)
    out = Output(args)
    out.line(f"{args.rel} = {_pairs_text(r)}")
    out.line(f"extended witness: {report.checked_links} links, {len(report.violations)} violations")
    if args.output:
        save_structure(expand_with_relation(m, args.rel, r), args.output)
    out.emit({"relation": _pairs_json(r), "violations": len(report.violations)})
    return OK if report.ok else NO


def cmd_counterexample(args):
    out = Output(args)
    if args.action == "build":
        from .adn import build_adn_model

        m = build_adn_model()
        save_structure(m, args.output)
        out.line(f"wrote {m.name} ({m.size} elements) to {args.output}")
        out.emit({"size": m.size, "path": args.output})
        return OK
    report = verify_adn(triple_budget=args.budget)
    for key, val in report["checks"].items():
        out.line(f"{key}: {'ok' if val else 'FAILED'}")
    out.line(f"orbits: {report['orbit_count']} of sizes {report['orbit_sizes']}")
    for c in report["conclusions"]:
        out.line(f"conclusion: {c}")
    out.emit(report)
    return OK if report["ok"] else NO


def cmd_selftest(args):
    from .corpus import fixture_corpus, random_corpus

    corpus = random_corpus(seed=args.seed, count=args.count) + fixture_corpus()
    out = Output(args)
    failures = []
    for m in corpus:
        try:
            res = build_companion(m)
        except CompanionError as exc:
            failures.append(f"{m.name}: companion {exc}")
            continue
        if not equiv2(m, res.companion):
            failures.append(f"{m.name}: companion not 2-equivalent")
        if not check_homogeneous(m):
            failures.append(f"{m.name}: not 2-homogeneous")
        table = refine_pairs(m)
        cols = table.colors(0)
        for c in sorted(table.color_set()):
            cls = {(a, b) for a in range(m.size) for b in range(m.size) if cols[a, b] == c}
            phi = synthesize_explicit(m, cls, table)
            if phi is None or cls != _sat(m, phi):
                failures.append(f"{m.name}: synthesis fails for color {c}")
    for f in failures:
        out.line(f"FAIL {f}")
    out.line(f"selftest seed={args.seed}: {len(corpus)} structures, {len(failures)} failures")
    out.emit({"seed": args.seed, "structures": len(corpus), "failures": failures})
    return OK if not failures else NO


def _sat(m, phi):
    from .syntax import satisfying_pairs

    return satisfying_pairs(m, phi)


# -- parser --------------------------------------------------------------------

def _common(global_level):
    p = argparse.ArgumentParser(add_help=False)
    if global_level:
        p.add_argument("--json", action="store_const", const="-", default=None,
                       help="print a JSON document instead of text")
        p.add_argument("--threads", type=int, default=1,
                       help="worker threads (computations are single-threaded; output never depends on it)")
        p.add_argument("--seed", type=int, default=0, help="seed for generated corpora (default 0)")
    else:
        sup = argparse.SUPPRESS
        p.add_argument("--json", nargs="?", const="-", default=sup, metavar="PATH",
                       help="JSON output, to stdout or to PATH")
        p.add_argument("--threads", type=int, default=sup, help=argparse.SUPPRESS)
        p.add_argument("--seed", type=int, default=sup, help=argparse.SUPPRESS)
    return p


def build_parser():
    common = _common(False)
    parser = argparse.ArgumentParser(prog="fo2lab", parents=[_common(True)],
                                     description="Two-variable logic toolkit for finite binary structures.")
    parser.add_argument("--version", action="version", version=f"fo2lab {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, parents=(common,)):
        p = sub.add_parser(name, help=help_text, description=help_text, parents=list(parents))
        p.set_defaults(func=func)
        return p

    p = add("types", cmd_types, "print stable pair (or triple) colors of a structure")
    p.add_argument("file")
    p.add_argument("--arity", type=int, choices=(2, 3), default=2)
    p.add_argument("--classes", action="store_true", help="also print the element classes")
    p.add_argument("--formula", type=int, metavar="COLOR", help="characteristic formula of COLOR")
    p.add_argument("--depth", type=int, help="formula depth (default: stabilization round)")
    p.add_argument("--max-print-depth", type=int, default=MAX_PRINT_DEPTH,
                   help=f"print formulas up to this depth, else report DAG size (default {MAX_PRINT_DEPTH})")
    p.add_argument("--budget", type=int, default=DEFAULT_TRIPLE_BUDGET, help="triple budget for --arity 3")

    p = add("equiv2", cmd_equiv2, "decide 2-variable equivalence (exit 0 yes, 1 no)")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--witness", metavar="OUT.iso", help="write a 2-isomorphism when equivalent")

    p = add("equiv3", cmd_equiv3, "decide 3-variable equivalence (exit 0 yes, 1 no, 3 budget)")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--budget", type=int, default=DEFAULT_TRIPLE_BUDGET, help="maximum total triples")

    p = add("iso", cmd_iso, "verify a 2-isomorphism witness file (exit 0 valid, 1 violations)")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("witness")

    p = add("companion", cmd_companion, "build a transitive 2-equivalent companion")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--witness", metavar="OUT.iso")
    p.add_argument("--report", metavar="OUT.json")

    p = add("check", cmd_check, "check homogeneous, transitive or 31-transitive (exit 0 yes, 1 no)")
    p.add_argument("property", choices=("homogeneous", "transitive", "31-transitive"))
    p.add_argument("file")
    p.add_argument("--budget", type=int, default=DEFAULT_TRIPLE_BUDGET, help="triple budget for 31-transitive")

    p = add("aut", cmd_aut, "find automorphisms and orbits")
    p.add_argument("file")
    p.add_argument("--map", action="append", default=[], metavar="a:b", help="require a -> b (repeatable)")
    p.add_argument("--orbits", action="store_true", help="print the orbit partition")

    p = add("eval", cmd_eval, "evaluate a formula (exit 0 true, 1 false)")
    p.add_argument("file")
    p.add_argument("formula")
    p.add_argument("--assign", action="append", default=[], metavar="x=a")
    p.add_argument("--mode", choices=(FO2, FO3), default=FO3)

    beth = add("beth", None, "definability tools: solve, synth, flip, transfer")
    bsub = beth.add_subparsers(dest="action", metavar="ACTION")
    bsub.required = True

    def badd(name, func, help_text):
        p = bsub.add_parser(name, help=help_text, description=help_text, parents=[common])
        p.set_defaults(func=func)
        return p

    p = badd("solve", cmd_beth_solve, "all relations satisfying sigma on a model (exit 0 iff unique)")
    p.add_argument("problem")
    p.add_argument("model")
    p.add_argument("--mode", choices=("brute", "type-union"), default="brute")
    p.add_argument("--cap", type=int, default=None, help="type-union candidate cap (default 2^20)")
    p = badd("synth", cmd_beth_synth, "explicit FO2 definition of a relation of the model (exit 1 if it cuts a type)")
    p.add_argument("model")
    p.add_argument("--rel", required=True)
    p = badd("flip", cmd_beth_flip, "flip a cut relation and verify the flip witness")
    p.add_argument("model")
    p.add_argument("--rel", required=True)
    p.add_argument("--type", type=int, metavar="COLOR", help="color to flip (default: smallest cut color)")
    p.add_argument("--pattern", action="store_true",
                   help="exchange reverse patterns when the relation cuts both T and its converse")
    p = badd("transfer", cmd_beth_transfer, "transfer a relation of MBAR to the 2-equivalent M")
    p.add_argument("m")
    p.add_argument("mbar")
    p.add_argument("--rel", required=True)
    p.add_argument("-o", "--output", help="write M expanded with the transferred relation")

    p = add("counterexample", cmd_counterexample, "build or verify the 45-element model")
    p.add_argument("action", choices=("build", "verify"))
    p.add_argument("-o", "--output", default="adn45.fos")
    p.add_argument("--budget", type=int, default=DEFAULT_TRIPLE_BUDGET, help="triple budget")

    p = add("selftest", cmd_selftest, "run companion, homogeneity and synthesis checks on a seeded corpus")
    p.add_argument("--count", type=int, default=50)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else ERROR
    if args.threads < 1:
        print("error: --threads must be at least 1", file=sys.stderr)
        return ERROR
    random.seed(args.seed)
    try:
        return args.func(args)
    except (BudgetExceeded, CapExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return BUDGET
    except (StructureError, FormulaError, BethError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
