"""Batch command line: solve, check, evidence, render.

One command per invocation; the model comes from a file path or standard
input (``-``).  Reports are written to standard output and are
byte-identical for identical inputs, flags and seed; wall-clock timing
goes to standard error only.  Exit codes: 0 success, 1 check failure,
2 usage or parse error, 3 capability error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time

from . import belief as bf
from . import domains as dm
from . import treecomp as tc
from .compare import Comparator, DEFAULT_COMPARATOR
from .domains import Domain
from .errors import CapabilityError, ParseError, SemivalError
from .model import Model, parse_model, render_model
from .partitions import check_qseparoid
from .semiring import check_semiring_axioms, format_value
from .valuation import check_valuation_axioms

VERSION = "0.1.0"


def _fmt_domain(d: Domain) -> str:
    return "{" + " ".join(d.names) + "}"


def _fmt_focal(model: Model, fs: bf.FocalSet) -> str:
    cat = model.catalog
    cfgs = []
    for values in fs.configs:
        labels = (cat.frame(n)[v] for n, v in zip(fs.domain.names, values))
        cfgs.append("(" + " ".join(labels) + ")")
    return "{" + " ".join(cfgs) + "}"


def _potential_lines(model: Model, pot: bf.SetPotential, prefix: str) -> list[str]:
    out = []
    for fs, mass in pot.focal:
        out.append(f"{prefix}{_fmt_focal(model, fs)}: {format_value(mass)}")
    return out


def _deviation(sr, a, b) -> float:
    dev = 0.0
    for x, y in zip(a.table, b.table):
        if not sr.eq(x, y):
            dev = max(dev, abs(float(x) - float(y)))
    return dev


def _queries(model: Model, args) -> list[Domain]:
    if args.query is not None:
        return [model.catalog.domain(*q.replace(",", " ").split()) for q in args.query]
    return model.queries


def cmd_solve(model: Model, args, comparator: Comparator) -> tuple[list[str], int]:
    queries = _queries(model, args)
    if not queries:
        raise ParseError("no query: add 'query VAR...' stanzas or pass --query")
    lines = [f"heuristic: {args.heuristic}", f"seed: {args.seed}"]

    if model.factors or not model.potentials:
        sr = model.semiring(comparator)
        ops = tc.ValuationOps(model.catalog, sr, cap=args.cap)
        factors = model.factor_values()
        lines.insert(0, f"semiring: {sr.name}")
        covered = tc.join_of([f.domain for f in factors])
        if not sr.idempotent_add:
            for q in queries:
                if not q <= covered:
                    raise CapabilityError(
                        f"query {_fmt_domain(q)} leaves the factor domain "
                        f"{_fmt_domain(covered)}; {sr.name} has no transport"
                    )
    else:
        ops = tc.SetPotentialOps(model.catalog, cap=args.cap)
        factors = [p for _, p in model.potentials]
        lines.insert(0, "semiring: none (set potentials)")

    if model.trees:
        named = model.trees[0]
        tree = named.with_factors([n for n, _ in (model.factors or model.potentials)])
        lines.append(f"tree: {named.name} ({len(tree)} nodes, given)")
    else:
        tree = tc.build_covering_join_tree(
            [ops.domain(f) for f in factors],
            heuristic=args.heuristic,
            seed=args.seed,
            cover=queries,
        )
        lines.append(f"tree: built ({len(tree)} nodes)")
    for i, label in enumerate(tree.labels):
        lines.append(f"node {i}: {_fmt_domain(label)}")
    for a, b in tree.edges:
        lines.append(f"edge {a} {b}")

    root = args.root if args.root is not None else tc.default_root(tree, queries[0])
    if not 0 <= root < len(tree):
        raise ParseError(f"--root {root} out of range")
    lines.append(f"root: {root}")

    result, store = tc.collect(tree, factors, root, ops)
    node_results = None
    for q in queries:
        v = tc.default_root(tree, q)
        if v == root:
            local = result
        else:
            if node_results is None:
                node_results = tc.distribute(tree, factors, store, ops)
            local = node_results[v]
        answer = ops.extract(local, q)
        if isinstance(ops, tc.ValuationOps):
            body = " ".join(sr.fmt(x) for x in answer.table)
            lines.append(f"result {_fmt_domain(q)}: {body}")
        else:
            lines.append(f"result {_fmt_domain(q)}:")
            lines.extend(_potential_lines(model, answer, "  focal "))
        if args.oracle:
            expected = tc.naive_solve(factors, q, ops)
            if isinstance(ops, tc.ValuationOps):
                dev = _deviation(sr, answer, expected)
            else:
                keys = set(answer.by_set) | set(expected.by_set)
                dev = max(
                    (abs(answer.mass(k) - expected.mass(k)) for k in keys),
                    default=0.0,
                )
            lines.append(f"oracle deviation {_fmt_domain(q)}: {format_value(dev)}")
    lines.append("status: ok")
    return lines, 0


def cmd_check(model: Model, args, comparator: Comparator) -> tuple[list[str], int]:
    what = args.what
    lines: list[str] = []
    ok = True
    if what == "semiring":
        sr = model.semiring(comparator)
        report = check_semiring_axioms(sr, samples=args.samples or 10_000,
                                       seed=args.seed)
        lines.extend(report.lines())
        ok = report.passed
    elif what == "valuation-axioms":
        sr = model.semiring(comparator)
        report = check_valuation_axioms(sr, samples=args.samples or 100,
                                        seed=args.seed)
        lines.extend(report.lines())
        ok = report.passed
    elif what == "qseparoid":
        if not model.partitions:
            raise ParseError("model has no partition stanzas")
        report = check_qseparoid([p for _, p in model.partitions], seed=args.seed)
        lines.extend(report.lines())
        ok = report.passed
    elif what == "tree":
        if not model.trees:
            raise ParseError("model has no tree stanza")
        named = model.trees[0]
        tree = named.structure()
        jt = tc.is_join_tree(tree)
        mt = tc.is_markov_tree(tree)
        lines.append(f"tree {named.name}: {len(tree)} nodes")
        lines.append(f"join-tree: {'yes' if jt else 'no'}")
        lines.append(f"markov-tree: {'yes' if mt else 'no'}")
        lines.append(f"result: {'pass' if jt else 'FAIL'}")
        ok = jt
    elif what == "sequence":
        if not model.sequences:
            raise ParseError("model has no sequence stanza")
        name, seq = model.sequences[0]
        lines.append(f"sequence {name}: {len(seq)} steps")
        bad = _first_violation(seq)
        if bad is None:
            lines.append("valid: yes")
            lines.append("result: pass")
        else:
            lines.append(f"valid: no (violated at step {bad + 1})")
            lines.append("result: FAIL")
            ok = False
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(f"unknown check {what!r}")
    return lines, 0 if ok else 1


def _first_violation(seq: tc.EliminationSequence) -> int | None:
    n = len(seq)
    suffix = [dm.EMPTY_DOMAIN] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = seq.domains[i] | suffix[i + 1]
    for i in range(n - 1):
        if not (seq.domains[i] & suffix[i + 1]) <= seq.domains[seq.b[i]]:
            return i
    return None


def _combined_potential(model: Model, comparator: Comparator) -> bf.SetPotential:
    pots = [p for _, p in model.potentials]
    if not pots:
        raise ParseError("model has no potential stanzas")
    acc = pots[0]
    for p in pots[1:]:
        acc = bf.dempster_combine(acc, p, comparator=comparator)
    return acc


def cmd_evidence(model: Model, args, comparator: Comparator) -> tuple[list[str], int]:
    op = args.op
    lines: list[str] = []
    if op == "combine":
        combined = _combined_potential(model, comparator)
        names = " * ".join(n for n, _ in model.potentials)
        lines.append(f"combined: {names}")
        conflict = combined.conflict if combined.conflict is not None else 0.0
        lines.append(f"conflict: {format_value(conflict)}")
        lines.extend(_potential_lines(model, combined, "focal "))
    elif op in ("support", "plausibility"):
        if not model.hypotheses:
            raise ParseError("model has no hypothesis stanzas")
        combined = _combined_potential(model, comparator)
        for name, h in model.hypotheses:
            pot = combined
            if h.domain != combined.domain:
                pot = bf.transport_potential(combined, h.domain, cap=args.cap)
            tag = f"hypothesis {name} {_fmt_focal(model, h)}"
            if op == "support":
                qsp, sp = bf.degree_of_support(pot, h, comparator)
                lines.append(
                    f"{tag}: qsp {format_value(qsp)} sp {format_value(sp)} (normalized)"
                )
            else:
                pl = bf.degree_of_plausibility(pot, h, comparator)
                _, sp_c = bf.degree_of_support(
                    pot, h.complement(model.catalog), comparator
                )
                lines.append(
                    f"{tag}: pl {format_value(pl)} dual {format_value(1.0 - sp_c)}"
                )
    elif op == "moebius":
        for name, pot in model.potentials:
            subsets = bf.all_focal_sets(model.catalog, pot.domain, cap=args.subset_cap)
            lines.append(
                f"moebius {name} {_fmt_domain(pot.domain)}: {len(subsets)} subsets"
            )
            btable = {fs: bf.mass_to_belief(pot, fs) for fs in subsets}
            qtable = {fs: bf.mass_to_commonality(pot, fs) for fs in subsets}
            for fs in sorted(subsets, key=lambda f: f.configs):
                lines.append(
                    f"  b {_fmt_focal(model, fs)}: {format_value(btable[fs])}"
                    f"  q {_fmt_focal(model, fs)}: {format_value(qtable[fs])}"
                )
            back_b = bf.belief_to_mass(model.catalog, pot.domain, btable,
                                       cap=args.subset_cap, comparator=comparator)
            back_q = bf.commonality_to_mass(model.catalog, pot.domain, qtable,
                                            cap=args.subset_cap, comparator=comparator)
            for label, back in (("belief", back_b), ("commonality", back_q)):
                keys = set(pot.by_set) | set(back.by_set)
                dev = max(
                    (abs(pot.mass(k) - back.mass(k)) for k in keys), default=0.0
                )
                lines.append(f"  roundtrip {label}: max deviation {format_value(dev)}")
    else:  # pragma: no cover - argparse restricts choices
        raise ParseError(f"unknown evidence op {op!r}")
    lines.append("status: ok")
    return lines, 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="semival",
        description="local computation over semiring valuations and set potentials",
    )
    p.add_argument("--version", action="version", version=f"semival {VERSION}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("model", help="model file path, or - for stdin")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--cap", type=int, default=None,
                        help="configuration-count cap (default 2^24)")
        sp.add_argument("--tolerance", default=None, metavar="REL,ABS",
                        help="comparator tolerances (default 1e-9,1e-12)")

    sp = sub.add_parser("solve", help="combine factors and answer queries")
    common(sp)
    sp.add_argument("--query", action="append", default=None,
                    help="query domain, e.g. 'x y' (repeatable)")
    sp.add_argument("--root", type=int, default=None)
    sp.add_argument("--heuristic", choices=("min-degree", "min-fill"),
                    default="min-fill")
    sp.add_argument("--oracle", action="store_true",
                    help="also run the naive combine-then-extract oracle")

    sp = sub.add_parser("check", help="run law checkers against the model")
    common(sp)
    sp.add_argument("--what", required=True,
                    choices=("semiring", "valuation-axioms", "qseparoid",
                             "tree", "sequence"))
    sp.add_argument("--samples", type=int, default=None)

    sp = sub.add_parser("evidence", help="belief-function operations")
    common(sp)
    sp.add_argument("--op", required=True,
                    choices=("combine", "support", "plausibility", "moebius"))
    sp.add_argument("--subset-cap", type=int, default=bf.DEFAULT_SUBSET_CAP)

    sp = sub.add_parser("render", help="print the canonical model text")
    common(sp)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        comparator = DEFAULT_COMPARATOR
        if args.tolerance:
            try:
                rel_text, abs_text = args.tolerance.split(",")
                comparator = Comparator(rel=float(rel_text), abs=float(abs_text))
            except ValueError:
                raise ParseError(f"bad --tolerance {args.tolerance!r}") from None
        if args.cap is None:
            args.cap = 2**24
        if args.model == "-":
            text = sys.stdin.read()
        else:
            try:
                with open(args.model, "r", encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise ParseError(str(exc)) from None
        model = parse_model(text, comparator)
        if args.command == "solve":
            lines, code = cmd_solve(model, args, comparator)
        elif args.command == "check":
            lines, code = cmd_check(model, args, comparator)
        elif args.command == "evidence":
            lines, code = cmd_evidence(model, args, comparator)
        else:
            sys.stdout.write(render_model(model))
            return 0
    except ParseError as exc:
        print(f"semival: error: {exc}", file=sys.stderr)
        return 2
    except CapabilityError as exc:
        print(f"semival: capability error: {exc}", file=sys.stderr)
        return 3
    except SemivalError as exc:
        print(f"semival: error: {exc}", file=sys.stderr)
        return 1
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]
    header = [
        f"semival {VERSION}",
        f"command: {args.command}",
        f"input: sha256:{digest}",
    ]
    sys.stdout.write("\n".join(header + lines) + "\n")
    print(f"elapsed: {time.perf_counter() - started:.3f}s", file=sys.stderr)
    return 0 if code == 0 else code


if __name__ == "__main__":
    sys.exit(main())
