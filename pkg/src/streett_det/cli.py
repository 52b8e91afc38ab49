"""Command line entry point.

Exit codes: 0 all passed, 1 disagreement (or a failed check), 2 usage
error, 3 parse error, 4 capacity exceeded.
"""
from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path
from typing import List, Optional

from .campaign import FAILED, CampaignConfig, bounds_report, format_bounds, report_text, run_campaign
from .determinize import (
    BUILDERS,
    DEFAULT_STATE_CAP,
    h_safra_successor,
    initial_tree,
    lir_successor,
    mu_safra_successor,
    priority_of,
)
from .errors import CapacityError, DomainError, ParseError, StreettDetError
from .formats import HOA, NATIVE, emit_automaton, parse_automaton
from .generators import GenSpec, full_streett, random_nsa, to_state_based
from .lasso import accepts
from .omega import DPTA, DRA, DRTA, Lasso, StreettNSA, format_name
from .trees import CORRECTED, H_SAFRA, LIR, MU, VARIANTS, render_tree

EXIT_OK, EXIT_DISAGREE, EXIT_USAGE, EXIT_PARSE, EXIT_CAPACITY = 0, 1, 2, 3, 4

TARGETS = {"rabin-t": DRTA, "parity-t": DPTA, "rabin-baseline": DRA}


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _load_nsa(path: str) -> StreettNSA:
    a = parse_automaton(_read(path))
    if not isinstance(a, StreettNSA):
        raise UsageError(f"{path} holds a deterministic automaton, expected an NSA")
    return to_state_based(a)


def parse_word(text: str, alphabet) -> List[int]:
    """Letters separated by commas or spaces; an empty string is the empty word."""
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    try:
        return [alphabet.index(t) for t in tokens]
    except DomainError as exc:
        raise UsageError(str(exc)) from None


def trace_word(nsa: StreettNSA, word: List[int], target: str, variant: str = CORRECTED) -> str:
    """Tree after each construction step along ``word``."""
    mode = {DRTA: H_SAFRA, DPTA: LIR, DRA: MU}[target]
    tree = initial_tree(nsa, mode, variant)
    out = ["initial", render_tree(tree)]

    def hook(step, title, root, lir):
        out.append(f"  step {step}: {title}")
        out.append("\n".join("    " + line for line in render_tree(root).splitlines()))

    for a in word:
        out.append(f"letter {nsa.alphabet.name(a)}")
        if mode == H_SAFRA:
            res = h_safra_successor(nsa, tree, a, trace=hook)
            tree = res.tree
            acc = ",".join(format_name(x) for x in sorted(res.signature.sig_acc))
            rej = ",".join(format_name(x) for x in sorted(res.signature.sig_rej))
            out.append(f"  sig_acc={{{acc}}} sig_rej={{{rej}}}")
        elif mode == LIR:
            res = lir_successor(nsa, tree, a, trace=hook)
            tree = res.tree
            out.append(f"  priority={priority_of(res.signature, nsa.n, nsa.mu)}")
        else:
            tree = mu_safra_successor(nsa, tree, a, trace=hook)
            e = ",".join(format_name(x) for x in sorted(tree.E))
            f = ",".join(format_name(x) for x in sorted(tree.F))
            out.append(f"  E={{{e}}} F={{{f}}}")
        out.append(render_tree(tree))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# commands


def cmd_determinize(args) -> int:
    nsa = _load_nsa(args.input)
    kind = TARGETS[args.target]
    if args.trace is not None:
        sys.stdout.write(trace_word(nsa, parse_word(args.trace, nsa.alphabet), kind, args.variant))
    aut = BUILDERS[kind](nsa, cap=args.cap, variant=args.variant)
    _write(args.out, emit_automaton(aut, args.format))
    return EXIT_OK


def cmd_membership(args) -> int:
    a = parse_automaton(_read(args.automaton))
    word = Lasso.of(parse_word(args.prefix, a.alphabet), parse_word(args.cycle, a.alphabet))
    if not word.cycle:
        raise UsageError("the cycle must be nonempty")
    print("ACCEPT" if accepts(a, word) else "REJECT")
    return EXIT_OK


def cmd_generate(args) -> int:
    if args.kind == "random":
        nsa = random_nsa(GenSpec(args.n, args.k, args.sigma, args.density, args.pair_density, args.seed))
    else:
        family = full_streett(args.n, args.k, lazy=True)
        if args.letters is None:
            nsa = full_streett(args.n, args.k)
        else:
            nsa = family.restrict(family.sample(args.letters, args.seed))
    _write(args.out, emit_automaton(nsa, args.format))
    return EXIT_OK


def cmd_campaign(args) -> int:
    try:
        cfg = CampaignConfig.from_json(_read(args.config))
    except (DomainError, TypeError) as exc:
        raise UsageError(f"bad campaign config: {exc}") from None
    records = run_campaign(cfg)
    _write(args.out or cfg.output, report_text(records))
    summary = records[-1]["summary"]
    print(
        f"{summary['status']}: {summary['agreements']}/{summary['comparisons']} agreements, "
        f"{len(summary['failed'])} failed, {len(summary['capacity'])} over capacity",
        file=sys.stderr,
    )
    if summary["status"] == FAILED:
        return EXIT_DISAGREE
    return EXIT_CAPACITY if summary["capacity"] else EXIT_OK


def cmd_bounds(args) -> int:
    nsa = _load_nsa(args.input)
    results = {kind: BUILDERS[kind](nsa, cap=args.cap, variant=args.variant) for kind in (DRTA, DPTA, DRA)}
    rows = bounds_report(nsa, results)
    sys.stdout.write(f"n={nsa.n} k={nsa.k} mu={nsa.mu}\n" + format_bounds(rows))
    return EXIT_OK if all(r.ok for r in rows) else EXIT_DISAGREE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="streett-det", description="Streett determinization toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def construction_options(p):
        p.add_argument("--variant", choices=VARIANTS, default=CORRECTED)
        p.add_argument("--cap", type=int, default=DEFAULT_STATE_CAP, help="state cap")

    p = sub.add_parser("determinize", help="build a deterministic automaton from an NSA")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--target", choices=sorted(TARGETS), required=True)
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    p.add_argument("--trace", default=None, help="finite word whose construction steps are printed")
    p.add_argument("--format", choices=(NATIVE, HOA), default=NATIVE)
    construction_options(p)
    p.set_defaults(func=cmd_determinize)

    p = sub.add_parser("membership", help="decide a lasso word prefix.cycle^omega")
    p.add_argument("--automaton", required=True)
    p.add_argument("--prefix", default="")
    p.add_argument("--cycle", required=True)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("generate", help="write a seeded random or full Streett NSA")
    p.add_argument("--kind", choices=("random", "full-streett"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--sigma", type=int, default=2)
    p.add_argument("--density", type=float, default=0.5)
    p.add_argument("--pair-density", type=float, default=0.3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--letters", type=int, default=None,
                   help="full-streett only: sample this many letters instead of all")
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=(NATIVE, HOA), default=NATIVE)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("campaign", help="run a differential campaign from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("bounds", help="observed sizes against the closed-form bounds")
    p.add_argument("--in", dest="input", required=True)
    construction_options(p)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except CapacityError as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (UsageError, StreettDetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
