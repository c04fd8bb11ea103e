"""Command-line interface.

Exit codes: 0 success, 1 domain error (or a negative equivalence verdict),
2 usage error.
"""
from __future__ import annotations

import argparse
import sys

from . import fileio
from .automaton import QuantumAutomaton, is_finite_automaton, output_dist, run_word
from .errors import QAError, UsageError
from .linalg import Tolerance
from .minimizer import MinimizationOptions, format_report, minimize, verify_equivalence
from .oracle import behavior_table

VISIBLE = "run,minimize,check-finite,equiv,gen"


def parse_word(m: QuantumAutomaton, text: str) -> tuple[str, ...]:
    """Comma-separated symbols, or a plain string when every symbol is one character."""
    if text == "":
        return ()
    if "," in text:
        word = tuple(t.strip() for t in text.split(","))
    elif all(len(s) == 1 for s in m.alphabet):
        word = tuple(text)
    else:
        word = (text,)
    unknown = [s for s in word if s not in m.alphabet]
    if unknown:
        raise UsageError(f"symbols {unknown} not in alphabet {list(m.alphabet)}")
    return word


def _cmd_run(args) -> int:
    m = fileio.load(args.file, args.tol)
    word = parse_word(m, args.word)
    dist = output_dist(m, run_word(m, word))
    print(f"word: {'.'.join(word) if word else '<eps>'}")
    for a, p in dist.items():
        print(f"{a:+.12g}\t{p:.12f}")
    return 0


def _cmd_minimize(args) -> int:
    m = fileio.load(args.file, args.tol)
    opts = MinimizationOptions(Tolerance(args.tol, args.tol), args.verify_len,
                               not args.no_sober)
    report = minimize(m, opts)
    print(format_report(report))
    if report.reduced is not None and args.output:
        fileio.save(report.reduced, args.output)
        print(f"wrote {args.output}")
    return 0


def _cmd_check_finite(args) -> int:
    m = fileio.load(args.file)
    v = is_finite_automaton(m, args.max_period, assume_period_bound=args.assume_bound)
    print(f"max period tested: {v.max_p}")
    for s, p in v.periods.items():
        print(f"  {s}: period {p if p is not None else 'none'}")
    for a, b in v.noncommuting:
        print(f"  {a},{b}: do not commute")
    print(f"verdict: {v.verdict} ({v.reason})")
    return 0


def _cmd_equiv(args) -> int:
    m1 = fileio.load(args.file1, args.tol)
    m2 = fileio.load(args.file2, args.tol)
    cmp = verify_equivalence(m1, m2, args.max_len, args.tol)
    print(f"{'equal' if cmp.equal else 'not equal'} to depth {cmp.depth}, "
          f"max deviation {cmp.max_deviation:.3e}")
    return 0 if cmp.equal else 1


def _cmd_gen(args) -> int:
    m = fileio.gen_instance(args.kind, args.n, args.n1, args.seed, args.letters)
    if args.output:
        fileio.save(m, args.output)
    else:
        sys.stdout.write(fileio.dumps(m) + "\n")
    return 0


def _cmd_oracle(args) -> int:
    sys.stdout.write(behavior_table(fileio.load(args.file), args.depth))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qadim", description="Quantum automaton toolkit")
    sub = p.add_subparsers(dest="command", required=True, metavar=f"{{{VISIBLE}}}")

    r = sub.add_parser("run", help="output distribution after a word")
    r.add_argument("file")
    r.add_argument("--word", required=True,
                   help="symbols, comma-separated unless all are single characters")
    r.add_argument("--tol", type=float, default=1e-9)
    r.set_defaults(func=_cmd_run)

    mn = sub.add_parser("minimize", help="reduce the number of qubits")
    mn.add_argument("file")
    mn.add_argument("-o", "--output")
    mn.add_argument("--tol", type=float, default=1e-9)
    mn.add_argument("--verify-len", type=int, default=4)
    mn.add_argument("--no-sober", action="store_true", help="skip the factorization shortcut")
    mn.set_defaults(func=_cmd_minimize)

    f = sub.add_parser("check-finite", help="finiteness verdict for the state set")
    f.add_argument("file")
    f.add_argument("--max-period", type=int, default=None,
                   help="largest period searched (default max(4^n, 1024))")
    f.add_argument("--assume-bound", action="store_true",
                   help="report 'infinite' when no period up to 4^n exists")
    f.set_defaults(func=_cmd_check_finite)

    e = sub.add_parser("equiv", help="truncated behavior comparison")
    e.add_argument("file1")
    e.add_argument("file2")
    e.add_argument("--max-len", type=int, required=True)
    e.add_argument("--tol", type=float, default=1e-9)
    e.set_defaults(func=_cmd_equiv)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("kind", choices=fileio.KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--n1", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--letters", type=int, default=2)
    g.add_argument("-o", "--output")
    g.set_defaults(func=_cmd_gen)

    o = sub.add_parser("oracle")  # debugging aid, not advertised
    o.add_argument("file")
    o.add_argument("--depth", type=int, default=2)
    o.set_defaults(func=_cmd_oracle)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with 2 on bad flags
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QAError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
