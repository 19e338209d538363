"""Command-line interface.

Exit codes: 0 win/true/pass, 1 lose/false/fail, 2 inconclusive, 3 input error.
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction

from . import measures
from .acceptance import accepted_tree, accepts
from .bisim import bd_wins, distance_table
from .core import (
    AVG,
    AddressUnresolvable,
    InvalidInput,
    Lifting,
    canonicalize,
    parse_lifting,
    resolve,
    validate,
)
from .epsgame import eps_value_table
from .fixpoint import DEFAULT_MAX_ITER, INCONCLUSIVE, WIN, NoConvergence, NumericalError, decide, default_tol
from .formats import InstanceBundle, ParseError, SchemaError, emit, emit_tree, load
from .generate import GeneratorConfig, generate_instance, random_choice
from .harness import DEFAULT_LIFTINGS, check_theorem
from .play import BooleanGame, EpsGame, play
from .witness import build_witness, verify_witness

OK, FAIL, UNDECIDED, INPUT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    """Bad input detected by the CLI itself; reported with exit code 3."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _fmt(x) -> str:
    return f"{float(x):.12g}"


def _value_line(value, table) -> str:
    if table.exact:
        return f"{_fmt(value)} ± 0 (exact)"
    return f"{_fmt(value)} ± {table.residual:.3g} (residual after {table.iterations} iterations)"


def _verdict_code(verdict) -> int:
    if verdict.outcome == WIN:
        return OK
    if verdict.outcome == INCONCLUSIVE:
        return UNDECIDED
    return FAIL


def _load(path, check=True) -> InstanceBundle:
    return load(path, check)


def _need(bundle: InstanceBundle, *parts):
    missing = [p for p in parts if getattr(bundle, p) is None]
    if missing:
        raise UsageError(f"document has no {' or '.join(missing)}")


def _lifting(args, bundle: InstanceBundle | None = None) -> Lifting:
    if args.lifting:
        try:
            return parse_lifting(args.lifting)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if bundle is not None and bundle.lifting is not None:
        return bundle.lifting
    return AVG


def _epsilon(args, bundle: InstanceBundle):
    eps = args.epsilon if args.epsilon is not None else bundle.epsilon
    if eps is None:
        raise UsageError("no epsilon: pass --epsilon or set it in the document")
    if not 0.0 <= eps <= 1.0:
        raise UsageError("epsilon must lie in [0, 1]")
    return eps


def _require_exact(args, table):
    if args.exact and not table.exact:
        raise UsageError("--exact: the product graph is cyclic, so only an iterated approximation is available")


# ---------------------------------------------------------------------------


def cmd_validate(args, out) -> int:
    bundle = _load(args.file, check=False)
    diags = []
    for part in (bundle.tree, bundle.automaton):
        if part is not None:
            diags.extend(validate(part))
    if bundle.alphabet is not None:
        diags.extend(bundle.alphabet.diagnostics())
    diags = list(dict.fromkeys(diags))
    for d in diags:
        print(d, file=out)
    if not diags:
        print("valid", file=out)
    return FAIL if diags else OK


def cmd_accept(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "tree", "automaton")
    ok = accepts(bundle.automaton, bundle.tree, args.state)
    print("accepted" if ok else "rejected", file=out)
    return OK if ok else FAIL


def cmd_accepted_tree(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "automaton")
    if args.state is not None and args.state not in bundle.automaton.states:
        raise UsageError(f"unknown state {args.state!r}")
    choice = None
    if args.seed is not None:
        choice = random_choice(bundle.automaton, random.Random(args.seed))
    tree = accepted_tree(bundle.automaton, args.state, choice)
    out.write(emit_tree(canonicalize(tree)))
    return OK


def cmd_bisim_dist(args, out) -> int:
    first = _load(args.file)
    second = _load(args.other) if args.other else first
    _need(first, "tree")
    _need(second, "tree")
    lifting = _lifting(args, first)
    a, b = first.tree, second.tree
    if args.epsilon is not None:
        verdict = bd_wins(a, b, args.at, args.at2, args.epsilon, lifting, args.tol, args.max_iter)
        print(verdict, file=out)
        return _verdict_code(verdict)
    start = (resolve(a, args.at), resolve(b, args.at2))
    table = distance_table(a, b, lifting, args.tol, args.max_iter, start=start)
    _require_exact(args, table)
    print(_value_line(table[start], table), file=out)
    return OK


def cmd_eps_value(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "tree", "automaton")
    lifting = _lifting(args, bundle)
    table = eps_value_table(bundle.automaton, bundle.tree, lifting, args.tol, args.max_iter)
    _require_exact(args, table)
    key = (bundle.automaton.initial, bundle.tree.root)
    print(_value_line(table[key], table), file=out)
    return OK


def cmd_eps_accept(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "tree", "automaton")
    lifting = _lifting(args, bundle)
    eps = _epsilon(args, bundle)
    table = eps_value_table(bundle.automaton, bundle.tree, lifting, args.tol, args.max_iter)
    _require_exact(args, table)
    key = (bundle.automaton.initial, bundle.tree.root)
    verdict = decide(table[key], table.slack(key), table.exact, eps)
    print(verdict, file=out)
    return _verdict_code(verdict)


def cmd_witness(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "tree", "automaton")
    lifting = _lifting(args, bundle)
    automaton, tree = bundle.automaton, bundle.tree
    built = build_witness(automaton, tree, lifting, args.tol, max_iter=args.max_iter)
    witness = canonicalize(built.tree)
    value = built.table[(automaton.initial, tree.root)]
    eps = args.epsilon if args.epsilon is not None else value + 1e-6
    report = verify_witness(automaton, tree, witness, eps, lifting, args.tol, args.max_iter)
    out.write(emit_tree(witness))
    print(f"E = {_fmt(value)}; witness {report}", file=sys.stderr)
    return OK if report.passed else FAIL


def cmd_measure(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "tree")
    method = measures.EXACT if args.exact else None
    if args.kind == "leaf":
        table = measures.leaf_mass(bundle.tree, method, args.tol)
    else:
        symbols = [s for s in args.error_symbols.split(",") if s]
        table = measures.error_mass(bundle.tree, symbols, method, args.tol)
    value = table[bundle.tree.root]
    if isinstance(value, Fraction):
        print(f"{_fmt(value)} ± 0 ({value}, {table.method})", file=out)
    else:
        print(f"{_fmt(value)} ± {table.residual:.3g} ({table.method}, {table.iterations} iterations)", file=out)
    return OK


def cmd_check_theorem(args, out) -> int:
    config = GeneratorConfig(max_nodes=args.max_nodes, max_states=args.max_states, seed=args.seed or 0)
    liftings = (_lifting(args),) if args.lifting else DEFAULT_LIFTINGS
    report = check_theorem(config, args.trials, liftings, samples=args.samples, solver_tol=args.tol)
    for f in report.failures:
        print(f"trial {f.trial} ({f.direction}): {f.detail}", file=sys.stderr)
        sys.stderr.write(emit(f.bundle))
    print(report.summary(), file=out)
    return OK if report.ok else FAIL


def cmd_generate(args, out) -> int:
    config = GeneratorConfig(
        max_nodes=args.max_nodes,
        max_states=args.max_states,
        seed=args.seed or 0,
        lifting=_lifting(args) if args.lifting else None,
    )
    out.write(emit(generate_instance(config)))
    return OK


def cmd_play(args, out) -> int:
    bundle = _load(args.file)
    _need(bundle, "tree", "automaton")
    if args.game == "boolean":
        game = BooleanGame(bundle.automaton, bundle.tree)
    else:
        game = EpsGame(bundle.automaton, bundle.tree, _epsilon(args, bundle), _lifting(args, bundle), args.tol)
    winner = play(game, args.side, sys.stdin, out, args.max_rounds)
    return OK if winner == "verifier" else FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="solver tolerance (default $EPSACCEPT_TOL or 1e-9)")
    common.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER)
    common.add_argument("--lifting", help="avg, max or weighted:P")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--exact", action="store_true", help="refuse approximate answers; exact-linear measures")

    parser = _Parser(prog="epsaccept", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_, file=True):
        p = sub.add_parser(name, parents=[common], help=help_)
        if file:
            p.add_argument("file")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "report diagnostics for a document")
    p = add("accept", cmd_accept, "decide acceptance")
    p.add_argument("--state")
    p = add("accepted-tree", cmd_accepted_tree, "emit a tree accepted from a state (--seed picks a random choice)")
    p.add_argument("--state")
    p = add("bisim-dist", cmd_bisim_dist, "bisimulation distance between two trees")
    p.add_argument("other", nargs="?", help="second document (default: the first)")
    p.add_argument("--at", default="", help="address in the first tree")
    p.add_argument("--at2", default="", help="address in the second tree")
    add("eps-value", cmd_eps_value, "least budget for epsilon-acceptance")
    add("eps-accept", cmd_eps_accept, "decide epsilon-acceptance")
    add("witness", cmd_witness, "emit an accepted tree within the optimal budget")
    p = add("measure", cmd_measure, "leaf or error mass at the root")
    p.add_argument("--kind", choices=("leaf", "error"), default="leaf")
    p.add_argument("--error-symbols", default="err", help="comma-separated binary symbols")
    for name, func, help_ in (
        ("check-theorem", cmd_check_theorem, "randomized round-trip check"),
        ("generate", cmd_generate, "emit a random instance"),
    ):
        p = add(name, func, help_, file=False)
        p.add_argument("--max-nodes", type=int, default=8)
        p.add_argument("--max-states", type=int, default=4)
        if name == "check-theorem":
            p.add_argument("--trials", type=int, default=100)
            p.add_argument("--samples", type=int, default=3)
    p = add("play", cmd_play, "play a game in the terminal")
    p.add_argument("--game", choices=("boolean", "eps"), default="boolean")
    p.add_argument("--side", choices=("verifier", "falsifier"), default="verifier")
    p.add_argument("--max-rounds", type=int, default=50)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if args.tol is None:
        args.tol = default_tol()
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return INPUT_ERROR
    try:
        return args.func(args, out)
    except SchemaError as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return INPUT_ERROR
    except InvalidInput as exc:
        for d in exc.diagnostics:
            print(f"error: {d}", file=sys.stderr)
        return INPUT_ERROR
    except (ParseError, UsageError, AddressUnresolvable, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return UNDECIDED
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
