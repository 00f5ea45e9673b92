"""Command line interface: ``tnuca <command> --f F --g G --n N ...``.

Exit codes: 0 success, 1 usage error, 2 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import serialize
from .dynamics import partial_transition_diagram, recurrence_analysis
from .graphs import (
    analyze_components,
    build_combined_diagram,
    build_single_diagram,
    fully_eulerian,
    fully_hamiltonian,
)
from .reach import classify, find_restricted_initial_set, verify_restricted_reversible
from .rules import BudgetExceeded, decode, rule_from_code
from .sequences import Choice, F, G, parse_sequence

EXIT_USAGE = 1
EXIT_BUDGET = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rgb(text: str) -> tuple[int, int, int]:
    parts = tuple(int(p) for p in text.split(","))
    if len(parts) != 3 or any(not 0 <= p <= 255 for p in parts):
        raise argparse.ArgumentTypeError(f"expected R,G,B with components in 0..255, got {text!r}")
    return parts


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _common(p: argparse.ArgumentParser, seq: bool = True, seq_required: bool = True) -> None:
    p.add_argument("--f", required=True, type=int, help="decimal code of rule f")
    p.add_argument("--g", required=True, type=int, help="decimal code of rule g")
    p.add_argument("--n", required=True, type=_positive, help="lattice size")
    p.add_argument("--k", default=2, type=int, help="number of states (default 2)")
    p.add_argument("--m", default=3, type=int, help="neighbourhood size (default 3)")
    p.add_argument("--budget", type=_positive, default=None, help="max configurations to enumerate")
    if seq:
        p.add_argument("--seq", required=seq_required, help="A005408 | A001651 | A018252 | pat:BITS | bits:BITS")
        p.add_argument("--horizon", type=_positive, default=None)


def _rules(args):
    try:
        f = rule_from_code(args.k, args.m, args.f)
    except ValueError as e:
        raise UsageError(f"--f: {e}") from None
    try:
        g = rule_from_code(args.k, args.m, args.g)
    except ValueError as e:
        raise UsageError(f"--g: {e}") from None
    return f, g


def _seq(args):
    try:
        return parse_sequence(args.seq)
    except ValueError as e:
        raise UsageError(f"--seq: {e}") from None


def _code_list(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag}: expected a comma separated list of encodings, got {text!r}") from None


def cmd_classify(args, out) -> None:
    f, g = _rules(args)
    report = classify(f, g, _seq(args), args.n, args.k, args.horizon, args.budget)
    out.write(serialize.dumps(serialize.report_to_dict(report)))


def cmd_verify(args, out) -> None:
    f, g = _rules(args)
    cin = _code_list(args.cin, "--cin")
    if not cin:
        raise UsageError("--cin: initial set must be non-empty")
    res = verify_restricted_reversible(f, g, _seq(args), args.n, cin, args.horizon, args.k, args.budget)
    doc = {"Cin": sorted(set(cin)), **serialize.reversibility_to_dict(res)}
    out.write(serialize.dumps(doc))


def cmd_diagram(args, out) -> None:
    f, g = _rules(args)
    if args.mode == "combined":
        text = serialize.diagram_to_dot(build_combined_diagram(f, g, args.n, budget=args.budget))
    elif args.mode in ("single-f", "single-g"):
        rule, label = (f, F) if args.mode == "single-f" else (g, G)
        text = serialize.diagram_to_dot(build_single_diagram(rule, args.n, label, budget=args.budget))
    else:
        if args.seq is None:
            raise UsageError("--seq: required for --mode partial")
        seq = _seq(args)
        if args.cin in (None, "all"):
            cin = range(args.k**args.n)
        elif args.cin == "auto":
            cin = find_restricted_initial_set(f, g, seq, args.n, args.horizon, budget=args.budget).cin
        else:
            cin = _code_list(args.cin, "--cin")
        if not cin:
            raise UsageError("--cin: initial set must be non-empty")
        pd = partial_transition_diagram(f, g, seq, args.n, cin, args.horizon, budget=args.budget)
        text = serialize.partial_to_dot(pd)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)


def _initial_cells(spec: str, n: int, k: int) -> list[int]:
    if spec == "center":
        cells = [0] * n
        cells[n - 1 - n // 2] = 1
        return cells
    if spec.startswith("random:"):
        try:
            seed = int(spec[7:])
        except ValueError:
            raise UsageError(f"--init: bad seed in {spec!r}") from None
        return np.random.default_rng(seed).integers(0, k, n).tolist()
    try:
        return decode(int(spec), n, k)
    except ValueError as e:
        raise UsageError(f"--init: {e}") from None


def cmd_spacetime(args, out) -> None:
    f, g = _rules(args)
    seq = _seq(args)
    try:
        render = serialize.RenderSpec(args.f_color, args.g_color, args.zero_color, args.scale)
    except ValueError as e:
        raise UsageError(f"--scale/--*-color: {e}") from None
    cells = _initial_cells(args.init, args.n, args.k)
    img = serialize.spacetime_image(f, g, seq, cells, args.steps, render, args.k)
    try:
        serialize.write_ppm(args.out, img)
    except OSError as e:
        raise UsageError(f"--out: cannot write {args.out}: {e}") from None


def cmd_cycles(args, out) -> None:
    f, g = _rules(args)
    seq = _seq(args)
    if not seq.is_periodic and args.horizon is None:
        raise UsageError(f"--horizon: schedule {seq.identifier} is not periodic, supply --horizon N")
    if not 0 <= args.init < args.k**args.n:
        raise UsageError(f"--init: encoding out of range 0..{args.k ** args.n - 1}")
    records = recurrence_analysis(f, g, seq, args.n, args.init, args.target, args.horizon, args.k, args.budget)
    doc = {
        "inputs": {"f": args.f, "g": args.g, "n": args.n, "k": args.k, "sequence": seq.identifier},
        "periodic": seq.is_periodic,
        "records": [serialize.record_to_dict(r) for r in records],
    }
    out.write(serialize.dumps(doc))


def cmd_graph(args, out) -> None:
    f, g = _rules(args)
    diagram = build_combined_diagram(f, g, args.n, budget=args.budget)
    first = Choice(args.euler_first)
    comps = analyze_components(diagram, args.hamiltonian_budget, first)
    ham = fully_hamiltonian(diagram, args.hamiltonian_budget)
    doc = {
        "inputs": {"f": args.f, "g": args.g, "n": args.n, "k": args.k},
        **serialize.graph_to_dict(comps, fully_eulerian(diagram), ham),
    }
    out.write(serialize.dumps(doc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tnuca", description="Temporally non-uniform cellular automata analysis")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="reversibility taxonomy as JSON")
    _common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="check restricted reversibility for a given initial set")
    _common(p)
    p.add_argument("--cin", required=True, help="comma separated encodings")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagram", help="DOT transition diagram")
    _common(p, seq_required=False)
    p.add_argument("--mode", required=True, choices=["single-f", "single-g", "combined", "partial"])
    p.add_argument("--cin", default=None, help="partial mode: comma list, 'all' or 'auto'")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_diagram)

    p = sub.add_parser("spacetime", help="space-time diagram as binary PPM")
    _common(p)
    p.add_argument("--steps", required=True, type=int)
    p.add_argument("--init", required=True, help="encoding, 'center' or 'random:SEED'")
    p.add_argument("--out", required=True)
    p.add_argument("--scale", type=int, default=1)
    p.add_argument("--f-color", type=_rgb, default=(0, 0, 255))
    p.add_argument("--g-color", type=_rgb, default=(255, 0, 0))
    p.add_argument("--zero-color", type=_rgb, default=(255, 255, 255))
    p.set_defaults(func=cmd_spacetime)

    p = sub.add_parser("cycles", help="recurrence records as JSON")
    _common(p)
    p.add_argument("--init", required=True, type=int)
    p.add_argument("--target", type=int, default=None)
    p.set_defaults(func=cmd_cycles)

    p = sub.add_parser("graph", help="combined diagram component analysis as JSON")
    _common(p, seq=False)
    p.add_argument("--hamiltonian-budget", type=int, default=64)
    p.add_argument("--euler-first", choices=["F", "G"], default="F")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    if getattr(args, "steps", 0) < 0:
        print("tnuca: error: --steps: must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args, out)
    except UsageError as e:
        print(f"tnuca: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"tnuca: error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as e:
        print(f"tnuca: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
