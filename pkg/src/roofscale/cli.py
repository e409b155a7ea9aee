"""Command line front end: ``roofscale <subcommand> [options]``.

Exit status is 0 on success, 1 on a domain error (bad input file, violated
invariant, theorem not applicable) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import fileio
from . import ghzw as gw
from .convexroof import RoofOptions, convex_roof, zero_class
from .errors import InvariantViolation, NotApplicableError, RoofscaleError
from .invariants import MONOTONES, evaluate_normalized, get_monotone
from .qstate import MixedState, PureState
from .verify import SUITES, run_suite

BUILTIN_FAMILIES = {"standard": gw.GhzwFamily.standard, "s2sqrt2": gw.GhzwFamily.s2sqrt2}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _family(name: str) -> gw.GhzwFamily:
    if name in BUILTIN_FAMILIES:
        return BUILTIN_FAMILIES[name]()
    return fileio.family_from_json(fileio.load_json(name))


def _state(args) -> PureState | MixedState:
    """Resolve the input state: a file, a GHZ/W family mixture, or the rank-3 plane."""
    if args.state:
        return fileio.state_from_json(fileio.load_json(args.state))
    if args.family is not None:
        if args.p is None:
            raise InvariantViolation("--family needs --p to select a mixture")
        return gw.mixture_state(_family(args.family), args.p)
    if args.p is not None and args.q is not None:
        return gw.rank3_state(args.p, args.q)
    raise InvariantViolation("give --state, or --family with --p, or --p with --q")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _opts(args) -> RoofOptions:
    return RoofOptions(restarts=args.restarts, seed=args.seed)


def cmd_invariant(args) -> int:
    psi = _state(args)
    if not isinstance(psi, PureState):
        raise InvariantViolation("invariant expects a pure state file (with 'amplitudes')")
    _emit(fileio.dumps({"value": evaluate_normalized(get_monotone(args.monotone), psi)}), args.out)
    return 0


def cmd_roof(args) -> int:
    st = _state(args)
    rho = MixedState.from_pure(st) if isinstance(st, PureState) else st
    res = convex_roof(get_monotone(args.monotone), rho, _opts(args))
    _emit(fileio.dumps(fileio.roof_result_to_json(res)), args.out)
    return 0


def cmd_classify(args) -> int:
    st = _state(args)
    rho = MixedState.from_pure(st) if isinstance(st, PureState) else st
    cls = zero_class(get_monotone(args.monotone), rho, _opts(args))
    _emit(fileio.dumps({"class": cls.value}), args.out)
    return 0


def cmd_rescale(args) -> int:
    mono = get_monotone(args.monotone)
    if mono.degree != 2:
        raise NotApplicableError(f"rescaling is exact only for degree 2; {mono.name} has degree {mono.degree:g}")
    if args.p is None:
        raise InvariantViolation("rescale needs --p")
    fam = _family(args.family)
    out = {
        "T": gw.trace_factor(fam, args.p),
        "p_prime": gw.p_prime_from_p(fam, args.p),
        "value": gw.roof_via_rescaling(fam, args.p),
    }
    _emit(fileio.dumps(out), args.out)
    return 0


def cmd_curve(args) -> int:
    samples = gw.curve_samples(_family(args.family), args.step, args.monotone)
    _emit(fileio.curve_csv(samples), args.out)
    return 0


def cmd_surface(args) -> int:
    _emit(fileio.surface_csv(gw.characteristic_surface(args.step)), args.out)
    return 0


def cmd_verify(args) -> int:
    results = run_suite(args.suite)
    report = {
        "suite": args.suite,
        "passed": all(r.passed for r in results),
        "properties": [{"name": r.name, "passed": r.passed, "detail": r.detail} for r in results],
    }
    _emit(fileio.dumps(report), args.out)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="roofscale", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    monos = sorted(MONOTONES)

    def add(name, func, help_, monotone_default=None, state=False, roof=False):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        if monotone_default:
            sp.add_argument("--monotone", choices=monos, default=monotone_default)
        if state:
            sp.add_argument("--state", metavar="PATH")
            sp.add_argument("--family", metavar="{standard|s2sqrt2|PATH}")
            sp.add_argument("--p", type=float)
            sp.add_argument("--q", type=float)
        if roof:
            sp.add_argument("--restarts", type=int, default=32)
            sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", metavar="PATH")
        return sp

    add("invariant", cmd_invariant, "evaluate a monotone on a pure state", "tau3", state=True)
    add("roof", cmd_roof, "numerical convex roof of a state", "sqrt_tau3", state=True, roof=True)
    add("classify", cmd_classify, "zero / nonzero / undecided roof", "tau3", state=True, roof=True)
    sp = add("rescale", cmd_rescale, "closed-form roof of a GHZ/W mixture via rescaling", "sqrt_tau3")
    sp.add_argument("--family", required=True, metavar="{standard|s2sqrt2|PATH}")
    sp.add_argument("--p", type=float, required=True)
    sp = add("curve", cmd_curve, "characteristic curve and its convex envelope as CSV", "sqrt_tau3")
    sp.add_argument("--family", default="standard", metavar="{standard|s2sqrt2|PATH}")
    sp.add_argument("--step", type=float, default=1e-3)
    sp = add("surface", cmd_surface, "rank-3 characteristic surface and envelope as CSV")
    sp.add_argument("--step", type=float, default=1 / 200)
    sp = add("verify", cmd_verify, "run a property suite")
    sp.add_argument("suite", choices=sorted(SUITES))
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RoofscaleError, OSError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        print(f"roofscale: error: {msg}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
