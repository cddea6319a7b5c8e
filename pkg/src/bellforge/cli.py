"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure.  Floats are printed
with 9 significant digits; ``--json`` switches to machine-readable output.
Randomised commands take ``--seed`` (default 0) and echo it.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from typing import Sequence

import numpy as np

from . import catalog
from .core import BellFunctional, evaluate, is_symmetric, load_json
from .local import local_bound
from .npa import npa_program, npa_upper_bound
from .optimize import ParamOptConfig, SeesawConfig, seesaw, sqs_lower_bound, sweep
from .quantum import QuantumStrategy, born_correlation, cglmp_optimal_state, negativity, to_density
from .sdp import SdpError
from .symmetry import check_sufficient_conditions, local_unitary_symmetrizable

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
DEFAULT_SEED = 0
MODE_ALIASES = {"free": "unrestricted", "symcorr": "symmetric_correlation", "shared": "shared_povm", "sqs": "sqs"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def fmt(v) -> str:
    return "nan" if v is None else f"{float(v):.9g}"


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload, indent=2) if getattr(args, "json", False) else text)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _write_csv(path: str | None, header, rows) -> None:
    text = _csv_text(header, rows)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def resolve_functional(ref: str) -> BellFunctional:
    """A catalog name or a path to functional JSON."""
    if os.path.isfile(ref):
        return BellFunctional.from_json(load_json(ref))
    try:
        return catalog.get(ref).functional
    except KeyError as exc:
        raise UsageError(str(exc)) from None


def _load_strategy(path: str) -> QuantumStrategy:
    try:
        return QuantumStrategy.from_json(load_json(path))
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read strategy {path}: {exc}") from None


# -- handlers -------------------------------------------------------------------
def cmd_catalog(args) -> int:
    if args.action == "list":
        _emit(args, {"names": catalog.names()}, "\n".join(catalog.names()))
        return EXIT_OK
    if not args.name:
        raise UsageError("catalog show needs a name")
    try:
        e = catalog.get(args.name)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    f = e.functional
    payload = {"functional": f.to_json(), "symmetric": e.symmetric, "known_quantum_value": e.known_quantum_value,
               "known_sqs_qubit_value": e.known_sqs_qubit_value, "source": e.source, "flags": list(e.flags)}
    s = f.scenario
    text = "\n".join([
        f"name: {f.name}",
        f"scenario: (2,{s.settings_a},{s.outcomes})",
        f"symmetric: {e.symmetric}",
        f"local bound: {fmt(e.local_bound)}",
        f"known quantum value: {fmt(e.known_quantum_value)}",
        f"known qubit SQS value: {fmt(e.known_sqs_qubit_value)}",
        f"offset: {fmt(f.constant_offset)}",
        f"source: {e.source}",
    ] + ([f"flags: {', '.join(e.flags)}"] if e.flags else []))
    _emit(args, payload, text)
    return EXIT_OK


def cmd_bound(args) -> int:
    f = resolve_functional(args.functional)
    if args.kind == "local":
        value, witness = local_bound(f)
        _emit(args, {"value": value, "witness": witness.to_json()},
              f"local bound: {fmt(value)}\nwitness: {json.dumps(witness.to_json())}")
        return EXIT_OK
    if args.kind == "npa":
        if args.sdpa_out:
            npa_program(f, args.level, args.symmetric)[0].to_sdpa(args.sdpa_out)
        value = npa_upper_bound(f, args.level, args.symmetric)
        _emit(args, {"value": value, "level": args.level, "symmetric": args.symmetric},
              f"NPA level {args.level}{' (twirled)' if args.symmetric else ''} upper bound: {fmt(value)}")
        return EXIT_OK
    mode = "sqs" if args.kind == "sqs-lower" else MODE_ALIASES[args.mode]
    if mode == "sqs":
        rep = sqs_lower_bound(f, ParamOptConfig(local_dim=args.dim, restarts=args.restarts, seed=args.seed,
                                                subspace=args.subspace))
    else:
        rep = seesaw(f, SeesawConfig(local_dim=args.dim, restarts=args.restarts, seed=args.seed, mode=mode))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(rep.best_strategy.to_json(), fh)
    payload = {"value": rep.best_value, "mode": rep.mode, "dim": rep.local_dim, "restarts": args.restarts,
               "seed": args.seed, "per_restart": rep.per_restart, "symmetric_correlation":
                   is_symmetric(born_correlation(rep.best_strategy), 1e-6)}
    _emit(args, payload, f"seed: {args.seed}\nmode: {rep.mode}  D={rep.local_dim}  restarts={args.restarts}\n"
                         f"best value: {fmt(rep.best_value)}")
    return EXIT_OK


def cmd_eval(args) -> int:
    f = resolve_functional(args.functional)
    s = _load_strategy(args.strategy)
    if s.scenario != f.scenario:
        raise UsageError(f"strategy scenario {s.scenario} does not match functional scenario {f.scenario}")
    value = evaluate(f, born_correlation(s))
    _emit(args, {"value": value}, fmt(value))
    return EXIT_OK


def cmd_check(args) -> int:
    s = _load_strategy(args.strategy)
    p = born_correlation(s)
    report = {
        "correlation_symmetric": is_symmetric(p) if s.scenario.is_square else False,
        "sqs": check_sufficient_conditions(s, "identity"),
        "mirror_kind": check_sufficient_conditions(s, "conjugation"),
        "local_unitary_symmetrizable": local_unitary_symmetrizable(s),
    }
    _emit(args, report, "\n".join(f"{k}: {v}" for k, v in report.items()))
    return EXIT_OK


def cmd_negativity(args) -> int:
    if args.cglmp is not None:
        top = cglmp_optimal_state(args.cglmp)
        rho, dims = to_density(top.state), (args.cglmp, args.cglmp)
    elif args.strategy:
        s = _load_strategy(args.strategy)
        rho, dims = s.rho, s.dims
    else:
        raise UsageError("give a strategy file or --cglmp d")
    value = negativity(rho, dims)
    _emit(args, {"negativity": value}, fmt(value))
    return EXIT_OK


def _fig2_rows(alphas, restarts: int, seed: int):
    return sweep(lambda a: catalog.i_s(a).functional, alphas,
                 SeesawConfig(local_dim=2, restarts=restarts, seed=seed),
                 ParamOptConfig(local_dim=2, restarts=restarts, seed=seed))


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise UsageError("--steps must be positive")
    alphas = np.linspace(args.start, args.stop, args.steps)
    print(f"# seed: {args.seed}", file=sys.stderr)
    _write_csv(args.out, ("alpha", "local", "sqs_qubit", "quantum"), _fig2_rows(alphas, args.restarts, args.seed))
    return EXIT_OK


def cmd_reproduce(args) -> int:
    if args.table == "cglmp-values":
        rows = []
        for d in range(2, args.dmax + 1):
            top = cglmp_optimal_state(d)
            value = catalog.cglmp_value_from_i22dd(d, top.value)
            ref = catalog.CGLMP_VALUES.get(d)
            rows.append((d, value, float("nan") if ref is None else ref,
                         float("nan") if ref is None else abs(value - ref)))
        _write_csv(args.out, ("d", "cglmp_value", "reference", "abs_diff"), rows)
    elif args.table == "negativity":
        rows = []
        for d in range(2, args.dmax + 1):
            top = cglmp_optimal_state(d)
            ref = catalog.CGLMP_NEGATIVITY.get(d)
            rows.append((d, negativity(to_density(top.state), (d, d)), float("nan") if ref is None else ref))
        _write_csv(args.out, ("d", "negativity", "reference"), rows)
    else:
        print(f"# seed: {args.seed}", file=sys.stderr)
        alphas = np.linspace(1.5, 3.0, args.steps)
        _write_csv(args.out, ("alpha", "local", "sqs_qubit", "quantum"), _fig2_rows(alphas, args.restarts, args.seed))
    return EXIT_OK


# -- parser -------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bellforge", description="Local, quantum and symmetric bounds for bipartite Bell functionals.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_json(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")

    c = sub.add_parser("catalog", help="list or show catalog entries")
    c.add_argument("action", choices=["list", "show"])
    c.add_argument("name", nargs="?")
    add_json(c)
    c.set_defaults(handler=cmd_catalog)

    b = sub.add_parser("bound", help="local, quantum-lower, sqs-lower or npa bound")
    b.add_argument("kind", choices=["local", "quantum-lower", "sqs-lower", "npa"])
    b.add_argument("functional", help="catalog name or functional JSON file")
    b.add_argument("--dim", type=int, default=2, help="local dimension D (lower bounds)")
    b.add_argument("--mode", choices=sorted(MODE_ALIASES), default="free", help="quantum-lower search mode")
    b.add_argument("--subspace", choices=["symmetric", "antisymmetric", "full"], default="full")
    b.add_argument("--restarts", type=int, default=20)
    b.add_argument("--seed", type=int, default=DEFAULT_SEED)
    b.add_argument("--out", help="write the best strategy as JSON")
    b.add_argument("--level", default="1", choices=["1", "1ab", "2"], help="NPA level")
    b.add_argument("--symmetric", action="store_true", help="party-swap twirled NPA program")
    b.add_argument("--sdpa-out", help="export the NPA program in SDPA sparse format")
    add_json(b)
    b.set_defaults(handler=cmd_bound)

    e = sub.add_parser("eval", help="Bell value of a strategy")
    e.add_argument("functional")
    e.add_argument("strategy")
    add_json(e)
    e.set_defaults(handler=cmd_eval)

    k = sub.add_parser("check", help="symmetry diagnostics of a strategy")
    k.add_argument("what", choices=["symmetry"])
    k.add_argument("strategy")
    add_json(k)
    k.set_defaults(handler=cmd_check)

    n = sub.add_parser("negativity", help="negativity of a strategy's state")
    n.add_argument("strategy", nargs="?")
    n.add_argument("--cglmp", type=int, help="use the optimal CGLMP state for this d instead")
    add_json(n)
    n.set_defaults(handler=cmd_negativity)

    csv_help = "CSV columns: alpha, local (exact local bound), sqs_qubit (best qubit SQS), quantum (qubit see-saw)"
    s = sub.add_parser("sweep", help="parameter sweeps", description=csv_help)
    s.add_argument("family", choices=["is-alpha"])
    s.add_argument("--from", dest="start", type=float, default=1.5)
    s.add_argument("--to", dest="stop", type=float, default=3.0)
    s.add_argument("--steps", type=int, default=61)
    s.add_argument("--restarts", type=int, default=10)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--out")
    s.set_defaults(handler=cmd_sweep)

    r = sub.add_parser("reproduce", help="regenerate reference tables as CSV",
                       description="cglmp-values: d, cglmp_value, reference, abs_diff; "
                                   "negativity: d, negativity, reference; fig2: " + csv_help)
    r.add_argument("table", choices=["cglmp-values", "negativity", "fig2"])
    r.add_argument("--dmax", type=int, default=8)
    r.add_argument("--steps", type=int, default=61)
    r.add_argument("--restarts", type=int, default=10)
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--out")
    r.set_defaults(handler=cmd_reproduce)
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    except (SdpError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
