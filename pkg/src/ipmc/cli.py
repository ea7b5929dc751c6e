"""Command-line interface.

Subcommands::

    models   list bundled example models or print one's path
    check    per-state verdicts for a formula; exit 0 iff the initial state satisfies it
    eval     per-state numeric values of a threshold formula's operand
    table    CSV of hitting probabilities for t = 0..horizon
    sweep    CSV of lower/upper hitting bands over a contamination grid
    cost     expected cumulative cost aggregated over patient/state counts
    oracle   (debugging) brute-force a query by path enumeration
"""

from __future__ import annotations

import argparse
import sys

from . import logic, modelio, oracle
from .errors import IpmcError
from .inference import (
    Mode,
    expected_cumulative_reward,
    hitting_trajectory,
)


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _load(path):
    return modelio.load_model(path)


def _target_set(model, text):
    return logic.sat_set(model, logic.parse_formula(text))


def _add_model_argument(parser):
    parser.add_argument("model", help="path to a model JSON document")


def _add_common_flags(parser):
    parser.add_argument("--tolerance", type=float, default=1e-9,
                        help="threshold comparison tolerance (default 1e-9)")
    parser.add_argument("--paper-literal-bounded-reward", action="store_true",
                        dest="paper_literal",
                        help="use the published bounded-reward recursion "
                             "variant instead of the path-enumeration-"
                             "consistent one")


def _cmd_models(args) -> int:
    if args.name:
        print(modelio.bundled_model_path(args.name))
    else:
        for name in modelio.bundled_model_names():
            print(name)
    return 0


def _read_formula(args):
    if args.formula_file:
        with open(args.formula_file, "r", encoding="utf-8") as handle:
            return handle.read().strip()
    if not args.formula:
        raise IpmcError("provide a formula or --formula-file")
    return args.formula


def _cmd_check(args) -> int:
    model = _load(args.model)
    result = logic.check(model, _read_formula(args), tolerance=args.tolerance,
                         paper_literal=args.paper_literal)
    for state in model.space.states:
        verdict = "SAT" if result.satisfied[state] else "UNSAT"
        line = f"{state}: {verdict}"
        if result.values is not None:
            line += f" value={_fmt(result.values[state])}"
        print(line)
    initial = model.initial
    if initial is None:
        print("model declares no initial state", file=sys.stderr)
        return 2
    if isinstance(initial, str):
        return 0 if result.satisfied[initial] else 1
    # distribution: demand satisfaction on its whole support
    return 0 if all(result.satisfied[s] for s in initial.support()) else 1


def _cmd_eval(args) -> int:
    model = _load(args.model)
    formula = logic.parse_formula(_read_formula(args))
    if not isinstance(formula, (logic.Prob, logic.ExpReward)):
        raise IpmcError("eval needs a probability or reward threshold formula")
    result = logic.check(model, formula, tolerance=args.tolerance,
                         paper_literal=args.paper_literal)
    for state in model.space.states:
        print(f"{state} {_fmt(result.values[state])}")
    return 0


def _cmd_table(args) -> int:
    model = _load(args.model)
    horizon = model.horizon if args.horizon is None else args.horizon
    targets = _target_set(model, args.target)
    mode = Mode.from_string(args.mode)
    grid = hitting_trajectory(model, targets, horizon, mode)
    print("t," + ",".join(model.space.states))
    for t, row in enumerate(grid):
        print(f"{t}," + ",".join(_fmt(v) for v in row))
    return 0


def _cmd_sweep(args) -> int:
    doc = modelio.load_document(args.model)
    eps_values = [float(e) for e in args.eps.split(",") if e]
    if not eps_values:
        raise IpmcError("--eps needs at least one contamination level")
    base_horizon = args.horizon
    print("eps,t,state,lower,upper")
    for eps in eps_values:
        model = modelio.model_from_document(modelio.substitute_eps(doc, eps))
        horizon = model.horizon if base_horizon is None else base_horizon
        targets = _target_set(model, args.target)
        low = hitting_trajectory(model, targets, horizon, Mode.LOWER)
        high = hitting_trajectory(model, targets, horizon, Mode.UPPER)
        for t in range(horizon + 1):
            for i, state in enumerate(model.space.states):
                print(f"{eps:g},{t},{state},{_fmt(low[t, i])},{_fmt(high[t, i])}")
    return 0


def _parse_counts(text):
    counts = {}
    for chunk in text.split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        if "=" not in chunk:
            raise IpmcError(f"counts entry {chunk!r} is not NAME=NUMBER")
        name, _, value = chunk.partition("=")
        counts[name.strip()] = float(value)
        if counts[name.strip()] < 0:
            raise IpmcError("counts must be non-negative")
    if not counts:
        raise IpmcError("--counts needs at least one NAME=NUMBER entry")
    return counts


def _cmd_cost(args) -> int:
    model = _load(args.model)
    counts = _parse_counts(args.counts)
    for name in counts:
        model.space.position(name)  # validate
    horizon = model.horizon if args.horizon is None else args.horizon
    targets = _target_set(model, args.target)
    modes = [Mode.PRECISE] if model.is_precise else [Mode.LOWER, Mode.UPPER]
    for mode in modes:
        values = expected_cumulative_reward(model, targets, horizon, mode)
        total = sum(
            weight * values[model.space.position(name)]
            for name, weight in counts.items()
        )
        print(f"{mode.value} {total:.2f}")
    return 0


def _cmd_oracle(args) -> int:
    model = _load(args.model)
    kwargs = dict(horizon=args.horizon, budget=args.budget,
                  stationary=args.stationary)
    if args.target:
        kwargs["targets"] = _target_set(model, args.target)
    if args.phi1:
        kwargs["phi1"] = _target_set(model, args.phi1)
    if args.phi2:
        kwargs["phi2"] = _target_set(model, args.phi2)
    result = oracle.brute_force(model, args.query, args.state, **kwargs)
    if isinstance(result, tuple):
        print(f"lower {result[0]:.9f}")
        print(f"upper {result[1]:.9f}")
    else:
        print(f"value {result:.9f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipmc",
        description="Bounded-horizon model checking for Markov reward models "
                    "with interval/credal transition uncertainty.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("models", help="list bundled example models")
    p.add_argument("name", nargs="?", help="print the path of this model")
    p.set_defaults(func=_cmd_models)

    p = sub.add_parser("check", help="check a formula against a model")
    _add_model_argument(p)
    p.add_argument("formula", nargs="?", help="formula text")
    p.add_argument("--formula-file", help="read the formula from a file")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("eval", help="print the per-state value of a threshold formula")
    _add_model_argument(p)
    p.add_argument("formula", nargs="?", help="formula text")
    p.add_argument("--formula-file", help="read the formula from a file")
    _add_common_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("table", help="CSV of hitting probabilities over time")
    _add_model_argument(p)
    p.add_argument("--target", required=True,
                   help="state formula describing the target set")
    p.add_argument("--horizon", type=int, default=None,
                   help="number of transitions (default: model horizon)")
    p.add_argument("--mode", default="precise",
                   choices=["precise", "lower", "upper"])
    p.set_defaults(func=_cmd_table)

    p = sub.add_parser("sweep", help="CSV of hitting bands over a contamination grid")
    _add_model_argument(p)
    p.add_argument("--target", required=True,
                   help="state formula describing the target set")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--eps", required=True,
                   help="comma-separated contamination levels, e.g. 0.01,0.02")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("cost", help="aggregate expected cumulative cost")
    _add_model_argument(p)
    p.add_argument("--counts", required=True,
                   help="comma-separated NAME=NUMBER state multiplicities")
    p.add_argument("--target", required=True,
                   help="state formula describing the stopping set")
    p.add_argument("--horizon", type=int, default=None)
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("oracle")  # debugging helper, undocumented
    _add_model_argument(p)
    p.add_argument("--query", required=True, choices=list(oracle.QUERIES))
    p.add_argument("--state", required=True)
    p.add_argument("--target")
    p.add_argument("--phi1")
    p.add_argument("--phi2")
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--stationary", action="store_true")
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IpmcError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
