"""Command-line front end.

    frugality bounds --instance diamond-example3
    frugality bounds --instance choice-of-s --set S2
    frugality mech --rule local-ratio --instance random:vc,n=8,seed=7
    frugality suite --all --seeds 100
    frugality suite --only audit --delta 4 --rule local-ratio

``--instance`` takes a JSON instance file, a named instance or a random
spec ``random:<kind>,n=<n>,seed=<seed>[,max_degree=..,low=..,high=..]``.
Exit codes: 0 success, 1 malformed input or failed check, 2 monopoly,
3 cap exceeded. Budgets come from ``FRUGALITY_CAPS``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

from .bounds import CHAIN, all_bounds, bound
from .config import default_caps
from .core import candidate_sets, cheapest_sets, fmt, load_instance
from .errors import CapExceeded, FrugalityError, InstanceFormatError, MonopolyDetected
from .generators import named_instance, random_instance
from .mechanisms import CSV_HEADER, csv_row, frugality, parse_rule
from .suite import AUDIT_RULES, CHECKS, DEFAULT_INSTANCES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_MONOPOLY, EXIT_CAP = 0, 1, 2, 3

_KIND_ALIASES = {"vc": "vertex_cover", "vertex_cover": "vertex_cover", "vertex-cover": "vertex_cover",
                 "explicit": "explicit", "path": "path", "matroid": "matroid"}


class UsageError(FrugalityError):
    pass


def resolve_instance(spec: str, caps=None):
    """``(system, costs)`` for a file path, random spec or named instance."""
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            system, costs, _ = load_instance(fh.read())
        return system, costs
    if spec.startswith("random:"):
        kind, *params = spec[len("random:"):].split(",")
        if kind not in _KIND_ALIASES:
            raise UsageError(f"unknown random kind {kind!r}")
        opts = {}
        for p in params:
            key, sep, value = p.partition("=")
            if not sep:
                raise UsageError(f"expected key=value in {spec!r}, got {p!r}")
            try:
                opts[key.strip()] = int(value)
            except ValueError:
                raise UsageError(f"{key} must be an integer in {spec!r}") from None
        if "n" not in opts or "seed" not in opts:
            raise UsageError("random instances need n=<n> and seed=<seed>")
        extra = set(opts) - {"n", "seed", "max_degree", "low", "high"}
        if extra:
            raise UsageError(f"unknown random parameters {sorted(extra)}")
        return random_instance(_KIND_ALIASES[kind], opts["n"], opts["seed"],
                               (opts.get("low", 0), opts.get("high", 10)),
                               max_degree=opts.get("max_degree"))
    return named_instance(spec)


def resolve_set(system, costs, text: str | None, caps):
    """``S<k>`` names the k-th candidate set (1-based); otherwise a comma list of agents."""
    if text is None:
        return None
    if text[:1] in "Ss" and text[1:].isdigit():
        sets = candidate_sets(system, caps)
        k = int(text[1:])
        if not 1 <= k <= len(sets):
            raise UsageError(f"{text}: there are {len(sets)} candidate sets")
        S = sets[k - 1]
    else:
        try:
            S = frozenset(system.agent(x.strip()) for x in text.split(","))
        except ValueError:
            raise UsageError(f"unknown agent in --set {text!r}") from None
    if S not in cheapest_sets(system, costs, caps):
        raise UsageError(f"--set {text} is not a cheapest feasible set")
    return S


def _table(rows) -> str:
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(str(c).ljust(w) for c, w in zip(r, widths)).rstrip() for r in rows)


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue().rstrip("\n")


def _set_text(system, S) -> str:
    return "{" + ", ".join(system.names(S)) + "}"


def cmd_bounds(args, caps) -> int:
    system, costs = resolve_instance(args.instance, caps)
    S = resolve_set(system, costs, args.set, caps)
    b = all_bounds(system, costs, S, caps)
    others = [T for T in cheapest_sets(system, costs, caps) if T != b.chosen_set]
    dependent = {k for k in CHAIN
                 if any(bound(k, system, costs, T, caps).value != b[k].value for T in others)}
    if args.format == "json":
        doc = {"instance": args.instance, "chosen_set": system.names(b.chosen_set),
               "bounds": b.to_json(system), "set_dependent": [k.value for k in CHAIN if k in dependent]}
        print(json.dumps(doc, indent=2))
    elif args.format == "csv":
        rows = [("instance", "chosen_set", "kind", "value", "note")]
        rows += [(args.instance, " ".join(system.names(b.chosen_set)), k.value, fmt(b[k].value),
                  "set-dependent" if k in dependent else "") for k in CHAIN]
        print(_csv(rows))
    else:
        print(f"instance    {args.instance}")
        print(f"chosen set  {_set_text(system, b.chosen_set)}")
        rows = [("bound", "value", "witness", "note")]
        for k in CHAIN:
            w = " ".join(f"{system.labels[e]}={fmt(v)}" for e, v in sorted(b[k].witness.items()))
            rows.append((k.value, fmt(b[k].value), w, "set-dependent" if k in dependent else ""))
        print(_table(rows))
    return EXIT_OK


def cmd_mech(args, caps) -> int:
    rule = parse_rule(args.rule)
    reports = []
    for spec in args.instance:
        system, costs = resolve_instance(spec, caps)
        reports.append((spec, system, frugality(rule, system, costs, caps)))
    if args.format == "csv":
        print(_csv([CSV_HEADER] + [csv_row(spec, rep) for spec, _, rep in reports]))
    elif args.format == "json":
        docs = [dict(instance=spec, **rep.to_json(system)) for spec, system, rep in reports]
        print(json.dumps(docs if len(docs) > 1 else docs[0], indent=2))
    else:
        for i, (spec, system, rep) in enumerate(reports):
            if i:
                print()
            out = rep.outcome
            print(f"instance  {spec}")
            print(f"rule      {rep.rule}")
            if rep.delta is not None:
                print(f"delta     {rep.delta}")
            print(f"selected  {_set_text(system, out.selected)}  cost {fmt(out.allocation_cost)}")
            print("payments  " + " ".join(f"{system.labels[e]}={fmt(p)}" for e, p in sorted(out.payments.items())))
            print(f"total     {fmt(out.total)}")
            rows = [("bound", "value", "ratio")]
            rows += [(k.value, fmt(rep.bounds[k].value), rep.ratio_text(k)
                      + (" (zero bound)" if k in rep.degenerate else "")) for k in CHAIN]
            print(_table(rows))
            for name, ok in rep.checks.items():
                print(f"check     {name}: {'yes' if ok else 'no'}")
    return EXIT_OK


def cmd_suite(args, caps) -> int:
    only = None
    if args.only and not args.all:
        only = [k.strip() for part in args.only for k in part.split(",") if k.strip()]
    options = {"instances": args.seeds}
    if args.delta is not None:
        options["deltas"] = (args.delta,)
    if args.rule is not None:
        options["rules"] = (parse_rule(args.rule),)
    try:
        results = run_suite(only, caps, **options)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        print(json.dumps([{"number": r.number, "key": r.key, "passed": r.passed, "detail": r.detail}
                          for r in results], indent=2))
    elif args.format == "csv":
        print(_csv([CSV_HEADER] + [row for r in results for row in r.rows]))
    else:
        for r in results:
            print(r.line())
            if len(results) == 1:
                for text in r.table:
                    print("    " + text)
        passed = sum(r.passed for r in results)
        print(f"{passed}/{len(results)} passed")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(_csv([CSV_HEADER] + [row for r in results for row in r.rows]) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_INPUT


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="frugality", description="Exact frugality payment bounds and truthful auctions.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt_opt = dict(choices=("table", "json", "csv"), default="table", help="output format")

    p = sub.add_parser("bounds", help="the four payment bounds with witnesses")
    p.add_argument("--instance", required=True, help="JSON file, named instance or random spec")
    p.add_argument("--set", help="winning set: S<k> for the k-th candidate set, or agent labels a,b,c")
    p.add_argument("--format", **fmt_opt)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("mech", help="run a mechanism and report its frugality ratios")
    p.add_argument("--rule", required=True, help="vcg, greedy, local-ratio, optionally with +transform")
    p.add_argument("--instance", required=True, action="append", help="repeat for a batch")
    p.add_argument("--format", **fmt_opt)
    p.set_defaults(func=cmd_mech)

    p = sub.add_parser("suite", help="run the end-to-end checks")
    p.add_argument("--all", action="store_true", help="run every check (default)")
    p.add_argument("--only", action="append", help=f"checks to run: {', '.join(CHECKS)}")
    p.add_argument("--seeds", type=int, default=DEFAULT_INSTANCES,
                   help="random instances per sweep (default %(default)s)")
    p.add_argument("--delta", type=int, help="audit only this delta")
    p.add_argument("--rule", help=f"audit only this rule (default: {', '.join(r.slug for r in AUDIT_RULES)})")
    p.add_argument("--format", **fmt_opt)
    p.add_argument("--csv", help="also write the measured ratios to this CSV file")
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        caps = default_caps()
    except ValueError as exc:
        print(f"error: FRUGALITY_CAPS: {exc}", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args, caps)
    except MonopolyDetected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MONOPOLY
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InstanceFormatError as exc:
        print(f"error: malformed instance: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FrugalityError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
