"""Command-line interface: ``sigmalab <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from . import __version__, kdesc, ordinals, progressions, sigma
from .cnf import format_cnf
from .search import (ChampionReport, Classification, Holdout, SearchPolicy,
                     busy_beaver, classify, classify_units, work_units)
from .tm import decode_machine, encode_machine, parse_machine

EXIT_HOLDOUTS = 2
EXIT_INTERRUPTED = 3


# -- helpers -----------------------------------------------------------------


def _policy(args: argparse.Namespace) -> SearchPolicy:
    fuel = [args.fuel, args.fuel_stage2]
    if args.fuel_stage3:
        fuel.append(args.fuel_stage3)
    deciders = tuple(d for d in args.deciders.split(",") if d) if args.deciders else ()
    return SearchPolicy(fuel=tuple(fuel), deciders=deciders,
                        decider_fuel_cap=max(args.fuel, args.fuel_stage2),
                        split_depth=args.split_depth)


def _policy_dict(p: SearchPolicy) -> dict:
    return {"fuel": list(p.fuel), "deciders": list(p.deciders),
            "decider_fuel_cap": p.decider_fuel_cap, "split_depth": p.split_depth}


def _dump(obj: object) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _class_pair(text: str) -> tuple[int, int]:
    n, m = text.split(",")
    return int(n), int(m)


def _registry(args: argparse.Namespace) -> ordinals.Registry:
    reg = ordinals.Registry.load(args.registry) if args.registry else ordinals.Registry()
    ordinals.canonical_omega(reg, args.probe_bound)
    return reg


def _answer(a: object) -> str:
    return "Unknown" if a is ordinals.UNKNOWN else str(a)


# -- search ------------------------------------------------------------------


def cmd_search(args: argparse.Namespace) -> int:
    policy = _policy(args)
    n, k = args.states, args.symbols
    out = Path(args.out or f"search-{n}x{k}")
    out.mkdir(parents=True, exist_ok=True)
    db, ckpt_path, report_path = out / "machines.jsonl", out / "checkpoint.json", out / "report.json"
    units = work_units(n, k, policy)
    header = {"class": [n, k], "policy": _policy_dict(policy), "units_total": len(units)}

    report = ChampionReport(n, k)
    done, lines = 0, 0
    if args.resume and ckpt_path.exists():
        ckpt = json.loads(ckpt_path.read_text())
        if {key: ckpt[key] for key in header} != header:
            print("checkpoint belongs to a different class or policy", file=sys.stderr)
            return 1
        done, lines = ckpt["units_done"], ckpt["records"]
        kept = db.read_text().splitlines(keepends=True)[:lines] if db.exists() else []
        if len(kept) != lines:
            print("database is shorter than the checkpoint", file=sys.stderr)
            return 1
        db.write_text("".join(kept))
        for line in kept:
            report.add(Classification.from_record(json.loads(line)))
    else:
        db.write_text("")
        report_path.unlink(missing_ok=True)

    todo = units[done:]
    if args.stop_after_units is not None:
        todo = todo[:args.stop_after_units]
    workers = 1 if args.stop_after_units is not None else args.workers
    with db.open("a") as fh:
        for records in classify_units(n, k, policy, todo, workers):
            for rec in records:
                fh.write(json.dumps(rec.to_record(), sort_keys=True) + "\n")
                report.add(rec)
            lines += len(records)
            done += 1
            fh.flush()
            _write_atomic(ckpt_path, _dump(header | {"units_done": done, "records": lines}))

    if done < len(units):
        print(f"stopped after {done}/{len(units)} units; rerun with --resume", file=sys.stderr)
        return EXIT_INTERRUPTED

    doc = report.to_dict() | {"policy": _policy_dict(policy), "records": lines}
    if not args.no_timestamps:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    _write_atomic(report_path, _dump(doc))
    label = "exact" if report.exact else "lower bounds"
    print(f"class ({n},{k}): S={report.S} Sigma={report.Sigma} ({label})")
    print(f"halting={report.halting} non_halting={report.non_halting} holdout={report.holdout}")
    if report.steps_champion is not None:
        print(f"steps champion: {report.steps_champion}")
        print(f"score champion: {report.score_champion}")
    return 0 if report.exact else EXIT_HOLDOUTS


def cmd_classify(args: argparse.Namespace) -> int:
    m = parse_machine(args.machine) if args.machine else decode_machine(args.code)
    verdict = classify(m, _policy(args), args.input)
    rec = Classification(encode_machine(m), m, verdict).to_record()
    print(json.dumps(rec, sort_keys=True))
    return EXIT_HOLDOUTS if isinstance(verdict, Holdout) else 0


def _print_rows(rows, as_json: bool) -> None:
    for row in rows:
        if as_json:
            print(json.dumps(row._asdict()))
        else:
            print(f"{row.i}\t{row.value}\t{'exact' if row.exact else 'lower-bound'}")


def cmd_sigma_steps(args: argparse.Namespace) -> int:
    _print_rows(sigma.iter_sigma_steps(args.code_max, _policy(args)), args.json)
    return 0


def cmd_sigma_value(args: argparse.Namespace) -> int:
    _print_rows(sigma.iter_sigma_value(args.code_max, _policy(args)), args.json)
    return 0


def cmd_relate_sigmas(args: argparse.Namespace) -> int:
    print(_dump(sigma.relate_sigmas(args.code_max, _policy(args)).to_dict()), end="")
    return 0


# -- descriptional complexity -------------------------------------------------


def cmd_kphi(args: argparse.Namespace) -> int:
    table = kdesc.k_table(args.x, args.y, args.index_budget, args.kfuel)
    if args.out:
        with open(args.out, "w") as fh:
            kdesc.write_k_table(table, args.y, fh)
    for x, r in table.items():
        if isinstance(r, kdesc.Found):
            print(f"K({x}|{args.y}) = {r.index}  (fuel used {r.fuel_used})")
        else:
            print(f"K({x}|{args.y}) > {r.index_budget}  (fuel {r.fuel})")
    return 0


def cmd_incompressibles(args: argparse.Namespace) -> int:
    xs = sorted(kdesc.incompressibles(args.bound, args.index_budget, args.kfuel))
    print(" ".join(map(str, xs)))
    return 0


def cmd_halting(args: argparse.Namespace) -> int:
    r = kdesc.in_diagonal_halting(args.n, args.kfuel)
    print("Yes" if isinstance(r, kdesc.Yes) else "Unknown")
    return 0


# -- ordinals ----------------------------------------------------------------


def cmd_ord_cmp(args: argparse.Namespace) -> int:
    print(_answer(ordinals.precedes(args.a, args.b, args.ofuel, _registry(args))))
    return 0


def cmd_ord_value(args: argparse.Namespace) -> int:
    try:
        print(format_cnf(ordinals.ordinal_value(args.a, _registry(args))))
    except (ordinals.UnregisteredLimit, ordinals.NotANotation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def _probe_text(r: ordinals.ProbeResult) -> str:
    if isinstance(r, ordinals.CycleFound):
        return "CycleFound " + " -> ".join(ordinals.describe(c) for c in r.path)
    if isinstance(r, ordinals.Ok):
        return f"Ok (explored {r.explored})"
    return f"Unknown ({r.reason})"


def cmd_ord_pathological(args: argparse.Namespace) -> int:
    rep = ordinals.pathological_limit(args.ofuel)
    print(f"e = {rep.e}")
    print(f"phi_e(0) = succ(lim(e)): {rep.matches}")
    print(f"lim(e) < phi_e(0): {_answer(rep.limit_below_first)}")
    print(f"phi_e(0) < lim(e): {_answer(rep.first_below_limit)}")
    print(f"probe: {_probe_text(rep.probe)}")
    return 0


def cmd_ord_probe(args: argparse.Namespace) -> int:
    print(_probe_text(ordinals.well_founded_probe(args.a, args.ofuel, args.width)))
    return 0


def cmd_ord_omega(args: argparse.Namespace) -> int:
    reg = _registry(args)
    entry = ordinals.canonical_omega(reg, args.probe_bound)
    print(f"prog = {entry.prog}")
    print(f"notation = {entry.notation}")
    print(f"value = {format_cnf(entry.claimed_value)} (probed n <= {entry.probe_bound})")
    print(f"probe: {_probe_text(ordinals.well_founded_probe(entry.notation, args.ofuel))}")
    if args.registry_out:
        reg.save(args.registry_out)
    return 0


# -- progressions and verification ---------------------------------------------


def cmd_prog_expand(args: argparse.Namespace) -> int:
    tree = progressions.expand_progression(args.base, args.a, args.limit_prefix,
                                           args.depth, args.ofuel, args.ofuel)
    print(progressions.tree_json(tree) if args.json else progressions.format_outline(tree))
    return 0


def cmd_prog_branch(args: argparse.Namespace) -> int:
    r = progressions.branch_check(args.codes, args.ofuel, _registry(args))
    if isinstance(r, progressions.LinearlyOrdered):
        print("LinearlyOrdered")
    else:
        print(f"{'Incomparable' if isinstance(r, progressions.Incomparable) else 'Unknown'} "
              f"{r.pair[0]} {r.pair[1]}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    stmts = progressions.parse_statements(Path(args.statements).read_text())
    if args.bound_from_class:
        n, k = _class_pair(args.bound_from_class)
        report = busy_beaver(n, k, _policy(args))
        bound, trusted = report.S, report.exact
        if not trusted:
            print(f"class ({n},{k}) has holdouts; its S is not a trusted bound", file=sys.stderr)
    elif args.bound is not None:
        bound, trusted = args.bound, args.trusted_bound
    else:
        print("give --bound or --bound-from-class", file=sys.stderr)
        return 1
    for stmt in stmts:
        outcome = progressions.verify_pi1_with_bound(stmt, bound, trusted)
        print(json.dumps(progressions.outcome_record(stmt, bound, trusted, outcome), sort_keys=True))
    return 0


# -- parser ------------------------------------------------------------------


def _add_policy(p: argparse.ArgumentParser) -> None:
    d = SearchPolicy()
    p.add_argument("--fuel", type=int, default=d.fuel[0], help="first fuel stage")
    p.add_argument("--fuel-stage2", type=int, default=d.fuel[1], help="second fuel stage")
    p.add_argument("--fuel-stage3", type=int, default=0,
                   help="optional third stage (simulation only)")
    p.add_argument("--deciders", default=",".join(d.deciders),
                   help="comma-separated decider names (empty for none)")
    p.add_argument("--split-depth", type=int, default=d.split_depth, help=argparse.SUPPRESS)


def _add_registry(p: argparse.ArgumentParser) -> None:
    p.add_argument("--registry", help="registry file (line-delimited records) to load")
    p.add_argument("--probe-bound", type=int, default=20)
    p.add_argument("--fuel", dest="ofuel", type=int, default=1_000_000)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigmalab", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file of option defaults for the command")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="exhaustive busy beaver search of a class")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--symbols", type=int, default=2)
    p.add_argument("--out", help="output directory (default search-NxM)")
    p.add_argument("--resume", action="store_true")
    p.add_argument("--no-timestamps", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--stop-after-units", type=int, help=argparse.SUPPRESS)
    _add_policy(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("classify", help="classify one machine")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--machine", help="machine text, e.g. 1RB1LB_1LA1RZ")
    g.add_argument("--code", type=int)
    p.add_argument("--input", type=int, default=0)
    _add_policy(p)
    p.set_defaults(func=cmd_classify)

    for name, func in (("sigma-steps", cmd_sigma_steps), ("sigma-value", cmd_sigma_value)):
        p = sub.add_parser(name, help=f"table of {name.replace('-', ' ')} over codes")
        p.add_argument("--code-max", type=int, required=True)
        p.add_argument("--json", action="store_true", help="one JSON record per row")
        _add_policy(p)
        p.set_defaults(func=func)

    p = sub.add_parser("relate-sigmas", help="compare the two sigma functions")
    p.add_argument("--code-max", type=int, required=True)
    _add_policy(p)
    p.set_defaults(func=cmd_relate_sigmas)

    def kbudgets(p: argparse.ArgumentParser, fuel: int = 1000) -> None:
        p.add_argument("--index-budget", type=int, default=100_000)
        p.add_argument("--fuel", dest="kfuel", type=int, default=fuel)

    p = sub.add_parser("kphi", help="least program index printing x")
    p.add_argument("x", type=int, nargs="+")
    p.add_argument("--y", type=int, default=0)
    p.add_argument("--out", help="write line-delimited records here")
    kbudgets(p)
    p.set_defaults(func=cmd_kphi)

    p = sub.add_parser("incompressibles", help="x <= bound with K(x) >= x")
    p.add_argument("--bound", type=int, required=True)
    kbudgets(p)
    p.set_defaults(func=cmd_incompressibles)

    p = sub.add_parser("halting", help="semi-decide phi_n(n)")
    p.add_argument("n", type=int)
    kbudgets(p, 10_000)
    p.set_defaults(func=cmd_halting)

    p = sub.add_parser("ord", help="ordinal notations")
    osub = p.add_subparsers(dest="ord_command", required=True)
    q = osub.add_parser("cmp", help="does a precede b")
    q.add_argument("a", type=int)
    q.add_argument("b", type=int)
    _add_registry(q)
    q.set_defaults(func=cmd_ord_cmp)
    q = osub.add_parser("value", help="ordinal denoted by a")
    q.add_argument("a", type=int)
    _add_registry(q)
    q.set_defaults(func=cmd_ord_value)
    q = osub.add_parser("pathological", help="build the self-referential limit")
    _add_registry(q)
    q.set_defaults(func=cmd_ord_pathological)
    q = osub.add_parser("probe", help="look for descending cycles below a")
    q.add_argument("a", type=int)
    q.add_argument("--width", type=int, default=3)
    _add_registry(q)
    q.set_defaults(func=cmd_ord_probe)
    q = osub.add_parser("omega", help="register the canonical omega sequence")
    q.add_argument("--registry-out")
    _add_registry(q)
    q.set_defaults(func=cmd_ord_omega)

    p = sub.add_parser("prog", help="progressions of theories")
    psub = p.add_subparsers(dest="prog_command", required=True)
    q = psub.add_parser("expand", help="unfold T_a")
    q.add_argument("a", type=int)
    q.add_argument("--base", default="PA")
    q.add_argument("--limit-prefix", type=int, default=3)
    q.add_argument("--depth", type=int, default=4)
    q.add_argument("--json", action="store_true")
    _add_registry(q)
    q.set_defaults(func=cmd_prog_expand)
    q = psub.add_parser("branch", help="are the notations pairwise comparable")
    q.add_argument("codes", type=int, nargs="+")
    _add_registry(q)
    q.set_defaults(func=cmd_prog_branch)

    p = sub.add_parser("verify", help="bounded verification of universal statements")
    p.add_argument("statements", help="file with one JSON statement per line")
    p.add_argument("--bound", type=int)
    p.add_argument("--bound-from-class", metavar="N,M",
                   help="use S(N,M) from an exhaustive search as a trusted bound")
    p.add_argument("--trusted-bound", action="store_true",
                   help="treat --bound as at least every halting time")
    _add_policy(p)
    p.set_defaults(func=cmd_verify)
    for leaf in _leaves(parser):
        leaf.set_defaults(leaf_parser=leaf)
    return parser


def _leaves(parser: argparse.ArgumentParser) -> list[argparse.ArgumentParser]:
    subs = [a for a in parser._actions if isinstance(a, argparse._SubParsersAction)]
    if not subs:
        return [parser]
    return [leaf for a in subs for p in a.choices.values() for leaf in _leaves(p)]


def _apply_config(parser: argparse.ArgumentParser, argv: Sequence[str]) -> argparse.Namespace:
    """Config file values become defaults of the chosen command; flags still win."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    conf = {k.replace("-", "_"): v for k, v in json.loads(Path(args.config).read_text()).items()}
    leaf = args.leaf_parser
    dests = {a.dest for a in leaf._actions} - {"help", "leaf_parser", "func"}
    unknown = sorted(set(conf) - dests)
    if unknown:
        parser.error(f"unknown config keys: {', '.join(unknown)}")
    leaf.set_defaults(**conf)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
