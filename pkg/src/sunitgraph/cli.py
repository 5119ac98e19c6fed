"""Command-line front end.

Every subcommand prints one JSON object to stdout (or writes it to --out);
diagnostics go to stderr.  Rationals are always "num/den" strings and every
object carries a "kind" field so ``verify`` can take any of them back.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import NamedTuple

from .cycles import (
    TARGET_ONE,
    TARGET_ZERO,
    admissible_lengths,
    build_induced_cycle,
    contiguous_violations,
    zero_sum_nondegenerate,
    zero_sum_plan,
)
from .equations import (
    DEFAULT_BOUND,
    SearchConfig,
    find_zero_subsum,
    solve_three_term,
    solve_two_term,
    solve_unit_sum,
)
from .errors import BudgetError, InvalidInputError, SUnitError
from .graphs import (
    SGraph,
    build_counterexample,
    cycle_to_graph,
    is_induced_representation,
    is_representation,
    search_induced_representation,
    witness_bound,
)
from .srat import PrimeSet, format_rational, is_s_integer, is_s_unit, p_valuation, parse_rational

CONFIG_ENV = "SUNIT_CONFIG"
DEFAULTS = {
    "primes": None,
    "bound": DEFAULT_BOUND,
    "budget": SearchConfig().max_candidates,
    "max_rewrites": SearchConfig().max_rewrites,
    "search_bound": None,
}


def _fmt_list(values) -> list:
    return [format_rational(v) for v in values]


def _parse_list(values) -> list:
    if not isinstance(values, list):
        raise InvalidInputError("expected a list of rationals")
    return [parse_rational(v) for v in values]


def _fmt_violations(pairs) -> list:
    return [list(p) for p in pairs]


# -- configuration -------------------------------------------------------------------


def load_env_config() -> dict:
    path = os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {CONFIG_ENV}={path}: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidInputError(f"{CONFIG_ENV} must hold a JSON object")
    unknown = set(data) - set(DEFAULTS)
    if unknown:
        raise InvalidInputError(f"unknown keys in {CONFIG_ENV}: {sorted(unknown)}")
    return data


def resolve_config(args) -> dict:
    """Flags override the SUNIT_CONFIG file, which overrides the defaults."""
    merged = dict(DEFAULTS)
    merged.update(load_env_config())
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    if merged["primes"] is None:
        raise InvalidInputError("--primes is required (flag or config file)")
    primes = merged["primes"]
    if isinstance(primes, str):
        merged["primes"] = PrimeSet.parse(primes)
    else:
        merged["primes"] = PrimeSet.of(primes)
    for key in ("bound", "budget", "max_rewrites", "search_bound"):
        if key == "search_bound" and merged[key] is None:
            continue
        if not isinstance(merged[key], int) or isinstance(merged[key], bool):
            raise InvalidInputError(f"{key} must be an integer")
    merged["search"] = SearchConfig(merged["bound"], merged["budget"], merged["max_rewrites"])
    return merged


# -- verification blocks, shared by the producers and by ``verify`` ---------------------


def sequence_checks(units, S: PrimeSet, target: str) -> dict:
    expected = 1 if target == TARGET_ONE else 0
    total = sum(units, Fraction(0))
    out = {
        "s_units": all(is_s_unit(u, S) for u in units),
        "sum": total == expected,
        "sum_value": format_rational(total),
    }
    steps = list(units) + [Fraction(-1)] if target == TARGET_ONE else list(units)
    if sum(steps, Fraction(0)) == 0:
        witness = find_zero_subsum(steps, proper=True)
        out["nondegenerate"] = witness is None
        out["zero_subsum_witness"] = list(witness) if witness is not None else None
    else:
        out["nondegenerate"] = False
        out["zero_subsum_witness"] = None
    if target == TARGET_ONE:
        bad = contiguous_violations(units, S, exempt={(0, len(units) - 1)})
        out["induced_condition"] = not bad
        out["induced_violations"] = _fmt_violations(bad)
    return out


def cycle_checks(units, vertices, S: PrimeSet) -> dict:
    out = sequence_checks(units, S, TARGET_ONE)
    rep = cycle_to_graph(_Cycle(tuple(vertices), S))
    G, values = rep.graph, rep.values
    out["representation"] = is_representation(G, values).ok
    induced = is_induced_representation(G, values)
    out["induced_representation"] = induced.ok
    out["representation_violations"] = [list(v) for v in induced.violations]
    return out


def graph_checks(G: SGraph, values: dict) -> dict:
    rep = is_representation(G, values)
    induced = is_induced_representation(G, values)
    return {
        "representation": rep.ok,
        "induced_representation": induced.ok,
        "representation_violations": [list(v) for v in induced.violations],
    }


class _Cycle(NamedTuple):
    # vertices as read back from JSON, which need not form a valid cycle
    vertices: tuple
    prime_set: PrimeSet


def _passed(checks: dict, keys) -> bool:
    return all(checks[k] for k in keys)


CYCLE_KEYS = ("s_units", "sum", "nondegenerate", "induced_condition", "induced_representation")
ZERO_KEYS = ("s_units", "sum", "nondegenerate")


# -- subcommands ---------------------------------------------------------------------


def cmd_check(args) -> tuple:
    cfg = resolve_config(args)
    S = cfg["primes"]
    x = parse_rational(args.x)
    vals = {str(p): (p_valuation(x, p) if x != 0 else None) for p in S}
    out = {
        "kind": "check",
        "primes": S.to_json(),
        "x": format_rational(x),
        "s_unit": is_s_unit(x, S),
        "s_integer": is_s_integer(x, S),
        "valuations": vals,
    }
    return out, 0


def cmd_cycle(args) -> tuple:
    cfg = resolve_config(args)
    S = cfg["primes"]
    base = parse_rational(args.base) if args.base is not None else Fraction(0)
    adm = admissible_lengths(S)
    cycle = build_induced_cycle(S, args.n, base, cfg["search"])
    units = [b - a for a, b in zip(cycle.vertices, cycle.vertices[1:])]
    checks = cycle_checks(units, cycle.vertices, S)
    out = {
        "kind": "cycle",
        "primes": S.to_json(),
        "n": args.n,
        "base": format_rational(base),
        "admissible": {"modulus": adm.modulus, "residue": adm.residue},
        "units": _fmt_list(units),
        "vertices": _fmt_list(cycle.vertices),
        "verification": checks,
    }
    return out, 0 if _passed(checks, CYCLE_KEYS) else 1


def cmd_zerosum(args) -> tuple:
    cfg = resolve_config(args)
    S = cfg["primes"]
    plan = zero_sum_plan(S, args.n)
    seq = zero_sum_nondegenerate(S, args.n)
    checks = sequence_checks(seq.units, S, TARGET_ZERO)
    out = {
        "kind": "zerosum",
        "primes": S.to_json(),
        "n": args.n,
        "target": TARGET_ZERO,
        "plan": plan._asdict(),
        "units": _fmt_list(seq.units),
        "verification": checks,
    }
    return out, 0 if _passed(checks, ZERO_KEYS) else 1


def cmd_solve(args) -> tuple:
    cfg = resolve_config(args)
    S, search = cfg["primes"], cfg["search"]
    if args.equation == "two_term":
        a = parse_rational(args.a if args.a is not None else "1")
        b = parse_rational(args.b if args.b is not None else "1")
        sols = solve_two_term(a, b, S, search)
        rows = [_fmt_list(s) for s in sols]
        params = {"a": format_rational(a), "b": format_rational(b)}
    elif args.equation == "three_term":
        sols = solve_three_term(S, search)
        rows = [
            {"x": format_rational(s.x), "y": format_rational(s.y), "z": format_rational(s.z),
             "tag": s.tag, "nondegenerate": s.tag == "none"}
            for s in sols
        ]
        params = {}
    else:
        if args.k is None:
            raise InvalidInputError("unitsum needs --k")
        sols = solve_unit_sum(S, args.k, search, positive_only=args.positive,
                              nondegenerate_only=not args.all)
        rows = [_fmt_list(s) for s in sols]
        params = {"k": args.k, "positive_only": args.positive, "nondegenerate_only": not args.all}
    out = {
        "kind": "solutions",
        "header": sols.header(),
        "params": params,
        "count": len(rows),
        "solutions": rows,
    }
    return out, 0


def cmd_counterexample(args) -> tuple:
    cfg = resolve_config(args)
    S, search = cfg["primes"], cfg["search"]
    ce = build_counterexample(S, search)
    checks = graph_checks(ce.graph_minus, ce.witness.values)
    # the certifying search covers the box the auxiliary shift was drawn from
    deep_bound = cfg["search_bound"] if cfg["search_bound"] is not None else witness_bound(search)
    deep = search.with_bound(deep_bound)
    minus = search_induced_representation(ce.graph_minus, deep, ce.anchor)
    try:
        full = search_induced_representation(ce.graph, deep, ce.anchor)
        full_json = {"found": full.found, "nodes_expanded": full.nodes_expanded,
                     "values": ({str(v): format_rational(q) for v, q in full.values.items()}
                                if full.found else None)}
    except BudgetError as exc:
        full_json = {"found": None, "nodes_expanded": exc.size, "values": None}
    details = {}
    for key, value in ce.details.items():
        if isinstance(value, Fraction):
            details[key] = format_rational(value)
        elif isinstance(value, list):
            details[key] = _fmt_list(value)
        else:
            details[key] = value
    out = {
        "kind": "counterexample",
        "primes": S.to_json(),
        "bound_H": ce.bound,
        "case": ce.case,
        "graph": ce.graph.to_json(),
        "graph_minus": ce.graph_minus.to_json(),
        "omitted_edge": list(ce.omitted_edge),
        "anchor": list(ce.anchor),
        "witness": {str(v): format_rational(q) for v, q in ce.witness.values.items()},
        "details": details,
        "verification": checks,
        "certificate": {
            "search_bound": deep.bound,
            "graph_minus_search": {"found": minus.found, "nodes_expanded": minus.nodes_expanded},
            "graph_search": full_json,
        },
    }
    ok = checks["representation"] and not checks["induced_representation"] and not minus.found
    return out, 0 if ok else 1


# -- verify ----------------------------------------------------------------------------


def _load_graph(doc: dict, S: PrimeSet, key: str = "graph") -> SGraph:
    g = doc[key]
    return SGraph(tuple(g["vertices"]), frozenset(frozenset(e) for e in g["edges"]), S)


def verify_document(doc: dict) -> tuple:
    """Recompute the verification block of any object the CLI emits."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise InvalidInputError("input must be a JSON object with a 'kind' field")
    kind = doc["kind"]
    try:
        S = PrimeSet.of(doc["primes"])
        if kind == "cycle":
            units = _parse_list(doc["units"])
            vertices = _parse_list(doc["vertices"])
            checks = cycle_checks(units, vertices, S)
            keys = CYCLE_KEYS
        elif kind in ("zerosum", "sequence"):
            units = _parse_list(doc["units"])
            target = doc.get("target", TARGET_ZERO)
            if target not in (TARGET_ONE, TARGET_ZERO):
                raise InvalidInputError(f"unknown target {target!r}")
            checks = sequence_checks(units, S, target)
            keys = ZERO_KEYS if target == TARGET_ZERO else CYCLE_KEYS[:4]
        elif kind == "counterexample":
            G = _load_graph(doc, S, "graph_minus")
            values = {v: parse_rational(q) for v, q in doc["witness"].items()}
            checks = graph_checks(G, values)
            keys = None
        elif kind == "graph":
            G = _load_graph({"graph": doc}, S)
            values = {v: parse_rational(q) for v, q in doc["values"].items()}
            checks = graph_checks(G, values)
            keys = ("representation", "induced_representation")
        else:
            raise InvalidInputError(f"cannot verify objects of kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed {kind!r} object: missing or bad field {exc}") from exc
    if keys is None:
        # a certificate witness must represent G- without being induced
        passed = checks["representation"] and not checks["induced_representation"]
    else:
        passed = _passed(checks, keys)
    embedded = doc.get("verification")
    report = {
        "kind": "verify_report",
        "input_kind": kind,
        "verification": checks,
        "passed": passed,
        "matches_embedded": None if embedded is None else embedded == checks,
    }
    return report, 0 if passed else 1


def cmd_verify(args) -> tuple:
    try:
        if args.input == "-":
            doc = json.load(sys.stdin)
        else:
            with open(args.input) as fh:
                doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read {args.input}: {exc}") from exc
    return verify_document(doc)


# -- argument parsing ------------------------------------------------------------------


def _common(sub):
    sub.add_argument("--primes", help="comma-separated primes, e.g. 3,7")
    sub.add_argument("--bound", type=int, help=f"exponent bound H (default {DEFAULT_BOUND})")
    sub.add_argument("--budget", type=int, help="node / candidate budget")
    sub.add_argument("--out", help="write JSON here instead of stdout")
    sub.add_argument("--json", action="store_true", help="JSON output (the default and only format)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sunitgraph", description="S-unit graph toolkit")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("check", help="classify a rational with respect to S")
    p.add_argument("x")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("cycle", help="induced cycle of length n")
    p.add_argument("n", type=int)
    p.add_argument("--base", help="value of the first vertex")
    _common(p)
    p.set_defaults(func=cmd_cycle)

    p = subs.add_parser("zerosum", help="nondegenerate zero sum of n S-units")
    p.add_argument("n", type=int)
    _common(p)
    p.set_defaults(func=cmd_zerosum)

    p = subs.add_parser("solve", help="bounded solution lists of unit equations")
    p.add_argument("equation", choices=("two_term", "three_term", "unitsum"))
    p.add_argument("--a", help="coefficient a of a x + b y = 1")
    p.add_argument("--b", help="coefficient b of a x + b y = 1")
    p.add_argument("--k", type=int, help="number of terms for unitsum")
    p.add_argument("--positive", action="store_true", help="unitsum: positive units only")
    p.add_argument("--all", action="store_true", help="unitsum: keep degenerate solutions")
    _common(p)
    p.set_defaults(func=cmd_solve)

    p = subs.add_parser("counterexample", help="subgraph that is not an induced subgraph")
    p.add_argument("--search-bound", type=int, dest="search_bound",
                   help="exponent bound of the certifying search (default 2H+2)")
    _common(p)
    p.set_defaults(func=cmd_counterexample)

    p = subs.add_parser("verify", help="re-check a JSON object produced by another subcommand")
    p.add_argument("input", help="path, or - for stdin")
    p.add_argument("--out", help="write JSON here instead of stdout")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)
    return parser


def emit(obj: dict, out_path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        obj, code = args.func(args)
    except SUnitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    emit(obj, args.out)
    if code:
        print("verification failed", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
