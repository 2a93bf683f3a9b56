"""Command-line front end.

Every subcommand prints one report (JSON by default) on standard output.
Exit status: 0 success, 1 a computed negative outcome, 2 a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import re
import sys
import time
from pathlib import Path
from typing import Sequence


from . import __version__
from .action import certify_alt_or_sym, induced_generators, k_transitivity, orbit_partition
from .connectors import connect_basis, connect_stabilizing
from .errors import (
    BudgetExceeded,
    GroupSpecError,
    MatrixExhausted,
    NoGeneratingPair,
    NoSpreadWitness,
    NotSimpleError,
    RankMismatch,
    Unreachable,
    VerificationFailed,
)
from .groups import FiniteGroup, load_group
from .laws import find_two_letter_law, kernel_element
from .product import DEFAULT_BUDGET
from .tuples import ClassTable, GenMatrix, build_matrix, class_table, d_power, hall_check, spread_witness
from .words import Word

log = logging.getLogger("tsystems")

NEGATIVE = (
    BudgetExceeded,
    MatrixExhausted,
    NoGeneratingPair,
    NoSpreadWitness,
    NotSimpleError,
    Unreachable,
    VerificationFailed,
)


class UsageError(Exception):
    pass


# -- helpers ---------------------------------------------------------------


def default_cache_dir() -> Path:
    env = os.environ.get("CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "tsystems"


def cache_path(cache_dir: Path, spec: str, n: int) -> Path:
    safe = re.sub(r"[^A-Za-z0-9_.-]", "_", spec)
    return cache_dir / f"{safe}_n{n}_v{__version__}.classes"


def cached_class_table(G: FiniteGroup, n: int, cache_dir: Path | None, budget: int) -> ClassTable:
    """Class table from disk when present, otherwise built and written back."""
    if n in G.class_tables or cache_dir is None:
        return class_table(G, n, budget)
    path = cache_path(cache_dir, G.spec, n)
    if path.exists():
        try:
            table = ClassTable.load(path, G)
            G.class_tables[n] = table
            return table
        except (ValueError, KeyError) as exc:
            log.warning("ignoring unreadable cache %s: %s", path, exc)
    table = class_table(G, n, budget)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    table.dump(tmp)
    tmp.replace(path)
    return table


def parse_ids(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in re.split(r"[\s,]+", text.strip()) if x)
    except ValueError as exc:
        raise UsageError(f"bad element list {text!r}") from exc


def parse_element_list(G: FiniteGroup, text: str) -> tuple[int, ...]:
    """Element ids, or permutation cycles separated by ``;``."""
    if "(" in text:
        return tuple(G.id_from_cycles(part) for part in text.split(";"))
    ids = parse_ids(text)
    if any(not 0 <= x < G.order for x in ids):
        raise UsageError(f"element id out of range 0..{G.order - 1}")
    return ids


def load_matrix(G: FiniteGroup, text: str) -> GenMatrix:
    p = Path(text)
    raw = p.read_text() if p.exists() else text
    try:
        A = GenMatrix.from_json(raw, G)
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad matrix JSON: {exc}") from exc
    if A.group.spec != G.spec:
        raise UsageError("matrix group differs from --group")
    return A


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True)
    flat = _flatten(report)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in flat:
            writer.writerow([key, value])
        return buf.getvalue().rstrip("\n")
    return "\n".join(f"{key}: {value}" for key, value in flat)


def _flatten(obj, prefix: str = "") -> list[tuple[str, str]]:
    if isinstance(obj, dict):
        out = []
        for key in sorted(obj):
            out.extend(_flatten(obj[key], f"{prefix}.{key}" if prefix else str(key)))
        return out
    if isinstance(obj, list) and any(isinstance(x, (dict, list)) for x in obj):
        out = []
        for i, x in enumerate(obj):
            out.extend(_flatten(x, f"{prefix}[{i}]"))
        return out
    if isinstance(obj, list):
        return [(prefix, " ".join(map(str, obj)))]
    return [(prefix, "" if obj is None else str(obj))]


def _action(args, G):
    table = cached_class_table(G, args.rank, args.cache_dir, args.budget_states)
    return table, induced_generators(table, seed=args.seed)


# -- subcommands -------------------------------------------------------------


def cmd_classes(args, G):
    table = cached_class_table(G, args.rank, args.cache_dir, args.budget_states)
    report = {
        "generating_tuples": table.generating_count,
        "classes": len(table),
        "aut_order": G.aut_count,
        "free_action": table.free_action,
    }
    if args.list:
        report["representatives"] = table.reps.tolist()
    return 0, report


def cmd_orbits(args, G):
    table, act = _action(args, G)
    orbits = orbit_partition(act)
    return 0, {"classes": len(table), "orbits": len(orbits), "orbit_sizes": [len(o) for o in orbits]}


def cmd_ktrans(args, G):
    _, act = _action(args, G)
    res = k_transitivity(act, args.k, budget=args.budget_states)
    report = {"k": res.k, "transitive": res.transitive, "orbits": res.orbit_count, "states": res.states}
    return (0 if res.transitive else 1), report


def cmd_certify(args, G):
    _, act = _action(args, G)
    cert = certify_alt_or_sym(act, seed=args.seed)
    return (0 if cert.verdict in ("Alt", "Sym") else 1), cert.as_dict()


def cmd_hall(args, G):
    A = load_matrix(G, args.matrix)
    rep = hall_check(A, budget=args.budget_states)
    return (0 if rep.diagonal_surjective else 1), rep.as_dict()


def cmd_spread(args, G):
    gs = parse_element_list(G, args.elements)
    z = spread_witness(G, gs)
    return (0 if z is not None else 1), {"elements": list(gs), "witness": z}


def cmd_dpower(args, G):
    return 0, {"k": args.k, "d": d_power(G, args.k, budget=args.budget_states)}


def cmd_matrix(args, G):
    A, ledger = build_matrix(G, args.rank, args.k, seed=args.seed)
    return 0, {"matrix": json.loads(A.to_json()), "ledger": ledger.as_dict()}


def _connect_report(res) -> dict:
    return json.loads(res.to_json())


def cmd_connect(args, G):
    g = parse_element_list(G, args.source)
    h = parse_element_list(G, args.target)
    res = connect_basis(G, g, h, budget=args.budget_states)
    return (0 if res.verified else 1), _connect_report(res)


def cmd_connect_stab(args, G):
    A = load_matrix(G, args.matrix)
    h = parse_element_list(G, args.target)
    res = connect_stabilizing(A, h, check_matrix=not args.skip_matrix_check, budget=args.budget_states)
    return (0 if res.verified else 1), _connect_report(res)


def cmd_law(args, G):
    rep = find_two_letter_law(G, args.max_word_len, domain=args.domain)
    if rep is None:
        return 1, {"group": G.spec, "word": None, "max_len": args.max_word_len, "domain": args.domain}
    return 0, rep.as_dict()


def cmd_kernel(args, G):
    try:
        w = Word.parse(args.word, 2)
    except (ValueError, RankMismatch) as exc:
        raise UsageError(str(exc)) from exc
    rep = kernel_element(w, args.rank, G, seed=args.seed)
    return 0, rep.as_dict()


COMMANDS = {
    "classes": cmd_classes,
    "orbits": cmd_orbits,
    "ktrans": cmd_ktrans,
    "hall": cmd_hall,
    "spread": cmd_spread,
    "dpower": cmd_dpower,
    "matrix": cmd_matrix,
    "connect": cmd_connect,
    "connect-stab": cmd_connect_stab,
    "law": cmd_law,
    "kernel": cmd_kernel,
    "certify": cmd_certify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", required=True, help="group spec, e.g. A5, S4, PSL2(7), C2xC2, table:path")
    common.add_argument("--rank", "-n", type=int, default=3, help="tuple length n (default 3)")
    common.add_argument("--k", type=int, default=2, help="k for ktrans, dpower and matrix (default 2)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="accepted for compatibility; runs single-threaded")
    common.add_argument("--cache-dir", type=Path, default=None, help="class-table cache (env CACHE_DIR)")
    common.add_argument("--no-cache", action="store_true", help="do not read or write the class-table cache")
    common.add_argument("--budget-states", type=int, default=DEFAULT_BUDGET)
    common.add_argument("--max-word-len", type=int, default=8)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--no-timings", action="store_true")
    common.add_argument("--verbose", "-v", action="store_true")

    parser = argparse.ArgumentParser(prog="tsystems", description="Nielsen classes and T-systems of finite groups")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}
    p["classes"].add_argument("--list", action="store_true", help="include class representatives")
    p["hall"].add_argument("--matrix", required=True, help="matrix JSON text or file")
    p["spread"].add_argument("--elements", required=True, help="ids '3,17' or cycles '(0 1 2);(0 1)'")
    p["connect"].add_argument("--source", required=True)
    p["connect"].add_argument("--target", required=True)
    p["connect-stab"].add_argument("--matrix", required=True, help="matrix JSON text or file")
    p["connect-stab"].add_argument("--target", required=True)
    p["connect-stab"].add_argument("--skip-matrix-check", action="store_true")
    p["law"].add_argument("--domain", choices=("all_pairs", "generating_pairs"), default="all_pairs")
    p["kernel"].add_argument("--word", required=True, help="word in x1, x2 as signed letters, e.g. '1 2 -1 -2'")
    return parser


def dispatch(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    if args.no_cache:
        args.cache_dir = None
    elif args.cache_dir is None:
        args.cache_dir = default_cache_dir()
    for name in ("rank", "k", "budget_states", "max_word_len", "threads"):
        if getattr(args, name) < 1:
            print(f"error: --{name.replace('_', '-')} must be positive", file=sys.stderr)
            return 2
    start = time.perf_counter()
    try:
        G = load_group(args.group)
        code, report = COMMANDS[args.command](args, G)
    except (GroupSpecError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NEGATIVE as exc:
        code, report = 1, {"outcome": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, Unreachable):
            report["subgroup_size"] = exc.subgroup_size
    except (ValueError, RankMismatch) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    report = {"command": args.command, "group": G.spec, **report}
    if not args.no_timings:
        report["elapsed_s"] = round(time.perf_counter() - start, 3)
    print(render(report, args.format))
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
