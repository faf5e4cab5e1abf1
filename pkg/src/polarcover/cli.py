"""Command-line interface.

One thin dispatcher over the library: space info, counting, enumeration,
bounds, the non-existence threshold, ovoid file verification and
reducibility, constructions, and exact-cover search.  Text output is
line-oriented and human-diffable; --format json emits the same
information with sorted keys.  Exit codes: 0 success, 1 domain error,
2 verification failure, 3 budget exhaustion.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from polarcover import constructions, search
from polarcover.counting import (
    CountingError,
    bm_bound,
    count_ti,
    nonexistence_rank_threshold,
    num_generators,
    num_points,
    partial_rk_ovoid_bound,
    schrijver_bound,
)
from polarcover.gf import build_field
from polarcover.linalg import format_subspace
from polarcover.ovoid import (
    EXACT,
    GeneratorBudgetError,
    INVALID,
    Irreducible,
    PAIRWISE,
    PARTIAL,
    REPLACEABLE,
    read_ovoid,
    reducibility_witness,
    verify,
    write_ovoid,
)
from polarcover.polarspace import (
    format_descriptor,
    make_space,
    parse_descriptor,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VERIFY = 2
EXIT_BUDGET = 3


class CliError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems are domain errors (exit 1), not argparse's exit 2
    def error(self, message):
        raise CliError(message)


def _common_flags(parser):
    parser.add_argument("--format", choices=("text", "json"), default="text",
                        help="output format (default text)")
    parser.add_argument("--out", metavar="FILE",
                        help="write the primary artifact (ovoid file, "
                             "listing, or rendered output) to FILE")
    parser.add_argument("--budget-seconds", type=float, default=60.0,
                        metavar="S", help="search time budget (default 60)")
    parser.add_argument("--budget-nodes", type=int, default=10_000_000,
                        metavar="N",
                        help="search node budget (default 10^7)")
    parser.add_argument("--deterministic", action="store_true",
                        help="suppress wall-clock fields so output is "
                             "byte-reproducible (results are always "
                             "deterministic)")
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("POLARCOVER_THREADS", "1")),
                        metavar="N",
                        help="accepted for compatibility; the engine is "
                             "single-threaded")
    return parser


def build_parser() -> _Parser:
    top = _Parser(prog="polarcover",
                  description="Generalized ovoids in finite classical "
                              "polar spaces.")
    sub = top.add_subparsers(dest="command", metavar="COMMAND")

    def leaf(owner, name, **kw):
        return _common_flags(owner.add_parser(name, **kw))

    space = sub.add_parser("space", help="polar space information")
    space_sub = space.add_subparsers(dest="space_command", metavar="ACTION")
    p = leaf(space_sub, "info", help="parameters and counts of a space")
    p.add_argument("descriptor")

    p = leaf(sub, "count", help="number of totally isotropic k-spaces")
    p.add_argument("descriptor")
    p.add_argument("--dim", type=int, required=True, metavar="K")

    p = leaf(sub, "enumerate", help="list totally isotropic k-spaces")
    p.add_argument("descriptor")
    p.add_argument("--dim", type=int, required=True, metavar="K")

    bound = sub.add_parser("bound", help="exact bound evaluation")
    bound_sub = bound.add_subparsers(dest="bound_command", metavar="KIND")
    p = leaf(bound_sub, "bm", help="point partial-ovoid bound")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--n", type=int, required=True)
    p = leaf(bound_sub, "rk", help="partial (r,k)-cover bound")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--h", type=int, default=1)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--e2", type=int, required=True)
    p = leaf(bound_sub, "schrijver", help="perfect matching floor")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--deg", type=int, required=True)

    p = leaf(sub, "threshold", help="non-existence rank threshold")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--e2", type=int, required=True)
    p.add_argument("--window", type=int, default=50)

    ovoid_cmd = sub.add_parser("ovoid", help="ovoid files")
    ovoid_sub = ovoid_cmd.add_subparsers(dest="ovoid_command", metavar="ACTION")
    p = leaf(ovoid_sub, "verify", help="check a file against its space")
    p.add_argument("file")
    p.add_argument("--partial", action="store_true",
                   help="allow uncovered generators")
    p.add_argument("--space", metavar="DESC",
                   help="require the file to belong to this space")
    p = leaf(ovoid_sub, "type", help="print the type signature")
    p.add_argument("file")
    p = leaf(ovoid_sub, "reduce", help="search for a reducibility witness")
    p.add_argument("file")
    p.add_argument("--mode", choices=("pairwise", "replaceable"),
                   default="pairwise")

    p = leaf(sub, "construct", help="run a construction")
    p.add_argument("name", choices=("all-generators", "embedded", "product",
                                    "quotient", "matching", "qplus32",
                                    "msystem32"))
    p.add_argument("descriptor")
    p.add_argument("--report", choices=("json",),
                   help="print the full construction report as JSON")
    p.add_argument("--seed", type=int,
                   help="sample an alternative matching (matching only)")
    p.add_argument("--outer", metavar="FILE",
                   help="outer ovoid file (product only)")
    p.add_argument("--inner-dim", type=int, metavar="K",
                   help="inner member dimension (product only)")
    p.add_argument("--ovoid", metavar="FILE",
                   help="input ovoid file (quotient only)")
    p.add_argument("--point", metavar="V",
                   help="comma-separated point coordinates (quotient only)")

    search_cmd = sub.add_parser("search", help="exact-cover search")
    search_sub = search_cmd.add_subparsers(dest="search_command",
                                           metavar="ACTION")
    p = leaf(search_sub, "min", help="minimum generalized ovoid")
    p.add_argument("descriptor")
    p.add_argument("--dims", default=None, metavar="1,2,3",
                   help="allowed member dimensions (default all)")
    p.add_argument("--frac-bound", action="store_true",
                   help="use the fractional covering bound")
    p = leaf(search_sub, "homogeneous", help="fixed-dimension existence")
    p.add_argument("descriptor")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--warm-start", metavar="FILE",
                   help="ovoid file to validate instead of searching")
    p.add_argument("--frac-bound", action="store_true")

    return top


# ── output plumbing ──────────────────────────────────────────────────────

def _exact_str(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return str(value)


def _jsonable(value):
    if isinstance(value, Fraction):
        return _exact_str(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.format == "json":
        rendered = json.dumps(_jsonable(payload), sort_keys=True, indent=2)
    else:
        rendered = "\n".join(text_lines)
    print(rendered)
    if getattr(args, "out", None) and not getattr(args, "_out_used", False):
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(rendered + "\n")


# ── subcommand handlers ──────────────────────────────────────────────────

def _cmd_space_info(args) -> int:
    sp = make_space(args.descriptor)
    payload = {
        "descriptor": format_descriptor(sp.descriptor),
        "kind": sp.kind,
        "q": sp.q,
        "n": sp.n,
        "rank": sp.r,
        "e2": sp.e2,
        "points": num_points(sp.kind, sp.r, sp.q),
        "generators": num_generators(sp.kind, sp.r, sp.q),
    }
    lines = [
        f"{payload['descriptor']}: {sp.kind}, rank {sp.r} over GF({sp.q})",
        f"  ambient dimension {sp.n}, e2 = {sp.e2}",
        f"  points {payload['points']}, generators {payload['generators']}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_count(args) -> int:
    desc = parse_descriptor(args.descriptor)
    value = count_ti(desc.kind, desc.r, args.dim, desc.q)
    payload = {"descriptor": format_descriptor(desc), "dim": args.dim,
               "count": value}
    _emit(args, payload, [str(value)])
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    sp = make_space(args.descriptor)
    rows = [format_subspace(sub) for sub in sp.enumerate_ti(args.dim)]
    payload = {"descriptor": format_descriptor(sp.descriptor),
               "dim": args.dim, "count": len(rows), "subspaces": rows}
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("\n".join(rows) + "\n")
        args._out_used = True
        _emit(args, payload, [f"{len(rows)} subspaces written to {args.out}"])
    else:
        _emit(args, payload, rows)
    return EXIT_OK


def _bound_payload(report) -> tuple[dict, list[str]]:
    payload = {
        "value": _jsonable(report.value),
        "formula": report.formula,
        "params": report.params,
    }
    lines = [f"value = {_exact_str(report.value)}"]
    if isinstance(report.value, Fraction):
        lines.append(f"decimal = {float(report.value):.6g}")
        payload["decimal"] = float(report.value)
    for extra in ("weak", "cap", "cap_holds", "floor"):
        item = getattr(report, extra)
        if item is not None:
            payload[extra] = _jsonable(item)
            lines.append(f"{extra} = {_exact_str(item)}")
    lines.append(f"formula {report.formula}, params "
                 + " ".join(f"{k}={v}" for k, v in report.params.items()))
    return payload, lines


def _cmd_bound(args) -> int:
    if args.bound_command == "bm":
        report = bm_bound(args.p, args.h, args.n)
    elif args.bound_command == "rk":
        report = partial_rk_ovoid_bound(args.p, args.h, args.r, args.k,
                                        args.e2)
    elif args.bound_command == "schrijver":
        report = schrijver_bound(args.v, args.deg)
    else:
        raise CliError("choose a bound: bm, rk, or schrijver")
    payload, lines = _bound_payload(report)
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_threshold(args) -> int:
    value = nonexistence_rank_threshold(args.p, args.k, args.e2,
                                        window=args.window)
    payload = {"p": args.p, "k": args.k, "e2": args.e2,
               "window": args.window, "threshold": value,
               "status": "FOUND" if value is not None else "UNKNOWN"}
    lines = [f"r* = {value}" if value is not None else "UNKNOWN"]
    _emit(args, payload, lines)
    return EXIT_OK


def _cmd_ovoid_verify(args) -> int:
    ovo = read_ovoid(args.file)
    if args.space is not None:
        want = parse_descriptor(args.space)
        if ovo.space != want:
            raise CliError(
                f"file belongs to {format_descriptor(ovo.space)}, "
                f"not {format_descriptor(want)}")
    rule = PARTIAL if args.partial else EXACT
    report = verify(ovo.space, ovo, rule=rule, generator_budget=None)
    payload = {
        "file": args.file,
        "space": format_descriptor(ovo.space),
        "size": len(ovo),
        "type": ovo.type_signature,
        "rule": rule,
        "status": report.status,
        "generators_checked": report.generators_checked,
        "violations": len(report.violations),
    }
    if report.diagnostic:
        payload["diagnostic"] = report.diagnostic
    lines = [f"{report.status}  ({len(ovo)} members, type "
             f"{ovo.type_signature or '-'}, "
             f"{report.generators_checked} generators checked)"]
    if report.diagnostic:
        lines.append(f"  {report.diagnostic}")
    for gen, cnt in report.violations[:5]:
        lines.append(f"  generator {format_subspace(gen)} covered {cnt}x")
    if len(report.violations) > 5:
        lines.append(f"  ... {len(report.violations) - 5} more")
    _emit(args, payload, lines)
    return EXIT_OK if report.status != INVALID else EXIT_VERIFY


def _cmd_ovoid_type(args) -> int:
    ovo = read_ovoid(args.file)
    payload = {"file": args.file, "space": format_descriptor(ovo.space),
               "size": len(ovo), "type": ovo.type_signature}
    _emit(args, payload, [ovo.type_signature or "-"])
    return EXIT_OK


def _cmd_ovoid_reduce(args) -> int:
    ovo = read_ovoid(args.file)
    mode = REPLACEABLE if args.mode == "replaceable" else PAIRWISE
    witness = reducibility_witness(ovo.space, ovo, mode=mode,
                                   generator_budget=None)
    if isinstance(witness, Irreducible):
        payload = {"file": args.file, "mode": args.mode, "reducible": False}
        lines = [f"irreducible ({args.mode})"]
    else:
        payload = {
            "file": args.file,
            "mode": args.mode,
            "reducible": True,
            "pi": format_subspace(witness.pi),
            "members_selected": sorted(format_subspace(m)
                                       for m in witness.members_selected),
        }
        lines = [f"reducible ({args.mode}): pi = {format_subspace(witness.pi)} "
                 f"inside {len(witness.members_selected)} members"]
    _emit(args, payload, lines)
    return EXIT_OK


def _run_construction(args):
    name = args.name
    if name == "all-generators":
        return constructions.all_generators_ovoid(args.descriptor)
    if name == "embedded":
        return constructions.embedded_comaximal_ovoid(args.descriptor)
    if name == "matching":
        graph = constructions.build_matching_graph(args.descriptor)
        return constructions.matching_ovoid(graph, seed=args.seed)
    if name == "qplus32":
        desc = parse_descriptor(args.descriptor)
        if desc.kind != "hyperbolic" or desc.r != 3:
            raise CliError("qplus32 needs a rank-3 hyperbolic space, "
                           f"got {format_descriptor(desc)}")
        return constructions.qplus32_ovoid(desc.q)
    if name == "msystem32":
        desc = parse_descriptor(args.descriptor)
        if format_descriptor(desc) != "Q-(7,2)":
            raise CliError("msystem32 is specific to Q-(7,2)")
        return constructions.msystem32_ovoid_q2()
    if name == "product":
        if not args.outer or args.inner_dim is None:
            raise CliError("product needs --outer FILE and --inner-dim K")
        outer = read_ovoid(args.outer)
        budget = search.Budget(nodes=args.budget_nodes,
                               seconds=args.budget_seconds)
        factory = constructions.searched_inner_factory(args.inner_dim,
                                                       budget=budget)
        return constructions.product_ovoid(args.descriptor, outer, factory)
    if name == "quotient":
        if not args.ovoid:
            raise CliError("quotient needs --ovoid FILE")
        inner = read_ovoid(args.ovoid)
        point = None
        if args.point:
            point = tuple(int(x) for x in args.point.split(","))
        return constructions.quotient_ovoid(args.descriptor, inner,
                                            point=point)
    raise CliError(f"unknown construction {name}")


def _cmd_construct(args) -> int:
    ovo, report = _run_construction(args)
    payload = {
        "name": report.name,
        "space": format_descriptor(ovo.space),
        "size": len(ovo),
        "type": ovo.type_signature,
        "auxiliary": _jsonable(report.auxiliary),
        "verification": {
            "status": report.verification.status,
            "generators_checked": report.verification.generators_checked,
        },
    }
    lines = [f"{report.name}: {len(ovo)} members, type {ovo.type_signature}, "
             f"{report.verification.status}"]
    for key, value in report.auxiliary.items():
        lines.append(f"  {key} = {value}")
    if args.out:
        write_ovoid(args.out, ovo)
        args._out_used = True
        lines.append(f"written to {args.out}")
        payload["out"] = args.out
    if args.report == "json":
        args.format = "json"
    _emit(args, payload, lines)
    return EXIT_OK


def _search_payload(args, result) -> tuple[dict, list[str]]:
    stats = {
        "nodes": result.stats.nodes,
        "peak_depth": result.stats.peak_depth,
        "exhausted": result.stats.exhausted,
        "backend": result.stats.backend,
    }
    if not args.deterministic:
        stats["seconds"] = round(result.stats.seconds, 3)
    payload = {
        "status": result.status,
        "size": result.size,
        "type": result.best.type_signature if result.best else None,
        "lower_bound_proved": result.lower_bound_proved,
        "stats": stats,
    }
    lines = [f"status {result.status}"
             + (f", size {result.size}, type {result.best.type_signature}"
                if result.best else "")
             + (f", lower bound {result.lower_bound_proved}"
                if result.lower_bound_proved is not None else "")]
    lines.append("  nodes " + str(result.stats.nodes)
                 + ("" if args.deterministic
                    else f", {result.stats.seconds:.2f}s")
                 + f", backend {result.stats.backend}")
    return payload, lines


def _finish_search(args, result) -> int:
    payload, lines = _search_payload(args, result)
    if result.best is not None and args.out:
        write_ovoid(args.out, result.best)
        args._out_used = True
        lines.append(f"witness written to {args.out}")
        payload["out"] = args.out
    _emit(args, payload, lines)
    if result.status == search.BUDGET_EXHAUSTED:
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_search_min(args) -> int:
    sp = make_space(args.descriptor)
    if args.dims:
        dims = {int(x) for x in args.dims.split(",")}
    else:
        dims = set(range(1, sp.r + 1))
    instance = search.build_instance(sp, dims)
    budget = search.Budget(nodes=args.budget_nodes,
                           seconds=args.budget_seconds)
    result = search.min_generalized_ovoid(instance, budget,
                                          frac_bound=args.frac_bound)
    return _finish_search(args, result)


def _cmd_search_homogeneous(args) -> int:
    warm = read_ovoid(args.warm_start) if args.warm_start else None
    budget = search.Budget(nodes=args.budget_nodes,
                           seconds=args.budget_seconds)
    result = search.homogeneous_exists(args.descriptor, args.k, budget,
                                       warm_start=warm,
                                       frac_bound=args.frac_bound)
    return _finish_search(args, result)


_HANDLERS = {
    ("space", "info"): _cmd_space_info,
    ("count", None): _cmd_count,
    ("enumerate", None): _cmd_enumerate,
    ("bound", "bm"): _cmd_bound,
    ("bound", "rk"): _cmd_bound,
    ("bound", "schrijver"): _cmd_bound,
    ("threshold", None): _cmd_threshold,
    ("ovoid", "verify"): _cmd_ovoid_verify,
    ("ovoid", "type"): _cmd_ovoid_type,
    ("ovoid", "reduce"): _cmd_ovoid_reduce,
    ("construct", None): _cmd_construct,
    ("search", "min"): _cmd_search_min,
    ("search", "homogeneous"): _cmd_search_homogeneous,
}


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_help()
            return EXIT_OK
        action = getattr(args, f"{args.command}_command", None)
        handler = _HANDLERS.get((args.command, action))
        if handler is None:
            raise CliError(f"{args.command} needs an action; see "
                           f"polarcover {args.command} --help")
        return handler(args)
    except GeneratorBudgetError as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:        # argparse --help
        return exc.code or EXIT_OK


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
