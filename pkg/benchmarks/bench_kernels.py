"""Compare the compiled and pure-Python kernels on identical workloads.

Two benchmarks, mirroring the two kernels: a full isotropic-subspace walk
(scanner) and a node-budgeted exact-cover run (solver).  Both backends are
imported directly so one process times the pair; results must agree before
the timing is trusted.

Usage: python3 benchmarks/bench_kernels.py [--nodes N] [--spaces "W(5,3)" ...]
"""

import argparse
import time

from polarcover import _pykernels
from polarcover import search
from polarcover.polarspace import HERMITIAN_KINDS, QUADRIC_KINDS, make_space

try:
    from polarcover import _speedups
except ImportError:
    _speedups = None


def scanner_for(module, sp):
    add, mul, neg, inv, conj = sp.field.flat_tables()
    if sp.kind in QUADRIC_KINDS:
        mode, quad, gram = module.MODE_QUADRIC, sp.quad, sp.gram
    elif sp.kind in HERMITIAN_KINDS:
        mode, quad, gram = module.MODE_HERMITIAN, None, sp.gram
    else:
        mode, quad, gram = module.MODE_ALTERNATING, None, sp.gram
    return module.Scanner(sp.n, sp.q, add, mul, neg, inv, conj,
                          mode, quad, gram)


def walk_count(scanner, k):
    """Count isotropic k-spaces by walking the extension tree."""
    total = 0
    stack = [((), ())]
    while stack:
        rows, pivots = stack.pop()
        if len(rows) == k - 1:
            total += scanner.extensions(rows, pivots, True)
            continue
        for w in scanner.extensions(rows, pivots, False):
            lead = next(i for i, a in enumerate(w) if a)
            stack.append((rows + (w,), pivots + (lead,)))
    return total


def bench_scanner(descriptor):
    sp = make_space(descriptor)
    rows = []
    for module in backends():
        sc = scanner_for(module, sp)
        t0 = time.perf_counter()
        count = walk_count(sc, sp.r)
        dt = time.perf_counter() - t0
        rows.append((module.BACKEND, count, dt))
    return rows


def bench_cover(descriptor, nodes):
    sp = make_space(descriptor)
    instance = search.build_instance(sp, set(range(1, sp.r + 1)))
    masks = []
    for cover in instance.candidates:
        m = 0
        for g in cover:
            m |= 1 << g
        masks.append(m)
    rows = []
    for module in backends():
        t0 = time.perf_counter()
        res = module.solve_cover(len(instance.universe), masks, "min",
                                 node_budget=nodes, time_budget=1e9,
                                 frac_bound=True)
        dt = time.perf_counter() - t0
        rows.append((module.BACKEND, res["nodes"], res["size"], dt))
    return rows


def backends():
    mods = [_pykernels]
    if _speedups is not None:
        mods.append(_speedups)
    return mods


def report(title, rows, unit):
    print(title)
    base = rows[0][-1]
    for row in rows:
        label, dt = row[0], row[-1]
        work = row[1]
        rate = work / dt if dt else float("inf")
        speedup = base / dt if dt else float("inf")
        print(f"  {label:<8} {dt:9.3f}s  {rate:12,.0f} {unit}/s  "
              f"x{speedup:.1f}")
    checks = {row[1:-1] for row in rows}
    if len(checks) != 1:
        raise SystemExit(f"backends disagree on {title}: {checks}")
    print()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nodes", type=int, default=300_000,
                    help="node budget for the cover benchmark")
    ap.add_argument("--spaces", nargs="*", default=["W(5,3)", "H(4,4)"],
                    help="descriptors for the scanner walk")
    ap.add_argument("--cover-space", default="W(5,2)",
                    help="descriptor for the cover benchmark")
    args = ap.parse_args()

    if _speedups is None:
        print("compiled backend not built; timing pure Python only\n")
    for desc in args.spaces:
        rows = bench_scanner(desc)
        report(f"scanner walk, generators of {desc} "
               f"({rows[0][1]} found)", rows, "gen")
    rows = bench_cover(args.cover_space, args.nodes)
    report(f"exact cover on {args.cover_space}, {args.nodes} nodes "
           f"(frac bound)", rows, "node")


if __name__ == "__main__":
    main()
