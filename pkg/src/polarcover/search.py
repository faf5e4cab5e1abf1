"""Exact-cover search for minimum and homogeneous generalized ovoids.

A generalized ovoid is an exact cover of the generator set by totally
isotropic subspaces, so minimization and existence both reduce to exact
cover with a cardinality objective.  The engine branches on the uncovered
generator with the fewest remaining candidates and prunes with
chosen + ceil(uncovered / max remaining cover size); candidates are tried
in id order (dimension ascending, lex within a dimension), which keeps
node counts reproducible run to run.

Everything here is single-threaded; results are deterministic and node
counts are part of the contract.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from polarcover import kernels
from polarcover.counting import count_ti, num_generators, ovoid_size
from polarcover.linalg import Subspace, contains_subspace
from polarcover.ovoid import EXACT, GeneratorBudgetError, OvoidSet, verify
from polarcover.polarspace import (
    PolarSpace,
    SpaceDescriptor,
    format_descriptor,
    make_space,
)


class SearchError(ValueError):
    pass


OPTIMAL = "OPTIMAL"
FEASIBLE = "FEASIBLE"
INFEASIBLE = "INFEASIBLE"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"

DEFAULT_CANDIDATE_BUDGET = 500_000


@dataclass(frozen=True)
class Budget:
    nodes: int = 10_000_000
    seconds: float = 60.0


@dataclass(frozen=True)
class CoverInstance:
    space: SpaceDescriptor
    universe: tuple[int, ...]                 # generator ids
    candidates: tuple[tuple[int, ...], ...]   # candidate id -> covered gen ids
    dims: tuple[int, ...]                     # candidate id -> dimension
    subspaces: tuple[Subspace, ...]           # candidate id -> subspace
    generators: tuple[Subspace, ...]          # generator id -> subspace


@dataclass
class SearchStats:
    nodes: int
    seconds: float
    peak_depth: int
    exhausted: bool   # tree closed (or target found) before any budget tripped
    backend: str


@dataclass
class SearchResult:
    status: str
    best: OvoidSet | None
    size: int | None
    lower_bound_proved: int | None
    stats: SearchStats


def _resolve_space(space) -> PolarSpace:
    if isinstance(space, PolarSpace):
        return space
    return make_space(space)


def build_instance(space, allowed_dims,
                   candidate_budget=DEFAULT_CANDIDATE_BUDGET) -> CoverInstance:
    """Universe = all generators; candidates = TI subspaces of allowed dims.

    Candidate ids run dimension ascending, lex within a dimension; each
    candidate's cover set is exactly the generators through it.
    """
    sp = _resolve_space(space)
    dims = sorted(set(allowed_dims))
    if not dims:
        raise SearchError("allowed_dims must be nonempty")
    for k in dims:
        if not 1 <= k <= sp.r:
            raise SearchError(f"candidate dimension {k} outside 1..{sp.r}")
    total = num_generators(sp.kind, sp.r, sp.q)
    total += sum(count_ti(sp.kind, sp.r, k, sp.q) for k in dims if k < sp.r)
    if candidate_budget is not None and total > candidate_budget:
        raise GeneratorBudgetError(
            f"{format_descriptor(sp.descriptor)} instance needs {total} "
            f"subspaces, budget is {candidate_budget}")

    generators = sp.generators()
    gen_ids = {g: i for i, g in enumerate(generators)}
    subspaces: list[Subspace] = []
    cand_dims: list[int] = []
    covers: list[tuple[int, ...]] = []
    for k in dims:
        for cand in (generators if k == sp.r else sp.enumerate_ti(k)):
            if k == sp.r:
                hit = (gen_ids[cand],)
            else:
                hit = tuple(i for i, g in enumerate(generators)
                            if contains_subspace(sp.field, g, cand))
            subspaces.append(cand)
            cand_dims.append(k)
            covers.append(hit)
    return CoverInstance(
        space=sp.descriptor,
        universe=tuple(range(len(generators))),
        candidates=tuple(covers),
        dims=tuple(cand_dims),
        subspaces=tuple(subspaces),
        generators=generators,
    )


def _root_bound(instance: CoverInstance) -> int | None:
    if not instance.candidates:
        return None
    widest = max(len(c) for c in instance.candidates)
    if widest == 0:
        return None
    return math.ceil(len(instance.universe) / widest)


def _run_kernel(instance, mode, target, budget, frac_bound):
    masks = []
    for cover in instance.candidates:
        m = 0
        for g in cover:
            m |= 1 << g
        masks.append(m)
    return kernels.solve_cover(
        len(instance.universe), masks, mode, target=target,
        node_budget=budget.nodes, time_budget=budget.seconds,
        frac_bound=frac_bound)


def _witness(instance: CoverInstance, ids) -> OvoidSet:
    sp = make_space(instance.space)
    members = [instance.subspaces[c] for c in ids]
    found = OvoidSet.build(sp, members)
    report = verify(sp, found, EXACT, generator_budget=None)
    if report.status != EXACT:
        raise SearchError("search produced a witness that fails verification")
    return found


def _stats(raw) -> SearchStats:
    return SearchStats(nodes=raw["nodes"], seconds=raw["seconds"],
                       peak_depth=raw["peak_depth"], exhausted=raw["exhausted"],
                       backend=kernels.BACKEND)


def min_generalized_ovoid(instance: CoverInstance, budget: Budget = Budget(),
                          frac_bound: bool = False) -> SearchResult:
    """Smallest exact cover drawn from the instance's candidates.

    OPTIMAL when the tree closed (the incumbent is provably minimum),
    FEASIBLE when a budget tripped but an incumbent exists, INFEASIBLE when
    the closed tree holds no cover at all, BUDGET_EXHAUSTED when a budget
    tripped empty-handed.
    """
    raw = _run_kernel(instance, "min", None, budget, frac_bound)
    stats = _stats(raw)
    if raw["best"] is not None:
        witness = _witness(instance, raw["best"])
        size = len(witness)
        if raw["exhausted"]:
            return SearchResult(OPTIMAL, witness, size, size, stats)
        return SearchResult(FEASIBLE, witness, size, _root_bound(instance), stats)
    if raw["exhausted"]:
        return SearchResult(INFEASIBLE, None, None, None, stats)
    return SearchResult(BUDGET_EXHAUSTED, None, None, _root_bound(instance), stats)


def homogeneous_exists(space, k: int, budget: Budget = Budget(),
                       warm_start: OvoidSet | None = None,
                       candidate_budget=DEFAULT_CANDIDATE_BUDGET,
                       frac_bound: bool = False) -> SearchResult:
    """Does an exact cover by dimension-k subspaces exist?

    Any such cover has exactly ovoid_size(r,k,e,q) members, so the target
    cardinality is fixed up front.  A valid warm start (an exact
    homogeneous witness of the right dimension) short-circuits the search;
    an invalid one is an error, never silently ignored.  INFEASIBLE is a
    completed-tree proof that no such ovoid exists.
    """
    sp = _resolve_space(space)
    if not 1 <= k <= sp.r:
        raise SearchError(f"k must be in 1..{sp.r}, got {k}")
    target = ovoid_size(sp.r, k, sp.e2, sp.q)

    if warm_start is not None:
        if warm_start.space != sp.descriptor:
            raise SearchError("warm start belongs to a different space")
        counts = {m.dim for m in warm_start.members}
        if counts != {k} or len(warm_start) != target:
            raise SearchError(
                f"warm start is not a homogeneous dimension-{k} cover of size {target}")
        report = verify(sp, warm_start, EXACT, generator_budget=None)
        if report.status != EXACT:
            raise SearchError("warm start fails exact verification")
        stats = SearchStats(nodes=0, seconds=0.0, peak_depth=0,
                            exhausted=True, backend="warm-start")
        return SearchResult(FEASIBLE, warm_start, target, None, stats)

    instance = build_instance(sp, {k}, candidate_budget=candidate_budget)
    raw = _run_kernel(instance, "exists", target, budget, frac_bound)
    stats = _stats(raw)
    if raw["best"] is not None:
        witness = _witness(instance, raw["best"])
        if len(witness) != target:
            raise SearchError(
                f"homogeneous cover of size {len(witness)} contradicts the "
                f"forced cardinality {target}")
        return SearchResult(FEASIBLE, witness, target, None, stats)
    if raw["exhausted"]:
        return SearchResult(INFEASIBLE, None, None, None, stats)
    return SearchResult(BUDGET_EXHAUSTED, None, None, None, stats)
