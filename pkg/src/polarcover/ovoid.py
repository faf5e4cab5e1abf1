"""Generalized ovoids: verification, signatures, reducibility, file codec.

A generalized ovoid is a set of nontrivial totally isotropic subspaces such
that every generator of the polar space contains exactly one of them
(EXACT); the relaxation where generators contain at most one is PARTIAL.

Reducibility comes in two flavours that are deliberately kept apart.
PAIRWISE finds a nontrivial subspace pi lying inside at least two members,
which matches the definition through the identity "the intersection of all
generators through o is o itself".  REPLACEABLE additionally demands that
swapping the members through pi for pi itself leaves an EXACT ovoid, the
operational reading of "replace and obtain a smaller one".  REPLACEABLE
implies PAIRWISE; the converse is unsettled, so callers choose a mode and
reports carry it.
"""

from __future__ import annotations

from dataclasses import dataclass

from polarcover.counting import num_generators, ovoid_size
from polarcover.gf import is_prime_power
from polarcover.linalg import (
    Subspace,
    contains_subspace,
    format_subspace,
    intersect,
    parse_subspace,
)
from polarcover.polarspace import (
    PolarSpace,
    SpaceDescriptor,
    format_descriptor,
    make_space,
)


class OvoidError(ValueError):
    pass


class GeneratorBudgetError(RuntimeError):
    """Generator enumeration would exceed the allowed budget."""


EXACT = "EXACT"
PARTIAL = "PARTIAL"
INVALID = "INVALID"

PAIRWISE = "PAIRWISE"
REPLACEABLE = "REPLACEABLE"

# verify refuses to stream more generators than this unless told otherwise
DEFAULT_GENERATOR_BUDGET = 1_000_000


def _resolve_space(space) -> PolarSpace:
    if isinstance(space, PolarSpace):
        return space
    return make_space(space)


def dimension_counts(members) -> dict[int, int]:
    counts: dict[int, int] = {}
    for m in members:
        counts[m.dim] = counts.get(m.dim, 0) + 1
    return counts


def type_signature(members) -> str:
    """Members by dimension as "1^6 2^15"; empty set gives ""."""
    counts = dimension_counts(members)
    return " ".join(f"{d}^{counts[d]}" for d in sorted(counts))


@dataclass(frozen=True)
class OvoidSet:
    """A candidate generalized ovoid: deduplicated members in canonical order.

    Membership invariants (nontrivial, totally isotropic, ambient match) are
    enforced by build; the type signature is derived, never stored stale.
    """

    space: SpaceDescriptor
    members: tuple[Subspace, ...]

    @classmethod
    def build(cls, space, members) -> "OvoidSet":
        sp = _resolve_space(space)
        canon = sorted(set(members))
        for m in canon:
            if m.n != sp.n:
                raise OvoidError(
                    f"member ambient dimension {m.n} does not match {sp.n}")
            if m.dim == 0:
                raise OvoidError("the trivial subspace cannot be a member")
            if not sp.is_totally_isotropic(m):
                raise OvoidError(
                    f"member {format_subspace(m)} is not totally isotropic")
        return cls(sp.descriptor, tuple(canon))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def type_signature(self) -> str:
        return type_signature(self.members)

    def resolve(self) -> PolarSpace:
        return make_space(self.space)


@dataclass
class VerificationReport:
    status: str
    violations: list  # (generator, contained member count) pairs
    generators_checked: int
    diagnostic: str | None = None

    @property
    def ok(self) -> bool:
        return self.status != INVALID


def _member_list(space: PolarSpace, members):
    if isinstance(members, OvoidSet):
        if members.space != space.descriptor:
            raise OvoidError("ovoid belongs to a different space")
        return list(members.members)
    out = OvoidSet.build(space, members)
    return list(out.members)


def _check_generator_budget(space: PolarSpace, budget):
    total = num_generators(space.kind, space.r, space.q)
    if budget is not None and total > budget:
        raise GeneratorBudgetError(
            f"{format_descriptor(space.descriptor)} has {total} generators, "
            f"budget is {budget}")
    return total


def verify(space, members, rule: str = EXACT,
           generator_budget=DEFAULT_GENERATOR_BUDGET) -> VerificationReport:
    """Scan every generator and count the members it contains.

    rule EXACT flags any count other than one; rule PARTIAL flags counts of
    two or more.  Homogeneous sets of the wrong cardinality cannot be exact,
    so EXACT short-circuits those to INVALID before touching the generators.
    """
    sp = _resolve_space(space)
    mems = _member_list(sp, members)
    if rule not in (EXACT, PARTIAL):
        raise OvoidError(f"unknown verification rule {rule!r}")
    _check_generator_budget(sp, generator_budget)

    if rule == EXACT and mems:
        counts = dimension_counts(mems)
        if len(counts) == 1:
            (k, have), = counts.items()
            want = ovoid_size(sp.r, k, sp.e2, sp.q)
            if have != want:
                return VerificationReport(
                    status=INVALID, violations=[], generators_checked=0,
                    diagnostic=(f"homogeneous dimension-{k} set has {have} "
                                f"members, exact covers need {want}"))

    violations = []
    checked = 0
    all_ones = True
    for gen in sp.enumerate_ti(sp.r):
        checked += 1
        count = sum(1 for m in mems if contains_subspace(sp.field, gen, m))
        if count != 1:
            all_ones = False
        if rule == EXACT:
            if count != 1:
                violations.append((gen, count))
        else:
            if count > 1:
                violations.append((gen, count))
    if violations:
        status = INVALID
    else:
        status = EXACT if all_ones else PARTIAL
    return VerificationReport(status=status, violations=violations,
                              generators_checked=checked)


def coverage_histogram(space, members,
                       generator_budget=DEFAULT_GENERATOR_BUDGET) -> dict[int, int]:
    """How many generators contain 0, 1, 2, ... members."""
    sp = _resolve_space(space)
    mems = _member_list(sp, members)
    _check_generator_budget(sp, generator_budget)
    hist: dict[int, int] = {}
    for gen in sp.enumerate_ti(sp.r):
        count = sum(1 for m in mems if contains_subspace(sp.field, gen, m))
        hist[count] = hist.get(count, 0) + 1
    return hist


@dataclass(frozen=True)
class ReducibilityWitness:
    mode: str
    pi: Subspace
    members_selected: tuple[Subspace, ...]


@dataclass(frozen=True)
class Irreducible:
    mode: str


def reducibility_witness(space, ovoid, mode: str = PAIRWISE,
                         generator_budget=DEFAULT_GENERATOR_BUDGET):
    """Find a reduction witness, or certify there is none in this mode.

    Candidate subspaces pi are the pairwise intersections of members,
    largest dimension first with lex tie-break.  PAIRWISE accepts the first
    nontrivial pi inside two or more members; REPLACEABLE additionally
    re-verifies the set with those members swapped out for pi.
    """
    if mode not in (PAIRWISE, REPLACEABLE):
        raise OvoidError(f"unknown reducibility mode {mode!r}")
    sp = _resolve_space(space)
    mems = _member_list(sp, ovoid)
    base = verify(sp, mems, EXACT, generator_budget=generator_budget)
    if base.status != EXACT:
        raise OvoidError("reducibility analysis needs an EXACT generalized ovoid")

    candidates: dict = {}
    for i, a in enumerate(mems):
        for b in mems[i + 1:]:
            meet = intersect(sp.field, a, b)
            if meet.dim > 0:
                candidates[meet] = None
    ordered = sorted(candidates, key=lambda s: (-s.dim, s.basis))

    for pi in ordered:
        selected = tuple(m for m in mems
                         if contains_subspace(sp.field, m, pi))
        if len(selected) < 2:
            continue
        if mode == PAIRWISE:
            return ReducibilityWitness(mode=mode, pi=pi, members_selected=selected)
        rest = [m for m in mems if m not in set(selected)]
        replaced = sorted(set(rest) | {pi})
        report = verify(sp, replaced, EXACT, generator_budget=generator_budget)
        if report.status == EXACT and len(replaced) < len(mems):
            return ReducibilityWitness(mode=mode, pi=pi, members_selected=selected)
    return Irreducible(mode=mode)


# ── file format ──────────────────────────────────────────────────────────

_MAGIC = "polarcover-ovoid v1"


def format_ovoid(ovoid: OvoidSet) -> str:
    sp = ovoid.resolve()
    p, h = is_prime_power(sp.q)
    lines = [_MAGIC, format_descriptor(ovoid.space), f"{p}^{h}"]
    lines.extend(format_subspace(m) for m in ovoid.members)
    return "\n".join(lines) + "\n"


def parse_ovoid(text: str) -> OvoidSet:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise OvoidError("line 1: truncated ovoid file")
    if lines[0] != _MAGIC:
        raise OvoidError(f"line 1: expected {_MAGIC!r}, got {lines[0]!r}")
    try:
        sp = make_space(lines[1].strip())
    except ValueError as exc:
        raise OvoidError(f"line 2: {exc}") from exc
    m = lines[2].strip().split("^")
    try:
        p, h = (int(part) for part in m)
    except ValueError:
        raise OvoidError(f"line 3: field descriptor must look like 2^1, got {lines[2]!r}")
    if p**h != sp.q:
        raise OvoidError(
            f"line 3: field {p}^{h} does not match descriptor field GF({sp.q})")
    members = []
    for idx, line in enumerate(lines[3:], start=4):
        if not line.strip():
            raise OvoidError(f"line {idx}: blank member line")
        try:
            members.append(parse_subspace(sp.field, sp.n, line.strip()))
        except ValueError as exc:
            raise OvoidError(f"line {idx}: {exc}") from exc
    try:
        return OvoidSet.build(sp, members)
    except OvoidError as exc:
        raise OvoidError(f"member list: {exc}") from exc


def write_ovoid(path, ovoid: OvoidSet) -> None:
    with open(path, "w", encoding="ascii") as handle:
        handle.write(format_ovoid(ovoid))


def read_ovoid(path) -> OvoidSet:
    with open(path, "r", encoding="ascii") as handle:
        return parse_ovoid(handle.read())
