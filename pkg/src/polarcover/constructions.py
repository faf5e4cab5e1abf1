"""Explicit constructions of generalized ovoids.

Every construction returns (OvoidSet, ConstructionReport).  The report
names the construction, carries auxiliary data (chosen hyperplanes,
intersection censuses, sizes), and embeds the verification that certified
the output: each construction re-checks its result against the full
generator set before returning, so a returned ovoid is always exact.

Available constructions:

  all_generators_ovoid      the trivial (r, r)-ovoid
  quotient_ovoid            push an ovoid down to the quotient at a point
  product_ovoid             combine an outer ovoid with per-member inner
                            ovoids of the tangent quotients
  embedded_comaximal_ovoid  generators of a comaximal hyperplane section
  local_modification        resect the embedded ovoid at a partial ovoid
                            of the section
  matching_ovoid            perfect matchings of the two generator classes
                            of a hyperbolic space (with build_matching_graph
                            and count_perfect_matchings)
  qplus32_ovoid             line sets of Q+(5, q) from a spread over an
                            exterior line
  msystem32_ovoid_q2        the 153-line set of Q-(7, 2) by field reduction
                            of Q-(3, 4)
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from polarcover import search as _search
from polarcover.counting import (
    HERMITIAN_ODD,
    HYPERBOLIC,
    PARABOLIC,
    ovoid_size,
)
from polarcover.gf import build_field
from polarcover.linalg import (
    Subspace,
    apply_matrix,
    contains_subspace,
    enumerate_subspaces,
    format_subspace,
    full_space,
    intersect,
    iter_points,
    nullspace,
    span,
    sum_spaces,
)
from polarcover.ovoid import (
    EXACT,
    PARTIAL,
    OvoidSet,
    VerificationReport,
    dimension_counts,
    verify,
)
from polarcover.polarspace import (
    ELLIPTIC,
    HERMITIAN_EVEN,
    PolarSpace,
    QuotientMap,
    classify_form,
    format_descriptor,
    make_space,
    standardize_quadric,
)


class ConstructionError(ValueError):
    pass


@dataclass
class ConstructionReport:
    name: str
    auxiliary: dict
    verification: VerificationReport


def _resolve(space) -> PolarSpace:
    if isinstance(space, PolarSpace):
        return space
    return make_space(space)


def _certify(sp: PolarSpace, members, name: str, auxiliary: dict):
    report = verify(sp, members, rule=EXACT, generator_budget=None)
    if report.status != EXACT:
        raise ConstructionError(
            f"{name} produced a non-exact cover ({report.status})")
    return OvoidSet.build(sp, members), ConstructionReport(
        name=name, auxiliary=auxiliary, verification=report)


def _coerce_ovoid(sp: PolarSpace, ovoid) -> OvoidSet:
    if isinstance(ovoid, OvoidSet):
        if ovoid.space != sp.descriptor:
            raise ConstructionError("ovoid belongs to a different space")
        return ovoid
    return OvoidSet.build(sp, ovoid)


def _require_exact(sp: PolarSpace, ov: OvoidSet, what: str) -> None:
    report = verify(sp, ov, rule=EXACT, generator_budget=None)
    if report.status != EXACT:
        raise ConstructionError(f"{what} must be exact, got {report.status}")


def _homogeneous_dim(ov: OvoidSet, what: str) -> int:
    counts = dimension_counts(ov.members)
    if len(counts) != 1:
        raise ConstructionError(f"{what} must be homogeneous, "
                                f"type is {ov.type_signature!r}")
    (k,) = counts
    return k


# ── trivial ──────────────────────────────────────────────────────────────

def all_generators_ovoid(space):
    """The full generator set: an (r, r)-ovoid in any polar space."""
    sp = _resolve(space)
    members = sp.generators()
    aux = {"size": len(members)}
    return _certify(sp, members, "all-generators", aux)


# ── quotient ─────────────────────────────────────────────────────────────

def _coerce_point(sp: PolarSpace, point) -> Subspace:
    if isinstance(point, Subspace):
        pt = point
    else:
        pt = span(sp.field, sp.n, [tuple(point)])
    if pt.n != sp.n or pt.dim != 1:
        raise ConstructionError("point must be one-dimensional in the "
                                "ambient space")
    if not sp.is_totally_isotropic(pt):
        raise ConstructionError(
            f"point {format_subspace(pt)} is not singular")
    return pt


def quotient_ovoid(space, ovoid, point=None):
    """Project an (r, k)-ovoid to an (r-1, k)-ovoid of the quotient at P.

    P must be a singular point lying in no member; members inside the
    tangent hyperplane of P are joined with P and pushed to the quotient
    base, the rest are dropped.  Defaults to the first such point in
    enumeration order.
    """
    sp = _resolve(space)
    ov = _coerce_ovoid(sp, ovoid)
    _require_exact(sp, ov, "quotient input")
    k = _homogeneous_dim(ov, "quotient input")
    if k >= sp.r:
        raise ConstructionError("quotient needs member dimension below the "
                                "rank; generators cover every point")
    field = sp.field

    def free(pt):
        return not any(contains_subspace(field, m, pt) for m in ov.members)

    if point is None:
        for pt in sp.singular_points():
            if free(pt):
                base_point = pt
                break
        else:
            raise ConstructionError("every singular point lies in a member")
    else:
        base_point = _coerce_point(sp, point)
        if not free(base_point):
            raise ConstructionError(
                f"point {format_subspace(base_point)} lies in a member")

    qm = sp.quotient_space(base_point)
    tangent = sp.perp(base_point)
    members = []
    for m in ov.members:
        if contains_subspace(field, tangent, m):
            members.append(qm.project(sum_spaces(field, m, base_point)))
    aux = {
        "point": format_subspace(base_point),
        "base_space": format_descriptor(qm.base.descriptor),
        "kept": len(members),
        "dropped": len(ov) - len(members),
    }
    return _certify(qm.base, members, "quotient", aux)


# ── product ──────────────────────────────────────────────────────────────

def searched_inner_factory(k: int, budget: _search.Budget | None = None):
    """Inner factory for product_ovoid: searches each tangent quotient for
    a homogeneous dimension-k ovoid.  Bases of the same shape share one
    search."""
    cache: dict = {}

    def factory(alpha: Subspace, qmap: QuotientMap):
        key = qmap.base.descriptor
        if key not in cache:
            result = _search.homogeneous_exists(
                qmap.base, k, budget=budget or _search.Budget())
            if result.status != _search.FEASIBLE:
                raise ConstructionError(
                    f"no dimension-{k} ovoid found in "
                    f"{format_descriptor(key)} ({result.status})")
            cache[key] = result.best.members
        return cache[key]

    return factory


def product_ovoid(space, outer, inner_factory):
    """Combine an (r, l)-ovoid with (r-l, k)-ovoids of its tangent quotients.

    inner_factory(alpha, qmap) must return an exact homogeneous ovoid of
    qmap.base for each outer member alpha; the lifted members form an
    (r, k+l)-ovoid of size |outer| * |inner|.  The result is always
    pairwise-reducible: every alpha lies in each member of its fibre.
    """
    sp = _resolve(space)
    out = _coerce_ovoid(sp, outer)
    _require_exact(sp, out, "outer ovoid")
    l = _homogeneous_dim(out, "outer ovoid")
    if l >= sp.r:
        raise ConstructionError("outer members must have dimension below "
                                "the rank, or there is nothing to extend")

    members = []
    inner_k = None
    inner_size = None
    for alpha in out.members:
        qm = sp.quotient_space(alpha)
        inner = list(inner_factory(alpha, qm))
        inner_report = verify(qm.base, inner, rule=EXACT,
                              generator_budget=None)
        if inner_report.status != EXACT:
            raise ConstructionError(
                f"inner set for {format_subspace(alpha)} is not exact "
                f"({inner_report.status})")
        inner_ov = OvoidSet.build(qm.base, inner)
        k = _homogeneous_dim(inner_ov, "inner ovoid")
        if inner_k is None:
            inner_k, inner_size = k, len(inner_ov)
        elif k != inner_k or len(inner_ov) != inner_size:
            raise ConstructionError("inner ovoids disagree on shape")
        members.extend(qm.lift(tau) for tau in inner_ov.members)

    expected = len(out) * inner_size
    if len(set(members)) != expected:
        raise ConstructionError("lifted fibres overlap")
    aux = {
        "outer_size": len(out),
        "outer_dimension": l,
        "inner_size": inner_size,
        "inner_dimension": inner_k,
        "size": expected,
        "pairwise_reducible_at": format_subspace(out.members[0]),
    }
    return _certify(sp, members, "product", aux)


# ── comaximal hyperplane sections ────────────────────────────────────────

# parents whose comaximal (rank r-1) sections exist, with the section kind
_COMAXIMAL = {
    HYPERBOLIC: PARABOLIC,
    PARABOLIC: ELLIPTIC,
    HERMITIAN_ODD: HERMITIAN_EVEN,
}


def _comaximal_section(sp: PolarSpace):
    """First hyperplane (by defining functional) whose section is
    non-degenerate of comaximal rank."""
    want = _COMAXIMAL.get(sp.kind)
    if want is None:
        raise ConstructionError(
            f"{format_descriptor(sp.descriptor)} has no non-degenerate "
            f"comaximal hyperplane section")
    field = sp.field
    for functional in iter_points(field, full_space(sp.n)):
        hyperplane = nullspace(field, [functional], sp.n)
        section = sp.hyperplane_section(hyperplane)
        if section.degenerate or section.space.kind != want:
            continue
        return section
    raise ConstructionError("no suitable hyperplane section found")


def embedded_comaximal_ovoid(space):
    """Generators of a comaximal hyperplane section, as an (r, r-1)-ovoid.

    Works for hyperbolic, parabolic and odd hermitian spaces; the other
    kinds have no non-degenerate section of rank r-1.
    """
    sp = _resolve(space)
    section = _comaximal_section(sp)
    members = [section.lift(g) for g in section.space.generators()]
    aux = {
        "hyperplane": format_subspace(section.hyperplane),
        "section_space": format_descriptor(section.space.descriptor),
        "scale": section.mu,
        "size": len(members),
    }
    return _certify(sp, members, "embedded-comaximal", aux)


# ── local modification ───────────────────────────────────────────────────

def local_modification(space, embedded, points, section=None):
    """Re-route the embedded ovoid around a partial ovoid of the section.

    embedded must be the generator ovoid of a comaximal section (the one
    from embedded_comaximal_ovoid unless section is supplied).  For each
    point P of the partial ovoid, the members through P are the lifted
    section generators through P; they are replaced by the generator set
    of a different comaximal section of the quotient at P.  The surgeries
    touch pairwise disjoint member sets because no section generator
    contains two of the points, so they can be applied simultaneously.
    The point set must satisfy 25 |R|^2 <= q^(2(r-1) + e2) with e2 taken
    from the section.
    """
    sp = _resolve(space)
    if section is None:
        section = _comaximal_section(sp)
    elif section.degenerate or section.parent is not sp:
        raise ConstructionError("section does not belong to the space")
    emb = _coerce_ovoid(sp, embedded)
    canonical = sorted(section.lift(g) for g in section.space.generators())
    if list(emb.members) != canonical:
        raise ConstructionError(
            "embedded ovoid is not the generator set of the section")

    sect_sp = section.space
    pts = []
    for p in points:
        if isinstance(p, Subspace):
            pt = p
        else:
            pt = span(sect_sp.field, sect_sp.n, [tuple(p)])
        if pt.n != sect_sp.n or pt.dim != 1:
            raise ConstructionError("modification points live in the "
                                    "section space")
        if not sect_sp.is_totally_isotropic(pt):
            raise ConstructionError(
                f"section point {format_subspace(pt)} is not singular")
        pts.append(pt)
    pts = sorted(set(pts))

    if pts:
        if sp.r < 3:
            raise ConstructionError("modification needs rank at least 3")
        bound = sp.q ** (2 * (sp.r - 1) + sect_sp.e2)
        if (5 * len(pts)) ** 2 > bound:
            raise ConstructionError(
                f"{len(pts)} points exceed the q^(r-1+e)/5 budget")
        partial = verify(sect_sp, pts, rule=PARTIAL, generator_budget=None)
        if not partial.ok:
            raise ConstructionError("modification points must form a "
                                    "partial ovoid of the section")

    field = sp.field
    removed: set[Subspace] = set()
    added: list[Subspace] = []
    want = _COMAXIMAL[sp.kind]
    for pt in pts:
        ambient_pt = section.lift(pt)
        through = [m for m in emb.members
                   if contains_subspace(field, m, ambient_pt)]
        qm = sp.quotient_space(ambient_pt)
        old = {qm.project(m) for m in through}
        replacement = None
        for functional in iter_points(field, full_space(qm.base.n)):
            hyperplane = nullspace(field, [functional], qm.base.n)
            bsect = qm.base.hyperplane_section(hyperplane)
            if bsect.degenerate or bsect.space.kind != want:
                continue
            new = {bsect.lift(g) for g in bsect.space.generators()}
            if new != old:
                replacement = new
                break
        if replacement is None:
            raise ConstructionError(
                f"no alternative section at {format_subspace(pt)}")
        removed.update(through)
        added.extend(qm.lift(tau) for tau in sorted(replacement))

    members = [m for m in emb.members if m not in removed] + added
    aux = {
        "section_space": format_descriptor(sect_sp.descriptor),
        "hyperplane": format_subspace(section.hyperplane),
        "modified_points": [format_subspace(p) for p in pts],
        "replaced": len(removed),
    }
    return _certify(sp, members, "local-modification", aux)


# ── matchings between the generator classes of a hyperbolic space ────────

@dataclass(frozen=True)
class MatchingGraph:
    """Bipartite meet-in-dimension-(r-1) graph on the two generator classes.

    adjacency[i] lists the indices j with dim(lefts[i] ^ rights[j]) = r-1;
    both sides follow generator enumeration order.
    """

    space: object
    lefts: tuple[Subspace, ...]
    rights: tuple[Subspace, ...]
    adjacency: tuple[tuple[int, ...], ...]

    @property
    def degree(self) -> int:
        return len(self.adjacency[0])


def build_matching_graph(space) -> MatchingGraph:
    """Split the generators of a hyperbolic space into their two classes
    and record which pairs meet in dimension r-1.

    Generators are in the same class iff their intersection dimension has
    the same parity as r; the classes have equal size and the graph is
    regular of degree (q^r - 1)/(q - 1).
    """
    sp = _resolve(space)
    if sp.kind != HYPERBOLIC:
        raise ConstructionError("generator classes split only in "
                                "hyperbolic spaces")
    field = sp.field
    gens = sp.generators()
    first = gens[0]
    lefts, rights = [], []
    for g in gens:
        meet = intersect(field, g, first).dim
        (lefts if (sp.r - meet) % 2 == 0 else rights).append(g)
    if len(lefts) != len(rights):
        raise ConstructionError("generator classes are unbalanced")

    degree = (sp.q ** sp.r - 1) // (sp.q - 1)
    adjacency = []
    for left in lefts:
        row = tuple(j for j, right in enumerate(rights)
                    if intersect(field, left, right).dim == sp.r - 1)
        if len(row) != degree:
            raise ConstructionError("matching graph is not regular")
        adjacency.append(row)
    return MatchingGraph(space=sp.descriptor, lefts=tuple(lefts),
                         rights=tuple(rights), adjacency=tuple(adjacency))


def _augment(adjacency, i, match_right, seen) -> bool:
    for j in adjacency[i]:
        if j in seen:
            continue
        seen.add(j)
        if match_right[j] is None or _augment(adjacency, match_right[j],
                                              match_right, seen):
            match_right[j] = i
            return True
    return False


def matching_ovoid(graph: MatchingGraph, seed: int | None = None):
    """An (r, r-1)-ovoid from a perfect matching of the generator classes.

    Kuhn's augmenting-path algorithm with both sides in enumeration order;
    the members are the pairwise intersections of the matched generators.
    A seed reshuffles the exploration order, sampling a different matching
    while staying reproducible for that seed.
    """
    sp = make_space(graph.space)
    v = len(graph.lefts)
    adjacency = graph.adjacency
    order = list(range(v))
    if seed is not None:
        rng = random.Random(seed)
        rng.shuffle(order)
        shuffled = [list(row) for row in adjacency]
        for row in shuffled:
            rng.shuffle(row)
        adjacency = tuple(tuple(row) for row in shuffled)
    match_right: list = [None] * v
    for i in order:
        if not _augment(adjacency, i, match_right, set()):
            raise ConstructionError("graph has no perfect matching")
    pairs = sorted((match_right[j], j) for j in range(v))
    members = [intersect(sp.field, graph.lefts[i], graph.rights[j])
               for i, j in pairs]
    aux = {
        "classes": v,
        "degree": graph.degree,
        "matched_pairs": pairs,
    }
    return _certify(sp, members, "matching", aux)


def count_perfect_matchings(graph: MatchingGraph) -> int:
    """Permanent of the biadjacency matrix by Ryser's formula with Gray
    code updates; exponential in the class size, so capped at 20."""
    v = len(graph.lefts)
    if v > 20:
        raise ConstructionError(
            f"permanent takes 2^{v} terms; only feasible for v <= 20")
    column_rows = [[i for i in range(v) if j in graph.adjacency[i]]
                   for j in range(v)]
    row_sums = [0] * v
    state = 0
    total = 0
    for g in range(1, 1 << v):
        j = (g & -g).bit_length() - 1
        state ^= 1 << j
        delta = 1 if state & (1 << j) else -1
        for i in column_rows[j]:
            row_sums[i] += delta
        product = 1
        for x in row_sums:
            if x == 0:
                product = 0
                break
            product *= x
        if product:
            total += product if (v - state.bit_count()) % 2 == 0 else -product
    return total


# ── line sets of Q+(5, q) over an exterior line ──────────────────────────

def _multiplier_matrix(field):
    """Action of a root of x^2 + x + c on coordinate pairs, c the first
    coefficient making the polynomial irreducible."""
    squares_plus = {field.add(field.mul(t, t), t) for t in field.elements()}
    c = next(x for x in field.elements()
             if field.neg(x) not in squares_plus)
    return c, ((0, 1), (field.neg(c), field.neg(1)))


def qplus32_ovoid(q: int):
    """A (3, 2)-ovoid of Q+(5, q) of size (q + 1)(q^2 + 1).

    Take the first line with no singular point; its perp W meets the
    quadric in an elliptic Q-(3, q).  Spread W by the multiplicative
    action of a quadratic extension, and for each spread line m collect
    every line of the quadric inside the solid spanned by m and the
    exterior line: q + 1 lines when m is tangent to the elliptic section,
    none when m is a bisecant, 2q + 2 when m is external.
    """
    sp = _resolve(f"Q+(5,{q})")
    field = sp.field
    exterior = None
    for line in enumerate_subspaces(field, 6, 2):
        if all(sp.eval_quadratic(p) != 0 for p in iter_points(field, line)):
            exterior = line
            break
    if exterior is None:
        raise ConstructionError("no exterior line")
    w = sp.perp(exterior)
    if w.dim != 4 or intersect(field, exterior, w).dim != 0:
        raise ConstructionError("exterior line meets its perp")

    c, mult = _multiplier_matrix(field)
    spread = []
    covered = set()
    for vec in iter_points(field, full_space(4)):
        if vec in covered:
            continue
        image = []
        for half in range(2):
            a, b = vec[2 * half], vec[2 * half + 1]
            image.append(field.add(field.mul(a, mult[0][0]),
                                   field.mul(b, mult[1][0])))
            image.append(field.add(field.mul(a, mult[0][1]),
                                   field.mul(b, mult[1][1])))
        line = span(field, 4, [vec, tuple(image)])
        if line.dim != 2:
            raise ConstructionError("multiplier fixed a direction")
        spread.append(line)
        covered.update(iter_points(field, line))
    if len(spread) != q * q + 1:
        raise ConstructionError("spread has the wrong size")

    all_lines = list(sp.enumerate_ti(2))
    members = []
    tangent = bisecant = external = 0
    for m in spread:
        ambient = span(field, 6, [apply_matrix(field, row, w.basis)
                                  for row in m.basis])
        solid = sum_spaces(field, ambient, exterior)
        if solid.dim != 4:
            raise ConstructionError("spread line meets the exterior line")
        hits = sum(1 for p in iter_points(field, ambient)
                   if sp.eval_quadratic(p) == 0)
        inside = [t for t in all_lines
                  if contains_subspace(field, solid, t)]
        if hits == 1:
            tangent += 1
            want = q + 1
        elif hits == 2:
            bisecant += 1
            want = 0
        elif hits == 0:
            external += 1
            want = 2 * q + 2
        else:
            raise ConstructionError("spread line lies on the quadric")
        if len(inside) != want:
            raise ConstructionError(
                f"solid carries {len(inside)} quadric lines, expected {want}")
        members.extend(inside)

    if tangent + 2 * bisecant != q * q + 1 or bisecant != external:
        raise ConstructionError("spread census is inconsistent")
    aux = {
        "exterior_line": format_subspace(exterior),
        "tangent": tangent,
        "bisecant": bisecant,
        "external": external,
        "size": len(members),
    }
    return _certify(sp, members, "qplus32", aux)


# ── the 153-line set of Q-(7, 2) ─────────────────────────────────────────

def msystem32_ovoid_q2():
    """A (3, 2)-ovoid of Q-(7, 2) of size 153.

    Reduce Q-(3, 4) to GF(2): each point becomes a totally singular line
    of the trace form Tr(lambda Q), an elliptic quadric in dimension 8 for
    the first working lambda.  The 17 reduced lines span 51 points; of the
    1071 lines of Q-(7, 2), 408 are secants to that point set, 510 are
    tangents, and 136 miss it.  The 17 reduced lines together with the
    136 external lines cover every plane exactly once.
    """
    quartic = build_field(2, 2)
    binary = build_field(2, 1)
    source = make_space("Q-(3,4)")
    target = make_space("Q-(7,2)")

    def decode(x):
        return tuple(x[2 * i] | (x[2 * i + 1] << 1) for i in range(4))

    def encode(v):
        out = []
        for z in v:
            out.append(z & 1)
            out.append(z >> 1)
        return tuple(out)

    def unit_sum(indices):
        return tuple(1 if i in indices else 0 for i in range(8))

    chosen = None
    for lam in sorted(quartic.elements()):
        if lam == 0:
            continue

        def reduced(x):
            value = quartic.mul(lam, source.eval_quadratic(decode(x)))
            return quartic.add(value, quartic.mul(value, value))

        quad = [0] * 64
        for i in range(8):
            quad[i * 8 + i] = reduced(unit_sum({i}))
        for i in range(8):
            for j in range(i + 1, 8):
                quad[i * 8 + j] = (reduced(unit_sum({i, j}))
                                   ^ quad[i * 8 + i] ^ quad[j * 8 + j])
        if classify_form(binary, 8, quad) != target.descriptor:
            continue
        standard = standardize_quadric(binary, 8, quad)
        chosen = lam
        break
    if chosen is None:
        raise ConstructionError("no scale makes the trace form elliptic")

    lines = []
    omega = 2  # a generator of the quartic field over the prime field
    for pt in source.singular_points():
        v = pt.basis[0]
        scaled = tuple(quartic.mul(omega, z) for z in v)
        raw = span(binary, 8, [encode(v), encode(scaled)])
        if raw.dim != 2:
            raise ConstructionError("reduced point collapsed")
        line = standard.to_standard(raw)
        if not target.is_totally_isotropic(line):
            raise ConstructionError("reduced line is not singular")
        lines.append(line)
    if len(set(lines)) != 17:
        raise ConstructionError("reduction produced duplicate lines")

    marked = set()
    for line in lines:
        marked.update(iter_points(binary, line))
    if len(marked) != 51:
        raise ConstructionError("reduced lines overlap")

    census = {0: 0, 1: 0, 2: 0, 3: 0}
    full = []
    members = list(lines)
    line_set = set(lines)
    for line in target.enumerate_ti(2):
        hits = sum(1 for p in iter_points(binary, line) if p in marked)
        census[hits] += 1
        if hits == 0:
            members.append(line)
        elif hits == 3:
            full.append(line)
    if set(full) != line_set:
        raise ConstructionError("marked points span unexpected lines")
    if census != {0: 136, 1: 510, 2: 408, 3: 17}:
        raise ConstructionError(f"line census off: {census}")

    aux = {
        "scale": chosen,
        "points": len(marked),
        "reduced_lines": census[3],
        "secant": census[2],
        "tangent": census[1],
        "external": census[0],
        "size": len(members),
    }
    return _certify(target, members, "msystem32", aux)
