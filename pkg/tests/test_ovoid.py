"""Ovoid verification, signatures, reducibility, and the file codec."""

import itertools

import pytest

from polarcover.counting import num_generators, ovoid_size
from polarcover.linalg import Subspace, span
from polarcover.ovoid import (
    EXACT,
    INVALID,
    PAIRWISE,
    PARTIAL,
    REPLACEABLE,
    GeneratorBudgetError,
    Irreducible,
    OvoidError,
    OvoidSet,
    ReducibilityWitness,
    coverage_histogram,
    format_ovoid,
    parse_ovoid,
    read_ovoid,
    reducibility_witness,
    type_signature,
    verify,
    write_ovoid,
)
from polarcover.polarspace import make_space


def point(space, coords):
    return span(space.field, space.n, [coords])


def elliptic_point_ovoid(space):
    """Five points of Q+(5,2) forming an exact ovoid, via two sections."""
    first = None
    from polarcover.linalg import full_space, iter_points, nullspace
    for phi in iter_points(space.field, full_space(6)):
        res = space.hyperplane_section(nullspace(space.field, [phi], 6))
        if not res.degenerate:
            first = res
            break
    inner = None
    F = first.space.field
    for phi in iter_points(F, full_space(5)):
        res = first.space.hyperplane_section(nullspace(F, [phi], 5))
        if not res.degenerate and res.space.kind == "elliptic":
            inner = res
            break
    members = []
    for p in inner.space.singular_points():
        members.append(first.lift(inner.lift(p)))
    return OvoidSet.build(space, members)


class TestOvoidSet:
    def test_build_canonicalizes(self):
        S = make_space("W(3,2)")
        pts = list(S.singular_points())
        o = OvoidSet.build(S, [pts[3], pts[0], pts[3]])
        assert o.members == (pts[0], pts[3])
        assert len(o) == 2
        assert list(o) == [pts[0], pts[3]]

    def test_build_rejects_bad_members(self):
        S = make_space("Q+(5,2)")
        with pytest.raises(OvoidError):
            OvoidSet.build(S, [point(S, (1, 1, 0, 0, 0, 0))])  # not singular
        with pytest.raises(OvoidError):
            OvoidSet.build(S, [Subspace(6, (), ())])  # trivial
        with pytest.raises(OvoidError):
            OvoidSet.build(S, [span(S.field, 4, [(1, 0, 0, 0)])])  # wrong ambient

    def test_type_signature(self):
        S = make_space("W(5,2)")
        allgens = OvoidSet.build(S, S.generators())
        assert allgens.type_signature == "3^135"
        assert type_signature([]) == ""
        pts = list(S.singular_points())[:2]
        lines = list(S.enumerate_ti(2))[:3]
        assert type_signature(pts + lines) == "1^2 2^3"


class TestVerify:
    def test_all_generators_exact(self):
        S = make_space("W(5,2)")
        rep = verify(S, OvoidSet.build(S, S.generators()))
        assert rep.status == EXACT
        assert rep.generators_checked == 135
        assert rep.violations == []
        assert rep.ok

    def test_single_point_partial_not_exact(self):
        S = make_space("Q+(5,2)")
        P = point(S, (1, 0, 0, 0, 0, 0))
        assert verify(S, [P], rule=PARTIAL).status == PARTIAL
        rep = verify(S, [P], rule=EXACT)
        assert rep.status == INVALID
        assert rep.diagnostic is not None  # homogeneous size fast path

    def test_homogeneous_fast_path_skips_scan(self):
        S = make_space("Q+(5,2)")
        P = point(S, (1, 0, 0, 0, 0, 0))
        rep = verify(S, [P], rule=EXACT)
        assert rep.generators_checked == 0
        assert "5" in rep.diagnostic

    def test_two_members_in_one_generator(self):
        S = make_space("Q+(5,2)")
        g = S.generators()[0]
        P1 = span(S.field, 6, [g.basis[0]])
        P2 = span(S.field, 6, [g.basis[1]])
        rep = verify(S, [P1, P2], rule=PARTIAL)
        assert rep.status == INVALID
        assert any(c == 2 for _, c in rep.violations)
        bad_gens = [gen for gen, _ in rep.violations]
        assert g in bad_gens

    def test_exact_reports_uncovered_generators(self):
        S = make_space("Q+(5,2)")
        g = S.generators()[0]
        line = span(S.field, 6, g.basis[:2])
        P = point(S, (1, 0, 0, 0, 0, 0))
        rep = verify(S, [P, line], rule=EXACT)  # inhomogeneous, full scan
        assert rep.status == INVALID
        assert rep.generators_checked == 30
        assert all(c != 1 for _, c in rep.violations)

    def test_order_independent(self):
        S = make_space("W(3,2)")
        pts = list(S.singular_points())
        a = verify(S, pts[:4], rule=PARTIAL)
        b = verify(S, list(reversed(pts[:4])), rule=PARTIAL)
        assert (a.status, a.violations) == (b.status, b.violations)

    def test_exact_implies_size_formula(self):
        S = make_space("W(5,2)")
        o = OvoidSet.build(S, S.generators())
        rep = verify(S, o)
        assert rep.status == EXACT
        assert len(o) == ovoid_size(S.r, S.r, S.e2, S.q)

    def test_bad_rule_and_budget(self):
        S = make_space("W(3,2)")
        with pytest.raises(OvoidError):
            verify(S, [], rule="SLOPPY")
        with pytest.raises(GeneratorBudgetError):
            verify(S, [], generator_budget=2)

    def test_accepts_descriptor_text(self):
        rep = verify("W(3,2)", [], rule=PARTIAL)
        assert rep.status == PARTIAL
        assert rep.generators_checked == num_generators("symplectic", 2, 2)

    def test_ovoid_for_wrong_space_rejected(self):
        S = make_space("W(3,2)")
        other = make_space("Q+(3,2)")
        o = OvoidSet.build(other, [next(iter(other.singular_points()))])
        with pytest.raises(OvoidError):
            verify(S, o)


class TestHistogram:
    def test_all_generators(self):
        S = make_space("W(5,2)")
        assert coverage_histogram(S, OvoidSet.build(S, S.generators())) == {1: 135}

    def test_empty(self):
        S = make_space("W(5,2)")
        assert coverage_histogram(S, []) == {0: 135}

    def test_total_is_generator_count(self):
        S = make_space("Q+(5,2)")
        pts = list(S.singular_points())[:7]
        hist = coverage_histogram(S, pts)
        assert sum(hist.values()) == num_generators(S.kind, S.r, S.q)


class TestReducibility:
    def test_elliptic_point_ovoid_is_exact_and_irreducible(self):
        S = make_space("Q+(5,2)")
        o = elliptic_point_ovoid(S)
        assert len(o) == 5
        assert o.type_signature == "1^5"
        assert verify(S, o).status == EXACT
        res = reducibility_witness(S, o, PAIRWISE)
        assert res == Irreducible(PAIRWISE)
        res = reducibility_witness(S, o, REPLACEABLE)
        assert res == Irreducible(REPLACEABLE)

    def test_replacement_construction_detected(self):
        S = make_space("Q+(5,2)")
        o = elliptic_point_ovoid(S)
        P = o.members[0]
        qm = S.quotient_space(P)
        base_pts = list(qm.base.singular_points())
        base_ovoid = None
        for triple in itertools.combinations(base_pts, 3):
            if verify(qm.base, list(triple)).status == EXACT:
                base_ovoid = triple
                break
        assert base_ovoid is not None
        lines = [qm.lift(b) for b in base_ovoid]
        modified = OvoidSet.build(S, list(o.members[1:]) + lines)
        assert modified.type_signature == "1^4 2^3"
        assert verify(S, modified).status == EXACT

        w = reducibility_witness(S, modified, REPLACEABLE)
        assert isinstance(w, ReducibilityWitness)
        assert w.pi == P
        assert set(w.members_selected) == set(lines)
        # the replacement really is smaller and exact
        rest = [m for m in modified.members if m not in set(w.members_selected)]
        replaced = OvoidSet.build(S, rest + [w.pi])
        assert len(replaced) < len(modified)
        assert verify(S, replaced).status == EXACT

        w2 = reducibility_witness(S, modified, PAIRWISE)
        assert isinstance(w2, ReducibilityWitness)
        assert w2.pi == P

    def test_all_generators_pairwise_reducible(self):
        S = make_space("Q+(5,2)")
        w = reducibility_witness(S, OvoidSet.build(S, S.generators()), PAIRWISE)
        assert isinstance(w, ReducibilityWitness)
        assert w.pi.dim >= 1
        assert len(w.members_selected) >= 2

    def test_candidate_order_prefers_large_intersections(self):
        S = make_space("W(5,2)")
        w = reducibility_witness(S, OvoidSet.build(S, S.generators()), PAIRWISE)
        # generator pairs meet in up to a line; the witness must pick dim 2
        assert w.pi.dim == 2

    def test_requires_exact_input(self):
        S = make_space("Q+(5,2)")
        P = point(S, (1, 0, 0, 0, 0, 0))
        with pytest.raises(OvoidError):
            reducibility_witness(S, [P], PAIRWISE)
        with pytest.raises(OvoidError):
            reducibility_witness(S, [P], "OTHER")


class TestCodec:
    def test_round_trip(self, tmp_path):
        S = make_space("W(5,2)")
        o = OvoidSet.build(S, S.generators()[:10])
        path = tmp_path / "w52.ovoid"
        write_ovoid(path, o)
        assert read_ovoid(path) == o
        text = path.read_text()
        lines = text.splitlines()
        assert lines[0] == "polarcover-ovoid v1"
        assert lines[1] == "W(5,2)"
        assert lines[2] == "2^1"
        assert len(lines) == 13

    def test_field_line_formats(self):
        S = make_space("H(3,4)")
        o = OvoidSet.build(S, [next(iter(S.singular_points()))])
        assert format_ovoid(o).splitlines()[2] == "2^2"

    def test_parse_errors_carry_line_numbers(self):
        good = format_ovoid(OvoidSet.build(
            make_space("W(3,2)"), [point(make_space("W(3,2)"), (1, 0, 0, 0))]))
        with pytest.raises(OvoidError, match="line 1"):
            parse_ovoid("wrong-magic\nW(3,2)\n2^1\n")
        with pytest.raises(OvoidError, match="line 2"):
            parse_ovoid("polarcover-ovoid v1\nZ(3,2)\n2^1\n")
        with pytest.raises(OvoidError, match="line 3"):
            parse_ovoid("polarcover-ovoid v1\nW(3,2)\nweird\n")
        with pytest.raises(OvoidError, match="line 3"):
            parse_ovoid("polarcover-ovoid v1\nW(3,2)\n3^1\n")
        with pytest.raises(OvoidError, match="line 5"):
            parse_ovoid(good + "1,0\n")
        with pytest.raises(OvoidError, match="line 1"):
            parse_ovoid("")
        # a non-isotropic member is caught at build time
        with pytest.raises(OvoidError, match="member"):
            parse_ovoid("polarcover-ovoid v1\nQ+(5,2)\n2^1\n1,1,0,0,0,0\n")

    def test_empty_member_list_is_fine(self):
        o = parse_ovoid("polarcover-ovoid v1\nW(3,2)\n2^1\n")
        assert len(o) == 0
