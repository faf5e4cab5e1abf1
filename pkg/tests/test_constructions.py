"""Constructions: every product is re-verified exact, and the censuses,
sizes and class counts are pinned against independently computed values."""

import pytest

from polarcover import ovoid
from polarcover.constructions import (
    ConstructionError,
    all_generators_ovoid,
    build_matching_graph,
    count_perfect_matchings,
    embedded_comaximal_ovoid,
    local_modification,
    matching_ovoid,
    msystem32_ovoid_q2,
    product_ovoid,
    qplus32_ovoid,
    quotient_ovoid,
    searched_inner_factory,
)
from polarcover.counting import ovoid_size, schrijver_bound
from polarcover.ovoid import EXACT, PAIRWISE, ReducibilityWitness
from polarcover.polarspace import make_space
from polarcover.search import homogeneous_exists


class TestAllGenerators:
    def test_w32(self):
        ov, report = all_generators_ovoid("W(3,2)")
        assert len(ov) == 15
        assert ov.type_signature == "2^15"
        assert report.name == "all-generators"
        assert report.verification.status == EXACT

    def test_q32(self):
        ov, _ = all_generators_ovoid("Q+(3,2)")
        assert len(ov) == 6


class TestQuotient:
    def test_embedded_descends_to_base(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        out, report = quotient_ovoid("Q+(5,2)", emb)
        assert out.space == make_space("Q+(3,2)").descriptor
        assert len(out) == ovoid_size(2, 2, 0, 2) == 6
        assert report.auxiliary["kept"] == 6
        assert report.auxiliary["dropped"] == 9

    def test_explicit_point(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        sp = make_space("Q+(5,2)")
        free = next(p for p in sp.singular_points()
                    if not any(_inside(sp, m, p) for m in emb.members))
        out, report = quotient_ovoid(sp, emb, point=free.basis[0])
        assert len(out) == 6
        assert report.auxiliary["point"]

    def test_point_in_member_rejected(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        covered = emb.members[0].basis[0]
        with pytest.raises(ConstructionError, match="lies in a member"):
            quotient_ovoid("Q+(5,2)", emb, point=covered)

    def test_generators_cannot_descend(self):
        allg, _ = all_generators_ovoid("Q+(5,2)")
        with pytest.raises(ConstructionError, match="below the rank"):
            quotient_ovoid("Q+(5,2)", allg)

    def test_nonsingular_point_rejected(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        with pytest.raises(ConstructionError, match="not singular"):
            quotient_ovoid("Q+(5,2)", emb, point=(1, 1, 0, 0, 0, 0))


def _inside(sp, outer, point):
    from polarcover.linalg import contains_subspace
    return contains_subspace(sp.field, outer, point)


class TestProduct:
    def test_points_times_points(self):
        outer = homogeneous_exists("Q+(5,2)", 1).best
        ov, report = product_ovoid("Q+(5,2)", outer, searched_inner_factory(1))
        assert len(ov) == 15
        assert ov.type_signature == "2^15"
        aux = report.auxiliary
        assert aux["outer_size"] == 5 and aux["inner_size"] == 3
        assert aux["outer_dimension"] == aux["inner_dimension"] == 1

    def test_product_is_pairwise_reducible(self):
        outer = homogeneous_exists("Q+(5,2)", 1).best
        ov, _ = product_ovoid("Q+(5,2)", outer, searched_inner_factory(1))
        witness = ovoid.reducibility_witness("Q+(5,2)", ov, mode=PAIRWISE)
        assert isinstance(witness, ReducibilityWitness)
        assert witness.pi.dim == 1                  # an outer point
        assert len(witness.members_selected) == 3   # its whole fibre

    def test_inner_generators_give_all_generators(self):
        # lifting every generator of each quotient reproduces the full set
        outer = homogeneous_exists("Q+(5,2)", 1).best
        ov, _ = product_ovoid("Q+(5,2)", outer,
                              lambda alpha, qm: qm.base.generators())
        allg, _ = all_generators_ovoid("Q+(5,2)")
        assert ov.members == allg.members

    def test_outer_must_leave_room(self):
        allg, _ = all_generators_ovoid("Q+(3,2)")
        with pytest.raises(ConstructionError, match="nothing to extend"):
            product_ovoid("Q+(3,2)", allg, searched_inner_factory(1))

    def test_bad_inner_rejected(self):
        outer = homogeneous_exists("Q+(5,2)", 1).best

        def junk(alpha, qm):
            return [next(iter(qm.base.singular_points()))]

        with pytest.raises(ConstructionError, match="not exact"):
            product_ovoid("Q+(5,2)", outer, junk)


class TestEmbedded:
    @pytest.mark.parametrize("text,section,size,sig", [
        ("Q+(5,2)", "Q(4,2)", 15, "2^15"),
        ("Q(4,2)", "Q-(3,2)", 5, "1^5"),
        ("H(3,4)", "H(2,4)", 9, "1^9"),
        ("Q+(5,3)", "Q(4,3)", 40, "2^40"),
    ])
    def test_section_kinds_and_sizes(self, text, section, size, sig):
        ov, report = embedded_comaximal_ovoid(text)
        assert len(ov) == size
        assert ov.type_signature == sig
        assert report.auxiliary["section_space"] == section
        assert report.verification.status == EXACT

    @pytest.mark.parametrize("text", ["Q-(5,2)", "W(5,2)", "H(4,4)"])
    def test_unsupported_kinds(self, text):
        with pytest.raises(ConstructionError, match="comaximal"):
            embedded_comaximal_ovoid(text)

    def test_size_matches_closed_form(self):
        ov, _ = embedded_comaximal_ovoid("Q+(5,2)")
        assert len(ov) == ovoid_size(3, 2, 0, 2)


class TestLocalModification:
    def test_empty_points_is_identity(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        out, report = local_modification("Q+(5,2)", emb, [])
        assert out.members == emb.members
        assert report.auxiliary["replaced"] == 0

    def test_single_point(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        point = next(iter(make_space("Q(4,2)").singular_points()))
        out, report = local_modification("Q+(5,2)", emb, [point])
        assert len(out) == 15
        assert out.type_signature == "2^15"
        assert out.members != emb.members
        assert report.auxiliary["replaced"] == 3   # section lines through P
        assert report.verification.status == EXACT

    def test_budget_cap(self):
        # q = 2: (5*2)^2 = 100 > 2^(2*2+2) = 64
        emb, _ = embedded_comaximal_ovoid("Q+(5,2)")
        pts = list(make_space("Q(4,2)").singular_points())[:2]
        with pytest.raises(ConstructionError, match="budget"):
            local_modification("Q+(5,2)", emb, pts)

    def test_two_points_at_q3(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,3)")
        sect = make_space("Q(4,3)")
        pts = list(sect.singular_points())
        gens = sect.generators()
        first = pts[0]
        second = next(p for p in pts[1:]
                      if not any(_inside(sect, g, first) and _inside(sect, g, p)
                                 for g in gens))
        out, report = local_modification("Q+(5,3)", emb, [first, second])
        assert len(out) == 40
        assert report.auxiliary["replaced"] == 8   # q+1 lines per point
        assert report.verification.status == EXACT

    def test_collinear_points_rejected(self):
        emb, _ = embedded_comaximal_ovoid("Q+(5,3)")
        sect = make_space("Q(4,3)")
        pts = list(sect.singular_points())
        gens = sect.generators()
        first = pts[0]
        mate = next(p for p in pts[1:]
                    if any(_inside(sect, g, first) and _inside(sect, g, p)
                           for g in gens))
        with pytest.raises(ConstructionError, match="partial ovoid"):
            local_modification("Q+(5,3)", emb, [first, mate])

    def test_rank_two_has_no_room(self):
        emb, _ = embedded_comaximal_ovoid("Q(4,2)")
        point = next(iter(make_space("Q-(3,2)").singular_points()))
        with pytest.raises(ConstructionError, match="rank at least 3"):
            local_modification("Q(4,2)", emb, [point])

    def test_foreign_ovoid_rejected(self):
        graph = build_matching_graph("Q+(5,2)")
        other, _ = matching_ovoid(graph)
        with pytest.raises(ConstructionError, match="generator set"):
            local_modification("Q+(5,2)", other, [])


class TestMatching:
    def test_grid_graph_is_k33(self):
        graph = build_matching_graph("Q+(3,2)")
        assert len(graph.lefts) == len(graph.rights) == 3
        assert graph.degree == 3
        assert count_perfect_matchings(graph) == 6   # 3!

    def test_grid_matching_ovoid(self):
        ov, report = matching_ovoid(build_matching_graph("Q+(3,2)"))
        assert len(ov) == 3
        assert ov.type_signature == "1^3"
        assert report.verification.status == EXACT

    def test_q52_graph(self):
        graph = build_matching_graph("Q+(5,2)")
        assert len(graph.lefts) == 15                # (q+1)(q^2+1)
        assert graph.degree == 7                     # (q^3-1)/(q-1)

    def test_q52_matching_ovoid(self):
        ov, report = matching_ovoid(build_matching_graph("Q+(5,2)"))
        assert len(ov) == 15
        assert ov.type_signature == "2^15"
        assert report.auxiliary["classes"] == 15

    def test_q52_permanent_beats_lower_bound(self):
        graph = build_matching_graph("Q+(5,2)")
        permanent = count_perfect_matchings(graph)
        assert permanent == 24_601_472
        assert permanent >= schrijver_bound(15, 7).value

    def test_permanent_cap(self):
        graph = build_matching_graph("Q+(5,2)")
        big = type(graph)(space=graph.space,
                          lefts=graph.lefts + graph.lefts,
                          rights=graph.rights + graph.rights,
                          adjacency=graph.adjacency + graph.adjacency)
        with pytest.raises(ConstructionError, match="v <= 20"):
            count_perfect_matchings(big)

    def test_only_hyperbolic(self):
        with pytest.raises(ConstructionError, match="hyperbolic"):
            build_matching_graph("W(5,2)")


class TestQplus32:
    def test_q2(self):
        ov, report = qplus32_ovoid(2)
        assert len(ov) == 15
        assert ov.type_signature == "2^15"
        aux = report.auxiliary
        assert (aux["tangent"], aux["bisecant"], aux["external"]) == (3, 1, 1)
        assert report.verification.status == EXACT

    def test_q3(self):
        ov, report = qplus32_ovoid(3)
        assert len(ov) == 40 == ovoid_size(3, 2, 0, 3)
        aux = report.auxiliary
        assert (aux["tangent"], aux["bisecant"], aux["external"]) == (0, 5, 5)

    @pytest.mark.parametrize("q", [2, 3, 4])
    def test_census_invariants(self, q):
        _, report = qplus32_ovoid(q)
        aux = report.auxiliary
        assert aux["tangent"] + 2 * aux["bisecant"] == q * q + 1
        assert aux["bisecant"] == aux["external"]
        assert aux["size"] == (q + 1) * (q * q + 1)

    def test_bad_order(self):
        with pytest.raises(ValueError):
            qplus32_ovoid(6)


class TestMsystem32:
    def test_full_run(self):
        ov, report = msystem32_ovoid_q2()
        assert len(ov) == 153 == ovoid_size(3, 2, 4, 2)
        assert ov.type_signature == "2^153"
        aux = report.auxiliary
        assert aux["points"] == 51
        assert aux["reduced_lines"] == 17
        assert aux["secant"] == 408
        assert aux["tangent"] == 510
        assert aux["external"] == 136
        assert report.verification.status == EXACT

    def test_census_totals(self):
        _, report = msystem32_ovoid_q2()
        aux = report.auxiliary
        assert aux["reduced_lines"] + aux["secant"] + aux["tangent"] \
            + aux["external"] == 1071
        assert aux["reduced_lines"] + aux["external"] == 153
