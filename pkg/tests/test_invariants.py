import pytest

from germlab.invariants import (
    alternating_milnor_numbers,
    build_invariant_report,
    double_point_milnor,
    equivariant_euler_data,
    image_milnor_number,
    is_stable_by_strata,
    le_greuel_report,
    special_formula_checks,
    zero_stable_counts,
)
from germlab.multipoint import double_point_projection

from conftest import make_germ

# frozen values, derived by hand from the weighted Euler-characteristic
# identity and double-checked against the Macaulay oracle stratum data
EXPECTED = {
    "crosscap": {"mu_I": 0, "mu_D": 0, "alt": [0, 0, 0], "zero_stable": {"C": 1, "T": 0}},
    "immersion": {"mu_I": 0, "mu_D": 0, "alt": [0, 0], "zero_stable": {"C": 0, "T": 0}},
    "s1": {"mu_I": 1, "mu_D": 1, "alt": [0, 1, 0], "zero_stable": {"C": 2, "T": 0}},
    "s2": {"mu_I": 2, "mu_D": 2, "alt": [0, 2, 0], "zero_stable": {"C": 3, "T": 0}},
    "h2": {"mu_I": 2, "mu_D": 4, "alt": [0, 1, 1, 0], "zero_stable": {"C": 2, "T": 1}},
    "cusp_curve": {"mu_I": 1, "mu_D": 1, "alt": [0, 1, 0], "zero_stable": None},
}


class TestCorpusInvariants:
    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_image_milnor_number(self, corpus, shared_ctx, name):
        assert image_milnor_number(corpus[name], shared_ctx) == EXPECTED[name]["mu_I"]

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_double_point_milnor(self, corpus, shared_ctx, name):
        assert double_point_milnor(corpus[name], shared_ctx) == EXPECTED[name]["mu_D"]

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_alternating_sequence_and_houston_sum(self, corpus, shared_ctx, name):
        alt = alternating_milnor_numbers(corpus[name], shared_ctx)
        assert alt == EXPECTED[name]["alt"]
        assert sum(alt) == EXPECTED[name]["mu_I"]

    @pytest.mark.parametrize("name", [n for n in sorted(EXPECTED) if EXPECTED[n]["zero_stable"]is not None])
    def test_zero_stable_counts(self, corpus, shared_ctx, name):
        assert zero_stable_counts(corpus[name], shared_ctx) == EXPECTED[name]["zero_stable"]

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_order_relation_and_stability(self, corpus, shared_ctx, name):
        mu_I = image_milnor_number(corpus[name], shared_ctx)
        mu_D = double_point_milnor(corpus[name], shared_ctx)
        assert mu_I <= mu_D
        stable = is_stable_by_strata(corpus[name], shared_ctx)
        assert (mu_I == 0) == (mu_D == 0) == stable

    @pytest.mark.parametrize("name", sorted(EXPECTED))
    def test_special_checks_pass(self, corpus, shared_ctx, name):
        checks = special_formula_checks(corpus[name], shared_ctx)
        assert all(v["pass"] for v in checks.values())

    def test_triple_point_identity_values(self, corpus, shared_ctx):
        checks = special_formula_checks(corpus["h2"], shared_ctx)
        tp = checks["triple_point_formula"]
        assert (tp["mu_D"], tp["mu_D2"], tp["T"]) == (4, 1, 1)


class TestEquivariantTable:
    def test_s1_rows(self, corpus, shared_ctx):
        table = equivariant_euler_data(corpus["s1"], shared_ctx)
        rows = {(r.k, r.gamma.parts): r for r in table.rows}
        assert str(rows[(2, (1, 1))].a_gamma) == "-1/2"
        assert str(rows[(2, (2,))].a_gamma) == "1/2"
        entry = rows[(2, (2,))].entries[0]
        assert entry["status"] == "ZERO_DIM" and entry["m0"] == 2

    def test_h2_negative_rows_contribute_nothing(self, corpus, shared_ctx):
        table = equivariant_euler_data(corpus["h2"], shared_ctx)
        for row in table.rows:
            if row.negative:
                assert row.entries == []
                assert row.expected_dim < 0


class TestLeGreuel:
    def test_cusp_curve(self, corpus, shared_ctx):
        rep = le_greuel_report(corpus["cusp_curve"], shared_ctx)
        assert rep["mu_I"] == 1 and rep["multiplicity"] == 2
        assert rep["critical_points_on_strata"] == 2

    def test_s1(self, corpus, shared_ctx):
        rep = le_greuel_report(corpus["s1"], shared_ctx)
        assert rep["mu_I"] == 1 and rep["mu_I_slice"] == 1
        assert rep["critical_points_on_strata"] == 2

    def test_immersion(self, corpus, shared_ctx):
        rep = le_greuel_report(corpus["immersion"], shared_ctx)
        assert rep["mu_I"] == 0
        assert rep["critical_points_on_strata"] == rep["mu_I"] + rep["mu_I_slice"]


class TestMultiGermInvariants:
    def test_stable_node(self, shared_ctx):
        g = make_germ(2, [("x1", "y", "0"), ("x1", "0", "y")], "node2")
        assert image_milnor_number(g, shared_ctx) == 0
        assert double_point_milnor(g, shared_ctx) == 0
        assert alternating_milnor_numbers(g, shared_ctx) == [0, 0, 0]

    def test_stable_triple_point(self, shared_ctx):
        g = make_germ(2, [("x1", "y", "0"), ("x1", "0", "y"), ("x1", "x1", "y")], "tripoint")
        assert image_milnor_number(g, shared_ctx) == 0
        assert double_point_milnor(g, shared_ctx) == 0

    def test_three_concurrent_lines(self, shared_ctx):
        g = make_germ(1, [("y", "0"), ("0", "y"), ("y", "y")], "lines3")
        assert image_milnor_number(g, shared_ctx) == 1
        # the top combinatorial term carries the whole image homology
        assert alternating_milnor_numbers(g, shared_ctx) == [0, 0, 1]
        assert double_point_milnor(g, shared_ctx) == 3
        assert not is_stable_by_strata(g, shared_ctx)

    def test_transverse_curve_crossing(self, shared_ctx):
        g = make_germ(1, [("y", "0"), ("0", "y")], "lines2")
        assert image_milnor_number(g, shared_ctx) == 0
        assert is_stable_by_strata(g, shared_ctx)


class TestClassicalGermTables:
    # classical simple germs from the plane to three-space: the image Milnor
    # number equals the index of the singularity class
    def test_s3(self, shared_ctx):
        g = make_germ(2, [("x1", "y^2", "y^3 - x1^4*y")], "s3")
        assert image_milnor_number(g, shared_ctx) == 3
        assert alternating_milnor_numbers(g, shared_ctx) == [0, 3, 0]
        assert zero_stable_counts(g, shared_ctx) == {"C": 4, "T": 0}

    def test_b2(self, shared_ctx):
        g = make_germ(2, [("x1", "y^2", "x1^2*y + y^5")], "b2")
        assert image_milnor_number(g, shared_ctx) == 2
        assert zero_stable_counts(g, shared_ctx) == {"C": 2, "T": 0}
        assert double_point_milnor(g, shared_ctx) == 3  # the A3 double point curve


class TestThreeDimensionalSource:
    def test_s1_3d(self, shared_ctx):
        g = make_germ(3, [("x1", "x2", "y^2", "y^3 + (x1^2 + x2^2)*y")], "s1_3d")
        assert image_milnor_number(g, shared_ctx) == 1
        assert double_point_milnor(g, shared_ctx) == 1
        assert alternating_milnor_numbers(g, shared_ctx) == [0, 1, 0]
        counts = zero_stable_counts(g, shared_ctx)
        assert counts == {"Q": 0}
        checks = special_formula_checks(g, shared_ctx)
        assert checks["quadruple_point_back_solve"]["pass"]
        assert checks["quadruple_point_back_solve"]["mu3_trivial_isotype"] == 0


class TestPairObject:
    def test_double_point_projection_matches_mu_D(self, corpus, shared_ctx):
        pair = double_point_projection(corpus["h2"], shared_ctx)
        assert image_milnor_number(pair, shared_ctx) == 4

    def test_semicontinuity_under_specialization(self, families, shared_ctx):
        # compare each family member at random parameters against t = 0
        from fractions import Fraction

        for name, fam in families.items():
            f0 = fam.specialize(Fraction(0))
            mu0 = image_milnor_number(f0, shared_ctx)
            for t in (Fraction(3), Fraction(-5, 2)):
                ft = fam.specialize(t)
                assert image_milnor_number(ft, shared_ctx) <= mu0, name


class TestReportBuilder:
    def test_report_shape_and_consistency(self, corpus, shared_ctx):
        report = build_invariant_report(corpus["s1"], shared_ctx)
        assert report["consistency"] == "CONSISTENT"
        assert report["mu_I"] == 1 and report["mu_D"] == 1
        assert report["mu_alt"] == [0, 1, 0]
        assert report["mu_I_star"] == [1, 1]
        assert report["mu_tilde_I_star_pair"] == []
        assert report["comparativan"]["reference"]["agree"] is False
        assert report["genericity"]["certified"] is True

    def test_report_validates_against_schema(self, corpus, shared_ctx):
        import jsonschema

        from germlab.germfile import load_schema

        report = build_invariant_report(corpus["crosscap"], shared_ctx)
        jsonschema.validate(report, load_schema("report.schema.json"))
