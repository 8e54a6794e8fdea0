#include "tern/verify.hpp"

#include <gtest/gtest.h>

using namespace tern;

namespace {

std::string failures(const CertificateReport& r) {
    std::string out;
    for (const auto& c : r.checks)
        if (!c.pass) out += c.id + " -> " + c.residual + "\n";
    return out;
}

}  // namespace

TEST(Verify, LieAlgebraHasAllPairs) {
    Tern t = build_irreducible(TernClass::u, 0);
    auto rep = check_lie_algebra(t);
    EXPECT_EQ(rep.checks.size(), 45u);
    EXPECT_TRUE(rep.overall()) << failures(rep);
}

TEST(Verify, LieAlgebraWithHelicity) {
    for (int m : {1, 2, -3}) {
        auto rep = check_lie_algebra(build_irreducible(TernClass::u, m));
        EXPECT_TRUE(rep.overall()) << m << "\n" << failures(rep);
        auto rd = check_lie_algebra(build_irreducible(TernClass::d, m));
        EXPECT_TRUE(rd.overall()) << m << "\n" << failures(rd);
    }
}

TEST(Verify, LieAlgebraDetectsBrokenGenerator) {
    Tern t = build_irreducible(TernClass::u, 0);
    t.k[0] = -t.k[0];
    auto rep = check_lie_algebra(t);
    EXPECT_FALSE(rep.overall());
}

TEST(Verify, CatalogPassesEverything) {
    for (const auto& t : catalog(2)) {
        auto rep = full_report(t);
        EXPECT_TRUE(rep.overall()) << t.spec.to_string() << "\n" << failures(rep);
    }
}

TEST(Verify, HelicityValues) {
    auto h = check_helicity(build_s_m(3, 1));
    ASSERT_EQ(h.per_block.size(), 2u);
    EXPECT_EQ(*h.per_block[0], ComplexRational::frac(3, 2));
    EXPECT_EQ(*h.per_block[1], ComplexRational::frac(-3, 2));
    EXPECT_TRUE(h.report.overall());
}

TEST(Verify, CasimirsVanish) {
    auto rep = check_casimirs(build_irreducible(TernClass::d, 2));
    EXPECT_TRUE(rep.overall()) << failures(rep);
    EXPECT_EQ(rep.derived_constants.at("eta"), "0");
    EXPECT_EQ(rep.derived_constants.at("varpi"), "0");
}

TEST(Verify, SpectrumClass) {
    EXPECT_EQ(check_spectrum_sign(build_irreducible(TernClass::d, 0)).derived_constants.at("class"), "d");
    EXPECT_EQ(check_spectrum_sign(build_s_zero("UU", 1)).derived_constants.at("class"), "s");
    Tern t = build_irreducible(TernClass::u, 0);
    t.spec.cls = TernClass::d;
    EXPECT_FALSE(check_spectrum_sign(t).overall());
}

TEST(Verify, DiscreteRelationsDetectWrongSquare) {
    Tern t = build_s_zero("AA", 1);
    t.expected.pi_square = -1;
    EXPECT_FALSE(check_discrete_relations(t).overall());
    EXPECT_THROW(check_discrete_relations(build_u_pair(2)), std::invalid_argument);
}

TEST(Verify, MirrorFailsForUnitaryPiOnHelicityBlock) {
    // Pi = U on a helicity block anticommutes with the helicity only when m = 0.
    Tern t = build_irreducible(TernClass::u, 2);
    t.pi = OperatorExpr::parity(1);
    t.tau = compose(OperatorExpr::conjugation(1), OperatorExpr::parity(1));
    EXPECT_FALSE(check_mirror(t).overall());
}

TEST(Verify, CommutantIrreducible) {
    for (const char* s : {"u:m=0", "s:m=0:UU:+1", "s:m=2:AA:-1", "u-doublet", "s-quartet"}) {
        auto r = commutant_probe(build(TernSpec::parse(s)));
        EXPECT_TRUE(r.irreducible) << s;
        EXPECT_GT(r.equations, 0);
    }
}

TEST(Verify, CommutantSeesReducibility) {
    // Without Pi and T the pair (m, -m) keeps both block projections.
    auto r = commutant_probe(build_u_pair(2));
    EXPECT_FALSE(r.irreducible);
    EXPECT_EQ(r.basis.size(), 2u);
    // Without self-adjointness the doublet commutant contains i sigma_x.
    auto nsa = commutant_probe(build_example(Family::doublet_u), {true, false});
    EXPECT_FALSE(nsa.irreducible);
}

TEST(Verify, QuartetBlockReduction) {
    auto rep = check_block_reduction(build_example(Family::quartet_s));
    EXPECT_TRUE(rep.overall()) << failures(rep);
    EXPECT_THROW(check_block_reduction(build_irreducible(TernClass::u, 0)), std::invalid_argument);
}

TEST(Verify, JsonIsSortedAndComplete) {
    auto j = full_report(build_irreducible(TernClass::u, 0)).to_json();
    EXPECT_EQ(j["schema"], 1);
    EXPECT_EQ(j["overall"], "pass");
    std::string prev;
    for (const auto& c : j["checks"]) {
        std::string id = c["id"];
        EXPECT_LE(prev, id);
        prev = id;
    }
}

TEST(Mutation, ParsesAndBreaksTheAlgebra) {
    auto mu = Mutation::parse("J3+=p1");
    EXPECT_EQ(mu.generator, "J3");
    EXPECT_EQ(mu.coefficient, RationalFn::p(1));
    EXPECT_EQ(Mutation::parse("K1+=-1/2*i*p0").coefficient,
              RationalFn(ComplexRational(Rational(0), Rational(-1, 2))) * RationalFn::p0());
    Tern t = build_irreducible(TernClass::u, 0);
    mu.apply(t);
    auto rep = check_lie_algebra(t);
    EXPECT_FALSE(rep.overall());
    bool names_j3 = false;
    for (const auto& c : rep.checks)
        if (!c.pass && c.id.find("J3") != std::string::npos) names_j3 = true;
    EXPECT_TRUE(names_j3);
}

TEST(Mutation, RejectsMalformedText) {
    for (const char* s : {"J3", "X1+=p1", "J3+=", "J3+=q", "J3+=0", "+=p1"})
        EXPECT_THROW(Mutation::parse(s), std::invalid_argument) << s;
}
