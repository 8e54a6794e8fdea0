#include "tern/terncat.hpp"

#include <gtest/gtest.h>

using namespace tern;

namespace {

const ComplexRational I = ComplexRational::i();
RationalFn P(int j) { return RationalFn::p(j); }

}  // namespace

TEST(TernSpec, RoundTrip) {
    for (const char* text : {"u:m=0", "d:m=0", "u:m=2", "s:m=0:UU:+1", "s:m=0:AU:-1", "s:m=2:AA:-1", "s:m=3",
                             "u:m=2:pair", "u-doublet", "d-doublet", "s-quartet"}) {
        EXPECT_EQ(TernSpec::parse(text).to_string(), text);
    }
    EXPECT_EQ(TernSpec::parse("s:m=2:AA:\xE2\x88\x92" "1").variant, -1);
}

TEST(TernSpec, Rejects) {
    EXPECT_THROW(TernSpec::parse("x:m=0"), std::invalid_argument);
    EXPECT_THROW(TernSpec::parse("s:m=2:UU:+1"), std::invalid_argument);
    EXPECT_THROW(TernSpec::parse("s:m=0:XY:+1"), std::invalid_argument);
    EXPECT_THROW(TernSpec::parse("s:m=0:AA:2"), std::invalid_argument);
    EXPECT_THROW(TernSpec::parse("u:m=abc"), std::invalid_argument);
}

TEST(TernCat, IrreducibleU) {
    Tern t = build_irreducible(TernClass::u, 0);
    EXPECT_TRUE(t.complete());
    EXPECT_EQ(t.p0, OperatorExpr::multiply(1, RationalFn::p0()));
    EXPECT_EQ(t.j[0], orbital_j(1));
    EXPECT_EQ(t.k[1], orbital_k(2));
    EXPECT_EQ(*t.pi, OperatorExpr::parity(1));
    EXPECT_EQ(*t.tau, compose(OperatorExpr::conjugation(1), OperatorExpr::parity(1)));
}

TEST(TernCat, IrreducibleD) {
    Tern t = build_irreducible(TernClass::d, 0);
    EXPECT_EQ(t.p0, OperatorExpr::multiply(1, -RationalFn::p0()));
    EXPECT_EQ(t.k[0], -orbital_k(1));
    EXPECT_EQ(*t.pi, OperatorExpr::parity(1));
}

TEST(TernCat, GeneratorsOnlyWithHelicity) {
    Tern t = build_irreducible(TernClass::u, 2);
    EXPECT_FALSE(t.complete());
    EXPECT_EQ(t.spec.family, Family::generators_only);
    RationalFn j1 = P(1) * RationalFn::p0() / (P(1) * P(1) + P(2) * P(2));
    EXPECT_EQ(t.j[0], orbital_j(1) + OperatorExpr::multiply(1, j1));
}

TEST(TernCat, SZeroCombinations) {
    Tern uu = build_s_zero("UU", -1);
    FiberMatrix d = {{1, 0}, {0, -1}};
    EXPECT_EQ(*uu.pi, compose(OperatorExpr::parity(2), OperatorExpr::matrix(d)));
    EXPECT_EQ(*uu.tau, OperatorExpr::matrix({{0, 1}, {1, 0}}));

    Tern au = build_s_zero("AU", 1);
    EXPECT_TRUE(au.pi->antilinear());
    EXPECT_FALSE(au.tau->antilinear());
    EXPECT_EQ(scalar_square(*au.pi), ComplexRational(1));

    Tern aa = build_s_zero("AA", -1);
    EXPECT_EQ(scalar_square(*aa.pi), ComplexRational(-1));
    EXPECT_THROW(build_s_zero("XX", 1), std::invalid_argument);
}

TEST(TernCat, SWithHelicity) {
    Tern t = build_s_m(4, 1);
    RationalFn j1 = RationalFn(2) * P(1) * RationalFn::p0() / (P(1) * P(1) + P(2) * P(2));
    EXPECT_EQ(t.j[0].block(0, 1), orbital_j(1) + OperatorExpr::multiply(1, j1));
    EXPECT_EQ(t.j[0].block(1, 1), orbital_j(1) - OperatorExpr::multiply(1, j1));
    EXPECT_EQ(t.expected.blocks[0].m, 4);
    EXPECT_EQ(t.expected.blocks[1].m, -4);
    EXPECT_EQ(scalar_square(*build_s_m(2, -1).pi), ComplexRational(-1));
    EXPECT_THROW(build_s_m(0, 1), std::invalid_argument);
}

TEST(TernCat, Examples) {
    Tern e1 = build_example(Family::doublet_u);
    // oracle: (U K A)^2 = conj(A) A for real A commuting with U; A = [[0,1],[-1,0]] squares to -Id.
    EXPECT_EQ(scalar_square(*e1.tau), ComplexRational(-1));
    Tern e2 = build_example(Family::doublet_d);
    EXPECT_EQ(e2.p0, OperatorExpr::multiply(2, -RationalFn::p0()));
    Tern e3 = build_example(Family::quartet_s);
    EXPECT_EQ(e3.dim, 4);
    EXPECT_FALSE(e3.tau->antilinear());
    EXPECT_TRUE(e3.pi->antilinear());
}

TEST(TernCat, CatalogCount) {
    auto cat = catalog(2);
    EXPECT_EQ(cat.size(), 1u + 1u + 6u + 2u * 2u + 3u);
    for (const auto& t : cat) {
        EXPECT_TRUE(t.complete()) << t.spec.to_string();
        EXPECT_TRUE(t.expected.omega.has_value()) << t.spec.to_string();
        EXPECT_EQ(t.expected.omega->norm2(), 1) << t.spec.to_string();
    }
}
