#include <gtest/gtest.h>

#include "ncg/groupoid.hpp"

using namespace ncg;

TEST(Groupoid, MobiusFixedPointsSolveTheEquation) {
    ConformalMap g = ConformalMap::mobius(cplx(2, 1), 1, cplx(0.5, 0), 3);
    auto fp = fixed_points(g, Region::full());
    ASSERT_EQ(fp.size(), 2u);
    for (cplx z : fp) EXPECT_LT(std::abs(g.eval(z) - z), 1e-12);
}

TEST(Groupoid, PolynomialFixedPointsSolveTheEquation) {
    ConformalMap g = ConformalMap::poly({0.1, 0.3, 0, 1});
    auto fp = fixed_points(g, Region::full());
    ASSERT_EQ(fp.size(), 3u);
    for (cplx z : fp) EXPECT_LT(std::abs(g.eval(z) - z), 1e-10);
    auto inside = fixed_points(g, Region::disk(0, 0.5));
    for (cplx z : inside) EXPECT_LT(std::abs(z), 0.5);
}

TEST(Groupoid, OrderIsValuationOfDisplacement) {
    EXPECT_EQ(automorphism_order(ConformalMap::affine(2, 0), 0).order, 1);
    EXPECT_EQ(automorphism_order(ConformalMap::poly({0, 1, 1}), 0).order, 2);
    EXPECT_EQ(automorphism_order(ConformalMap::poly({0, 1, 0, 1, 0.3}), 0).order, 3);
    EXPECT_EQ(automorphism_order(ConformalMap::mobius(1, 0, 0.05, 1), 0).order, 2);
    EXPECT_EQ(automorphism_order(ConformalMap::identity(), 0).order, ORDER_INFINITY);
}

TEST(Groupoid, HJetOfDilation) {
    // (z - 0)/(2z - z) = 1 for order one
    Automorphism a = automorphism_order(ConformalMap::affine(3, 0), 0);
    EXPECT_LT(std::abs(a.h_jet[0] - 0.5), 1e-15);
    // z^2/(z + z^2 - z) = 1
    Automorphism b = automorphism_order(ConformalMap::poly({0, 1, 1}), 0);
    EXPECT_LT(std::abs(b.h_jet[0] - 1.0), 1e-14);
    EXPECT_LT(std::abs(b.h_jet[1]), 1e-14);
}

TEST(Groupoid, LabelProductIsComposition) {
    GroupAction G = GroupAction::mobius({"a", "b"}, {ConformalMap::affine(2, 1), ConformalMap::mobius(1, 0, 0.3, 1)});
    int a = G.generator("a"), b = G.generator("b");
    int ab = G.mul(a, b);
    for (cplx z : {cplx(0.1, 0.2), cplx(-0.4, 0.3)})
        EXPECT_LT(std::abs(G.map(ab).eval(z) - G.map(a).eval(G.map(b).eval(z))), 1e-13);
    EXPECT_EQ(G.mul(a, G.inv(a)), G.unit());
    EXPECT_EQ(G.parse_label("a*b"), ab);
    EXPECT_EQ(G.parse_label(G.name(ab)), ab);
    EXPECT_EQ(G.parse_label("a^2"), G.mul(a, a));
    EXPECT_THROW(G.parse_label("c"), std::exception);
}

TEST(Groupoid, MatrixGroupInternsEqualElements) {
    // rotation by a quarter turn has order four
    GroupAction G = GroupAction::mobius({"r"}, {ConformalMap::affine(cplx(0, 1), 0)});
    int r = G.generator(0);
    int r4 = G.mul(G.mul(r, r), G.mul(r, r));
    EXPECT_TRUE(G.is_identity_germ(r4));
    EXPECT_FALSE(G.is_identity_germ(G.mul(r, r)));
}

TEST(Groupoid, CyclicGroupWraps) {
    GroupAction G = GroupAction::cyclic(2, "s", ConformalMap::affine(-1, 0));
    int s = G.generator(0);
    EXPECT_EQ(G.mul(s, s), G.unit());
    EXPECT_EQ(G.inv(s), s);
}

TEST(Groupoid, EnumerationSeparatesIdentityGerms) {
    GroupAction G = GroupAction::mobius({"a"}, {ConformalMap::affine(2, 0)});
    int a = G.generator(0);
    AutomorphismSet S = enumerate_automorphisms(G, {G.unit(), a}, Region::full());
    ASSERT_EQ(S.finite.size(), 1u);
    EXPECT_EQ(S.finite[0].label, a);
    EXPECT_LT(std::abs(S.finite[0].z0), 1e-14);
    ASSERT_EQ(S.infinite.size(), 1u);
    EXPECT_EQ(S.infinite[0], G.unit());
}

TEST(Groupoid, ConjugationMovesFixedPoints) {
    GroupAction G = GroupAction::mobius({"a"}, {ConformalMap::affine(2, 0)});
    ConformalMap h = ConformalMap::affine(1, cplx(0.5, 0.5));
    GroupAction H = G.conjugated(h);
    auto fp = fixed_points(H.map(H.generator(0)), Region::full());
    ASSERT_EQ(fp.size(), 1u);
    EXPECT_LT(std::abs(fp[0] - cplx(0.5, 0.5)), 1e-14);
}

TEST(Groupoid, InverseMap) {
    ConformalMap g = ConformalMap::mobius(2, 1, 1, 1);
    auto gi = g.inverse();
    ASSERT_TRUE(gi.has_value());
    cplx z(0.3, 0.2);
    EXPECT_LT(std::abs(gi->eval(g.eval(z)) - z), 1e-14);
}
