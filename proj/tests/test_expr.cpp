#include <gtest/gtest.h>

#include <random>

#include "ncg/expr.hpp"

using namespace ncg;

namespace {

// Wirtinger derivatives by central differences
cplx fd_dz(const Field& f, cplx z, double h = 1e-5) {
    cplx fx = (eval(f, z + h) - eval(f, z - h)) / (2 * h);
    cplx fy = (eval(f, z + cplx(0, h)) - eval(f, z - cplx(0, h))) / (2 * h);
    return 0.5 * (fx - cplx(0, 1) * fy);
}
cplx fd_dzb(const Field& f, cplx z, double h = 1e-5) {
    cplx fx = (eval(f, z + h) - eval(f, z - h)) / (2 * h);
    cplx fy = (eval(f, z + cplx(0, h)) - eval(f, z - cplx(0, h))) / (2 * h);
    return 0.5 * (fx + cplx(0, 1) * fy);
}

Field sample_field() {
    Field z = Field::z(), zb = Field::zbar();
    return Field::bump(cplx(0.1, 0), 0.4, 1.2) * (z * z + Field(3.0) * zb) * Field::recip_affine(2, 5);
}

cplx sample_direct(cplx z) {
    double r = std::abs(z - 0.1);
    auto f = [](double x) { return x > 0 ? std::exp(-1 / x) : 0.0; };
    double c = r <= 0.4 ? 1 : r >= 1.2 ? 0 : f(1.2 - r) / (f(1.2 - r) + f(r - 0.4));
    return c * (z * z + 3.0 * std::conj(z)) / (2.0 * z + 5.0);
}

}  // namespace

TEST(Expr, EvaluationMatchesDirectFormula) {
    Field f = sample_field();
    for (cplx z : {cplx(0, 0), cplx(0.5, 0.3), cplx(-0.7, 0.2), cplx(1.0, 0.5), cplx(2, 2)})
        EXPECT_LT(std::abs(eval(f, z) - sample_direct(z)), 1e-14) << z;
}

TEST(Expr, BumpPlateauAndSupport) {
    Field b = Field::bump(cplx(1, 1), 0.5, 1.0);
    EXPECT_EQ(eval(b, cplx(1.2, 1.1)), cplx(1.0));
    EXPECT_EQ(eval(b, cplx(2.5, 1.0)), cplx(0.0));
    double v = eval(b, cplx(1.75, 1)).real();
    EXPECT_GT(v, 0);
    EXPECT_LT(v, 1);
    Box s = support_box(b);
    EXPECT_NEAR(s.x0, 0, 1e-12);
    EXPECT_NEAR(s.x1, 2, 1e-12);
}

TEST(Expr, WirtingerDerivativesMatchFiniteDifferences) {
    Field f = sample_field();
    for (cplx z : {cplx(0.3, 0.2), cplx(-0.6, 0.4), cplx(0.9, -0.3)}) {
        EXPECT_LT(std::abs(eval(f.dz(), z) - fd_dz(f, z)), 1e-7) << z;
        EXPECT_LT(std::abs(eval(f.dzbar(), z) - fd_dzb(f, z)), 1e-7) << z;
    }
}

TEST(Expr, MixedDerivativeCommutes) {
    Field f = sample_field();
    cplx z(0.7, 0.2);
    EXPECT_LT(std::abs(eval(f.dz().dzbar(), z) - eval(f.dzbar().dz(), z)), 1e-12);
    EXPECT_LT(std::abs(eval(f.derivative(1, 1), z) - eval(f.dz().dzbar(), z)), 1e-12);
}

TEST(Expr, JetMatchesLocalTaylorExpansion) {
    Field f = sample_field();
    cplx z0(0.8, 0.1);  // inside the transition zone
    Jet2 J = jet2_at(f, z0, 8);
    cplx d(2e-3, -1e-3), v = 0;
    for (int p = 0; p <= 8; ++p)
        for (int q = 0; p + q <= 8; ++q) v += J.at(p, q) * std::pow(d, p) * std::pow(std::conj(d), q);
    EXPECT_LT(std::abs(v - sample_direct(z0 + d)), 1e-12);
}

TEST(Expr, StrictPlateauRefusesTransitionZone) {
    Field f = sample_field();
    EvalOptions o;
    o.strict_plateau = true;
    EXPECT_NO_THROW(jet2_at(f, 0.2, 4, o));
    EXPECT_THROW(jet2_at(f, 0.8, 4, o), precondition_error);
}

TEST(Expr, PullbackIsComposition) {
    Field f = sample_field();
    ConformalMap g = ConformalMap::mobius(1, 0.1, 0.2, 1);
    Field p = pullback(f, g);
    for (cplx z : {cplx(0.1, 0.1), cplx(-0.5, 0.3)}) EXPECT_LT(std::abs(eval(p, z) - eval(f, g.eval(z))), 1e-14);
    // chain rule for the pullback
    cplx z(0.3, -0.2);
    cplx ref = eval(f.dz(), g.eval(z)) * g.derivative(z, 1);
    EXPECT_LT(std::abs(eval(p.dz(), z) - ref), 1e-12);
}

TEST(Expr, MapDerivativeField) {
    ConformalMap g = ConformalMap::poly({0, 1, 0.5, 0.25});
    Field d1 = Field::map_derivative(g, 1), d2c = Field::map_derivative(g, 2, true);
    cplx z(0.3, 0.4);
    EXPECT_LT(std::abs(eval(d1, z) - (1.0 + z + 0.75 * z * z)), 1e-14);
    EXPECT_LT(std::abs(eval(d2c, z) - std::conj(1.0 + 1.5 * z)), 1e-14);
    EXPECT_TRUE(Field::map_derivative(ConformalMap::identity(), 2).is_zero());
}

TEST(Expr, LogMatchesStdLog) {
    Field l = Field::log(Field::z() * Field::zbar() + Field(1.0));
    cplx z(0.4, 0.7);
    EXPECT_LT(std::abs(eval(l, z) - std::log(std::norm(z) + 1.0)), 1e-15);
}

TEST(Expr, ConstantFoldingAndZeroShortCircuit) {
    Field z = Field::z();
    EXPECT_TRUE((z * Field(0.0)).is_zero());
    EXPECT_TRUE((Field(2.0) * Field(3.0)).is_const());
    EXPECT_EQ((Field(2.0) * Field(3.0)).const_value(), cplx(6.0));
    EXPECT_TRUE((z - z).is_zero() || eval(z - z, 0.3) == cplx{});
}

TEST(Expr, PrefixRoundTrip) {
    Field f = parse_prefix("(* (bump 0 0 1 2) (+ z (^ zb 2) (c 1 -2)) (recip 2 1 z))");
    Field g = parse_prefix(to_prefix(f));
    for (cplx z : {cplx(0.3, 0.1), cplx(1.5, -0.2)}) EXPECT_LT(std::abs(eval(f, z) - eval(g, z)), 1e-15);
    cplx z(0.3, 0.1);
    EXPECT_LT(std::abs(eval(f, z) - (z + std::conj(z) * std::conj(z) + cplx(1, -2)) / (2.0 * z + 1.0)), 1e-15);
}

TEST(Expr, PrefixParseErrorsCarryPosition) {
    EXPECT_THROW(parse_prefix("(+ z"), parse_error);
    EXPECT_THROW(parse_prefix("(foo z)"), parse_error);
    EXPECT_THROW(parse_prefix("z z"), parse_error);
    try {
        parse_prefix("(+ z q)");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find("token"), std::string::npos);
    }
}

TEST(Expr, SupportOfProductIsIntersection) {
    Field f = Field::bump(0, 0.5, 1) * Field::bump(cplx(1.5, 0), 0.5, 1);
    Box b = support_box(f);
    EXPECT_NEAR(b.x0, 0.5, 1e-12);
    EXPECT_NEAR(b.x1, 1.0, 1e-12);
}
