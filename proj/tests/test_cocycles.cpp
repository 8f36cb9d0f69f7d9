#include <gtest/gtest.h>

#include "ncg/verify.hpp"

using namespace ncg;

namespace {

// -coefficient of (z - z0)^(n-1) in a(z) z^n/(g(z) - z) for a polynomial map fixing 0, by series division
cplx series_oracle(const std::vector<cplx>& g, const std::vector<cplx>& a, int n) {
    std::vector<cplx> den(12, 0);  // (g(z) - z)/z^n
    for (size_t k = 0; k < g.size(); ++k) {
        cplx c = g[k] - (k == 1 ? 1.0 : 0.0);
        if ((int)k >= n && k - n < den.size()) den[k - n] += c;
    }
    std::vector<cplx> h(n, 0);
    for (int k = 0; k < n; ++k) {
        cplx s = k == 0 ? 1.0 : 0.0;
        for (int j = 1; j <= k; ++j) s -= den[j] * h[k - j];
        h[k] = s / den[0];
    }
    cplx r = 0;
    for (int j = 0; j < n; ++j)
        if (n - 1 - j < (int)a.size()) r += h[j] * a[n - 1 - j];
    return -r;
}

Element single(const Field& f, int label) { return Element::generator(FMat::scalar(1, f), label); }

}  // namespace

TEST(Trace, DilationGivesLefschetzNumber) {
    for (cplx lam : {cplx(2, 0), cplx(0, 1), cplx(0.5, 0.5)}) {
        GroupAction G = GroupAction::mobius({"g"}, {ConformalMap::affine(lam, 0)});
        Field f = Field::bump(0, 0.5, 1) * (Field(cplx(1, 2)) + Field::z() + Field::zbar());
        cplx v = phi_value(single(f, G.generator(0)), G).value;
        EXPECT_LT(std::abs(v - cplx(1, 2) / (1.0 - lam)), 1e-12) << lam;
    }
}

TEST(Trace, DilationWithUnitCoefficient) {
    GroupAction G = GroupAction::mobius({"g"}, {ConformalMap::affine(2, 0)});
    cplx v = phi_value(single(Field::bump(0, 0.5, 1), G.generator(0)), G).value;
    EXPECT_LT(std::abs(v + 1.0), 1e-14);
}

TEST(Trace, OrderTwoClosedForm) {
    std::vector<cplx> g{0, 1, 1}, gd{0, 1, 2, 0, 0, 0};
    GroupAction G = GroupAction::free({"g"}, {ConformalMap::poly(g).with_domain(Region::disk(0, 0.5))});
    std::vector<cplx> a{cplx(0.3, 1), cplx(-2, 0.5), cplx(1, 1)};
    Field f = Field::bump(0, 0.1, 0.2) * (Field(a[0]) + Field(a[1]) * Field::z() + Field(a[2]) * Field::z().pow(2));
    cplx v = phi_value(single(f, G.generator(0)), G).value;
    EXPECT_LT(std::abs(v - closed_form_order2(gd, a[0], a[1])), 1e-12);
    EXPECT_LT(std::abs(v - series_oracle(g, a, 2)), 1e-12);
}

TEST(Trace, OrderThreeClosedForm) {
    double eps = 0.3;
    std::vector<cplx> g{0, 1, 0, 1, eps}, gd{0, 1, 0, 6, 24 * eps, 0};
    GroupAction G = GroupAction::free({"g"}, {ConformalMap::poly(g).with_domain(Region::disk(0, 0.5))});
    std::vector<cplx> a{cplx(0.3, 1), cplx(-2, 0.5), cplx(1, 1)};
    Field f = Field::bump(0, 0.1, 0.2) * (Field(a[0]) + Field(a[1]) * Field::z() + Field(a[2]) * Field::z().pow(2));
    cplx v = phi_value(single(f, G.generator(0)), G).value;
    EXPECT_LT(std::abs(v - closed_form_order3(gd, a[0], a[1], 2.0 * a[2])), 1e-12);
    EXPECT_LT(std::abs(v - series_oracle(g, a, 3)), 1e-12);
}

TEST(Trace, OrderFourAgainstSeriesDivision) {
    std::vector<cplx> g{0, 1, 0, 0, 1, 0.2};
    GroupAction G = GroupAction::free({"g"}, {ConformalMap::poly(g).with_domain(Region::disk(0, 0.5))});
    std::vector<cplx> a{cplx(0.3, 1), cplx(-2, 0.5), cplx(1, 1), cplx(0.5, -0.5)};
    Field p;
    for (int k = 0; k < 4; ++k) p += Field(a[k]) * Field::z().pow(k);
    cplx v = phi_value(single(Field::bump(0, 0.1, 0.2) * p, G.generator(0)), G).value;
    EXPECT_LT(std::abs(v - series_oracle(g, a, 4)), 1e-12);
}

TEST(Trace, IgnoresAntiholomorphicPart) {
    GroupAction G = GroupAction::mobius({"g"}, {ConformalMap::affine(2, 0)});
    Field f = Field::bump(0, 0.5, 1) * (Field(1.0) + Field::zbar() * Field(5.0));
    EXPECT_LT(std::abs(phi_value(single(f, G.generator(0)), G).value + 1.0), 1e-14);
}

TEST(Trace, FixedPointOutsideSupportContributesNothing) {
    GroupAction G = GroupAction::mobius({"g"}, {ConformalMap::affine(2, 0)});
    Field f = Field::bump(cplx(3, 0), 0.5, 1);
    EXPECT_EQ(phi_value(single(f, G.generator(0)), G).value, cplx{});
}

TEST(Trace, TransitionZoneAtFixedPointIsRejected) {
    GroupAction G = GroupAction::mobius({"g"}, {ConformalMap::affine(2, 0)});
    Field f = Field::bump(cplx(0.7, 0), 0.5, 1);
    EXPECT_THROW(phi_value(single(f, G.generator(0)), G), precondition_error);
}

TEST(Trace, IsATraceOnSampledPairs) {
    VerifyOptions o;
    o.seed = 3;
    CheckResult r = check_trace_property(o, 10);
    EXPECT_TRUE(r.pass) << r.value << " " << r.detail;
}

TEST(Trace, CoordinateInvarianceOnSampledMaps) {
    VerifyOptions o;
    o.seed = 4;
    CheckResult r = check_coordinate_invariance(o, 5);
    EXPECT_TRUE(r.pass) << r.value << " " << r.detail;
}

TEST(Trace, PaddingLeavesContributionsUnchanged) {
    VerifyOptions o;
    CheckResult r = check_padding(o, 3);
    EXPECT_TRUE(r.pass) << r.value << " " << r.detail;
}

TEST(Integrals, RadialCutoffAgainstOneDimensionalQuadrature) {
    double rp = 0.5, rs = 1.5;
    QuadratureSpec q{1e-10, 14, 1};
    QuadResult I = integrate_field(Field::bump(cplx(0.2, -0.1), rp, rs), q);
    // 2 pi int chi(r) r dr by composite Simpson
    auto f = [](double x) { return x > 0 ? std::exp(-1 / x) : 0.0; };
    auto chi = [&](double r) {
        if (r <= rp) return 1.0;
        if (r >= rs) return 0.0;
        double t = (r - rp) / (rs - rp);
        return f(1 - t) / (f(1 - t) + f(t));
    };
    int N = 20000;
    double h = rs / N, s = 0;
    for (int i = 0; i <= N; ++i) {
        double w = (i == 0 || i == N) ? 1 : (i % 2 ? 4 : 2);
        s += w * chi(i * h) * i * h;
    }
    s *= h / 3 * 2 * M_PI;
    EXPECT_LT(std::abs(I.value - s), 1e-9);
    EXPECT_TRUE(I.converged);
}

TEST(Integrals, TopFormConvention) {
    QuadratureSpec q{1e-10, 14, 1};
    Field f = Field::bump(0, 0.5, 1);
    EXPECT_LT(std::abs(integrate_top(f, q).value - cplx(0, -2) * integrate_field(f, q).value), 1e-15);
}

TEST(Cocycles, ToddDualPathAndCyclicity) {
    Rng rng(21);
    GroupAction G = cocycle_group();
    CocycleContext C(G, {1e-6, 12, 1});
    Element a0 = random_cocycle_element(rng, G), a1 = random_cocycle_element(rng, G), a2 = random_cocycle_element(rng, G);
    ToddValue t = todd(a0, a1, a2, C);
    EXPECT_LT(t.defect, 2e-6);
    ToddValue r = todd(a2, a0, a1, C);
    EXPECT_LT(std::abs(t.value.value - r.value.value), 4e-6);
    EXPECT_LT(std::abs(t.fundamental.value - r.fundamental.value), 4e-6);
}

TEST(Cocycles, HochschildBoundaryOfFundamentalClassVanishes) {
    Rng rng(22);
    GroupAction G = cocycle_group();
    CocycleContext C(G, {1e-6, 12, 1});
    std::vector<Element> a;
    for (int k = 0; k < 4; ++k) a.push_back(random_cocycle_element(rng, G));
    Cochain phi = [&](const std::vector<Element>& x) { return fundamental_class(x[0], x[1], x[2], C).value; };
    EXPECT_LT(std::abs(hochschild_b(phi, a, C)), 4e-6);
}

TEST(Cocycles, ChernClassVanishesForAffineAction) {
    // delta is zero on affine labels
    GroupAction G = GroupAction::mobius({"t"}, {ConformalMap::affine(1, 0.3)});
    CocycleContext C(G, {1e-6, 12, 1});
    Element a = Element::generator(FMat::scalar(1, Field::bump(0, 0.3, 0.8) * Field::z()), G.generator(0));
    Element b = Element::generator(FMat::scalar(1, Field::bump(0, 0.3, 0.8) * Field::zbar()), G.inv(G.generator(0)));
    EXPECT_EQ(chern1(a, b, a, C).value, cplx{});
}

TEST(Cocycles, TransportRejectsPoleOnSupport) {
    GroupAction G = trace_group();
    Element a = Element::generator(FMat::scalar(1, Field::bump(0, 0.5, 1)), G.generator(0));
    EXPECT_THROW(transport_coordinates(a, G, ConformalMap::mobius(1, 0, 2, 1)), domain_error);
}
