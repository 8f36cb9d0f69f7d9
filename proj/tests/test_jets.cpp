#include <gtest/gtest.h>

#include <random>

#include "ncg/jets.hpp"

using namespace ncg;

namespace {

std::vector<cplx> random_coeffs(std::mt19937_64& r, int n) {
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<cplx> c(n);
    for (auto& x : c) x = {U(r), U(r)};
    return c;
}

// truncated product of coefficient lists
std::vector<cplx> conv(const std::vector<cplx>& a, const std::vector<cplx>& b, int K) {
    std::vector<cplx> r(K + 1);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            if ((int)(i + j) <= K) r[i + j] += a[i] * b[j];
    return r;
}

cplx horner(const std::vector<cplx>& c, cplx t) {
    cplx s = 0;
    for (int k = (int)c.size() - 1; k >= 0; --k) s = s * t + c[k];
    return s;
}

}  // namespace

TEST(Jets, ProductMatchesConvolution) {
    std::mt19937_64 r(1);
    for (int t = 0; t < 20; ++t) {
        auto a = random_coeffs(r, 7), b = random_coeffs(r, 7);
        Jet1 p = Jet1(0.3, a) * Jet1(0.3, b);
        auto ref = conv(a, b, 6);
        for (int k = 0; k <= 6; ++k) EXPECT_LT(std::abs(p[k] - ref[k]), 1e-14);
    }
}

TEST(Jets, ReciprocalInverts) {
    std::mt19937_64 r(2);
    auto a = random_coeffs(r, 9);
    a[0] += 2.0;
    Jet1 one = Jet1(0, a) * j_recip(Jet1(0, a));
    EXPECT_LT(std::abs(one[0] - 1.0), 1e-14);
    for (int k = 1; k <= 8; ++k) EXPECT_LT(std::abs(one[k]), 1e-13);
}

TEST(Jets, ReciprocalOfZeroValueIsAPole) {
    EXPECT_THROW(j_recip(Jet1(0, std::vector<cplx>{0, 1, 2})), pole_error);
}

TEST(Jets, CompositionMatchesPolynomialExpansion) {
    std::mt19937_64 r(3);
    auto p = random_coeffs(r, 6), q = random_coeffs(r, 6);
    q[0] = 0.7;
    // p(w - 0.7) with w = q(t): expand sum p_k (q - q0)^k by repeated convolution
    std::vector<cplx> d = q;
    d[0] = 0;
    std::vector<cplx> ref(6), pw{1, 0, 0, 0, 0, 0};
    for (int k = 0; k < 6; ++k) {
        for (int i = 0; i < 6; ++i) ref[i] += p[k] * pw[i];
        pw = conv(pw, d, 5);
    }
    Jet1 c = j_compose(Jet1(0.7, p), Jet1(0, q));
    for (int k = 0; k < 6; ++k) EXPECT_LT(std::abs(c[k] - ref[k]), 1e-13);
}

TEST(Jets, CompositionRejectsBaseMismatch) {
    EXPECT_THROW(j_compose(Jet1(1.0, std::vector<cplx>{1, 1}), Jet1(0, std::vector<cplx>{0, 1})), usage_error);
}

TEST(Jets, ExpAndLogAreInverse) {
    std::mt19937_64 r(4);
    auto a = random_coeffs(r, 8);
    Jet1 back = j_log(j_exp(Jet1(0, a)));
    for (int k = 0; k < 8; ++k) EXPECT_LT(std::abs(back[k] - a[k]), 1e-12);
}

TEST(Jets, ExpMatchesFiniteSeries) {
    // exp(t) at 0
    Jet1 e = j_exp(Jet1::variable(0, 8));
    for (int k = 0; k <= 8; ++k) EXPECT_NEAR(e[k].real(), 1.0 / factorial(k), 1e-15);
}

TEST(Jets, SqrtSquares) {
    std::mt19937_64 r(5);
    auto a = random_coeffs(r, 8);
    a[0] = 2.0;
    Jet1 s = j_sqrt(Jet1(0, a));
    Jet1 sq = s * s;
    for (int k = 0; k < 8; ++k) EXPECT_LT(std::abs(sq[k] - a[k]), 1e-13);
}

TEST(Jets, Valuation) {
    EXPECT_EQ(valuation(Jet1(0, std::vector<cplx>{0, 0, 3, 1})), 2);
    EXPECT_EQ(valuation(Jet1(0, std::vector<cplx>{0, 0, 0})), -1);
    EXPECT_EQ(valuation(Jet1(0, std::vector<cplx>{1e-15, 0, 1})), 2);
}

TEST(Jets, DivisionWithValuationCancelsCommonFactor) {
    // (t^2 + t^3) / (2 t^2) = (1 + t)/2
    Jet1 q = j_div_valuation(Jet1(0, std::vector<cplx>{0, 0, 1, 1, 0}), Jet1(0, std::vector<cplx>{0, 0, 2, 0, 0}));
    EXPECT_EQ(q.order(), 2);
    EXPECT_LT(std::abs(q[0] - 0.5), 1e-15);
    EXPECT_LT(std::abs(q[1] - 0.5), 1e-15);
    EXPECT_LT(std::abs(q[2]), 1e-15);
    EXPECT_THROW(j_div_valuation(Jet1(0, std::vector<cplx>{0, 1, 0}), Jet1(0, std::vector<cplx>{0, 0, 1})), pole_error);
    EXPECT_THROW(j_div_valuation(Jet1(0, std::vector<cplx>{1, 0, 0}), Jet1(0, std::vector<cplx>{0, 0, 0})),
                 valuation_error);
}

TEST(Jets, PowerSeriesIsBinomialExpansion) {
    cplx x0(0.4, -0.2);
    Jet1 p = power_series(x0, 5, 7);
    for (double t : {0.01, -0.02}) EXPECT_LT(std::abs(horner(p.c, t) - std::pow(x0 + t, 5)), 1e-14);
}

TEST(Jets, BivariateDerivativeOfMonomial) {
    // z^2 zb at base b: derivative d_z d_zb = 2 z
    cplx b(0.3, 0.5);
    Jet2 z = Jet2::var_z(b, 4), zb = Jet2::var_zbar(b, 4);
    Jet2 f = z * z * zb;
    Jet2 d = f.derivative(1, 1);
    EXPECT_LT(std::abs(d.at(0, 0) - 2.0 * b), 1e-14);
    EXPECT_LT(std::abs(d.at(1, 0) - 2.0), 1e-14);
    EXPECT_LT(std::abs(d.at(0, 1)), 1e-14);
}

TEST(Jets, BivariateCompositionMatchesDirectEvaluation) {
    // exp(|z - b|^2 + z) sampled near the base
    cplx b(0.2, 0.1);
    int K = 8;
    Jet2 z = Jet2::var_z(b, K), zb = Jet2::var_zbar(b, K);
    Jet2 S = z * zb + z;
    cplx s0 = S.c[0];
    Jet1 E(s0, K);
    for (int k = 0; k <= K; ++k) E.c[k] = std::exp(s0) / factorial(k);
    Jet2 F = compose_univariate(E, S);
    cplx dz(1e-2, 5e-3), v = 0;
    for (int p = 0; p <= K; ++p)
        for (int q = 0; p + q <= K; ++q) v += F.at(p, q) * std::pow(dz, p) * std::pow(std::conj(dz), q);
    cplx zz = b + dz;
    EXPECT_LT(std::abs(v - std::exp(zz * std::conj(zz) + zz)), 1e-13);
}
