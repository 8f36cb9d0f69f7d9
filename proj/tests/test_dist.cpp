#include <gtest/gtest.h>

#include "ncg/dist.hpp"

using namespace ncg;

namespace {

const QuadratureSpec Q{1e-7, 14, 1};

// -(1/pi) PV int phi/(z - z0)^2, polar coordinates with phi(z0) subtracted
cplx second_order_oracle(const Field& phi, cplx z0, double R) {
    const int NT = 96, NR = 400;
    cplx p0 = eval(phi, z0), s = 0;
    double hr = R / NR;
    // midpoint in r, trapezoid in theta (periodic)
    for (int i = 0; i < NR; ++i) {
        double r = (i + 0.5) * hr;
        cplx ang = 0;
        for (int k = 0; k < NT; ++k) {
            double th = 2 * M_PI * k / NT;
            cplx e = std::polar(1.0, th);
            ang += (eval(phi, z0 + r * e) - p0) * std::conj(e * e);
        }
        s += ang * (2 * M_PI / NT) / r * hr;
    }
    return -s / M_PI;
}

}  // namespace

TEST(Dolbeault, CutoffReproducesValue) {
    Field phi = Field::bump(cplx(0.2, 0.1), 0.3, 0.8);
    DolbeaultCheck c = check_dolbeault(cplx(0.25, 0.05), phi, Q);
    EXPECT_LT(std::abs(c.lhs - 1.0), 1e-5);
}

TEST(Dolbeault, PointOutsideSupportGivesZero) {
    Field phi = Field::bump(0, 0.3, 0.8);
    EXPECT_LT(std::abs(check_dolbeault(cplx(2, 0), phi, Q).lhs), 1e-6);
}

TEST(Dolbeault, VanishingValueGivesZero) {
    cplx z0(0.1, 0.1);
    Field phi = Field::bump(0, 0.3, 0.8) * (Field::z() - Field(z0));
    EXPECT_LT(std::abs(check_dolbeault(z0, phi, Q).lhs), 1e-5);
}

TEST(Dolbeault, DefectShrinksWithTolerance) {
    Field phi = Field::bump(cplx(0.1, 0), 0.2, 0.9) * (Field(1.0) + Field::zbar() * Field::z());
    double prev = 1;
    for (double tol : {1e-4, 1e-5, 1e-6}) {
        double d = check_dolbeault(cplx(0.3, 0), phi, {tol, 14, 1}).defect;
        EXPECT_LT(d, 10 * tol);
        EXPECT_LE(d, prev * 1.5);
        prev = d;
    }
}

TEST(Kernel, FirstOrderVanishesOnRadialFunction) {
    cplx z0(0.3, -0.2);
    KernelResult k = pair_kernel({1, z0}, Field::bump(z0, 0.3, 0.7), Q);
    EXPECT_LT(std::abs(k.value), 1e-6);
}

TEST(Kernel, SecondOrderMatchesPrincipalValue) {
    cplx z0(0.1, 0.05);
    Field phi = Field::bump(0, 0.3, 0.8) * (Field(1.0) + Field::z() * Field::z() + Field(cplx(0, 2)) * Field::zbar().pow(2));
    cplx v = pair_kernel({2, z0}, phi, Q).value;
    cplx ref = second_order_oracle(phi, z0, 1.0);
    EXPECT_LT(std::abs(v - ref), 1e-4) << v << " " << ref;
}

TEST(Kernel, LinearInTestFunction) {
    Field a = Field::bump(0, 0.3, 0.8) * Field::z(), b = Field::bump(cplx(0.2, 0), 0.2, 0.6) * Field::zbar();
    cplx s(0.7, -1.3);
    for (int n : {1, 2, 3}) {
        cplx l = pair_kernel({n, 0}, a + Field(s) * b, Q).value;
        cplx r = pair_kernel({n, 0}, a, Q).value + s * pair_kernel({n, 0}, b, Q).value;
        EXPECT_LT(std::abs(l - r), 1e-10 * (1 + std::abs(l)));
    }
}

TEST(Kernel, DeltaShiftAddsValueAtBasePoint) {
    Field phi = Field::bump(0, 0.3, 0.8) * (Field(2.0) + Field::z());
    cplx c(0.4, 0.9), z0(0.1, 0);
    cplx d = pair_kernel({2, z0, c}, phi, Q).value - pair_kernel({2, z0}, phi, Q).value;
    EXPECT_LT(std::abs(d - c * eval(phi, z0)), 1e-12);
}

TEST(Covariance, OrderOneAnyMap) {
    Field phi = Field::bump(cplx(0.05, 0), 0.2, 0.5) * (Field(1.0) + Field::zbar());
    EXPECT_LT(check_covariance(1, ConformalMap::mobius(1, 0.1, 0.5, 1), 0, phi, Q).defect, 1e-6);
}

TEST(Covariance, OrderTwoDilation) {
    Field phi = Field::bump(0, 0.3, 0.8) * (Field(1.0) + Field::z() + Field::zbar() * Field::zbar());
    EXPECT_LT(check_covariance(2, ConformalMap::affine(2, 0), 0, phi, Q).defect, 1e-5);
}

TEST(Covariance, OrderThreeMobius) {
    Field phi = Field::bump(cplx(0.05, 0), 0.2, 0.5) * (Field(1.0) + Field(cplx(0.5, 0.2)) * Field::z());
    EXPECT_LT(check_covariance(3, ConformalMap::mobius(1, 0, 1, 1), 0, phi, Q).defect, 1e-4);
}

TEST(Covariance, PoleOnSupportIsRejected) {
    Field phi = Field::bump(0, 0.3, 0.8);
    EXPECT_THROW(check_covariance(2, ConformalMap::mobius(1, 0, 2, 1), 0, phi, Q), domain_error);
}
