#include <gtest/gtest.h>

#include "ncg/scenarios.hpp"

using namespace ncg;

namespace {

struct Z2 {
    GroupAction G = GroupAction::cyclic(2, "s", ConformalMap::affine(-1, 0));
    int s = G.generator(0), e = G.unit();
    Element U(int label, cplx c, int n = 1, int i = 0, int j = 0) const {
        FMat m(n);
        m(i, j) = Form::zero_form(Field(c));
        return Element::generator(m, label);
    }
};

}  // namespace

TEST(Lifting, IdempotentLiftIsExactModuloTruncation) {
    Z2 z;
    Element p = z.U(z.e, 0.5) + z.U(z.s, 0.5);
    for (int L : {1, 2, 3}) {
        WordAlgebra W(z.G, L);
        LiftReport rep;
        Element et = lift_idempotent(p, W, &rep);
        EXPECT_TRUE((cp_mul(et, et, W) - et).is_zero()) << L;
    }
}

TEST(Lifting, IdempotentLiftKeepsOrderZeroPart) {
    Z2 z;
    Element p = z.U(z.e, 0.5) + z.U(z.s, 0.5);
    WordAlgebra W(z.G, 2);
    Element et = lift_idempotent(p, W);
    EXPECT_TRUE((order_zero_part(et) - linear_lift(p)).is_zero());
}

TEST(Lifting, InvertibleLiftIsExactModuloTruncation) {
    Z2 z;
    Element a = z.U(z.s, 1) - z.U(z.e, 1);
    for (int L : {1, 2, 3}) {
        WordAlgebra W(z.G, L);
        InvertibleLift l = lift_invertible({a, a}, W);
        Element one = tensor_unit(1, z.e);
        EXPECT_TRUE((cp_mul(l.u, l.uinv, W) - one).is_zero()) << L;
        EXPECT_TRUE((cp_mul(l.uinv, l.u, W) - one).is_zero()) << L;
    }
}

TEST(Lifting, RejectsNonIdempotent) {
    Z2 z;
    WordAlgebra W(z.G, 1);
    EXPECT_THROW(lift_idempotent(z.U(z.e, 0.7), W), precondition_error);
}

TEST(Lifting, RejectsWrongCertificate) {
    Z2 z;
    WordAlgebra W(z.G, 1);
    Element a = z.U(z.s, 1) - z.U(z.e, 1);
    EXPECT_THROW(lift_invertible({a, z.U(z.e, 0.0) + z.U(z.s, 0.5)}, W), precondition_error);
}

TEST(Lifting, SquareZeroPerturbationHasInverseCertificate) {
    Rng rng(3);
    GroupAction G = trace_group();
    auto labels = trace_labels(G);
    RelInvertible u = nilpotent_invertible(random_trace_element(rng, G, labels), 0.5);
    WordAlgebra W(G, 2);
    InvertibleLift l = lift_invertible(u, W);
    Element one = tensor_unit(2, G.unit());
    EXPECT_LT(sampled_max(cp_mul(l.u, l.uinv, W) - one), 1e-12);
}

TEST(TensorWords, LinearLiftAndMultiplicationMap) {
    Z2 z;
    Element x = z.U(z.s, cplx(2, 1)) + z.U(z.e, 3);
    WordAlgebra W(z.G, 2);
    EXPECT_TRUE((mu(linear_lift(x), W) - x).is_zero());
    Element r = rho_star({x}, W);
    EXPECT_TRUE((r - linear_lift(x)).is_zero());
    Element r2 = rho_star({x, x}, W);
    EXPECT_TRUE((r2 - cp_mul(linear_lift(x), linear_lift(x), W)).is_zero());
}

TEST(Collapse, UnitTraceSelectsUnitLabelWords) {
    Z2 z;
    WordAlgebra W(z.G, 1);
    SeriesCoeffs s{{unit_word(), 2.0}, {Word{z.s}, 5.0}, {Word{z.e}, 1.0}, {Word{UNIT_LETTER, z.s, z.s}, 7.0}};
    EXPECT_EQ(collapse(s, Tau0{}, W), cplx(3.0));
}

TEST(Collapse, GroupCocycleIsAdditive) {
    GroupAction G = GroupAction::mobius({"a", "b"}, {ConformalMap::affine(2, 0), ConformalMap::affine(3, 0)});
    int a = G.generator(0), b = G.generator(1);
    std::set<int> ls{G.unit(), a, b, G.mul(a, b), G.inv(a)};
    GroupCocycle1 c = GroupCocycle1::from_generators(G, {1.0, 10.0}, ls);
    EXPECT_EQ(c.at(G.mul(a, b)), cplx(11.0));
    EXPECT_EQ(c.at(G.inv(a)), cplx(-1.0));
    EXPECT_EQ(c.at(G.unit()), cplx(0.0));
}

TEST(Collapse, WrongFunctionalKindIsRejected) {
    Z2 z;
    WordAlgebra W(z.G, 1);
    EXPECT_THROW(collapse(SeriesCoeffs{}, CollapseFunctional{GroupCocycle1{}}, W), usage_error);
    EXPECT_THROW(collapse(OneFormCoeffs{}, CollapseFunctional{Tau0{}}, W), usage_error);
}

TEST(Collapse, ConstantTrace) {
    Z2 z;
    Element x = z.U(z.s, 2, 2, 0, 0) + z.U(z.s, 3, 2, 1, 1) + z.U(z.s, 9, 2, 0, 1);
    SeriesCoeffs t = constant_trace(x);
    EXPECT_EQ(t.at(unit_word()), cplx(5.0));
}
