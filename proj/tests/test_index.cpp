#include <gtest/gtest.h>

#include "ncg/verify.hpp"

using namespace ncg;

TEST(EvenPairing, StereographicProjectorHasUnitDegree) {
    GroupAction G = GroupAction::trivial();
    PairingOptions po;
    po.truncation = 0;
    PairingResult r = pair_even(bott_projector(), G, po, CollapseFunctional{Tau0{}});
    double oracle = bott_degree_oracle();
    EXPECT_LT(std::abs(oracle - std::round(oracle)), 0.02);
    EXPECT_LT(std::abs(*r.collapsed - std::round(oracle)), 1e-4);
    EXPECT_EQ(std::abs(std::round(oracle)), 1.0);
}

TEST(EvenPairing, ConstantIdempotentPairsToZero) {
    GroupAction G = GroupAction::trivial();
    FMat c(2);
    c(1, 1) = Form::zero_form(1.0);
    for (int L : {0, 2}) {
        PairingOptions po;
        po.truncation = L;
        PairingResult r = pair_even(Element::generator(c, 0), G, po, CollapseFunctional{Tau0{}});
        EXPECT_EQ(*r.collapsed, cplx{});
    }
}

TEST(EvenPairing, RejectsNonIdempotent) {
    GroupAction G = GroupAction::trivial();
    PairingOptions po;
    EXPECT_THROW(pair_even(Element::generator(FMat::scalar(1, Field::bump(0, 0.5, 1)), 0), G, po), precondition_error);
}

TEST(OddPairing, UnitPairsToZeroExactly) {
    GroupAction G = trace_group();
    PairingOptions po;
    po.truncation = 2;
    GroupCocycle1 c = GroupCocycle1::from_generators(G, {1.0, 1.0}, {G.unit()});
    PairingResult r = pair_odd({Element(1), Element(1)}, G, po, CollapseFunctional{c});
    EXPECT_TRUE(r.one_form.empty());
    EXPECT_EQ(*r.collapsed, cplx{});
}

TEST(OddPairing, HomotopyAndBlockProperties) {
    VerifyOptions o;
    o.seed = 5;
    CheckResult r = check_odd_pairing(o);
    EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Anomaly, LocalizedPartAgreesBitwiseWithTrace) {
    Rng rng(8);
    GroupAction G = trace_group();
    auto labels = trace_labels(G);
    WordAlgebra W(G, 1);
    for (int i = 0; i < 3; ++i) {
        OneElement w = random_one_element(rng, G, W, [&](Rng& r) { return random_trace_element(r, G, labels, 2); });
        NaturalValues a = phi_natural(w, W), b = anomaly_delta0(w, W);
        EXPECT_EQ(a, b);
        EXPECT_FALSE(a.empty());
    }
}

TEST(Anomaly, ExplicitAndIntrinsicFormsAgree) {
    VerifyOptions o;
    o.seed = 9;
    CheckResult r = check_anomaly(o, 2);
    EXPECT_TRUE(r.pass) << r.detail;
}

TEST(Anomaly, RejectsNonGaugeField) {
    GroupAction G = trace_group();
    WordAlgebra W(G, 1);
    Element A = linear_lift(Element::generator(FMat::scalar(1, Field::bump(0, 0.5, 1)), G.generator(0)));
    EXPECT_THROW(anomaly_delta1(A, OneElement(1), W, {}), usage_error);
}
