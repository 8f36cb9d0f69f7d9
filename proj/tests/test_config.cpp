#include <gtest/gtest.h>

#include "ncg/config.hpp"

using namespace ncg;

#ifndef FIXTURE_DIR
#define FIXTURE_DIR "fixtures"
#endif

TEST(Config, DilationFixtureTracesToMinusOne) {
    Scenario s = load_scenario(std::string(FIXTURE_DIR) + "/dilation.json");
    cplx v = phi_value(s.elements.at("a"), s.act).value;
    EXPECT_LT(std::abs(v + 1.0), 1e-9);
    EXPECT_EQ(s.expect.at("trace").at("a"), cplx(-1, 0));
}

TEST(Config, AllFixturesParse) {
    for (const char* f : {"dilation", "trace_mobius", "z2", "bott", "dist"})
        EXPECT_NO_THROW(load_scenario(std::string(FIXTURE_DIR) + "/" + f + ".json")) << f;
}

TEST(Config, UnknownLabelIsReportedWithLocation) {
    try {
        load_scenario(std::string(FIXTURE_DIR) + "/invalid.json");
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find("/elements/a/terms/0/label"), std::string::npos) << e.what();
    }
}

TEST(Config, SyntaxErrorIsParseError) { EXPECT_THROW(parse_scenario("{ \"group\": "), parse_error); }

TEST(Config, ComplexAndFormEntries) {
    Scenario s = parse_scenario(R"J({
      "group": {"kind": "free", "generators": [{"name": "g", "map": {"type": "poly", "coeffs": [0, 1, 1]},
                                                "domain": {"disk": {"center": [0, 0], "radius": 0.5}}}]},
      "elements": {"A": {"terms": [{"label": "g^-1", "field": {"expr": "(c 1 2)", "form": "dzb"}}]}}
    })J");
    const Element& A = s.elements.at("A");
    ASSERT_EQ(A.terms.size(), 1u);
    const Form& f = A.terms.begin()->second(0, 0);
    EXPECT_TRUE(f.at(0, 0).is_zero());
    EXPECT_EQ(f.at(0, 1).const_value(), cplx(1, 2));
    EXPECT_FALSE(s.act.map(s.act.generator(0)).in_domain(cplx(0.8, 0)));
}

TEST(Config, MissingKeysAreReported) {
    EXPECT_THROW(parse_scenario(R"J({"group": {"kind": "mobius", "generators": [{"name": "g"}]}})J"), parse_error);
    EXPECT_THROW(parse_scenario(R"J({"ktheory": {"p": {"type": "idempotent", "element": "x"}}})J"), parse_error);
    EXPECT_THROW(parse_scenario(R"J({"elements": {"a": {"terms": [{"field": "(+ z"}]}}})J"), parse_error);
}

TEST(Config, DigestIsStable) {
    EXPECT_EQ(parse_scenario("{}").digest, parse_scenario("{}").digest);
    EXPECT_NE(parse_scenario("{}").digest, parse_scenario("{ }").digest);
}
