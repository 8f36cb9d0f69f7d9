#include <cstdio>
#include <functional>

#include "ncg/verify.hpp"

using namespace ncg;

int main() {
    VerifyOptions o;
    struct Item {
        double budget;  // seconds, 0 = none
        std::function<std::vector<CheckResult>()> run;
    };
    std::vector<Item> items{
        {1, [&] { return std::vector{check_lefschetz(o)}; }},
        {1, [&] { return std::vector{check_higher_order(o)}; }},
        {30, [&] { return std::vector{check_trace_property(o)}; }},
        {30, [&] { return std::vector{check_coordinate_invariance(o)}; }},
        {0, [&] { return std::vector{check_padding(o)}; }},
        {300, [&] {
             CocycleLawResults c = check_cocycle_laws(o);
             return std::vector{c.laws, c.todd};
         }},
        {120, [&] { return std::vector{check_bott(o)}; }},
        {0, [&] { return std::vector{check_odd_pairing(o)}; }},
        {0, [&] { return std::vector{check_anomaly(o)}; }},
        {0, [&] { return std::vector{check_distributions(o)}; }},
        {10, [&] { return std::vector{check_lifting(o)}; }},
        {0, [&] { return std::vector{check_differentials(o)}; }},
    };
    int idx = 0, failed = 0;
    for (auto& it : items) {
        std::vector<CheckResult> rs = it.run();
        for (size_t k = 0; k < rs.size(); ++k) {
            CheckResult& r = rs[k];
            bool in_time = it.budget == 0 || k > 0 || r.seconds < it.budget;
            bool ok = r.pass && in_time;
            failed += !ok;
            std::printf("%s %2d %-26s defect=%.3e threshold=%.1e time=%.2fs%s%s%s\n", ok ? "PASS" : "FAIL", ++idx,
                        r.name.c_str(), r.value, r.threshold, r.seconds, in_time ? "" : " (over budget)",
                        r.detail.empty() ? "" : " ", r.detail.c_str());
            std::fflush(stdout);
        }
    }
    std::printf("%d/%d criteria passed\n", idx - failed, idx);
    return failed ? 1 : 0;
}
