#pragma once

#include <stdexcept>
#include <string>

namespace ncg {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};
struct pole_error : domain_error {
    using domain_error::domain_error;
};
struct valuation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct tolerance_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct consistency_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// thrown by fixed_points when the map is the identity near the region
struct identity_germ_signal : std::runtime_error {
    identity_germ_signal() : std::runtime_error("identity germ") {}
};

}  // namespace ncg
