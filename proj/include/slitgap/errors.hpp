#pragma once

#include <stdexcept>
#include <string>

namespace slitgap {

// One class per failure family so the CLI can map them to exit codes.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct DegenerateInput : std::domain_error {
    using std::domain_error::domain_error;
};
struct NotOnTransversal : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct QuadratureError : std::runtime_error {
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_tolerance(achieved) {}
    double achieved_tolerance;
};
struct AmbiguityError : std::domain_error {
    using std::domain_error::domain_error;
};
struct OutOfRegime : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace slitgap
