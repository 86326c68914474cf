#pragma once

#include <stdexcept>
#include <string>

namespace optdisc {

struct OutOfDomain : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct NotMonotone : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidLeafFamily : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OverlapError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptySet : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DifferentTrees : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BoundExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidApprox : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExhaustiveTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a derived structural property fails; the current branch is
// inconsistent and gets rejected.
struct StructureViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a CSP solution fails to map back to a separation. Indicates an
// implementation defect, never a property of the input.
struct CompletenessViolation : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace optdisc
