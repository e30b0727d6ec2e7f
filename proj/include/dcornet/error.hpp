#pragma once

#include <stdexcept>
#include <string>

namespace dcornet {

// Malformed files, inconsistent inputs, violated preconditions on user data.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degenerate numerical situations the caller cannot continue from
// (all-zero adjacency, estimator sign violations beyond tolerance).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dcornet
