#pragma once

#include <stdexcept>

namespace betheperm {

// Malformed input text.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally wrong input (non-square, ragged rows, length mismatch).
struct shape_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Value outside the operation's domain (negative weight, bad config).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem size beyond an operation's guard (e.g. exact permanents).
struct size_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Floating-point failure that must not be silently absorbed.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace betheperm
