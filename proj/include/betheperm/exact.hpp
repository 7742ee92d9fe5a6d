#pragma once

#include "betheperm/log_value.hpp"
#include "betheperm/matrix.hpp"

namespace betheperm {

// Direct sum over all n! permutations. Guarded at n <= 12 (size_error above).
LogValue brute_force_permanent(const SquareMatrix& m);

// Inclusion-exclusion over column subsets in Gray-code order, Theta(n * 2^n).
// Guarded at n <= 30. Rows are pre-scaled by their maximum entry with the log
// correction re-applied, so intermediates stay in double range.
LogValue ryser_permanent(const SquareMatrix& m);

// Partial-pivot elimination; singular input yields the exact zero (sign 0).
LogValue determinant(const SquareMatrix& m);

// n! * prod_i W_ii. The n! scale makes it exact on constant matrices; any
// positive scale gives the same rankings.
LogValue scaled_diagonal(const SquareMatrix& m);

}  // namespace betheperm
