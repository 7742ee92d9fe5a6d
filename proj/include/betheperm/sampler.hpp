#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "betheperm/matrix.hpp"
#include "betheperm/rng.hpp"

namespace betheperm {

// Either a fixed number of permutation draws or a wall-clock budget. Under a
// wall-clock budget the clock is checked every 256 samples, so the run stops
// at the first block boundary after the budget elapses.
struct SampleBudget {
    enum class Kind { count, wall_time };
    Kind kind = Kind::count;
    std::uint64_t samples = 100000;  // count mode
    double milliseconds = 0.0;       // wall_time mode

    static SampleBudget count(std::uint64_t s) { return {Kind::count, s, 0.0}; }
    static SampleBudget wall_time(double ms) { return {Kind::wall_time, 0, ms}; }
};

struct SampleEstimate {
    double log_estimate = 0.0;  // ln[(n!/s) * sum of permutation products]; -inf if all zero
    std::uint64_t samples_used = 0;
    double elapsed_seconds = 0.0;
    std::vector<double> running_mean_trace;  // filled when trace_stride > 0
};

// Uniform-permutation Monte Carlo estimate of per(W). Per-permutation products
// are accumulated by streaming log-sum-exp, so large n cannot overflow.
// trace_stride > 0 records the running log-estimate every trace_stride samples.
SampleEstimate sample_permanent(const SquareMatrix& m, const SampleBudget& budget,
                                const RngSpec& rng, std::uint64_t trace_stride = 0);

}  // namespace betheperm
