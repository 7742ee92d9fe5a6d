#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "betheperm/bp.hpp"
#include "betheperm/log_value.hpp"
#include "betheperm/matrix.hpp"
#include "betheperm/sampler.hpp"

namespace betheperm {

// Normalized Kendall distance between two rankings: pairwise-disagreement
// count divided by m(m-1)/2, in [0, 1]. O(m log m) by merge-sort inversion
// counting. Requires equal lengths and m >= 2.
double kendall_distance(const Permutation& r1, const Permutation& r2);

// rank[i] = position of item i when items are sorted ascending by value;
// bit-equal values are broken by item index.
Permutation ranking_from_values(const std::vector<LogValue>& values);

// How the sampling baseline is budgeted inside the accuracy study.
struct SamplingMode {
    enum class Kind { time_matched, fixed_count };
    Kind kind = Kind::time_matched;
    std::uint64_t samples = 100000;  // fixed_count mode

    static SamplingMode time_matched() { return {Kind::time_matched, 0}; }
    static SamplingMode fixed_count(std::uint64_t s) { return {Kind::fixed_count, s}; }
};

struct AccuracyRow {
    std::size_t index = 0;
    LogValue true_perm;      // Ryser
    double log_bethe = 0.0;
    double log_sample = 0.0;  // -inf when every sampled product was zero
    LogValue det;
    double log_diag = 0.0;
    int bp_iterations = 0;
    double bp_ms = 0.0;  // message passing + Bethe evaluation
    std::uint64_t sample_count = 0;
};

struct RankingReport {
    std::size_t n = 0;
    std::size_t count = 0;
    std::vector<AccuracyRow> rows;
    std::map<std::string, double> kendall;  // method -> normalized distance vs true ranking
};

struct RuntimeRow {
    std::size_t n = 0;
    double mean_total_ms = 0.0;
    double mean_message_ms = 0.0;
    double mean_bethe_ms = 0.0;
    double mean_iterations = 0.0;
    double per_iteration_ms = 0.0;  // mean of message_ms / iterations
    double convergence_rate = 0.0;
};

struct RuntimeReport {
    std::vector<RuntimeRow> rows;
};

// Generates `count` random U[0,50] matrices, computes the true permanent
// (Ryser), the BP estimate, the sampling baseline (time-matched to the BP
// wall time unless a fixed count is requested), the determinant and the
// scaled diagonal, and reports each method's Kendall distance from the true
// ranking. n <= 12 so the exact permanent stays cheap. jobs > 1 processes
// matrices in parallel; results are deterministic for fixed-count sampling.
RankingReport run_accuracy_study(std::size_t n, std::size_t count, const RngSpec& rng,
                                 const BPConfig& config = {},
                                 const SamplingMode& sampling = SamplingMode::time_matched(),
                                 unsigned jobs = 1);

// Mean wall time, iteration count and convergence rate of BP over
// trials_per_n random U[0,50] matrices for each n in [n_min, n_max] stepping
// by `step`. Bethe evaluation time is recorded separately from message time.
RuntimeReport run_runtime_study(std::size_t n_min, std::size_t n_max, std::size_t step,
                                std::size_t trials_per_n, const RngSpec& rng,
                                const BPConfig& config = {});

// CSV row per matrix: index,n,log_true,log_bethe,log_sample,log_det,log_diag,
// bp_iters,bp_ms,sample_s. log_det carries the determinant sign as
// sign * log-magnitude (0 for a singular matrix). with_timing=false blanks
// the timing column.
void write_accuracy_csv(const RankingReport& report, std::ostream& os, bool with_timing = true);

// CSV row per n: n,mean_total_ms,mean_message_ms,mean_bethe_ms,
// mean_iterations,per_iteration_ms,convergence_rate.
void write_runtime_csv(const RuntimeReport& report, std::ostream& os);

// {"n":..., "count":..., "kendall":{...}, "config":{...}} per the report schema.
std::string accuracy_summary_json(const RankingReport& report, const BPConfig& config,
                                  const SamplingMode& sampling, const RngSpec& rng);

}  // namespace betheperm
