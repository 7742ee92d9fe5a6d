#include "betheperm/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <ostream>

#include "betheperm/errors.hpp"
#include "betheperm/exact.hpp"
#include "betheperm/parallel.hpp"

#include "json.hpp"

namespace betheperm {

namespace {

std::uint64_t merge_count(std::vector<std::size_t>& a, std::vector<std::size_t>& tmp,
                          std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::uint64_t inv = merge_count(a, tmp, lo, mid) + merge_count(a, tmp, mid, hi);
    std::size_t i = lo, j = mid, k = lo;
    while (i < mid && j < hi) {
        if (a[j] < a[i]) {
            inv += mid - i;
            tmp[k++] = a[j++];
        } else {
            tmp[k++] = a[i++];
        }
    }
    while (i < mid) tmp[k++] = a[i++];
    while (j < hi) tmp[k++] = a[j++];
    std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
              tmp.begin() + static_cast<std::ptrdiff_t>(hi),
              a.begin() + static_cast<std::ptrdiff_t>(lo));
    return inv;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double signed_log(const LogValue& v) {
    if (v.is_zero()) return 0.0;
    return static_cast<double>(v.sign) * v.log_magnitude;
}

LogValue from_log(double log_value) {
    if (log_value == -std::numeric_limits<double>::infinity()) return LogValue::zero();
    return LogValue::positive(log_value);
}

}  // namespace

double kendall_distance(const Permutation& r1, const Permutation& r2) {
    const std::size_t m = r1.size();
    if (m != r2.size()) throw shape_error("rankings must have equal length");
    if (m < 2) throw size_error("kendall distance needs at least two items");

    // seq[p] = rank of (the item ranked p-th by r1) under r2; inversions of
    // seq are exactly the discordant pairs.
    std::vector<std::size_t> seq(m);
    for (std::size_t item = 0; item < m; ++item)
        seq[static_cast<std::size_t>(r1[item])] = static_cast<std::size_t>(r2[item]);
    std::vector<std::size_t> tmp(m);
    const std::uint64_t inv = merge_count(seq, tmp, 0, m);
    const double pairs = 0.5 * static_cast<double>(m) * static_cast<double>(m - 1);
    return static_cast<double>(inv) / pairs;
}

Permutation ranking_from_values(const std::vector<LogValue>& values) {
    const std::size_t m = values.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const int c = compare(values[a], values[b]);
        return c != 0 ? c < 0 : a < b;
    });
    std::vector<int> rank(m);
    for (std::size_t pos = 0; pos < m; ++pos) rank[order[pos]] = static_cast<int>(pos);
    return Permutation(std::move(rank));
}

RankingReport run_accuracy_study(std::size_t n, std::size_t count, const RngSpec& rng,
                                 const BPConfig& config, const SamplingMode& sampling,
                                 unsigned jobs) {
    config.validate();
    if (n > 12) throw size_error("accuracy study needs the exact permanent; n must be <= 12");
    if (count < 2) throw size_error("accuracy study needs at least two matrices to rank");

    RankingReport report;
    report.n = n;
    report.count = count;
    report.rows.resize(count);

    parallel_for(count, jobs, [&](std::size_t i) {
        const SquareMatrix mat = random_uniform_matrix(n, 0.0, 50.0, rng.child(2 * i));
        const BetheResult bp = estimate_permanent(mat, config);
        const double bp_seconds = bp.message_seconds + bp.bethe_seconds;

        SampleBudget budget = SampleBudget::count(sampling.samples);
        if (sampling.kind == SamplingMode::Kind::time_matched)
            budget = SampleBudget::wall_time(std::max(bp_seconds * 1000.0, 0.05));
        const SampleEstimate se = sample_permanent(mat, budget, rng.child(2 * i + 1));

        AccuracyRow& row = report.rows[i];
        row.index = i;
        row.true_perm = ryser_permanent(mat);
        row.log_bethe = bp.log_estimate;
        row.log_sample = se.log_estimate;
        row.det = determinant(mat);
        row.log_diag = scaled_diagonal(mat).log_magnitude;
        row.bp_iterations = bp.iterations;
        row.bp_ms = bp_seconds * 1000.0;
        row.sample_count = se.samples_used;
    });

    std::vector<LogValue> truth(count), bethe(count), sample(count), det(count), diag(count);
    for (std::size_t i = 0; i < count; ++i) {
        truth[i] = report.rows[i].true_perm;
        bethe[i] = from_log(report.rows[i].log_bethe);
        sample[i] = from_log(report.rows[i].log_sample);
        det[i] = report.rows[i].det;
        diag[i] = from_log(report.rows[i].log_diag);
    }
    const Permutation true_rank = ranking_from_values(truth);
    report.kendall["bethe"] = kendall_distance(true_rank, ranking_from_values(bethe));
    report.kendall["sampling"] = kendall_distance(true_rank, ranking_from_values(sample));
    report.kendall["det"] = kendall_distance(true_rank, ranking_from_values(det));
    report.kendall["diag"] = kendall_distance(true_rank, ranking_from_values(diag));
    return report;
}

RuntimeReport run_runtime_study(std::size_t n_min, std::size_t n_max, std::size_t step,
                                std::size_t trials_per_n, const RngSpec& rng,
                                const BPConfig& config) {
    config.validate();
    if (n_min < 2) throw size_error("runtime study needs n_min >= 2");
    if (n_max < n_min) throw size_error("n_max must be >= n_min");
    if (step == 0) throw size_error("step must be positive");
    if (trials_per_n == 0) throw size_error("trials_per_n must be positive");

    RuntimeReport report;
    for (std::size_t n = n_min; n <= n_max; n += step) {
        RuntimeRow row;
        row.n = n;
        std::size_t converged = 0;
        for (std::size_t t = 0; t < trials_per_n; ++t) {
            const SquareMatrix mat =
                random_uniform_matrix(n, 0.0, 50.0, rng.child(n * 1024 + t));
            const auto [state, res] = run_bp(mat, config);
            (void)state;
            row.mean_message_ms += res.message_seconds * 1000.0;
            row.mean_bethe_ms += res.bethe_seconds * 1000.0;
            row.mean_iterations += res.iterations;
            row.per_iteration_ms +=
                res.message_seconds * 1000.0 / static_cast<double>(res.iterations);
            if (res.converged) ++converged;
        }
        const auto trials = static_cast<double>(trials_per_n);
        row.mean_message_ms /= trials;
        row.mean_bethe_ms /= trials;
        row.mean_total_ms = row.mean_message_ms + row.mean_bethe_ms;
        row.mean_iterations /= trials;
        row.per_iteration_ms /= trials;
        row.convergence_rate = static_cast<double>(converged) / trials;
        report.rows.push_back(row);
    }
    return report;
}

void write_accuracy_csv(const RankingReport& report, std::ostream& os, bool with_timing) {
    os << "index,n,log_true,log_bethe,log_sample,log_det,log_diag,bp_iters,bp_ms,sample_s\n";
    for (const AccuracyRow& row : report.rows) {
        os << row.index << ',' << report.n << ',' << format_double(signed_log(row.true_perm))
           << ',' << format_double(row.log_bethe) << ',' << format_double(row.log_sample) << ','
           << format_double(signed_log(row.det)) << ',' << format_double(row.log_diag) << ','
           << row.bp_iterations << ',';
        if (with_timing) os << format_double(row.bp_ms);
        os << ',' << row.sample_count << '\n';
    }
}

void write_runtime_csv(const RuntimeReport& report, std::ostream& os) {
    os << "n,mean_total_ms,mean_message_ms,mean_bethe_ms,mean_iterations,per_iteration_ms,"
          "convergence_rate\n";
    for (const RuntimeRow& row : report.rows) {
        os << row.n << ',' << format_double(row.mean_total_ms) << ','
           << format_double(row.mean_message_ms) << ',' << format_double(row.mean_bethe_ms)
           << ',' << format_double(row.mean_iterations) << ','
           << format_double(row.per_iteration_ms) << ','
           << format_double(row.convergence_rate) << '\n';
    }
}

std::string accuracy_summary_json(const RankingReport& report, const BPConfig& config,
                                  const SamplingMode& sampling, const RngSpec& rng) {
    nlohmann::ordered_json j;
    j["n"] = report.n;
    j["count"] = report.count;
    nlohmann::ordered_json k;
    for (const char* method : {"bethe", "sampling", "det", "diag"})
        if (auto it = report.kendall.find(method); it != report.kendall.end())
            k[method] = it->second;
    for (const auto& [method, value] : report.kendall)
        if (!k.contains(method)) k[method] = value;
    j["kendall"] = k;
    nlohmann::ordered_json c;
    c["epsilon"] = config.epsilon;
    c["tolerance"] = config.tolerance;
    c["max_iterations"] = config.max_iterations;
    c["init"] = config.init == MessageInit::uniform ? "uniform" : "random";
    c["zero_policy"] = config.zero_policy == ZeroEntryPolicy::clamp ? "clamp" : "reject";
    c["sampling"] =
        sampling.kind == SamplingMode::Kind::time_matched ? "time-matched" : "fixed-count";
    if (sampling.kind == SamplingMode::Kind::fixed_count) c["samples"] = sampling.samples;
    c["seed"] = rng.seed;
    c["rng"] = rng.algorithm;
    j["config"] = c;
    return j.dump(2) + "\n";
}

}  // namespace betheperm
