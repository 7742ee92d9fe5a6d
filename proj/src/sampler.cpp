#include "betheperm/sampler.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "betheperm/errors.hpp"

namespace betheperm {

SampleEstimate sample_permanent(const SquareMatrix& m, const SampleBudget& budget,
                                const RngSpec& rng, std::uint64_t trace_stride) {
    if (budget.kind == SampleBudget::Kind::count && budget.samples == 0)
        throw domain_error("sample budget must be positive");
    if (budget.kind == SampleBudget::Kind::wall_time && budget.milliseconds <= 0.0)
        throw domain_error("time budget must be positive");

    const std::size_t n = m.size();
    auto eng = make_engine(rng);
    std::vector<std::size_t> perm(n);

    // Streaming log-sum-exp over per-sample log weights l_s = sum_i ln W_{i,pi(i)}.
    // Estimate: per ~ n!/s * sum exp(l_s).
    double running_max = -std::numeric_limits<double>::infinity();
    double scaled_sum = 0.0;
    std::size_t used = 0;

    SampleEstimate out;
    const auto t0 = std::chrono::steady_clock::now();
    const auto deadline = t0 + std::chrono::duration<double, std::milli>(budget.milliseconds);

    auto checked_continue = [&] {
        if (budget.kind == SampleBudget::Kind::count) return used < budget.samples;
        if (used > 0 && used % 256 == 0 && std::chrono::steady_clock::now() >= deadline)
            return false;
        return true;
    };

    while (checked_continue()) {
        for (std::size_t i = 0; i < n; ++i) perm[i] = i;
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = uniform_index(eng, i);
            std::swap(perm[i - 1], perm[j]);
        }
        double lw = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = m(i, perm[i]);
            if (w == 0.0) {
                lw = -std::numeric_limits<double>::infinity();
                break;
            }
            lw += std::log(w);
        }
        if (lw > running_max) {
            if (running_max != -std::numeric_limits<double>::infinity())
                scaled_sum *= std::exp(running_max - lw);
            running_max = lw;
        }
        if (lw != -std::numeric_limits<double>::infinity())
            scaled_sum += std::exp(lw - running_max);
        ++used;
        if (trace_stride > 0 && used % trace_stride == 0) {
            const double mean = scaled_sum > 0.0
                                    ? running_max + std::log(scaled_sum) -
                                          std::log(static_cast<double>(used))
                                    : -std::numeric_limits<double>::infinity();
            out.running_mean_trace.push_back(mean + std::lgamma(static_cast<double>(n) + 1.0));
        }
    }

    out.samples_used = used;
    out.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (scaled_sum <= 0.0) {
        out.log_estimate = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.log_estimate = std::lgamma(static_cast<double>(n) + 1.0) + running_max +
                       std::log(scaled_sum) - std::log(static_cast<double>(used));
    return out;
}

}  // namespace betheperm
