#include "betheperm/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "betheperm/errors.hpp"

namespace betheperm {

namespace {

// Divides each row by its maximum entry so products stay in range; the log of
// the scale product is re-applied afterwards. Returns false if some row is
// all zero (the permanent is then exactly 0).
bool scale_rows(const SquareMatrix& m, std::vector<double>& scaled, double& log_correction) {
    const std::size_t n = m.size();
    scaled.assign(n * n, 0.0);
    log_correction = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = m.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        if (mx == 0.0) return false;
        log_correction += std::log(mx);
        for (std::size_t j = 0; j < n; ++j) scaled[i * n + j] = row[j] / mx;
    }
    return true;
}

LogValue from_accumulator(long double acc, double log_correction) {
    if (acc == 0.0L) return LogValue::zero();
    const int sign = acc > 0.0L ? 1 : -1;
    return {static_cast<double>(std::log(std::fabs(acc))) + log_correction, sign};
}

}  // namespace

LogValue brute_force_permanent(const SquareMatrix& m) {
    const std::size_t n = m.size();
    if (n > 12) throw size_error("brute force permanent is limited to n <= 12");

    std::vector<double> w;
    double log_correction = 0.0;
    if (!scale_rows(m, w, log_correction)) return LogValue::zero();

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    long double acc = 0.0L;
    do {
        long double prod = 1.0L;
        for (std::size_t i = 0; i < n; ++i) prod *= w[i * n + perm[i]];
        acc += prod;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return from_accumulator(acc, log_correction);
}

LogValue ryser_permanent(const SquareMatrix& m) {
    const std::size_t n = m.size();
    if (n > 30) throw size_error("ryser permanent is limited to n <= 30");

    std::vector<double> w;
    double log_correction = 0.0;
    if (!scale_rows(m, w, log_correction)) return LogValue::zero();

    // per(W) = (-1)^n sum_{S != empty} (-1)^|S| prod_i sum_{j in S} W_ij,
    // visiting subsets in Gray-code order so each step adjusts the row sums
    // by a single column.
    std::vector<long double> row_sum(n, 0.0L);
    long double acc = 0.0L;
    const std::uint64_t total = 1ULL << n;
    std::uint64_t gray = 0;
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto bit = static_cast<unsigned>(std::countr_zero(g));
        const std::uint64_t next = g ^ (g >> 1);
        const bool added = (next >> bit) & 1ULL;
        for (std::size_t i = 0; i < n; ++i) {
            const long double v = w[i * n + bit];
            row_sum[i] += added ? v : -v;
        }
        gray = next;
        long double prod = 1.0L;
        for (std::size_t i = 0; i < n; ++i) prod *= row_sum[i];
        const bool odd = std::popcount(gray) & 1U;
        acc += odd ? -prod : prod;
    }
    if (n % 2 == 1) acc = -acc;
    return from_accumulator(acc, log_correction);
}

LogValue determinant(const SquareMatrix& m) {
    const std::size_t n = m.size();
    std::vector<double> a(m.entries().begin(), m.entries().end());

    int sign = 1;
    double log_mag = 0.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
        const double p = a[pivot * n + col];
        if (p == 0.0) return LogValue::zero();
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[pivot * n + j], a[col * n + j]);
            sign = -sign;
        }
        if (p < 0.0) sign = -sign;
        log_mag += std::log(std::fabs(p));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / p;
            if (f == 0.0) continue;
            for (std::size_t j = col + 1; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            a[r * n + col] = 0.0;
        }
    }
    return {log_mag, sign};
}

LogValue scaled_diagonal(const SquareMatrix& m) {
    const std::size_t n = m.size();
    double log_mag = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = m(i, i);
        if (d == 0.0) return LogValue::zero();
        log_mag += std::log(d);
    }
    return {log_mag, 1};
}

}  // namespace betheperm
