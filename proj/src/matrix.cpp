#include "betheperm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "betheperm/errors.hpp"

namespace betheperm {

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), entries_(std::move(entries)) {
    if (n_ == 0) throw shape_error("matrix dimension must be positive");
    if (entries_.size() != n_ * n_)
        throw shape_error("entry count does not match dimension: expected " +
                          std::to_string(n_ * n_) + ", got " + std::to_string(entries_.size()));
    for (double v : entries_) {
        if (!std::isfinite(v)) throw domain_error("matrix entries must be finite");
        if (v < 0.0) throw domain_error("matrix entries must be nonnegative");
    }
}

SquareMatrix SquareMatrix::filled(std::size_t n, double value) {
    return SquareMatrix(n, std::vector<double>(n * n, value));
}

SquareMatrix SquareMatrix::identity(std::size_t n) {
    std::vector<double> e(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) e[i * n + i] = 1.0;
    return SquareMatrix(n, std::move(e));
}

double SquareMatrix::max_entry() const {
    return *std::max_element(entries_.begin(), entries_.end());
}

Permutation::Permutation(std::vector<int> mapping) : map_(std::move(mapping)) {
    if (map_.empty()) throw shape_error("permutation must be nonempty");
    std::vector<bool> seen(map_.size(), false);
    for (int v : map_) {
        if (v < 0 || static_cast<std::size_t>(v) >= map_.size() || seen[v])
            throw shape_error("mapping is not a bijection on {0..n-1}");
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
    std::vector<int> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = static_cast<int>(i);
    return Permutation(std::move(inv));
}

SquareMatrix random_uniform_matrix(std::size_t n, double lo, double hi, const RngSpec& rng) {
    if (lo < 0.0) throw domain_error("lower bound must be nonnegative");
    if (lo > hi) throw domain_error("lower bound exceeds upper bound");
    auto eng = make_engine(rng);
    std::vector<double> e(n * n);
    for (double& v : e) v = lo + uniform_unit(eng) * (hi - lo);
    return SquareMatrix(n, std::move(e));
}

Permutation random_permutation(std::size_t n, const RngSpec& rng) {
    auto eng = make_engine(rng);
    std::vector<int> m(n);
    std::iota(m.begin(), m.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_index(eng, i));
        std::swap(m[i - 1], m[j]);
    }
    return Permutation(std::move(m));
}

}  // namespace betheperm
