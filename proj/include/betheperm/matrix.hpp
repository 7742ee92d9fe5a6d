#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "betheperm/rng.hpp"

namespace betheperm {

// Dense n x n matrix of nonnegative weights, row-major, immutable after
// construction. Safe to share across threads.
class SquareMatrix {
public:
    // Takes row-major entries; throws shape_error if entries.size() != n*n,
    // domain_error on a negative or non-finite entry, shape_error on n == 0.
    SquareMatrix(std::size_t n, std::vector<double> entries);

    static SquareMatrix filled(std::size_t n, double value);
    static SquareMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::span<const double> entries() const { return entries_; }
    std::span<const double> row(std::size_t i) const { return {entries_.data() + i * n_, n_}; }

    double max_entry() const;
    bool operator==(const SquareMatrix& other) const = default;

private:
    std::size_t n_;
    std::vector<double> entries_;
};

// Bijection on {0, ..., n-1}.
class Permutation {
public:
    // Throws shape_error if mapping is empty or not a bijection.
    explicit Permutation(std::vector<int> mapping);

    static Permutation identity(std::size_t n);

    std::size_t size() const { return map_.size(); }
    int operator[](std::size_t i) const { return map_[i]; }
    const std::vector<int>& mapping() const { return map_; }
    Permutation inverse() const;

    bool operator==(const Permutation& other) const = default;

private:
    std::vector<int> map_;
};

// Entries i.i.d. uniform on [lo, hi]. Requires 0 <= lo <= hi.
SquareMatrix random_uniform_matrix(std::size_t n, double lo, double hi, const RngSpec& rng);

// Uniform over S_n via Fisher-Yates.
Permutation random_permutation(std::size_t n, const RngSpec& rng);

}  // namespace betheperm
