#pragma once

#include <cstddef>
#include <vector>

#include "betheperm/bp.hpp"
#include "betheperm/matrix.hpp"

namespace betheperm {

// n points in R^d. All points share the dimension.
class PointSet {
public:
    explicit PointSet(std::vector<std::vector<double>> points);  // throws shape_error

    std::size_t count() const { return points_.size(); }
    std::size_t dim() const { return dim_; }
    const std::vector<double>& point(std::size_t i) const { return points_[i]; }
    const std::vector<std::vector<double>>& points() const { return points_; }

private:
    std::vector<std::vector<double>> points_;
    std::size_t dim_;
};

struct GramReport {
    std::size_t m = 0;
    std::vector<double> gram;  // row-major, symmetric, rescaled by exp(-log_scale)
    double log_scale = 0.0;    // the subtracted max log kernel value
    double min_eigenvalue = 0.0;
    bool psd = false;
    double jitter_used = 0.0;  // smallest diagonal shift that would make it PSD
};

// K_ij = exp(-||a_i - b_j||^2 / (2 sigma^2)); entries in (0, 1], so the BP
// zero-entry policy never triggers. Requires equal sizes and dimensions.
SquareMatrix rbf_subkernel_matrix(const PointSet& a, const PointSet& b, double sigma);

// Log of the estimated permanent of the RBF subkernel matrix between the sets.
double permanent_kernel(const PointSet& a, const PointSet& b, double sigma,
                        const BPConfig& config = {});

// Builds the m x m Gram matrix of pairwise kernel values (linear domain,
// rescaled by the max log value; a positive rescale preserves semidefiniteness),
// symmetrizes it, and reports the minimum eigenvalue from a cyclic Jacobi
// diagonalization. psd uses the relative tolerance -1e-8 * trace / m.
// jobs > 1 computes Gram entries in parallel.
GramReport gram_psd_check(const std::vector<PointSet>& sets, double sigma,
                          const BPConfig& config = {}, unsigned jobs = 1);

// Eigenvalues of a symmetric matrix (row-major) by cyclic Jacobi rotations,
// ascending order.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n);

// Harness helper: affinely maps each feature dimension onto [0, 1] across the
// whole collection. Constant dimensions map to 0.
std::vector<PointSet> normalize_to_unit_box(const std::vector<PointSet>& sets);

}  // namespace betheperm
