#include "betheperm/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "betheperm/errors.hpp"
#include "betheperm/parallel.hpp"

namespace betheperm {

PointSet::PointSet(std::vector<std::vector<double>> points) : points_(std::move(points)) {
    if (points_.empty()) throw shape_error("point set must contain at least one point");
    dim_ = points_[0].size();
    if (dim_ == 0) throw shape_error("point dimension must be positive");
    for (const auto& p : points_) {
        if (p.size() != dim_) throw shape_error("all points must share a dimension");
        for (double v : p)
            if (!std::isfinite(v)) throw domain_error("point coordinates must be finite");
    }
}

SquareMatrix rbf_subkernel_matrix(const PointSet& a, const PointSet& b, double sigma) {
    if (a.count() != b.count()) throw shape_error("point sets must have equal cardinality");
    if (a.dim() != b.dim()) throw shape_error("point sets must share a dimension");
    if (!(sigma > 0.0)) throw domain_error("sigma must be positive");
    const std::size_t n = a.count();
    const std::size_t d = a.dim();
    const double inv = 1.0 / (2.0 * sigma * sigma);
    std::vector<double> k(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& pa = a.point(i);
        for (std::size_t j = 0; j < n; ++j) {
            const auto& pb = b.point(j);
            double sq = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = pa[c] - pb[c];
                sq += diff * diff;
            }
            k[i * n + j] = std::exp(-sq * inv);
        }
    }
    return SquareMatrix(n, std::move(k));
}

double permanent_kernel(const PointSet& a, const PointSet& b, double sigma,
                        const BPConfig& config) {
    return estimate_permanent(rbf_subkernel_matrix(a, b, sigma), config).log_estimate;
}

std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n) {
    if (n == 0) throw shape_error("matrix must be non-empty");
    if (a.size() != n * n) throw shape_error("buffer does not match n * n");
    if (n == 1) return {a[0]};

    auto off_diag = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        return s;
    };

    double scale = 0.0;
    for (std::size_t i = 0; i < n * n; ++i) scale = std::max(scale, std::fabs(a[i]));
    const double stop = std::max(scale * scale, 1.0) * 1e-30;

    for (int sweep = 0; sweep < 100 && off_diag() > stop; ++sweep) {
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i * n + i];
    std::sort(eig.begin(), eig.end());
    return eig;
}

GramReport gram_psd_check(const std::vector<PointSet>& sets, double sigma,
                          const BPConfig& config, unsigned jobs) {
    if (sets.empty()) throw shape_error("collection must contain at least one set");
    const std::size_t m = sets.size();
    for (const PointSet& s : sets) {
        if (s.count() != sets[0].count())
            throw shape_error("all sets in a collection must have equal cardinality");
        if (s.dim() != sets[0].dim())
            throw shape_error("all sets in a collection must share a dimension");
    }

    std::vector<double> logs(m * m);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) pairs.emplace_back(i, j);
    parallel_for(pairs.size(), jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = permanent_kernel(sets[i], sets[j], sigma, config);
        logs[i * m + j] = v;
        logs[j * m + i] = v;
    });

    GramReport report;
    report.m = m;
    report.log_scale = *std::max_element(logs.begin(), logs.end());
    report.gram.resize(m * m);
    for (std::size_t i = 0; i < m * m; ++i)
        report.gram[i] = std::exp(logs[i] - report.log_scale);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const double sym = 0.5 * (report.gram[i * m + j] + report.gram[j * m + i]);
            report.gram[i * m + j] = sym;
            report.gram[j * m + i] = sym;
        }

    const auto eig = jacobi_eigenvalues(report.gram, m);
    report.min_eigenvalue = eig.front();
    double trace = 0.0;
    for (std::size_t i = 0; i < m; ++i) trace += report.gram[i * m + i];
    report.psd = report.min_eigenvalue >= -1e-8 * trace / static_cast<double>(m);
    report.jitter_used = std::max(0.0, -report.min_eigenvalue);
    return report;
}

std::vector<PointSet> normalize_to_unit_box(const std::vector<PointSet>& sets) {
    if (sets.empty()) return {};
    const std::size_t d = sets[0].dim();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (const PointSet& s : sets) {
        if (s.dim() != d) throw shape_error("all sets must share a dimension");
        for (std::size_t i = 0; i < s.count(); ++i)
            for (std::size_t c = 0; c < d; ++c) {
                lo[c] = std::min(lo[c], s.point(i)[c]);
                hi[c] = std::max(hi[c], s.point(i)[c]);
            }
    }
    std::vector<PointSet> out;
    out.reserve(sets.size());
    for (const PointSet& s : sets) {
        std::vector<std::vector<double>> pts(s.count(), std::vector<double>(d));
        for (std::size_t i = 0; i < s.count(); ++i)
            for (std::size_t c = 0; c < d; ++c) {
                const double span = hi[c] - lo[c];
                pts[i][c] = span > 0.0 ? (s.point(i)[c] - lo[c]) / span : 0.0;
            }
        out.emplace_back(std::move(pts));
    }
    return out;
}

}  // namespace betheperm
