#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "betheperm/errors.hpp"
#include "betheperm/exact.hpp"
#include "betheperm/kernel.hpp"
#include "betheperm/matrix.hpp"

using namespace betheperm;

namespace {

PointSet random_points(std::size_t count, std::size_t dim, const RngSpec& rng) {
    auto eng = make_engine(rng);
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (auto& p : pts)
        for (double& v : p) v = uniform_unit(eng);
    return PointSet(std::move(pts));
}

PointSet ps(std::vector<std::vector<double>> p) { return PointSet(std::move(p)); }

double rbf(const std::vector<double>& a, const std::vector<double>& b, double sigma) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

}  // namespace

TEST_CASE("point set accessors and validation") {
    const PointSet s({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}});
    CHECK(s.count() == 3);
    CHECK(s.dim() == 2);
    CHECK(s.point(1)[0] == 3.0);
    CHECK(s.points()[2][1] == 6.0);

    CHECK_THROWS_AS(ps({}), shape_error);
    CHECK_THROWS_AS(ps({{}}), shape_error);
    CHECK_THROWS_AS(ps({{1.0}, {1.0, 2.0}}), shape_error);
    CHECK_THROWS_AS(ps({{std::nan("")}}), domain_error);
}

TEST_CASE("rbf subkernel values") {
    const double sigma = 0.5;
    const PointSet a({{0.0, 0.0}, {1.0, 0.0}});
    const PointSet b({{0.0, 0.0}, {0.0, 1.0}});
    const SquareMatrix k = rbf_subkernel_matrix(a, b, sigma);
    CHECK(k(0, 0) == 1.0);
    CHECK(k(0, 1) == doctest::Approx(std::exp(-1.0 / (2.0 * sigma * sigma))).epsilon(1e-14));
    // a pair at distance sqrt(2) sigma maps to 1/e
    const PointSet c = ps({{0.0}});
    const PointSet d = ps({{std::sqrt(2.0) * sigma}});
    CHECK(rbf_subkernel_matrix(c, d, sigma)(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));

    const PointSet e = random_points(4, 3, RngSpec{1});
    const PointSet f = random_points(4, 3, RngSpec{2});
    const SquareMatrix g = rbf_subkernel_matrix(e, f, sigma);
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(g(i, j) > 0.0);
            CHECK(g(i, j) <= 1.0);
            CHECK(g(i, j) == doctest::Approx(rbf(e.point(i), f.point(j), sigma)).epsilon(1e-14));
        }

    CHECK_THROWS_AS(rbf_subkernel_matrix(a, c, sigma), shape_error);
    CHECK_THROWS_AS(rbf_subkernel_matrix(c, d, 0.0), domain_error);
    CHECK_THROWS_AS(rbf_subkernel_matrix(ps({{0.0}, {1.0}}), d, sigma), shape_error);
}

TEST_CASE("singleton sets reduce the kernel to the plain rbf") {
    for (std::uint64_t s = 0; s < 8; ++s) {
        const PointSet a = random_points(1, 4, RngSpec{100 + s});
        const PointSet b = random_points(1, 4, RngSpec{200 + s});
        const double expected = std::log(rbf(a.point(0), b.point(0), 0.5));
        CHECK(std::fabs(permanent_kernel(a, b, 0.5) - expected) < 1e-12);
    }
}

TEST_CASE("kernel is a lower bound near the exact log permanent") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const PointSet a = random_points(5, 3, RngSpec{300 + s});
        const PointSet b = random_points(5, 3, RngSpec{400 + s});
        const double exact = ryser_permanent(rbf_subkernel_matrix(a, b, 0.7)).log_magnitude;
        const double approx = permanent_kernel(a, b, 0.7);
        CHECK(approx <= exact + 1e-9);
        CHECK(exact - approx < 2.0);
    }
}

TEST_CASE("kernel is symmetric in its arguments") {
    const PointSet a = random_points(6, 2, RngSpec{31});
    const PointSet b = random_points(6, 2, RngSpec{32});
    CHECK(std::fabs(permanent_kernel(a, b, 0.5) - permanent_kernel(b, a, 0.5)) < 1e-8);
    CHECK(std::fabs(permanent_kernel(a, a, 0.5) - permanent_kernel(a, a, 0.5)) == 0.0);
}

TEST_CASE("kernel ignores the point order inside a set") {
    const PointSet a({{0.1, 0.9}, {0.4, 0.2}, {0.8, 0.5}});
    const PointSet a_shuffled({{0.8, 0.5}, {0.1, 0.9}, {0.4, 0.2}});
    const PointSet b = random_points(3, 2, RngSpec{33});
    CHECK(std::fabs(permanent_kernel(a, b, 0.5) - permanent_kernel(a_shuffled, b, 0.5)) < 1e-8);
}

TEST_CASE("jacobi eigenvalues") {
    // 2x2 closed form
    const double a = 2.0, b = 0.7, c = 1.1;
    const auto e2 = jacobi_eigenvalues({a, b, b, c}, 2);
    const double mid = (a + c) / 2.0, rad = std::sqrt((a - c) * (a - c) / 4.0 + b * b);
    CHECK(e2[0] == doctest::Approx(mid - rad).epsilon(1e-12));
    CHECK(e2[1] == doctest::Approx(mid + rad).epsilon(1e-12));

    // diagonal matrix comes back sorted
    const auto ed = jacobi_eigenvalues({3.0, 0, 0, 0, -1.0, 0, 0, 0, 2.0}, 3);
    CHECK(ed[0] == doctest::Approx(-1.0));
    CHECK(ed[1] == doctest::Approx(2.0));
    CHECK(ed[2] == doctest::Approx(3.0));

    // 3x3 spectral invariants: trace, pair sums, determinant
    const std::vector<double> m = {4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0};
    const auto e3 = jacobi_eigenvalues(m, 3);
    CHECK(e3[0] + e3[1] + e3[2] == doctest::Approx(9.0).epsilon(1e-12));
    const double minors = (4.0 * 3.0 - 1.0) + (4.0 * 2.0 - 0.25) + (3.0 * 2.0 - 0.04);
    CHECK(e3[0] * e3[1] + e3[0] * e3[2] + e3[1] * e3[2] ==
          doctest::Approx(minors).epsilon(1e-12));
    const double det = 4.0 * (3.0 * 2.0 - 0.04) - 1.0 * (1.0 * 2.0 - 0.1) +
                       0.5 * (0.2 - 1.5);
    CHECK(e3[0] * e3[1] * e3[2] == doctest::Approx(det).epsilon(1e-11));

    CHECK_THROWS_AS(jacobi_eigenvalues({}, 0), shape_error);
    CHECK_THROWS_AS(jacobi_eigenvalues({1.0, 2.0}, 2), shape_error);
}

TEST_CASE("gram report on one and two sets") {
    const PointSet only = random_points(3, 2, RngSpec{41});
    const GramReport solo = gram_psd_check({only}, 0.5);
    CHECK(solo.m == 1);
    CHECK(solo.psd);
    CHECK(solo.gram.size() == 1);
    CHECK(solo.min_eigenvalue == doctest::Approx(solo.gram[0]));
    CHECK(solo.jitter_used == 0.0);

    const PointSet other = random_points(3, 2, RngSpec{42});
    const GramReport duo = gram_psd_check({only, other}, 0.5);
    CHECK(duo.m == 2);
    const double ga = duo.gram[0], gb = duo.gram[1], gc = duo.gram[3];
    CHECK(duo.gram[2] == gb);
    const double mid = (ga + gc) / 2.0, rad = std::sqrt((ga - gc) * (ga - gc) / 4.0 + gb * gb);
    CHECK(duo.min_eigenvalue == doctest::Approx(mid - rad).epsilon(1e-10));
}

TEST_CASE("gram matrices are exactly symmetric and rescaled to a unit peak") {
    std::vector<PointSet> sets;
    for (std::uint64_t s = 0; s < 4; ++s) sets.push_back(random_points(3, 2, RngSpec{50 + s}));
    const GramReport r = gram_psd_check(sets, 0.5);
    CHECK(r.m == 4);
    double max_entry = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            CHECK(r.gram[i * 4 + j] == r.gram[j * 4 + i]);
            max_entry = std::max(max_entry, r.gram[i * 4 + j]);
        }
    CHECK(max_entry == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::isfinite(r.log_scale));
    if (!r.psd) CHECK(r.jitter_used > 0.0);
    if (r.psd) CHECK(r.jitter_used == doctest::Approx(std::max(0.0, -r.min_eigenvalue)));

    // parallel evaluation changes nothing
    const GramReport r2 = gram_psd_check(sets, 0.5, {}, 3);
    CHECK(r2.gram == r.gram);
    CHECK(r2.min_eigenvalue == r.min_eigenvalue);
}

TEST_CASE("gram validation") {
    CHECK_THROWS_AS(gram_psd_check({}, 0.5), shape_error);
    const PointSet two = random_points(2, 2, RngSpec{1});
    const PointSet three = random_points(3, 2, RngSpec{2});
    const PointSet wide = random_points(2, 3, RngSpec{3});
    CHECK_THROWS_AS(gram_psd_check({two, three}, 0.5), shape_error);
    CHECK_THROWS_AS(gram_psd_check({two, wide}, 0.5), shape_error);
    CHECK_THROWS_AS(gram_psd_check({two}, -1.0), domain_error);
}

TEST_CASE("unit box normalization") {
    const PointSet a({{0.0, 5.0, 7.0}, {10.0, 5.0, 7.0}});
    const PointSet b({{5.0, 5.0, 3.0}, {2.0, 5.0, 11.0}});
    const auto out = normalize_to_unit_box({a, b});
    REQUIRE(out.size() == 2);
    // dim 0 spans [0, 10] over the collection
    CHECK(out[0].point(0)[0] == 0.0);
    CHECK(out[0].point(1)[0] == 1.0);
    CHECK(out[1].point(0)[0] == doctest::Approx(0.5));
    CHECK(out[1].point(1)[0] == doctest::Approx(0.2));
    // dim 1 is constant, so it collapses to 0
    for (const auto& s : out)
        for (const auto& p : s.points()) CHECK(p[1] == 0.0);
    // dim 2 spans [3, 11]
    CHECK(out[0].point(0)[2] == doctest::Approx(0.5));
    CHECK(out[1].point(1)[2] == 1.0);

    for (const auto& s : out)
        for (const auto& p : s.points())
            for (double v : p) {
                CHECK(v >= 0.0);
                CHECK(v <= 1.0);
            }

    CHECK_THROWS_AS(normalize_to_unit_box(std::vector<PointSet>{a, ps({{1.0}})}), shape_error);
    CHECK(normalize_to_unit_box({}).empty());
}
