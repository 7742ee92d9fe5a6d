#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "betheperm/bench.hpp"
#include "betheperm/errors.hpp"
#include "betheperm/matrix.hpp"

using namespace betheperm;

namespace {

Permutation perm(std::vector<int> m) { return Permutation(std::move(m)); }

// O(m^2) reference
double kendall_slow(const Permutation& a, const Permutation& b) {
    const std::size_t m = a.size();
    std::size_t bad = 0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            const bool da = a[i] < a[j];
            const bool db = b[i] < b[j];
            if (da != db) ++bad;
        }
    return static_cast<double>(bad) / (static_cast<double>(m) * (m - 1) / 2.0);
}

std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string line;
    while (std::getline(is, line)) out.push_back(line);
    return out;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

TEST_CASE("kendall distance on the canonical examples") {
    CHECK(kendall_distance(perm({0, 1, 2}), perm({0, 1, 2})) == 0.0);
    CHECK(kendall_distance(perm({0, 1, 2}), perm({2, 1, 0})) == 1.0);
    CHECK(kendall_distance(perm({0, 1, 2}), perm({0, 2, 1})) == doctest::Approx(1.0 / 3.0));
    CHECK(kendall_distance(perm({1, 0}), perm({0, 1})) == 1.0);
}

TEST_CASE("kendall distance matches the quadratic reference") {
    for (std::uint64_t s = 0; s < 60; ++s) {
        const std::size_t m = 2 + s % 40;
        const Permutation a = random_permutation(m, RngSpec{s});
        const Permutation b = random_permutation(m, RngSpec{s + 1000});
        CHECK(kendall_distance(a, b) == kendall_slow(a, b));
    }
    for (std::uint64_t s = 0; s < 3; ++s) {
        const Permutation a = random_permutation(200, RngSpec{s});
        const Permutation b = random_permutation(200, RngSpec{s + 5000});
        CHECK(kendall_distance(a, b) == doctest::Approx(kendall_slow(a, b)).epsilon(1e-15));
    }
}

TEST_CASE("kendall distance is a bounded metric") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const std::size_t m = 3 + s % 12;
        const Permutation a = random_permutation(m, RngSpec{3 * s});
        const Permutation b = random_permutation(m, RngSpec{3 * s + 1});
        const Permutation c = random_permutation(m, RngSpec{3 * s + 2});
        const double ab = kendall_distance(a, b);
        const double ba = kendall_distance(b, a);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(kendall_distance(a, a) == 0.0);
        CHECK(kendall_distance(a, c) <= ab + kendall_distance(b, c) + 1e-15);
    }
    CHECK_THROWS_AS(kendall_distance(perm({0}), perm({0})), size_error);
    CHECK_THROWS_AS(kendall_distance(perm({0, 1}), perm({0, 1, 2})), shape_error);
}

TEST_CASE("ranking breaks ties by index") {
    const std::vector<LogValue> values = {
        LogValue::from_value(3.0),
        LogValue::from_value(1.0),
        LogValue::from_value(3.0),
        LogValue::from_value(0.5),
    };
    const Permutation r = ranking_from_values(values);
    // ascending: 0.5 (item 3), 1.0 (item 1), 3.0 (items 0 then 2)
    CHECK(r[3] == 0);
    CHECK(r[1] == 1);
    CHECK(r[0] == 2);
    CHECK(r[2] == 3);

    // sign-aware: negative values sort below zero, below positive
    const std::vector<LogValue> signed_values = {
        LogValue::from_value(2.0),
        LogValue::from_value(-5.0),
        LogValue::zero(),
    };
    const Permutation rs = ranking_from_values(signed_values);
    CHECK(rs[1] == 0);
    CHECK(rs[2] == 1);
    CHECK(rs[0] == 2);
}

TEST_CASE("accuracy study rows are deterministic in fixed count mode") {
    const RngSpec rng{31337};
    const SamplingMode mode = SamplingMode::fixed_count(500);
    const RankingReport a = run_accuracy_study(5, 6, rng, {}, mode);
    const RankingReport b = run_accuracy_study(5, 6, rng, {}, mode, 2);
    REQUIRE(a.rows.size() == 6);
    REQUIRE(b.rows.size() == 6);
    CHECK(a.n == 5);
    CHECK(a.count == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(a.rows[i].index == i);
        CHECK(a.rows[i].true_perm.log_magnitude == b.rows[i].true_perm.log_magnitude);
        CHECK(a.rows[i].log_bethe == b.rows[i].log_bethe);
        CHECK(a.rows[i].log_sample == b.rows[i].log_sample);
        CHECK(a.rows[i].log_diag == b.rows[i].log_diag);
        CHECK(a.rows[i].sample_count == 500);
        CHECK(a.rows[i].log_bethe <= a.rows[i].true_perm.log_magnitude + 1e-9);
    }
    CHECK(a.kendall.at("bethe") == b.kendall.at("bethe"));
    CHECK(a.kendall.count("sampling") == 1);
    CHECK(a.kendall.count("det") == 1);
    CHECK(a.kendall.count("diag") == 1);
    for (const auto& [name, d] : a.kendall) {
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
}

TEST_CASE("time matched sampling draws at least one sample per matrix") {
    const RankingReport r = run_accuracy_study(4, 4, RngSpec{7});
    for (const AccuracyRow& row : r.rows) {
        CHECK(row.sample_count >= 1);
        CHECK(std::isfinite(row.log_sample));
        CHECK(row.bp_ms > 0.0);
    }
}

TEST_CASE("accuracy study rejects out-of-range arguments") {
    CHECK_THROWS_AS(run_accuracy_study(13, 5, RngSpec{0}), size_error);
    CHECK_THROWS_AS(run_accuracy_study(5, 1, RngSpec{0}), size_error);
    CHECK_THROWS_AS(run_accuracy_study(0, 5, RngSpec{0}), shape_error);
}

TEST_CASE("accuracy csv layout") {
    const RankingReport r = run_accuracy_study(4, 3, RngSpec{42}, {}, SamplingMode::fixed_count(200));
    std::ostringstream timed, untimed;
    write_accuracy_csv(r, timed);
    write_accuracy_csv(r, untimed, false);

    const auto tl = split_lines(timed.str());
    REQUIRE(tl.size() == 4);
    CHECK(tl[0] ==
          "index,n,log_true,log_bethe,log_sample,log_det,log_diag,bp_iters,bp_ms,sample_s");
    for (std::size_t i = 1; i < tl.size(); ++i) {
        const auto f = split_fields(tl[i]);
        REQUIRE(f.size() == 10);
        CHECK(f[0] == std::to_string(i - 1));
        CHECK(f[1] == "4");
        CHECK(std::stod(f[2]) == doctest::Approx(r.rows[i - 1].true_perm.log_magnitude));
        CHECK(std::stod(f[8]) > 0.0);
        CHECK(f[9] == "200");
    }

    const auto ul = split_lines(untimed.str());
    CHECK(ul[0] == tl[0]);
    for (std::size_t i = 1; i < ul.size(); ++i) {
        const auto f = split_fields(ul[i]);
        REQUIRE(f.size() == 10);
        CHECK(f[8].empty());
        // every other field is unchanged
        const auto g = split_fields(tl[i]);
        for (std::size_t k = 0; k < 10; ++k)
            if (k != 8) CHECK(f[k] == g[k]);
    }
}

TEST_CASE("runtime study reports one monotone row per size") {
    const RuntimeReport r = run_runtime_study(3, 7, 2, 3, RngSpec{5});
    REQUIRE(r.rows.size() == 3);
    CHECK(r.rows[0].n == 3);
    CHECK(r.rows[1].n == 5);
    CHECK(r.rows[2].n == 7);
    for (const RuntimeRow& row : r.rows) {
        CHECK(row.mean_total_ms > 0.0);
        CHECK(row.mean_message_ms > 0.0);
        CHECK(row.mean_bethe_ms >= 0.0);
        CHECK(row.mean_iterations >= 1.0);
        CHECK(row.per_iteration_ms > 0.0);
        CHECK(row.convergence_rate == 1.0);
    }

    std::ostringstream os;
    write_runtime_csv(r, os);
    const auto lines = split_lines(os.str());
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] ==
          "n,mean_total_ms,mean_message_ms,mean_bethe_ms,mean_iterations,per_iteration_ms,"
          "convergence_rate");
    CHECK(split_fields(lines[1])[0] == "3");
    CHECK(split_fields(lines[3])[0] == "7");

    CHECK_THROWS_AS(run_runtime_study(1, 5, 1, 2, RngSpec{0}), size_error);
    CHECK_THROWS_AS(run_runtime_study(5, 3, 1, 2, RngSpec{0}), size_error);
    CHECK_THROWS_AS(run_runtime_study(3, 5, 0, 2, RngSpec{0}), size_error);
    CHECK_THROWS_AS(run_runtime_study(3, 5, 1, 0, RngSpec{0}), size_error);
}

TEST_CASE("summary json carries the study parameters") {
    const RngSpec rng{99};
    BPConfig config;
    config.epsilon = 0.7;
    const SamplingMode mode = SamplingMode::fixed_count(300);
    const RankingReport r = run_accuracy_study(4, 5, rng, config, mode);
    const std::string payload = accuracy_summary_json(r, config, mode, rng);
    CHECK(payload.back() == '\n');

    const auto j = nlohmann::json::parse(payload);
    CHECK(j.at("n") == 4);
    CHECK(j.at("count") == 5);
    for (const char* method : {"bethe", "sampling", "det", "diag"}) {
        const double d = j.at("kendall").at(method).get<double>();
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }
    CHECK(j.at("config").at("epsilon") == 0.7);
    CHECK(j.at("config").at("sampling") == "fixed-count");
    CHECK(j.at("config").at("samples") == 300);
    CHECK(j.at("config").at("seed") == 99);
}
