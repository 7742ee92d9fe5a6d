#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "betheperm/bench.hpp"
#include "betheperm/bp.hpp"
#include "betheperm/errors.hpp"
#include "betheperm/exact.hpp"
#include "betheperm/kernel.hpp"
#include "betheperm/matrix.hpp"
#include "betheperm/matrix_io.hpp"
#include "betheperm/sampler.hpp"

namespace {

using nlohmann::ordered_json;
using namespace betheperm;

std::string read_input(const std::string& path) {
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin),
                           std::istreambuf_iterator<char>());
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error("cannot open input file: " + path);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

SquareMatrix load_matrix(const std::string& path, const std::string& format) {
    return parse_matrix(read_input(path), parse_format(format));
}

// exp(log) only when it fits a finite double
void put_linear(ordered_json& j, const char* key, double log_value) {
    if (log_value < 709.0) {
        const double v = std::exp(log_value);
        if (std::isfinite(v)) j[key] = v;
    }
}

ordered_json log_value_json(const LogValue& v) {
    ordered_json j;
    j["sign"] = v.sign;
    j["log_magnitude"] = v.is_zero() ? ordered_json(nullptr) : ordered_json(v.log_magnitude);
    return j;
}

struct CommonBpFlags {
    double epsilon = 0.5;
    double tol = 1e-10;
    int max_iters = 10000;
    std::string init = "uniform";
    std::uint64_t init_seed = 0;
    bool reject_zeros = false;
    bool clamp = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--epsilon", epsilon, "log-space dampening factor")
            ->check(CLI::Range(1e-9, 1.0));
        cmd->add_option("--tol", tol, "convergence threshold on the summed message change");
        cmd->add_option("--max-iters", max_iters, "iteration cap");
        cmd->add_option("--init", init, "message initialization")
            ->check(CLI::IsMember({"uniform", "random"}));
        cmd->add_option("--init-seed", init_seed, "seed for random initialization");
        auto* r = cmd->add_flag("--reject-zeros", reject_zeros, "error out on zero entries");
        cmd->add_flag("--clamp", clamp, "clamp zero entries to 1e-12 * max entry (default)")
            ->excludes(r);
    }

    BPConfig config() const {
        BPConfig c;
        c.epsilon = epsilon;
        c.tolerance = tol;
        c.max_iterations = max_iters;
        c.init = init == "random" ? MessageInit::random : MessageInit::uniform;
        c.init_seed = init_seed;
        c.zero_policy = reject_zeros ? ZeroEntryPolicy::reject : ZeroEntryPolicy::clamp;
        return c;
    }
};

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

int run(int argc, char** argv) {
    CLI::App app{"Bethe-permanent toolkit: belief-propagation estimates, exact oracles, "
                 "sampling baselines, benchmarks and set kernels"};
    app.require_subcommand(1);

    std::string input = "-";
    std::string format = "dense-text";
    bool no_timing = false;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    auto add_input = [&](CLI::App* cmd) {
        cmd->add_option("--input", input, "matrix file, - for stdin");
        cmd->add_option("--format", format, "matrix text format")
            ->check(CLI::IsMember({"dense-text", "csv", "json"}));
    };

    // approx
    auto* approx = app.add_subcommand("approx", "estimate the permanent by belief propagation");
    add_input(approx);
    CommonBpFlags bp_flags;
    bp_flags.attach(approx);
    bool emit_beliefs = false;
    approx->add_flag("--emit-beliefs", emit_beliefs, "include the belief matrix in the output");
    approx->add_flag("--no-timing", no_timing, "omit wall-time fields");
    approx->callback([&] {
        const SquareMatrix m = load_matrix(input, format);
        const BPConfig config = bp_flags.config();
        ordered_json beliefs = ordered_json::array();
        BetheResult r;
        if (m.size() == 1) {
            r = estimate_permanent(m, config);
            if (emit_beliefs) beliefs.push_back(ordered_json::array({1.0}));
        } else {
            const SquareMatrix effective = apply_zero_policy(m, config);
            auto [state, result] = run_bp(effective, config);
            r = result;
            if (emit_beliefs) {
                const BeliefState b = compute_beliefs(effective, state);
                for (std::size_t i = 0; i < b.n; ++i) {
                    ordered_json row = ordered_json::array();
                    for (std::size_t c = 0; c < b.n; ++c) row.push_back(b(i, c));
                    beliefs.push_back(row);
                }
            }
        }
        ordered_json j;
        j["command"] = "approx";
        j["n"] = m.size();
        j["log_estimate"] = r.log_estimate;
        put_linear(j, "estimate", r.log_estimate);
        j["f_bethe"] = r.f_bethe;
        j["converged"] = r.converged;
        j["iterations"] = r.iterations;
        j["residual"] = r.residual;
        if (!no_timing) {
            j["message_ms"] = r.message_seconds * 1000.0;
            j["bethe_ms"] = r.bethe_seconds * 1000.0;
        }
        if (emit_beliefs) j["beliefs"] = beliefs;
        emit(j);
    });

    // exact
    auto* exact = app.add_subcommand("exact", "exact permanent (Ryser or brute force)");
    add_input(exact);
    std::string exact_method = "ryser";
    exact->add_option("--method", exact_method, "algorithm")
        ->check(CLI::IsMember({"ryser", "brute"}));
    exact->callback([&] {
        const SquareMatrix m = load_matrix(input, format);
        const LogValue v =
            exact_method == "brute" ? brute_force_permanent(m) : ryser_permanent(m);
        ordered_json j;
        j["command"] = "exact";
        j["method"] = exact_method;
        j["n"] = m.size();
        j["sign"] = v.sign;
        j["log_estimate"] = v.is_zero() ? ordered_json(nullptr) : ordered_json(v.log_magnitude);
        if (v.is_zero()) j["estimate"] = 0.0;
        else if (v.log_magnitude < 709.0) j["estimate"] = v.sign * std::exp(v.log_magnitude);
        emit(j);
    });

    // sample
    auto* sample = app.add_subcommand("sample", "Monte Carlo permanent estimate");
    add_input(sample);
    std::uint64_t samples = 100000;
    double budget_ms = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t trace_stride = 0;
    auto* samples_opt = sample->add_option("--samples", samples, "sample-count budget");
    sample->add_option("--budget-ms", budget_ms, "wall-time budget in milliseconds")
        ->excludes(samples_opt);
    sample->add_option("--seed", seed, "rng seed");
    sample->add_option("--trace-stride", trace_stride,
                       "record the running log estimate every N samples");
    sample->add_flag("--no-timing", no_timing, "omit wall-time fields");
    sample->callback([&] {
        const SquareMatrix m = load_matrix(input, format);
        const SampleBudget budget = budget_ms > 0.0 ? SampleBudget::wall_time(budget_ms)
                                                    : SampleBudget::count(samples);
        const SampleEstimate e = sample_permanent(m, budget, RngSpec{seed}, trace_stride);
        ordered_json j;
        j["command"] = "sample";
        j["n"] = m.size();
        j["log_estimate"] = e.log_estimate;
        put_linear(j, "estimate", e.log_estimate);
        j["samples"] = e.samples_used;
        j["seed"] = seed;
        if (!no_timing) j["elapsed_ms"] = e.elapsed_seconds * 1000.0;
        if (!e.running_mean_trace.empty()) j["running_log_estimate"] = e.running_mean_trace;
        emit(j);
    });

    // baseline
    auto* baseline =
        app.add_subcommand("baseline", "determinant or scaled-diagonal estimate");
    add_input(baseline);
    std::string baseline_method = "det";
    baseline->add_option("--method", baseline_method, "baseline kind")
        ->check(CLI::IsMember({"det", "diag"}));
    baseline->callback([&] {
        const SquareMatrix m = load_matrix(input, format);
        const LogValue v = baseline_method == "det" ? determinant(m) : scaled_diagonal(m);
        ordered_json j;
        j["command"] = "baseline";
        j["method"] = baseline_method;
        j["n"] = m.size();
        j["value"] = log_value_json(v);
        emit(j);
    });

    // bench-accuracy
    auto* acc = app.add_subcommand("bench-accuracy",
                                   "rank random matrices by every method against the truth");
    std::size_t acc_n = 8;
    std::size_t acc_count = 200;
    std::uint64_t acc_seed = 0;
    std::uint64_t acc_samples = 0;
    std::string csv_path;
    bool full_scale = false;
    CommonBpFlags acc_bp;
    acc->add_option("--n", acc_n, "matrix size (exact oracle limit 12)");
    auto* count_opt = acc->add_option("--count", acc_count, "number of matrices");
    acc->add_option("--seed", acc_seed, "rng seed");
    acc->add_option("--samples", acc_samples,
                    "fixed sampler budget; omit for time-matched sampling");
    acc->add_option("--csv", csv_path, "write per-matrix rows to this file");
    acc->add_option("--jobs", jobs, "parallel matrix workers");
    acc->add_flag("--full-scale", full_scale, "paper-size matrix counts");
    acc->add_flag("--no-timing", no_timing, "blank the timing column in the CSV");
    acc_bp.attach(acc);
    acc->callback([&] {
        if (full_scale && !*count_opt) acc_count = acc_n >= 10 ? 200 : 1000;
        const SamplingMode mode = acc_samples > 0 ? SamplingMode::fixed_count(acc_samples)
                                                  : SamplingMode::time_matched();
        const RngSpec rng{acc_seed};
        const RankingReport report =
            run_accuracy_study(acc_n, acc_count, rng, acc_bp.config(), mode, jobs);
        if (!csv_path.empty()) {
            std::ofstream out(csv_path, std::ios::binary);
            if (!out) throw parse_error("cannot open csv output file: " + csv_path);
            write_accuracy_csv(report, out, !no_timing);
        }
        std::cout << accuracy_summary_json(report, acc_bp.config(), mode, rng);
    });

    // bench-runtime
    auto* rt = app.add_subcommand("bench-runtime", "BP wall time and iteration scaling");
    std::size_t n_min = 5, n_max = 50, step = 5, trials = 10;
    std::uint64_t rt_seed = 0;
    std::string rt_csv;
    CommonBpFlags rt_bp;
    rt->add_option("--n-min", n_min, "smallest matrix size");
    rt->add_option("--n-max", n_max, "largest matrix size");
    rt->add_option("--step", step, "size increment");
    rt->add_option("--trials", trials, "matrices per size");
    rt->add_option("--seed", rt_seed, "rng seed");
    rt->add_option("--csv", rt_csv, "write per-size rows to this file");
    rt_bp.attach(rt);
    rt->callback([&] {
        const RuntimeReport report =
            run_runtime_study(n_min, n_max, step, trials, RngSpec{rt_seed}, rt_bp.config());
        if (!rt_csv.empty()) {
            std::ofstream out(rt_csv, std::ios::binary);
            if (!out) throw parse_error("cannot open csv output file: " + rt_csv);
            write_runtime_csv(report, out);
        }
        ordered_json rows = ordered_json::array();
        for (const RuntimeRow& r : report.rows) {
            ordered_json row;
            row["n"] = r.n;
            row["mean_total_ms"] = r.mean_total_ms;
            row["mean_message_ms"] = r.mean_message_ms;
            row["mean_bethe_ms"] = r.mean_bethe_ms;
            row["mean_iterations"] = r.mean_iterations;
            row["per_iteration_ms"] = r.per_iteration_ms;
            row["convergence_rate"] = r.convergence_rate;
            rows.push_back(row);
        }
        ordered_json j;
        j["command"] = "bench-runtime";
        j["rows"] = rows;
        emit(j);
    });

    // kernel
    auto* kernel = app.add_subcommand("kernel", "permanent kernel between point sets");
    std::string kernel_input = "-";
    double sigma = 0.5;
    bool gram = false;
    bool normalize = false;
    CommonBpFlags kernel_bp;
    kernel->add_option("--input", kernel_input,
                       "JSON file {\"sets\": [[[x, ...], ...], ...]}, - for stdin");
    kernel->add_option("--sigma", sigma, "RBF bandwidth");
    kernel->add_flag("--gram", gram, "full Gram matrix with a PSD check");
    kernel->add_flag("--normalize", normalize, "map features onto the unit box first");
    kernel->add_option("--jobs", jobs, "parallel Gram workers");
    kernel_bp.attach(kernel);
    kernel->callback([&] {
        ordered_json doc;
        try {
            doc = ordered_json::parse(read_input(kernel_input));
        } catch (const nlohmann::json::exception& e) {
            throw parse_error(std::string("invalid kernel input JSON: ") + e.what());
        }
        if (!doc.is_object() || !doc.contains("sets") || !doc["sets"].is_array())
            throw parse_error("kernel input must be an object with a \"sets\" array");
        std::vector<PointSet> sets;
        for (const auto& s : doc["sets"]) {
            if (!s.is_array()) throw parse_error("every set must be an array of points");
            std::vector<std::vector<double>> pts;
            for (const auto& p : s) {
                if (!p.is_array()) throw parse_error("every point must be an array of reals");
                std::vector<double> coords;
                for (const auto& c : p) {
                    if (!c.is_number()) throw parse_error("coordinates must be numbers");
                    coords.push_back(c.get<double>());
                }
                pts.push_back(std::move(coords));
            }
            sets.emplace_back(std::move(pts));
        }
        if (normalize) sets = normalize_to_unit_box(sets);
        ordered_json j;
        j["command"] = "kernel";
        j["m"] = sets.size();
        j["n"] = sets.empty() ? 0 : sets[0].count();
        j["d"] = sets.empty() ? 0 : sets[0].dim();
        j["sigma"] = sigma;
        if (!gram) {
            if (sets.size() != 2)
                throw domain_error("pair mode needs exactly two sets; use --gram otherwise");
            const double lk = permanent_kernel(sets[0], sets[1], sigma, kernel_bp.config());
            j["log_kernel"] = lk;
            put_linear(j, "kernel", lk);
        } else {
            const GramReport report = gram_psd_check(sets, sigma, kernel_bp.config(), jobs);
            j["log_scale"] = report.log_scale;
            j["min_eigenvalue"] = report.min_eigenvalue;
            j["psd"] = report.psd;
            j["jitter_used"] = report.jitter_used;
            ordered_json rows = ordered_json::array();
            for (std::size_t r = 0; r < report.m; ++r) {
                ordered_json row = ordered_json::array();
                for (std::size_t c = 0; c < report.m; ++c)
                    row.push_back(report.gram[r * report.m + c]);
                rows.push_back(row);
            }
            j["gram"] = rows;
        }
        emit(j);
    });

    // gen
    auto* gen = app.add_subcommand("gen", "generate a random test matrix");
    std::size_t gen_n = 8;
    std::uint64_t gen_seed = 0;
    double lo = 0.0, hi = 50.0;
    std::string gen_format = "dense-text";
    std::string gen_output = "-";
    gen->add_option("--n", gen_n, "matrix size");
    gen->add_option("--seed", gen_seed, "rng seed");
    gen->add_option("--low", lo, "lower entry bound");
    gen->add_option("--high", hi, "upper entry bound");
    gen->add_option("--format", gen_format, "matrix text format")
        ->check(CLI::IsMember({"dense-text", "csv", "json"}));
    gen->add_option("--output", gen_output, "output file, - for stdout");
    gen->callback([&] {
        const SquareMatrix m = random_uniform_matrix(gen_n, lo, hi, RngSpec{gen_seed});
        const std::string text = serialize_matrix(m, parse_format(gen_format));
        if (gen_output == "-") {
            std::cout << text;
        } else {
            std::ofstream out(gen_output, std::ios::binary);
            if (!out) throw parse_error("cannot open output file: " + gen_output);
            out << text;
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const parse_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const shape_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const size_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
