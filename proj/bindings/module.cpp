#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "betheperm/bench.hpp"
#include "betheperm/bp.hpp"
#include "betheperm/errors.hpp"
#include "betheperm/exact.hpp"
#include "betheperm/kernel.hpp"
#include "betheperm/matrix.hpp"
#include "betheperm/sampler.hpp"

namespace py = pybind11;
using namespace betheperm;

namespace {

SquareMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) throw shape_error("matrix must be square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return SquareMatrix(n, std::move(flat));
}

std::vector<std::vector<double>> to_rows(const SquareMatrix& m) {
    std::vector<std::vector<double>> rows(m.size(), std::vector<double>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) rows[i][j] = m(i, j);
    return rows;
}

std::vector<PointSet> to_sets(const std::vector<std::vector<std::vector<double>>>& raw) {
    std::vector<PointSet> sets;
    sets.reserve(raw.size());
    for (const auto& s : raw) sets.emplace_back(s);
    return sets;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Bethe-permanent estimation: belief propagation, exact oracles, sampling "
                "baselines and point-set kernels";

    py::register_exception<parse_error>(mod, "ParseError", PyExc_ValueError);
    py::register_exception<shape_error>(mod, "ShapeError", PyExc_ValueError);
    py::register_exception<domain_error>(mod, "DomainError", PyExc_ValueError);
    py::register_exception<size_error>(mod, "SizeError", PyExc_ValueError);
    py::register_exception<numeric_error>(mod, "NumericError", PyExc_ArithmeticError);

    py::enum_<MessageInit>(mod, "MessageInit")
        .value("uniform", MessageInit::uniform)
        .value("random", MessageInit::random);

    py::enum_<ZeroEntryPolicy>(mod, "ZeroEntryPolicy")
        .value("reject", ZeroEntryPolicy::reject)
        .value("clamp", ZeroEntryPolicy::clamp);

    py::class_<BPConfig>(mod, "BPConfig")
        .def(py::init<>())
        .def_readwrite("epsilon", &BPConfig::epsilon)
        .def_readwrite("tolerance", &BPConfig::tolerance)
        .def_readwrite("max_iterations", &BPConfig::max_iterations)
        .def_readwrite("init", &BPConfig::init)
        .def_readwrite("init_seed", &BPConfig::init_seed)
        .def_readwrite("zero_policy", &BPConfig::zero_policy)
        .def_readwrite("clamp_factor", &BPConfig::clamp_factor);

    py::class_<BetheResult>(mod, "BetheResult")
        .def_readonly("f_bethe", &BetheResult::f_bethe)
        .def_readonly("log_estimate", &BetheResult::log_estimate)
        .def_readonly("iterations", &BetheResult::iterations)
        .def_readonly("converged", &BetheResult::converged)
        .def_readonly("residual", &BetheResult::residual)
        .def_readonly("message_seconds", &BetheResult::message_seconds)
        .def_readonly("bethe_seconds", &BetheResult::bethe_seconds)
        .def("__repr__", [](const BetheResult& r) {
            return "BetheResult(log_estimate=" + std::to_string(r.log_estimate) +
                   ", iterations=" + std::to_string(r.iterations) +
                   ", converged=" + (r.converged ? std::string("True") : std::string("False")) +
                   ")";
        });

    py::class_<LogValue>(mod, "LogValue")
        .def_readonly("log_magnitude", &LogValue::log_magnitude)
        .def_readonly("sign", &LogValue::sign)
        .def("value", &LogValue::value)
        .def("is_zero", &LogValue::is_zero)
        .def("__repr__", [](const LogValue& v) {
            return "LogValue(sign=" + std::to_string(v.sign) +
                   ", log_magnitude=" + std::to_string(v.log_magnitude) + ")";
        });

    py::class_<SampleEstimate>(mod, "SampleEstimate")
        .def_readonly("log_estimate", &SampleEstimate::log_estimate)
        .def_readonly("samples_used", &SampleEstimate::samples_used)
        .def_readonly("elapsed_seconds", &SampleEstimate::elapsed_seconds)
        .def_readonly("running_mean_trace", &SampleEstimate::running_mean_trace);

    py::class_<GramReport>(mod, "GramReport")
        .def_readonly("m", &GramReport::m)
        .def_readonly("gram", &GramReport::gram)
        .def_readonly("log_scale", &GramReport::log_scale)
        .def_readonly("min_eigenvalue", &GramReport::min_eigenvalue)
        .def_readonly("psd", &GramReport::psd)
        .def_readonly("jitter_used", &GramReport::jitter_used);

    mod.def(
        "estimate_permanent",
        [](const std::vector<std::vector<double>>& m, const BPConfig& config) {
            return estimate_permanent(to_matrix(m), config);
        },
        py::arg("matrix"), py::arg("config") = BPConfig{},
        "Bethe free-energy estimate of the permanent via belief propagation");

    mod.def(
        "belief_matrix",
        [](const std::vector<std::vector<double>>& m, const BPConfig& config) {
            const SquareMatrix w = apply_zero_policy(to_matrix(m), config);
            auto [state, result] = run_bp(w, config);
            (void)result;
            const BeliefState b = compute_beliefs(w, state);
            std::vector<std::vector<double>> rows(b.n, std::vector<double>(b.n));
            for (std::size_t i = 0; i < b.n; ++i)
                for (std::size_t j = 0; j < b.n; ++j) rows[i][j] = b(i, j);
            return rows;
        },
        py::arg("matrix"), py::arg("config") = BPConfig{},
        "Row-normalized singleton beliefs after running BP to convergence");

    mod.def(
        "brute_force_permanent",
        [](const std::vector<std::vector<double>>& m) {
            return brute_force_permanent(to_matrix(m));
        },
        py::arg("matrix"));

    mod.def(
        "ryser_permanent",
        [](const std::vector<std::vector<double>>& m) { return ryser_permanent(to_matrix(m)); },
        py::arg("matrix"));

    mod.def(
        "determinant",
        [](const std::vector<std::vector<double>>& m) { return determinant(to_matrix(m)); },
        py::arg("matrix"));

    mod.def(
        "scaled_diagonal",
        [](const std::vector<std::vector<double>>& m) { return scaled_diagonal(to_matrix(m)); },
        py::arg("matrix"));

    mod.def(
        "sample_permanent",
        [](const std::vector<std::vector<double>>& m, std::uint64_t samples, std::uint64_t seed,
           double budget_ms) {
            const SampleBudget budget =
                budget_ms > 0.0 ? SampleBudget::wall_time(budget_ms) : SampleBudget::count(samples);
            return sample_permanent(to_matrix(m), budget, RngSpec{seed});
        },
        py::arg("matrix"), py::arg("samples") = 100000, py::arg("seed") = 0,
        py::arg("budget_ms") = 0.0,
        "Uniform-permutation Monte Carlo estimate; budget_ms > 0 switches to a time budget");

    mod.def(
        "sinkhorn_scale",
        [](const std::vector<std::vector<double>>& m, double tol, int max_iter) {
            return to_rows(sinkhorn_scale(to_matrix(m), tol, max_iter).scaled);
        },
        py::arg("matrix"), py::arg("tol") = 1e-10, py::arg("max_iter") = 10000,
        "Alternating row/column normalization to a doubly stochastic matrix");

    mod.def(
        "rbf_subkernel_matrix",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
           double sigma) { return to_rows(rbf_subkernel_matrix(PointSet(a), PointSet(b), sigma)); },
        py::arg("a"), py::arg("b"), py::arg("sigma"));

    mod.def(
        "permanent_kernel",
        [](const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
           double sigma, const BPConfig& config) {
            return permanent_kernel(PointSet(a), PointSet(b), sigma, config);
        },
        py::arg("a"), py::arg("b"), py::arg("sigma"), py::arg("config") = BPConfig{},
        "Log Bethe-permanent of the RBF subkernel matrix between two point sets");

    mod.def(
        "gram_psd_check",
        [](const std::vector<std::vector<std::vector<double>>>& sets, double sigma,
           const BPConfig& config, unsigned jobs) {
            return gram_psd_check(to_sets(sets), sigma, config, jobs);
        },
        py::arg("sets"), py::arg("sigma"), py::arg("config") = BPConfig{}, py::arg("jobs") = 1,
        "Pairwise permanent-kernel Gram matrix with a minimum-eigenvalue PSD diagnosis");

    mod.def(
        "kendall_distance",
        [](const std::vector<int>& r1, const std::vector<int>& r2) {
            return kendall_distance(Permutation(r1), Permutation(r2));
        },
        py::arg("r1"), py::arg("r2"),
        "Normalized pairwise-disagreement distance between two rankings");

    mod.def(
        "random_matrix",
        [](std::size_t n, double low, double high, std::uint64_t seed) {
            return to_rows(random_uniform_matrix(n, low, high, RngSpec{seed}));
        },
        py::arg("n"), py::arg("low") = 0.0, py::arg("high") = 50.0, py::arg("seed") = 0);
}
