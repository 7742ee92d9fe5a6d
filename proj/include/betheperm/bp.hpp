#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "betheperm/matrix.hpp"

namespace betheperm {

enum class MessageInit { uniform, random };
enum class ZeroEntryPolicy { reject, clamp };

struct BPConfig {
    double epsilon = 0.5;        // log-space dampening rate, in (0, 1]
    double tolerance = 1e-10;    // convergence threshold on sum_{2n^2} |delta ln m|
    int max_iterations = 10000;
    MessageInit init = MessageInit::uniform;
    std::uint64_t init_seed = 0;  // used when init == random
    ZeroEntryPolicy zero_policy = ZeroEntryPolicy::clamp;
    double clamp_factor = 1e-12;  // zero entries are raised to clamp_factor * max(W)

    void validate() const;  // throws domain_error on an out-of-range field
};

// The 2n^2 reduced ratio messages, stored in log domain. x_to_y(i, j) is the
// message x_i -> y_j (the match/not ratio); y_to_x(j, i) the message y_j -> x_i.
class MessageState {
public:
    explicit MessageState(std::size_t n);

    std::size_t size() const { return n_; }
    double x_to_y(std::size_t i, std::size_t j) const { return lmx_[i * n_ + j]; }
    double y_to_x(std::size_t j, std::size_t i) const { return lmy_[j * n_ + i]; }
    double& x_to_y(std::size_t i, std::size_t j) { return lmx_[i * n_ + j]; }
    double& y_to_x(std::size_t j, std::size_t i) { return lmy_[j * n_ + i]; }

    bool operator==(const MessageState& other) const = default;

private:
    std::size_t n_;
    std::vector<double> lmx_;  // [i*n + j]
    std::vector<double> lmy_;  // [j*n + i]
};

// Singleton pseudo-marginals. matrix holds B row-major; every row sums to 1
// by construction, columns approach 1 at convergence.
struct BeliefState {
    std::size_t n = 0;
    std::vector<double> matrix;              // B[i*n + j] = b(x_i = j)
    std::vector<double> log_row_normalizer;  // log Z_i of b(x_i)
    std::vector<double> log_col_normalizer;  // log Z_j of b(y_j)

    double operator()(std::size_t i, std::size_t j) const { return matrix[i * n + j]; }
    double row_sum(std::size_t i) const;
    double col_sum(std::size_t j) const;
};

struct BetheResult {
    double f_bethe = 0.0;       // Bethe free energy at the final state
    double log_estimate = 0.0;  // = -f_bethe
    int iterations = 0;
    bool converged = false;
    double residual = 0.0;  // final sum of applied |delta ln m|
    double message_seconds = 0.0;
    double bethe_seconds = 0.0;
};

struct SinkhornResult {
    SquareMatrix scaled;
    int iterations = 0;
    bool converged = false;
    double max_deviation = 0.0;  // largest |row or column sum - 1| at exit
};

// Returns the matrix the engine actually iterates on: under clamp, entries
// below tau = clamp_factor * max(W) are raised to tau; under reject, any zero
// entry throws domain_error. Throws domain_error on an all-zero matrix.
SquareMatrix apply_zero_policy(const SquareMatrix& m, const BPConfig& config);

// Uniform init sets all log-messages to 0; random init draws them i.i.d.
// uniform on [-1, 1] from config.init_seed.
MessageState init_messages(const SquareMatrix& m, const BPConfig& config);

// One synchronous sweep: every raw message is computed from the old state in
// both directions, then dampened in log space. The residual is the summed
// |applied change| over all 2n^2 messages. O(n^2) per sweep.
std::pair<MessageState, double> update_messages(const SquareMatrix& m, const MessageState& state,
                                                const BPConfig& config);

// Iterates update_messages until residual <= tolerance or max_iterations.
// Non-convergence is reported in the result, not thrown. The zero-entry
// policy is applied once on entry; the returned messages belong to that
// effective matrix (see apply_zero_policy). Pass residual_trace to record the
// residual after each sweep.
std::pair<MessageState, BetheResult> run_bp(const SquareMatrix& m, const BPConfig& config,
                                            std::vector<double>* residual_trace = nullptr);

// Singleton beliefs of the given state. m must be the matrix the messages
// were produced for (after any clamping).
BeliefState compute_beliefs(const SquareMatrix& m, const MessageState& state);

// Log of the pairwise normalizer Z_ij = W_ij + (sum_{k != j} u_k)(sum_{l != i} v_l).
double log_pair_normalizer(const SquareMatrix& m, const MessageState& state, std::size_t i,
                           std::size_t j);

// Bethe free energy of the belief state induced by the messages, evaluated in
// factorized form (pairwise tables are never materialized). O(n^3).
double bethe_free_energy(const SquareMatrix& m, const MessageState& state);

// per(W) ~= exp(-F_Bethe) at the BP fixed point, returned in log domain.
// n == 1 short-circuits to ln W_00.
BetheResult estimate_permanent(const SquareMatrix& m, const BPConfig& config = {});

// Row-major copy of B.
std::vector<double> extract_belief_matrix(const BeliefState& beliefs);

// Alternating row/column normalization until every row and column sum is
// within tol of 1, or max_iter passes. Requires no all-zero row or column.
SinkhornResult sinkhorn_scale(const SquareMatrix& m, double tol, int max_iter);

}  // namespace betheperm
