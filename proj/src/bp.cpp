#include "betheperm/bp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "betheperm/errors.hpp"

namespace betheperm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Denominator subtractions that cancel more than 8 decimal digits are
// recomputed directly instead of trusted.
constexpr double kCancelGuard = 1e-8;

// Log messages are ratios; when the Bethe optimum sits on a vertex of the
// doubly-stochastic polytope (n = 2 always does) they escape to +-inf. The
// clamp keeps every exp() in range and parks such runs at the boundary,
// where the free energy equals the vertex value.
constexpr double kLogClamp = 300.0;

double log_sum_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// Precomputed log potentials of the effective (policy-applied) matrix:
// lphi[i*n + j] = ln phi(x_i = j) = ln phi(y_j = i) = 0.5 ln W_ij.
struct Potentials {
    std::size_t n;
    std::vector<double> lphi;

    explicit Potentials(const SquareMatrix& w) : n(w.size()), lphi(n * n) {
        for (std::size_t i = 0; i < n * n; ++i)
            lphi[i] = w.entries()[i] > 0.0 ? 0.5 * std::log(w.entries()[i]) : kNegInf;
    }

    double operator()(std::size_t i, std::size_t j) const { return lphi[i * n + j]; }
};

// One synchronous sweep. Raw updates for both directions read only the old
// state; dampening is applied in log space afterwards. Returns the summed
// |applied change|.
double sweep(const Potentials& pot, MessageState& s, double epsilon, std::vector<double>& nx,
             std::vector<double>& ny, std::vector<double>& t, std::vector<double>& e) {
    const std::size_t n = pot.n;

    auto fill_direction = [&](std::vector<double>& out, auto in_log, auto phi_of) {
        // out[a*n + b] = raw log message a -> b:
        //   lphi(a,b) - log sum_{c != b} exp(lphi(a,c) + in_log(c, a))
        for (std::size_t a = 0; a < n; ++a) {
            double hi = kNegInf;
            for (std::size_t c = 0; c < n; ++c) {
                t[c] = phi_of(a, c) + in_log(c, a);
                hi = std::max(hi, t[c]);
            }
            if (hi == kNegInf) throw numeric_error("message denominator vanished");
            double total = 0.0;
            for (std::size_t c = 0; c < n; ++c) {
                e[c] = std::exp(t[c] - hi);
                total += e[c];
            }
            for (std::size_t b = 0; b < n; ++b) {
                double denom = total - e[b];
                if (denom <= total * kCancelGuard) {
                    denom = 0.0;  // cancellation: rebuild the k != b sum exactly
                    for (std::size_t c = 0; c < n; ++c)
                        if (c != b) denom += e[c];
                }
                if (!(denom > 0.0))
                    throw numeric_error("message denominator underflowed to zero");
                const double raw = phi_of(a, b) - hi - std::log(denom);
                if (!std::isfinite(raw)) throw numeric_error("non-finite message update");
                out[a * n + b] = std::clamp(raw, -kLogClamp, kLogClamp);
            }
        }
    };

    // x_i -> y_j uses incoming y_k -> x_i and potentials phi(x_i = k) = lphi(i, k)
    fill_direction(
        nx, [&](std::size_t k, std::size_t i) { return s.y_to_x(k, i); },
        [&](std::size_t i, std::size_t k) { return pot(i, k); });
    // y_j -> x_i uses incoming x_l -> y_j and potentials phi(y_j = l) = lphi(l, j)
    fill_direction(
        ny, [&](std::size_t l, std::size_t j) { return s.x_to_y(l, j); },
        [&](std::size_t j, std::size_t l) { return pot(l, j); });

    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double& mx = s.x_to_y(i, j);
            const double dx = epsilon * (nx[i * n + j] - mx);
            mx += dx;
            residual += std::fabs(dx);
            double& my = s.y_to_x(j, i);
            const double dy = epsilon * (ny[j * n + i] - my);
            my += dy;
            residual += std::fabs(dy);
        }
    }
    return residual;
}

// Row-normalized exp of one log-weight row; returns the log normalizer.
double normalize_row(const double* logs, std::size_t n, double* out) {
    double hi = kNegInf;
    for (std::size_t c = 0; c < n; ++c) hi = std::max(hi, logs[c]);
    if (hi == kNegInf) throw numeric_error("singleton normalizer is zero");
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        out[c] = std::exp(logs[c] - hi);
        total += out[c];
    }
    for (std::size_t c = 0; c < n; ++c) out[c] /= total;
    return hi + std::log(total);
}

double bethe_free_energy_impl(const Potentials& pot, const MessageState& s) {
    const std::size_t n = pot.n;

    // tx[i*n + k] = ln u_k for row i (u_k = phi(x_i=k) * m_{y_k -> x_i});
    // ty[j*n + l] = ln v_l for column j (v_l = phi(y_j=l) * m_{x_l -> y_j}).
    std::vector<double> tx(n * n), ty(n * n), alpha(n, kNegInf), beta(n, kNegInf);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            tx[i * n + k] = pot(i, k) + s.y_to_x(k, i);
            alpha[i] = std::max(alpha[i], tx[i * n + k]);
        }
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t l = 0; l < n; ++l) {
            ty[j * n + l] = pot(l, j) + s.x_to_y(l, j);
            beta[j] = std::max(beta[j], ty[j * n + l]);
        }

    double f = 0.0;

    // Pairwise entropy. For pair (i, j) the joint belief is supported on the
    // matched state, weight a = W_ij, and the unmatched product states,
    // weights u_k v_l (k != j, l != i); Z_ij = a + (sum u)(sum v). The double
    // sum over (k, l) collapses into the per-side aggregates su, ru, sv, rv.
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double su = 0.0, ru = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == j) continue;
                const double w = std::exp(tx[i * n + k] - alpha[i]);
                if (w > 0.0) {
                    su += w;
                    ru += w * tx[i * n + k];
                }
            }
            double sv = 0.0, rv = 0.0;
            for (std::size_t l = 0; l < n; ++l) {
                if (l == i) continue;
                const double w = std::exp(ty[j * n + l] - beta[j]);
                if (w > 0.0) {
                    sv += w;
                    rv += w * ty[j * n + l];
                }
            }
            const double ln_a = 2.0 * pot(i, j);
            const double ln_uv = (su > 0.0 && sv > 0.0)
                                     ? alpha[i] + std::log(su) + beta[j] + std::log(sv)
                                     : kNegInf;
            const double ln_z = log_sum_exp(ln_a, ln_uv);
            if (ln_z == kNegInf) throw numeric_error("pair normalizer is zero");
            const double b_match = ln_a == kNegInf ? 0.0 : std::exp(ln_a - ln_z);
            const double b_rest = ln_uv == kNegInf ? 0.0 : std::exp(ln_uv - ln_z);
            if (b_match > 0.0) f += b_match * (ln_a - ln_z);
            // sum_{k,l} b_kl ln b_kl = b_rest * (E[ln u] + E[ln v] - ln Z)
            if (b_rest > 0.0) f += b_rest * (ru / su + rv / sv - ln_z);
        }
    }

    // Singleton terms: the potential of each variable is counted exactly once
    // through its singleton belief, and the tree-like counting subtracts
    // (n - 1) singleton entropies per variable.
    const auto nm1 = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double su = 0.0, ru = 0.0, pu = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = std::exp(tx[i * n + k] - alpha[i]);
            if (w > 0.0) {
                su += w;
                ru += w * tx[i * n + k];
                pu += w * pot(i, k);
            }
        }
        if (su <= 0.0) throw numeric_error("singleton normalizer is zero");
        f -= pu / su;                                       // - E[ln phi(x_i)]
        f -= nm1 * (ru / su - alpha[i] - std::log(su));     // -(n-1) sum b ln b
    }
    for (std::size_t j = 0; j < n; ++j) {
        double sv = 0.0, rv = 0.0, pv = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
            const double w = std::exp(ty[j * n + l] - beta[j]);
            if (w > 0.0) {
                sv += w;
                rv += w * ty[j * n + l];
                pv += w * pot(l, j);
            }
        }
        if (sv <= 0.0) throw numeric_error("singleton normalizer is zero");
        f -= pv / sv;
        f -= nm1 * (rv / sv - beta[j] - std::log(sv));
    }

    if (!std::isfinite(f)) throw numeric_error("non-finite Bethe free energy");
    return f;
}

}  // namespace

void BPConfig::validate() const {
    if (!(epsilon > 0.0) || epsilon > 1.0)
        throw domain_error("dampening epsilon must be in (0, 1]");
    if (!(tolerance > 0.0)) throw domain_error("tolerance must be positive");
    if (max_iterations < 1) throw domain_error("max_iterations must be positive");
    if (!(clamp_factor > 0.0)) throw domain_error("clamp_factor must be positive");
}

MessageState::MessageState(std::size_t n) : n_(n), lmx_(n * n, 0.0), lmy_(n * n, 0.0) {}

double BeliefState::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += matrix[i * n + j];
    return s;
}

double BeliefState::col_sum(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += matrix[i * n + j];
    return s;
}

SquareMatrix apply_zero_policy(const SquareMatrix& m, const BPConfig& config) {
    config.validate();
    const double mx = m.max_entry();
    if (mx == 0.0) throw domain_error("matrix is identically zero");
    bool has_zero = false;
    for (double v : m.entries())
        if (v == 0.0) has_zero = true;
    if (!has_zero) return m;
    if (config.zero_policy == ZeroEntryPolicy::reject)
        throw domain_error("matrix has a zero entry and the policy is reject");
    const double tau = config.clamp_factor * mx;
    std::vector<double> e(m.entries().begin(), m.entries().end());
    for (double& v : e) v = std::max(v, tau);
    return SquareMatrix(m.size(), std::move(e));
}

MessageState init_messages(const SquareMatrix& m, const BPConfig& config) {
    config.validate();
    if (config.zero_policy == ZeroEntryPolicy::reject)
        for (double v : m.entries())
            if (v == 0.0)
                throw domain_error("matrix has a zero entry and the policy is reject");
    MessageState s(m.size());
    if (config.init == MessageInit::random) {
        auto eng = make_engine(RngSpec{config.init_seed});
        const std::size_t n = m.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s.x_to_y(i, j) = 2.0 * uniform_unit(eng) - 1.0;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i)
                s.y_to_x(j, i) = 2.0 * uniform_unit(eng) - 1.0;
    }
    return s;
}

std::pair<MessageState, double> update_messages(const SquareMatrix& m, const MessageState& state,
                                                const BPConfig& config) {
    config.validate();
    if (state.size() != m.size()) throw shape_error("message state does not match the matrix");
    if (m.size() < 2)
        throw numeric_error("message update needs n >= 2 (no k != j terms exist)");
    const SquareMatrix w = apply_zero_policy(m, config);
    const Potentials pot(w);
    MessageState next = state;
    const std::size_t n = m.size();
    std::vector<double> nx(n * n), ny(n * n), t(n), e(n);
    const double residual = sweep(pot, next, config.epsilon, nx, ny, t, e);
    return {std::move(next), residual};
}

std::pair<MessageState, BetheResult> run_bp(const SquareMatrix& m, const BPConfig& config,
                                            std::vector<double>* residual_trace) {
    config.validate();
    if (m.size() < 2) throw numeric_error("run_bp needs n >= 2; use estimate_permanent");
    const SquareMatrix w = apply_zero_policy(m, config);
    const Potentials pot(w);
    MessageState state = init_messages(w, config);
    const std::size_t n = w.size();
    std::vector<double> nx(n * n), ny(n * n), t(n), e(n);

    BetheResult result;
    const auto t0 = std::chrono::steady_clock::now();
    for (int iter = 0; iter < config.max_iterations; ++iter) {
        const double residual = sweep(pot, state, config.epsilon, nx, ny, t, e);
        result.iterations = iter + 1;
        result.residual = residual;
        if (residual_trace) residual_trace->push_back(residual);
        if (residual <= config.tolerance) {
            result.converged = true;
            break;
        }
    }
    const auto t1 = std::chrono::steady_clock::now();
    result.f_bethe = bethe_free_energy_impl(pot, state);
    const auto t2 = std::chrono::steady_clock::now();
    result.log_estimate = -result.f_bethe;
    result.message_seconds = std::chrono::duration<double>(t1 - t0).count();
    result.bethe_seconds = std::chrono::duration<double>(t2 - t1).count();
    return {std::move(state), result};
}

BeliefState compute_beliefs(const SquareMatrix& m, const MessageState& state) {
    if (state.size() != m.size()) throw shape_error("message state does not match the matrix");
    const Potentials pot(m);
    const std::size_t n = m.size();
    BeliefState b;
    b.n = n;
    b.matrix.resize(n * n);
    b.log_row_normalizer.resize(n);
    b.log_col_normalizer.resize(n);

    std::vector<double> logs(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) logs[j] = pot(i, j) + state.y_to_x(j, i);
        b.log_row_normalizer[i] = normalize_row(logs.data(), n, b.matrix.data() + i * n);
    }
    std::vector<double> col(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) logs[i] = pot(i, j) + state.x_to_y(i, j);
        b.log_col_normalizer[j] = normalize_row(logs.data(), n, col.data());
    }
    return b;
}

double log_pair_normalizer(const SquareMatrix& m, const MessageState& state, std::size_t i,
                           std::size_t j) {
    const Potentials pot(m);
    const std::size_t n = m.size();
    double lu = kNegInf, lv = kNegInf;
    for (std::size_t k = 0; k < n; ++k)
        if (k != j) lu = log_sum_exp(lu, pot(i, k) + state.y_to_x(k, i));
    for (std::size_t l = 0; l < n; ++l)
        if (l != i) lv = log_sum_exp(lv, pot(l, j) + state.x_to_y(l, j));
    const double ln_a = m(i, j) > 0.0 ? std::log(m(i, j)) : kNegInf;
    return log_sum_exp(ln_a, lu + lv);
}

double bethe_free_energy(const SquareMatrix& m, const MessageState& state) {
    if (state.size() != m.size()) throw shape_error("message state does not match the matrix");
    return bethe_free_energy_impl(Potentials(m), state);
}

BetheResult estimate_permanent(const SquareMatrix& m, const BPConfig& config) {
    config.validate();
    if (m.size() == 1) {
        BetheResult r;
        r.log_estimate = m(0, 0) > 0.0 ? std::log(m(0, 0)) : kNegInf;
        r.f_bethe = -r.log_estimate;
        r.converged = true;
        return r;
    }
    return run_bp(m, config).second;
}

std::vector<double> extract_belief_matrix(const BeliefState& beliefs) {
    return beliefs.matrix;
}

SinkhornResult sinkhorn_scale(const SquareMatrix& m, double tol, int max_iter) {
    if (!(tol > 0.0)) throw domain_error("tolerance must be positive");
    const std::size_t n = m.size();
    std::vector<double> a(m.entries().begin(), m.entries().end());

    auto max_deviation = [&] {
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double rs = 0.0;
            for (std::size_t j = 0; j < n; ++j) rs += a[i * n + j];
            dev = std::max(dev, std::fabs(rs - 1.0));
        }
        for (std::size_t j = 0; j < n; ++j) {
            double cs = 0.0;
            for (std::size_t i = 0; i < n; ++i) cs += a[i * n + j];
            dev = std::max(dev, std::fabs(cs - 1.0));
        }
        return dev;
    };

    for (std::size_t i = 0; i < n; ++i) {
        double rs = 0.0;
        for (std::size_t j = 0; j < n; ++j) rs += a[i * n + j];
        if (rs == 0.0) throw domain_error("matrix has an all-zero row");
    }
    for (std::size_t j = 0; j < n; ++j) {
        double cs = 0.0;
        for (std::size_t i = 0; i < n; ++i) cs += a[i * n + j];
        if (cs == 0.0) throw domain_error("matrix has an all-zero column");
    }

    SinkhornResult result{SquareMatrix(n, a), 0, false, 0.0};
    double dev = max_deviation();
    int iter = 0;
    while (dev > tol && iter < max_iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double rs = 0.0;
            for (std::size_t j = 0; j < n; ++j) rs += a[i * n + j];
            for (std::size_t j = 0; j < n; ++j) a[i * n + j] /= rs;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double cs = 0.0;
            for (std::size_t i = 0; i < n; ++i) cs += a[i * n + j];
            for (std::size_t i = 0; i < n; ++i) a[i * n + j] /= cs;
        }
        ++iter;
        dev = max_deviation();
    }
    result.scaled = SquareMatrix(n, std::move(a));
    result.iterations = iter;
    result.converged = dev <= tol;
    result.max_deviation = dev;
    return result;
}

}  // namespace betheperm
