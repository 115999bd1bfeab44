#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <covadc/quantizer.hpp>
#include <covadc/rng.hpp>

namespace covadc {

struct ScalarNsgdConfig {
    double epsilon = 1e-3;
    int max_iterations = 500;
    std::function<double(int)> step = [](int i) { return 1.0 / std::sqrt(static_cast<double>(i)); };
};

struct EstimatorConfig {
    int L_N = 1;            // Phase I symbol budget
    double K0 = 1.0;        // initial guess K_hat^(0)
    int N = 0;              // projection upper bound
    double beta = 1.0;
    double sigma2 = 1.0;
    double rho = 2.0;
    int B = 4;
    ScalarNsgdConfig inner;
    bool accumulate_symbols = false; // PEA step i may reuse symbols 1..i
};

struct EstimationTrace {
    std::vector<double> k_hats; // K_hat^(0) .. K_hat^(L_N)
    std::vector<double> deltas; // codebook step size used at each stage
    std::vector<int> per_step_iterations;

    double final_k() const { return k_hats.back(); }
};

// Per-antenna covariance of the Phase I signal:
// Sigma_m = (K beta / 2)(s1 s1^T + s1N s1N^T) + (sigma^2/2) I.
// beta is written out explicitly so the diagonal stays K beta/2 + sigma^2/2.
inline Eigen::MatrixXd sigma_m_of_k(double K,
                                    const Eigen::VectorXd& s_hat_1,
                                    const Eigen::VectorXd& s_hat_1N,
                                    double beta,
                                    double sigma2)
{
    Eigen::MatrixXd sigma = 0.5 * K * beta *
        (s_hat_1 * s_hat_1.transpose() + s_hat_1N * s_hat_1N.transpose());
    sigma.diagonal().array() += 0.5 * sigma2;
    return sigma;
}

// Scalar-parameter likelihood for Phase I: the per-antenna blocks are
// independent with a common covariance Sigma_m(K), so one small Cholesky
// serves all M antennas.
class PhaseOneObjective {
public:
    // s: identical preamble sent by every device (length L_N)
    PhaseOneObjective(Eigen::VectorXcd s, int M, double beta, double sigma2)
        : M_(M), beta_(beta), sigma2_(sigma2)
    {
        const int L = static_cast<int>(s.size());
        s_hat_1_.resize(2 * L);
        s_hat_1_ << s.real(), s.imag();
        s_hat_1N_.resize(2 * L);
        s_hat_1N_ << -s.imag(), s.real();
    }

    int block_dim() const { return static_cast<int>(s_hat_1_.size()); }
    int M() const { return M_; }

    // gbar(x, K) up to the -log p(x) constant; x is length 2 L_N M in the
    // standard antenna-blocked layout.
    double log_density(const Eigen::VectorXd& x, double K) const
    {
        const auto [llt, logdet] = factor(K);
        const Eigen::Map<const Eigen::MatrixXd> X(x.data(), block_dim(), M_);
        const double quad = (X.cwiseProduct(llt.solve(X))).sum();
        const double ml = static_cast<double>(M_) * (block_dim() / 2);
        return -0.5 * quad - 0.5 * M_ * logdet - ml * std::log(2.0 * std::numbers::pi);
    }

    // d gbar / dK via dSigma_m/dK = (beta/2)(s1 s1^T + s1N s1N^T).
    double grad(const Eigen::VectorXd& x, double K) const
    {
        const auto [llt, logdet] = factor(K);
        const Eigen::Map<const Eigen::MatrixXd> X(x.data(), block_dim(), M_);
        const Eigen::MatrixXd U = llt.solve(X);
        const Eigen::VectorXd w1 = s_hat_1_.transpose() * U;
        const Eigen::VectorXd w2 = s_hat_1N_.transpose() * U;
        const double quad = 0.25 * beta_ * (w1.squaredNorm() + w2.squaredNorm());
        const Eigen::VectorXd v1 = llt.solve(s_hat_1_);
        const Eigen::VectorXd v2 = llt.solve(s_hat_1N_);
        const double trace = 0.25 * beta_ * M_ * (s_hat_1_.dot(v1) + s_hat_1N_.dot(v2));
        return quad - trace;
    }

    const Eigen::VectorXd& s_hat_1() const { return s_hat_1_; }
    const Eigen::VectorXd& s_hat_1N() const { return s_hat_1N_; }

private:
    std::pair<Eigen::LLT<Eigen::MatrixXd>, double> factor(double K) const
    {
        if (K < 0.0) throw std::invalid_argument("PhaseOneObjective: K must be >= 0");
        Eigen::LLT<Eigen::MatrixXd> llt(sigma_m_of_k(K, s_hat_1_, s_hat_1N_, beta_, sigma2_));
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("PhaseOneObjective: Cholesky failed");
        const double logdet =
            2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
        return {std::move(llt), logdet};
    }

    int M_;
    double beta_, sigma2_;
    Eigen::VectorXd s_hat_1_, s_hat_1N_;
};

struct ScalarNsgdResult {
    double k_hat = 0.0;
    int iterations = 0;
    bool converged = false;
};

// NSGD on the scalar problem: the normalized gradient is the sign of
// d gbar/dK, the iterate is projected onto [0, N].
inline ScalarNsgdResult nsgd_estimate_k(const Eigen::VectorXd& yq,
                                        const QuantizerCodebook& cb,
                                        const PhaseOneObjective& obj,
                                        double k0,
                                        double n_max,
                                        const ScalarNsgdConfig& config,
                                        Rng& rng)
{
    ScalarNsgdResult result;
    result.k_hat = std::clamp(k0, 0.0, n_max);
    for (int i = 1; i <= config.max_iterations; ++i) {
        result.iterations = i;
        const Eigen::VectorXd x = cb.sample_uniform_in_cells(yq, rng);
        const double g = obj.grad(x, result.k_hat);
        if (std::abs(g) < 1e-300) continue;
        const double next =
            std::clamp(result.k_hat + config.step(i) * (g > 0.0 ? 1.0 : -1.0), 0.0, n_max);
        const double eta = std::abs(next - result.k_hat);
        result.k_hat = next;
        if (eta < config.epsilon) {
            result.converged = true;
            break;
        }
    }
    return result;
}

// Deterministic fallback for regression tests: golden-section maximization
// of gbar evaluated at the truncated-cell midpoints of yq.
inline double golden_section_estimate_k(const Eigen::VectorXd& yq,
                                        const QuantizerCodebook& cb,
                                        const PhaseOneObjective& obj,
                                        double n_max,
                                        double tol = 1e-6)
{
    Eigen::VectorXd mid(yq.size());
    for (Eigen::Index i = 0; i < yq.size(); ++i) {
        const Cell c = cb.truncated_cell(cb.interval_index(yq(i)));
        mid(i) = 0.5 * (c.lo + c.hi);
    }
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = n_max;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = obj.log_density(mid, x1), f2 = obj.log_density(mid, x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = obj.log_density(mid, x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = obj.log_density(mid, x1);
        }
    }
    return 0.5 * (a + b);
}

// One-shot estimator: a single codebook designed from K0 quantizes the whole
// Phase I signal (all L_N symbols), then one scalar NSGD solve from K0.
inline ScalarNsgdResult oea_estimate(const Eigen::VectorXd& ybar_analog,
                                     const Eigen::VectorXcd& s,
                                     int M,
                                     const EstimatorConfig& config,
                                     Rng& rng)
{
    const PhaseOneObjective obj(s, M, config.beta, config.sigma2);
    const QuantizerCodebook cb =
        QuantizerCodebook::designed(config.K0, config.beta, config.sigma2, config.rho, config.B);
    const Eigen::VectorXd yq = cb.quantize(ybar_analog);
    return nsgd_estimate_k(yq, cb, obj, config.K0, config.N, config.inner, rng);
}

// Progressive estimator (one symbol per stage): redesign the codebook from
// K_hat^(i-1), quantize symbol i's 2M-dimensional signal, re-solve the
// scalar problem warm-started at K_hat^(i-1).
//
// `receive_symbol(i)` returns the analog received vector (length 2M) for
// Phase I symbol i in 0..L_N-1.
inline EstimationTrace pea_estimate(const std::function<Eigen::VectorXd(int)>& receive_symbol,
                                    const Eigen::VectorXcd& s,
                                    int M,
                                    const EstimatorConfig& config,
                                    Rng& rng)
{
    if (static_cast<int>(s.size()) < config.L_N)
        throw std::invalid_argument("pea_estimate: preamble shorter than L_N");
    EstimationTrace trace;
    trace.k_hats.push_back(config.K0);

    std::vector<Eigen::VectorXd> received; // analog symbols seen so far
    for (int i = 0; i < config.L_N; ++i) {
        received.push_back(receive_symbol(i));
        const double k_prev = trace.k_hats.back();
        const QuantizerCodebook cb =
            QuantizerCodebook::designed(k_prev, config.beta, config.sigma2, config.rho, config.B);
        trace.deltas.push_back(cb.delta());

        Eigen::VectorXcd s_used;
        Eigen::VectorXd y_used;
        if (config.accumulate_symbols) {
            // stack symbols 0..i antenna-major: per antenna the 2(i+1)
            // entries [Re y_0..i ; Im y_0..i]
            const int Lc = i + 1;
            s_used = s.head(Lc);
            y_used.resize(2 * Lc * M);
            for (int m = 0; m < M; ++m)
                for (int l = 0; l <= i; ++l) {
                    y_used(2 * Lc * m + l) = received[l](2 * m);
                    y_used(2 * Lc * m + Lc + l) = received[l](2 * m + 1);
                }
        } else {
            s_used = s.segment(i, 1);
            y_used = received.back();
        }
        const PhaseOneObjective obj(s_used, M, config.beta, config.sigma2);
        const auto step = nsgd_estimate_k(cb.quantize(y_used), cb, obj, k_prev,
                                          config.N, config.inner, rng);
        trace.k_hats.push_back(step.k_hat);
        trace.per_step_iterations.push_back(step.iterations);
    }
    return trace;
}

} // namespace covadc
