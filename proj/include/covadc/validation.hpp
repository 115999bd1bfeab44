#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <covadc/channel.hpp>
#include <covadc/likelihood.hpp>
#include <covadc/k_estimator.hpp>
#include <covadc/oracle.hpp>
#include <covadc/preamble.hpp>
#include <covadc/quantizer.hpp>
#include <covadc/rng.hpp>

namespace covadc {

// One line of a validation suite: pass iff value <= bound (or >= bound when
// `at_least`).
struct CheckResult {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool at_least = false;

    bool pass() const { return at_least ? value >= bound : value <= bound; }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace checks {

// Empirical per-dimension power of ybar vs K*beta/2 + sigma^2/2.
inline CheckResult power_check_one(const std::string& name,
                                   const StackedCovariance& cov,
                                   int L, int K, double beta, double sigma2,
                                   int draws, Rng& rng)
{
    const int N = cov.N();
    const Preamble preamble = Preamble::random(L, N, rng);
    const ActivityPattern pattern = draw_activity(N, K, rng);
    const ChannelSampler sampler(cov);
    const double lambda = theoretical_power(K, beta, sigma2);

    Eigen::VectorXd acc = Eigen::VectorXd::Zero(2 * L * cov.M());
    for (int d = 0; d < draws; ++d) {
        const auto sig = synthesize_received(preamble, pattern, beta, sampler.draw(rng),
                                             sigma2, rng);
        acc += sig.ybar.cwiseAbs2();
    }
    acc /= draws;
    const double max_rel = ((acc.array() - lambda).abs() / lambda).maxCoeff();
    return {name, max_rel, 0.03};
}

inline std::vector<CheckResult> power_check(std::uint64_t seed, int draws = 100000)
{
    Rng rng = trial_rng(seed, 0);
    std::vector<CheckResult> out;
    out.push_back(power_check_one("power iid N=100 K=10 L=4 M=4",
                                  StackedCovariance::iid(100, 4), 4, 10, 1.0, 1.0, draws, rng));
    out.push_back(power_check_one(
        "power exp(c=0.5) N=100 K=10 L=4 M=4",
        StackedCovariance::shared(exponential_covariance(0.5, 4), 100), 4, 10, 1.0, 1.0,
        draws, rng));
    return out;
}

// ybar assembled by real expansion of Y vs Sbar gammabar^{1/2} hbar + zbar
// built from the same draw by real arithmetic only.
inline CheckResult real_expansion_equivalence(std::uint64_t seed, int instances = 100)
{
    Rng rng = trial_rng(seed, 1);
    double worst = 0.0;
    for (int it = 0; it < instances; ++it) {
        std::uniform_int_distribution<int> dim(1, 6);
        const int L = dim(rng), N = dim(rng), M = dim(rng);
        const Preamble preamble = Preamble::random(L, N, rng);
        const ActivityPattern pattern = draw_activity(N, std::min(N, 2), rng);
        const double beta = 0.7;
        const Eigen::MatrixXcd H = standard_complex_normal_matrix(N, M, rng);
        const Eigen::MatrixXcd Z = standard_complex_normal_matrix(L, M, rng);

        const Eigen::VectorXd gamma_sqrt = gamma_from_pattern(pattern, beta).cwiseSqrt();
        const Eigen::MatrixXcd Y =
            preamble.matrix() * gamma_sqrt.asDiagonal() * H + Z;
        const Eigen::VectorXd via_complex = real_expand_received(Y);

        // real route: ybar_m = S_hat gamma_hat^{1/2} h_hat_m + z_hat_m
        const Eigen::MatrixXd s_hat = preamble.real_expanded();
        Eigen::VectorXd gamma_hat_sqrt(2 * N);
        gamma_hat_sqrt << gamma_sqrt, gamma_sqrt;
        Eigen::VectorXd via_real(2 * L * M);
        for (int m = 0; m < M; ++m) {
            Eigen::VectorXd h_hat(2 * N), z_hat(2 * L);
            h_hat << H.col(m).real(), H.col(m).imag();
            z_hat << Z.col(m).real(), Z.col(m).imag();
            via_real.segment(2 * L * m, 2 * L) =
                s_hat * gamma_hat_sqrt.asDiagonal() * h_hat + z_hat;
        }
        worst = std::max(worst, (via_complex - via_real).cwiseAbs().maxCoeff());
    }
    return {"real-expansion equivalence", worst, 1e-12};
}

// Empirical covariance of ybar vs the blockwise Sigma, and blockwise vs the
// dense oracle.
inline std::vector<CheckResult> covariance_check(std::uint64_t seed, int draws = 100000)
{
    Rng rng = trial_rng(seed, 2);
    const int N = 8, M = 4, L = 4, K = 3;
    const double beta = 1.0, sigma2 = 1.0;
    const auto cov = StackedCovariance::shared(exponential_covariance(0.5, M), N);
    const Preamble preamble = Preamble::random(L, N, rng);
    const ActivityPattern pattern = draw_activity(N, K, rng);
    const Eigen::VectorXd gamma = gamma_from_pattern(pattern, beta);
    const ChannelSampler sampler(cov);

    const Eigen::MatrixXd sigma = build_sigma(preamble.real_expanded(), cov, gamma, sigma2).mat;

    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(2 * L * M, 2 * L * M);
    for (int d = 0; d < draws; ++d) {
        const auto sig = synthesize_received(preamble, pattern, beta, sampler.draw(rng),
                                             sigma2, rng);
        acc.noalias() += sig.ybar * sig.ybar.transpose();
    }
    acc /= draws;
    const double rel_frob = (acc - sigma).norm() / sigma.norm();

    // blockwise vs dense, i.i.d. and correlated, random gamma
    Rng rng2 = trial_rng(seed, 3);
    double worst = 0.0;
    for (int it = 0; it < 20; ++it) {
        std::uniform_real_distribution<double> u(0.0, 2.0);
        Eigen::VectorXd g(N);
        for (int i = 0; i < N; ++i) g(i) = u(rng2);
        const Preamble p = Preamble::random(L, N, rng2);
        for (const auto& c : {StackedCovariance::iid(N, M), cov}) {
            const Eigen::MatrixXd lhs = densify(build_sigma(p.real_expanded(), c, g, sigma2));
            const Eigen::MatrixXd rhs = dense_sigma(p.real_expanded(), c, g, sigma2);
            worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
        }
    }
    return {{"empirical covariance rel Frobenius", rel_frob, 0.05},
            {"blockwise vs dense Sigma", worst, 1e-10}};
}

// grad_log_g vs central finite differences over random instances, i.i.d.
// and correlated.
inline CheckResult detector_grad_check(std::uint64_t seed, int instances = 100)
{
    Rng rng = trial_rng(seed, 4);
    double worst = 0.0;
    for (int it = 0; it < instances; ++it) {
        std::uniform_int_distribution<int> ln(2, 6), ll(1, 3), lm(1, 3);
        const int N = ln(rng), L = ll(rng), M = lm(rng);
        const Preamble preamble = Preamble::random(L, N, rng);
        const bool correlated = it % 2 == 1;
        const StackedCovariance cov =
            correlated ? StackedCovariance::shared(
                             exponential_covariance({0.5, it % 4 == 3 ? 0.3 : 0.0}, M), N)
                       : StackedCovariance::iid(N, M);
        const DetectionModel model{preamble.real_expanded(), cov, 1.0};
        std::uniform_real_distribution<double> u(0.0, 1.5);
        Eigen::VectorXd gamma(N);
        for (int i = 0; i < N; ++i) gamma(i) = it % 3 == 0 && i % 2 == 0 ? 0.0 : u(rng);
        const Eigen::VectorXd x = standard_normal_vector(2 * L * M, rng) * 1.5;

        const Eigen::VectorXd g = grad_log_g(x, gamma, model);
        auto eval = [&](int n, double v) {
            Eigen::VectorXd gn = gamma;
            gn(n) = v;
            return log_g(x, gn, model, 1.0);
        };
        for (int n = 0; n < N; ++n) {
            const double h = 1e-4 * std::max(gamma(n), 1.0);
            // Richardson-extrapolated differences; one-sided at the boundary
            auto diff = [&](double hh) {
                if (gamma(n) >= hh)
                    return (eval(n, gamma(n) + hh) - eval(n, gamma(n) - hh)) / (2 * hh);
                return (-3.0 * eval(n, gamma(n)) + 4.0 * eval(n, gamma(n) + hh) -
                        eval(n, gamma(n) + 2 * hh)) / (2 * hh);
            };
            const double fd = (4.0 * diff(h / 2) - diff(h)) / 3.0;
            const double rel = std::abs(g(n) - fd) / std::max(std::abs(fd), 1.0);
            worst = std::max(worst, rel);
        }
    }
    return {"detector gradient vs finite differences", worst, 1e-5};
}

// Scalar Phase I derivative vs central finite differences.
inline CheckResult scalar_grad_check(std::uint64_t seed, int instances = 100)
{
    Rng rng = trial_rng(seed, 5);
    double worst = 0.0;
    for (int it = 0; it < instances; ++it) {
        std::uniform_int_distribution<int> ll(1, 3), lm(1, 4);
        const int L = ll(rng), M = lm(rng);
        const Eigen::VectorXcd s = Preamble::random(L, 1, rng).matrix().col(0);
        const PhaseOneObjective obj(s, M, 0.8, 1.2);
        std::uniform_real_distribution<double> uk(0.1, 50.0);
        const double K = uk(rng);
        const Eigen::VectorXd x = standard_normal_vector(2 * L * M, rng) * 2.0;

        const double g = obj.grad(x, K);
        const double h = 1e-4 * std::max(K, 1.0);
        auto diff = [&](double hh) {
            return (obj.log_density(x, K + hh) - obj.log_density(x, K - hh)) / (2 * hh);
        };
        const double fd = (4.0 * diff(h / 2) - diff(h)) / 3.0;
        worst = std::max(worst, std::abs(g - fd) / std::max(std::abs(fd), 1.0));
    }
    return {"scalar K gradient vs finite differences", worst, 1e-6};
}

inline std::vector<CheckResult> grad_check(std::uint64_t seed)
{
    return {detector_grad_check(seed), scalar_grad_check(seed)};
}

// Validates the expectation rewrite on a tiny instance: the average of
// sampled stochastic gradients grad g = exp(gbar) grad gbar matches the
// tensor-grid quadrature gradient, and the quadrature value at gamma = 0
// matches the closed-form product of normal CDF differences.
inline std::vector<CheckResult> oracle_check(std::uint64_t seed, int samples = 100000)
{
    Rng rng = trial_rng(seed, 6);
    const int N = 2, L = 1, M = 2, B = 2;
    const double beta = 1.0, sigma2 = 1.0;
    const Preamble preamble = Preamble::random(L, N, rng);
    const StackedCovariance cov = StackedCovariance::iid(N, M);
    const DetectionModel model{preamble.real_expanded(), cov, sigma2};

    const ActivityPattern pattern = draw_activity(N, 1, rng);
    const ChannelSampler sampler(cov);
    const auto sig = synthesize_received(preamble, pattern, beta, sampler.draw(rng),
                                         sigma2, rng);
    const auto cb = QuantizerCodebook::designed(1.0, beta, sigma2, 2.0, B);
    const Eigen::VectorXd yq = cb.quantize(sig.ybar);

    std::uniform_real_distribution<double> u(0.2, 1.2);
    Eigen::VectorXd gamma(N);
    for (int i = 0; i < N; ++i) gamma(i) = u(rng);

    // self-convergence of the quadrature value
    const double v4 = brute_force_quantized_likelihood(yq, cb, model, gamma, 4).value;
    const double v8 = brute_force_quantized_likelihood(yq, cb, model, gamma, 8).value;
    const auto q16 = brute_force_quantized_likelihood(yq, cb, model, gamma, 16);
    const double conv_ratio = std::abs(q16.value - v8) / std::max(std::abs(v8 - v4), 1e-300);

    // sampled stochastic gradients vs quadrature gradient
    const GaussianObjective obj(model, gamma);
    const double log_px = -static_cast<double>(yq.size()) * std::log(cb.delta());
    Eigen::VectorXd mean_grad = Eigen::VectorXd::Zero(N);
    for (int s = 0; s < samples; ++s) {
        const Eigen::VectorXd x = cb.sample_uniform_in_cells(yq, rng);
        const double gbar = obj.log_density(x) - log_px;
        mean_grad += std::exp(gbar) * obj.grad(x);
    }
    mean_grad /= samples;
    const double cosine =
        mean_grad.dot(q16.gradient) / (mean_grad.norm() * q16.gradient.norm());

    // gamma = 0: Sigma = (sigma^2/2) I, dimensions independent. Richardson
    // extrapolation removes the midpoint rule's O(h^2) bias.
    const double v0_32 = brute_force_quantized_likelihood(
        yq, cb, model, Eigen::VectorXd::Zero(N), 32).value;
    const double v0_64 = brute_force_quantized_likelihood(
        yq, cb, model, Eigen::VectorXd::Zero(N), 64).value;
    const double v0 = (4.0 * v0_64 - v0_32) / 3.0;
    double closed = 1.0;
    const double sd = std::sqrt(sigma2 / 2.0);
    for (Eigen::Index i = 0; i < yq.size(); ++i) {
        const Cell c = cb.truncated_cell(cb.interval_index(yq(i)));
        closed *= normal_cdf(c.hi / sd) - normal_cdf(c.lo / sd);
    }
    const double closed_rel = std::abs(v0 - closed) / closed;

    return {{"quadrature self-convergence ratio", conv_ratio, 0.5},
            {"sampled-gradient vs quadrature cosine", cosine, 0.99, true},
            {"gamma=0 quadrature vs product of CDFs", closed_rel, 1e-6}};
}

} // namespace checks
} // namespace covadc
