#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include <covadc/likelihood.hpp>
#include <covadc/quantizer.hpp>
#include <covadc/rng.hpp>

namespace covadc {

struct DetectorConfig {
    double epsilon = 1e-3;
    int max_iterations = 100000;
    // step size theta_i; defaults to i^{-1/2}
    std::function<double(int)> step = [](int i) { return 1.0 / std::sqrt(static_cast<double>(i)); };
    bool record_history = false; // keep per-iteration gamma snapshots
};

struct DetectionResult {
    Eigen::VectorXd gamma_hat;
    int iterations = 0;
    std::vector<double> eta_trace;
    bool converged = false;
    std::vector<Eigen::VectorXd> history; // filled when record_history
};

// NSGD (normalized stochastic gradient) on the quantized likelihood:
// resample x uniformly over the truncated cells of yQ, ascend gbar along the
// unit-normalized gradient, project onto gamma >= 0. The normalized
// direction of grad g equals that of grad gbar since exp(gbar) > 0, so
// exp(gbar) is never evaluated.
inline DetectionResult nsgd_detect(const Eigen::VectorXd& yq,
                                   const QuantizerCodebook& cb,
                                   const DetectionModel& model,
                                   const DetectorConfig& config,
                                   Rng& rng)
{
    const int N = model.N();
    DetectionResult result;
    result.gamma_hat = Eigen::VectorXd::Zero(N);
    if (config.record_history) result.history.push_back(result.gamma_hat);

    for (int i = 1; i <= config.max_iterations; ++i) {
        result.iterations = i;
        const Eigen::VectorXd x = cb.sample_uniform_in_cells(yq, rng);
        const GaussianObjective obj(model, result.gamma_hat);
        const Eigen::VectorXd g = obj.grad(x);
        const double norm = g.norm();
        if (norm < 1e-300) continue; // direction undefined; resample
        const Eigen::VectorXd next =
            (result.gamma_hat + (config.step(i) / norm) * g).cwiseMax(0.0);
        const double eta = (next - result.gamma_hat).lpNorm<1>() / N;
        result.gamma_hat = next;
        result.eta_trace.push_back(eta);
        if (config.record_history) result.history.push_back(result.gamma_hat);
        if (eta < config.epsilon) {
            result.converged = true;
            break;
        }
    }
    return result;
}

// Infinite-resolution baseline: projected gradient ascent on the exact
// Gaussian log-likelihood of ybar with Armijo backtracking (halving,
// c = 1e-4). Objective is monotone nondecreasing by construction.
inline DetectionResult infinite_adc_detect(const Eigen::VectorXd& ybar,
                                           const DetectionModel& model,
                                           const DetectorConfig& config,
                                           std::optional<Eigen::VectorXd> gamma0 = std::nullopt)
{
    constexpr double armijo = 1e-4;
    const int N = model.N();
    DetectionResult result;
    result.gamma_hat = gamma0.value_or(Eigen::VectorXd::Zero(N));
    if (config.record_history) result.history.push_back(result.gamma_hat);

    double f = GaussianObjective(model, result.gamma_hat).log_density(ybar);
    double t = 1.0;
    for (int i = 1; i <= config.max_iterations; ++i) {
        result.iterations = i;
        const Eigen::VectorXd g = GaussianObjective(model, result.gamma_hat).grad(ybar);
        Eigen::VectorXd next;
        double fnext = f;
        bool accepted = false;
        for (int halvings = 0; halvings < 60; ++halvings) {
            next = (result.gamma_hat + t * g).cwiseMax(0.0);
            fnext = GaussianObjective(model, next).log_density(ybar);
            if (fnext >= f + armijo * g.dot(next - result.gamma_hat)) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break; // no admissible step; stationary to precision
        const double eta = (next - result.gamma_hat).lpNorm<1>() / N;
        result.gamma_hat = next;
        f = fnext;
        result.eta_trace.push_back(eta);
        if (config.record_history) result.history.push_back(result.gamma_hat);
        if (eta < config.epsilon) {
            result.converged = true;
            break;
        }
        t = std::min(t * 2.0, 1e6); // allow the step to grow back
    }
    return result;
}

// alpha_hat_n = 1 iff gamma_hat_n > threshold.
inline Eigen::VectorXi decide_activity(const Eigen::VectorXd& gamma_hat, double threshold)
{
    return (gamma_hat.array() > threshold).cast<int>();
}

} // namespace covadc
