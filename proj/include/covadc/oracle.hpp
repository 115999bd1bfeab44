#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include <covadc/likelihood.hpp>
#include <covadc/quantizer.hpp>

namespace covadc {

// Small-dimension reference implementations. These deliberately build the
// dense objects the production code avoids, so the two routes can be
// compared numerically in tests and `oracle-check`.

// Dense Sigma = Sbar C gammabar Sbar^T + (sigma^2/2) I with every factor
// materialized. O((NM)^2) memory; keep N, M small.
inline Eigen::MatrixXd dense_sigma(const Eigen::MatrixXd& s_hat,
                                   const StackedCovariance& cov,
                                   const Eigen::VectorXd& gamma,
                                   double sigma2)
{
    const int N = cov.N();
    const int M = cov.M();
    const Eigen::Index twoL = s_hat.rows();

    // C: 2M x 2M grid of diagonal N x N blocks
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * N * M, 2 * N * M);
    for (int r = 0; r < 2 * M; ++r)
        for (int rbar = 0; rbar < 2 * M; ++rbar)
            C.block(N * r, N * rbar, N, N) = cov.cross_block_diag(r, rbar).asDiagonal();

    Eigen::MatrixXd sbar = Eigen::MatrixXd::Zero(twoL * M, 2 * N * M);
    Eigen::MatrixXd gammabar = Eigen::MatrixXd::Zero(2 * N * M, 2 * N * M);
    Eigen::VectorXd gamma_hat(2 * N);
    gamma_hat << gamma, gamma;
    for (int m = 0; m < M; ++m) {
        sbar.block(twoL * m, 2 * N * m, twoL, 2 * N) = s_hat;
        gammabar.block(2 * N * m, 2 * N * m, 2 * N, 2 * N) = gamma_hat.asDiagonal();
    }

    Eigen::MatrixXd sigma = sbar * C * gammabar * sbar.transpose();
    sigma.diagonal().array() += 0.5 * sigma2;
    return sigma;
}

// Expand an iid-path SigmaMatrix (or pass through a dense one) to 2LM x 2LM.
inline Eigen::MatrixXd densify(const SigmaMatrix& sigma)
{
    if (!sigma.iid_blocks) return sigma.mat;
    const Eigen::Index b = sigma.mat.rows();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(b * sigma.M, b * sigma.M);
    for (int m = 0; m < sigma.M; ++m) out.block(b * m, b * m, b, b) = sigma.mat;
    return out;
}

struct QuadratureResult {
    double value = 0.0;        // integral of p(x | gamma, S) over the J-cells
    Eigen::VectorXd gradient;  // integral of grad p over the J-cells
};

// Tensor-grid midpoint quadrature of the truncated quantized likelihood and
// its gradient. Cost is grid_points_per_dim^(2LM); usable only for
// 2LM <= ~8.
inline QuadratureResult brute_force_quantized_likelihood(const Eigen::VectorXd& yq,
                                                         const QuantizerCodebook& cb,
                                                         const DetectionModel& model,
                                                         const Eigen::VectorXd& gamma,
                                                         int grid_points_per_dim)
{
    const int dim = static_cast<int>(yq.size());
    if (dim > 8) throw std::invalid_argument("brute_force_quantized_likelihood: dimension too large");
    if (grid_points_per_dim < 1) throw std::invalid_argument("grid_points_per_dim must be >= 1");

    std::vector<Cell> cells(dim);
    for (int i = 0; i < dim; ++i) cells[i] = cb.truncated_cell(cb.interval_index(yq(i)));

    const GaussianObjective obj(model, gamma);
    const double h = cb.delta() / grid_points_per_dim;
    const double weight = std::pow(h, dim);

    QuadratureResult out;
    out.gradient = Eigen::VectorXd::Zero(model.N());
    std::vector<int> idx(dim, 0);
    Eigen::VectorXd x(dim);
    while (true) {
        for (int i = 0; i < dim; ++i) x(i) = cells[i].lo + (idx[i] + 0.5) * h;
        const double p = std::exp(obj.log_density(x));
        out.value += weight * p;
        out.gradient += (weight * p) * obj.grad(x);
        int carry = 0;
        while (carry < dim && ++idx[carry] == grid_points_per_dim) {
            idx[carry] = 0;
            ++carry;
        }
        if (carry == dim) break;
    }
    return out;
}

} // namespace covadc
