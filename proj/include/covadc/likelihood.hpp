#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <covadc/signal_model.hpp>

namespace covadc {

// Everything the likelihood machinery needs about one detection instance.
struct DetectionModel {
    Eigen::MatrixXd s_hat;   // 2L x 2N real-expanded preamble
    StackedCovariance cov;   // channel covariance structure
    double sigma2;

    int N() const { return cov.N(); }
    int M() const { return cov.M(); }
    int L() const { return static_cast<int>(s_hat.rows()) / 2; }
};

// Gaussian log-likelihood core at a fixed gamma: Cholesky factorization of
// Sigma, the log-integrand gbar and its gradient in gamma. The i.i.d. path
// factors only the repeated 2L x 2L block.
class GaussianObjective {
public:
    GaussianObjective(const DetectionModel& model, const Eigen::VectorXd& gamma)
        : model_(&model), sigma_(build_sigma(model.s_hat, model.cov, gamma, model.sigma2))
    {
        llt_.compute(sigma_.mat);
        if (llt_.info() != Eigen::Success)
            throw std::runtime_error("GaussianObjective: Cholesky failed (Sigma not SPD)");
        const Eigen::VectorXd d = llt_.matrixL().toDenseMatrix().diagonal();
        block_logdet_ = 2.0 * d.array().log().sum();
    }

    const SigmaMatrix& sigma() const { return sigma_; }

    double logdet() const
    {
        return sigma_.iid_blocks ? sigma_.M * block_logdet_ : block_logdet_;
    }

    // -1/2 x^T Sigma^{-1} x - 1/2 log|Sigma| - ML log(2 pi); the constant
    // -log p(x) of gbar is data-independent and added by the caller.
    double log_density(const Eigen::VectorXd& x) const
    {
        const auto X = as_blocks(x);
        const double quad = (X.cwiseProduct(llt_.solve(X))).sum();
        const double ml = static_cast<double>(model_->M()) * model_->L();
        return -0.5 * quad - 0.5 * logdet() - ml * std::log(2.0 * std::numbers::pi);
    }

    // d gbar / d gamma_n = 1/2 u^T (dSigma/dgamma_n) u - 1/2 tr(Sigma^{-1}
    // dSigma/dgamma_n), u = Sigma^{-1} x, with dSigma/dgamma_n assembled from
    // the columns a_n, b_n of S_hat and the diagonal C blocks.
    Eigen::VectorXd grad(const Eigen::VectorXd& x) const
    {
        const int N = model_->N();
        const int M = model_->M();
        const int twoL = 2 * model_->L();
        const auto A = model_->s_hat.leftCols(N);
        const auto B = model_->s_hat.rightCols(N);

        if (sigma_.iid_blocks) {
            // dSigma_block/dgamma_n = (a_n a_n^T + b_n b_n^T) / 2
            const Eigen::MatrixXd U = llt_.solve(as_blocks(x));      // 2L x M
            const Eigen::MatrixXd W = model_->s_hat.transpose() * U; // 2N x M
            const Eigen::MatrixXd V = llt_.solve(model_->s_hat);     // 2L x 2N
            const Eigen::VectorXd wsq = W.rowwise().squaredNorm();
            const Eigen::VectorXd t =
                (model_->s_hat.cwiseProduct(V)).colwise().sum().transpose();
            return 0.25 * (wsq.head(N) + wsq.tail(N)) -
                   0.25 * static_cast<double>(M) * (t.head(N) + t.tail(N));
        }

        const Eigen::VectorXd u = llt_.solve(x);
        const Eigen::Map<const Eigen::MatrixXd> Ub(u.data(), twoL, M);
        const Eigen::MatrixXd P = A.transpose() * Ub; // N x M, p_{n,m} = a_n^T u_m
        const Eigen::MatrixXd Q = B.transpose() * Ub;
        const Eigen::MatrixXd T = llt_.solve(
            Eigen::MatrixXd::Identity(sigma_.mat.rows(), sigma_.mat.cols()));

        Eigen::VectorXd quad = Eigen::VectorXd::Zero(N);
        Eigen::VectorXd trace = Eigen::VectorXd::Zero(N);
        for (int n = 0; n < N; ++n) {
            const Eigen::MatrixXcd cn = model_->cov.per_device(n);
            const Eigen::MatrixXd re = cn.real();
            const Eigen::MatrixXd im = cn.imag();
            const Eigen::VectorXd pn = P.row(n).transpose();
            const Eigen::VectorXd qn = Q.row(n).transpose();
            // Im(C_n) is antisymmetric, so the two mixed terms coincide.
            quad(n) = 0.25 * (pn.dot(re * pn) + qn.dot(re * qn) + 2.0 * qn.dot(im * pn));
        }
        for (int m = 0; m < M; ++m) {
            for (int mbar = 0; mbar < M; ++mbar) {
                const auto Tb = T.block(twoL * mbar, twoL * m, twoL, twoL);
                const Eigen::MatrixXd TA = Tb * A;
                const Eigen::MatrixXd TB = Tb * B;
                const Eigen::VectorXd ga = (A.cwiseProduct(TA)).colwise().sum().transpose();
                const Eigen::VectorXd gb = (B.cwiseProduct(TB)).colwise().sum().transpose();
                const Eigen::VectorXd gba = (B.cwiseProduct(TA)).colwise().sum().transpose();
                const Eigen::VectorXd gab = (A.cwiseProduct(TB)).colwise().sum().transpose();
                const Eigen::VectorXd c1 = model_->cov.cross_block_diag(2 * m, 2 * mbar);
                const Eigen::VectorXd c2 = model_->cov.cross_block_diag(2 * m, 2 * mbar + 1);
                const Eigen::VectorXd c3 = model_->cov.cross_block_diag(2 * m + 1, 2 * mbar);
                const Eigen::VectorXd c4 = model_->cov.cross_block_diag(2 * m + 1, 2 * mbar + 1);
                trace += c1.cwiseProduct(ga) + c2.cwiseProduct(gba) +
                         c3.cwiseProduct(gab) + c4.cwiseProduct(gb);
            }
        }
        return quad - 0.5 * trace;
    }

private:
    // View x (2LM) as a 2L x M matrix whose column m is antenna block m.
    Eigen::Map<const Eigen::MatrixXd> as_blocks(const Eigen::VectorXd& x) const
    {
        const int twoL = 2 * model_->L();
        if (x.size() != static_cast<Eigen::Index>(twoL) * model_->M())
            throw std::invalid_argument("GaussianObjective: x has wrong length");
        if (!sigma_.iid_blocks)
            return {x.data(), x.size(), 1};
        return {x.data(), twoL, model_->M()};
    }

    const DetectionModel* model_;
    SigmaMatrix sigma_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double block_logdet_;
};

// gbar(x, gamma) = log g = log p(x | gamma, S) - log p(x) with
// log p(x) = -2LM log(Delta).
inline double log_g(const Eigen::VectorXd& x,
                    const Eigen::VectorXd& gamma,
                    const DetectionModel& model,
                    double delta)
{
    const GaussianObjective obj(model, gamma);
    return obj.log_density(x) + static_cast<double>(x.size()) * std::log(delta);
}

inline Eigen::VectorXd grad_log_g(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& gamma,
                                  const DetectionModel& model)
{
    const GaussianObjective obj(model, gamma);
    return obj.grad(x);
}

} // namespace covadc
