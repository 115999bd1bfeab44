#pragma once

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include <covadc/preamble.hpp>

namespace covadc {

struct ActivityPattern {
    Eigen::VectorXi alpha; // binary, length N
    int K = 0;             // number of ones

    static ActivityPattern from_indicator(Eigen::VectorXi a)
    {
        ActivityPattern p;
        p.K = a.sum();
        p.alpha = std::move(a);
        return p;
    }
};

// gamma_n = alpha_n * beta (received power of device n).
inline Eigen::VectorXd gamma_from_pattern(const ActivityPattern& pattern, double beta)
{
    return pattern.alpha.cast<double>() * beta;
}

// Signal power of every dimension of ybar: lambda = K*beta/2 + sigma^2/2.
inline double theoretical_power(double K, double beta, double sigma2)
{
    return 0.5 * K * beta + 0.5 * sigma2;
}

// Stack Y (complex L x M) column-wise as [Re(y_m); Im(y_m)] per antenna m.
// This layout is the binding data contract for everything downstream.
inline Eigen::VectorXd real_expand_received(const Eigen::MatrixXcd& Y)
{
    const Eigen::Index L = Y.rows(), M = Y.cols();
    Eigen::VectorXd ybar(2 * L * M);
    for (Eigen::Index m = 0; m < M; ++m) {
        ybar.segment(2 * L * m, L) = Y.col(m).real();
        ybar.segment(2 * L * m + L, L) = Y.col(m).imag();
    }
    return ybar;
}

// Real 2NM x 2NM channel covariance C built from the per-device antenna
// covariances C_n. Device independence makes every (m, mbar) block of the
// 2M x 2M grid diagonal, so only the N diagonal entries per block are ever
// produced; the dense matrix is never stored.
class StackedCovariance {
public:
    static StackedCovariance iid(int N, int M)
    {
        StackedCovariance c;
        c.N_ = N;
        c.M_ = M;
        c.iid_ = true;
        return c;
    }

    // All devices share one covariance matrix.
    static StackedCovariance shared(Eigen::MatrixXcd cov, int N)
    {
        validate(cov);
        StackedCovariance c;
        c.N_ = N;
        c.M_ = static_cast<int>(cov.rows());
        c.shared_ = std::move(cov);
        return c;
    }

    static StackedCovariance from_per_device(std::vector<Eigen::MatrixXcd> covs)
    {
        if (covs.empty()) throw std::invalid_argument("StackedCovariance: no matrices");
        for (const auto& c : covs) validate(c);
        StackedCovariance c;
        c.N_ = static_cast<int>(covs.size());
        c.M_ = static_cast<int>(covs.front().rows());
        c.per_device_ = std::move(covs);
        return c;
    }

    int N() const { return N_; }
    int M() const { return M_; }
    bool is_iid() const { return iid_; }

    Eigen::MatrixXcd per_device(int n) const
    {
        if (iid_) return Eigen::MatrixXcd::Identity(M_, M_);
        if (!per_device_.empty()) return per_device_.at(n);
        return shared_;
    }

    // Entry (m, mbar) of C_n, m/mbar in 0..M-1.
    std::complex<double> entry(int n, int m, int mbar) const
    {
        if (iid_) return m == mbar ? 1.0 : 0.0;
        if (!per_device_.empty()) return per_device_.at(n)(m, mbar);
        return shared_(m, mbar);
    }

    // Diagonal entries (length N) of grid block C_{r,rbar}, r/rbar in
    // 0..2M-1. Row parity selects Re/Im rows of (1/2) * Cbar_n.
    Eigen::VectorXd cross_block_diag(int r, int rbar) const
    {
        const int k = r / 2, kbar = rbar / 2;
        const int p = r % 2, pbar = rbar % 2;
        Eigen::VectorXd d(N_);
        for (int n = 0; n < N_; ++n) {
            const std::complex<double> c = entry(n, k, kbar);
            double v;
            if (p == 0 && pbar == 0) v = c.real();
            else if (p == 0 && pbar == 1) v = -c.imag();
            else if (p == 1 && pbar == 0) v = c.imag();
            else v = c.real();
            d(n) = 0.5 * v;
        }
        return d;
    }

private:
    static void validate(const Eigen::MatrixXcd& c)
    {
        if (c.rows() != c.cols()) throw std::invalid_argument("StackedCovariance: C_n not square");
        if ((c - c.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("StackedCovariance: C_n not Hermitian");
        for (Eigen::Index i = 0; i < c.rows(); ++i)
            if (std::abs(c(i, i) - std::complex<double>(1.0, 0.0)) > 1e-10)
                throw std::invalid_argument("StackedCovariance: C_n diagonal must be all ones");
    }

    int N_ = 0;
    int M_ = 0;
    bool iid_ = false;
    Eigen::MatrixXcd shared_;                  // shared C_n, empty when unused
    std::vector<Eigen::MatrixXcd> per_device_; // distinct C_n's, empty when unused
};

// Covariance of ybar. In the i.i.d. case Sigma is block-diagonal with M
// identical 2L x 2L blocks and only that block is stored.
struct SigmaMatrix {
    bool iid_blocks = false;
    int M = 1;               // antenna count (repetition factor when iid_blocks)
    Eigen::MatrixXd mat;     // 2L x 2L when iid_blocks, else 2LM x 2LM

    Eigen::Index dim() const { return iid_blocks ? mat.rows() * M : mat.rows(); }
};

// Sigma = Sbar C gammabar Sbar^T + (sigma^2/2) I, assembled block by block;
// Sbar and gammabar are never materialized.
inline SigmaMatrix build_sigma(const Eigen::MatrixXd& s_hat,
                               const StackedCovariance& cov,
                               const Eigen::VectorXd& gamma,
                               double sigma2)
{
    const int N = cov.N();
    const int M = cov.M();
    const Eigen::Index twoL = s_hat.rows();
    if (s_hat.cols() != 2 * N) throw std::invalid_argument("build_sigma: S_hat/N mismatch");
    if (gamma.size() != N) throw std::invalid_argument("build_sigma: gamma/N mismatch");
    if (sigma2 <= 0.0) throw std::invalid_argument("build_sigma: sigma2 must be > 0");
    if ((gamma.array() < 0.0).any()) throw std::invalid_argument("build_sigma: gamma must be >= 0");

    const auto A = s_hat.leftCols(N);  // columns [Re(S); Im(S)]
    const auto B = s_hat.rightCols(N); // columns [-Im(S); Re(S)]

    SigmaMatrix sigma;
    if (cov.is_iid()) {
        sigma.iid_blocks = true;
        sigma.M = M;
        sigma.mat = 0.5 * (A * gamma.asDiagonal() * A.transpose() +
                           B * gamma.asDiagonal() * B.transpose());
        sigma.mat.diagonal().array() += 0.5 * sigma2;
        return sigma;
    }

    sigma.iid_blocks = false;
    sigma.M = M;
    sigma.mat.setZero(twoL * M, twoL * M);
    for (int m = 0; m < M; ++m) {
        for (int mbar = m; mbar < M; ++mbar) {
            const Eigen::VectorXd c1 = cov.cross_block_diag(2 * m, 2 * mbar).cwiseProduct(gamma);
            const Eigen::VectorXd c2 = cov.cross_block_diag(2 * m, 2 * mbar + 1).cwiseProduct(gamma);
            const Eigen::VectorXd c3 = cov.cross_block_diag(2 * m + 1, 2 * mbar).cwiseProduct(gamma);
            const Eigen::VectorXd c4 = cov.cross_block_diag(2 * m + 1, 2 * mbar + 1).cwiseProduct(gamma);
            Eigen::MatrixXd blk = A * c1.asDiagonal() * A.transpose() +
                                  A * c2.asDiagonal() * B.transpose() +
                                  B * c3.asDiagonal() * A.transpose() +
                                  B * c4.asDiagonal() * B.transpose();
            sigma.mat.block(twoL * m, twoL * mbar, twoL, twoL) = blk;
            if (mbar != m)
                sigma.mat.block(twoL * mbar, twoL * m, twoL, twoL) = blk.transpose();
        }
    }
    sigma.mat.diagonal().array() += 0.5 * sigma2;
    return sigma;
}

} // namespace covadc
