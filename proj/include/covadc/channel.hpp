#pragma once

#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <covadc/preamble.hpp>
#include <covadc/rng.hpp>
#include <covadc/signal_model.hpp>

namespace covadc {

struct LinkBudget {
    double noise_psd_dbm_hz = -169.0;
    double bandwidth_hz = 10e6;
    double tx_power_dbm = 23.0;
    double distance_km = 1.0;
};

struct LinkParams {
    double beta;   // per-device received power
    double sigma2; // noise power
};

inline double pathloss_db(double distance_km)
{
    if (distance_km <= 0.0) throw std::invalid_argument("pathloss_db: distance must be > 0");
    return 128.1 + 37.6 * std::log10(distance_km);
}

// sigma^2 = noise PSD * bandwidth, beta = tx power - pathloss, both from dBm.
// `normalize` jointly rescales so sigma^2 = 1 (SNR-preserving).
inline LinkParams link_budget_to_params(const LinkBudget& lb, bool normalize = true)
{
    const double sigma2_dbm = lb.noise_psd_dbm_hz + 10.0 * std::log10(lb.bandwidth_hz);
    const double beta_dbm = lb.tx_power_dbm - pathloss_db(lb.distance_km);
    if (normalize)
        return {std::pow(10.0, (beta_dbm - sigma2_dbm) / 10.0), 1.0};
    return {std::pow(10.0, beta_dbm / 10.0), std::pow(10.0, sigma2_dbm / 10.0)};
}

// Exponential covariance model: [C]_{i,j} = c^{i-j} for i >= j, conjugate
// transpose elsewhere.
inline Eigen::MatrixXcd exponential_covariance(std::complex<double> c, int M)
{
    if (std::abs(c) > 1.0 + 1e-12)
        throw std::invalid_argument("exponential_covariance: |c| must be <= 1");
    Eigen::MatrixXcd cov(M, M);
    for (int i = 0; i < M; ++i)
        for (int j = 0; j <= i; ++j) {
            const std::complex<double> v = std::pow(c, i - j);
            cov(i, j) = v;
            cov(j, i) = std::conj(v);
        }
    return cov;
}

// Exactly K ones placed uniformly at random without replacement.
inline ActivityPattern draw_activity(int N, int K, Rng& rng)
{
    if (K < 0 || K > N) throw std::invalid_argument("draw_activity: need 0 <= K <= N");
    std::vector<int> idx(N);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates for the first K positions
    for (int i = 0; i < K; ++i) {
        std::uniform_int_distribution<int> pick(i, N - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    Eigen::VectorXi alpha = Eigen::VectorXi::Zero(N);
    for (int i = 0; i < K; ++i) alpha(idx[i]) = 1;
    return ActivityPattern::from_indicator(std::move(alpha));
}

// Draws h_n = C_n^{1/2} hddot_n with hddot_n ~ CN(0, I). The matrix square
// root uses a Hermitian eigendecomposition with negative eigenvalues clamped
// at zero, so PSD-boundary models (|c| = 1) are accepted.
class ChannelSampler {
public:
    explicit ChannelSampler(const StackedCovariance& cov)
        : N_(cov.N()), M_(cov.M()), iid_(cov.is_iid())
    {
        if (iid_) return;
        sqrts_.reserve(N_);
        Eigen::MatrixXcd prev;
        for (int n = 0; n < N_; ++n) {
            Eigen::MatrixXcd c = cov.per_device(n);
            if (n > 0 && c == prev) {
                sqrts_.push_back(sqrts_.back());
            } else {
                sqrts_.push_back(matrix_sqrt(c));
            }
            prev = std::move(c);
        }
    }

    // Returns H with rows h_n (N x M).
    Eigen::MatrixXcd draw(Rng& rng) const
    {
        Eigen::MatrixXcd h = standard_complex_normal_matrix(N_, M_, rng);
        if (iid_) return h;
        for (int n = 0; n < N_; ++n)
            h.row(n) = (sqrts_[n] * h.row(n).transpose()).transpose();
        return h;
    }

    static Eigen::MatrixXcd matrix_sqrt(const Eigen::MatrixXcd& c)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(c);
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    }

private:
    int N_, M_;
    bool iid_;
    std::vector<Eigen::MatrixXcd> sqrts_;
};

struct ReceivedSignal {
    Eigen::MatrixXcd Y;   // L x M
    Eigen::VectorXd ybar; // 2LM, antenna-blocked layout
};

// Y = S gamma^{1/2} H + Z with fresh noise of per-complex-entry variance
// sigma^2.
inline ReceivedSignal synthesize_received(const Preamble& preamble,
                                          const ActivityPattern& pattern,
                                          double beta,
                                          const Eigen::MatrixXcd& H,
                                          double sigma2,
                                          Rng& rng)
{
    const int L = preamble.L(), N = preamble.N();
    const int M = static_cast<int>(H.cols());
    if (H.rows() != N || pattern.alpha.size() != N)
        throw std::invalid_argument("synthesize_received: dimension mismatch");
    const Eigen::VectorXd gamma_sqrt = gamma_from_pattern(pattern, beta).cwiseSqrt();
    ReceivedSignal out;
    out.Y = preamble.matrix() * gamma_sqrt.asDiagonal() * H +
            std::sqrt(sigma2) * standard_complex_normal_matrix(L, M, rng);
    out.ybar = real_expand_received(out.Y);
    return out;
}

// Phase I single-symbol signal via the distributional identity
// Y =_d sqrt(K beta) s h^T + Z for i.i.d. channels. Returns ybar of
// length 2M (one [Re; Im] pair per antenna).
inline Eigen::VectorXd synthesize_phase1_received(std::complex<double> s_symbol,
                                                  double K,
                                                  double beta,
                                                  int M,
                                                  double sigma2,
                                                  Rng& rng)
{
    const Eigen::VectorXcd h = standard_complex_normal_vector(M, rng);
    const Eigen::VectorXcd z = std::sqrt(sigma2) * standard_complex_normal_vector(M, rng);
    const Eigen::VectorXcd y = std::sqrt(K * beta) * s_symbol * h + z;
    Eigen::VectorXd ybar(2 * M);
    for (int m = 0; m < M; ++m) {
        ybar(2 * m) = y(m).real();
        ybar(2 * m + 1) = y(m).imag();
    }
    return ybar;
}

} // namespace covadc
