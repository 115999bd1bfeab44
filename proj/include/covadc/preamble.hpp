#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include <covadc/rng.hpp>

namespace covadc {

// Complex L x N preamble set. Entries are QPSK symbols with real and
// imaginary parts in {-sqrt(2)/2, +sqrt(2)/2}, so |s|^2 = 1 per entry.
class Preamble {
public:
    Preamble(Eigen::MatrixXcd entries)
        : s_(std::move(entries))
    {
        if (s_.rows() < 1 || s_.cols() < 1)
            throw std::invalid_argument("Preamble: empty matrix");
        for (Eigen::Index j = 0; j < s_.cols(); ++j)
            for (Eigen::Index i = 0; i < s_.rows(); ++i)
                if (std::abs(std::norm(s_(i, j)) - 1.0) > 1e-12)
                    throw std::invalid_argument("Preamble: entries must be unit modulus");
    }

    // Each entry's real and imaginary parts independently uniform over
    // {-sqrt(2)/2, +sqrt(2)/2}.
    static Preamble random(int L, int N, Rng& rng)
    {
        if (L < 1 || N < 1) throw std::invalid_argument("Preamble::random: L, N must be >= 1");
        const double a = std::sqrt(2.0) / 2.0;
        std::bernoulli_distribution coin(0.5);
        Eigen::MatrixXcd s(L, N);
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < L; ++i) {
                const double re = coin(rng) ? a : -a;
                const double im = coin(rng) ? a : -a;
                s(i, j) = std::complex<double>(re, im);
            }
        return Preamble(std::move(s));
    }

    int L() const { return static_cast<int>(s_.rows()); }
    int N() const { return static_cast<int>(s_.cols()); }
    const Eigen::MatrixXcd& matrix() const { return s_; }

    // 2L x 2N real expansion [Re(S) -Im(S); Im(S) Re(S)].
    Eigen::MatrixXd real_expanded() const
    {
        const Eigen::Index L = s_.rows(), N = s_.cols();
        Eigen::MatrixXd out(2 * L, 2 * N);
        out.topLeftCorner(L, N) = s_.real();
        out.topRightCorner(L, N) = -s_.imag();
        out.bottomLeftCorner(L, N) = s_.imag();
        out.bottomRightCorner(L, N) = s_.real();
        return out;
    }

private:
    Eigen::MatrixXcd s_;
};

} // namespace covadc
