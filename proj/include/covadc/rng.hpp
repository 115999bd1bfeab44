#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace covadc {

using Rng = std::mt19937_64;

// Generator for (trial, stream) of a run keyed by `master_seed`. Trials get
// independent streams regardless of scheduling order; distinct streams within
// a trial let compared detector variants keep exact common random numbers on
// the physical draws (stream 0) while consuming their own optimizer noise.
inline Rng trial_rng(std::uint64_t master_seed, std::uint64_t trial, std::uint64_t stream = 0)
{
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(trial),
        static_cast<std::uint32_t>(trial >> 32),
        static_cast<std::uint32_t>(stream),
        static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

inline Eigen::VectorXd standard_normal_vector(int n, Rng& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = dist(rng);
    return v;
}

// CN(0,1) entries: real and imaginary parts each N(0, 1/2).
inline Eigen::VectorXcd standard_complex_normal_vector(int n, Rng& rng)
{
    const double s = std::sqrt(0.5);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        const double re = dist(rng);
        const double im = dist(rng);
        v(i) = std::complex<double>(s * re, s * im);
    }
    return v;
}

inline Eigen::MatrixXcd standard_complex_normal_matrix(int rows, int cols, Rng& rng)
{
    const double s = std::sqrt(0.5);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) {
            const double re = dist(rng);
            const double im = dist(rng);
            m(i, j) = std::complex<double>(s * re, s * im);
        }
    return m;
}

} // namespace covadc
