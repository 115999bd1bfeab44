#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include <covadc/rng.hpp>

namespace covadc {

// Delta = rho * sqrt(2 K beta + 2 sigma^2) / 2^B. K may be real-valued
// (progressive estimates are not integers).
inline double design_step_size(double k_hat, double beta, double sigma2, double rho, int B)
{
    if (B < 1) throw std::invalid_argument("design_step_size: B must be >= 1");
    if (rho <= 0.0) throw std::invalid_argument("design_step_size: rho must be > 0");
    if (sigma2 <= 0.0) throw std::invalid_argument("design_step_size: sigma2 must be > 0");
    if (k_hat < 0.0) throw std::invalid_argument("design_step_size: k_hat must be >= 0");
    return rho * std::sqrt(2.0 * k_hat * beta + 2.0 * sigma2) / std::pow(2.0, B);
}

struct Cell {
    double lo; // half-open [lo, hi)
    double hi;
};

// Uniform B-bit codebook. Cells are left-closed/right-open; the two extreme
// I-cells are unbounded but their truncated J-cells are clipped to width
// Delta at +-2^{B-1} Delta. A pass-through variant represents B = infinity.
class QuantizerCodebook {
public:
    QuantizerCodebook(int B, double delta, double rho = 0.0, double k_hat_used = 0.0)
        : B_(B), delta_(delta), rho_(rho), k_hat_used_(k_hat_used)
    {
        if (B < 1) throw std::invalid_argument("QuantizerCodebook: B must be >= 1");
        if (delta <= 0.0) throw std::invalid_argument("QuantizerCodebook: delta must be > 0");
        half_levels_ = std::int64_t{1} << (B - 1);
    }

    static QuantizerCodebook designed(double k_hat, double beta, double sigma2, double rho, int B)
    {
        return QuantizerCodebook(B, design_step_size(k_hat, beta, sigma2, rho, B), rho, k_hat);
    }

    static QuantizerCodebook passthrough()
    {
        QuantizerCodebook cb;
        return cb;
    }

    bool is_passthrough() const { return passthrough_; }
    int B() const { return B_; }
    double delta() const { return delta_; }
    std::int64_t num_levels() const { return 2 * half_levels_; }

    // Cell index q in 1..2^B; values exactly at +-2^{B-1} Delta map to the
    // adjacent extreme cell.
    std::int64_t interval_index(double x) const
    {
        if (passthrough_) throw std::logic_error("interval_index: passthrough codebook");
        const auto q = static_cast<std::int64_t>(std::floor(x / delta_)) + half_levels_ + 1;
        return std::clamp<std::int64_t>(q, 1, num_levels());
    }

    // Output level of cell q: (q - 2^{B-1} - 1/2) Delta.
    double level(std::int64_t q) const
    {
        return (static_cast<double>(q - half_levels_) - 0.5) * delta_;
    }

    double quantize_scalar(double x) const
    {
        if (passthrough_) return x;
        return level(interval_index(x));
    }

    Eigen::VectorXd quantize(const Eigen::VectorXd& ybar) const
    {
        if (passthrough_) return ybar;
        return ybar.unaryExpr([this](double x) { return quantize_scalar(x); });
    }

    // Bounded cell J_q: [(q-1-2^{B-1}) Delta, (q-2^{B-1}) Delta). The same
    // formula covers interior and clipped extreme cells.
    Cell truncated_cell(std::int64_t q) const
    {
        if (q < 1 || q > num_levels()) throw std::invalid_argument("truncated_cell: bad index");
        const double lo = static_cast<double>(q - 1 - half_levels_) * delta_;
        return {lo, lo + delta_};
    }

    // One independent uniform draw per component from the J-cell of its
    // quantized value.
    Eigen::VectorXd sample_uniform_in_cells(const Eigen::VectorXd& yq, Rng& rng) const
    {
        if (passthrough_) return yq;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Eigen::VectorXd x(yq.size());
        for (Eigen::Index i = 0; i < yq.size(); ++i) {
            const Cell c = truncated_cell(interval_index(yq(i)));
            x(i) = c.lo + delta_ * u(rng);
        }
        return x;
    }

    // Short label for experiment logs.
    std::string to_record() const
    {
        std::ostringstream os;
        if (passthrough_) {
            os << "B=inf";
        } else {
            os.precision(17);
            os << "B=" << B_ << " delta=" << delta_ << " rho=" << rho_
               << " k_hat=" << k_hat_used_;
        }
        return os.str();
    }

private:
    QuantizerCodebook() : passthrough_(true) {}

    bool passthrough_ = false;
    int B_ = 0;
    double delta_ = 0.0;
    double rho_ = 0.0;
    double k_hat_used_ = 0.0;
    std::int64_t half_levels_ = 0;
};

} // namespace covadc
