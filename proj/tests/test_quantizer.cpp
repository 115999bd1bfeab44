#include <catch2/catch_amalgamated.hpp>

#include <covadc/quantizer.hpp>
#include <covadc/validation.hpp>

using namespace covadc;

TEST_CASE("step size formula")
{
    REQUIRE(design_step_size(100, 1, 1, 2, 4) == Catch::Approx(2.0 * std::sqrt(202.0) / 16.0));
    REQUIRE(design_step_size(0, 1, 1, 2, 1) == Catch::Approx(std::sqrt(2.0)));
    // doubling B halves delta exactly
    REQUIRE(design_step_size(3, 1, 1, 2, 6) == design_step_size(3, 1, 1, 2, 5) / 2.0);
    REQUIRE_THROWS_AS(design_step_size(1, 1, 1, 0.0, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(design_step_size(1, 1, 0.0, 2, 4), std::invalid_argument);
    REQUIRE_THROWS_AS(design_step_size(-1, 1, 1, 2, 4), std::invalid_argument);
}

TEST_CASE("interval index with B=2, delta=1")
{
    const QuantizerCodebook cb(2, 1.0);
    REQUIRE(cb.interval_index(-5.0) == 1);
    REQUIRE(cb.interval_index(-0.2) == 2);
    REQUIRE(cb.interval_index(0.0) == 3);
    REQUIRE(cb.interval_index(3.0) == 4);
    // boundary is left-closed to cell 2
    REQUIRE(cb.interval_index(-1.0) == 2);
    // values exactly at the extreme boundaries map to the adjacent cell
    REQUIRE(cb.interval_index(2.0) == 4);
    REQUIRE(cb.interval_index(-2.0) == 1);
}

TEST_CASE("quantize with B=2, delta=1")
{
    const QuantizerCodebook cb(2, 1.0);
    REQUIRE(cb.quantize_scalar(0.3) == 0.5);
    REQUIRE(cb.quantize_scalar(-5.0) == -1.5);
    REQUIRE(cb.quantize_scalar(1.0) == 1.5);
    REQUIRE(cb.quantize_scalar(-1.0) == -0.5);
}

TEST_CASE("quantize is the J-cell midpoint, idempotent, index-stable")
{
    const QuantizerCodebook cb = QuantizerCodebook::designed(10, 1, 1, 2, 4);
    Rng rng = trial_rng(31, 0);
    std::uniform_real_distribution<double> u(-3.0 * 8.0 * cb.delta(), 3.0 * 8.0 * cb.delta());
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng);
        const double qx = cb.quantize_scalar(x);
        const Cell c = cb.truncated_cell(cb.interval_index(x));
        REQUIRE(qx == Catch::Approx(0.5 * (c.lo + c.hi)).epsilon(1e-15));
        REQUIRE(cb.quantize_scalar(qx) == qx);
        REQUIRE(cb.interval_index(qx) == cb.interval_index(x));
        const std::int64_t q = cb.interval_index(x);
        if (q > 1 && q < cb.num_levels())
            REQUIRE(std::abs(x - qx) <= cb.delta() / 2.0);
    }
}

TEST_CASE("levels are symmetric and delta-spaced")
{
    const QuantizerCodebook cb(3, 0.7);
    for (std::int64_t q = 1; q <= cb.num_levels(); ++q) {
        REQUIRE(cb.level(q) == Catch::Approx(-cb.level(cb.num_levels() + 1 - q)));
        if (q > 1) REQUIRE(cb.level(q) - cb.level(q - 1) == Catch::Approx(0.7));
    }
}

TEST_CASE("truncated cells tile the bounded range with width delta")
{
    const QuantizerCodebook cb(2, 1.0);
    REQUIRE(cb.truncated_cell(1).lo == -2.0);
    REQUIRE(cb.truncated_cell(1).hi == -1.0);
    REQUIRE(cb.truncated_cell(2).lo == -1.0);
    REQUIRE(cb.truncated_cell(2).hi == 0.0);
    REQUIRE(cb.truncated_cell(4).lo == 1.0);
    REQUIRE(cb.truncated_cell(4).hi == 2.0);
    for (std::int64_t q = 1; q <= 4; ++q) {
        const Cell c = cb.truncated_cell(q);
        REQUIRE(c.hi - c.lo == 1.0);
        if (q > 1) REQUIRE(c.lo == cb.truncated_cell(q - 1).hi);
    }
    REQUIRE_THROWS_AS(cb.truncated_cell(0), std::invalid_argument);
    REQUIRE_THROWS_AS(cb.truncated_cell(5), std::invalid_argument);
}

TEST_CASE("cell sampling stays in cell and centers on the midpoint")
{
    const QuantizerCodebook cb = QuantizerCodebook::designed(5, 1, 1, 2, 3);
    Rng rng = trial_rng(31, 1);
    Eigen::VectorXd yq(1);
    yq << cb.quantize_scalar(0.4);
    const Cell c = cb.truncated_cell(cb.interval_index(yq(0)));
    double mean = 0.0;
    const int draws = 100000;
    for (int d = 0; d < draws; ++d) {
        const double x = cb.sample_uniform_in_cells(yq, rng)(0);
        REQUIRE(x >= c.lo);
        REQUIRE(x < c.hi);
        mean += x;
    }
    mean /= draws;
    REQUIRE(std::abs(mean - 0.5 * (c.lo + c.hi)) < cb.delta() / 100.0);

    Rng a = trial_rng(31, 2), b = trial_rng(31, 2);
    REQUIRE(cb.sample_uniform_in_cells(yq, a) == cb.sample_uniform_in_cells(yq, b));
}

TEST_CASE("pass-through codebook is the identity")
{
    const auto cb = QuantizerCodebook::passthrough();
    REQUIRE(cb.is_passthrough());
    Eigen::VectorXd y(3);
    y << -1.7, 0.0, 42.0;
    REQUIRE(cb.quantize(y) == y);
    Rng rng = trial_rng(31, 3);
    REQUIRE(cb.sample_uniform_in_cells(y, rng) == y);
    REQUIRE(cb.to_record() == "B=inf");
}

TEST_CASE("tail mass outside the bounded range is 2 Phi(-rho)")
{
    const double K = 10, beta = 1, sigma2 = 1, rho = 2;
    const double lambda = 0.5 * K * beta + 0.5 * sigma2;
    const QuantizerCodebook cb = QuantizerCodebook::designed(K, beta, sigma2, rho, 4);
    const double edge = 8.0 * cb.delta();
    Rng rng = trial_rng(31, 4);
    std::normal_distribution<double> dist(0.0, std::sqrt(lambda));
    int outside = 0;
    const int draws = 1000000;
    for (int d = 0; d < draws; ++d)
        if (std::abs(dist(rng)) >= edge) ++outside;
    const double frac = static_cast<double>(outside) / draws;
    REQUIRE(std::abs(frac - 2.0 * normal_cdf(-rho)) < 0.005);
}
