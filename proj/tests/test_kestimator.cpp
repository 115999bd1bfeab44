#include <catch2/catch_amalgamated.hpp>

#include <covadc/channel.hpp>
#include <covadc/k_estimator.hpp>
#include <covadc/validation.hpp>

using namespace covadc;

TEST_CASE("per-antenna Phase I covariance")
{
    Rng rng = trial_rng(61, 0);
    const Eigen::VectorXcd s = Preamble::random(3, 1, rng).matrix().col(0);
    const PhaseOneObjective obj(s, 4, 0.8, 1.2);
    const Eigen::MatrixXd sig = sigma_m_of_k(5.0, obj.s_hat_1(), obj.s_hat_1N(), 0.8, 1.2);
    // diagonal is K beta/2 + sigma^2/2 in every dimension
    REQUIRE(((sig.diagonal().array() - (0.5 * 5.0 * 0.8 + 0.5 * 1.2)).abs() < 1e-12).all());
    REQUIRE(sig.isApprox(sig.transpose()));

    // single QPSK symbol: Sigma_m is a multiple of the identity
    const Eigen::VectorXcd s1 = Preamble::random(1, 1, rng).matrix().col(0);
    const PhaseOneObjective obj1(s1, 4, 1.0, 1.0);
    const Eigen::MatrixXd sig1 = sigma_m_of_k(7.0, obj1.s_hat_1(), obj1.s_hat_1N(), 1.0, 1.0);
    REQUIRE(sig1.isApprox(Eigen::MatrixXd::Identity(2, 2) * (7.0 + 1.0) / 2.0, 1e-12));
}

TEST_CASE("scalar derivative matches finite differences")
{
    const auto r = checks::scalar_grad_check(300, 60);
    INFO(r.name << " worst=" << r.value);
    REQUIRE(r.pass());
}

TEST_CASE("golden section recovers K on a well-conditioned instance")
{
    Rng rng = trial_rng(61, 1);
    const int M = 600;
    const double K = 10, beta = 1.0, sigma2 = 1.0;
    const Eigen::VectorXcd s = Preamble::random(1, 1, rng).matrix().col(0);
    const Eigen::VectorXd ybar = synthesize_phase1_received(s(0), K, beta, M, sigma2, rng);
    const PhaseOneObjective obj(s, M, beta, sigma2);
    const auto cb = QuantizerCodebook::designed(K, beta, sigma2, 2.0, 12);
    const double k_hat = golden_section_estimate_k(cb.quantize(ybar), cb, obj, 100.0);
    REQUIRE(std::abs(k_hat - K) < 2.0);
}

TEST_CASE("scalar NSGD tracks the golden-section solution")
{
    Rng rng = trial_rng(61, 2);
    const int M = 200;
    const double K = 12, beta = 1.0, sigma2 = 1.0;
    const Eigen::VectorXcd s = Preamble::random(1, 1, rng).matrix().col(0);
    const Eigen::VectorXd ybar = synthesize_phase1_received(s(0), K, beta, M, sigma2, rng);
    const PhaseOneObjective obj(s, M, beta, sigma2);
    const auto cb = QuantizerCodebook::designed(K, beta, sigma2, 2.0, 6);
    const Eigen::VectorXd yq = cb.quantize(ybar);

    const double gold = golden_section_estimate_k(yq, cb, obj, 100.0);
    ScalarNsgdConfig cfg;
    cfg.max_iterations = 500;
    Rng est_rng = trial_rng(61, 2, 1);
    const auto r = nsgd_estimate_k(yq, cb, obj, gold + 5.0, 100.0, cfg, est_rng);
    REQUIRE(std::abs(r.k_hat - gold) < 2.0);
    REQUIRE(r.k_hat >= 0.0);
}

TEST_CASE("scalar NSGD respects the projection bounds")
{
    Rng rng = trial_rng(61, 3);
    const Eigen::VectorXcd s = Preamble::random(1, 1, rng).matrix().col(0);
    const PhaseOneObjective obj(s, 4, 1.0, 1.0);
    const auto cb = QuantizerCodebook::designed(1, 1.0, 1.0, 2.0, 4);
    // huge signal pushes K_hat upward; bound at n_max = 3
    Eigen::VectorXd ybar = Eigen::VectorXd::Constant(8, 50.0);
    ScalarNsgdConfig cfg;
    cfg.max_iterations = 300;
    Rng est_rng = trial_rng(61, 3, 1);
    const auto r = nsgd_estimate_k(cb.quantize(ybar), cb, obj, 1.0, 3.0, cfg, est_rng);
    REQUIRE(r.k_hat <= 3.0);
    REQUIRE(r.k_hat >= 0.0);
}

TEST_CASE("PEA trace has one estimate per stage plus the initial guess")
{
    Rng rng = trial_rng(61, 4);
    const int M = 32;
    const double K = 8, beta = 1.0, sigma2 = 1.0;
    EstimatorConfig cfg;
    cfg.L_N = 4;
    cfg.K0 = 1.0;
    cfg.N = 50;
    cfg.B = 4;

    const Eigen::VectorXcd s = Preamble::random(cfg.L_N, 1, rng).matrix().col(0);
    const Eigen::VectorXcd heff =
        std::sqrt(K * beta) * standard_complex_normal_vector(M, rng);
    std::vector<Eigen::VectorXd> symbols;
    for (int i = 0; i < cfg.L_N; ++i) {
        const Eigen::VectorXcd z = standard_complex_normal_vector(M, rng);
        const Eigen::VectorXcd y = s(i) * heff + z;
        Eigen::VectorXd yb(2 * M);
        for (int m = 0; m < M; ++m) {
            yb(2 * m) = y(m).real();
            yb(2 * m + 1) = y(m).imag();
        }
        symbols.push_back(yb);
    }

    Rng est_rng = trial_rng(61, 4, 1);
    const auto trace = pea_estimate([&](int i) { return symbols[i]; }, s, M, cfg, est_rng);
    REQUIRE(trace.k_hats.size() == static_cast<std::size_t>(cfg.L_N + 1));
    REQUIRE(trace.k_hats.front() == cfg.K0);
    REQUIRE(trace.deltas.size() == static_cast<std::size_t>(cfg.L_N));
    REQUIRE(trace.per_step_iterations.size() == static_cast<std::size_t>(cfg.L_N));
    // codebook redesign: step size follows the running estimate
    for (int i = 0; i < cfg.L_N; ++i)
        REQUIRE(trace.deltas[i] ==
                design_step_size(trace.k_hats[i], cfg.beta, cfg.sigma2, cfg.rho, cfg.B));
    // estimate moves toward K from K0 = 1
    REQUIRE(std::abs(trace.final_k() - K) < std::abs(cfg.K0 - K));

    // accumulating variant consumes the same symbols and also improves
    EstimatorConfig acc = cfg;
    acc.accumulate_symbols = true;
    Rng est_rng2 = trial_rng(61, 4, 2);
    const auto trace2 = pea_estimate([&](int i) { return symbols[i]; }, s, M, acc, est_rng2);
    REQUIRE(std::abs(trace2.final_k() - K) < std::abs(cfg.K0 - K));
}

TEST_CASE("OEA improves on the initial guess")
{
    Rng rng = trial_rng(61, 5);
    const int M = 32, L_N = 5;
    const double K = 10, beta = 1.0, sigma2 = 1.0;
    EstimatorConfig cfg;
    cfg.L_N = L_N;
    cfg.K0 = 1.0;
    cfg.N = 50;
    cfg.B = 4;

    const Eigen::VectorXcd s = Preamble::random(L_N, 1, rng).matrix().col(0);
    const Eigen::VectorXcd heff =
        std::sqrt(K * beta) * standard_complex_normal_vector(M, rng);
    Eigen::VectorXd ybar(2 * L_N * M);
    for (int m = 0; m < M; ++m) {
        const Eigen::VectorXcd z = standard_complex_normal_vector(L_N, rng);
        for (int l = 0; l < L_N; ++l) {
            const std::complex<double> y = s(l) * heff(m) + z(l);
            ybar(2 * L_N * m + l) = y.real();
            ybar(2 * L_N * m + L_N + l) = y.imag();
        }
    }
    Rng est_rng = trial_rng(61, 5, 1);
    const auto r = oea_estimate(ybar, s, M, cfg, est_rng);
    REQUIRE(std::abs(r.k_hat - K) < std::abs(cfg.K0 - K));
}

TEST_CASE("PEA rejects a preamble shorter than the symbol budget")
{
    Rng rng = trial_rng(61, 6);
    const Eigen::VectorXcd s = Preamble::random(2, 1, rng).matrix().col(0);
    EstimatorConfig cfg;
    cfg.L_N = 3;
    REQUIRE_THROWS_AS(
        pea_estimate([](int) { return Eigen::VectorXd(); }, s, 4, cfg, rng),
        std::invalid_argument);
}
