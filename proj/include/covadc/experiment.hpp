#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include <covadc/channel.hpp>
#include <covadc/config.hpp>
#include <covadc/detector.hpp>
#include <covadc/k_estimator.hpp>
#include <covadc/parallel.hpp>
#include <covadc/preamble.hpp>
#include <covadc/quantizer.hpp>

namespace covadc {

struct CsvRow {
    std::string experiment;
    std::string b; // bit width or "inf"
    int n = 0, k = 0, m = 0, l_i = 0, l_n = 0;
    double epsilon = 0.0;
    double threshold_or_step = 0.0;
    double mdp = 0.0, fap = 0.0, mdp_se = 0.0, fap_se = 0.0;
    double e_k = 0.0;
    double iterations_mean = 0.0;
    std::uint64_t seed = 0;
};

struct MetricsRecord {
    std::vector<CsvRow> rows;
};

inline std::string format_double(double v)
{
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

// CSV with the run configuration echoed as '#' comment lines.
inline void emit_csv(const MetricsRecord& record, const ExperimentConfig& cfg, std::ostream& out)
{
    std::istringstream cfg_lines(config_to_string(cfg));
    std::string line;
    while (std::getline(cfg_lines, line)) out << "# " << line << "\n";
    out << "experiment,B,N,K,M,L_I,L_N,epsilon,threshold_or_step,"
           "mdp,fap,mdp_se,fap_se,e_k,iterations_mean,seed\n";
    for (const auto& r : record.rows) {
        out << r.experiment << ',' << r.b << ',' << r.n << ',' << r.k << ',' << r.m << ','
            << r.l_i << ',' << r.l_n << ',' << format_double(r.epsilon) << ','
            << format_double(r.threshold_or_step) << ',' << format_double(r.mdp) << ','
            << format_double(r.fap) << ',' << format_double(r.mdp_se) << ','
            << format_double(r.fap_se) << ',' << format_double(r.e_k) << ','
            << format_double(r.iterations_mean) << ',' << r.seed << "\n";
    }
}

inline void emit_csv(const MetricsRecord& record, const ExperimentConfig& cfg,
                     const std::string& path)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    emit_csv(record, cfg, out);
}

// Recover the configuration echoed in a CSV's comment header.
inline ExperimentConfig parse_config_from_csv_comments(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream cfg_text;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) cfg_text << line.substr(2) << "\n";
        else if (!line.empty() && line[0] != '#') break;
    }
    return parse_config_text(cfg_text.str());
}

namespace detail {

inline std::complex<double> parse_exponential_c(const std::string& channel_model)
{
    // "exp:<re>" or "exp:<re>,<im>"
    const std::string spec = channel_model.substr(4);
    const auto comma = spec.find(',');
    if (comma == std::string::npos) return {parse_double("channel_model", spec), 0.0};
    return {parse_double("channel_model", spec.substr(0, comma)),
            parse_double("channel_model", spec.substr(comma + 1))};
}

inline StackedCovariance covariance_from_config(const ExperimentConfig& cfg)
{
    if (cfg.channel_model == "iid") return StackedCovariance::iid(cfg.n, cfg.m);
    return StackedCovariance::shared(
        exponential_covariance(parse_exponential_c(cfg.channel_model), cfg.m), cfg.n);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const Eigen::VectorXd& v)
{
    const double mean = v.mean();
    if (v.size() < 2) return {mean, 0.0};
    const double var = (v.array() - mean).square().sum() / (v.size() - 1);
    return {mean, std::sqrt(var / v.size())};
}

// Per-trial detection metrics on a threshold grid.
inline void score_thresholds(const Eigen::VectorXd& gamma_hat,
                             const ActivityPattern& truth,
                             const std::vector<double>& grid,
                             Eigen::VectorXd& mdp_out,
                             Eigen::VectorXd& fap_out)
{
    const int n = static_cast<int>(truth.alpha.size());
    const int k = truth.K;
    mdp_out.resize(static_cast<Eigen::Index>(grid.size()));
    fap_out.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t g = 0; g < grid.size(); ++g) {
        int missed = 0, false_alarm = 0;
        for (int i = 0; i < n; ++i) {
            const bool detected = gamma_hat(i) > grid[g];
            if (truth.alpha(i) == 1 && !detected) ++missed;
            if (truth.alpha(i) == 0 && detected) ++false_alarm;
        }
        mdp_out(g) = k > 0 ? static_cast<double>(missed) / k : 0.0;
        fap_out(g) = n > k ? static_cast<double>(false_alarm) / (n - k) : 0.0;
    }
}

// Effective Phase I channel of the trial: sqrt(beta) * sum of active rows
// of H. For i.i.d. channels this is distributed as sqrt(K beta) h with
// h ~ CN(0, I).
inline Eigen::VectorXcd phase1_effective_channel(const ActivityPattern& pattern,
                                                 const Eigen::MatrixXcd& H,
                                                 double beta)
{
    Eigen::VectorXcd heff = Eigen::VectorXcd::Zero(H.cols());
    for (int n = 0; n < pattern.alpha.size(); ++n)
        if (pattern.alpha(n) == 1) heff += H.row(n).transpose();
    return std::sqrt(beta) * heff;
}

// Analog Phase I symbols: y_i = s_i * heff + z_i, one 2M-vector per symbol.
inline std::vector<Eigen::VectorXd> phase1_symbols(const Eigen::VectorXcd& s,
                                                   const Eigen::VectorXcd& heff,
                                                   double sigma2,
                                                   Rng& rng)
{
    const int M = static_cast<int>(heff.size());
    std::vector<Eigen::VectorXd> out;
    out.reserve(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i) {
        const Eigen::VectorXcd z = std::sqrt(sigma2) * standard_complex_normal_vector(M, rng);
        const Eigen::VectorXcd y = s(i) * heff + z;
        Eigen::VectorXd yb(2 * M);
        for (int m = 0; m < M; ++m) {
            yb(2 * m) = y(m).real();
            yb(2 * m + 1) = y(m).imag();
        }
        out.push_back(std::move(yb));
    }
    return out;
}

// Stack per-symbol 2M vectors into the standard antenna-blocked layout for
// an L-symbol signal.
inline Eigen::VectorXd stack_phase1_symbols(const std::vector<Eigen::VectorXd>& symbols, int M)
{
    const int L = static_cast<int>(symbols.size());
    Eigen::VectorXd ybar(2 * L * M);
    for (int m = 0; m < M; ++m)
        for (int l = 0; l < L; ++l) {
            ybar(2 * L * m + l) = symbols[l](2 * m);
            ybar(2 * L * m + L + l) = symbols[l](2 * m + 1);
        }
    return ybar;
}

inline EstimatorConfig estimator_config(const ExperimentConfig& cfg, double k0, int B)
{
    EstimatorConfig ec;
    ec.L_N = cfg.l_n;
    ec.K0 = k0;
    ec.N = cfg.n;
    ec.beta = cfg.resolved_beta();
    ec.sigma2 = cfg.sigma2;
    ec.rho = cfg.rho;
    ec.B = B;
    ec.inner.epsilon = cfg.inner_epsilon;
    ec.inner.max_iterations = cfg.inner_max_iterations;
    return ec;
}

// K_hat for a detection trial per k_hat_mode. Phase I (when requested) uses
// the trial's own channels and fresh Phase I noise from `rng`.
inline double resolve_k_hat(const ExperimentConfig& cfg,
                            const ActivityPattern& pattern,
                            const Eigen::MatrixXcd& H,
                            int B,
                            Rng& rng)
{
    if (cfg.k_hat_mode == "truth") return pattern.K;
    if (cfg.k_hat_mode.rfind("fixed:", 0) == 0)
        return parse_double("k_hat_mode", cfg.k_hat_mode.substr(6));
    if (cfg.k_hat_mode == "oea" || cfg.k_hat_mode == "pea") {
        const double beta = cfg.resolved_beta();
        Eigen::VectorXcd s = Preamble::random(std::max(cfg.l_n, 1), 1, rng).matrix().col(0);
        const Eigen::VectorXcd heff = phase1_effective_channel(pattern, H, beta);
        const auto symbols = phase1_symbols(s.head(cfg.l_n), heff, cfg.sigma2, rng);
        const EstimatorConfig ec = estimator_config(cfg, cfg.k0_list.front(), B);
        if (cfg.l_n == 0) return ec.K0;
        if (cfg.k_hat_mode == "oea") {
            const Eigen::VectorXd ybar = stack_phase1_symbols(symbols, cfg.m);
            return oea_estimate(ybar, s.head(cfg.l_n), cfg.m, ec, rng).k_hat;
        }
        const auto trace = pea_estimate([&](int i) { return symbols[i]; },
                                        s.head(cfg.l_n), cfg.m, ec, rng);
        return trace.final_k();
    }
    throw std::runtime_error("config: unknown k_hat_mode '" + cfg.k_hat_mode + "'");
}

inline int parse_bits(const std::string& b)
{
    return static_cast<int>(parse_int("b", b));
}

} // namespace detail

// Phase II detection sweep: one draw per trial feeds every requested B
// (common random numbers); MDP/FAP are aggregated per threshold.
inline MetricsRecord run_detection_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    const double beta = cfg.resolved_beta();
    const auto grid = cfg.resolved_threshold_grid();
    const int G = static_cast<int>(grid.size());
    const int V = static_cast<int>(cfg.b_list.size());

    Rng setup_rng = trial_rng(cfg.master_seed, std::uint64_t(-1));
    const Preamble preamble = Preamble::random(cfg.l_i, cfg.n, setup_rng);
    const StackedCovariance cov = detail::covariance_from_config(cfg);
    const ChannelSampler sampler(cov);
    const DetectionModel model{preamble.real_expanded(), cov, cfg.sigma2};

    std::vector<Eigen::MatrixXd> mdp(V, Eigen::MatrixXd(cfg.trials, G));
    std::vector<Eigen::MatrixXd> fap(V, Eigen::MatrixXd(cfg.trials, G));
    std::vector<Eigen::VectorXd> iters(V, Eigen::VectorXd(cfg.trials));

    run_trials(cfg.trials, cfg.threads, [&](int t) {
        Rng rng = trial_rng(cfg.master_seed, t);
        const ActivityPattern pattern = draw_activity(cfg.n, cfg.k, rng);
        const Eigen::MatrixXcd H = sampler.draw(rng);
        const ReceivedSignal sig = synthesize_received(preamble, pattern, beta, H,
                                                       cfg.sigma2, rng);
        DetectorConfig det_cfg;
        det_cfg.epsilon = cfg.epsilon;
        det_cfg.max_iterations = cfg.max_iterations;
        for (int v = 0; v < V; ++v) {
            Rng det_rng = trial_rng(cfg.master_seed, t, 1 + v);
            DetectionResult r;
            if (cfg.b_list[v] == "inf") {
                r = infinite_adc_detect(sig.ybar, model, det_cfg);
            } else {
                const int B = detail::parse_bits(cfg.b_list[v]);
                const double k_hat = detail::resolve_k_hat(cfg, pattern, H, B, rng);
                const auto cb = QuantizerCodebook::designed(k_hat, beta, cfg.sigma2, cfg.rho, B);
                r = nsgd_detect(cb.quantize(sig.ybar), cb, model, det_cfg, det_rng);
            }
            Eigen::VectorXd mdp_t, fap_t;
            detail::score_thresholds(r.gamma_hat, pattern, grid, mdp_t, fap_t);
            mdp[v].row(t) = mdp_t.transpose();
            fap[v].row(t) = fap_t.transpose();
            iters[v](t) = r.iterations;
        }
    });

    MetricsRecord record;
    for (int v = 0; v < V; ++v)
        for (int g = 0; g < G; ++g) {
            const auto ms = detail::mean_se(mdp[v].col(g));
            const auto fs = detail::mean_se(fap[v].col(g));
            CsvRow row;
            row.experiment = "detect";
            row.b = cfg.b_list[v];
            row.n = cfg.n; row.k = cfg.k; row.m = cfg.m;
            row.l_i = cfg.l_i; row.l_n = cfg.l_n;
            row.epsilon = cfg.epsilon;
            row.threshold_or_step = grid[g];
            row.mdp = ms.mean; row.mdp_se = ms.se;
            row.fap = fs.mean; row.fap_se = fs.se;
            row.iterations_mean = iters[v].mean();
            row.seed = cfg.master_seed;
            record.rows.push_back(row);
        }
    return record;
}

// Per-iteration delta = |gamma^(i) - gamma*|_1 / N traces (gamma* = final
// iterate) and iteration statistics per B.
inline MetricsRecord run_convergence_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    const double beta = cfg.resolved_beta();
    const int V = static_cast<int>(cfg.b_list.size());

    Rng setup_rng = trial_rng(cfg.master_seed, std::uint64_t(-1));
    const Preamble preamble = Preamble::random(cfg.l_i, cfg.n, setup_rng);
    const StackedCovariance cov = detail::covariance_from_config(cfg);
    const ChannelSampler sampler(cov);
    const DetectionModel model{preamble.real_expanded(), cov, cfg.sigma2};

    std::vector<std::vector<std::vector<double>>> deltas(V); // [v][trial] -> trace
    std::vector<Eigen::VectorXd> iters(V, Eigen::VectorXd(cfg.trials));
    for (int v = 0; v < V; ++v) deltas[v].resize(cfg.trials);

    run_trials(cfg.trials, cfg.threads, [&](int t) {
        Rng rng = trial_rng(cfg.master_seed, t);
        const ActivityPattern pattern = draw_activity(cfg.n, cfg.k, rng);
        const Eigen::MatrixXcd H = sampler.draw(rng);
        const ReceivedSignal sig = synthesize_received(preamble, pattern, beta, H,
                                                       cfg.sigma2, rng);
        DetectorConfig det_cfg;
        det_cfg.epsilon = cfg.epsilon;
        det_cfg.max_iterations = cfg.max_iterations;
        det_cfg.record_history = true;
        for (int v = 0; v < V; ++v) {
            Rng det_rng = trial_rng(cfg.master_seed, t, 1 + v);
            DetectionResult r;
            if (cfg.b_list[v] == "inf") {
                r = infinite_adc_detect(sig.ybar, model, det_cfg);
            } else {
                const int B = detail::parse_bits(cfg.b_list[v]);
                const double k_hat = detail::resolve_k_hat(cfg, pattern, H, B, rng);
                const auto cb = QuantizerCodebook::designed(k_hat, beta, cfg.sigma2, cfg.rho, B);
                r = nsgd_detect(cb.quantize(sig.ybar), cb, model, det_cfg, det_rng);
            }
            const Eigen::VectorXd& star = r.gamma_hat;
            auto& trace = deltas[v][t];
            trace.reserve(r.history.size());
            for (const auto& g : r.history)
                trace.push_back((g - star).lpNorm<1>() / cfg.n);
            iters[v](t) = r.iterations;
        }
    });

    MetricsRecord record;
    for (int v = 0; v < V; ++v) {
        std::size_t longest = 0;
        for (const auto& tr : deltas[v]) longest = std::max(longest, tr.size());
        for (std::size_t i = 0; i < longest; ++i) {
            double sum = 0.0;
            for (const auto& tr : deltas[v]) sum += i < tr.size() ? tr[i] : 0.0;
            CsvRow row;
            row.experiment = "converge";
            row.b = cfg.b_list[v];
            row.n = cfg.n; row.k = cfg.k; row.m = cfg.m;
            row.l_i = cfg.l_i; row.l_n = cfg.l_n;
            row.epsilon = cfg.epsilon;
            row.threshold_or_step = static_cast<double>(i);
            row.e_k = sum / cfg.trials; // mean delta at iteration i
            row.iterations_mean = iters[v].mean();
            row.seed = cfg.master_seed;
            record.rows.push_back(row);
        }
    }
    return record;
}

// PEA error E_K per step, per initial value; a correlated-channel variant
// (same i.i.d.-designed estimator) runs alongside when the config names an
// exponential channel model.
inline MetricsRecord run_kestimation_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    if (cfg.l_n < 1) throw std::runtime_error("estimate-k: l_n must be >= 1");
    const double beta = cfg.resolved_beta();
    const int B = detail::parse_bits(cfg.b_list.front());
    const int n_k0 = static_cast<int>(cfg.k0_list.size());

    std::vector<std::string> variants{"iid"};
    if (cfg.channel_model != "iid") variants.push_back("corr");

    const int steps = cfg.l_n + 1; // trace includes K_hat^(0)
    // err[variant][k0](trial, step)
    std::vector<std::vector<Eigen::MatrixXd>> err(
        variants.size(), std::vector<Eigen::MatrixXd>(n_k0, Eigen::MatrixXd(cfg.trials, steps)));

    const StackedCovariance cov_corr = detail::covariance_from_config(cfg);
    const ChannelSampler sampler_corr(cov_corr);

    run_trials(cfg.trials, cfg.threads, [&](int t) {
        for (std::size_t vi = 0; vi < variants.size(); ++vi) {
            Rng rng = trial_rng(cfg.master_seed, t, 100 + vi);
            const ActivityPattern pattern = draw_activity(cfg.n, cfg.k, rng);
            const Eigen::VectorXcd s = Preamble::random(cfg.l_n, 1, rng).matrix().col(0);
            Eigen::VectorXcd heff;
            if (variants[vi] == "iid") {
                heff = std::sqrt(static_cast<double>(pattern.K) * beta) *
                       standard_complex_normal_vector(cfg.m, rng);
            } else {
                const Eigen::MatrixXcd H = sampler_corr.draw(rng);
                heff = detail::phase1_effective_channel(pattern, H, beta);
            }
            const auto symbols = detail::phase1_symbols(s, heff, cfg.sigma2, rng);
            for (int j = 0; j < n_k0; ++j) {
                Rng est_rng = trial_rng(cfg.master_seed, t, 200 + 10 * vi + j);
                const EstimatorConfig ec = detail::estimator_config(cfg, cfg.k0_list[j], B);
                const auto trace = pea_estimate([&](int i) { return symbols[i]; },
                                                s, cfg.m, ec, est_rng);
                for (int i = 0; i < steps; ++i)
                    err[vi][j](t, i) = std::abs(cfg.k - trace.k_hats[i]);
            }
        }
    });

    MetricsRecord record;
    for (std::size_t vi = 0; vi < variants.size(); ++vi)
        for (int j = 0; j < n_k0; ++j)
            for (int i = 0; i < steps; ++i) {
                CsvRow row;
                row.experiment = "estimate-k-" + variants[vi] +
                                 "[k0=" + format_double(cfg.k0_list[j]) + "]";
                row.b = cfg.b_list.front();
                row.n = cfg.n; row.k = cfg.k; row.m = cfg.m;
                row.l_i = cfg.l_i; row.l_n = cfg.l_n;
                row.epsilon = cfg.inner_epsilon;
                row.threshold_or_step = static_cast<double>(i);
                row.e_k = err[vi][j].col(i).mean();
                row.seed = cfg.master_seed;
                record.rows.push_back(row);
            }
    return record;
}

// Two-phase protocol against Benchmark 1 (K_hat = K, full L) and Benchmark 2
// (K_hat = 1, full L) on common draws. L = L_N + L_I.
inline MetricsRecord run_protocol_experiment(const ExperimentConfig& cfg)
{
    validate_config(cfg);
    const double beta = cfg.resolved_beta();
    const auto grid = cfg.resolved_threshold_grid();
    const int G = static_cast<int>(grid.size());
    const int L = cfg.l_n + cfg.l_i;
    const int B = detail::parse_bits(cfg.b_list.front());

    Rng setup_rng = trial_rng(cfg.master_seed, std::uint64_t(-1));
    const Preamble preamble_full = Preamble::random(L, cfg.n, setup_rng);
    const Preamble preamble_short(preamble_full.matrix().topRows(cfg.l_i));
    const StackedCovariance cov = detail::covariance_from_config(cfg);
    const ChannelSampler sampler(cov);
    const DetectionModel model_full{preamble_full.real_expanded(), cov, cfg.sigma2};
    const DetectionModel model_short{preamble_short.real_expanded(), cov, cfg.sigma2};

    const std::vector<std::string> variants{"protocol", "benchmark1", "benchmark2"};
    std::vector<Eigen::MatrixXd> mdp(3, Eigen::MatrixXd(cfg.trials, G));
    std::vector<Eigen::MatrixXd> fap(3, Eigen::MatrixXd(cfg.trials, G));
    std::vector<Eigen::VectorXd> iters(3, Eigen::VectorXd(cfg.trials));
    Eigen::VectorXd k_err(cfg.trials);

    run_trials(cfg.trials, cfg.threads, [&](int t) {
        Rng rng = trial_rng(cfg.master_seed, t);
        const ActivityPattern pattern = draw_activity(cfg.n, cfg.k, rng);
        const Eigen::MatrixXcd H = sampler.draw(rng);
        const Eigen::MatrixXcd Z =
            std::sqrt(cfg.sigma2) * standard_complex_normal_matrix(L, cfg.m, rng);
        const Eigen::VectorXd gamma_sqrt =
            gamma_from_pattern(pattern, beta).cwiseSqrt();
        const Eigen::MatrixXcd y_full = preamble_full.matrix() * gamma_sqrt.asDiagonal() * H + Z;
        const Eigen::VectorXd ybar_full = real_expand_received(y_full);
        const Eigen::VectorXd ybar_short = real_expand_received(
            Eigen::MatrixXcd(y_full.topRows(cfg.l_i)));

        // Phase I of the protocol
        double k_hat = cfg.k0_list.front();
        if (cfg.l_n > 0) {
            const Eigen::VectorXcd s = Preamble::random(cfg.l_n, 1, rng).matrix().col(0);
            const Eigen::VectorXcd heff = detail::phase1_effective_channel(pattern, H, beta);
            const auto symbols = detail::phase1_symbols(s, heff, cfg.sigma2, rng);
            const EstimatorConfig ec = detail::estimator_config(cfg, cfg.k0_list.front(), B);
            const auto trace = pea_estimate([&](int i) { return symbols[i]; }, s, cfg.m, ec, rng);
            k_hat = trace.final_k();
        }
        k_err(t) = std::abs(cfg.k - k_hat);

        DetectorConfig det_cfg;
        det_cfg.epsilon = cfg.epsilon;
        det_cfg.max_iterations = cfg.max_iterations;
        const double k_hats[3] = {k_hat, static_cast<double>(pattern.K), 1.0};
        for (int v = 0; v < 3; ++v) {
            Rng det_rng = trial_rng(cfg.master_seed, t, 1 + v);
            const auto& m = v == 0 ? model_short : model_full;
            const auto& yb = v == 0 ? ybar_short : ybar_full;
            const auto cb = QuantizerCodebook::designed(k_hats[v], beta, cfg.sigma2, cfg.rho, B);
            const DetectionResult r = nsgd_detect(cb.quantize(yb), cb, m, det_cfg, det_rng);
            Eigen::VectorXd mdp_t, fap_t;
            detail::score_thresholds(r.gamma_hat, pattern, grid, mdp_t, fap_t);
            mdp[v].row(t) = mdp_t.transpose();
            fap[v].row(t) = fap_t.transpose();
            iters[v](t) = r.iterations;
        }
    });

    MetricsRecord record;
    for (int v = 0; v < 3; ++v)
        for (int g = 0; g < G; ++g) {
            const auto ms = detail::mean_se(mdp[v].col(g));
            const auto fs = detail::mean_se(fap[v].col(g));
            CsvRow row;
            row.experiment = variants[v];
            row.b = cfg.b_list.front();
            row.n = cfg.n; row.k = cfg.k; row.m = cfg.m;
            row.l_i = v == 0 ? cfg.l_i : L;
            row.l_n = v == 0 ? cfg.l_n : 0;
            row.epsilon = cfg.epsilon;
            row.threshold_or_step = grid[g];
            row.mdp = ms.mean; row.mdp_se = ms.se;
            row.fap = fs.mean; row.fap_se = fs.se;
            row.e_k = v == 0 ? k_err.mean() : 0.0;
            row.iterations_mean = iters[v].mean();
            row.seed = cfg.master_seed;
            record.rows.push_back(row);
        }
    return record;
}

// MDP at a target FAP by linear interpolation along the aggregate ROC.
inline double mdp_at_fap(const MetricsRecord& record, const std::string& experiment,
                         const std::string& b, double target_fap)
{
    std::vector<std::pair<double, double>> roc; // (fap, mdp), threshold order
    for (const auto& r : record.rows)
        if (r.experiment == experiment && r.b == b)
            roc.emplace_back(r.fap, r.mdp);
    if (roc.empty()) throw std::runtime_error("mdp_at_fap: no matching rows");
    // fap decreases with threshold; walk adjacent pairs and interpolate
    for (std::size_t i = 0; i + 1 < roc.size(); ++i) {
        const auto [f0, m0] = roc[i];
        const auto [f1, m1] = roc[i + 1];
        if ((f0 >= target_fap && f1 <= target_fap) || (f0 <= target_fap && f1 >= target_fap)) {
            if (f0 == f1) return 0.5 * (m0 + m1);
            const double w = (target_fap - f0) / (f1 - f0);
            return m0 + w * (m1 - m0);
        }
    }
    // target outside the sweep; clamp to the nearest end
    return std::abs(roc.front().first - target_fap) < std::abs(roc.back().first - target_fap)
               ? roc.front().second
               : roc.back().second;
}

} // namespace covadc
