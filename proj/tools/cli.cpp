#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <covadc/experiment.hpp>
#include <covadc/validation.hpp>

using namespace covadc;

namespace {

// Accumulates --set overrides and optional direct flags on top of --config.
struct RunOptions {
    std::string config_path;
    std::string out_path;
    std::vector<std::string> overrides; // key=value pairs
};

void add_run_options(CLI::App* cmd, RunOptions& opt)
{
    cmd->add_option("-c,--config", opt.config_path, "config file (key = value lines)");
    cmd->add_option("-o,--out", opt.out_path,
                    "output CSV path (default <out-dir>/<subcommand>.csv)");
    cmd->add_option("-s,--set", opt.overrides,
                    "override a config key, e.g. --set trials=500")
        ->take_all();
}

ExperimentConfig load_config(const RunOptions& opt)
{
    ExperimentConfig cfg;
    if (!opt.config_path.empty()) cfg = parse_config_file(opt.config_path);
    for (const auto& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("--set expects key=value, got '" + kv + "'");
        apply_config_key(cfg, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

std::string resolve_out(const RunOptions& opt, const std::string& name)
{
    if (!opt.out_path.empty()) return opt.out_path;
    const char* dir = std::getenv("COVADC_OUT_DIR");
    const std::filesystem::path base = dir && *dir ? dir : ".";
    return (base / (name + ".csv")).string();
}

int run_experiment(const RunOptions& opt, const std::string& name,
                   MetricsRecord (*runner)(const ExperimentConfig&))
{
    const ExperimentConfig cfg = load_config(opt);
    const MetricsRecord rec = runner(cfg);
    const std::string out = resolve_out(opt, name);
    emit_csv(rec, cfg, out);
    std::cout << name << ": " << rec.rows.size() << " rows -> " << out << "\n";
    return 0;
}

int report(const std::vector<CheckResult>& results)
{
    bool ok = true;
    for (const auto& r : results) {
        std::cout << (r.pass() ? "PASS" : "FAIL") << "  " << r.name << ": " << r.value
                  << (r.at_least ? " >= " : " <= ") << r.bound << "\n";
        ok = ok && r.pass();
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"covariance-based activity detection under low-resolution ADCs"};
    app.require_subcommand(1);

    RunOptions detect_opt, protocol_opt, estimate_opt, converge_opt;
    add_run_options(app.add_subcommand("detect", "Phase II detection sweep"), detect_opt);
    add_run_options(app.add_subcommand("protocol", "two-phase protocol vs benchmarks"),
                    protocol_opt);
    add_run_options(app.add_subcommand("estimate-k", "Phase I estimator error per step"),
                    estimate_opt);
    add_run_options(app.add_subcommand("converge", "per-iteration convergence traces"),
                    converge_opt);

    std::uint64_t seed = 1;
    auto* gradcheck = app.add_subcommand("gradcheck", "gradients vs finite differences");
    gradcheck->add_option("--seed", seed, "master seed");
    auto* power = app.add_subcommand("power-check", "empirical signal power vs closed form");
    power->add_option("--seed", seed, "master seed");
    auto* oracle = app.add_subcommand("oracle-check",
                                      "quantized likelihood vs quadrature oracle");
    oracle->add_option("--seed", seed, "master seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("detect"))
            return run_experiment(detect_opt, "detect", run_detection_experiment);
        if (app.got_subcommand("protocol"))
            return run_experiment(protocol_opt, "protocol", run_protocol_experiment);
        if (app.got_subcommand("estimate-k"))
            return run_experiment(estimate_opt, "estimate-k", run_kestimation_experiment);
        if (app.got_subcommand("converge"))
            return run_experiment(converge_opt, "converge", run_convergence_experiment);
        if (app.got_subcommand("gradcheck")) return report(checks::grad_check(seed));
        if (app.got_subcommand("power-check")) return report(checks::power_check(seed));
        if (app.got_subcommand("oracle-check")) {
            auto results = checks::oracle_check(seed);
            const auto eq = checks::real_expansion_equivalence(seed);
            results.push_back(eq);
            for (const auto& r : checks::covariance_check(seed)) results.push_back(r);
            return report(results);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
