#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <covadc/channel.hpp>

namespace covadc {

struct ExperimentConfig {
    int n = 100;
    int k = 10;
    int m = 32;
    int l_i = 13;
    int l_n = 5;
    std::vector<std::string> b_list{"4"}; // bit widths, "inf" for pass-through
    double rho = 2.0;
    double epsilon = 1e-3;
    int max_iterations = 200000;
    std::string channel_model = "iid";  // "iid" or "exp:<c>"
    std::string k_hat_mode = "truth";   // "truth", "fixed:<v>", "oea", "pea"
    std::vector<double> k0_list{1.0};   // initial guesses for Phase I
    int trials = 100;
    std::uint64_t master_seed = 1;
    std::vector<double> threshold_grid; // empty -> 0..1.5*beta, 61 points
    double beta = 0.0;                  // 0 -> from default link budget, normalized
    double sigma2 = 1.0;
    double inner_epsilon = 1e-3;
    int inner_max_iterations = 500;
    int threads = 0;                    // 0 -> hardware concurrency

    double resolved_beta() const
    {
        if (beta > 0.0) return beta;
        return link_budget_to_params(LinkBudget{}, true).beta;
    }

    std::vector<double> resolved_threshold_grid() const
    {
        if (!threshold_grid.empty()) return threshold_grid;
        std::vector<double> grid;
        const double b = resolved_beta();
        for (int i = 0; i <= 60; ++i) grid.push_back(1.5 * b * i / 60.0);
        return grid;
    }

    bool operator==(const ExperimentConfig&) const = default;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        throw std::runtime_error("config: malformed numeric value for key '" + key + "': " + v);
    }
}

inline std::int64_t parse_int(const std::string& key, const std::string& v)
{
    std::int64_t out = 0;
    const auto* begin = v.data();
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end)
        throw std::runtime_error("config: malformed integer value for key '" + key + "': " + v);
    return out;
}

inline std::vector<std::string> split_list(const std::string& v)
{
    std::vector<std::string> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value)
{
    using namespace detail;
    if (key == "n") cfg.n = static_cast<int>(parse_int(key, value));
    else if (key == "k") cfg.k = static_cast<int>(parse_int(key, value));
    else if (key == "m") cfg.m = static_cast<int>(parse_int(key, value));
    else if (key == "l_i") cfg.l_i = static_cast<int>(parse_int(key, value));
    else if (key == "l_n") cfg.l_n = static_cast<int>(parse_int(key, value));
    else if (key == "b") cfg.b_list = split_list(value);
    else if (key == "rho") cfg.rho = parse_double(key, value);
    else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
    else if (key == "max_iterations") cfg.max_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "channel_model") cfg.channel_model = value;
    else if (key == "k_hat_mode") cfg.k_hat_mode = value;
    else if (key == "k0") {
        cfg.k0_list.clear();
        for (const auto& v : split_list(value)) cfg.k0_list.push_back(parse_double(key, v));
    }
    else if (key == "trials") cfg.trials = static_cast<int>(parse_int(key, value));
    else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "threshold_grid") {
        cfg.threshold_grid.clear();
        for (const auto& v : split_list(value)) cfg.threshold_grid.push_back(parse_double(key, v));
    }
    else if (key == "beta") cfg.beta = parse_double(key, value);
    else if (key == "sigma2") cfg.sigma2 = parse_double(key, value);
    else if (key == "inner_epsilon") cfg.inner_epsilon = parse_double(key, value);
    else if (key == "inner_max_iterations")
        cfg.inner_max_iterations = static_cast<int>(parse_int(key, value));
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

inline void validate_config(const ExperimentConfig& cfg)
{
    if (cfg.n < 1 || cfg.m < 1 || cfg.l_i < 1 || cfg.l_n < 0)
        throw std::runtime_error("config: counts must be positive (l_n may be 0)");
    if (cfg.k < 0 || cfg.k > cfg.n) throw std::runtime_error("config: need 0 <= k <= n");
    if (cfg.trials < 1) throw std::runtime_error("config: trials must be >= 1");
    if (cfg.epsilon <= 0.0 || cfg.inner_epsilon <= 0.0)
        throw std::runtime_error("config: epsilon must be > 0");
    if (cfg.b_list.empty()) throw std::runtime_error("config: b list must not be empty");
    for (const auto& b : cfg.b_list)
        if (b != "inf" && (detail::parse_int("b", b) < 1 || detail::parse_int("b", b) > 24))
            throw std::runtime_error("config: b entries must be in 1..24 or 'inf'");
    for (std::size_t i = 1; i < cfg.threshold_grid.size(); ++i)
        if (cfg.threshold_grid[i] <= cfg.threshold_grid[i - 1])
            throw std::runtime_error("config: threshold_grid must be strictly increasing");
    if (cfg.channel_model != "iid" && cfg.channel_model.rfind("exp:", 0) != 0)
        throw std::runtime_error("config: channel_model must be 'iid' or 'exp:<c>'");
}

// One `key = value` per line, '#' comments.
inline ExperimentConfig parse_config_text(const std::string& text)
{
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(lineno) + " has no '='");
        apply_config_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

inline std::string config_to_string(const ExperimentConfig& cfg)
{
    std::ostringstream os;
    os.precision(17);
    os << "n = " << cfg.n << "\n"
       << "k = " << cfg.k << "\n"
       << "m = " << cfg.m << "\n"
       << "l_i = " << cfg.l_i << "\n"
       << "l_n = " << cfg.l_n << "\n";
    os << "b = ";
    for (std::size_t i = 0; i < cfg.b_list.size(); ++i)
        os << (i ? "," : "") << cfg.b_list[i];
    os << "\n";
    os << "rho = " << cfg.rho << "\n"
       << "epsilon = " << cfg.epsilon << "\n"
       << "max_iterations = " << cfg.max_iterations << "\n"
       << "channel_model = " << cfg.channel_model << "\n"
       << "k_hat_mode = " << cfg.k_hat_mode << "\n";
    os << "k0 = ";
    for (std::size_t i = 0; i < cfg.k0_list.size(); ++i)
        os << (i ? "," : "") << cfg.k0_list[i];
    os << "\n";
    os << "trials = " << cfg.trials << "\n"
       << "master_seed = " << cfg.master_seed << "\n";
    if (!cfg.threshold_grid.empty()) {
        os << "threshold_grid = ";
        for (std::size_t i = 0; i < cfg.threshold_grid.size(); ++i)
            os << (i ? "," : "") << cfg.threshold_grid[i];
        os << "\n";
    }
    os << "beta = " << cfg.beta << "\n"
       << "sigma2 = " << cfg.sigma2 << "\n"
       << "inner_epsilon = " << cfg.inner_epsilon << "\n"
       << "inner_max_iterations = " << cfg.inner_max_iterations << "\n"
       << "threads = " << cfg.threads << "\n";
    return os.str();
}

} // namespace covadc
