// cph: command-line front end for the correlated photon hole simulator.

#include "cph/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>

namespace {

std::string config_path;  // shared --config slot; only one subcommand parses

void add_truncation_options(CLI::App* cmd, cph::RunConfig& config) {
    cmd->add_option("--tail-eps", config.tail_epsilon, "max probability discarded by truncation")
        ->capture_default_str();
    cmd->add_option("--hard-max", config.hard_max, "hard ceiling on the Fock cutoff")
        ->capture_default_str();
    cmd->add_option("--output", config.output, "write a CSV file ('#'-commented header, then rows)");
    cmd->add_option("--config", config_path, "key=value file mirroring these flags");
}

void add_source_options(CLI::App* cmd, cph::RunConfig& config) {
    cmd->add_option("--gamma", config.gamma, "pair-amplitude ratio |alpha|^2/r")->capture_default_str();
    cmd->add_option("--r", config.r, "squeeze parameter")->capture_default_str();
}

void add_scan_options(CLI::App* cmd, cph::RunConfig& config) {
    cmd->add_option("--n1", config.n1, "target clicks on array 1")->capture_default_str();
    cmd->add_option("--n2", config.n2, "target clicks on array 2")->capture_default_str();
    add_source_options(cmd, config);
    cmd->add_option("--k1", config.k1, "detectors multiplexed on mode 1")->capture_default_str();
    cmd->add_option("--k2", config.k2, "detectors multiplexed on mode 2")->capture_default_str();
    cmd->add_option("--eta1", config.eta1, "efficiency (incl. transmission) on mode 1")
        ->capture_default_str();
    cmd->add_option("--eta2", config.eta2, "efficiency (incl. transmission) on mode 2")
        ->capture_default_str();
    cmd->add_option("--phi-min", config.phi_min, "first scan phase (radians)")->capture_default_str();
    cmd->add_option("--phi-max", config.phi_max, "end of the scan (exclusive)")->capture_default_str();
    cmd->add_option("--phi-points", config.phi_points, "number of scan phases")->capture_default_str();
    cmd->add_option("--pulses", config.pulses, "pump pulses for the shot-noise model (0 = off)")
        ->capture_default_str();
    add_truncation_options(cmd, config);
}

std::string trimmed(const std::string& text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

double parse_real(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    double parsed = 0;
    try {
        parsed = std::stod(value, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != value.size())
        throw std::runtime_error("config: value for '" + key + "' is not a number: '" + value + "'");
    return parsed;
}

long long parse_integer(const std::string& value, const std::string& key) {
    std::size_t used = 0;
    long long parsed = 0;
    try {
        parsed = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != value.size())
        throw std::runtime_error("config: value for '" + key + "' is not an integer: '" + value + "'");
    return parsed;
}

// Flat key=value file, '#' comments.  Command-line flags win over file values;
// keys are valid exactly when the matching flag exists on the subcommand.
void apply_config_file(const CLI::App* cmd, cph::RunConfig& config) {
    using Setter = std::function<void(cph::RunConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"n1", [](auto& c, auto& v, auto& k) { c.n1 = static_cast<int>(parse_integer(v, k)); }},
        {"n2", [](auto& c, auto& v, auto& k) { c.n2 = static_cast<int>(parse_integer(v, k)); }},
        {"r", [](auto& c, auto& v, auto& k) { c.r = parse_real(v, k); }},
        {"gamma", [](auto& c, auto& v, auto& k) { c.gamma = parse_real(v, k); }},
        {"gamma-max", [](auto& c, auto& v, auto& k) { c.gamma_max = parse_real(v, k); }},
        {"phi", [](auto& c, auto& v, auto& k) { c.phi = parse_real(v, k); }},
        {"phi-min", [](auto& c, auto& v, auto& k) { c.phi_min = parse_real(v, k); }},
        {"phi-max", [](auto& c, auto& v, auto& k) { c.phi_max = parse_real(v, k); }},
        {"phi-points", [](auto& c, auto& v, auto& k) { c.phi_points = static_cast<int>(parse_integer(v, k)); }},
        {"k1", [](auto& c, auto& v, auto& k) { c.k1 = static_cast<int>(parse_integer(v, k)); }},
        {"k2", [](auto& c, auto& v, auto& k) { c.k2 = static_cast<int>(parse_integer(v, k)); }},
        {"eta1", [](auto& c, auto& v, auto& k) { c.eta1 = parse_real(v, k); }},
        {"eta2", [](auto& c, auto& v, auto& k) { c.eta2 = parse_real(v, k); }},
        {"pulses", [](auto& c, auto& v, auto& k) { c.pulses = parse_integer(v, k); }},
        {"tail-eps", [](auto& c, auto& v, auto& k) { c.tail_epsilon = parse_real(v, k); }},
        {"hard-max", [](auto& c, auto& v, auto& k) { c.hard_max = static_cast<int>(parse_integer(v, k)); }},
        {"m", [](auto& c, auto& v, auto& k) { c.m_order = static_cast<int>(parse_integer(v, k)); }},
        {"n", [](auto& c, auto& v, auto& k) { c.n_order = static_cast<int>(parse_integer(v, k)); }},
        {"mixtures", [](auto& c, auto& v, auto& k) { c.mixtures = static_cast<int>(parse_integer(v, k)); }},
        {"seed",
         [](auto& c, auto& v, auto& k) { c.seed = static_cast<unsigned long long>(parse_integer(v, k)); }},
        {"output", [](auto& c, auto& v, auto&) { c.output = v; }},
    };

    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("config: cannot open '" + config_path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string content = trimmed(line);
        if (content.empty() || content[0] == '#') continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: line " + std::to_string(line_no) +
                                     " is not key=value: '" + content + "'");
        const std::string key = trimmed(content.substr(0, eq));
        const std::string value = trimmed(content.substr(eq + 1));
        const CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (key == "config" || opt == nullptr || setters.find(key) == setters.end())
            throw std::runtime_error("config: unknown key '" + key + "' for subcommand '" +
                                     cmd->get_name() + "'");
        if (opt->count() > 0) continue;  // explicit flag wins over the file
        setters.at(key)(config, value, key);
    }
}

void collect_provenance(const CLI::App* cmd, cph::RunConfig& config) {
    for (const CLI::Option* opt : cmd->get_options()) {
        if (opt->get_name() == "--config" || opt->count() == 0) continue;
        std::string joined;
        for (const auto& piece : opt->results()) {
            if (!joined.empty()) joined += ' ';
            joined += piece;
        }
        config.provenance.emplace_back(opt->get_name(), joined);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlated photon hole simulator: coherent + squeezed vacuum on a 50/50 splitter"};
    app.require_subcommand(1);

    cph::RunConfig solve_cfg;
    solve_cfg.command = "solve";
    solve_cfg.n1 = 1;
    solve_cfg.n2 = 1;
    solve_cfg.r = 1e-4;
    auto* solve = app.add_subcommand("solve", "find all (gamma, phi) canceling the N1,N2 coincidence");
    solve->add_option("--n1", solve_cfg.n1, "target photon number, mode 1")->capture_default_str();
    solve->add_option("--n2", solve_cfg.n2, "target photon number, mode 2")->capture_default_str();
    solve->add_option("--r", solve_cfg.r, "squeeze parameter for the solve")->capture_default_str();
    solve->add_option("--gamma-max", solve_cfg.gamma_max, "discard roots above this gamma")
        ->capture_default_str();
    add_truncation_options(solve, solve_cfg);

    cph::RunConfig scan_cfg;
    scan_cfg.command = "scan";
    scan_cfg.r = 0.2;
    auto* scan = app.add_subcommand("scan", "phase scan of the click coincidence and g^(n1,n2)");
    add_scan_options(scan, scan_cfg);

    cph::RunConfig corr_cfg;
    corr_cfg.command = "correlations";
    corr_cfg.r = 0.2;
    auto* corr = app.add_subcommand("correlations", "correlation report for one state, or classical-mixture trials");
    corr->add_option("--n1", corr_cfg.n1, "state label / default order m")->capture_default_str();
    corr->add_option("--n2", corr_cfg.n2, "state label / default order n")->capture_default_str();
    corr->add_option("--m", corr_cfg.m_order, "correlation order m (default n1)");
    corr->add_option("--n", corr_cfg.n_order, "correlation order n (default n2)");
    add_source_options(corr, corr_cfg);
    corr->add_option("--phi", corr_cfg.phi, "coherent-vs-SPDC phase of the state")->capture_default_str();
    corr->add_option("--mixtures", corr_cfg.mixtures, "instead: test K random classical mixtures")
        ->capture_default_str();
    corr->add_option("--seed", corr_cfg.seed, "RNG seed for --mixtures")->capture_default_str();
    add_truncation_options(corr, corr_cfg);

    cph::RunConfig fig2_cfg = cph::fig2_config();
    auto* fig2 = app.add_subcommand("reproduce-fig2", "preset: (2,2) hole scan at gamma^2=3, 12.5% transmission");
    add_scan_options(fig2, fig2_cfg);

    cph::RunConfig fig3_cfg = cph::fig3_config();
    auto* fig3 = app.add_subcommand("reproduce-fig3", "preset: (5,0) hole scan at gamma=15/(5-sqrt(10))");
    add_scan_options(fig3, fig3_cfg);

    CLI11_PARSE(app, argc, argv);

    cph::RunConfig* config = nullptr;
    const CLI::App* chosen = nullptr;
    if (solve->parsed()) config = &solve_cfg, chosen = solve;
    if (scan->parsed()) config = &scan_cfg, chosen = scan;
    if (corr->parsed()) config = &corr_cfg, chosen = corr;
    if (fig2->parsed()) config = &fig2_cfg, chosen = fig2;
    if (fig3->parsed()) config = &fig3_cfg, chosen = fig3;
    if (config == nullptr) {
        std::cerr << "error: no subcommand selected\n";
        return 2;
    }

    try {
        if (!config_path.empty()) apply_config_file(chosen, *config);
        collect_provenance(chosen, *config);
        return cph::run(*config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
