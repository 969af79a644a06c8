#include "cph/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

namespace cph {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::vector<double> linspace_period(double lo, double hi, int points) {
    if (points < 1) throw std::invalid_argument("phi-points must be >= 1");
    if (!(hi > lo)) throw std::invalid_argument("phi-max must exceed phi-min");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / points;  // end exclusive
    return grid;
}

// Provenance block: the verbatim CLI flags first, then the resolved numeric
// configuration, so an output file always identifies the run that made it.
void write_header(std::ostream& out, const RunConfig& config) {
    out << "# cph " << (config.command.empty() ? "(library)" : config.command) << "\n";
    for (const auto& [flag, value] : config.provenance) out << "# " << flag << " = " << value << "\n";
    out << "# effective: n1 = " << config.n1 << "\n";
    out << "# effective: n2 = " << config.n2 << "\n";
    out << "# effective: r = " << fmt(config.r) << "\n";
    out << "# effective: gamma = " << fmt(config.gamma) << "\n";
    out << "# effective: phi = " << fmt(config.phi) << "\n";
    out << "# effective: phi-min = " << fmt(config.phi_min) << "\n";
    out << "# effective: phi-max = " << fmt(config.phi_max) << "\n";
    out << "# effective: phi-points = " << config.phi_points << "\n";
    out << "# effective: k1 = " << config.k1 << "\n";
    out << "# effective: k2 = " << config.k2 << "\n";
    out << "# effective: eta1 = " << fmt(config.eta1) << "\n";
    out << "# effective: eta2 = " << fmt(config.eta2) << "\n";
    out << "# effective: pulses = " << config.pulses << "\n";
    out << "# effective: tail-eps = " << fmt(config.tail_epsilon) << "\n";
    out << "# effective: hard-max = " << config.hard_max << "\n";
    out << "# effective: seed = " << config.seed << "\n";
}

std::ofstream open_output(const RunConfig& config) {
    std::ofstream file;
    if (config.output.empty()) return file;
    file.open(config.output, std::ios::binary);  // '\n' endings on every platform
    if (!file) throw std::runtime_error("cannot open output file: " + config.output);
    write_header(file, config);
    return file;
}

CutoffPolicy<double> to_policy(const RunConfig& config) {
    return CutoffPolicy<double>{config.tail_epsilon, config.hard_max};
}

JointDistribution<double> state_distribution(const RunConfig& config, double phi) {
    const int min_cut = config.n1 + config.n2;
    const auto coh =
        coherent_state(std::sqrt(config.gamma * config.r), phi, to_policy(config), min_cut);
    const auto sq = squeezed_vacuum(config.r, to_policy(config), min_cut);
    return joint_distribution(beamsplitter(tensor(coh, sq)));
}

int run_solve(const RunConfig& config) {
    HoleSpec<double> spec;
    spec.n1 = config.n1;
    spec.n2 = config.n2;
    spec.r = config.r;
    spec.gamma_max = config.gamma_max;
    spec.policy = to_policy(config);
    const auto solutions = solve_holes(spec);

    std::cout << "holes of the (" << config.n1 << "," << config.n2 << ") coincidence at r=" << fmt(config.r)
              << ": " << solutions.size() << " solution(s)\n";
    std::cout << "index   gamma        phi          phi/pi       residual\n";
    for (const auto& s : solutions)
        std::cout << s.root_index << "       " << fmt(s.gamma, "%.6f") << "     " << fmt(s.phi, "%.6f")
                  << "     " << fmt(s.phi / M_PI, "%.6f") << "     " << fmt(s.residual, "%.3e") << "\n";

    auto file = open_output(config);
    if (file.is_open()) {
        file << "# columns: root_index,gamma,phi,residual\n";
        for (const auto& s : solutions)
            file << s.root_index << "," << fmt(s.gamma) << "," << fmt(s.phi) << "," << fmt(s.residual)
                 << "\n";
    }
    return 0;
}

int run_scan(const RunConfig& config) {
    const auto scan = to_scan_config(config);
    const auto result = phase_scan(scan);

    std::cout << "scan of the (" << config.n1 << "," << config.n2 << ") click coincidence, " << config.phi_points
              << " phases\n";
    std::cout << "visibility = " << fmt(result.visibility, "%.6f") << "\n";
    std::cout << "classical_floor = " << fmt(result.floor, "%.6e") << "\n";
    for (const auto& m : result.minima) {
        std::cout << "minimum: phi = " << fmt(m.phi, "%.9f") << ", coincidence = " << fmt(m.coincidence, "%.6e")
                  << ", g = " << fmt(m.g, "%.6f") << ", floor_margin = " << fmt(m.floor_margin, "%.6e");
        if (config.pulses > 0) std::cout << ", sigma = " << fmt(m.sigma, "%.2f");
        std::cout << "\n";
    }
    std::cout << "distinct hole phases (mod pi):";
    for (double p : result.distinct_phases_mod_pi) std::cout << " " << fmt(p, "%.9f");
    std::cout << "\n";

    auto file = open_output(config);
    if (file.is_open()) {
        file << "# columns: phi,coincidence_prob,singles1,singles2,g_mn,classical_floor\n";
        for (const auto& pt : result.points)
            file << fmt(pt.phi) << "," << fmt(pt.coincidence) << "," << fmt(pt.singles1) << ","
                 << fmt(pt.singles2) << "," << fmt(pt.g) << "," << fmt(result.floor) << "\n";
    }
    return 0;
}

int run_mixture_trials(const RunConfig& config) {
    std::mt19937_64 rng(config.seed);
    double min_margin = std::numeric_limits<double>::infinity();
    std::vector<MixtureTrial> trials(config.mixtures);
    for (int t = 0; t < config.mixtures; ++t) {
        trials[t] = random_product_mixture_g(rng);
        min_margin = std::min({min_margin, trials[t].g11 - 1.0, trials[t].g22 - 1.0, trials[t].g50 - 1.0});
    }
    std::cout << config.mixtures << " random classical mixtures (seed " << config.seed << ")\n";
    std::cout << "minimum classical margin over g^(1,1), g^(2,2), g^(5,0): " << fmt(min_margin, "%.3e")
              << (min_margin >= -1e-10 ? "  (bound respected)" : "  (BOUND VIOLATED)") << "\n";

    auto file = open_output(config);
    if (file.is_open()) {
        file << "# columns: trial,g11,g22,g50\n";
        for (int t = 0; t < config.mixtures; ++t)
            file << t << "," << fmt(trials[t].g11) << "," << fmt(trials[t].g22) << "," << fmt(trials[t].g50)
                 << "\n";
    }
    return 0;
}

int run_correlations(const RunConfig& config) {
    if (config.mixtures > 0) return run_mixture_trials(config);

    const int m = config.m_order >= 0 ? config.m_order : config.n1;
    const int n = config.n_order >= 0 ? config.n_order : config.n2;
    const auto dist = state_distribution(config, config.phi);

    std::vector<CorrelationReport<double>> reports;
    reports.push_back(g_mn(dist, m, n, "g"));
    const RealVec<double> p1 = dist.probs.rowwise().sum();
    const RealVec<double> p2 = dist.probs.colwise().sum().transpose();
    const int max_order = std::max({3, m, n});
    for (int k = 1; k <= max_order; ++k) {
        if (falling_moment(p1, 1) > 0) reports.push_back(g_n(p1, k, "g1"));
        if (falling_moment(p2, 1) > 0) reports.push_back(g_n(p2, k, "g2"));
    }

    std::cout << "correlations at gamma=" << fmt(config.gamma, "%.6f") << ", phi=" << fmt(config.phi, "%.6f")
              << ", r=" << fmt(config.r) << "\n";
    for (const auto& rep : reports)
        std::cout << rep.label << "^(" << rep.m << "," << rep.n << ") = " << fmt(rep.value, "%.12g")
                  << "   classical margin = " << fmt(rep.classical_margin, "%.3e") << "\n";

    auto file = open_output(config);
    if (file.is_open()) {
        file << "# columns: label,m,n,value,classical_margin\n";
        for (const auto& rep : reports)
            file << rep.label << "," << rep.m << "," << rep.n << "," << fmt(rep.value) << ","
                 << fmt(rep.classical_margin) << "\n";
    }
    return 0;
}

}  // namespace

RunConfig fig2_config() {
    RunConfig config;
    config.command = "reproduce-fig2";
    config.n1 = 2;
    config.n2 = 2;
    config.gamma = std::sqrt(3.0);
    config.r = 0.2;
    config.k1 = 2;
    config.k2 = 2;
    config.eta1 = 0.125;
    config.eta2 = 0.125;
    return config;
}

RunConfig fig3_config() {
    RunConfig config;
    config.command = "reproduce-fig3";
    config.n1 = 5;
    config.n2 = 0;
    config.gamma = 15.0 / (5.0 - std::sqrt(10.0));
    config.r = 0.2;
    config.k1 = 5;
    config.eta1 = 0.125;
    config.k2 = 1;  // mode 2 unmonitored: zero-efficiency placeholder array
    config.eta2 = 0.0;
    return config;
}

ScanConfig<double> to_scan_config(const RunConfig& config) {
    ScanConfig<double> scan;
    scan.n1 = config.n1;
    scan.n2 = config.n2;
    scan.gamma = config.gamma;
    scan.r = config.r;
    scan.detectors1 = DetectorArray<double>{config.k1, config.eta1};
    scan.detectors2 = DetectorArray<double>{config.k2, config.eta2};
    scan.phi_grid = linspace_period(config.phi_min, config.phi_max, config.phi_points);
    scan.pulses = config.pulses;
    scan.policy = to_policy(config);
    return scan;
}

MixtureTrial random_product_mixture_g(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> component_count(1, 4);
    std::uniform_real_distribution<double> mean_draw(0.05, 2.0);
    std::exponential_distribution<double> weight_draw(1.0);
    std::uniform_int_distribution<int> variant_draw(0, 1);

    // Sharp truncation: order-5 falling moments must be exact to ~1e-12.
    const CutoffPolicy<double> sharp{1e-25, 128};
    const int size = static_cast<int>(poisson_pmf(2.0, sharp).size());

    auto draw_mixture = [&](std::vector<double>& means, std::vector<double>& weights) {
        const int k = component_count(rng);
        means.resize(k);
        weights.resize(k);
        double total = 0;
        for (int i = 0; i < k; ++i) {
            means[i] = mean_draw(rng);
            weights[i] = weight_draw(rng);
            total += weights[i];
        }
        for (double& w : weights) w /= total;
    };

    const int variant = variant_draw(rng);
    std::vector<double> means1, weights1;
    draw_mixture(means1, weights1);

    JointDistribution<double> dist;
    if (variant == 0) {
        // Statistically independent modes, each a classical Poisson mixture
        // (the separable-P-function family behind the two-point bound).
        std::vector<double> means2, weights2;
        draw_mixture(means2, weights2);
        RealVec<double> p1 = RealVec<double>::Zero(size), p2 = RealVec<double>::Zero(size);
        for (std::size_t i = 0; i < means1.size(); ++i)
            p1 += weights1[i] * poisson_pmf(means1[i], sharp, size - 1);
        for (std::size_t i = 0; i < means2.size(); ++i)
            p2 += weights2[i] * poisson_pmf(means2[i], sharp, size - 1);
        dist.probs = p1 * p2.transpose();
    } else {
        // Comonotone intensity noise: one classical intensity seen by both
        // modes, as for classical light split on a beamsplitter.
        dist.probs = RealGrid<double>::Zero(size, size);
        for (std::size_t i = 0; i < means1.size(); ++i) {
            const RealVec<double> p = poisson_pmf(means1[i], sharp, size - 1);
            dist.probs += weights1[i] * (p * p.transpose());
        }
    }

    MixtureTrial trial;
    trial.g11 = g_mn(dist, 1, 1).value;
    trial.g22 = g_mn(dist, 2, 2).value;
    trial.g50 = g_mn(dist, 5, 0).value;
    return trial;
}

int run(const RunConfig& config) {
    if (config.command == "solve") return run_solve(config);
    if (config.command == "scan" || config.command == "reproduce-fig2" || config.command == "reproduce-fig3")
        return run_scan(config);
    if (config.command == "correlations") return run_correlations(config);
    throw std::invalid_argument("unknown command: " + config.command);
}

}  // namespace cph
