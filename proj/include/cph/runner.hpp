#pragma once

// Orchestration layer behind the CLI: a flat config mirroring the flags,
// figure-reproduction presets, and the run() dispatcher that writes the
// delimiter-separated output files.

#include "cph/detection.hpp"
#include "cph/hole_solver.hpp"

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace cph {

struct RunConfig {
    std::string command;  // solve | scan | correlations | reproduce-fig2 | reproduce-fig3
    int n1 = 2, n2 = 2;
    double r = 1e-4;
    double gamma = 1.7320508075688772;  // sqrt(3)
    double phi = 0.0;                   // state phase for `correlations`
    double gamma_max = 1e6;
    int phi_points = 128;
    double phi_min = 0.0;
    double phi_max = 6.283185307179586;  // grid is [phi_min, phi_max), end exclusive
    int k1 = 2, k2 = 2;
    double eta1 = 1.0, eta2 = 1.0;
    long long pulses = 0;
    double tail_epsilon = 1e-12;
    int hard_max = 128;
    int m_order = -1, n_order = -1;  // correlation orders; -1 means use n1, n2
    int mixtures = 0;                // correlations: classical-mixture trials
    unsigned long long seed = 1;
    std::string output;  // CSV path; empty writes no file
    std::vector<std::pair<std::string, std::string>> provenance;  // flag -> verbatim value
};

// Presets matching the two measured cases: (2,2) at gamma^2 = 3 and (5,0) at
// gamma = 15/(5-sqrt(10)), both at 12.5% transmission.  r = 0.2 is an assumed
// plausible squeeze (the flux behind the published curves is not stated).
RunConfig fig2_config();
RunConfig fig3_config();

ScanConfig<double> to_scan_config(const RunConfig& config);

// One random two-mode classical state (mixture of Poissonian products with a
// nonnegative-separable structure) and its g values at the three tested
// orders.  Used by the correlations --mixtures subcommand and the
// classical-bound acceptance suite.
struct MixtureTrial {
    double g11 = 0, g22 = 0, g50 = 0;
};
MixtureTrial random_product_mixture_g(std::mt19937_64& rng);

int run(const RunConfig& config);

}  // namespace cph
