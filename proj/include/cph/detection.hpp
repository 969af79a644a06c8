#pragma once

// Multiplexed click-detector model and phase-scan experiments.  A detector
// "array" is k on/off detectors behind a balanced k-way split, each with
// efficiency eta (upstream transmission folds into eta; see the loss-folding
// property verified in the tests).

#include "cph/correlations.hpp"
#include "cph/parallel.hpp"
#include "cph/two_mode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cph {

template <class Real = double>
struct DetectorArray {
    int k = 1;           // number of multiplexed on/off detectors
    Real eta = Real(1);  // per-detector efficiency, all upstream loss included
};

// Probability that n photons produce exactly c clicks:
//   C(k,c) sum_{j=0..c} (-1)^j C(c,j) (eta (c-j)/k + 1 - eta)^n
// (inclusion-exclusion over which of the c detectors stay dark).
template <class Real>
Real click_probability(int c, int n, const DetectorArray<Real>& array) {
    if (array.k < 1) throw std::invalid_argument("click_probability: need k >= 1");
    if (!(array.eta >= Real(0) && array.eta <= Real(1)))
        throw std::invalid_argument("click_probability: eta must be in [0,1]");
    if (c < 0 || c > array.k) throw std::invalid_argument("click_probability: need 0 <= c <= k");
    if (n < 0) throw std::invalid_argument("click_probability: need n >= 0");
    if (c > n) return Real(0);
    Real acc = Real(0);
    for (int j = 0; j <= c; ++j) {
        const Real base = array.eta * Real(c - j) / Real(array.k) + Real(1) - array.eta;
        const Real term = std::exp(Real(log_binomial(c, j))) * std::pow(base, Real(n));
        acc += (j % 2 != 0) ? -term : term;
    }
    return std::exp(Real(log_binomial(array.k, c))) * acc;
}

namespace detail {

template <class Real>
RealVec<Real> click_vector(int c, int size, const DetectorArray<Real>& array) {
    RealVec<Real> v(size);
    for (int n = 0; n < size; ++n) v[n] = click_probability(c, n, array);
    return v;
}

}  // namespace detail

// Probability of exactly (c1, c2) clicks on the two output arrays.
template <class Real>
Real coincidence_probability(const JointDistribution<Real>& dist, int c1, int c2,
                             const DetectorArray<Real>& array1, const DetectorArray<Real>& array2) {
    const auto v1 = detail::click_vector(c1, static_cast<int>(dist.probs.rows()), array1);
    const auto v2 = detail::click_vector(c2, static_cast<int>(dist.probs.cols()), array2);
    return v1.transpose() * dist.probs * v2;
}

// Dashed-line classical bound in click units: the (m,n)-click coincidence a
// Poissonian product with the same per-mode means would produce on the same
// arrays.  Any separable classical state yields at least this.
template <class Real>
Real classical_floor(const JointDistribution<Real>& dist, int m, int n,
                     const DetectorArray<Real>& array1, const DetectorArray<Real>& array2) {
    const CutoffPolicy<Real> policy{};
    JointDistribution<Real> ref;
    ref.probs = poisson_pmf(mean_photon(dist, 1), policy) *
                poisson_pmf(mean_photon(dist, 2), policy).transpose();
    return coincidence_probability(ref, m, n, array1, array2);
}

template <class Real>
Real visibility(const std::vector<Real>& curve) {
    if (curve.empty()) throw std::invalid_argument("visibility: empty curve");
    Real lo = curve[0], hi = curve[0];
    for (Real v : curve) {
        if (!(v >= Real(0))) throw std::invalid_argument("visibility: negative curve value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi + lo == Real(0)) return Real(0);
    return (hi - lo) / (hi + lo);
}

// One-sided Poisson significance of a deficit below the classical floor.
template <class Real>
Real bound_violation_sigma(Real probability, Real classical_floor, long long pulses) {
    if (pulses <= 0) throw std::invalid_argument("bound_violation_sigma: need pulses > 0");
    if (!(probability >= Real(0) && probability <= Real(1) && classical_floor >= Real(0) &&
          classical_floor <= Real(1)))
        throw std::invalid_argument("bound_violation_sigma: probability and floor must be in [0,1]");
    const Real lambda = probability * Real(pulses);
    const Real lambda_floor = classical_floor * Real(pulses);
    if (lambda >= lambda_floor || lambda_floor <= Real(0)) return Real(0);
    return (lambda_floor - lambda) / std::sqrt(lambda_floor);
}

template <class Real = double>
struct ScanConfig {
    int n1 = 2, n2 = 2;  // target click numbers
    Real gamma = Real(1);
    Real r = Real(0.2);
    DetectorArray<Real> detectors1{};
    DetectorArray<Real> detectors2{};
    std::vector<Real> phi_grid;
    long long pulses = 0;  // 0 disables the shot-noise model
    CutoffPolicy<Real> policy{};
};

template <class Real = double>
struct ScanPoint {
    Real phi = Real(0);
    Real coincidence = Real(0);
    Real singles1 = Real(0);  // eta * mean photon number reaching array 1
    Real singles2 = Real(0);
    Real g = Real(0);  // g^(n1,n2) of the lossless output state
};

template <class Real = double>
struct ScanMinimum {
    Real phi = Real(0);  // refined location
    Real coincidence = Real(0);
    Real g = Real(0);
    Real floor_margin = Real(0);  // classical floor minus coincidence; > 0 is nonclassical
    Real sigma = Real(0);         // 0 when no pulse count was configured
};

template <class Real = double>
struct ScanResult {
    std::vector<ScanPoint<Real>> points;
    Real visibility = Real(0);
    Real floor = Real(0);  // click-unit classical bound (flat across the scan)
    std::vector<ScanMinimum<Real>> minima;
    std::vector<Real> distinct_phases_mod_pi;  // minima clustered modulo pi
};

namespace detail {

template <class Real>
JointDistribution<Real> scan_distribution(const ScanConfig<Real>& config, Real phi) {
    const int min_cut = config.n1 + config.n2;
    const auto coh =
        coherent_state(std::sqrt(config.gamma * config.r), phi, config.policy, min_cut);
    const auto sq = squeezed_vacuum(config.r, config.policy, min_cut);
    return joint_distribution(beamsplitter(tensor(coh, sq)));
}

// Golden-section minimization of fn over [lo, hi].
template <class Real, class Fn>
Real golden_minimize(Fn&& fn, Real lo, Real hi) {
    const Real inv_phi = (std::sqrt(Real(5)) - Real(1)) / Real(2);
    Real a = lo, b = hi;
    Real x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    Real f1 = fn(x1), f2 = fn(x2);
    for (int it = 0; it < 90 && (b - a) > Real(1e-13); ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = fn(x2);
        }
    }
    return (a + b) / Real(2);
}

}  // namespace detail

// Full phase-scan experiment: per grid point the lossless output statistics,
// click coincidence, singles and g^(n1,n2); summary with the click-unit
// classical floor, refined minima and their bound margins.
template <class Real>
ScanResult<Real> phase_scan(const ScanConfig<Real>& config) {
    if (config.phi_grid.empty()) throw std::invalid_argument("phase_scan: phi_grid is empty");
    for (std::size_t i = 1; i < config.phi_grid.size(); ++i)
        if (!(config.phi_grid[i] > config.phi_grid[i - 1]))
            throw std::invalid_argument("phase_scan: phi_grid must be strictly increasing");
    if (config.n1 < 0 || config.n1 > config.detectors1.k)
        throw std::invalid_argument("phase_scan: n1 must satisfy 0 <= n1 <= detectors1.k");
    if (config.n2 < 0 || config.n2 > config.detectors2.k)
        throw std::invalid_argument("phase_scan: n2 must satisfy 0 <= n2 <= detectors2.k");
    if (!(config.gamma > Real(0))) throw std::invalid_argument("phase_scan: gamma must be > 0");
    if (!(config.r >= Real(0))) throw std::invalid_argument("phase_scan: r must be >= 0");

    const int count = static_cast<int>(config.phi_grid.size());
    ScanResult<Real> result;
    result.points.resize(count);
    detail::parallel_for(count, [&](int i) {
        const Real phi = config.phi_grid[i];
        const auto dist = detail::scan_distribution(config, phi);
        ScanPoint<Real>& pt = result.points[i];
        pt.phi = phi;
        pt.coincidence =
            coincidence_probability(dist, config.n1, config.n2, config.detectors1, config.detectors2);
        pt.singles1 = config.detectors1.eta * mean_photon(dist, 1);
        pt.singles2 = config.detectors2.eta * mean_photon(dist, 2);
        pt.g = g_mn(dist, config.n1, config.n2).value;
    });

    std::vector<Real> curve(count);
    for (int i = 0; i < count; ++i) curve[i] = result.points[i].coincidence;
    result.visibility = visibility(curve);
    result.floor = classical_floor(detail::scan_distribution(config, config.phi_grid[0]),
                                   config.n1, config.n2, config.detectors1, config.detectors2);

    // Local minima; the grid is treated as one full period when it is uniform
    // and spans 2*pi, so a minimum sitting on the first point is not missed.
    const Real step = count > 1 ? config.phi_grid[1] - config.phi_grid[0] : Real(0);
    bool periodic = count > 2;
    for (int i = 1; i < count && periodic; ++i)
        if (std::abs((config.phi_grid[i] - config.phi_grid[i - 1]) - step) > Real(1e-9))
            periodic = false;
    if (periodic &&
        std::abs((config.phi_grid.back() - config.phi_grid.front()) + step - Real(2) * Real(M_PI)) >
            Real(1e-6))
        periodic = false;

    auto coincidence_at = [&](Real phi) {
        return coincidence_probability(detail::scan_distribution(config, phi), config.n1, config.n2,
                                       config.detectors1, config.detectors2);
    };
    for (int i = 0; i < count; ++i) {
        if (!periodic && (i == 0 || i == count - 1)) continue;
        const Real prev = curve[(i + count - 1) % count];
        const Real next = curve[(i + 1) % count];
        if (!(curve[i] < prev && curve[i] < next)) continue;
        const Real width = periodic ? step : std::min(config.phi_grid[i] - config.phi_grid[i - 1],
                                                      config.phi_grid[i + 1] - config.phi_grid[i]);
        ScanMinimum<Real> min_point;
        min_point.phi =
            detail::golden_minimize(coincidence_at, config.phi_grid[i] - width, config.phi_grid[i] + width);
        min_point.coincidence = coincidence_at(min_point.phi);
        min_point.g = g_mn(detail::scan_distribution(config, min_point.phi), config.n1, config.n2).value;
        min_point.floor_margin = result.floor - min_point.coincidence;
        min_point.sigma = config.pulses > 0
                              ? bound_violation_sigma(min_point.coincidence, result.floor, config.pulses)
                              : Real(0);
        result.minima.push_back(min_point);
    }

    std::vector<Real> folded;
    for (const auto& m : result.minima) folded.push_back(detail::phi_mod_pi(m.phi));
    std::sort(folded.begin(), folded.end());
    for (Real p : folded) {
        bool fresh = true;
        for (Real q : result.distinct_phases_mod_pi)
            if (detail::phi_distance(p, q) < Real(1e-4)) fresh = false;
        if (fresh) result.distinct_phases_mod_pi.push_back(p);
    }
    return result;
}

}  // namespace cph
