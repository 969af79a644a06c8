#pragma once

// Two-mode composition and the balanced-beamsplitter transformation in the
// photon-number basis, plus photon-loss (binomial thinning) on joint
// number distributions.

#include "cph/fock.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <stdexcept>

namespace cph {

template <class Real>
using ComplexGrid = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using RealGrid = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

// Joint pure state: grid(n1, n2) multiplies |n1>|n2>.
template <class Real = double>
struct TwoModeState {
    ComplexGrid<Real> grid;
    Real tail_bound = Real(0);

    int cutoff1() const { return static_cast<int>(grid.rows()) - 1; }
    int cutoff2() const { return static_cast<int>(grid.cols()) - 1; }
    Real norm_sq() const { return grid.squaredNorm(); }
};

// Joint photon-number distribution (generally mixed after loss).
template <class Real = double>
struct JointDistribution {
    RealGrid<Real> probs;
    Real tail_bound = Real(0);

    int cutoff1() const { return static_cast<int>(probs.rows()) - 1; }
    int cutoff2() const { return static_cast<int>(probs.cols()) - 1; }
    Real total() const { return probs.sum(); }
};

// Convention (fixed): a† -> sqrt(t) c† + sqrt(1-t) d†,  b† -> sqrt(1-t) c† - sqrt(t) d†.
// At t = 1/2 this is the real symmetric 50/50 splitter.
template <class Real = double>
struct BeamsplitterSpec {
    Real transmissivity = Real(0.5);
};

template <class Real>
TwoModeState<Real> tensor(const FockVector<Real>& a, const FockVector<Real>& b) {
    TwoModeState<Real> out;
    out.grid = a.amplitudes * b.amplitudes.transpose();
    out.tail_bound = a.tail_bound + b.tail_bound;  // union bound
    return out;
}

// Exact block-unitary action, expanded per input basis state:
// |n1,n2> maps into the total-photon sector N = n1+n2 only.
template <class Real>
TwoModeState<Real> beamsplitter(const TwoModeState<Real>& state, const BeamsplitterSpec<Real>& spec = {}) {
    const Real t = spec.transmissivity;
    if (!(t >= Real(0) && t <= Real(1)))
        throw std::invalid_argument("beamsplitter: transmissivity must be in [0,1]");
    const int c1 = state.cutoff1(), c2 = state.cutoff2();
    const int n_max = c1 + c2;
    const Real st = std::sqrt(t), sr = std::sqrt(Real(1) - t);

    TwoModeState<Real> out;
    out.grid = ComplexGrid<Real>::Zero(n_max + 1, n_max + 1);
    out.tail_bound = state.tail_bound;

    for (int n1 = 0; n1 <= c1; ++n1) {
        for (int n2 = 0; n2 <= c2; ++n2) {
            const std::complex<Real> amp = state.grid(n1, n2);
            if (amp == std::complex<Real>(0)) continue;
            const int N = n1 + n2;
            const Real log_in = Real(log_factorial(n1) + log_factorial(n2));
            for (int m1 = 0; m1 <= N; ++m1) {
                const int m2 = N - m1;
                // coefficient of |m1,m2> in (st c† + sr d†)^{n1} (sr c† - st d†)^{n2} / norms
                Real coeff = Real(0);
                const int j_lo = std::max(0, m1 - n2), j_hi = std::min(n1, m1);
                const Real log_ratio =
                    (Real(log_factorial(m1) + log_factorial(m2)) - log_in) / Real(2);
                for (int j = j_lo; j <= j_hi; ++j) {
                    const int from_b_to_d = n2 - (m1 - j);
                    Real term = std::exp(Real(log_binomial(n1, j) + log_binomial(n2, m1 - j)) + log_ratio);
                    term *= std::pow(st, Real(j + from_b_to_d)) * std::pow(sr, Real(n1 - j + m1 - j));
                    coeff += (from_b_to_d % 2 != 0) ? -term : term;
                }
                out.grid(m1, m2) += amp * coeff;
            }
        }
    }
    return out;
}

template <class Real>
std::complex<Real> amplitude(const TwoModeState<Real>& state, int n1, int n2) {
    if (n1 < 0 || n2 < 0 || n1 > state.cutoff1() || n2 > state.cutoff2())
        throw std::out_of_range("amplitude: (n1,n2) outside the state's cutoffs");
    return state.grid(n1, n2);
}

// Closed form for coherent ⊗ vacuum through the 50/50 splitter:
//   A = e^{-|alpha|^2/2} (alpha/sqrt(2))^{N1+N2} / sqrt(N1! N2!),  alpha = magnitude e^{i phase}.
// Independent oracle for the full pipeline at r = 0.
template <class Real = double>
std::complex<Real> coherent_only_amplitude(Real magnitude, Real phase, int n1, int n2) {
    if (n1 < 0 || n2 < 0) throw std::invalid_argument("coherent_only_amplitude: negative photon number");
    const int N = n1 + n2;
    const Real mean = magnitude * magnitude;
    if (N == 0) return std::exp(-mean / Real(2));
    if (magnitude == Real(0)) return Real(0);
    const Real log_mag = -mean / Real(2) + Real(N) * (std::log(magnitude) - Real(M_LN2) / Real(2)) -
                         Real(log_factorial(n1) + log_factorial(n2)) / Real(2);
    return std::polar(std::exp(log_mag), Real(N) * phase);
}

template <class Real>
JointDistribution<Real> joint_distribution(const TwoModeState<Real>& state) {
    JointDistribution<Real> out;
    out.probs = state.grid.cwiseAbs2();
    out.tail_bound = state.tail_bound;
    return out;
}

namespace detail {

// Phases separated by pi are physically equivalent here (the SPDC amplitude
// depends on e^{-2i phi}); fold into [0, pi), treating values within rounding
// noise of pi as zero.
template <class Real>
Real phi_mod_pi(Real phi) {
    Real p = std::fmod(phi, Real(M_PI));
    if (p < Real(0)) p += Real(M_PI);
    if (Real(M_PI) - p < Real(1e-9)) p = Real(0);
    return p;
}

template <class Real>
Real phi_distance(Real a, Real b) {
    const Real d = std::abs(a - b);
    return std::min(d, Real(M_PI) - d);
}

// Binomial thinning matrix: T(k, n) = C(n,k) eta^k (1-eta)^{n-k}.
template <class Real>
RealGrid<Real> thinning_matrix(Real eta, int size) {
    RealGrid<Real> T = RealGrid<Real>::Zero(size, size);
    for (int n = 0; n < size; ++n)
        for (int k = 0; k <= n; ++k)
            T(k, n) = std::exp(Real(log_binomial(n, k))) * std::pow(eta, Real(k)) *
                      std::pow(Real(1) - eta, Real(n - k));
    return T;
}

}  // namespace detail

// Independent photon loss per mode: P' = T1 P T2ᵀ.
template <class Real>
JointDistribution<Real> loss_channel(const JointDistribution<Real>& dist, Real eta1, Real eta2) {
    if (!(eta1 >= Real(0) && eta1 <= Real(1) && eta2 >= Real(0) && eta2 <= Real(1)))
        throw std::invalid_argument("loss_channel: efficiencies must be in [0,1]");
    const auto T1 = detail::thinning_matrix(eta1, static_cast<int>(dist.probs.rows()));
    const auto T2 = detail::thinning_matrix(eta2, static_cast<int>(dist.probs.cols()));
    JointDistribution<Real> out;
    out.probs = T1 * dist.probs * T2.transpose();
    out.tail_bound = dist.tail_bound;
    return out;
}

template <class Real>
Real mean_photon(const JointDistribution<Real>& dist, int mode) {
    if (mode != 1 && mode != 2) throw std::invalid_argument("mean_photon: mode must be 1 or 2");
    RealVec<Real> marginal;
    if (mode == 1)
        marginal = dist.probs.rowwise().sum();
    else
        marginal = dist.probs.colwise().sum().transpose();
    Real acc = Real(0);
    for (int n = 0; n < marginal.size(); ++n) acc += Real(n) * marginal[n];
    return acc;
}

}  // namespace cph
