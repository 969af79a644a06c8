#pragma once

// Single-mode truncated Fock-space states: coherent, squeezed vacuum, thermal
// and Poissonian photon-number statistics.  All factorial arithmetic is done
// in log space so that high photon numbers (n ~ 100) stay finite in double
// precision.  Cutoffs are selected from analytic tail bounds, never guessed.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace cph {

template <class Real>
using ComplexVec = Eigen::Vector<std::complex<Real>, Eigen::Dynamic>;
template <class Real>
using RealVec = Eigen::Vector<Real, Eigen::Dynamic>;

// Raised when a state cannot be truncated within CutoffPolicy::hard_max.
struct cutoff_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ln(n!).  Tabulated with long-double accumulation; good to ~17 digits,
// comfortably beyond the 12 the solver needs.
inline double log_factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(4097);
        long double acc = 0.0L;
        t[0] = 0.0;
        for (std::size_t k = 1; k < t.size(); ++k) {
            acc += std::log(static_cast<long double>(k));
            t[k] = static_cast<double>(acc);
        }
        return t;
    }();
    if (n < 0) throw std::invalid_argument("log_factorial: n must be >= 0");
    if (n < static_cast<int>(table.size())) return table[n];
    return std::lgamma(static_cast<double>(n) + 1.0);
}

inline double log_binomial(int n, int k) {
    if (k < 0 || k > n) throw std::invalid_argument("log_binomial: need 0 <= k <= n");
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

// Truncation contract: a constructor may discard at most tail_epsilon of
// probability and may never allocate beyond hard_max photons.
template <class Real = double>
struct CutoffPolicy {
    Real tail_epsilon = Real(1e-12);
    int hard_max = 128;
};

// Pure single-mode state: amplitudes[n] multiplies |n>, n = 0..cutoff.
// tail_bound bounds the probability weight lost to truncation.
template <class Real = double>
struct FockVector {
    ComplexVec<Real> amplitudes;
    Real tail_bound = Real(0);

    int cutoff() const { return static_cast<int>(amplitudes.size()) - 1; }
    Real norm_sq() const { return amplitudes.squaredNorm(); }
};

namespace detail {

template <class Real>
void require_headroom(Real mean, const CutoffPolicy<Real>& policy, const char* who) {
    if (!(policy.tail_epsilon > Real(0)) || policy.tail_epsilon >= Real(1))
        throw std::invalid_argument(std::string(who) + ": tail_epsilon must be in (0,1)");
    if (Real(4) * mean > Real(policy.hard_max))
        throw cutoff_error(std::string(who) + ": hard_max=" + std::to_string(policy.hard_max) +
                           " is below 4x the mean photon number " + std::to_string(double(mean)) +
                           "; raise hard_max or lower the flux");
}

// Smallest cutoff c with Pr[X > c] <= eps for X ~ Poisson(mean), via the
// Chernoff bound Pr[X >= k] <= exp(-mean + k - k ln(k/mean)) for k > mean.
template <class Real>
int poisson_cutoff(Real mean, const CutoffPolicy<Real>& policy, int min_cutoff, const char* who) {
    require_headroom(mean, policy, who);
    if (min_cutoff > policy.hard_max)
        throw cutoff_error(std::string(who) + ": requested min_cutoff exceeds hard_max");
    if (mean <= Real(0)) return std::max(0, min_cutoff);
    const double m = static_cast<double>(mean);
    const double log_eps = std::log(static_cast<double>(policy.tail_epsilon));
    int c = std::max(min_cutoff, static_cast<int>(std::ceil(m)));
    for (; c <= policy.hard_max; ++c) {
        const double k = c + 1;
        if (k <= m) continue;
        if (-m + k - k * std::log(k / m) <= log_eps) return c;
    }
    throw cutoff_error(std::string(who) + ": Poisson tail for mean " + std::to_string(m) +
                       " cannot be bounded by tail_epsilon within hard_max=" +
                       std::to_string(policy.hard_max));
}

}  // namespace detail

// |alpha> with alpha = magnitude * exp(i*phase):  a_n = e^{-|a|^2/2} alpha^n / sqrt(n!).
// min_cutoff forces extra (zero-weight) headroom so downstream consumers can
// index amplitudes up to a known photon number.
template <class Real = double>
FockVector<Real> coherent_state(Real magnitude, Real phase, const CutoffPolicy<Real>& policy = {},
                                int min_cutoff = 0) {
    if (!(magnitude >= Real(0)) || !std::isfinite(static_cast<double>(magnitude)))
        throw std::invalid_argument("coherent_state: magnitude must be finite and >= 0");
    const Real mean = magnitude * magnitude;
    const int cutoff = detail::poisson_cutoff(mean, policy, min_cutoff, "coherent_state");
    FockVector<Real> out;
    out.amplitudes = ComplexVec<Real>::Zero(cutoff + 1);
    if (magnitude == Real(0)) {
        out.amplitudes[0] = Real(1);
        return out;
    }
    const Real log_mag = std::log(magnitude);
    for (int n = 0; n <= cutoff; ++n) {
        const Real log_amp = -mean / Real(2) + Real(n) * log_mag - Real(log_factorial(n)) / Real(2);
        const Real mag_n = std::exp(log_amp);
        out.amplitudes[n] = std::polar(mag_n, Real(n) * phase);
    }
    out.tail_bound = std::max(Real(0), Real(1) - out.norm_sq());
    return out;
}

// Squeezed vacuum with squeezing phase fixed to zero:
//   a_{2m} = (-1)^m sqrt((2m)!) tanh^m r / (2^m m! sqrt(cosh r)),  odd terms = 0.
template <class Real = double>
FockVector<Real> squeezed_vacuum(Real r, const CutoffPolicy<Real>& policy = {}, int min_cutoff = 0) {
    if (!(r >= Real(0)) || !std::isfinite(static_cast<double>(r)))
        throw std::invalid_argument("squeezed_vacuum: r must be finite and >= 0");
    const Real sh = std::sinh(r);
    detail::require_headroom(sh * sh, policy, "squeezed_vacuum");
    if (min_cutoff > policy.hard_max)
        throw cutoff_error("squeezed_vacuum: requested min_cutoff exceeds hard_max");

    int pairs = 0;
    if (r > Real(0)) {
        // |a_{2(m+1)}|^2 / |a_{2m}|^2 = tanh^2(r) (2m+1)/(2m+2) <= q, so the
        // tail past pair index M is bounded by |a_{2M}|^2 q/(1-q).
        const Real q = std::tanh(r) * std::tanh(r);
        Real p = Real(1) / std::cosh(r);
        while (p * q / (Real(1) - q) > policy.tail_epsilon) {
            p *= q * Real(2 * pairs + 1) / Real(2 * pairs + 2);
            ++pairs;
            if (2 * pairs > policy.hard_max)
                throw cutoff_error("squeezed_vacuum: tail for r=" + std::to_string(double(r)) +
                                   " cannot be bounded by tail_epsilon within hard_max=" +
                                   std::to_string(policy.hard_max));
        }
    }
    const int cutoff = std::max(2 * pairs, min_cutoff);
    FockVector<Real> out;
    out.amplitudes = ComplexVec<Real>::Zero(cutoff + 1);
    const Real log_tanh = r > Real(0) ? std::log(std::tanh(r)) : Real(0);
    const Real log_cosh = std::log(std::cosh(r));
    for (int m = 0; 2 * m <= cutoff; ++m) {
        Real log_amp;
        if (m == 0) {
            log_amp = -log_cosh / Real(2);
        } else {
            if (r == Real(0)) break;
            log_amp = Real(log_factorial(2 * m)) / Real(2) - Real(m) * Real(M_LN2) -
                      Real(log_factorial(m)) + Real(m) * log_tanh - log_cosh / Real(2);
        }
        out.amplitudes[2 * m] = (m % 2 == 0 ? Real(1) : Real(-1)) * std::exp(log_amp);
    }
    out.tail_bound = std::max(Real(0), Real(1) - out.norm_sq());
    return out;
}

// Thermal photon-number distribution P(n) = nbar^n / (1+nbar)^{n+1}.
template <class Real = double>
RealVec<Real> thermal_distribution(Real nbar, const CutoffPolicy<Real>& policy = {}) {
    if (!(nbar >= Real(0)) || !std::isfinite(static_cast<double>(nbar)))
        throw std::invalid_argument("thermal_distribution: nbar must be finite and >= 0");
    detail::require_headroom(nbar, policy, "thermal_distribution");
    int cutoff = 0;
    if (nbar > Real(0)) {
        // Exact geometric tail: Pr[X > c] = (nbar/(1+nbar))^{c+1}.
        const double q = double(nbar) / (1.0 + double(nbar));
        cutoff = static_cast<int>(std::ceil(std::log(double(policy.tail_epsilon)) / std::log(q))) - 1;
        cutoff = std::max(cutoff, 0);
        if (cutoff > policy.hard_max)
            throw cutoff_error("thermal_distribution: tail for nbar=" + std::to_string(double(nbar)) +
                               " cannot be bounded within hard_max=" + std::to_string(policy.hard_max));
    }
    RealVec<Real> p = RealVec<Real>::Zero(cutoff + 1);
    const Real lq = nbar > Real(0) ? std::log(nbar) - std::log(Real(1) + nbar) : Real(0);
    const Real l1 = std::log(Real(1) + nbar);
    for (int n = 0; n <= cutoff; ++n)
        p[n] = nbar > Real(0) ? std::exp(Real(n) * lq - l1) : (n == 0 ? Real(1) : Real(0));
    return p;
}

// Poisson pmf with the same truncation contract; the photon statistics of a
// coherent state and the classical reference used by the correlation bounds.
template <class Real = double>
RealVec<Real> poisson_pmf(Real mean, const CutoffPolicy<Real>& policy = {}, int min_cutoff = 0) {
    if (!(mean >= Real(0)) || !std::isfinite(static_cast<double>(mean)))
        throw std::invalid_argument("poisson_pmf: mean must be finite and >= 0");
    const int cutoff = detail::poisson_cutoff(mean, policy, min_cutoff, "poisson_pmf");
    RealVec<Real> p = RealVec<Real>::Zero(cutoff + 1);
    if (mean == Real(0)) {
        p[0] = Real(1);
        return p;
    }
    const Real lm = std::log(mean);
    for (int n = 0; n <= cutoff; ++n)
        p[n] = std::exp(-mean + Real(n) * lm - Real(log_factorial(n)));
    return p;
}

}  // namespace cph
