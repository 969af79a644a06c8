#pragma once

// Equal-time Glauber correlation functions from photon-number statistics.
// Normal-ordered intensity moments equal falling-factorial moments of the
// number distribution, so everything here is moment arithmetic.

#include "cph/two_mode.hpp"

#include <stdexcept>
#include <string>

namespace cph {

struct zero_mean_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Real = double>
struct CorrelationReport {
    int m = 0, n = 0;  // correlation order; single-mode g^(k) is reported as (k, 0)
    Real value = Real(0);
    Real classical_margin = Real(0);  // value - 1; negative means nonclassical
    std::string label;
};

// sum_n P(n) n (n-1) ... (n-order+1)
template <class Real>
Real falling_moment(const RealVec<Real>& dist, int order) {
    if (order < 1) throw std::invalid_argument("falling_moment: order must be >= 1");
    Real acc = Real(0);
    for (int n = order; n < dist.size(); ++n) {
        Real f = Real(1);
        for (int i = 0; i < order; ++i) f *= Real(n - i);
        acc += dist[n] * f;
    }
    return acc;
}

template <class Real>
CorrelationReport<Real> g_n(const RealVec<Real>& dist, int order, std::string label = {}) {
    if (order < 1) throw std::invalid_argument("g_n: order must be >= 1");
    const Real mean = falling_moment(dist, 1);
    if (!(mean > Real(0))) throw zero_mean_error("g_n: mean photon number is zero");
    CorrelationReport<Real> rep;
    rep.m = order;
    rep.n = 0;
    rep.value = falling_moment(dist, order) / std::pow(mean, Real(order));
    rep.classical_margin = rep.value - Real(1);
    rep.label = std::move(label);
    return rep;
}

// Two-point g^(m,n) = <[n1]_m [n2]_n> / (<n1>^m <n2>^n); with n = 0 it
// reduces to g^(m) of the first marginal (and symmetrically).
template <class Real>
CorrelationReport<Real> g_mn(const JointDistribution<Real>& dist, int m, int n,
                             std::string label = {}) {
    if (m < 0 || n < 0 || m + n < 1) throw std::invalid_argument("g_mn: need m,n >= 0, m+n >= 1");
    const RealVec<Real> p1 = dist.probs.rowwise().sum();
    const RealVec<Real> p2 = dist.probs.colwise().sum().transpose();
    const Real mean1 = falling_moment(p1, 1);
    const Real mean2 = falling_moment(p2, 1);
    if (m > 0 && !(mean1 > Real(0))) throw zero_mean_error("g_mn: mode-1 mean is zero");
    if (n > 0 && !(mean2 > Real(0))) throw zero_mean_error("g_mn: mode-2 mean is zero");

    RealVec<Real> f1 = RealVec<Real>::Zero(dist.probs.rows());
    RealVec<Real> f2 = RealVec<Real>::Zero(dist.probs.cols());
    for (int i = 0; i < f1.size(); ++i) {
        Real f = Real(1);
        for (int k = 0; k < m; ++k) f *= Real(i - k);
        f1[i] = (i >= m) ? f : Real(0);
        if (m == 0) f1[i] = Real(1);
    }
    for (int i = 0; i < f2.size(); ++i) {
        Real f = Real(1);
        for (int k = 0; k < n; ++k) f *= Real(i - k);
        f2[i] = (i >= n) ? f : Real(0);
        if (n == 0) f2[i] = Real(1);
    }
    const Real numer = f1.transpose() * dist.probs * f2;
    const Real denom = (m > 0 ? std::pow(mean1, Real(m)) : Real(1)) *
                       (n > 0 ? std::pow(mean2, Real(n)) : Real(1));
    CorrelationReport<Real> rep;
    rep.m = m;
    rep.n = n;
    rep.value = numer / denom;
    rep.classical_margin = rep.value - Real(1);
    rep.label = std::move(label);
    return rep;
}

// Minimum falling-moment product any classical state with the same singles
// rates can produce: mean1^m * mean2^n (g = 1 saturation).  The click-unit
// counterpart (the dashed floor of a lossy scan) lives with the detector
// model; see classical_floor in detection.hpp.
template <class Real>
Real classical_floor(const JointDistribution<Real>& dist, int m, int n) {
    if (m < 0 || n < 0 || m + n < 1)
        throw std::invalid_argument("classical_floor: need m,n >= 0, m+n >= 1");
    const Real mean1 = mean_photon(dist, 1);
    const Real mean2 = mean_photon(dist, 2);
    return (m > 0 ? std::pow(mean1, Real(m)) : Real(1)) *
           (n > 0 ? std::pow(mean2, Real(n)) : Real(1));
}

}  // namespace cph
