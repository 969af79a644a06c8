#pragma once

// Solves for the (gamma, phi_cs) parameter points that cancel the (N1, N2)
// coincidence amplitude of coherent ⊗ squeezed-vacuum light on a 50/50
// beamsplitter.
//
// The SPDC contributes photons only in pairs, so for fixed N = N1+N2 the
// amplitude is an exact polynomial of degree floor(N/2) in the reduced
// variable u = tanh(r) e^{-2i phi} / |alpha|^2, with coefficients that do not
// depend on r or alpha.  We recover those coefficients by sampling the full
// simulation on the unit circle of u (a roots-of-unity Vandermonde system,
// condition number 1), take companion-matrix eigenvalues as root seeds, and
// polish each seed with a damped two-variable Newton iteration on the exact
// truncated-Fock amplitude.

#include "cph/two_mode.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace cph {

struct fit_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct collision_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class Real = double>
struct HoleSpec {
    int n1 = 1;
    int n2 = 1;
    Real r = Real(1e-4);        // squeeze parameter used for the solve
    Real gamma_max = Real(1e6);  // discard roots with larger gamma
    CutoffPolicy<Real> policy{};
};

template <class Real = double>
struct HoleSolution {
    int n1 = 0, n2 = 0;
    Real gamma = Real(0);     // |alpha|^2 / r at the hole
    Real phi = Real(0);       // coherent-vs-SPDC phase, reduced to [0, pi)
    Real residual = Real(0);  // |A_{N1,N2}|^2 at the solution
    int root_index = 0;       // position in the gamma-sorted solution list
};

// Coefficients c_m of A = prefactor * sum_m c_m u^m, m = 0..floor((N1+N2)/2).
template <class Real = double>
struct HolePolynomial {
    ComplexVec<Real> coefficients;

    int degree(Real rel_tol = Real(1e-12)) const {
        const Real scale = coefficients.cwiseAbs().maxCoeff();
        int d = static_cast<int>(coefficients.size()) - 1;
        while (d > 0 && std::abs(coefficients[d]) <= rel_tol * scale) --d;
        return d;
    }
};

template <class Real>
std::complex<Real> evaluate(const HolePolynomial<Real>& poly, std::complex<Real> u) {
    std::complex<Real> acc(0);
    for (int m = static_cast<int>(poly.coefficients.size()) - 1; m >= 0; --m)
        acc = acc * u + poly.coefficients[m];
    return acc;
}

// Exact coincidence amplitude A_{N1,N2} at |alpha|^2 = gamma * r.
template <class Real>
std::complex<Real> hole_amplitude(Real gamma, Real phi, const HoleSpec<Real>& spec) {
    if (!(gamma > Real(0))) throw std::invalid_argument("hole_amplitude: gamma must be > 0");
    const int n = spec.n1 + spec.n2;
    const Real mag = std::sqrt(gamma * spec.r);
    const auto coh = coherent_state(mag, phi, spec.policy, n);
    const auto sq = squeezed_vacuum(spec.r, spec.policy, n);
    const auto out = beamsplitter(tensor(coh, sq));
    return amplitude(out, spec.n1, spec.n2);
}

// Global factor G with A = G * P(u):  G = e^{-|alpha|^2/2} (cosh r)^{-1/2}
// (alpha/sqrt(2))^N sqrt(N1! N2!).  Dividing samples of A by G isolates the
// r- and alpha-independent polynomial P.
template <class Real>
std::complex<Real> hole_prefactor(Real gamma, Real phi, const HoleSpec<Real>& spec) {
    const int n = spec.n1 + spec.n2;
    const Real beta = gamma * spec.r;  // |alpha|^2
    const Real log_mag = -beta / Real(2) - std::log(std::cosh(spec.r)) / Real(2) +
                         Real(n) * (std::log(beta) / Real(2) - Real(M_LN2) / Real(2)) +
                         Real(log_factorial(spec.n1) + log_factorial(spec.n2)) / Real(2);
    return std::polar(std::exp(log_mag), Real(n) * phi);
}

// Recover the polynomial coefficients from floor(N/2)+1 samples of the full
// simulation.  Sampling at |alpha|^2 = tanh(r) puts u on the unit circle, so
// the Vandermonde matrix is a DFT matrix and the fit is perfectly conditioned.
template <class Real = double>
HolePolynomial<Real> build_hole_polynomial(int n1, int n2) {
    if (n1 < 0 || n2 < 0 || n1 + n2 < 2)
        throw std::invalid_argument("build_hole_polynomial: need N1+N2 >= 2");
    const int n = n1 + n2;
    const int deg = n / 2;
    const int samples = deg + 1;

    HoleSpec<Real> fit;
    fit.n1 = n1;
    fit.n2 = n2;
    fit.r = Real(1e-3);
    const Real gamma_fit = std::tanh(fit.r) / fit.r;  // makes |u| = 1 exactly

    ComplexGrid<Real> vandermonde(samples, samples);
    ComplexVec<Real> rhs(samples);
    for (int j = 0; j < samples; ++j) {
        const Real phi = Real(M_PI) * Real(j) / Real(samples);
        const std::complex<Real> u = std::polar(Real(1), Real(-2) * phi);
        for (int m = 0; m < samples; ++m) vandermonde(j, m) = std::pow(u, m);
        rhs[j] = hole_amplitude(gamma_fit, phi, fit) / hole_prefactor(gamma_fit, phi, fit);
    }

    Eigen::JacobiSVD<ComplexGrid<Real>> svd(vandermonde, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Real cond = svd.singularValues()(0) / svd.singularValues()(samples - 1);
    if (!(cond < Real(1e8)))
        throw fit_error("build_hole_polynomial: Vandermonde condition number " +
                        std::to_string(double(cond)) + " exceeds 1e8; sample placement is degenerate");
    HolePolynomial<Real> poly;
    poly.coefficients = svd.solve(rhs);
    return poly;
}

// Nonzero roots of the polynomial via companion-matrix eigenvalues.
template <class Real>
std::vector<std::complex<Real>> polynomial_roots(const HolePolynomial<Real>& poly,
                                                 Real rel_tol = Real(1e-12)) {
    const int deg = poly.degree(rel_tol);
    if (deg == 0) return {};
    ComplexGrid<Real> companion = ComplexGrid<Real>::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = Real(1);
    for (int i = 0; i < deg; ++i)
        companion(i, deg - 1) = -poly.coefficients[i] / poly.coefficients[deg];
    Eigen::ComplexEigenSolver<ComplexGrid<Real>> es(companion);
    std::vector<std::complex<Real>> roots(es.eigenvalues().data(),
                                          es.eigenvalues().data() + deg);
    return roots;
}

// 2x2 derivative of (Re A, Im A) with respect to (gamma, phi), by central
// finite differences.  step_scale halves/doubles h for consistency checks.
template <class Real>
Eigen::Matrix<Real, 2, 2> jacobian(Real gamma, Real phi, const HoleSpec<Real>& spec,
                                   Real step_scale = Real(1)) {
    const Real hg = std::min(Real(1e-6) * std::max(Real(1), gamma), gamma / Real(2)) * step_scale;
    const Real hp = Real(1e-6) * step_scale;
    const auto dg = (hole_amplitude(gamma + hg, phi, spec) - hole_amplitude(gamma - hg, phi, spec)) /
                    (Real(2) * hg);
    const auto dp = (hole_amplitude(gamma, phi + hp, spec) - hole_amplitude(gamma, phi - hp, spec)) /
                    (Real(2) * hp);
    Eigen::Matrix<Real, 2, 2> j;
    j << dg.real(), dp.real(), dg.imag(), dp.imag();
    return j;
}

namespace detail {

// Cancellation quality target: 1e-16 of the coherent-only reference power.
template <class Real>
Real residual_tolerance(Real gamma, const HoleSpec<Real>& spec) {
    const Real mag = std::sqrt(gamma * spec.r);
    const auto ref = coherent_only_amplitude(mag, Real(0), spec.n1, spec.n2);
    return Real(1e-16) * std::norm(ref);
}

}  // namespace detail

// All holes of the given spec: polynomial-root seeds refined on the full
// simulation, gamma-sorted.  Throws convergence_error / collision_error on
// pathological inputs rather than silently dropping or merging roots.
template <class Real>
std::vector<HoleSolution<Real>> solve_holes(const HoleSpec<Real>& spec) {
    if (spec.n1 < 0 || spec.n2 < 0 || spec.n1 + spec.n2 < 2)
        throw std::invalid_argument("solve_holes: need N1+N2 >= 2");
    if (!(spec.r > Real(0))) throw std::invalid_argument("solve_holes: need r > 0");

    const auto poly = build_hole_polynomial<Real>(spec.n1, spec.n2);
    std::vector<HoleSolution<Real>> solutions;
    for (const auto& u : polynomial_roots(poly)) {
        if (std::abs(u) <= Real(1e-12)) continue;  // gamma -> infinity
        Real gamma = std::tanh(spec.r) / (spec.r * std::abs(u));
        if (gamma > spec.gamma_max) continue;
        Real phi = detail::phi_mod_pi(-std::arg(u) / Real(2));

        bool converged = false;
        Real residual = Real(0);
        for (int iter = 0; iter < 100; ++iter) {
            const auto a = hole_amplitude(gamma, phi, spec);
            residual = std::norm(a);
            if (residual <= detail::residual_tolerance(gamma, spec)) {
                converged = true;
                break;
            }
            const auto j = jacobian(gamma, phi, spec);
            const Real det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
            if (std::abs(det) < Real(1e-300))
                throw convergence_error("solve_holes: singular jacobian at gamma=" +
                                        std::to_string(double(gamma)));
            const Real step_g = -(j(1, 1) * a.real() - j(0, 1) * a.imag()) / det;
            const Real step_p = -(-j(1, 0) * a.real() + j(0, 0) * a.imag()) / det;
            Real lambda = Real(1);
            bool improved = false;
            for (; lambda >= Real(1) / Real(1024); lambda /= Real(2)) {
                const Real g_try = gamma + lambda * step_g;
                if (!(g_try > Real(0)) || g_try > spec.gamma_max) continue;
                const Real p_try = phi + lambda * step_p;
                if (std::norm(hole_amplitude(g_try, p_try, spec)) < residual) {
                    gamma = g_try;
                    phi = p_try;
                    improved = true;
                    break;
                }
            }
            if (!improved)
                throw convergence_error("solve_holes: Newton stalled for (N1,N2)=(" +
                                        std::to_string(spec.n1) + "," + std::to_string(spec.n2) +
                                        ") near gamma=" + std::to_string(double(gamma)));
        }
        if (!converged)
            throw convergence_error("solve_holes: no convergence within 100 iterations for (N1,N2)=(" +
                                    std::to_string(spec.n1) + "," + std::to_string(spec.n2) + ")");

        HoleSolution<Real> sol;
        sol.n1 = spec.n1;
        sol.n2 = spec.n2;
        sol.gamma = gamma;
        sol.phi = detail::phi_mod_pi(phi);
        sol.residual = residual;
        solutions.push_back(sol);
    }

    for (std::size_t i = 0; i < solutions.size(); ++i)
        for (std::size_t k = i + 1; k < solutions.size(); ++k)
            if (std::abs(solutions[i].gamma - solutions[k].gamma) < Real(1e-6) &&
                detail::phi_distance(solutions[i].phi, solutions[k].phi) < Real(1e-6))
                throw collision_error("solve_holes: two refined roots coincide (degenerate root?) at gamma=" +
                                      std::to_string(double(solutions[i].gamma)));

    std::sort(solutions.begin(), solutions.end(),
              [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
    for (std::size_t i = 0; i < solutions.size(); ++i)
        solutions[i].root_index = static_cast<int>(i);
    return solutions;
}

}  // namespace cph
