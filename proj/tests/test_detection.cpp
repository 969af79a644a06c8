#include "cph/detection.hpp"

#include "cph/hole_solver.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace cph;

namespace {

FockVector<double> fock_basis(int n, int cutoff) {
    FockVector<double> f;
    f.amplitudes = ComplexVec<double>::Zero(cutoff + 1);
    f.amplitudes[n] = 1.0;
    return f;
}

// Brute force for eta = 1: every photon lands on one of k detectors.
double enumerate_clicks(int c, int n, int k) {
    std::vector<int> which(n, 0);
    double hits = 0, total = 0;
    while (true) {
        int mask = 0;
        for (int i = 0; i < n; ++i) mask |= 1 << which[i];
        int occupied = 0;
        for (int d = 0; d < k; ++d) occupied += (mask >> d) & 1;
        if (occupied == c) hits += 1;
        total += 1;
        int pos = 0;
        while (pos < n && ++which[pos] == k) which[pos++] = 0;
        if (pos == n) break;
    }
    return hits / total;
}

std::vector<double> uniform_grid(int count, double lo = 0.0, double hi = 2.0 * M_PI) {
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i) grid[i] = lo + (hi - lo) * i / count;
    return grid;
}

}  // namespace

TEST_CASE("click probabilities: pinned values and validation") {
    DetectorArray<double> one{1, 1.0};
    DetectorArray<double> two{2, 1.0};
    CHECK(click_probability(0, 0, one) == 1.0);
    CHECK(click_probability(0, 0, DetectorArray<double>{4, 0.3}) == 1.0);
    CHECK(click_probability(1, 1, one) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(click_probability(2, 2, two) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(click_probability(0, 7, DetectorArray<double>{3, 0.0}) == doctest::Approx(1.0));
    CHECK(click_probability(2, 1, two) == 0.0);  // more clicks than photons

    CHECK_THROWS_AS(click_probability(0, 0, DetectorArray<double>{0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(click_probability(0, 0, DetectorArray<double>{1, 1.5}), std::invalid_argument);
    CHECK_THROWS_AS(click_probability(0, 0, DetectorArray<double>{1, -0.1}), std::invalid_argument);
    CHECK_THROWS_AS(click_probability(3, 0, two), std::invalid_argument);
    CHECK_THROWS_AS(click_probability(-1, 0, two), std::invalid_argument);
    CHECK_THROWS_AS(click_probability(0, -1, two), std::invalid_argument);
}

TEST_CASE("click probabilities sum to one") {
    for (int k : {1, 2, 4, 8}) {
        for (double eta : {0.125, 0.5, 1.0}) {
            const DetectorArray<double> array{k, eta};
            for (int n = 0; n <= 64; n += n < 8 ? 1 : 7) {
                double sum = 0;
                for (int c = 0; c <= k; ++c) sum += click_probability(c, n, array);
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("unit-efficiency clicks match direct enumeration") {
    for (int k = 1; k <= 4; ++k) {
        const DetectorArray<double> array{k, 1.0};
        for (int n = 0; n <= 4; ++n)
            for (int c = 0; c <= k; ++c)
                CHECK(std::abs(click_probability(c, n, array) - enumerate_clicks(c, n, k)) <= 1e-12);
    }
}

TEST_CASE("large arrays converge to photon-number resolution") {
    double prev = 1;
    for (int k : {10, 100, 1000}) {
        const double err = std::abs(click_probability(3, 3, DetectorArray<double>{k, 1.0}) - 1.0);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-2);
}

TEST_CASE("coincidences on reference states") {
    const DetectorArray<double> ideal{1, 1.0};
    const auto vac = joint_distribution(tensor(fock_basis(0, 0), fock_basis(0, 0)));
    CHECK(coincidence_probability(vac, 0, 0, ideal, ideal) == 1.0);
    CHECK(coincidence_probability(vac, 1, 0, ideal, ideal) == 0.0);

    const auto hom = joint_distribution(beamsplitter(tensor(fock_basis(1, 1), fock_basis(1, 1))));
    CHECK(coincidence_probability(hom, 1, 1, ideal, ideal) <= 1e-30);
    CHECK(coincidence_probability(hom, 1, 0, ideal, ideal) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("upstream loss folds into detector efficiency") {
    const CutoffPolicy<double> policy;
    const auto dist = joint_distribution(beamsplitter(
        tensor(coherent_state(std::sqrt(std::sqrt(3.0) * 0.2), 0.7, policy), squeezed_vacuum(0.2, policy))));
    const double eta1 = 0.125, eta2 = 0.6;
    const auto thinned = loss_channel(dist, eta1, eta2);
    const DetectorArray<double> lossy1{2, eta1}, lossy2{2, eta2};
    const DetectorArray<double> ideal1{2, 1.0}, ideal2{2, 1.0};
    for (int c1 = 0; c1 <= 2; ++c1)
        for (int c2 = 0; c2 <= 2; ++c2)
            CHECK(std::abs(coincidence_probability(dist, c1, c2, lossy1, lossy2) -
                           coincidence_probability(thinned, c1, c2, ideal1, ideal2)) <= 1e-12);
}

TEST_CASE("classical floor equals the coincidence of coherent light") {
    // A split coherent state is exactly the independent Poissonian product the
    // floor is defined against, so the bound is saturated.
    const CutoffPolicy<double> policy;
    const auto dist = joint_distribution(
        beamsplitter(tensor(coherent_state(1.1, 0.4, policy), coherent_state(0.0, 0.0, policy))));
    const DetectorArray<double> array1{2, 0.5}, array2{3, 0.8};
    for (int c1 = 1; c1 <= 2; ++c1)
        for (int c2 = 1; c2 <= 2; ++c2) {
            const double direct = coincidence_probability(dist, c1, c2, array1, array2);
            const double floor = classical_floor(dist, c1, c2, array1, array2);
            CHECK(std::abs(direct - floor) <= 1e-9 * direct);
        }
}

TEST_CASE("visibility") {
    CHECK(visibility<double>({0.3, 0.3, 0.3}) == 0.0);
    CHECK(visibility<double>({0.0, 0.7}) == 1.0);
    CHECK(visibility<double>({1.0, 3.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(visibility<double>({0.0, 0.0}) == 0.0);
    CHECK_THROWS_AS(visibility<double>({}), std::invalid_argument);
    CHECK_THROWS_AS(visibility<double>({0.2, -0.1}), std::invalid_argument);
}

TEST_CASE("bound violation significance") {
    CHECK(bound_violation_sigma(0.01, 0.01, 1000) == 0.0);
    CHECK(bound_violation_sigma(0.02, 0.01, 1000) == 0.0);  // above the floor: no deficit
    CHECK(bound_violation_sigma(0.0, 0.01, 10000) == doctest::Approx(10.0).epsilon(1e-12));
    const double full = bound_violation_sigma(0.001, 0.01, 20000);
    const double half = bound_violation_sigma(0.001, 0.01, 10000);
    CHECK(half == doctest::Approx(full / std::sqrt(2.0)).epsilon(1e-12));
    CHECK_THROWS_AS(bound_violation_sigma(0.1, 0.2, 0), std::invalid_argument);
    CHECK_THROWS_AS(bound_violation_sigma(-0.1, 0.2, 10), std::invalid_argument);
    CHECK_THROWS_AS(bound_violation_sigma(0.1, 1.2, 10), std::invalid_argument);
}

TEST_CASE("phase scan finds the solved holes") {
    HoleSpec<double> hole;
    hole.n1 = hole.n2 = 2;
    hole.r = 0.2;
    const auto sols = solve_holes(hole);
    REQUIRE(sols.size() == 2);

    ScanConfig<double> config;
    config.n1 = config.n2 = 2;
    config.gamma = sols[0].gamma;  // both (2,2) holes share one gamma
    config.r = 0.2;
    config.detectors1 = {8, 1.0};
    config.detectors2 = {8, 1.0};
    config.phi_grid = uniform_grid(64);
    const auto scan = phase_scan(config);

    REQUIRE(scan.points.size() == 64);
    CHECK(scan.minima.size() == 4);  // each hole phase appears at phi* and phi* + pi
    REQUIRE(scan.distinct_phases_mod_pi.size() == 2);
    // clicks from higher photon sectors fill the hole slightly and nudge the
    // click minimum off the exact amplitude zero (~5e-4 at k = 8)
    CHECK(std::abs(scan.distinct_phases_mod_pi[0] - sols[0].phi) <= 2e-3);
    CHECK(std::abs(scan.distinct_phases_mod_pi[1] - sols[1].phi) <= 2e-3);

    CHECK(scan.floor > 0.0);
    for (const auto& m : scan.minima) {
        CHECK(m.coincidence <= 1e-2 * scan.floor);
        CHECK(m.floor_margin > 0.0);
        CHECK(m.g < 1.0);
        CHECK(m.sigma == 0.0);  // no pulse budget configured
    }
    CHECK(scan.visibility > 0.9);

    // the photon-number hole itself stays exact underneath the click filling
    for (const auto& s : sols) {
        const auto at_hole = detail::scan_distribution(config, s.phi);
        const auto off_hole = detail::scan_distribution(config, s.phi + M_PI / 2);
        CHECK(at_hole.probs(2, 2) <= 1e-10 * off_hole.probs(2, 2));
    }

    SUBCASE("singles stay flat while the coincidence oscillates") {
        double lo1 = 1e300, hi1 = 0, lo2 = 1e300, hi2 = 0;
        for (const auto& pt : scan.points) {
            lo1 = std::min(lo1, pt.singles1);
            hi1 = std::max(hi1, pt.singles1);
            lo2 = std::min(lo2, pt.singles2);
            hi2 = std::max(hi2, pt.singles2);
        }
        CHECK((hi1 - lo1) <= 1e-10 * hi1);
        CHECK((hi2 - lo2) <= 1e-10 * hi2);
    }

    SUBCASE("a minimum on the grid edge is still caught on a periodic grid") {
        ScanConfig<double> shifted = config;
        shifted.phi_grid = uniform_grid(64, scan.minima[0].phi, scan.minima[0].phi + 2.0 * M_PI);
        const auto rescan = phase_scan(shifted);
        CHECK(rescan.minima.size() == 4);
        CHECK(rescan.distinct_phases_mod_pi.size() == 2);
    }

    SUBCASE("pulse budget turns minima into significances") {
        ScanConfig<double> with_pulses = config;
        with_pulses.pulses = 1000000;
        with_pulses.phi_grid = uniform_grid(32);
        for (const auto& m : phase_scan(with_pulses).minima) CHECK(m.sigma > 0.0);
    }
}

TEST_CASE("coherent-only scan is flat at unit g") {
    ScanConfig<double> config;
    config.n1 = config.n2 = 2;
    config.r = 1e-10;
    config.gamma = 0.346 / config.r;  // hold |alpha|^2 fixed while squeezing vanishes
    config.detectors1 = {2, 0.5};
    config.detectors2 = {2, 0.5};
    config.policy.tail_epsilon = 1e-20;
    config.phi_grid = uniform_grid(16);
    const auto scan = phase_scan(config);
    CHECK(scan.visibility <= 1e-8);
    for (const auto& pt : scan.points) CHECK(std::abs(pt.g - 1.0) <= 1e-8);
    CHECK(std::abs(scan.points[0].coincidence - scan.floor) <= 1e-8 * scan.floor);
}

TEST_CASE("phase scan rejects malformed configurations") {
    ScanConfig<double> config;
    config.phi_grid = uniform_grid(8);
    config.detectors1 = {2, 1.0};
    config.detectors2 = {2, 1.0};
    config.n1 = 3;  // more target clicks than detectors
    CHECK_THROWS_AS(phase_scan(config), std::invalid_argument);
    config.n1 = 2;

    ScanConfig<double> empty = config;
    empty.phi_grid.clear();
    CHECK_THROWS_AS(phase_scan(empty), std::invalid_argument);

    ScanConfig<double> unsorted = config;
    unsorted.phi_grid = {0.0, 1.0, 0.5};
    CHECK_THROWS_AS(phase_scan(unsorted), std::invalid_argument);

    ScanConfig<double> bad_gamma = config;
    bad_gamma.gamma = 0.0;
    CHECK_THROWS_AS(phase_scan(bad_gamma), std::invalid_argument);

    ScanConfig<double> bad_r = config;
    bad_r.r = -0.2;
    CHECK_THROWS_AS(phase_scan(bad_r), std::invalid_argument);
}
