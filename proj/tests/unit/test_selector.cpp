#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ouselect/basis.hpp"
#include "ouselect/noise.hpp"
#include "ouselect/selector.hpp"
#include "ouselect/signals.hpp"

using namespace ouselect;
using std::numbers::pi;

namespace {

std::shared_ptr<const NoisePath> quiet(int n, double dt) {
    return std::make_shared<const NoisePath>(simulate_noise(NoiseParams{0, 0, 0, 0}, n, dt, 1));
}

} // namespace

TEST_CASE("estimate_theta on noiseless data") {
    const ObservationPath c = observe(constant_signal(1.7), quiet(3, 1.0 / 16));
    CHECK(estimate_theta(c, 1) == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(std::abs(estimate_theta(c, 2)) < 1e-14);
    CHECK_THROWS(estimate_theta(c, 4));
    CHECK_THROWS(estimate_theta(c, 0));

    // Each cell carries the cell average of S, so the left-point sum sees every
    // frequency-m pair damped by sinc(w dt / 2) and rotated by w dt / 2.
    const double dt = 1.0 / 64;
    for (const char* name : {"expcos", "trigpoly"}) {
        const SignalSpec s = catalogue_signal(name);
        const ObservationPath obs = observe(s, quiet(20, dt));
        const auto th = estimate_thetas(obs, 20);
        const CoeffVector theta = fourier_coeffs(s, 21);
        CHECK(th[0] == doctest::Approx(theta.at(1)).epsilon(1e-13));
        for (int m = 1; m <= 9; ++m) {
            const double w = 2 * pi * m, d = w * dt / 2, sinc = std::sin(d) / d;
            const double c0 = theta.at(2 * m), s0 = theta.at(2 * m + 1);
            const double ec = sinc * (c0 * std::cos(d) + s0 * std::sin(d));
            const double es = sinc * (-c0 * std::sin(d) + s0 * std::cos(d));
            CHECK(std::abs(th[static_cast<std::size_t>(2 * m - 1)] - ec) < 1e-12);
            CHECK(std::abs(th[static_cast<std::size_t>(2 * m)] - es) < 1e-12);
            // first-order closeness to the analytic coefficients
            CHECK(std::abs(th[static_cast<std::size_t>(2 * m - 1)] - c0) <= w * dt * (std::abs(c0) + std::abs(s0)) + 1e-14);
        }
        for (int j = 1; j <= 20; ++j) {
            CHECK(estimate_theta(obs, j) == doctest::Approx(th[static_cast<std::size_t>(j - 1)]).epsilon(1e-12));
        }
    }
}

TEST_CASE("estimate_theta variance under Brownian noise") {
    const int n = 100, R = 10000;
    for (int j : {2, 3}) {
        double m = 0, s = 0;
        for (int r = 0; r < R; ++r) {
            auto p = std::make_shared<const NoisePath>(
                simulate_noise(NoiseParams{0, 0, 1, 0}, n, 1.0 / 8, replicate_seed(500 + j, r)));
            const double v = estimate_theta(observe(zero_signal(), p), j);
            m += v * v;
            s += v * v * v * v;
        }
        m /= R;
        const double se = std::sqrt((s / R - m * m) / R);
        CHECK(std::abs(m - 1.0 / n) <= 3 * se);
    }
}

TEST_CASE("estimate_sigma") {
    CHECK(estimate_sigma(std::vector<double>(100, 0.0), 100) == 0.0);
    CHECK(sigma_cutoff(100) == 11);
    CHECK(estimate_sigma(std::vector<double>(100, 0.01), 100) == doctest::Approx(0.009).epsilon(1e-12));
    CHECK_THROWS(estimate_sigma(std::vector<double>(3, 0.0), 3));
    CHECK_THROWS(estimate_sigma(std::vector<double>(50, 0.0), 100));
}

TEST_CASE("Pinsker weights") {
    CHECK(pinsker_tau(1) == doctest::Approx(6 / (pi * pi)).epsilon(1e-14));
    CHECK(pinsker_tau(1) == doctest::Approx(0.60793).epsilon(1e-5));
    const WeightSequence w = pinsker_weight(1, 1.0, 1000);
    CHECK(w.omega == doctest::Approx(std::cbrt(6000 / (pi * pi))).epsilon(1e-14));
    CHECK(w.omega == doctest::Approx(8.4713).epsilon(1e-4));
    CHECK(w.j0 == 1);
    CHECK(w.at(1) == 1.0);
    CHECK(w.at(2) == doctest::Approx(1 - 2 / w.omega));
    CHECK(w.at(2) == doctest::Approx(0.76391).epsilon(1e-4));
    CHECK(w.at(9) == 0.0);
    CHECK(w.support() == 8);
    CHECK(w.at(w.j0) == 1.0);
    CHECK(w.at(static_cast<int>(std::ceil(w.omega))) == 0.0);
    CHECK_THROWS(pinsker_weight(0, 1.0, 100));
    CHECK_THROWS(pinsker_weight(1, 0.0, 100));
    CHECK_THROWS(pinsker_weight(1, 1.0, 2));
    for (int beta = 1; beta <= 3; ++beta) {
        for (double t : {0.1, 0.7, 3.0}) {
            const WeightSequence v = pinsker_weight(beta, t, 5000);
            for (int j = 1; j <= v.support() + 1; ++j) {
                CHECK(v.at(j) >= 0.0);
                CHECK(v.at(j) <= 1.0);
                CHECK(v.at(j + 1) <= v.at(j));
            }
            CHECK(v.energy() <= v.support());
        }
    }
}

TEST_CASE("weight grid") {
    const WeightGrid g = build_default_grid(1000);
    CHECK(g.epsilon == doctest::Approx(1 / std::log(1001.0)));
    CHECK(g.epsilon == doctest::Approx(0.14476).epsilon(1e-4));
    CHECK(g.m == 47);
    CHECK(g.k_star == 3);
    CHECK(g.nu() == 141);
    CHECK(g.mu <= std::cbrt(1000 / g.epsilon));
    for (const auto& w : g.sequences) {
        CHECK(w.energy() <= w.support());
        CHECK(w.support() <= 1000);
        CHECK(w.support() > 0);
    }
    const WeightGrid one = build_grid(50, 1, 1.0);
    CHECK(one.nu() == 1);
    CHECK(one.m == 1);
    CHECK_THROWS(build_grid(50, 1, 1.5));
    CHECK_THROWS(build_grid(50, 0, 0.5));
    for (int n : {10, 100, 400, 8000}) {
        const WeightGrid h = build_default_grid(n);
        CHECK(h.mu <= std::cbrt(n / h.epsilon));
        CHECK(h.nu() == h.k_star * h.m);
    }
}

TEST_CASE("cost") {
    const std::vector<double> th{0.5, -0.2, 0.1, 0.05, 0.3, 0.0, 0.02, 0.01};
    const int n = 8;
    CHECK(cost(custom_weight({0, 0, 0}), th, 1.3, 0.1, n) == 0.0);
    const std::vector<double> zero(8, 0.0);
    const WeightSequence g = custom_weight({1.0, 0.5, 0.25});
    const double q = g.energy();
    double sum = 0;
    for (double v : g.gamma) {
        sum += v;
    }
    CHECK(cost(g, zero, 2.0, 0.1, n) == doctest::Approx((2 * sum + 0.1 * q) * 2.0 / n));
    CHECK(cost(projection_weight(3), zero, 2.0, 0.1, n) == doctest::Approx((2 + 0.1) * 3 * 2.0 / n));
    for (int d = 1; d <= 8; ++d) {
        const WeightSequence p = projection_weight(d);
        double s = 0;
        for (int j = 0; j < d; ++j) {
            s += th[static_cast<std::size_t>(j)] * th[static_cast<std::size_t>(j)];
        }
        CHECK(cost(p, th, 0.7, 0.2, n) == doctest::Approx(-s + (2 + 0.2) * 0.7 * d / n).epsilon(1e-13));
    }
    // penalty strictly increasing in the projection dimension
    for (int d = 1; d < 8; ++d) {
        CHECK(cost(projection_weight(d + 1), zero, 0.7, 0.2, n) > cost(projection_weight(d), zero, 0.7, 0.2, n));
    }
}

TEST_CASE("selection") {
    WeightGrid single;
    single.n = 8;
    single.sequences = {projection_weight(3)};
    const std::vector<double> th{0.5, -0.2, 0.1, 0.05, 0.3, 0.0, 0.02, 0.01};
    SelectionConfig known;
    known.sigma_mode = SigmaMode::known;
    known.sigma_known = 1.0;
    CHECK(select(th, single, known).selected == 0);

    // ties go to the smallest index
    WeightGrid twins = single;
    twins.sequences = {projection_weight(2), projection_weight(1), projection_weight(1)};
    known.sigma_known = 0.0;
    const std::vector<double> flat{0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    CHECK(select(flat, twins, known).selected == 0);

    // noiseless coefficients, sigma = 0: among members with omega >= 1 the largest t
    // of each beta slice wins; members with omega < 1 reduce to gamma = (1) and cost -theta_1^2
    const WeightGrid g = build_default_grid(400);
    const CoeffVector theta = fourier_coeffs(catalogue_signal("expcos"), 400);
    const EstimationResult r = select(theta.values, g, known);
    for (int b = 0; b < g.k_star; ++b) {
        int best = -1;
        for (int i = b * g.m; i < (b + 1) * g.m; ++i) {
            const auto& w = g.sequences[static_cast<std::size_t>(i)];
            if (w.omega < 1.0) {
                CHECK(r.costs[static_cast<std::size_t>(i)] == -theta.at(1) * theta.at(1));
                continue;
            }
            if (best < 0 || r.costs[static_cast<std::size_t>(i)] < r.costs[static_cast<std::size_t>(best)]) {
                best = i;
            }
        }
        if (best >= 0) {
            CHECK(best == (b + 1) * g.m - 1);
        }
    }
    CHECK(r.costs[static_cast<std::size_t>(r.selected)] == *std::min_element(r.costs.begin(), r.costs.end()));
    CHECK(static_cast<int>(r.final_coeffs.size()) >= 0);
    for (std::size_t j = 0; j < r.final_coeffs.size(); ++j) {
        CHECK(r.final_coeffs[j] == g.sequences[static_cast<std::size_t>(r.selected)].gamma[j] * theta.values[j]);
    }

    // shifting every cost leaves the argmin alone; identical inputs reproduce the selection
    std::vector<double> shifted = r.costs;
    for (double& c : shifted) {
        c += 17.0;
    }
    CHECK(std::min_element(shifted.begin(), shifted.end()) - shifted.begin() == r.selected);
    CHECK(select(theta.values, g, known).selected == r.selected);

    SelectionConfig bad;
    bad.rho = 0.34;
    CHECK_THROWS(select(th, single, bad));
    bad.rho = 0.0;
    CHECK_THROWS(select(th, single, bad));
}

TEST_CASE("rho schedule") {
    CHECK(rho_schedule(1) == doctest::Approx(1 / (6 + std::log(2.0))));
    CHECK(rho_schedule(1) == doctest::Approx(0.1494).epsilon(1e-3));
    CHECK(rho_schedule(1000) == doctest::Approx(0.07748).epsilon(1e-4));
    for (int n = 1; n < 5000; n += 37) {
        CHECK(rho_schedule(n + 1) < rho_schedule(n));
        CHECK(rho_schedule(n) < 1.0 / 3);
    }
}

TEST_CASE("oracle weight alpha0") {
    CHECK(oracle_weight_alpha0(1, 2.0, 2.0, 1000, 0.25).t0 == 1.0);
    const Alpha0 a = oracle_weight_alpha0(1, 0.5, 1.0, 1000, 0.14476);
    CHECK(a.t0 == doctest::Approx(3 * 0.14476));
    CHECK(a.t0 == doctest::Approx(0.4343).epsilon(1e-3));
    CHECK(a.in_grid);
    CHECK(a.gamma.beta == 1);
    CHECK_FALSE(oracle_weight_alpha0(1, 5.0, 1.0, 1000, 0.5).in_grid);
    CHECK_THROWS_AS(oracle_weight_alpha0(1, 0.1, 1.0, 1000, 0.5), std::domain_error);
}
