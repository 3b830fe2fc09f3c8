#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ouselect/basis.hpp"
#include "ouselect/signals.hpp"

using namespace ouselect;
using std::numbers::pi;

TEST_CASE("ellipsoid weights") {
    // a_1 = 1: with [1/2] = 0 only the i = 0 term survives
    CHECK(ellipsoid_weight(BasisIndex(1), 1) == 1.0);
    CHECK(ellipsoid_weight(BasisIndex(1), 3) == 1.0);
    CHECK(ellipsoid_weight(BasisIndex(2), 1) == doctest::Approx(1 + 4 * pi * pi));
    CHECK(ellipsoid_weight(BasisIndex(2), 1) == doctest::Approx(40.478).epsilon(1e-4));
    CHECK(ellipsoid_weight(BasisIndex(3), 2) == doctest::Approx(1 + 4 * pi * pi + 16 * std::pow(pi, 4)));
    CHECK(ellipsoid_weight(BasisIndex(3), 2) == doctest::Approx(1599.0).epsilon(1e-3));
    CHECK_THROWS(ellipsoid_weight(BasisIndex(2), 0));
}

TEST_CASE("ellipsoid weights are monotone") {
    for (int k = 1; k <= 3; ++k) {
        for (int j = 2; j < 40; ++j) {
            CHECK(ellipsoid_weight(BasisIndex(j + 1), k) >= ellipsoid_weight(BasisIndex(j), k));
            // strictly across frequencies
            CHECK(ellipsoid_weight(BasisIndex(j + 2), k) > ellipsoid_weight(BasisIndex(j), k));
            CHECK(ellipsoid_weight(BasisIndex(j), k + 1) > ellipsoid_weight(BasisIndex(j), k));
        }
    }
}

TEST_CASE("Sobolev membership") {
    const auto z = check_sobolev_membership(zero_signal(), 20);
    CHECK(z.member);
    CHECK(z.margin == 1.0);

    const double r = 1.0;
    const double c = std::sqrt(r / ellipsoid_weight(BasisIndex(3), 1));
    const auto edge = check_sobolev_membership(trig_polynomial("edge", {0.0, 0.0, c}, 1, r), 10);
    CHECK(std::abs(edge.margin) < 1e-12);
    CHECK(edge.near_boundary);

    const auto out = check_sobolev_membership(trig_polynomial("out", {0.0, 0.0, 2 * c}, 1, r), 10);
    CHECK_FALSE(out.member);
    CHECK(out.margin == doctest::Approx(-3.0 * r));

    for (const auto& name : catalogue_names()) {
        const auto m = check_sobolev_membership(catalogue_signal(name), 200);
        CHECK_MESSAGE(m.member, name);
    }
}

TEST_CASE("expcos coefficients against modified Bessel values") {
    const SignalSpec s = catalogue_signal("expcos");
    const double A = 0.16;
    const CoeffVector c = fourier_coeffs(s, 21);
    CHECK(c.at(1) == doctest::Approx(A * std::cyl_bessel_i(0.0, 1.0)).epsilon(1e-13));
    for (int m = 1; m <= 10; ++m) {
        const double oracle = std::sqrt(2.0) * A * std::cyl_bessel_i(static_cast<double>(m), 1.0);
        CHECK(std::abs(c.at(2 * m) - oracle) < 1e-15 + 1e-12 * std::abs(oracle));
        CHECK(std::abs(c.at(2 * m + 1)) < 1e-15);
    }
    // energy = A^2 I_0(2)
    CHECK(s.energy() == doctest::Approx(A * A * std::cyl_bessel_i(0.0, 2.0)).epsilon(1e-12));
    // |S'|_1 = total variation over a period = 2 A (e - 1/e)
    REQUIRE(s.dS_l1().has_value());
    CHECK(*s.dS_l1() == doctest::Approx(2 * A * (std::exp(1.0) - std::exp(-1.0))).epsilon(1e-6));
}

TEST_CASE("catalogue signals are periodic") {
    for (const auto& name : catalogue_names()) {
        const SignalSpec s = catalogue_signal(name);
        CHECK(std::abs(s(0.0) - s(1.0)) < 1e-14);
        if (s.has_derivative()) {
            CHECK(std::abs(s.derivative()(0.0) - s.derivative()(1.0)) < 1e-12);
        }
    }
    CHECK_THROWS_AS(catalogue_signal("nope"), std::invalid_argument);
}

TEST_CASE("Fourier tail decay bound") {
    for (const auto& name : catalogue_names()) {
        const SignalSpec s = catalogue_signal(name);
        const CoeffVector c = fourier_coeffs(s, 2000);
        std::vector<double> tail(2002, 0.0);
        for (int j = 2000; j >= 1; --j) {
            tail[static_cast<std::size_t>(j)] = tail[static_cast<std::size_t>(j) + 1] + c.at(j) * c.at(j);
        }
        const double d = *s.dS_l1();
        for (int l = 2; l <= 200; ++l) {
            CHECK(l * tail[static_cast<std::size_t>(l)] <= 4 * d * d + 1e-15);
        }
    }
}
