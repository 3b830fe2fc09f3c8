#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ouselect/basis.hpp"
#include "ouselect/signals.hpp"

using namespace ouselect;
using std::numbers::pi;

namespace {

// Gauss-Legendre on 512 panels: independent of the periodic rectangle rule in fourier_coeff.
double gl(const RealFunction& f) { return quad::gauss_legendre(f, 0.0, 1.0, 512); }

} // namespace

TEST_CASE("phi values") {
    CHECK(phi(BasisIndex(1), 0.73) == 1.0);
    CHECK(phi(BasisIndex(2), 0.25) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(phi(BasisIndex(3), 0.25) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(phi(BasisIndex(4), 0.0) == doctest::Approx(std::sqrt(2.0)));
    CHECK(phi(BasisIndex(5), 0.125) == doctest::Approx(std::sqrt(2.0) * std::sin(2 * pi * 2 * 0.125)));
}

TEST_CASE("phi rejects bad input") {
    CHECK_THROWS_AS(BasisIndex(0), std::invalid_argument);
    CHECK_THROWS(phi(BasisIndex(2), -0.01));
    CHECK_THROWS(phi(BasisIndex(2), 1.01));
}

TEST_CASE("orthonormality up to 50") {
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        for (int j = i; j <= 50; ++j) {
            const double v = gl([&](double x) { return phi_periodic(i, x) * phi_periodic(j, x); });
            worst = std::max(worst, std::abs(v - (i == j ? 1.0 : 0.0)));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("fourier_coeff of constants and cosines") {
    const SignalSpec c = constant_signal(2.5);
    CHECK(fourier_coeff(c, BasisIndex(1)) == doctest::Approx(2.5));
    for (int j = 2; j <= 9; ++j) {
        CHECK(std::abs(fourier_coeff(c, BasisIndex(j))) < 1e-14);
    }
    // sqrt2 cos(2 pi t) without analytic coefficients: quadrature path
    SignalSpec cosine("cos", [](double t) { return std::sqrt(2.0) * std::cos(2 * pi * t); }, nullptr,
                      nullptr, 1, 100.0);
    CHECK(fourier_coeff(cosine, BasisIndex(2)) == doctest::Approx(1.0).epsilon(1e-13));
    const double oracle = gl([](double t) { return 2.0 * std::cos(2 * pi * t) * std::cos(2 * pi * t); });
    CHECK(fourier_coeff(cosine, BasisIndex(2)) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK(std::abs(fourier_coeff(cosine, BasisIndex(3))) < 1e-14);
}

TEST_CASE("fourier_coeffs matches Gauss-Legendre oracle for a non-polynomial signal") {
    SignalSpec s("bump", [](double t) { return std::exp(std::sin(2 * pi * t) + 0.3 * std::cos(4 * pi * t)); },
                 nullptr, nullptr, 1, 100.0);
    const CoeffVector c = fourier_coeffs(s, 15);
    REQUIRE(c.truncation() == 15);
    for (int j = 1; j <= 15; ++j) {
        const double oracle = gl([&](double t) { return s(t) * phi_periodic(j, t); });
        CHECK(c.at(j) == doctest::Approx(oracle).epsilon(1e-11));
    }
}

TEST_CASE("fourier_coeff reports a coarse grid") {
    SignalSpec s("sq", [](double t) { return t < 0.5 ? 1.0 : -1.0; }, nullptr, nullptr, 1, 100.0);
    QuadratureConfig q;
    q.points = 64;
    q.tolerance = 1e-14;
    CHECK_THROWS_AS(fourier_coeff(s, BasisIndex(40), q), NumericalError);
    try {
        fourier_coeff(s, BasisIndex(3), q);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.achieved_error() > 0.0);
    }
}

TEST_CASE("synthesize") {
    CHECK(synthesize(CoeffVector({5.0}), 0.37) == 5.0);
    CHECK(synthesize(CoeffVector({0.0, 1.0}), 0.0) == doctest::Approx(std::sqrt(2.0)));
    SignalSpec sine("sin", [](double t) { return std::sqrt(2.0) * std::sin(2 * pi * t); }, nullptr, nullptr,
                    1, 100.0);
    CHECK(synthesize(fourier_coeffs(sine, 3), 0.25) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("parseval distance") {
    const CoeffVector c({0.3, -0.2, 0.7});
    CHECK(parseval_sq_distance(c, c) == 0.0);
    CHECK(parseval_sq_distance(CoeffVector({1.0, 0.0}), CoeffVector({0.0, 1.0})) == 2.0);
    CHECK(parseval_sq_distance(CoeffVector({0.0, 0.0, 0.0}), c) == doctest::Approx(c.energy()));
    CHECK(parseval_sq_distance(CoeffVector({1.0}), c) == parseval_sq_distance(c, CoeffVector({1.0})));

    // agrees with direct quadrature of (f - g)^2 for band-limited f, g
    const CoeffVector f({0.1, 0.4, -0.3, 0.25, 0.0, 0.05});
    const CoeffVector g({-0.2, 0.1, 0.0, 0.3, 0.6});
    const double direct = gl([&](double x) {
        const double d = synthesize(f, x) - synthesize(g, x);
        return d * d;
    });
    CHECK(std::abs(parseval_sq_distance(f, g) - direct) < 1e-8);
}

TEST_CASE("Parseval residual decreases with truncation") {
    const SignalSpec s = catalogue_signal("expcos");
    double prev = INFINITY;
    for (int J = 1; J <= 11; J += 2) {
        const CoeffVector c = fourier_coeffs(s, J);
        const double resid = gl([&](double x) {
            const double d = s(x) - synthesize(c, x);
            return d * d;
        });
        CHECK(resid <= prev + 1e-15);
        prev = resid;
    }
    // remaining tail of expcos = A exp(cos 2 pi x): 2 A^2 sum_{m >= 6} I_m(1)^2
    double tail = 0;
    for (int m = 6; m <= 30; ++m) {
        tail += 2 * 0.16 * 0.16 * std::pow(std::cyl_bessel_i(m, 1.0), 2);
    }
    CHECK(prev == doctest::Approx(tail).epsilon(1e-3));
}
