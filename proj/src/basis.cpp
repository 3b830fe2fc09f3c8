#include "ouselect/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ouselect/signals.hpp"

namespace ouselect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rectangle_coeff(const SignalSpec& signal, int j, int points) {
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = static_cast<double>(i) / points;
        sum += signal(x) * phi_periodic(j, x);
    }
    return sum / points;
}

} // namespace

BasisIndex::BasisIndex(int j) : j_(j) {
    if (j < 1) {
        throw std::invalid_argument("BasisIndex: j must be >= 1");
    }
}

double CoeffVector::at(int j) const noexcept {
    if (j < 1 || static_cast<std::size_t>(j) > values.size()) {
        return 0.0;
    }
    return values[static_cast<std::size_t>(j - 1)];
}

double CoeffVector::energy() const noexcept {
    double e = 0.0;
    for (double v : values) {
        e += v * v;
    }
    return e;
}

double phi(BasisIndex j, double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("phi: x must lie in [0, 1]");
    }
    return phi_periodic(j.value(), x);
}

double phi_periodic(int j, double t) noexcept {
    if (j == 1) {
        return 1.0;
    }
    const double arg = kTwoPi * static_cast<double>(j / 2) * t;
    return std::numbers::sqrt2 * ((j % 2 == 0) ? std::cos(arg) : std::sin(arg));
}

RealFunction basis_function(int j) {
    BasisIndex checked(j);
    return [j = checked.value()](double t) { return phi_periodic(j, t); };
}

double fourier_coeff(const SignalSpec& signal, BasisIndex j, const QuadratureConfig& quad) {
    if (signal.has_analytic_coeffs()) {
        return signal.analytic_coeff(j.value());
    }
    if (quad.points < 4 || 2 * j.frequency() >= quad.points / 2) {
        throw NumericalError("fourier_coeff: grid too coarse for frequency", INFINITY);
    }
    const double fine = rectangle_coeff(signal, j.value(), quad.points);
    const double coarse = rectangle_coeff(signal, j.value(), quad.points / 2);
    const double err = std::abs(fine - coarse);
    if (err > quad.tolerance) {
        std::ostringstream msg;
        msg << "fourier_coeff: no convergence for j=" << j.value() << " (estimated error " << err << ")";
        throw NumericalError(msg.str(), err);
    }
    return fine;
}

CoeffVector fourier_coeffs(const SignalSpec& signal, int truncation, const QuadratureConfig& quad) {
    if (truncation < 1) {
        throw std::invalid_argument("fourier_coeffs: truncation must be positive");
    }
    std::vector<double> out(static_cast<std::size_t>(truncation));
    if (signal.has_analytic_coeffs()) {
        for (int j = 1; j <= truncation; ++j) {
            out[static_cast<std::size_t>(j - 1)] = signal.analytic_coeff(j);
        }
        return CoeffVector(std::move(out));
    }
    const long long n = quad.points;
    if (n < 4 || 2 * (truncation / 2) >= n / 2) {
        throw NumericalError("fourier_coeffs: grid too coarse for truncation", INFINITY);
    }
    std::vector<double> samples(static_cast<std::size_t>(n));
    std::vector<double> cos_table(static_cast<std::size_t>(n));
    std::vector<double> sin_table(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n);
        samples[static_cast<std::size_t>(i)] = signal(x);
        cos_table[static_cast<std::size_t>(i)] = std::cos(kTwoPi * x);
        sin_table[static_cast<std::size_t>(i)] = std::sin(kTwoPi * x);
    }
    double worst = 0.0;
    auto record = [&](int j, double fine, double coarse) {
        worst = std::max(worst, std::abs(fine - coarse));
        out[static_cast<std::size_t>(j - 1)] = fine;
    };
    {
        double fine = 0.0;
        double coarse = 0.0;
        for (long long i = 0; i < n; ++i) {
            fine += samples[static_cast<std::size_t>(i)];
            if (i % 2 == 0) {
                coarse += samples[static_cast<std::size_t>(i)];
            }
        }
        record(1, fine / static_cast<double>(n), coarse / static_cast<double>(n / 2));
    }
    for (int m = 1; 2 * m <= truncation; ++m) {
        double fc = 0.0, cc = 0.0, fs = 0.0, cs = 0.0;
        for (long long i = 0; i < n; ++i) {
            const auto idx = static_cast<std::size_t>((static_cast<long long>(m) * i) % n);
            const double s = samples[static_cast<std::size_t>(i)];
            const double vc = s * cos_table[idx];
            const double vs = s * sin_table[idx];
            fc += vc;
            fs += vs;
            if (i % 2 == 0) {
                cc += vc;
                cs += vs;
            }
        }
        const double scale_fine = std::numbers::sqrt2 / static_cast<double>(n);
        const double scale_coarse = std::numbers::sqrt2 / static_cast<double>(n / 2);
        record(2 * m, fc * scale_fine, cc * scale_coarse);
        if (2 * m + 1 <= truncation) {
            record(2 * m + 1, fs * scale_fine, cs * scale_coarse);
        }
    }
    if (worst > quad.tolerance) {
        throw NumericalError("fourier_coeffs: no convergence", worst);
    }
    return CoeffVector(std::move(out));
}

double synthesize(const CoeffVector& coeffs, double x) {
    double s = 0.0;
    for (std::size_t i = 0; i < coeffs.values.size(); ++i) {
        s += coeffs.values[i] * phi_periodic(static_cast<int>(i) + 1, x);
    }
    return s;
}

double parseval_sq_distance(const CoeffVector& c1, const CoeffVector& c2) {
    const std::size_t len = std::max(c1.values.size(), c2.values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        const double a = i < c1.values.size() ? c1.values[i] : 0.0;
        const double b = i < c2.values.size() ? c2.values[i] : 0.0;
        d += (a - b) * (a - b);
    }
    return d;
}

} // namespace ouselect
