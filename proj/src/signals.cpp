#include "ouselect/signals.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace ouselect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kSignalQuadraturePoints = 4096;

double basis_derivative(int j, double t) {
    if (j == 1) {
        return 0.0;
    }
    const double w = kTwoPi * static_cast<double>(j / 2);
    return std::numbers::sqrt2 * w * ((j % 2 == 0) ? -std::sin(w * t) : std::cos(w * t));
}

} // namespace

SignalSpec::SignalSpec(std::string name, RealFunction value, RealFunction derivative,
                       CoeffFunction analytic_coeff, int k, double r)
    : name_(std::move(name)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      coeff_(std::move(analytic_coeff)),
      k_(k),
      r_(r) {
    if (!value_) {
        throw std::invalid_argument("SignalSpec: evaluator required");
    }
    if (k_ < 1 || !(r_ > 0.0)) {
        throw std::invalid_argument("SignalSpec: need k >= 1 and r > 0");
    }
    energy_ = quad::periodic_mean([this](double t) { return value_(t) * value_(t); },
                                  kSignalQuadraturePoints);
    if (derivative_) {
        dS_l1_ = quad::periodic_mean([this](double t) { return std::abs(derivative_(t)); },
                                     kSignalQuadraturePoints);
    }
}

double SignalSpec::tail_energy(const CoeffVector& leading) const {
    return std::max(0.0, energy_ - leading.energy());
}

double ellipsoid_weight(BasisIndex j, int k) {
    if (k < 1) {
        throw std::invalid_argument("ellipsoid_weight: k must be >= 1");
    }
    const double w2 = std::pow(kTwoPi * j.frequency(), 2);
    double term = 1.0;  // i = 0 term, 0^0 = 1
    double sum = 1.0;
    for (int i = 1; i <= k; ++i) {
        term *= w2;
        sum += term;
    }
    return sum;
}

SobolevMembership check_sobolev_membership(const SignalSpec& signal, int truncation,
                                           double tolerance) {
    const CoeffVector theta = fourier_coeffs(signal, truncation);
    double weighted = 0.0;
    for (int j = 1; j <= truncation; ++j) {
        const double t = theta.at(j);
        weighted += ellipsoid_weight(BasisIndex(j), signal.k()) * t * t;
    }
    SobolevMembership out;
    out.margin = signal.r() - weighted;
    out.member = out.margin >= 0.0;
    out.near_boundary = std::abs(out.margin) <= tolerance * std::max(1.0, signal.r());
    return out;
}

SignalSpec zero_signal() {
    return SignalSpec(
        "zero", [](double) { return 0.0; }, [](double) { return 0.0; }, [](int) { return 0.0; }, 1,
        1.0);
}

SignalSpec constant_signal(double c) {
    return SignalSpec(
        "constant", [c](double) { return c; }, [](double) { return 0.0; },
        [c](int j) { return j == 1 ? c : 0.0; }, 1, std::max(1.0, 2.0 * c * c));
}

SignalSpec trig_polynomial(std::string name, std::vector<double> coeffs, int k, double r) {
    auto shared = std::make_shared<const std::vector<double>>(std::move(coeffs));
    auto value = [shared](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < shared->size(); ++i) {
            s += (*shared)[i] * phi_periodic(static_cast<int>(i) + 1, t);
        }
        return s;
    };
    auto derivative = [shared](double t) {
        double s = 0.0;
        for (std::size_t i = 0; i < shared->size(); ++i) {
            s += (*shared)[i] * basis_derivative(static_cast<int>(i) + 1, t);
        }
        return s;
    };
    auto coeff = [shared](int j) {
        return (j >= 1 && static_cast<std::size_t>(j) <= shared->size())
                   ? (*shared)[static_cast<std::size_t>(j - 1)]
                   : 0.0;
    };
    return SignalSpec(std::move(name), value, derivative, coeff, k, r);
}

SignalSpec exp_cosine(double amplitude, int k, double r) {
    auto value = [amplitude](double t) { return amplitude * std::exp(std::cos(kTwoPi * t)); };
    auto derivative = [amplitude](double t) {
        return -amplitude * kTwoPi * std::sin(kTwoPi * t) * std::exp(std::cos(kTwoPi * t));
    };
    // coefficients are left to quadrature
    return SignalSpec("expcos", value, derivative, nullptr, k, r);
}

std::vector<std::string> catalogue_names() { return {"zero", "trigpoly", "expcos"}; }

SignalSpec catalogue_signal(const std::string& name) {
    if (name == "zero") {
        return zero_signal();
    }
    if (name == "trigpoly") {
        // sum a_j theta_j^2 = 0.25 + 40.478*(0.0064+0.0025) + 158.91*(0.0009+0.0004) = 0.817 < 1
        return trig_polynomial("trigpoly", {0.5, 0.08, -0.05, 0.03, 0.02}, 1, 1.0);
    }
    if (name == "expcos") {
        // sum a_j theta_j^2 = 33.67 * 0.16^2 = 0.862 < 1
        return exp_cosine(0.16, 1, 1.0);
    }
    throw std::invalid_argument("unknown catalogue signal: " + name);
}

} // namespace ouselect
