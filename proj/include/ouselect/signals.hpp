#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ouselect/basis.hpp"
#include "ouselect/quadrature.hpp"

namespace ouselect {

/// A 1-periodic test signal with the smoothness metadata the risk bounds consume.
class SignalSpec {
public:
    using CoeffFunction = std::function<double(int)>;

    /// `value` must be 1-periodic. `derivative` is optional; when present |S'|_1
    /// is computed by quadrature. `analytic_coeff(j)` returns theta_j exactly.
    SignalSpec(std::string name, RealFunction value, RealFunction derivative,
               CoeffFunction analytic_coeff, int k, double r);

    const std::string& name() const noexcept { return name_; }
    double operator()(double t) const { return value_(t); }
    const RealFunction& evaluator() const noexcept { return value_; }
    const RealFunction& derivative() const noexcept { return derivative_; }
    bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }
    bool has_analytic_coeffs() const noexcept { return static_cast<bool>(coeff_); }
    double analytic_coeff(int j) const { return coeff_(j); }

    int k() const noexcept { return k_; }
    double r() const noexcept { return r_; }

    /// |S'|_1 = int_0^1 |S'(t)| dt; empty for signals without a derivative.
    std::optional<double> dS_l1() const noexcept { return dS_l1_; }
    /// ||S||^2 = int_0^1 S^2.
    double energy() const noexcept { return energy_; }

    /// sum_{j > J} theta_j^2 from the energy and the leading coefficients.
    double tail_energy(const CoeffVector& leading) const;

private:
    std::string name_;
    RealFunction value_;
    RealFunction derivative_;
    CoeffFunction coeff_;
    int k_;
    double r_;
    std::optional<double> dS_l1_;
    double energy_ = 0.0;
};

/// a_j = sum_{i=0}^{k} (2 pi [j/2])^{2i}.
double ellipsoid_weight(BasisIndex j, int k);

struct SobolevMembership {
    bool member = false;
    double margin = 0.0;          // r - sum_{j<=J} a_j theta_j^2
    bool near_boundary = false;   // |margin| within tolerance: undecidable at this J
};

SobolevMembership check_sobolev_membership(const SignalSpec& signal, int truncation,
                                           double tolerance = 1e-9);

// Catalogue ---------------------------------------------------------------

SignalSpec zero_signal();
SignalSpec constant_signal(double c);

/// sum_j coeffs[j-1] phi_j with the given smoothness metadata.
SignalSpec trig_polynomial(std::string name, std::vector<double> coeffs, int k, double r);

/// amplitude * exp(cos(2 pi t)); coefficients via modified Bessel functions.
SignalSpec exp_cosine(double amplitude, int k, double r);

/// Names accepted by catalogue_signal().
std::vector<std::string> catalogue_names();

/// "zero", "trigpoly", "expcos" (k=1, r=1 members of W^1_1).
SignalSpec catalogue_signal(const std::string& name);

} // namespace ouselect
