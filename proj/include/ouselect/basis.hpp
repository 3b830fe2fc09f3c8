#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ouselect/quadrature.hpp"

namespace ouselect {

class SignalSpec;

/// 1-based index into the trigonometric basis; rejects 0.
class BasisIndex {
public:
    explicit BasisIndex(int j);

    int value() const noexcept { return j_; }
    /// [j/2], the integer frequency of phi_j.
    int frequency() const noexcept { return j_ / 2; }
    bool is_cosine() const noexcept { return j_ >= 2 && j_ % 2 == 0; }

private:
    int j_;
};

/// Coefficients theta_1..theta_J of the trigonometric basis. values[0] is theta_1.
struct CoeffVector {
    std::vector<double> values;

    CoeffVector() = default;
    explicit CoeffVector(std::vector<double> v) : values(std::move(v)) {}

    std::size_t truncation() const noexcept { return values.size(); }
    /// theta_j for 1-based j; zero beyond the truncation.
    double at(int j) const noexcept;
    double energy() const noexcept;
};

struct QuadratureConfig {
    int points = 4096;          // uniform grid on the unit period
    double tolerance = 1e-10;   // accepted |Q_N - Q_{N/2}|
};

/// phi_j(x) on [0, 1]: 1, sqrt2 cos(2 pi [j/2] x) for even j, sqrt2 sin(2 pi [j/2] x) for odd j >= 3.
double phi(BasisIndex j, double x);

/// phi_j extended 1-periodically to the real line (no domain check).
double phi_periodic(int j, double t) noexcept;

/// The basis element as a callable on [0, n].
RealFunction basis_function(int j);

/// theta_j = int_0^1 S phi_j by the periodic rectangle rule; returns the
/// analytic coefficient when the signal carries one. Throws NumericalError when
/// halving the grid moves the estimate by more than the tolerance.
double fourier_coeff(const SignalSpec& signal, BasisIndex j, const QuadratureConfig& quad = {});

/// theta_1..theta_J in one pass.
CoeffVector fourier_coeffs(const SignalSpec& signal, int truncation, const QuadratureConfig& quad = {});

/// Partial sum sum_j c_j phi_j(x).
double synthesize(const CoeffVector& coeffs, double x);

/// sum_j (c1_j - c2_j)^2 with zero padding to the longer vector.
double parseval_sq_distance(const CoeffVector& c1, const CoeffVector& c2);

} // namespace ouselect
