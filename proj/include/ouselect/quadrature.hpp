#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ouselect {

/// Real-valued function of one real variable (integrands, signals, basis elements).
using RealFunction = std::function<double(double)>;

/// Raised when a numerical routine cannot meet its accuracy target.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double achieved_error)
        : std::runtime_error(what), achieved_error_(achieved_error) {}

    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

namespace quad {

/// Uniform grid 0 = x_0 < ... < x_N = length with N cells.
struct UniformGrid {
    double length = 0.0;
    int cells = 0;

    UniformGrid(double length, int cells);

    double step() const noexcept { return length / cells; }
    double node(int i) const noexcept { return length * static_cast<double>(i) / cells; }
    int nodes() const noexcept { return cells + 1; }

    std::vector<double> sample(const RealFunction& f) const;
};

// Cumulative integral C_i = int_{x_0}^{x_i} F for samples F_i on a uniform grid.
// Each cell is integrated with a six-point Lagrange stencil (sixth order); grids
// with fewer than six nodes fall back to the highest order the nodes allow.
std::vector<double> cumulative(std::span<const double> values, double h);

/// Definite integral over the whole sampled range (last entry of cumulative()).
double integrate(std::span<const double> values, double h);

/// C_i = int_0^{x_i} e^{a (x_i - v)} F(v) dv, evaluated by a cell recursion so
/// that no exponential of the full horizon is ever formed.
std::vector<double> exp_convolution(std::span<const double> values, double a, double h);

/// Mean of a 1-periodic function over one period with the N-point rectangle
/// rule (spectrally accurate for smooth periodic integrands).
double periodic_mean(const RealFunction& f, int points);

/// Integral of f over [lo, hi] with composite 5-point Gauss-Legendre on `pieces` panels.
double gauss_legendre(const RealFunction& f, double lo, double hi, int pieces = 1);

/// Weights w_m such that int_{x_o}^{x_{o+1}} F ~ h * sum_m w_m F_m, with the
/// interpolation stencil on nodes 0..points-1. Exposed for tests.
std::vector<double> cell_weights(int points, int offset);

} // namespace quad
} // namespace ouselect
