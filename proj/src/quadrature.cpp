#include "ouselect/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace ouselect::quad {

namespace {

constexpr int kStencil = 6;

// Stencil weights for (points, offset), computed once.
struct WeightTable {
    std::array<std::array<std::vector<double>, kStencil>, kStencil + 1> table;

    WeightTable() {
        for (int p = 2; p <= kStencil; ++p) {
            for (int o = 0; o + 1 < p; ++o) {
                table[p][o] = cell_weights(p, o);
            }
        }
    }
};

const WeightTable& weights() {
    static const WeightTable w;
    return w;
}

} // namespace

UniformGrid::UniformGrid(double length_, int cells_) : length(length_), cells(cells_) {
    if (!(length_ > 0.0) || cells_ < 1) {
        throw std::invalid_argument("UniformGrid: need positive length and at least one cell");
    }
}

std::vector<double> UniformGrid::sample(const RealFunction& f) const {
    std::vector<double> out(static_cast<std::size_t>(nodes()));
    for (int i = 0; i < nodes(); ++i) {
        out[static_cast<std::size_t>(i)] = f(node(i));
    }
    return out;
}

std::vector<double> cell_weights(int points, int offset) {
    if (points < 2 || offset < 0 || offset + 1 >= points) {
        throw std::invalid_argument("cell_weights: invalid stencil");
    }
    std::vector<double> w(static_cast<std::size_t>(points), 0.0);
    for (int m = 0; m < points; ++m) {
        // coefficients of the Lagrange basis polynomial l_m in the monomial basis
        std::vector<double> poly{1.0};
        double denom = 1.0;
        for (int k = 0; k < points; ++k) {
            if (k == m) {
                continue;
            }
            std::vector<double> next(poly.size() + 1, 0.0);
            for (std::size_t d = 0; d < poly.size(); ++d) {
                next[d + 1] += poly[d];
                next[d] -= static_cast<double>(k) * poly[d];
            }
            poly = std::move(next);
            denom *= static_cast<double>(m - k);
        }
        const double lo = offset;
        const double hi = offset + 1;
        double integral = 0.0;
        for (std::size_t d = 0; d < poly.size(); ++d) {
            const double e = static_cast<double>(d + 1);
            integral += poly[d] * (std::pow(hi, e) - std::pow(lo, e)) / e;
        }
        w[static_cast<std::size_t>(m)] = integral / denom;
    }
    return w;
}

std::vector<double> cumulative(std::span<const double> values, double h) {
    const int n = static_cast<int>(values.size());
    std::vector<double> out(values.size(), 0.0);
    if (n < 2) {
        return out;
    }
    const int p = std::min(n, kStencil);
    const auto& tab = weights().table[p];
    for (int i = 0; i + 1 < n; ++i) {
        // stencil start: centred where possible, clamped to the grid
        const int start = std::clamp(i - (p / 2 - 1), 0, n - p);
        const auto& w = tab[i - start];
        double cell = 0.0;
        for (int m = 0; m < p; ++m) {
            cell += w[m] * values[start + m];
        }
        out[i + 1] = out[i] + h * cell;
    }
    return out;
}

double integrate(std::span<const double> values, double h) {
    if (values.size() < 2) {
        return 0.0;
    }
    return cumulative(values, h).back();
}

std::vector<double> exp_convolution(std::span<const double> values, double a, double h) {
    const int n = static_cast<int>(values.size());
    std::vector<double> out(values.size(), 0.0);
    if (n < 2) {
        return out;
    }
    if (a == 0.0) {
        return cumulative(values, h);
    }
    const int p = std::min(n, kStencil);
    const auto& tab = weights().table[p];
    const double decay = std::exp(a * h);
    // e^{a (x_{i+1} - x_m)} depends only on (i + 1 - m), which lies in [-(p-2), p-1]
    std::array<double, 2 * kStencil> factor{};
    for (int d = -(p - 2); d <= p - 1; ++d) {
        factor[d + kStencil] = std::exp(a * h * d);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const int start = std::clamp(i - (p / 2 - 1), 0, n - p);
        const auto& w = tab[i - start];
        double cell = 0.0;
        for (int m = 0; m < p; ++m) {
            cell += w[m] * factor[(i + 1 - (start + m)) + kStencil] * values[start + m];
        }
        out[i + 1] = decay * out[i] + h * cell;
    }
    return out;
}

double periodic_mean(const RealFunction& f, int points) {
    if (points < 1) {
        throw std::invalid_argument("periodic_mean: need at least one point");
    }
    double sum = 0.0;
    for (int i = 0; i < points; ++i) {
        sum += f(static_cast<double>(i) / points);
    }
    return sum / points;
}

double gauss_legendre(const RealFunction& f, double lo, double hi, int pieces) {
    static constexpr std::array<double, 5> x{-0.9061798459386640, -0.5384693101056831, 0.0,
                                             0.5384693101056831, 0.9061798459386640};
    static constexpr std::array<double, 5> w{0.2369268850561891, 0.4786286704993665,
                                             0.5688888888888889, 0.4786286704993665,
                                             0.2369268850561891};
    if (pieces < 1) {
        throw std::invalid_argument("gauss_legendre: pieces must be positive");
    }
    const double width = (hi - lo) / pieces;
    double total = 0.0;
    for (int k = 0; k < pieces; ++k) {
        const double mid = lo + (k + 0.5) * width;
        const double half = 0.5 * width;
        double s = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q) {
            s += w[q] * f(mid + half * x[q]);
        }
        total += half * s;
    }
    return total;
}

} // namespace ouselect::quad
