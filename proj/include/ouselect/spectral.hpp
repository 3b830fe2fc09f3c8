#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "ouselect/noise.hpp"

namespace ouselect {

/// Exact sampler for the normalized noise coefficients
/// xi_{j,n} = n^{-1/2} int_0^n phi_j d xi, j = 1..J, without building a path.
///
/// For phi_j with frequency w = 2 pi m, int phi_j d xi = int g_j du where
/// g = sqrt2 [c e^{i w u} + d e^{a(n-u)}] (real or imaginary part), with
/// c = i w / (a + i w), d = a / (a + i w). The Brownian part is a linear map of
/// independent N(0, n) trigonometric integrals plus E = int e^{a(n-u)} dw,
/// which is drawn by regression on the included directions; the jump part is
/// summed exactly over the arrivals.
class SpectralSampler {
public:
    SpectralSampler(const NoiseParams& params, int n, int truncation);

    int horizon() const noexcept { return n_; }
    int truncation() const noexcept { return J_; }
    const NoiseParams& params() const noexcept { return params_; }

    /// xi_{1..J, n}. Draw order: jumps (count, times, marks), w_n, the
    /// trigonometric integrals in increasing frequency (cos then sin), residual of E.
    std::vector<double> draw(Rng& rng) const;
    std::vector<double> draw(std::uint64_t seed) const;

private:
    NoiseParams params_;
    int n_;
    int J_;
    int M_;  // highest frequency index
    std::vector<std::complex<double>> c_;  // per m = 1..M (index m - 1)
    std::vector<std::complex<double>> d_;
    std::vector<double> beta_cos_;  // regression of E on the normalized cos/sin integrals
    std::vector<double> beta_sin_;
    double beta_w_ = 0.0;
    double residual_sd_ = 0.0;
};

} // namespace ouselect
