#include "ouselect/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ouselect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kReseed = 64;  // exact phase every kReseed rotation steps

} // namespace

SpectralSampler::SpectralSampler(const NoiseParams& params, int n, int truncation)
    : params_(params), n_(n), J_(truncation), M_(truncation / 2) {
    params_.validate();
    if (n < 1 || truncation < 1) {
        throw std::invalid_argument("SpectralSampler: need n >= 1 and J >= 1");
    }
    const double a = params.a;
    const double nn = static_cast<double>(n);
    const double sqrt_n = std::sqrt(nn);
    const double q = -std::expm1(a * nn);  // 1 - e^{an}
    const double var_e = a == 0.0 ? nn : std::expm1(2.0 * a * nn) / (2.0 * a);
    beta_w_ = (a == 0.0 ? nn : q / (-a)) / sqrt_n;
    double explained = beta_w_ * beta_w_;
    c_.resize(static_cast<std::size_t>(M_));
    d_.resize(static_cast<std::size_t>(M_));
    beta_cos_.resize(static_cast<std::size_t>(M_));
    beta_sin_.resize(static_cast<std::size_t>(M_));
    for (int m = 1; m <= M_; ++m) {
        const auto idx = static_cast<std::size_t>(m - 1);
        const double w = kTwoPi * m;
        const double den = a * a + w * w;
        c_[idx] = {w * w / den, a * w / den};
        d_[idx] = {a * a / den, -a * w / den};
        beta_cos_[idx] = std::numbers::sqrt2 * (-q * a / den) / sqrt_n;
        beta_sin_[idx] = std::numbers::sqrt2 * (-q * w / den) / sqrt_n;
        explained += beta_cos_[idx] * beta_cos_[idx] + beta_sin_[idx] * beta_sin_[idx];
    }
    residual_sd_ = std::sqrt(std::max(0.0, var_e - explained));
}

std::vector<double> SpectralSampler::draw(std::uint64_t seed) const {
    Rng rng(seed);
    return draw(rng);
}

std::vector<double> SpectralSampler::draw(Rng& rng) const {
    const double nn = static_cast<double>(n_);
    const double sqrt_n = std::sqrt(nn);
    const double a = params_.a;

    std::vector<double> times;
    std::vector<double> marks;
    draw_jumps(params_, nn, rng, times, marks);

    std::normal_distribution<double> normal(0.0, 1.0);
    const double zw = normal(rng);
    std::vector<double> zc(static_cast<std::size_t>(M_));
    std::vector<double> zs(static_cast<std::size_t>(M_));
    double e = beta_w_ * zw;
    for (int m = 0; m < M_; ++m) {
        const auto idx = static_cast<std::size_t>(m);
        zc[idx] = normal(rng);
        zs[idx] = normal(rng);
        e += beta_cos_[idx] * zc[idx] + beta_sin_[idx] * zs[idx];
    }
    e += residual_sd_ * normal(rng);

    // jump sums P_m = sum_k Y_k e^{i w_m T_k}, Q = sum_k Y_k e^{a(n - T_k)}
    std::vector<double> pr(static_cast<std::size_t>(M_), 0.0);
    std::vector<double> pi(static_cast<std::size_t>(M_), 0.0);
    double qsum = 0.0;
    if (params_.rho2 != 0.0) {
        for (std::size_t k = 0; k < times.size(); ++k) {
            const double t = times[k];
            const double y = marks[k];
            qsum += y * std::exp(a * (nn - t));
            const double base = kTwoPi * (t - std::floor(t));
            const double zr = std::cos(base);
            const double zi = std::sin(base);
            double ar = 1.0;
            double ai = 0.0;
            for (int m = 1; m <= M_; ++m) {
                if (m % kReseed == 0) {
                    const double ph = static_cast<double>(m) * t;
                    const double ang = kTwoPi * (ph - std::floor(ph));
                    ar = std::cos(ang);
                    ai = std::sin(ang);
                } else {
                    const double nr = ar * zr - ai * zi;
                    ai = ar * zi + ai * zr;
                    ar = nr;
                }
                pr[static_cast<std::size_t>(m - 1)] += y * ar;
                pi[static_cast<std::size_t>(m - 1)] += y * ai;
            }
        }
    }

    const double r1 = params_.rho1;
    const double r2 = params_.rho2;
    std::vector<double> out(static_cast<std::size_t>(J_));
    out[0] = (r1 * e + r2 * qsum) / sqrt_n;
    for (int m = 1; m <= M_; ++m) {
        const auto idx = static_cast<std::size_t>(m - 1);
        const double cr = c_[idx].real();
        const double ci = c_[idx].imag();
        const double dr = d_[idx].real();
        const double di = d_[idx].imag();
        const double cm = sqrt_n * zc[idx];
        const double sm = sqrt_n * zs[idx];
        const double b_cos = cr * cm - ci * sm + std::numbers::sqrt2 * dr * e;
        const double j_cos = std::numbers::sqrt2 * (cr * pr[idx] - ci * pi[idx] + dr * qsum);
        out[static_cast<std::size_t>(2 * m - 1)] = (r1 * b_cos + r2 * j_cos) / sqrt_n;
        if (2 * m + 1 <= J_) {
            const double b_sin = cr * sm + ci * cm + std::numbers::sqrt2 * di * e;
            const double j_sin = std::numbers::sqrt2 * (cr * pi[idx] + ci * pr[idx] + di * qsum);
            out[static_cast<std::size_t>(2 * m)] = (r1 * b_sin + r2 * j_sin) / sqrt_n;
        }
    }
    return out;
}

} // namespace ouselect
