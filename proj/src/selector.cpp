#include "ouselect/selector.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ouselect/basis.hpp"

namespace ouselect {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

} // namespace

double WeightSequence::at(int j) const noexcept {
    if (j < 1 || static_cast<std::size_t>(j) > gamma.size()) {
        return 0.0;
    }
    return gamma[static_cast<std::size_t>(j - 1)];
}

int WeightSequence::support() const noexcept {
    for (std::size_t j = gamma.size(); j > 0; --j) {
        if (gamma[j - 1] > 0.0) {
            return static_cast<int>(j);
        }
    }
    return 0;
}

double WeightSequence::energy() const noexcept {
    double e = 0.0;
    for (double g : gamma) {
        e += g * g;
    }
    return e;
}

std::string WeightSequence::label() const {
    if (custom) {
        return "custom";
    }
    std::ostringstream s;
    s << "beta=" << beta << ",t=" << t;
    return s.str();
}

double pinsker_tau(int beta) {
    if (beta < 1) {
        throw std::invalid_argument("pinsker_tau: beta must be >= 1");
    }
    const double b = beta;
    return (b + 1.0) * (2.0 * b + 1.0) / (std::pow(std::numbers::pi, 2.0 * b) * b);
}

WeightSequence pinsker_weight(int beta, double t, int n) {
    if (beta < 1 || !(t > 0.0) || n < 3) {
        throw std::invalid_argument("pinsker_weight: need beta >= 1, t > 0, n >= 3");
    }
    WeightSequence w;
    w.beta = beta;
    w.t = t;
    w.omega = std::pow(pinsker_tau(beta) * t * n, 1.0 / (2.0 * beta + 1.0));
    w.j0 = static_cast<int>(std::floor(w.omega / std::log(static_cast<double>(n))));
    const int len = std::min(n, static_cast<int>(std::floor(w.omega)));
    w.gamma.resize(static_cast<std::size_t>(std::max(len, 1)));
    for (int j = 1; j <= len; ++j) {
        w.gamma[static_cast<std::size_t>(j - 1)] =
            j <= w.j0 ? 1.0 : 1.0 - std::pow(j / w.omega, beta);
    }
    if (len < 1 || w.support() == 0) {
        w.gamma.assign(1, 1.0);
    }
    return w;
}

WeightSequence custom_weight(std::vector<double> gamma) {
    for (double g : gamma) {
        if (!(g >= 0.0 && g <= 1.0)) {
            throw std::invalid_argument("custom_weight: entries must lie in [0, 1]");
        }
    }
    WeightSequence w;
    w.custom = true;
    w.gamma = std::move(gamma);
    return w;
}

WeightSequence projection_weight(int d) {
    if (d < 0) {
        throw std::invalid_argument("projection_weight: d must be >= 0");
    }
    return custom_weight(std::vector<double>(static_cast<std::size_t>(d), 1.0));
}

double default_epsilon(int n) { return 1.0 / std::log(static_cast<double>(n) + 1.0); }

int default_k_star(int n) {
    return static_cast<int>(std::ceil(std::sqrt(std::log(static_cast<double>(n) + 1.0))));
}

WeightGrid build_grid(int n, int k_star, double epsilon) {
    if (k_star < 1) {
        throw std::invalid_argument("build_grid: k* must be >= 1");
    }
    if (!(epsilon > 0.0) || epsilon > 1.0) {
        throw std::invalid_argument("build_grid: epsilon must lie in (0, 1]");
    }
    WeightGrid grid;
    grid.n = n;
    grid.k_star = k_star;
    grid.epsilon = epsilon;
    grid.m = static_cast<int>(std::floor(1.0 / (epsilon * epsilon)));
    grid.sequences.reserve(static_cast<std::size_t>(k_star) * static_cast<std::size_t>(grid.m));
    for (int beta = 1; beta <= k_star; ++beta) {
        for (int i = 1; i <= grid.m; ++i) {
            grid.sequences.push_back(pinsker_weight(beta, i * epsilon, n));
            const auto& w = grid.sequences.back();
            grid.mu = std::max(grid.mu, w.support());
            grid.omega_max = std::max(grid.omega_max, w.omega);
        }
    }
    return grid;
}

WeightGrid build_default_grid(int n) { return build_grid(n, default_k_star(n), default_epsilon(n)); }

std::string to_string(SigmaMode mode) { return mode == SigmaMode::known ? "known" : "estimated"; }

SigmaMode sigma_mode_from_string(const std::string& name) {
    if (name == "known") {
        return SigmaMode::known;
    }
    if (name == "estimated") {
        return SigmaMode::estimated;
    }
    throw std::invalid_argument("unknown sigma mode: " + name);
}

void SelectionConfig::validate() const {
    if (!use_schedule && !(rho > 0.0 && rho < 1.0 / 3.0)) {
        throw std::invalid_argument("SelectionConfig: rho must lie in (0, 1/3)");
    }
    if (sigma_mode == SigmaMode::known && !(sigma_known >= 0.0)) {
        throw std::invalid_argument("SelectionConfig: known sigma must be >= 0");
    }
}

double SelectionConfig::rho_for(int n) const { return use_schedule ? rho_schedule(n) : rho; }

std::vector<double> estimate_thetas(const ObservationPath& obs, int truncation) {
    if (obs.n < 1) {
        throw std::invalid_argument("estimate_theta: horizon must be >= 1");
    }
    if (truncation < 1 || truncation > obs.n) {
        throw std::invalid_argument("estimate_theta: need 1 <= j <= n");
    }
    // fold the increments by phase t mod 1
    std::map<double, double> folded;
    for (std::size_t i = 0; i < obs.times.size(); ++i) {
        const double t = obs.times[i];
        folded[t - std::floor(t)] += obs.y_increments[i];
    }
    const int M = truncation / 2;
    std::vector<double> out(static_cast<std::size_t>(truncation), 0.0);
    for (const auto& [phase, y] : folded) {
        out[0] += y;
        for (int m = 1; m <= M; ++m) {
            const double ang = kTwoPi * std::fmod(m * phase, 1.0);
            out[static_cast<std::size_t>(2 * m - 1)] += std::numbers::sqrt2 * std::cos(ang) * y;
            if (2 * m + 1 <= truncation) {
                out[static_cast<std::size_t>(2 * m)] += std::numbers::sqrt2 * std::sin(ang) * y;
            }
        }
    }
    for (double& v : out) {
        v /= obs.n;
    }
    return out;
}

double estimate_theta(const ObservationPath& obs, int j) {
    BasisIndex idx(j);
    if (j > obs.n) {
        throw std::invalid_argument("estimate_theta: j exceeds n");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < obs.times.size(); ++i) {
        const double t = obs.times[i];
        s += phi_periodic(idx.value(), t - std::floor(t)) * obs.y_increments[i];
    }
    return s / obs.n;
}

int sigma_cutoff(int n) { return static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))) + 1; }

double estimate_sigma(const std::vector<double>& theta_hat, int n) {
    const int l = sigma_cutoff(n);
    if (n < 4 || l > n) {
        throw std::invalid_argument("estimate_sigma: need n >= 4");
    }
    if (theta_hat.size() < static_cast<std::size_t>(n)) {
        throw std::invalid_argument("estimate_sigma: theta_hat must cover j = 1..n");
    }
    double s = 0.0;
    for (int j = l; j <= n; ++j) {
        const double v = theta_hat[static_cast<std::size_t>(j - 1)];
        s += v * v;
    }
    return s;
}

double cost(const WeightSequence& gamma, const std::vector<double>& theta_hat, double sigma,
            double rho, int n) {
    const double shift = sigma / n;
    double fit = 0.0;
    double cross = 0.0;
    double energy = 0.0;
    for (std::size_t j = 0; j < gamma.gamma.size(); ++j) {
        const double g = gamma.gamma[j];
        if (g == 0.0) {
            continue;
        }
        const double th = j < theta_hat.size() ? theta_hat[j] : 0.0;
        const double th2 = th * th;
        fit += g * g * th2;
        cross += g * (th2 - shift);
        energy += g * g;
    }
    return fit - 2.0 * cross + rho * sigma * energy / n;
}

double rho_schedule(int n) {
    if (n < 1) {
        throw std::invalid_argument("rho_schedule: n must be >= 1");
    }
    return 1.0 / (6.0 + std::log(static_cast<double>(n) + 1.0));
}

EstimationResult select(const std::vector<double>& theta_hat, const WeightGrid& grid,
                        const SelectionConfig& config) {
    if (grid.sequences.empty()) {
        throw std::invalid_argument("select: empty grid");
    }
    config.validate();
    EstimationResult res;
    res.n = grid.n;
    res.theta_hat = theta_hat;
    res.rho = config.rho_for(grid.n);
    res.sigma_hat = NAN;
    if (static_cast<int>(theta_hat.size()) >= grid.n && sigma_cutoff(grid.n) <= grid.n) {
        res.sigma_hat = estimate_sigma(theta_hat, grid.n);
    }
    if (config.sigma_mode == SigmaMode::estimated) {
        if (std::isnan(res.sigma_hat)) {
            throw std::invalid_argument("select: estimated sigma needs theta_hat for j = 1..n");
        }
        res.sigma_used = res.sigma_hat;
    } else {
        res.sigma_used = config.sigma_known;
    }
    res.costs.reserve(grid.sequences.size());
    for (const auto& w : grid.sequences) {
        res.costs.push_back(cost(w, theta_hat, res.sigma_used, res.rho, grid.n));
    }
    res.selected = 0;
    for (std::size_t i = 1; i < res.costs.size(); ++i) {
        if (res.costs[i] < res.costs[static_cast<std::size_t>(res.selected)]) {
            res.selected = static_cast<int>(i);
        }
    }
    const auto& chosen = grid.sequences[static_cast<std::size_t>(res.selected)];
    res.final_coeffs.resize(chosen.gamma.size());
    for (std::size_t j = 0; j < chosen.gamma.size(); ++j) {
        const double th = j < theta_hat.size() ? theta_hat[j] : 0.0;
        res.final_coeffs[j] = chosen.gamma[j] * th;
    }
    return res;
}

Alpha0 oracle_weight_alpha0(int k, double r, double sigma_star, int n, double epsilon) {
    if (k < 1 || !(r > 0.0) || !(sigma_star > 0.0) || !(epsilon > 0.0) || epsilon > 1.0) {
        throw std::invalid_argument("oracle_weight_alpha0: need k >= 1, r, sigma* > 0, 0 < eps <= 1");
    }
    const double rbar = r / sigma_star;
    const double steps = std::floor(rbar / epsilon);
    if (steps < 1.0) {
        throw std::domain_error("oracle_weight_alpha0: t0 = 0 (epsilon too coarse for r/sigma*)");
    }
    Alpha0 out;
    out.t0 = steps * epsilon;
    const int m = static_cast<int>(std::floor(1.0 / (epsilon * epsilon)));
    out.in_grid = k <= default_k_star(n) && steps <= m;
    out.gamma = pinsker_weight(k, out.t0, n);
    return out;
}

} // namespace ouselect
