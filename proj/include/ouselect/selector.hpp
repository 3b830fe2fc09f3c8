#pragma once

#include <string>
#include <vector>

#include "ouselect/noise.hpp"

namespace ouselect {

/// Shrinkage weights gamma(1..), zero beyond the stored length.
struct WeightSequence {
    int beta = 0;          // 0 for custom sequences
    double t = 0.0;
    bool custom = false;
    double omega = 0.0;    // Pinsker cut-off omega_alpha (0 for custom)
    int j0 = 0;
    std::vector<double> gamma;  // gamma[j-1] = gamma(j)

    double at(int j) const noexcept;
    /// #(gamma): the largest j with gamma(j) > 0.
    int support() const noexcept;
    /// |gamma|^2.
    double energy() const noexcept;
    std::string label() const;
};

/// tau_beta = (beta + 1)(2 beta + 1) / (pi^{2 beta} beta).
double pinsker_tau(int beta);

/// Pinsker weights for alpha = (beta, t). Needs beta >= 1, t > 0, n >= 3. When
/// omega < 1 the piecewise formula leaves nothing; gamma(1) = 1 is kept so the
/// sequence stays admissible (0 < #(gamma)).
WeightSequence pinsker_weight(int beta, double t, int n);

/// Custom sequence; entries must lie in [0, 1].
WeightSequence custom_weight(std::vector<double> gamma);
/// gamma = 1 on j <= d.
WeightSequence projection_weight(int d);

struct WeightGrid {
    int n = 0;
    int k_star = 0;
    double epsilon = 0.0;
    int m = 0;
    std::vector<WeightSequence> sequences;  // beta-major
    int mu = 0;             // max support
    double omega_max = 0.0;

    int nu() const noexcept { return static_cast<int>(sequences.size()); }
};

double default_epsilon(int n);
int default_k_star(int n);

/// {1..k*} x {eps, 2 eps, ..., m eps}, m = floor(1/eps^2).
WeightGrid build_grid(int n, int k_star, double epsilon);
WeightGrid build_default_grid(int n);

enum class SigmaMode { known, estimated };
std::string to_string(SigmaMode mode);
SigmaMode sigma_mode_from_string(const std::string& name);

struct SelectionConfig {
    double rho = 0.1;
    SigmaMode sigma_mode = SigmaMode::estimated;
    double sigma_known = 0.0;   // used in known mode
    bool use_schedule = false;  // rho = rho_schedule(n)

    void validate() const;
    double rho_for(int n) const;
};

struct EstimationResult {
    int n = 0;
    std::vector<double> theta_hat;   // j = 1..n
    double sigma_hat = 0.0;          // sigma estimate (NaN when not computable)
    double sigma_used = 0.0;
    double rho = 0.0;
    std::vector<double> costs;
    int selected = 0;
    std::vector<double> final_coeffs;
};

/// theta_hat_{j,n} = (1/n) sum_i phi_j(t_i mod 1) dy_i. Rejects j > n.
double estimate_theta(const ObservationPath& obs, int j);
/// theta_hat_{1..J} in one pass (observations folded by phase).
std::vector<double> estimate_thetas(const ObservationPath& obs, int truncation);

/// sum_{j=l}^{n} theta_hat_j^2, l = floor(sqrt n) + 1.
double estimate_sigma(const std::vector<double>& theta_hat, int n);
int sigma_cutoff(int n);

/// J_n(gamma) = sum gamma^2 th^2 - 2 sum gamma (th^2 - sigma/n) + rho sigma |gamma|^2 / n.
double cost(const WeightSequence& gamma, const std::vector<double>& theta_hat, double sigma,
            double rho, int n);

/// argmin over the grid, ties to the smallest index.
EstimationResult select(const std::vector<double>& theta_hat, const WeightGrid& grid,
                        const SelectionConfig& config);

/// 1 / (6 + ln(n + 1)).
double rho_schedule(int n);

struct Alpha0 {
    WeightSequence gamma;
    double t0 = 0.0;
    bool in_grid = false;
};

/// alpha0 = (k, t0), t0 = floor(r_bar / eps) eps, r_bar = r / sigma*. Throws
/// std::domain_error when t0 = 0.
Alpha0 oracle_weight_alpha0(int k, double r, double sigma_star, int n, double epsilon);

} // namespace ouselect
