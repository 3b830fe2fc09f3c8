#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ouselect/basis.hpp"
#include "ouselect/noise.hpp"
#include "ouselect/selector.hpp"
#include "ouselect/signals.hpp"
#include "ouselect/spectral.hpp"
#include "ouselect/transforms.hpp"

namespace ouselect {

/// How theta_hat is produced in each replicate.
enum class Engine {
    spectral,  // exact draw of xi_{j,n} (SpectralSampler)
    path       // simulate_noise + observe + estimate_thetas
};
std::string to_string(Engine e);
Engine engine_from_string(const std::string& name);

struct MCConfig {
    int replicates = 500;
    std::uint64_t seed = 1;
    Engine engine = Engine::spectral;
    double dt = 1.0 / 64.0;  // path engine only
    int threads = 1;

    void validate(int min_replicates = 2) const;
};

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
};

/// Slowly growing cap l_n = 1 + ln(n + 1).
double l_n(int n);

/// Parseval truncation for risk: max(2 ceil(omega_max), 4 ceil(sqrt n), mu), capped at n.
int risk_truncation(int n, double omega_max, int mu);

/// Fixed per-experiment data: true coefficients theta_1..theta_n and the tail energy.
class SignalTable {
public:
    SignalTable(const SignalSpec& signal, int n);

    const std::vector<double>& theta() const noexcept { return theta_; }
    /// sum_{j > J} theta_j^2 (from the signal energy).
    double tail(int J) const;
    const SignalSpec& signal() const noexcept { return *signal_; }

private:
    const SignalSpec* signal_;
    std::vector<double> theta_;
    std::vector<double> prefix_;  // prefix_[J] = sum_{j<=J} theta_j^2
};

/// theta_hat_{1..n} for one replicate.
class ReplicateSource {
public:
    ReplicateSource(const SignalTable& table, const NoiseParams& params, int n, const MCConfig& cfg);
    std::vector<double> theta_hat(std::uint64_t replicate) const;
    int horizon() const noexcept { return n_; }

private:
    const SignalTable& table_;
    NoiseParams params_;
    int n_;
    MCConfig cfg_;
    std::unique_ptr<SpectralSampler> sampler_;
};

/// sum_{j<=J} (gamma(j) th_hat_j - theta_j)^2 + tail(J).
double weighted_loss(const WeightSequence& gamma, const std::vector<double>& theta_hat,
                     const SignalTable& table, int J);

/// What one Monte Carlo run tracks.
struct RunDesign {
    std::vector<WeightSequence> weights;  // fixed estimators
    const WeightGrid* grid = nullptr;     // grid losses and selection (optional)
    double rho = 0.1;
    bool select_known = false;     // sigma = rho* of the noise
    bool select_estimated = false; // sigma = sigma_hat
};

struct RunSummary {
    int n = 0;
    int replicates = 0;
    int truncation = 0;
    std::vector<MeanSE> weight_risk;
    std::vector<MeanSE> grid_risk;
    MeanSE selected_known;
    MeanSE selected_estimated;
    MeanSE abs_sigma_error;  // |sigma_hat - rho*|
    MeanSE sigma_hat;
    std::vector<int> selected_known_counts;
    std::vector<int> selected_estimated_counts;
};

/// Replicates are seeded replicate_seed(cfg.seed, r); aggregation runs in
/// replicate order whatever the thread count.
RunSummary run_replicates(const SignalTable& table, const NoiseParams& params, int n,
                          const RunDesign& design, const MCConfig& cfg);

/// Quadratic risk of a fixed weight sequence.
MeanSE mc_risk(const SignalSpec& signal, const NoiseParams& params, int n, const WeightSequence& gamma,
               const MCConfig& cfg);
/// Quadratic risk of the model-selection estimate (known sigma = rho* of params).
MeanSE mc_risk_selected(const SignalSpec& signal, const NoiseParams& params, int n, const WeightGrid& grid,
                        const SelectionConfig& config, const MCConfig& cfg);

struct FamilyGrid {
    std::vector<NoiseParams> members;
    FamilyBounds bounds;

    void validate() const;
};

/// 3 x 3 box over a in {0, -a_max/2, -a_max} and lambda in {0, lambda_max/2,
/// lambda_max} at fixed rho* (split evenly between the Brownian and jump parts).
FamilyGrid family_box(const FamilyBounds& bounds, double rho_star, JumpLaw law = JumpLaw::rademacher);

struct EstimatorSpec {
    bool selected = false;
    WeightSequence gamma;                  // when !selected
    const WeightGrid* grid = nullptr;      // when selected
    SelectionConfig selection;
};

struct RobustRisk {
    MeanSE worst;
    int argmax = 0;
    std::vector<MeanSE> per_member;
};

RobustRisk robust_risk(const SignalSpec& signal, const FamilyGrid& family, int n,
                       const EstimatorSpec& estimator, const MCConfig& cfg);

/// Leading coefficient (1 + 3 rho - 2 rho^2) / (1 - 3 rho).
double oracle_coefficient(double rho);
/// (6 rho*_max nu + 4 rho*_max L1* + 56 nu M*) / (rho*_min rho (1 - 3 rho)).
double psi_Q(const MomentConstants& mc, const FamilyBounds& bounds, int nu, double rho);
/// kappa*_n(S) with varsigma* = rho*_max and sigma* = 3 rho*_max.
double kappa_star(double dS_l1, const FamilyBounds& bounds, int n);

struct AuditRecord {
    int n = 0;
    double rho = 0.0;
    SigmaMode mode = SigmaMode::known;
    MeanSE lhs;             // risk of the selected estimate
    MeanSE oracle_min;      // min over the grid
    int oracle_index = 0;
    double coefficient = 0.0;
    double psi = 0.0;
    double b_q = 0.0;
    double b1_star = 0.0;   // estimated mode with the kappa* bound (NaN without |S'|_1)
    double rhs = 0.0;
    MeanSE abs_sigma_error;
    double kappa = 0.0;
    double sigma_bound = 0.0;  // kappa / sqrt(n)
    bool pass = false;
    bool oracle_not_beaten = false;
};

/// Runs the oracle-inequality audit for both sigma modes from one set of replicates.
std::vector<AuditRecord> oracle_audit(const SignalSpec& signal, const NoiseParams& params,
                                      const FamilyBounds& bounds, int n, const WeightGrid& grid,
                                      double rho, const MCConfig& cfg);

struct SigmaRow {
    int n = 0;
    int member = 0;
    MeanSE abs_error;
    double kappa = 0.0;
    double bound = 0.0;
    bool pass = false;
};

std::vector<SigmaRow> sigma_consistency(const SignalSpec& signal, const FamilyGrid& family,
                                        const std::vector<int>& n_list, const MCConfig& cfg);

struct ConditionReport {
    int n = 0;
    int j_max = 0;
    std::vector<MeanSE> mean_sq;     // E xi^2_{j,n}, j = 1..j_max
    std::vector<double> envelope;    // 2 rho* (j = 1), 15|a|(1+|a|) rho* / (pi^2 j^2)
    std::vector<bool> within;        // |mean - rho*| <= envelope + 3 SE
    double L1_hat = 0.0;
    double L1_bound = 0.0;
    double L2_hat = 0.0;
    double L2_bound = 0.0;
    bool pass = false;
};

/// Condition C1/C2 checks from exact draws of xi_{j,n}.
ConditionReport condition_checks(const NoiseParams& params, const FamilyBounds& bounds, int n,
                                 int j_max, const MCConfig& cfg);

/// R*_k = ((2k+1) r)^{1/(2k+1)} (sigma* k / ((k+1) pi))^{2k/(2k+1)}.
double pinsker_constant(int k, double r, double sigma_star);

struct EfficiencyRow {
    int n = 0;
    double t0 = 0.0;
    bool alpha0_in_grid = false;
    MeanSE alpha0_risk;
    MeanSE selected_risk;
    MeanSE alpha0_ratio;
    MeanSE selected_ratio;
    int alpha0_argmax = 0;
    int selected_argmax = 0;
};

struct EfficiencyReport {
    double pinsker = 0.0;
    std::vector<EfficiencyRow> rows;
    bool alpha0_trend = false;
    bool selected_trend = false;
    bool positive = false;
};

/// Normalized robust risks n^{2k/(2k+1)} R / R*_k for gamma_{alpha0} and for the
/// full selection (estimated sigma, rho = rho_n, default grid).
EfficiencyReport efficiency_experiment(const SignalSpec& signal, const FamilyGrid& family,
                                       double sigma_star, const std::vector<int>& n_list,
                                       const MCConfig& cfg);

/// Nonincreasing within 3 combined standard errors.
bool nonincreasing_within_se(const std::vector<MeanSE>& values);

} // namespace ouselect
