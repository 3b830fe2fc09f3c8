#include "ouselect/risklab.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <exception>
#include <mutex>
#include <thread>

namespace ouselect {

namespace {

int pow2_at_least(int v) {
    int p = 1;
    while (p < v) {
        p *= 2;
    }
    return p;
}

// Mean and standard error of the columns of a replicate-major table.
std::vector<MeanSE> column_stats(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    std::vector<MeanSE> out(cols);
    const double R = static_cast<double>(rows.size());
    for (std::size_t c = 0; c < cols; ++c) {
        double sum = 0.0;
        for (const auto& row : rows) {
            sum += row[c];
        }
        const double mean = sum / R;
        double ss = 0.0;
        for (const auto& row : rows) {
            ss += (row[c] - mean) * (row[c] - mean);
        }
        out[c].mean = mean;
        out[c].se = rows.size() > 1 ? std::sqrt(ss / (R - 1.0) / R) : 0.0;
    }
    return out;
}

template <class Work>
void for_each_replicate(int replicates, int threads, Work work) {
    threads = std::max(1, std::min(threads, replicates));
    if (threads == 1) {
        for (int r = 0; r < replicates; ++r) {
            work(r);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex guard;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int r = t; r < replicates; r += threads) {
                    work(r);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(guard);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

MeanSE worst_of(const std::vector<MeanSE>& v, int& argmax) {
    argmax = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i].mean > v[static_cast<std::size_t>(argmax)].mean) {
            argmax = static_cast<int>(i);
        }
    }
    return v[static_cast<std::size_t>(argmax)];
}

MCConfig cell_config(const MCConfig& cfg, std::uint64_t cell) {
    MCConfig out = cfg;
    out.seed = replicate_seed(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL, cell);
    return out;
}

} // namespace

std::string to_string(Engine e) { return e == Engine::spectral ? "spectral" : "path"; }

Engine engine_from_string(const std::string& name) {
    if (name == "spectral") {
        return Engine::spectral;
    }
    if (name == "path") {
        return Engine::path;
    }
    throw std::invalid_argument("unknown engine: " + name);
}

void MCConfig::validate(int min_replicates) const {
    if (replicates < min_replicates) {
        throw std::invalid_argument("MCConfig: need at least " + std::to_string(min_replicates) +
                                    " replicates");
    }
    if (engine == Engine::path && !(dt > 0.0)) {
        throw std::invalid_argument("MCConfig: dt must be positive");
    }
    if (threads < 1) {
        throw std::invalid_argument("MCConfig: threads must be >= 1");
    }
}

double l_n(int n) { return 1.0 + std::log(static_cast<double>(n) + 1.0); }

int risk_truncation(int n, double omega_max, int mu) {
    const int a = 2 * static_cast<int>(std::ceil(omega_max));
    const int b = 4 * static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    return std::min(n, std::max({a, b, mu, 1}));
}

SignalTable::SignalTable(const SignalSpec& signal, int n) : signal_(&signal) {
    if (n < 1) {
        throw std::invalid_argument("SignalTable: n must be >= 1");
    }
    QuadratureConfig quad;
    quad.points = std::max(4096, pow2_at_least(4 * n + 4));
    theta_ = fourier_coeffs(signal, n, quad).values;
    prefix_.assign(theta_.size() + 1, 0.0);
    for (std::size_t j = 0; j < theta_.size(); ++j) {
        prefix_[j + 1] = prefix_[j] + theta_[j] * theta_[j];
    }
}

double SignalTable::tail(int J) const {
    const std::size_t k = std::min(prefix_.size() - 1, static_cast<std::size_t>(std::max(J, 0)));
    return std::max(0.0, signal_->energy() - prefix_[k]);
}

ReplicateSource::ReplicateSource(const SignalTable& table, const NoiseParams& params, int n,
                                 const MCConfig& cfg)
    : table_(table), params_(params), n_(n), cfg_(cfg) {
    params_.validate();
    if (static_cast<int>(table.theta().size()) < n) {
        throw std::invalid_argument("ReplicateSource: signal table shorter than n");
    }
    if (cfg.engine == Engine::spectral) {
        sampler_ = std::make_unique<SpectralSampler>(params, n, n);
    }
}

std::vector<double> ReplicateSource::theta_hat(std::uint64_t replicate) const {
    const std::uint64_t seed = replicate_seed(cfg_.seed, replicate);
    if (sampler_) {
        auto xi = sampler_->draw(seed);
        const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
        for (std::size_t j = 0; j < xi.size(); ++j) {
            xi[j] = table_.theta()[j] + scale * xi[j];
        }
        return xi;
    }
    auto path = std::make_shared<const NoisePath>(simulate_noise(params_, n_, cfg_.dt, seed));
    const ObservationPath obs = observe(table_.signal(), path);
    return estimate_thetas(obs, n_);
}

double weighted_loss(const WeightSequence& gamma, const std::vector<double>& theta_hat,
                     const SignalTable& table, int J) {
    const auto& theta = table.theta();
    const int upto = std::min<int>(J, static_cast<int>(theta.size()));
    double s = 0.0;
    for (int j = 1; j <= upto; ++j) {
        const auto idx = static_cast<std::size_t>(j - 1);
        const double d = gamma.at(j) * theta_hat[idx] - theta[idx];
        s += d * d;
    }
    return s + table.tail(upto);
}

RunSummary run_replicates(const SignalTable& table, const NoiseParams& params, int n,
                          const RunDesign& design, const MCConfig& cfg) {
    cfg.validate();
    const ReplicateSource source(table, params, n, cfg);
    const WeightGrid* grid = design.grid;
    if ((design.select_known || design.select_estimated) && grid == nullptr) {
        throw std::invalid_argument("run_replicates: selection requires a grid");
    }
    int mu = grid ? grid->mu : 0;
    double omega_max = grid ? grid->omega_max : 0.0;
    for (const auto& w : design.weights) {
        mu = std::max(mu, w.support());
        omega_max = std::max(omega_max, w.omega);
    }
    const int J = std::max(risk_truncation(n, omega_max, mu), std::min(mu, n));
    const bool sigma_ok = sigma_cutoff(n) <= n;
    if (design.select_estimated && !sigma_ok) {
        throw std::invalid_argument("run_replicates: n too small for the sigma estimate");
    }

    const std::size_t nw = design.weights.size();
    const std::size_t ng = grid ? grid->sequences.size() : 0;
    const std::size_t cols = nw + ng + 4;
    const double rho_star = params.rho_star();
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.replicates));
    std::vector<int> pick_known(static_cast<std::size_t>(cfg.replicates), -1);
    std::vector<int> pick_est(static_cast<std::size_t>(cfg.replicates), -1);

    for_each_replicate(cfg.replicates, cfg.threads, [&](int r) {
        const auto th = source.theta_hat(static_cast<std::uint64_t>(r));
        std::vector<double> row(cols, 0.0);
        for (std::size_t w = 0; w < nw; ++w) {
            row[w] = weighted_loss(design.weights[w], th, table, J);
        }
        for (std::size_t g = 0; g < ng; ++g) {
            row[nw + g] = weighted_loss(grid->sequences[g], th, table, J);
        }
        const double sigma_hat = sigma_ok ? estimate_sigma(th, n) : NAN;
        auto pick = [&](double sigma) {
            int best = 0;
            double best_cost = 0.0;
            for (std::size_t g = 0; g < ng; ++g) {
                const double c = cost(grid->sequences[g], th, sigma, design.rho, n);
                if (g == 0 || c < best_cost) {
                    best = static_cast<int>(g);
                    best_cost = c;
                }
            }
            return best;
        };
        if (design.select_known) {
            const int k = pick(rho_star);
            pick_known[static_cast<std::size_t>(r)] = k;
            row[nw + ng] = row[nw + static_cast<std::size_t>(k)];
        }
        if (design.select_estimated) {
            const int k = pick(sigma_hat);
            pick_est[static_cast<std::size_t>(r)] = k;
            row[nw + ng + 1] = row[nw + static_cast<std::size_t>(k)];
        }
        row[nw + ng + 2] = sigma_ok ? std::abs(sigma_hat - rho_star) : 0.0;
        row[nw + ng + 3] = sigma_ok ? sigma_hat : 0.0;
        rows[static_cast<std::size_t>(r)] = std::move(row);
    });

    const auto stats = column_stats(rows, cols);
    RunSummary out;
    out.n = n;
    out.replicates = cfg.replicates;
    out.truncation = J;
    out.weight_risk.assign(stats.begin(), stats.begin() + static_cast<std::ptrdiff_t>(nw));
    out.grid_risk.assign(stats.begin() + static_cast<std::ptrdiff_t>(nw),
                         stats.begin() + static_cast<std::ptrdiff_t>(nw + ng));
    out.selected_known = stats[nw + ng];
    out.selected_estimated = stats[nw + ng + 1];
    out.abs_sigma_error = stats[nw + ng + 2];
    out.sigma_hat = stats[nw + ng + 3];
    out.selected_known_counts.assign(ng, 0);
    out.selected_estimated_counts.assign(ng, 0);
    for (int r = 0; r < cfg.replicates; ++r) {
        if (pick_known[static_cast<std::size_t>(r)] >= 0) {
            ++out.selected_known_counts[static_cast<std::size_t>(pick_known[static_cast<std::size_t>(r)])];
        }
        if (pick_est[static_cast<std::size_t>(r)] >= 0) {
            ++out.selected_estimated_counts[static_cast<std::size_t>(pick_est[static_cast<std::size_t>(r)])];
        }
    }
    return out;
}

MeanSE mc_risk(const SignalSpec& signal, const NoiseParams& params, int n, const WeightSequence& gamma,
               const MCConfig& cfg) {
    cfg.validate(100);
    const SignalTable table(signal, n);
    RunDesign design;
    design.weights.push_back(gamma);
    return run_replicates(table, params, n, design, cfg).weight_risk.front();
}

MeanSE mc_risk_selected(const SignalSpec& signal, const NoiseParams& params, int n, const WeightGrid& grid,
                        const SelectionConfig& config, const MCConfig& cfg) {
    cfg.validate(100);
    config.validate();
    const SignalTable table(signal, n);
    RunDesign design;
    design.grid = &grid;
    design.rho = config.rho_for(n);
    design.select_known = config.sigma_mode == SigmaMode::known;
    design.select_estimated = config.sigma_mode == SigmaMode::estimated;
    const auto run = run_replicates(table, params, n, design, cfg);
    return design.select_known ? run.selected_known : run.selected_estimated;
}

void FamilyGrid::validate() const {
    bounds.validate();
    if (members.empty()) {
        throw std::invalid_argument("FamilyGrid: no members");
    }
    for (const auto& m : members) {
        m.validate();
        if (!bounds.contains(m, 1e-9)) {
            throw std::invalid_argument("FamilyGrid: member outside the family bounds");
        }
    }
}

FamilyGrid family_box(const FamilyBounds& bounds, double rho_star, JumpLaw law) {
    bounds.validate();
    FamilyGrid fam;
    fam.bounds = bounds;
    for (double a : {0.0, -0.5 * bounds.a_max, -bounds.a_max}) {
        for (double lam : {0.0, 0.5 * bounds.lambda_max, bounds.lambda_max}) {
            NoiseParams p;
            p.a = a == 0.0 ? 0.0 : a;
            p.lambda = lam;
            p.jump_law = law;
            if (lam > 0.0) {
                p.rho1 = std::sqrt(0.5 * rho_star);
                p.rho2 = std::sqrt(0.5 * rho_star / lam);
            } else {
                p.rho1 = std::sqrt(rho_star);
                p.rho2 = 0.0;
            }
            fam.members.push_back(p);
        }
    }
    fam.validate();
    return fam;
}

RobustRisk robust_risk(const SignalSpec& signal, const FamilyGrid& family, int n,
                       const EstimatorSpec& estimator, const MCConfig& cfg) {
    family.validate();
    cfg.validate(100);
    const SignalTable table(signal, n);
    RunDesign design;
    if (estimator.selected) {
        if (estimator.grid == nullptr) {
            throw std::invalid_argument("robust_risk: selection requires a grid");
        }
        estimator.selection.validate();
        design.grid = estimator.grid;
        design.rho = estimator.selection.rho_for(n);
        design.select_known = estimator.selection.sigma_mode == SigmaMode::known;
        design.select_estimated = !design.select_known;
    } else {
        design.weights.push_back(estimator.gamma);
    }
    RobustRisk out;
    for (std::size_t m = 0; m < family.members.size(); ++m) {
        const auto run = run_replicates(table, family.members[m], n, design, cell_config(cfg, m));
        if (!estimator.selected) {
            out.per_member.push_back(run.weight_risk.front());
        } else {
            out.per_member.push_back(design.select_known ? run.selected_known : run.selected_estimated);
        }
    }
    out.worst = worst_of(out.per_member, out.argmax);
    return out;
}

double oracle_coefficient(double rho) {
    if (!(rho > 0.0 && rho < 1.0 / 3.0)) {
        throw std::invalid_argument("oracle_coefficient: rho must lie in (0, 1/3)");
    }
    return (1.0 + 3.0 * rho - 2.0 * rho * rho) / (1.0 - 3.0 * rho);
}

double psi_Q(const MomentConstants& mc, const FamilyBounds& bounds, int nu, double rho) {
    if (!(rho > 0.0 && rho < 1.0 / 3.0)) {
        throw std::invalid_argument("psi_Q: rho must lie in (0, 1/3)");
    }
    const double num = 6.0 * bounds.rho_star_max * nu + 4.0 * bounds.rho_star_max * mc.L1star +
                       56.0 * nu * mc.Mstar;
    return num / (bounds.rho_star_min * rho * (1.0 - 3.0 * rho));
}

double kappa_star(double dS_l1, const FamilyBounds& bounds, int n) {
    const double ln = l_n(n);
    const double varsigma = bounds.rho_star_max;
    const double sigma_star = 3.0 * bounds.rho_star_max;
    const double nn = static_cast<double>(n);
    return 4.0 * dS_l1 * dS_l1 + varsigma + std::sqrt(ln) +
           4.0 * dS_l1 * std::sqrt(sigma_star) / std::pow(nn, 0.25) + ln / std::sqrt(nn);
}

std::vector<AuditRecord> oracle_audit(const SignalSpec& signal, const NoiseParams& params,
                                      const FamilyBounds& bounds, int n, const WeightGrid& grid,
                                      double rho, const MCConfig& cfg) {
    const double coef = oracle_coefficient(rho);
    cfg.validate(100);
    const MomentConstants mc = moment_constants(params, bounds);
    const double psi = psi_Q(mc, bounds, grid.nu(), rho);
    const SignalTable table(signal, n);
    RunDesign design;
    design.grid = &grid;
    design.rho = rho;
    design.select_known = true;
    design.select_estimated = true;
    const auto run = run_replicates(table, params, n, design, cfg);

    int oracle_index = 0;
    const MeanSE oracle = [&] {
        int best = 0;
        for (std::size_t g = 1; g < run.grid_risk.size(); ++g) {
            if (run.grid_risk[g].mean < run.grid_risk[static_cast<std::size_t>(best)].mean) {
                best = static_cast<int>(g);
            }
        }
        oracle_index = best;
        return run.grid_risk[static_cast<std::size_t>(best)];
    }();

    const double kappa = signal.dS_l1() ? kappa_star(*signal.dS_l1(), bounds, n) : NAN;
    std::vector<AuditRecord> out;
    for (SigmaMode mode : {SigmaMode::known, SigmaMode::estimated}) {
        AuditRecord rec;
        rec.n = n;
        rec.rho = rho;
        rec.mode = mode;
        rec.lhs = mode == SigmaMode::known ? run.selected_known : run.selected_estimated;
        rec.oracle_min = oracle;
        rec.oracle_index = oracle_index;
        rec.coefficient = coef;
        rec.psi = psi;
        rec.abs_sigma_error = run.abs_sigma_error;
        rec.b_q = psi;
        if (mode == SigmaMode::estimated) {
            rec.b_q += 6.0 * grid.mu * run.abs_sigma_error.mean / (1.0 - 3.0 * rho);
        }
        rec.kappa = kappa;
        rec.sigma_bound = kappa / std::sqrt(static_cast<double>(n));
        rec.b1_star = psi + 6.0 * grid.mu * rec.sigma_bound / (1.0 - 3.0 * rho);
        rec.rhs = coef * oracle.mean + rec.b_q / n;
        rec.pass = rec.lhs.mean <= rec.rhs + 3.0 * rec.lhs.se;
        rec.oracle_not_beaten =
            oracle.mean <= rec.lhs.mean + 3.0 * std::hypot(rec.lhs.se, oracle.se);
        out.push_back(rec);
    }
    return out;
}

std::vector<SigmaRow> sigma_consistency(const SignalSpec& signal, const FamilyGrid& family,
                                        const std::vector<int>& n_list, const MCConfig& cfg) {
    family.validate();
    cfg.validate(100);
    if (!signal.dS_l1()) {
        throw std::invalid_argument("sigma_consistency: signal has no |S'|_1");
    }
    std::vector<SigmaRow> out;
    std::uint64_t cell = 0;
    for (int n : n_list) {
        const SignalTable table(signal, n);
        const double kappa = kappa_star(*signal.dS_l1(), family.bounds, n);
        for (std::size_t m = 0; m < family.members.size(); ++m, ++cell) {
            const auto run = run_replicates(table, family.members[m], n, RunDesign{}, cell_config(cfg, cell));
            SigmaRow row;
            row.n = n;
            row.member = static_cast<int>(m);
            row.abs_error = run.abs_sigma_error;
            row.kappa = kappa;
            row.bound = kappa / std::sqrt(static_cast<double>(n));
            row.pass = row.abs_error.mean <= row.bound + 3.0 * row.abs_error.se;
            out.push_back(row);
        }
    }
    return out;
}

ConditionReport condition_checks(const NoiseParams& params, const FamilyBounds& bounds, int n,
                                 int j_max, const MCConfig& cfg) {
    cfg.validate(2);
    if (j_max < 1 || j_max > n) {
        throw std::invalid_argument("condition_checks: need 1 <= j_max <= n");
    }
    const SpectralSampler sampler(params, n, j_max);
    const std::size_t J = static_cast<std::size_t>(j_max);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(cfg.replicates));
    for_each_replicate(cfg.replicates, cfg.threads, [&](int r) {
        auto xi = sampler.draw(replicate_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        for (double& v : xi) {
            v *= v;
        }
        rows[static_cast<std::size_t>(r)] = std::move(xi);
    });
    ConditionReport rep;
    rep.n = n;
    rep.j_max = j_max;
    rep.mean_sq = column_stats(rows, J);
    const double rs = params.rho_star();
    const double a = std::abs(params.a);
    rep.pass = true;
    for (std::size_t j = 1; j <= J; ++j) {
        const double env = j == 1 ? 2.0 * rs
                                  : 15.0 * a * (1.0 + a) * rs /
                                        (std::numbers::pi * std::numbers::pi * static_cast<double>(j * j));
        const double dev = std::abs(rep.mean_sq[j - 1].mean - rs);
        rep.envelope.push_back(env);
        const bool ok = dev <= env + 3.0 * rep.mean_sq[j - 1].se;
        rep.within.push_back(ok);
        rep.pass = rep.pass && ok;
        rep.L1_hat += dev;
    }
    const MomentConstants mc = moment_constants(params, bounds);
    rep.L1_bound = mc.L1star;
    rep.L2_bound = 28.0 * mc.Mstar;
    // sup over unit x of E (sum x_j (xi_j^2 - E xi_j^2))^2: top eigenvalue of the covariance
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(J), static_cast<Eigen::Index>(J));
    for (const auto& row : rows) {
        Eigen::VectorXd d(static_cast<Eigen::Index>(J));
        for (std::size_t j = 0; j < J; ++j) {
            d(static_cast<Eigen::Index>(j)) = row[j] - rep.mean_sq[j].mean;
        }
        cov.noalias() += d * d.transpose();
    }
    cov /= std::max(1.0, static_cast<double>(rows.size()) - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    rep.L2_hat = solver.eigenvalues().maxCoeff();
    rep.pass = rep.pass && rep.L1_hat <= rep.L1_bound && rep.L2_hat <= rep.L2_bound;
    return rep;
}

double pinsker_constant(int k, double r, double sigma_star) {
    if (k < 1 || !(r > 0.0) || !(sigma_star > 0.0)) {
        throw std::invalid_argument("pinsker_constant: need k >= 1, r > 0, sigma* > 0");
    }
    const double kk = k;
    const double e = 2.0 * kk + 1.0;
    return std::pow(e * r, 1.0 / e) *
           std::pow(sigma_star * kk / ((kk + 1.0) * std::numbers::pi), 2.0 * kk / e);
}

bool nonincreasing_within_se(const std::vector<MeanSE>& values) {
    for (std::size_t i = 1; i < values.size(); ++i) {
        const double slack = 3.0 * std::hypot(values[i - 1].se, values[i].se);
        if (values[i].mean > values[i - 1].mean + slack) {
            return false;
        }
    }
    return true;
}

EfficiencyReport efficiency_experiment(const SignalSpec& signal, const FamilyGrid& family,
                                       double sigma_star, const std::vector<int>& n_list,
                                       const MCConfig& cfg) {
    family.validate();
    cfg.validate(100);
    const int k = signal.k();
    EfficiencyReport rep;
    rep.pinsker = pinsker_constant(k, signal.r(), sigma_star);
    const double power = 2.0 * k / (2.0 * k + 1.0);
    std::uint64_t cell = 0;
    std::vector<MeanSE> a0_ratios;
    std::vector<MeanSE> sel_ratios;
    for (int n : n_list) {
        const WeightGrid grid = build_default_grid(n);
        const Alpha0 a0 = oracle_weight_alpha0(k, signal.r(), sigma_star, n, grid.epsilon);
        const SignalTable table(signal, n);
        RunDesign design;
        design.weights.push_back(a0.gamma);
        design.grid = &grid;
        design.rho = rho_schedule(n);
        design.select_estimated = true;
        std::vector<MeanSE> a0_risk;
        std::vector<MeanSE> sel_risk;
        for (std::size_t m = 0; m < family.members.size(); ++m, ++cell) {
            const auto run = run_replicates(table, family.members[m], n, design, cell_config(cfg, 1000 + cell));
            a0_risk.push_back(run.weight_risk.front());
            sel_risk.push_back(run.selected_estimated);
        }
        EfficiencyRow row;
        row.n = n;
        row.t0 = a0.t0;
        row.alpha0_in_grid = a0.in_grid;
        row.alpha0_risk = worst_of(a0_risk, row.alpha0_argmax);
        row.selected_risk = worst_of(sel_risk, row.selected_argmax);
        const double scale = std::pow(static_cast<double>(n), power) / rep.pinsker;
        row.alpha0_ratio = {row.alpha0_risk.mean * scale, row.alpha0_risk.se * scale};
        row.selected_ratio = {row.selected_risk.mean * scale, row.selected_risk.se * scale};
        a0_ratios.push_back(row.alpha0_ratio);
        sel_ratios.push_back(row.selected_ratio);
        rep.rows.push_back(row);
    }
    rep.alpha0_trend = nonincreasing_within_se(a0_ratios);
    rep.selected_trend = nonincreasing_within_se(sel_ratios);
    rep.positive = true;
    for (const auto& row : rep.rows) {
        rep.positive = rep.positive && row.alpha0_ratio.mean > 0.0 && row.selected_ratio.mean > 0.0;
    }
    return rep;
}

} // namespace ouselect
