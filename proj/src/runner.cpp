#include "ouselect/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "ouselect/basis.hpp"
#include "ouselect/noise.hpp"
#include "ouselect/risklab.hpp"
#include "ouselect/selector.hpp"
#include "ouselect/signals.hpp"
#include "ouselect/transforms.hpp"

#ifndef OUSELECT_VERSION
#define OUSELECT_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace ouselect {

namespace {

const std::vector<std::string> kCommands{"simulate",         "estimate", "ingest",
                                         "audit-oracle",     "audit-sigma",
                                         "audit-conditions", "efficiency", "moments"};

bool is_mc_command(const std::string& c) {
    return c == "audit-oracle" || c == "audit-sigma" || c == "audit-conditions" ||
           c == "efficiency" || c == "moments";
}

// Accumulates artifacts and the human-readable summary of one run.
struct Outcome {
    fs::path dir;
    std::vector<std::string> artifacts;
    std::ostringstream summary;
    bool pass = true;

    std::string file(const std::string& name) {
        artifacts.push_back(name);
        return (dir / name).string();
    }
};

MCConfig mc_config(const ExperimentConfig& c) {
    MCConfig mc;
    mc.replicates = c.replicates;
    mc.seed = c.seed;
    mc.engine = engine_from_string(c.engine);
    mc.dt = c.dt;
    mc.threads = c.threads;
    return mc;
}

double rho_value(const ExperimentConfig& c, int n) {
    return c.rho == "auto" ? rho_schedule(n) : std::stod(c.rho);
}

std::vector<SigmaMode> audited_modes(const ExperimentConfig& c) {
    if (c.sigma == "both") {
        return {SigmaMode::known, SigmaMode::estimated};
    }
    return {sigma_mode_from_string(c.sigma)};
}

std::string pass_word(bool ok) { return ok ? "PASS" : "FAIL"; }

// Shared by estimate and ingest so both produce identical JSON for identical data.
void estimate_and_write(const ExperimentConfig& c, const ObservationPath& obs, Outcome& out) {
    const int n = obs.n;
    const auto theta_hat = estimate_thetas(obs, n);
    const WeightGrid grid = build_default_grid(n);
    SelectionConfig sel;
    sel.rho = rho_value(c, n);
    sel.sigma_mode = c.sigma == "known" ? SigmaMode::known : SigmaMode::estimated;
    sel.sigma_known = c.noise.rho_star();
    const EstimationResult res = select(theta_hat, grid, sel);
    write_json(out.file("estimation.json"), to_json(res, grid));

    const CoeffVector coeffs(res.final_coeffs);
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < 1024; ++i) {
        const double x = i / 1024.0;
        rows.push_back({fmt_double(x), fmt_double(synthesize(coeffs, x))});
    }
    write_csv(out.file("reconstruction.csv"), {"x", "S_hat"}, rows);

    const auto& chosen = grid.sequences[static_cast<std::size_t>(res.selected)];
    out.summary << "n = " << n << ", grid nu = " << grid.nu() << ", mu = " << grid.mu << "\n"
                << "rho = " << res.rho << ", sigma_hat = " << res.sigma_hat
                << ", sigma used = " << res.sigma_used << "\n"
                << "selected index " << res.selected << " (" << chosen.label()
                << ", support " << chosen.support() << ")\n";
}

void cmd_simulate(const ExperimentConfig& c, Outcome& out, bool estimate) {
    const int n = c.n_list.front();
    const SignalSpec signal = catalogue_signal(c.signal);
    auto path = std::make_shared<const NoisePath>(simulate_noise(c.noise, n, c.dt, c.seed));
    const ObservationPath obs = observe(signal, path);
    if (estimate) {
        estimate_and_write(c, obs, out);
        return;
    }
    write_path_csv(out.file("path.csv"), obs);
    write_jumps_csv(out.file("jumps.csv"), *path);
    out.summary << "simulated n = " << n << ", dt = " << path->dt << ", cells = " << path->cells()
                << ", jumps = " << path->jump_times.size() << ", xi_n = " << path->xi_end() << "\n";
}

void cmd_ingest(const ExperimentConfig& c, Outcome& out) {
    const ObservationPath obs = read_observations_csv(c.input, 0);
    out.summary << "ingested " << obs.times.size() << " rows from " << c.input << "\n";
    estimate_and_write(c, obs, out);
}

void cmd_audit_oracle(const ExperimentConfig& c, Outcome& out) {
    const SignalSpec signal = catalogue_signal(c.signal);
    const FamilyGrid family = family_from_config(c);
    const auto modes = audited_modes(c);
    json records = json::array();
    std::vector<std::vector<std::string>> rows;
    out.summary << "oracle inequality audit (" << c.signal << ", R = " << c.replicates << ")\n"
                << "member      n  mode        risk(S*)      se    coef*min + B/n   status\n";
    std::uint64_t cell = 0;
    for (std::size_t m = 0; m < family.members.size(); ++m) {
        for (int n : c.n_list) {
            MCConfig mc = mc_config(c);
            mc.seed = replicate_seed(c.seed, cell++);
            const WeightGrid grid = build_default_grid(n);
            const auto recs = oracle_audit(signal, family.members[m], family.bounds, n, grid,
                                           rho_value(c, n), mc);
            for (const auto& r : recs) {
                if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) {
                    continue;
                }
                json j = to_json(r);
                j["member"] = m;
                records.push_back(j);
                out.pass = out.pass && r.pass;
                rows.push_back({std::to_string(m), std::to_string(n), to_string(r.mode),
                                fmt_double(r.lhs.mean), fmt_double(r.lhs.se),
                                fmt_double(r.oracle_min.mean), fmt_double(r.oracle_min.se),
                                fmt_double(r.coefficient), fmt_double(r.b_q), fmt_double(r.rhs),
                                r.pass ? "1" : "0"});
                out.summary << ' ' << std::setw(6) << m << ' ' << std::setw(7) << n << "  " << ' ' << std::setw(10)
                            << std::left << to_string(r.mode) << std::right << ' ' << std::setw(12)
                            << r.lhs.mean << ' ' << std::setw(10) << r.lhs.se << ' ' << std::setw(16) << r.rhs
                            << "   " << pass_word(r.pass) << "\n";
            }
        }
    }
    write_json(out.file("audit_oracle.json"), {{"records", records}});
    write_csv(out.file("audit_oracle.csv"),
              {"member", "n", "sigma_mode", "selected_risk", "selected_se", "oracle_min", "oracle_se",
               "coefficient", "B_Q", "rhs", "pass"},
              rows);
}

void cmd_audit_sigma(const ExperimentConfig& c, Outcome& out) {
    const SignalSpec signal = catalogue_signal(c.signal);
    const FamilyGrid family = family_from_config(c);
    const auto table = sigma_consistency(signal, family, c.n_list, mc_config(c));
    json rows_json = json::array();
    std::vector<std::vector<std::string>> rows;
    out.summary << "sigma estimate consistency (" << c.signal << ")\n"
                << "member      n   E|sigma-rho*|        se   kappa/sqrt(n)   status\n";
    for (const auto& r : table) {
        rows_json.push_back(to_json(r));
        out.pass = out.pass && r.pass;
        rows.push_back({std::to_string(r.member), std::to_string(r.n), fmt_double(r.abs_error.mean),
                        fmt_double(r.abs_error.se), fmt_double(r.bound), r.pass ? "1" : "0"});
        out.summary << ' ' << std::setw(6) << r.member << ' ' << std::setw(7) << r.n << ' ' << std::setw(16)
                    << r.abs_error.mean << ' ' << std::setw(10) << r.abs_error.se << ' ' << std::setw(16) << r.bound
                    << "   " << pass_word(r.pass) << "\n";
    }
    write_json(out.file("audit_sigma.json"), {{"rows", rows_json}});
    write_csv(out.file("audit_sigma.csv"), {"member", "n", "abs_error", "se", "bound", "pass"}, rows);
}

void cmd_audit_conditions(const ExperimentConfig& c, Outcome& out) {
    const FamilyGrid family = family_from_config(c);
    json reports = json::array();
    std::vector<std::vector<std::string>> rows;
    std::uint64_t cell = 0;
    out.summary << "condition checks (j_max = " << c.j_max << ")\n";
    for (std::size_t m = 0; m < family.members.size(); ++m) {
        for (int n : c.n_list) {
            MCConfig mc = mc_config(c);
            mc.seed = replicate_seed(c.seed, cell++);
            const auto rep = condition_checks(family.members[m], family.bounds, n, c.j_max, mc);
            json j = to_json(rep);
            j["member"] = m;
            reports.push_back(j);
            out.pass = out.pass && rep.pass;
            for (std::size_t k = 0; k < rep.mean_sq.size(); ++k) {
                rows.push_back({std::to_string(m), std::to_string(n), std::to_string(k + 1),
                                fmt_double(rep.mean_sq[k].mean), fmt_double(rep.mean_sq[k].se),
                                fmt_double(rep.envelope[k]), rep.within[k] ? "1" : "0"});
            }
            out.summary << "member " << m << " n = " << n << ": L1_hat = " << rep.L1_hat << " (bound "
                        << rep.L1_bound << "), L2_hat = " << rep.L2_hat << " (bound " << rep.L2_bound
                        << ") " << pass_word(rep.pass) << "\n";
        }
    }
    write_json(out.file("audit_conditions.json"), {{"reports", reports}});
    write_csv(out.file("audit_conditions.csv"),
              {"member", "n", "j", "mean_xi_sq", "se", "envelope", "within"}, rows);
}

void cmd_efficiency(const ExperimentConfig& c, Outcome& out) {
    const SignalSpec signal = catalogue_signal(c.signal);
    const FamilyGrid family = family_from_config(c);
    const double sigma_star = c.sigma_star > 0.0 ? c.sigma_star : c.noise.rho_star();
    const auto rep = efficiency_experiment(signal, family, sigma_star, c.n_list, mc_config(c));
    out.pass = rep.positive && rep.alpha0_trend && rep.selected_trend;
    write_json(out.file("efficiency.json"), to_json(rep));
    std::vector<std::vector<std::string>> ratio_rows;
    std::vector<std::vector<std::string>> loglog_rows;
    out.summary << "efficiency (k = " << signal.k() << ", r = " << signal.r()
                << ", sigma* = " << sigma_star << ", R* = " << rep.pinsker << ")\n"
                << "     n   ratio(alpha0)      se   ratio(selected)      se\n";
    for (const auto& r : rep.rows) {
        ratio_rows.push_back({std::to_string(r.n), fmt_double(r.alpha0_ratio.mean),
                              fmt_double(r.alpha0_ratio.se), fmt_double(r.selected_ratio.mean),
                              fmt_double(r.selected_ratio.se)});
        loglog_rows.push_back({fmt_double(std::log(static_cast<double>(r.n))),
                               fmt_double(std::log(r.alpha0_risk.mean)),
                               fmt_double(std::log(r.selected_risk.mean))});
        out.summary << ' ' << std::setw(6) << r.n << ' ' << std::setw(16) << r.alpha0_ratio.mean << ' ' << std::setw(8)
                    << r.alpha0_ratio.se << ' ' << std::setw(18) << r.selected_ratio.mean << ' ' << std::setw(8)
                    << r.selected_ratio.se << "\n";
    }
    out.summary << "trend alpha0 " << pass_word(rep.alpha0_trend) << ", selected "
                << pass_word(rep.selected_trend)
                << " (the asymptotic ratio 1 is not expected at these horizons)\n";
    write_csv(out.file("efficiency_ratio.csv"),
              {"n", "alpha0_ratio", "alpha0_se", "selected_ratio", "selected_se"}, ratio_rows);
    write_csv(out.file("risk_loglog.csv"), {"log_n", "log_risk_alpha0", "log_risk_selected"},
              loglog_rows);
}

void cmd_moments(const ExperimentConfig& c, Outcome& out) {
    const int n = c.n_list.front();
    const std::size_t k = c.indices.size();
    std::vector<RealFunction> fns;
    for (int idx : c.indices) {
        fns.push_back(basis_function(idx));
    }
    // raw second moments E I(f_i) I(f_j); the integrals have mean zero
    std::vector<double> sum(k * k, 0.0);
    std::vector<double> sum_sq(k * k, 0.0);
    std::vector<double> vals(k);
    for (int r = 0; r < c.replicates; ++r) {
        const NoisePath path =
            simulate_noise(c.noise, n, c.dt, replicate_seed(c.seed, static_cast<std::uint64_t>(r)));
        for (std::size_t i = 0; i < k; ++i) {
            vals[i] = ito_integral(fns[i], path);
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                const double p = vals[i] * vals[j];
                sum[i * k + j] += p;
                sum_sq[i * k + j] += p * p;
            }
        }
    }
    const double R = c.replicates;
    json cells = json::array();
    std::vector<std::vector<std::string>> rows;
    out.summary << "moments at n = " << n << " (R = " << c.replicates << ")\n"
                << "  i  j          MC        se      cov_I        z\n";
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            const double mean = sum[i * k + j] / R;
            const double var = std::max(0.0, (sum_sq[i * k + j] - R * mean * mean) / (R - 1.0));
            const double se = std::sqrt(var / R);
            const double oracle = cov_I(fns[i], fns[j], c.noise, n);
            const double z = se > 0.0 ? (mean - oracle) / se : (mean == oracle ? 0.0 : INFINITY);
            const bool ok = std::abs(z) <= 3.0;
            out.pass = out.pass && ok;
            cells.push_back({{"i", c.indices[i]}, {"j", c.indices[j]}, {"mc", mean}, {"se", se},
                             {"cov_I", oracle}, {"z", num(z)}, {"pass", ok}});
            rows.push_back({std::to_string(c.indices[i]), std::to_string(c.indices[j]), fmt_double(mean),
                            fmt_double(se), fmt_double(oracle), fmt_double(z), ok ? "1" : "0"});
            out.summary << ' ' << std::setw(3) << c.indices[i] << ' ' << std::setw(3) << c.indices[j] << ' ' << std::setw(12)
                        << mean << ' ' << std::setw(10) << se << ' ' << std::setw(11) << oracle << ' ' << std::setw(9) << z
                        << "\n";
        }
    }
    write_json(out.file("moments.json"), {{"n", n}, {"cells", cells}});
    write_csv(out.file("moments.csv"), {"i", "j", "mc", "se", "cov_I", "z", "pass"}, rows);
}

int dispatch(const ExperimentConfig& c, Outcome& out) {
    if (c.command == "simulate") {
        cmd_simulate(c, out, false);
    } else if (c.command == "estimate") {
        cmd_simulate(c, out, true);
    } else if (c.command == "ingest") {
        cmd_ingest(c, out);
    } else if (c.command == "audit-oracle") {
        cmd_audit_oracle(c, out);
    } else if (c.command == "audit-sigma") {
        cmd_audit_sigma(c, out);
    } else if (c.command == "audit-conditions") {
        cmd_audit_conditions(c, out);
    } else if (c.command == "efficiency") {
        cmd_efficiency(c, out);
    } else if (c.command == "moments") {
        cmd_moments(c, out);
    }
    return out.pass ? kExitOk : kExitAudit;
}

} // namespace

std::vector<std::string> runner_commands() { return kCommands; }

void ExperimentConfig::validate() const {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        throw std::invalid_argument("unknown command: " + command);
    }
    catalogue_signal(signal);
    noise.validate();
    bounds.validate();
    if (family != "single" && family != "box" && family != "pair") {
        throw std::invalid_argument("family must be single, box or pair");
    }
    if (n_list.empty()) {
        throw std::invalid_argument("n list is empty");
    }
    const int n_min = command == "simulate" ? 1 : 4;
    for (int n : n_list) {
        if (n < n_min) {
            throw std::invalid_argument("n must be >= " + std::to_string(n_min));
        }
    }
    if (!(dt > 0.0) || std::abs(1.0 / dt - std::round(1.0 / dt)) > 1e-9 / dt) {
        throw std::invalid_argument("dt must be positive with 1/dt an integer");
    }
    if (is_mc_command(command) && replicates < 100) {
        throw std::invalid_argument("replicates must be >= 100");
    }
    if (rho != "auto") {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(rho, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != rho.size() || !(v > 0.0 && v < 1.0 / 3.0)) {
            throw std::invalid_argument("rho must be 'auto' or a number in (0, 1/3)");
        }
    }
    if (sigma != "known" && sigma != "estimated" && sigma != "both") {
        throw std::invalid_argument("sigma must be known, estimated or both");
    }
    engine_from_string(engine);
    if (threads < 1) {
        throw std::invalid_argument("threads must be >= 1");
    }
    if (out.empty()) {
        throw std::invalid_argument("output directory required");
    }
    if (command == "ingest" && input.empty()) {
        throw std::invalid_argument("ingest needs an input file");
    }
    if (command == "audit-conditions") {
        for (int n : n_list) {
            if (j_max < 1 || j_max > n) {
                throw std::invalid_argument("j_max must lie in [1, n]");
            }
        }
    }
    if (command == "moments") {
        if (indices.empty()) {
            throw std::invalid_argument("moments needs basis indices");
        }
        for (int i : indices) {
            BasisIndex check(i);
        }
    }
    if (!(sigma_star >= 0.0)) {
        throw std::invalid_argument("sigma_star must be >= 0");
    }
    if (family != "single" || command == "audit-sigma" || command == "efficiency") {
        family_from_config(*this).validate();
    }
}

FamilyGrid family_from_config(const ExperimentConfig& c) {
    if (c.family == "box") {
        return family_box(c.bounds, c.noise.rho_star(), c.noise.jump_law);
    }
    FamilyGrid fam;
    fam.bounds = c.bounds;
    if (c.family == "pair") {
        const double rs = c.noise.rho_star();
        NoiseParams brown;
        brown.rho1 = std::sqrt(rs);
        NoiseParams ou;
        ou.a = -c.bounds.a_max;
        ou.lambda = c.bounds.lambda_max;
        ou.rho1 = std::sqrt(0.5 * rs);
        ou.rho2 = ou.lambda > 0.0 ? std::sqrt(0.5 * rs / ou.lambda) : 0.0;
        ou.jump_law = c.noise.jump_law;
        fam.members = {brown, ou};
    } else {
        fam.members = {c.noise};
    }
    return fam;
}

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) {
        throw std::invalid_argument("config must be a JSON object");
    }
    ExperimentConfig c;
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "command") {
                c.command = v.get<std::string>();
            } else if (key == "signal") {
                c.signal = v.get<std::string>();
            } else if (key == "noise") {
                c.noise = noise_params_from_json(v);
            } else if (key == "bounds") {
                c.bounds = family_bounds_from_json(v);
            } else if (key == "family") {
                c.family = v.get<std::string>();
            } else if (key == "n") {
                c.n_list = v.is_array() ? v.get<std::vector<int>>() : std::vector<int>{v.get<int>()};
            } else if (key == "dt") {
                c.dt = v.get<double>();
            } else if (key == "replicates") {
                c.replicates = v.get<int>();
            } else if (key == "seed") {
                c.seed = v.get<std::uint64_t>();
            } else if (key == "rho") {
                c.rho = v.is_string() ? v.get<std::string>() : fmt_double(v.get<double>());
            } else if (key == "sigma") {
                c.sigma = v.get<std::string>();
            } else if (key == "engine") {
                c.engine = v.get<std::string>();
            } else if (key == "threads") {
                c.threads = v.get<int>();
            } else if (key == "out") {
                c.out = v.get<std::string>();
            } else if (key == "input") {
                c.input = v.get<std::string>();
            } else if (key == "j_max") {
                c.j_max = v.get<int>();
            } else if (key == "indices") {
                c.indices = v.get<std::vector<int>>();
            } else if (key == "sigma_star") {
                c.sigma_star = v.get<double>();
            } else {
                throw std::invalid_argument("unknown config key '" + key + "'");
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config type error: ") + e.what());
    }
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json rho = c.rho == "auto" ? json("auto") : json(std::stod(c.rho));
    return {{"command", c.command},   {"signal", c.signal},       {"noise", to_json(c.noise)},
            {"bounds", to_json(c.bounds)}, {"family", c.family},  {"n", c.n_list},
            {"dt", c.dt},             {"replicates", c.replicates}, {"seed", c.seed},
            {"rho", rho},             {"sigma", c.sigma},         {"engine", c.engine},
            {"threads", c.threads},   {"out", c.out},             {"input", c.input},
            {"j_max", c.j_max},       {"indices", c.indices},     {"sigma_star", c.sigma_star}};
}

ExperimentConfig load_config(const std::string& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::invalid_argument("cannot read config " + file);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw std::invalid_argument("config parse error: " + std::string(e.what()));
    }
    return config_from_json(j);
}

int run(const ExperimentConfig& config, std::ostream& log) {
    Outcome out;
    int code = kExitOk;
    try {
        config.validate();
        out.dir = config.out;
        fs::create_directories(out.dir);
        code = dispatch(config, out);
    } catch (const NumericalError& e) {
        log << "numerical failure: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
        return kExitNumerical;
    } catch (const std::domain_error& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const fs::filesystem_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        log << "input error: " << e.what() << "\n";
        return kExitConfig;
    }

    out.summary << "status: " << (code == kExitOk ? "ok" : "audit failure") << "\n";
    write_text(out.file("summary.txt"), out.summary.str());
    json artifacts = json::array();
    for (const auto& name : out.artifacts) {
        artifacts.push_back({{"file", name}, {"sha256", sha256_file((out.dir / name).string())}});
    }
    const json manifest = {{"tool", "ouselect"},
                           {"version", OUSELECT_VERSION},
                           {"command", config.command},
                           {"config", config_to_json(config)},
                           {"artifacts", artifacts},
                           {"exit_code", code}};
    write_json((out.dir / "manifest.json").string(), manifest);
    log << out.summary.str();
    return code;
}

int replay(const std::string& manifest_file, const std::string& out_dir, std::ostream& log) {
    json manifest;
    try {
        std::ifstream in(manifest_file);
        if (!in) {
            log << "config error: cannot read " << manifest_file << "\n";
            return kExitConfig;
        }
        manifest = json::parse(in);
    } catch (const json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    ExperimentConfig c;
    try {
        c = config_from_json(manifest.at("config"));
    } catch (const std::exception& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    c.out = out_dir;
    const int code = run(c, log);
    if (code == kExitConfig || code == kExitNumerical) {
        return code;
    }
    bool same = code == manifest.value("exit_code", -1);
    for (const auto& a : manifest.at("artifacts")) {
        const std::string name = a.at("file").get<std::string>();
        const fs::path p = fs::path(out_dir) / name;
        const bool match = fs::exists(p) && sha256_file(p.string()) == a.at("sha256").get<std::string>();
        log << "replay " << name << ": " << (match ? "identical" : "DIFFERENT") << "\n";
        same = same && match;
    }
    return same ? kExitOk : kExitAudit;
}

} // namespace ouselect
