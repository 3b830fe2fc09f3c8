#include "ouselect/report_io.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace ouselect {

json num(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

json to_json(const NoiseParams& p) {
    return {{"a", p.a}, {"lambda", p.lambda}, {"rho1", p.rho1}, {"rho2", p.rho2},
            {"jump_law", to_string(p.jump_law)}};
}

NoiseParams noise_params_from_json(const json& j) {
    NoiseParams p;
    for (const auto& [key, value] : j.items()) {
        if (key == "a") {
            p.a = value.get<double>();
        } else if (key == "lambda") {
            p.lambda = value.get<double>();
        } else if (key == "rho1") {
            p.rho1 = value.get<double>();
        } else if (key == "rho2") {
            p.rho2 = value.get<double>();
        } else if (key == "jump_law") {
            p.jump_law = jump_law_from_string(value.get<std::string>());
        } else {
            throw std::invalid_argument("noise: unknown key '" + key + "'");
        }
    }
    p.validate();
    return p;
}

json to_json(const FamilyBounds& b) {
    return {{"a_max", b.a_max}, {"lambda_max", b.lambda_max}, {"rho_star_min", b.rho_star_min},
            {"rho_star_max", b.rho_star_max}};
}

FamilyBounds family_bounds_from_json(const json& j) {
    FamilyBounds b;
    for (const auto& [key, value] : j.items()) {
        if (key == "a_max") {
            b.a_max = value.get<double>();
        } else if (key == "lambda_max") {
            b.lambda_max = value.get<double>();
        } else if (key == "rho_star_min") {
            b.rho_star_min = value.get<double>();
        } else if (key == "rho_star_max") {
            b.rho_star_max = value.get<double>();
        } else {
            throw std::invalid_argument("bounds: unknown key '" + key + "'");
        }
    }
    b.validate();
    return b;
}

json to_json(const MeanSE& m) { return {{"mean", num(m.mean)}, {"se", num(m.se)}}; }

json to_json(const MomentConstants& mc) {
    return {{"rho_star", mc.rho_star}, {"lambda1", mc.lambda1}, {"lambda2", mc.lambda2},
            {"rho3", mc.rho3},         {"D1", mc.D1},           {"D2", mc.D2},
            {"Mstar", mc.Mstar},       {"L1star", mc.L1star},   {"sigma_Q", mc.sigma_Q}};
}

json to_json(const EstimationResult& res, const WeightGrid& grid) {
    const auto& chosen = grid.sequences.at(static_cast<std::size_t>(res.selected));
    const int keep = std::min<int>(static_cast<int>(res.theta_hat.size()),
                                   std::max(chosen.support(),
                                            static_cast<int>(std::floor(2.0 * grid.omega_max))));
    json theta = json::array();
    for (int j = 0; j < keep; ++j) {
        theta.push_back(num(res.theta_hat[static_cast<std::size_t>(j)]));
    }
    json costs = json::array();
    for (double c : res.costs) {
        costs.push_back(num(c));
    }
    json coeffs = json::array();
    for (double c : res.final_coeffs) {
        coeffs.push_back(num(c));
    }
    return {{"n", res.n},
            {"sigma_hat", num(res.sigma_hat)},
            {"sigma_used", num(res.sigma_used)},
            {"rho", res.rho},
            {"grid", {{"k_star", grid.k_star}, {"epsilon", grid.epsilon}, {"m", grid.m},
                      {"nu", grid.nu()}, {"mu", grid.mu}, {"omega_max", grid.omega_max}}},
            {"selected", {{"index", res.selected}, {"beta", chosen.beta}, {"t", chosen.t},
                          {"omega", chosen.omega}, {"support", chosen.support()}}},
            {"theta_hat", theta},
            {"costs", costs},
            {"final_coeffs", coeffs}};
}

json to_json(const AuditRecord& r) {
    return {{"n", r.n},
            {"rho", r.rho},
            {"sigma_mode", to_string(r.mode)},
            {"selected_risk", to_json(r.lhs)},
            {"oracle_min", to_json(r.oracle_min)},
            {"oracle_index", r.oracle_index},
            {"coefficient", r.coefficient},
            {"psi_Q", num(r.psi)},
            {"B_Q", num(r.b_q)},
            {"B1_star", num(r.b1_star)},
            {"rhs", num(r.rhs)},
            {"abs_sigma_error", to_json(r.abs_sigma_error)},
            {"kappa_star", num(r.kappa)},
            {"sigma_bound", num(r.sigma_bound)},
            {"pass", r.pass},
            {"oracle_not_beaten", r.oracle_not_beaten}};
}

json to_json(const SigmaRow& row) {
    return {{"n", row.n},         {"member", row.member}, {"abs_error", to_json(row.abs_error)},
            {"kappa_star", row.kappa}, {"bound", row.bound},   {"pass", row.pass}};
}

json to_json(const ConditionReport& rep) {
    json coords = json::array();
    for (std::size_t j = 0; j < rep.mean_sq.size(); ++j) {
        coords.push_back({{"j", j + 1},
                          {"mean_xi_sq", to_json(rep.mean_sq[j])},
                          {"envelope", rep.envelope[j]},
                          {"within", static_cast<bool>(rep.within[j])}});
    }
    return {{"n", rep.n},
            {"j_max", rep.j_max},
            {"coordinates", coords},
            {"L1_hat", rep.L1_hat},
            {"L1_bound", rep.L1_bound},
            {"L2_hat", rep.L2_hat},
            {"L2_bound", rep.L2_bound},
            {"pass", rep.pass}};
}

json to_json(const EfficiencyReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows) {
        rows.push_back({{"n", r.n},
                        {"t0", r.t0},
                        {"alpha0_in_grid", r.alpha0_in_grid},
                        {"alpha0_risk", to_json(r.alpha0_risk)},
                        {"selected_risk", to_json(r.selected_risk)},
                        {"alpha0_ratio", to_json(r.alpha0_ratio)},
                        {"selected_ratio", to_json(r.selected_ratio)},
                        {"alpha0_argmax_member", r.alpha0_argmax},
                        {"selected_argmax_member", r.selected_argmax}});
    }
    return {{"pinsker_constant", rep.pinsker},
            {"rows", rows},
            {"alpha0_trend_nonincreasing", rep.alpha0_trend},
            {"selected_trend_nonincreasing", rep.selected_trend},
            {"ratios_positive", rep.positive},
            {"note", "the asymptotic ratio 1 is not expected at these horizons"}};
}

std::string fmt_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + file);
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
        out << (c ? "," : "") << header[c];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << row[c];
        }
        out << '\n';
    }
}

void write_json(const std::string& file, const json& j) { write_text(file, j.dump(2) + "\n"); }

void write_text(const std::string& file, const std::string& text) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + file);
    }
    out << text;
}

std::string sha256_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + file);
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed for " + file);
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

} // namespace ouselect
