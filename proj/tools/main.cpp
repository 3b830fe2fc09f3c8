#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ouselect/runner.hpp"
#include "ouselect/signals.hpp"

namespace {

struct Overrides {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
    int replicates = 0;
    std::vector<int> n;
    std::string rho;
    std::string sigma;
    std::string family;
    std::string engine;
    int threads = 0;
    std::string input;
    std::string signal;
    double dt = 0.0;
    int j_max = 0;
};

void add_flags(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--replicates", o.replicates, "Monte Carlo replicates");
    sub->add_option("--n", o.n, "horizon(s), comma separated")->delimiter(',');
    sub->add_option("--rho", o.rho, "penalty: a number in (0,1/3) or auto");
    sub->add_option("--sigma", o.sigma, "known | estimated | both");
    sub->add_option("--family", o.family, "single | box | pair");
    sub->add_option("--engine", o.engine, "spectral | path");
    sub->add_option("--threads", o.threads, "worker threads");
    sub->add_option("--input", o.input, "observation CSV (ingest)");
    sub->add_option("--signal", o.signal, "catalogue signal name");
    sub->add_option("--dt", o.dt, "simulation step (1/dt integer)");
    sub->add_option("--j-max", o.j_max, "coordinates checked by audit-conditions");
}

// Copies a flag into the config only when it was given on the command line.
template <class T>
void apply(const CLI::App* sub, const char* flag, const T& v, T& target) {
    if (sub->count(flag) > 0) {
        target = v;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive Pinsker-weight selection under Levy-driven Ornstein-Uhlenbeck noise"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(OUSELECT_TOOL_VERSION));

    const std::map<std::string, std::string> about{
        {"simulate", "simulate a noise path and observations"},
        {"estimate", "simulate, then select the weight sequence"},
        {"ingest", "estimate from an observation CSV"},
        {"audit-oracle", "Monte Carlo check of the oracle inequality"},
        {"audit-sigma", "Monte Carlo check of sigma_hat consistency"},
        {"audit-conditions", "empirical check of the noise moment conditions"},
        {"efficiency", "risk ratios to the Pinsker constant"},
        {"moments", "path moments against the analytic covariance"},
    };
    Overrides o;
    std::vector<std::pair<std::string, CLI::App*>> subs;
    for (const auto& name : ouselect::runner_commands()) {
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        add_flags(sub, o);
        subs.emplace_back(name, sub);
    }
    std::string manifest;
    std::string replay_out = "replay";
    CLI::App* replay = app.add_subcommand("replay", "re-run a manifest and compare checksums");
    replay->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
    replay->add_option("--out", replay_out, "output directory");
    app.add_subcommand("signals", "list catalogue signals");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ouselect::kExitConfig;
    }

    if (app.got_subcommand("signals")) {
        for (const auto& name : ouselect::catalogue_names()) {
            std::cout << name << "\n";
        }
        return 0;
    }
    if (replay->parsed()) {
        return ouselect::replay(manifest, replay_out, std::cerr);
    }

    ouselect::ExperimentConfig cfg;
    try {
        if (!o.config.empty()) {
            cfg = ouselect::load_config(o.config);
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return ouselect::kExitConfig;
    }
    const CLI::App* sub = nullptr;
    for (const auto& [name, s] : subs) {
        if (s->parsed()) {
            cfg.command = name;
            sub = s;
        }
    }
    apply(sub, "--seed", o.seed, cfg.seed);
    apply(sub, "--out", o.out, cfg.out);
    apply(sub, "--replicates", o.replicates, cfg.replicates);
    apply(sub, "--n", o.n, cfg.n_list);
    apply(sub, "--rho", o.rho, cfg.rho);
    apply(sub, "--sigma", o.sigma, cfg.sigma);
    apply(sub, "--family", o.family, cfg.family);
    apply(sub, "--engine", o.engine, cfg.engine);
    apply(sub, "--threads", o.threads, cfg.threads);
    apply(sub, "--input", o.input, cfg.input);
    apply(sub, "--signal", o.signal, cfg.signal);
    apply(sub, "--dt", o.dt, cfg.dt);
    apply(sub, "--j-max", o.j_max, cfg.j_max);
    return ouselect::run(cfg, std::cout);
}
