#include "ouselect/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ouselect {

namespace {

void check_horizon(double t, const char* who) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument(std::string(who) + ": t must be finite and >= 0");
    }
}

std::vector<double> sample_on(const RealFunction& f, int cells, double h, double shift = 0.0) {
    std::vector<double> out(static_cast<std::size_t>(cells) + 1);
    for (int i = 0; i <= cells; ++i) {
        out[static_cast<std::size_t>(i)] = f(shift + i * h);
    }
    return out;
}

std::vector<double> epsilon_from_samples(const std::vector<double>& fs, double a, double h) {
    if (a == 0.0) {
        return std::vector<double>(fs.size(), 0.0);
    }
    std::vector<double> weighted(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        weighted[i] = fs[i] * (1.0 + std::exp(2.0 * a * h * static_cast<double>(i)));
    }
    auto conv = quad::exp_convolution(weighted, a, h);
    for (double& v : conv) {
        v *= a;
    }
    return conv;
}

std::vector<double> tau_from_samples(const std::vector<double>& fs, const std::vector<double>& gs,
                                     double a, double h) {
    const auto ef = epsilon_from_samples(fs, a, h);
    const auto eg = epsilon_from_samples(gs, a, h);
    std::vector<double> integrand(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
        integrand[i] = fs[i] * gs[i] + 0.5 * (fs[i] * eg[i] + ef[i] * gs[i]);
    }
    return quad::cumulative(integrand, h);
}

// Column z_j = j h of D on the (x, z) grid: D(i h, j h) for i = 0..N-j.
// fs, gs hold f, g at the nodes 0..N; expah[i] = e^{a i h}.
std::vector<double> d_column(const std::vector<double>& fs, const std::vector<double>& gs,
                             const std::vector<double>& expah, double a, double h, int j) {
    const int N = static_cast<int>(fs.size()) - 1;
    const int len = N - j + 1;
    std::vector<double> ef(static_cast<std::size_t>(len));
    std::vector<double> eg(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        ef[static_cast<std::size_t>(i)] = expah[static_cast<std::size_t>(i)] * fs[static_cast<std::size_t>(i + j)];
        eg[static_cast<std::size_t>(i)] = expah[static_cast<std::size_t>(i)] * gs[static_cast<std::size_t>(i + j)];
    }
    const auto af = quad::cumulative(ef, h);
    const auto ag = quad::cumulative(eg, h);
    const double fz = fs[static_cast<std::size_t>(j)];
    const double gz = gs[static_cast<std::size_t>(j)];
    std::vector<double> k(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
        const auto u = static_cast<std::size_t>(i);
        const double lf = a * expah[u] * (fz + a * af[u]);
        const double lg = a * expah[u] * (gz + a * ag[u]);
        k[u] = gs[u + static_cast<std::size_t>(j)] * lf + fs[u + static_cast<std::size_t>(j)] * lg;
    }
    auto d = quad::cumulative(k, h);
    for (double& v : d) {
        v += fz * gz;
    }
    return d;
}

} // namespace

std::vector<double> epsilon_profile(const RealFunction& f, double a, double t, const TransformConfig& cfg) {
    check_horizon(t, "epsilon_f");
    if (t == 0.0) {
        return {0.0};
    }
    const quad::UniformGrid grid(t, cfg.cells);
    return epsilon_from_samples(grid.sample(f), a, grid.step());
}

double epsilon_f(const RealFunction& f, double a, double t, const TransformConfig& cfg) {
    return epsilon_profile(f, a, t, cfg).back();
}

std::vector<double> tau_profile(const RealFunction& f, const RealFunction& g, double a, double t,
                                const TransformConfig& cfg) {
    check_horizon(t, "tau_fg");
    if (t == 0.0) {
        return {0.0};
    }
    const quad::UniformGrid grid(t, cfg.cells);
    return tau_from_samples(grid.sample(f), grid.sample(g), a, grid.step());
}

double tau_fg(const RealFunction& f, const RealFunction& g, double a, double t, const TransformConfig& cfg) {
    return tau_profile(f, g, a, t, cfg).back();
}

double cov_I(const RealFunction& f, const RealFunction& g, const NoiseParams& params, double t,
             const TransformConfig& cfg) {
    return params.rho_star() * tau_fg(f, g, params.a, t, cfg);
}

double L_f(const RealFunction& f, double a, double x, double z, const TransformConfig& cfg) {
    check_horizon(x, "L_f");
    if (a == 0.0) {
        return 0.0;
    }
    double inner = 0.0;
    if (x > 0.0) {
        const quad::UniformGrid grid(x, cfg.cells);
        std::vector<double> s = sample_on(f, cfg.cells, grid.step(), z);
        for (int i = 0; i <= cfg.cells; ++i) {
            s[static_cast<std::size_t>(i)] *= std::exp(a * grid.node(i));
        }
        inner = quad::integrate(s, grid.step());
    }
    return a * std::exp(a * x) * (f(z) + a * inner);
}

double D_fg(const RealFunction& f, const RealFunction& g, double a, double x, double z,
            const TransformConfig& cfg) {
    check_horizon(x, "D_fg");
    if (a == 0.0 || x == 0.0) {
        return f(z) * g(z);
    }
    const int N = cfg.cells;
    const double h = x / N;
    const auto fs = sample_on(f, N, h, z);
    const auto gs = sample_on(g, N, h, z);
    std::vector<double> expah(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        expah[static_cast<std::size_t>(i)] = std::exp(a * h * i);
    }
    return d_column(fs, gs, expah, a, h, 0).back();
}

std::vector<double> H_profile(const RealFunction& f, const RealFunction& g, const NoiseParams& params,
                              double t, const TransformConfig& cfg) {
    check_horizon(t, "H_fg");
    const int N = cfg.cells_2d;
    if (t == 0.0 || params.lambda == 0.0) {
        return std::vector<double>(t == 0.0 ? 1 : static_cast<std::size_t>(N) + 1, 0.0);
    }
    const double a = params.a;
    const double h = t / N;
    const auto fs = sample_on(f, N, h);
    const auto gs = sample_on(g, N, h);
    const auto tau = tau_from_samples(fs, gs, a, h);

    const double brown = params.lambda * params.rho1 * params.rho1;
    const double jump = params.lambda * params.rho2 * params.lambda * params.rho2;
    std::vector<double> out(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) {
        out[static_cast<std::size_t>(k)] = brown * tau[static_cast<std::size_t>(k)];
    }
    if (jump == 0.0) {
        return out;
    }
    std::vector<double> expah(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        expah[static_cast<std::size_t>(i)] = std::exp(a * h * i);
    }
    // anti-diagonals: diag[k][j] = D((k - j) h, j h); every point lands on a node
    std::vector<std::vector<double>> diag(static_cast<std::size_t>(N) + 1);
    for (int k = 0; k <= N; ++k) {
        diag[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(k) + 1);
    }
    for (int j = 0; j <= N; ++j) {
        const auto col = d_column(fs, gs, expah, a, h, j);
        for (std::size_t i = 0; i < col.size(); ++i) {
            diag[i + static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = col[i];
        }
    }
    for (int k = 1; k <= N; ++k) {
        out[static_cast<std::size_t>(k)] += jump * quad::integrate(diag[static_cast<std::size_t>(k)], h);
    }
    return out;
}

double H_fg(const RealFunction& f, const RealFunction& g, const NoiseParams& params, double t,
            const TransformConfig& cfg) {
    check_horizon(t, "H_fg");
    if (t == 0.0 || params.lambda == 0.0) {
        return 0.0;
    }
    const int N = cfg.cells_2d;
    const double a = params.a;
    const double h = t / N;
    const auto fs = sample_on(f, N, h);
    const auto gs = sample_on(g, N, h);
    const double brown = params.lambda * params.rho1 * params.rho1;
    const double jump = params.lambda * params.rho2 * params.lambda * params.rho2;
    double out = brown * tau_from_samples(fs, gs, a, h).back();
    if (jump != 0.0) {
        std::vector<double> expah(static_cast<std::size_t>(N) + 1);
        for (int i = 0; i <= N; ++i) {
            expah[static_cast<std::size_t>(i)] = std::exp(a * h * i);
        }
        std::vector<double> last(static_cast<std::size_t>(N) + 1);
        for (int j = 0; j <= N; ++j) {
            last[static_cast<std::size_t>(j)] = d_column(fs, gs, expah, a, h, j).back();
        }
        out += jump * quad::integrate(last, h);
    }
    return out;
}

double H_integral(const RealFunction& f, const RealFunction& g, const NoiseParams& params, double t,
                  const TransformConfig& cfg) {
    const auto prof = H_profile(f, g, params, t, cfg);
    if (prof.size() < 2) {
        return 0.0;
    }
    return quad::integrate(prof, t / cfg.cells_2d);
}

double cond_cov_at_jump(const RealFunction& f, const RealFunction& g, const NoiseParams& params,
                        const std::vector<double>& arrivals, int k, const TransformConfig& cfg) {
    if (k < 1 || static_cast<std::size_t>(k) > arrivals.size()) {
        throw std::out_of_range("cond_cov_at_jump: k exceeds the available arrivals");
    }
    const double tk = arrivals[static_cast<std::size_t>(k - 1)];
    double out = params.rho1 * params.rho1 * tau_fg(f, g, params.a, tk, cfg);
    if (params.rho2 != 0.0) {
        double sum = 0.0;
        for (int l = 1; l < k; ++l) {
            const double tl = arrivals[static_cast<std::size_t>(l - 1)];
            sum += D_fg(f, g, params.a, tk - tl, tl, cfg);
        }
        out += params.rho2 * params.rho2 * sum;
    }
    return out;
}

double correlation_measure(const RealFunction& f, const RealFunction& g, double n, int lattice) {
    if (!(n > 0.0) || lattice < 1) {
        throw std::invalid_argument("correlation_measure: need n > 0 and a positive lattice");
    }
    const double h = n / lattice;
    const auto fs = sample_on(f, lattice, h);
    const auto gs = sample_on(g, lattice, h);
    auto one_way = [&](const std::vector<double>& p, const std::vector<double>& q) {
        double best = 0.0;
        std::vector<double> prod;
        for (int j = 0; j <= lattice; ++j) {
            const int len = lattice - j + 1;
            prod.resize(static_cast<std::size_t>(len));
            for (int i = 0; i < len; ++i) {
                prod[static_cast<std::size_t>(i)] =
                    p[static_cast<std::size_t>(i + j)] * q[static_cast<std::size_t>(i)];
            }
            for (double c : quad::cumulative(prod, h)) {
                best = std::max(best, std::abs(c));
            }
        }
        return best;
    };
    return std::max(one_way(fs, gs), one_way(gs, fs));
}

double sup_norm(const RealFunction& f, double n, int points) {
    if (!(n > 0.0)) {
        throw std::invalid_argument("sup_norm: n must be positive");
    }
    if (points <= 0) {
        points = std::max(4096, 1024 * static_cast<int>(std::ceil(n)));
    }
    double best = 0.0;
    for (int i = 0; i <= points; ++i) {
        best = std::max(best, std::abs(f(n * i / points)));
    }
    return best;
}

MomentConstants moment_constants(const NoiseParams& params, const FamilyBounds& bounds) {
    params.validate();
    bounds.validate();
    const double r1 = params.rho1 * params.rho1;
    const double r2 = params.rho2 * params.rho2;
    const double lam = params.lambda;
    MomentConstants c;
    c.rho_star = r1 + lam * r2;
    c.lambda1 = lam * r1 + lam * lam * r2;
    c.lambda2 = r1 * c.rho_star + lam * r2;
    c.rho3 = lam * r2 * r2 * jump_fourth_moment(params.jump_law);
    c.D1 = 4.0 * lam * r1 + 7.0 * lam * lam * r2;
    c.D2 = 4.0 * r1 * c.rho_star + r2 * c.D1 + 23.0 * c.lambda2;
    c.Mstar = 4.0 * r1 + r2 * c.D1 + 80.0 * c.lambda2 + 12.0 * c.D2 + 21.0 * c.rho3;
    c.L1star = 2.0 * (1.0 + bounds.a_max * (bounds.a_max + 1.0)) * bounds.rho_star_max;
    c.sigma_Q = 3.0 * c.rho_star;
    return c;
}

double second_order_bound(const RealFunction& f, const RealFunction& g, const NoiseParams& params,
                          double n, const TransformConfig& cfg) {
    const double rs = params.rho_star();
    FamilyBounds loose;
    loose.rho_star_min = rs > 0.0 ? rs : 1.0;
    loose.rho_star_max = loose.rho_star_min;
    const double mstar = moment_constants(params, loose).Mstar;
    if (mstar == 0.0) {
        return 0.0;
    }
    const double fn = sup_norm(f, n);
    const double gn = sup_norm(g, n);
    const double varpi = correlation_measure(f, g, n, cfg.lattice);
    return n * mstar * (varpi + fn * gn) * fn * gn;
}

} // namespace ouselect
