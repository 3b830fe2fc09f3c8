#include "ouselect/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ouselect/signals.hpp"

namespace ouselect {

namespace {

// (e^{x} - 1) / x with the x -> 0 limit
double expm1_ratio(double x) { return x == 0.0 ? 1.0 : std::expm1(x) / x; }

int cells_per_unit(double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("simulate_noise: dt must be positive");
    }
    const double inv = 1.0 / dt;
    const double rounded = std::round(inv);
    if (rounded < 1.0 || std::abs(inv - rounded) > 1e-9 * rounded) {
        throw std::invalid_argument("simulate_noise: 1/dt must be an integer");
    }
    return static_cast<int>(rounded);
}

double draw_mark(JumpLaw law, Rng& rng) {
    if (law == JumpLaw::rademacher) {
        std::bernoulli_distribution coin(0.5);
        return coin(rng) ? 1.0 : -1.0;
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    return normal(rng);
}

// One exact OU step of length h driven by the Brownian part only.
struct Transition {
    double decay = 1.0;   // e^{a h}
    double c1 = 0.0;      // X = c1 Z1 + c2 Z2, dw = sqrt(h) Z1
    double c2 = 0.0;
    double sqrt_h = 0.0;

    Transition(double a, double h) {
        decay = std::exp(a * h);
        sqrt_h = std::sqrt(h);
        const double cov = h * expm1_ratio(a * h);           // int_0^h e^{a(h-s)} ds
        const double var = h * expm1_ratio(2.0 * a * h);     // int_0^h e^{2a(h-s)} ds
        c1 = cov / sqrt_h;
        c2 = std::sqrt(std::max(0.0, var - c1 * c1));
    }
};

NoisePath simulate_with_jumps(const NoiseParams& params, int n, double dt,
                              std::vector<double> times, std::vector<double> marks, Rng& rng) {
    const int per_unit = cells_per_unit(dt);
    const int cells = n * per_unit;
    const double h = 1.0 / per_unit;

    NoisePath path;
    path.n = n;
    path.dt = h;
    path.params = params;
    path.jump_times = std::move(times);
    path.jump_marks = std::move(marks);
    path.grid.resize(static_cast<std::size_t>(cells) + 1);
    path.xi.assign(static_cast<std::size_t>(cells) + 1, 0.0);
    path.brownian_increments.assign(static_cast<std::size_t>(cells), 0.0);
    for (int i = 0; i <= cells; ++i) {
        path.grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / per_unit;
    }

    const std::size_t reserve = static_cast<std::size_t>(cells) + path.jump_times.size() + 1;
    path.event_times.reserve(reserve);
    path.event_dw.reserve(reserve);
    path.event_drift.reserve(reserve);
    path.event_jump.reserve(reserve);

    const Transition full(params.a, h);
    std::normal_distribution<double> normal(0.0, 1.0);

    double xi = 0.0;
    std::size_t next_jump = 0;
    path.event_times.push_back(0.0);
    path.event_jump.push_back(-1);

    for (int i = 0; i < cells; ++i) {
        const double cell_end = path.grid[static_cast<std::size_t>(i) + 1];
        double cell_dw = 0.0;
        bool jumped_inside = false;
        while (true) {
            const double start = path.event_times.back();
            double stop = cell_end;
            bool at_jump = false;
            if (next_jump < path.jump_times.size() && path.jump_times[next_jump] <= cell_end) {
                stop = path.jump_times[next_jump];
                at_jump = true;
            }
            const bool whole = (!jumped_inside && !at_jump);
            const Transition split = whole ? full : Transition(params.a, stop - start);
            const double z1 = normal(rng);
            const double z2 = normal(rng);
            const double dw = split.sqrt_h * z1;
            const double left = split.decay * xi + params.rho1 * (split.c1 * z1 + split.c2 * z2);
            path.event_dw.push_back(dw);
            path.event_drift.push_back(left - xi - params.rho1 * dw);
            cell_dw += dw;
            xi = left;
            if (at_jump) {
                xi += params.rho2 * path.jump_marks[next_jump];
            }
            // a jump landing on the cell end is merged with the grid point
            const bool closes_cell = (stop == cell_end);
            path.event_times.push_back(closes_cell ? cell_end : stop);
            path.event_jump.push_back(at_jump ? static_cast<int>(next_jump) : -1);
            if (at_jump) {
                ++next_jump;
                jumped_inside = true;
            }
            if (closes_cell) {
                break;
            }
        }
        path.brownian_increments[static_cast<std::size_t>(i)] = cell_dw;
        path.xi[static_cast<std::size_t>(i) + 1] = xi;
    }
    return path;
}

} // namespace

double jump_fourth_moment(JumpLaw law) noexcept { return law == JumpLaw::rademacher ? 1.0 : 3.0; }

std::string to_string(JumpLaw law) { return law == JumpLaw::rademacher ? "rademacher" : "gaussian"; }

JumpLaw jump_law_from_string(const std::string& name) {
    if (name == "rademacher") {
        return JumpLaw::rademacher;
    }
    if (name == "gaussian") {
        return JumpLaw::gaussian;
    }
    throw std::invalid_argument("unknown jump law: " + name);
}

void NoiseParams::validate() const {
    if (!std::isfinite(a) || !std::isfinite(lambda) || !std::isfinite(rho1) || !std::isfinite(rho2)) {
        throw std::invalid_argument("NoiseParams: non-finite field");
    }
    if (a > 0.0) {
        throw std::invalid_argument("NoiseParams: a must be <= 0");
    }
    if (lambda < 0.0) {
        throw std::invalid_argument("NoiseParams: lambda must be >= 0");
    }
}

void FamilyBounds::validate() const {
    if (!(a_max >= 0.0) || !(lambda_max >= 0.0) || !(rho_star_min > 0.0) ||
        !(rho_star_max >= rho_star_min)) {
        throw std::invalid_argument("FamilyBounds: need a_max, lambda_max >= 0 and 0 < rho*_min <= rho*_max");
    }
}

bool FamilyBounds::contains(const NoiseParams& p, double slack) const {
    const double rs = p.rho_star();
    return p.a <= slack && p.a >= -a_max - slack && p.lambda >= -slack &&
           p.lambda <= lambda_max + slack && rs >= rho_star_min - slack && rs <= rho_star_max + slack;
}

int NoisePath::jump_count(double t) const {
    return static_cast<int>(std::upper_bound(jump_times.begin(), jump_times.end(), t) - jump_times.begin());
}

std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (replicate + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void draw_jumps(const NoiseParams& params, double horizon, Rng& rng, std::vector<double>& times,
                std::vector<double>& marks) {
    times.clear();
    marks.clear();
    if (params.lambda <= 0.0) {
        return;
    }
    std::poisson_distribution<long> count_dist(params.lambda * horizon);
    const long count = count_dist(rng);
    std::uniform_real_distribution<double> unif(0.0, horizon);
    times.reserve(static_cast<std::size_t>(count));
    for (long k = 0; k < count; ++k) {
        times.push_back(unif(rng));
    }
    std::sort(times.begin(), times.end());
    // ties and the origin have probability zero; drop them to keep times strictly increasing
    times.erase(std::unique(times.begin(), times.end()), times.end());
    if (!times.empty() && times.front() <= 0.0) {
        times.erase(times.begin());
    }
    marks.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        marks.push_back(draw_mark(params.jump_law, rng));
    }
}

NoisePath simulate_noise(const NoiseParams& params, int n, double dt, std::uint64_t seed) {
    params.validate();
    if (n < 1) {
        throw std::invalid_argument("simulate_noise: n must be >= 1");
    }
    cells_per_unit(dt);
    Rng rng(seed);
    std::vector<double> times;
    std::vector<double> marks;
    draw_jumps(params, static_cast<double>(n), rng, times, marks);
    return simulate_with_jumps(params, n, dt, std::move(times), std::move(marks), rng);
}

NoisePath simulate_noise_given_arrivals(const NoiseParams& params, int n, double dt,
                                        const std::vector<double>& arrivals, std::uint64_t seed) {
    params.validate();
    if (n < 1) {
        throw std::invalid_argument("simulate_noise: n must be >= 1");
    }
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
        if (!(arrivals[k] > 0.0 && arrivals[k] < n) || (k > 0 && !(arrivals[k] > arrivals[k - 1]))) {
            throw std::invalid_argument("simulate_noise: arrivals must be increasing in (0, n)");
        }
    }
    Rng rng(seed);
    std::vector<double> marks;
    marks.reserve(arrivals.size());
    for (std::size_t k = 0; k < arrivals.size(); ++k) {
        marks.push_back(draw_mark(params.jump_law, rng));
    }
    return simulate_with_jumps(params, n, dt, arrivals, std::move(marks), rng);
}

NoisePath coarsen(const NoisePath& path, int factor) {
    if (factor < 1 || path.cells() % factor != 0) {
        throw std::invalid_argument("coarsen: factor must divide the number of cells");
    }
    if (factor == 1) {
        return path;
    }
    const int per_unit = static_cast<int>(std::round(1.0 / path.dt));
    if (per_unit % factor != 0) {
        throw std::invalid_argument("coarsen: factor must divide the cells per unit time");
    }
    NoisePath out;
    out.n = path.n;
    out.dt = 1.0 / (per_unit / factor);
    out.params = path.params;
    out.jump_times = path.jump_times;
    out.jump_marks = path.jump_marks;
    const int cells = path.cells() / factor;
    out.grid.resize(static_cast<std::size_t>(cells) + 1);
    out.xi.resize(static_cast<std::size_t>(cells) + 1);
    out.brownian_increments.assign(static_cast<std::size_t>(cells), 0.0);
    for (int i = 0; i <= cells; ++i) {
        out.grid[static_cast<std::size_t>(i)] = path.grid[static_cast<std::size_t>(i) * factor];
        out.xi[static_cast<std::size_t>(i)] = path.xi[static_cast<std::size_t>(i) * factor];
    }
    for (int i = 0; i < path.cells(); ++i) {
        out.brownian_increments[static_cast<std::size_t>(i / factor)] +=
            path.brownian_increments[static_cast<std::size_t>(i)];
    }
    // keep event boundaries that are coarse grid points or jumps; merge the rest
    const double coarse_per_unit = per_unit / factor;
    auto is_coarse_node = [&](double t) {
        const double s = t * coarse_per_unit;
        return s == std::round(s);
    };
    out.event_times.push_back(0.0);
    out.event_jump.push_back(-1);
    double dw = 0.0;
    double drift = 0.0;
    const std::size_t segments = path.event_dw.size();
    for (std::size_t e = 0; e < segments; ++e) {
        dw += path.event_dw[e];
        drift += path.event_drift[e];
        const double right = path.event_times[e + 1];
        const int jump = path.event_jump[e + 1];
        if (jump >= 0 || is_coarse_node(right)) {
            out.event_dw.push_back(dw);
            out.event_drift.push_back(drift);
            out.event_times.push_back(right);
            out.event_jump.push_back(jump);
            dw = 0.0;
            drift = 0.0;
        }
    }
    return out;
}

double ito_integral(const RealFunction& f, const NoisePath& path) {
    const auto& p = path.params;
    double drift = 0.0;
    double mart = 0.0;
    const std::size_t segments = path.event_dw.size();
    for (std::size_t e = 0; e < segments; ++e) {
        const double left = path.event_times[e];
        const double right = path.event_times[e + 1];
        if (path.event_drift[e] != 0.0) {
            drift += f(0.5 * (left + right)) * path.event_drift[e];
        }
        mart += f(left) * path.event_dw[e];
    }
    double jumps = 0.0;
    for (std::size_t k = 0; k < path.jump_times.size(); ++k) {
        jumps += f(path.jump_times[k]) * path.jump_marks[k];
    }
    return drift + p.rho1 * mart + p.rho2 * jumps;
}

std::vector<double> ito_integral_before_jumps(const RealFunction& f, const NoisePath& path) {
    const auto& p = path.params;
    std::vector<double> out;
    out.reserve(path.jump_times.size());
    double running = 0.0;
    const std::size_t segments = path.event_dw.size();
    for (std::size_t e = 0; e < segments; ++e) {
        const double left = path.event_times[e];
        const double right = path.event_times[e + 1];
        running += f(0.5 * (left + right)) * path.event_drift[e] + p.rho1 * f(left) * path.event_dw[e];
        const int jump = path.event_jump[e + 1];
        if (jump >= 0) {
            out.push_back(running);
            running += p.rho2 * f(path.jump_times[static_cast<std::size_t>(jump)]) *
                       path.jump_marks[static_cast<std::size_t>(jump)];
        }
    }
    return out;
}

double ObservationPath::y_total() const {
    double s = 0.0;
    for (double v : y_increments) {
        s += v;
    }
    return s;
}

ObservationPath observe(const SignalSpec& signal, std::shared_ptr<const NoisePath> noise) {
    if (!noise || noise->cells() < 1) {
        throw std::invalid_argument("observe: empty noise path");
    }
    const NoisePath& path = *noise;
    const int per_unit = static_cast<int>(std::round(1.0 / path.dt));
    // the signal is 1-periodic, so the cell integrals repeat with period per_unit
    std::vector<double> cell_integral(static_cast<std::size_t>(per_unit));
    for (int p = 0; p < per_unit; ++p) {
        const double lo = static_cast<double>(p) / per_unit;
        const double hi = static_cast<double>(p + 1) / per_unit;
        cell_integral[static_cast<std::size_t>(p)] =
            quad::gauss_legendre(signal.evaluator(), lo, hi, 4);
    }
    ObservationPath obs;
    obs.n = path.n;
    obs.signal_name = signal.name();
    obs.times.assign(path.grid.begin(), path.grid.end() - 1);
    obs.y_increments.resize(static_cast<std::size_t>(path.cells()));
    for (int i = 0; i < path.cells(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        obs.y_increments[idx] = cell_integral[static_cast<std::size_t>(i % per_unit)] +
                                (path.xi[idx + 1] - path.xi[idx]);
    }
    obs.noise = std::move(noise);
    return obs;
}

ObservationPath observe(const SignalSpec& signal, const NoisePath& noise) {
    return observe(signal, std::make_shared<const NoisePath>(noise));
}

} // namespace ouselect
