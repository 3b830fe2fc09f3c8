#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ouselect/quadrature.hpp"

namespace ouselect {

class SignalSpec;

using Rng = std::mt19937_64;

/// Law of the standardized jump marks Y (zero mean, unit variance).
enum class JumpLaw { rademacher, gaussian };

double jump_fourth_moment(JumpLaw law) noexcept;
std::string to_string(JumpLaw law);
JumpLaw jump_law_from_string(const std::string& name);

/// d xi = a xi dt + rho1 dw + rho2 dz, z compound Poisson with intensity lambda.
struct NoiseParams {
    double a = 0.0;
    double lambda = 0.0;
    double rho1 = 1.0;
    double rho2 = 0.0;
    JumpLaw jump_law = JumpLaw::rademacher;

    /// rho* = rho1^2 + lambda rho2^2.
    double rho_star() const noexcept { return rho1 * rho1 + lambda * rho2 * rho2; }

    /// Throws std::invalid_argument on a > 0, lambda < 0 or non-finite fields.
    /// rho* = 0 is allowed here (the degenerate zero-noise model).
    void validate() const;
};

/// Box constraints of the noise family.
struct FamilyBounds {
    double a_max = 1.0;
    double lambda_max = 1.0;
    double rho_star_min = 1.0;
    double rho_star_max = 2.0;

    void validate() const;
    bool contains(const NoiseParams& p, double slack = 1e-12) const;
};

/// One simulated trajectory of xi on [0, n].
///
/// The path is stored at two levels. The grid level (t_i = i dt) carries xi and
/// the per-cell Brownian increments. The event level splits every cell at the
/// jump times; for each event segment [s_e, s_{e+1}) it stores the Brownian
/// increment and the exact drift a * int xi ds, so stochastic integrals against
/// the path can be assembled without re-simulating anything.
struct NoisePath {
    int n = 0;
    double dt = 0.0;
    NoiseParams params;

    std::vector<double> grid;                 // size cells + 1
    std::vector<double> xi;                   // xi at grid points (right-continuous)
    std::vector<double> brownian_increments;  // size cells
    std::vector<double> jump_times;           // strictly increasing, in (0, n)
    std::vector<double> jump_marks;

    std::vector<double> event_times;   // segment left ends, size E + 1 (last = n)
    std::vector<double> event_dw;      // size E
    std::vector<double> event_drift;   // size E: a * int over the segment of xi
    std::vector<int> event_jump;       // size E + 1: jump index at this time, or -1

    int cells() const noexcept { return static_cast<int>(brownian_increments.size()); }
    double xi_end() const noexcept { return xi.empty() ? 0.0 : xi.back(); }
    /// N_t = number of arrivals in [0, t].
    int jump_count(double t) const;
};

/// Deterministic per-replicate seed (splitmix64 of master and replicate index).
std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t replicate) noexcept;

/// Arrival times and marks of the compound Poisson part on [0, n]. Draw order:
/// count, sorted uniform times, marks.
void draw_jumps(const NoiseParams& params, double horizon, Rng& rng, std::vector<double>& times,
                std::vector<double>& marks);

/// Exact simulation on the merged grid/jump event set. Requires n >= 1, dt > 0
/// with 1/dt an integer (so t mod 1 repeats exactly on the grid).
NoisePath simulate_noise(const NoiseParams& params, int n, double dt, std::uint64_t seed);

/// Same as simulate_noise but with the arrival times pinned; only the Brownian
/// part and the marks are random.
NoisePath simulate_noise_given_arrivals(const NoiseParams& params, int n, double dt,
                                        const std::vector<double>& arrivals, std::uint64_t seed);

/// The same randomness on a grid `factor` times coarser (segments merged; xi at
/// retained grid points and all jump data unchanged).
NoisePath coarsen(const NoisePath& path, int factor);

/// I_n(f) = a int f xi ds + rho1 int f dw + rho2 sum_k f(T_k) Y_k. The drift term
/// uses the exact segment integral of xi with f at the segment midpoint; the
/// Brownian term uses f at the left end.
double ito_integral(const RealFunction& f, const NoisePath& path);

/// I_{T_k-}(f) for every arrival T_k of the path (integral up to, excluding, the jump).
std::vector<double> ito_integral_before_jumps(const RealFunction& f, const NoisePath& path);

/// Observations y on the simulation grid.
struct ObservationPath {
    int n = 0;
    std::vector<double> times;          // left ends of the cells
    std::vector<double> y_increments;   // y(t_{i+1}) - y(t_i)
    std::shared_ptr<const NoisePath> noise;  // empty for ingested data
    std::string signal_name;

    double y_total() const;
};

/// dy = S dt + d xi per cell; the signal part integrated per cell with Gauss-Legendre.
ObservationPath observe(const SignalSpec& signal, std::shared_ptr<const NoisePath> noise);
ObservationPath observe(const SignalSpec& signal, const NoisePath& noise);

// CSV interchange ----------------------------------------------------------

/// Columns t, xi, y_increment (one row per cell, left ends).
void write_path_csv(const std::string& file, const ObservationPath& obs);
/// Columns T_k, Y_k.
void write_jumps_csv(const std::string& file, const NoisePath& path);

/// Reads a (t, y_increment) series; an xi column is accepted and ignored. Throws
/// std::runtime_error on schema violations, empty files or non-increasing times.
/// `n` <= 0 infers the horizon as last t plus the last step.
ObservationPath read_observations_csv(const std::string& file, int n = 0);

} // namespace ouselect
