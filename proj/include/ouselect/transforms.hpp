#pragma once

#include <vector>

#include "ouselect/noise.hpp"
#include "ouselect/quadrature.hpp"

namespace ouselect {

/// Discretisation knobs shared by the transforms.
struct TransformConfig {
    int cells = 8192;     // 1-D integrals over [0, t]
    int cells_2d = 2048;  // (x, z) grid of the double integral inside H
    int lattice = 512;    // (v, t) lattice of the correlation measure
};

struct MomentConstants {
    double rho_star = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double rho3 = 0.0;
    double D1 = 0.0;
    double D2 = 0.0;
    double Mstar = 0.0;
    double L1star = 0.0;
    double sigma_Q = 0.0;
};

/// eps_f(t) = a int_0^t e^{a(t-v)} f(v) (1 + e^{2av}) dv.
double epsilon_f(const RealFunction& f, double a, double t, const TransformConfig& cfg = {});
/// eps_f on the nodes of UniformGrid(t, cfg.cells).
std::vector<double> epsilon_profile(const RealFunction& f, double a, double t,
                                    const TransformConfig& cfg = {});

/// tau_{f,g}(t) = 1/2 int_0^t (2 f g + f eps_g + eps_f g) ds.
double tau_fg(const RealFunction& f, const RealFunction& g, double a, double t,
              const TransformConfig& cfg = {});
std::vector<double> tau_profile(const RealFunction& f, const RealFunction& g, double a, double t,
                                const TransformConfig& cfg = {});

/// E I_t(f) I_t(g) = rho* tau_{f,g}(t).
double cov_I(const RealFunction& f, const RealFunction& g, const NoiseParams& params, double t,
             const TransformConfig& cfg = {});

/// L_f(x, z) = a e^{ax} (f(z) + a int_0^x e^{av} f(v + z) dv).
double L_f(const RealFunction& f, double a, double x, double z, const TransformConfig& cfg = {});

/// D_{f,g}(x, z) = int_0^x [g(y+z) L_f(y,z) + f(y+z) L_g(y,z)] dy + f(z) g(z).
double D_fg(const RealFunction& f, const RealFunction& g, double a, double x, double z,
            const TransformConfig& cfg = {});

/// H_{f,g}(t) = lambda rho1^2 tau_{f,g}(t) + (lambda rho2)^2 int_0^t D_{f,g}(t - z, z) dz.
double H_fg(const RealFunction& f, const RealFunction& g, const NoiseParams& params, double t,
            const TransformConfig& cfg = {});
/// H on the nodes k t / cells_2d, k = 0..cells_2d.
std::vector<double> H_profile(const RealFunction& f, const RealFunction& g, const NoiseParams& params,
                              double t, const TransformConfig& cfg = {});
/// int_0^t H_{f,g}(s) ds, the expected sum over arrivals of I_{T_k-}(f) I_{T_k-}(g).
double H_integral(const RealFunction& f, const RealFunction& g, const NoiseParams& params, double t,
                  const TransformConfig& cfg = {});

/// rho1^2 tau_{f,g}(T_k) + rho2^2 sum_{l<k} D_{f,g}(T_k - T_l, T_l), k 1-based.
double cond_cov_at_jump(const RealFunction& f, const RealFunction& g, const NoiseParams& params,
                        const std::vector<double>& arrivals, int k, const TransformConfig& cfg = {});

/// max over the (v, t) lattice of |int_0^t f(u+v) g(u) du|, symmetrised in (f, g).
double correlation_measure(const RealFunction& f, const RealFunction& g, double n, int lattice = 512);

/// sup_{0 <= t <= n} |f(t)| on a uniform grid with `points` cells.
double sup_norm(const RealFunction& f, double n, int points = 0);

MomentConstants moment_constants(const NoiseParams& params, const FamilyBounds& bounds);

/// n M* (varpi* + |f|* |g|*) |f|* |g|*.
double second_order_bound(const RealFunction& f, const RealFunction& g, const NoiseParams& params,
                          double n, const TransformConfig& cfg = {});

} // namespace ouselect
