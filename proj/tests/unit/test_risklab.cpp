#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ouselect/basis.hpp"
#include "ouselect/risklab.hpp"
#include "ouselect/signals.hpp"
#include "ouselect/transforms.hpp"

using namespace ouselect;
using std::numbers::pi;

namespace {

NoiseParams reference() { return NoiseParams{-1.0, 1.0, 1.0, 1.0, JumpLaw::rademacher}; }
NoiseParams brownian(double rho_star) { return NoiseParams{0.0, 0.0, std::sqrt(rho_star), 0.0}; }

MCConfig mc(int R, std::uint64_t seed) {
    MCConfig c;
    c.replicates = R;
    c.seed = seed;
    return c;
}

} // namespace

TEST_CASE("risk of trivial estimators") {
    const SignalSpec zero = zero_signal();
    const MeanSE z = mc_risk(zero, reference(), 50, custom_weight({0.0}), mc(100, 1));
    CHECK(z.mean == 0.0);
    CHECK(z.se == 0.0);
    CHECK_THROWS(mc_risk(zero, reference(), 50, projection_weight(2), mc(99, 1)));

    // gamma = 0 loses exactly the signal energy
    const SignalSpec s = catalogue_signal("expcos");
    const MeanSE e = mc_risk(s, reference(), 64, custom_weight({0.0}), mc(100, 2));
    CHECK(e.mean == doctest::Approx(s.energy()).epsilon(1e-12));
}

TEST_CASE("projection risk under white noise") {
    const int n = 200;
    for (int d : {1, 5, 12}) {
        const MeanSE r = mc_risk(zero_signal(), brownian(1.0), n, projection_weight(d), mc(4000, 10 + d));
        CHECK_MESSAGE(std::abs(r.mean - double(d) / n) <= 3 * r.se, "d=" << d);
    }
}

TEST_CASE("risk of gamma_alpha0 decreases with n") {
    const SignalSpec s = catalogue_signal("expcos");
    const WeightSequence g500 = oracle_weight_alpha0(1, 1.0, 2.0, 500, default_epsilon(500)).gamma;
    const WeightSequence g1000 = oracle_weight_alpha0(1, 1.0, 2.0, 1000, default_epsilon(1000)).gamma;
    const MeanSE r500 = mc_risk(s, reference(), 500, g500, mc(400, 3));
    const MeanSE r1000 = mc_risk(s, reference(), 1000, g1000, mc(400, 4));
    CHECK(std::isfinite(r500.mean));
    CHECK(r500.se > 0.0);
    CHECK(r1000.mean < r500.mean);
}

TEST_CASE("engines agree on the risk") {
    const SignalSpec s = catalogue_signal("expcos");
    MCConfig path = mc(400, 6);
    path.engine = Engine::path;
    path.dt = 1.0 / 64;
    const WeightSequence g = pinsker_weight(1, 1.0, 40);
    const MeanSE a = mc_risk(s, reference(), 40, g, mc(2000, 5));
    const MeanSE b = mc_risk(s, reference(), 40, g, path);
    CHECK(std::abs(a.mean - b.mean) <= 3 * std::hypot(a.se, b.se));
}

TEST_CASE("thread count does not change results") {
    const SignalSpec s = catalogue_signal("expcos");
    const WeightGrid grid = build_default_grid(100);
    MCConfig one = mc(200, 9), four = mc(200, 9);
    four.threads = 4;
    SelectionConfig sel;
    const MeanSE a = mc_risk_selected(s, reference(), 100, grid, sel, one);
    const MeanSE b = mc_risk_selected(s, reference(), 100, grid, sel, four);
    CHECK(a.mean == b.mean);
    CHECK(a.se == b.se);
}

TEST_CASE("robust risk") {
    const int n = 100, d = 6;
    FamilyGrid single;
    single.members = {reference()};
    EstimatorSpec est;
    est.gamma = projection_weight(d);
    const SignalSpec zero = zero_signal();
    const RobustRisk r1 = robust_risk(zero, single, n, est, mc(300, 1));
    CHECK(r1.per_member.size() == 1);
    CHECK(r1.argmax == 0);

    FamilyGrid two;
    two.members = {brownian(1.0), brownian(2.0)};
    const RobustRisk r2 = robust_risk(zero, two, n, est, mc(3000, 2));
    CHECK(r2.argmax == 1);
    CHECK(std::abs(r2.worst.mean - 2.0 * d / n) <= 3 * r2.worst.se);

    const FamilyGrid box = family_box(FamilyBounds{}, 1.5);
    CHECK(box.members.size() == 9);
    for (const auto& m : box.members) {
        CHECK(box.bounds.contains(m));
        CHECK(m.rho_star() == doctest::Approx(1.5));
    }
    CHECK(box.members.front().a == 0.0);
    CHECK(box.members.front().lambda == 0.0);
    const RobustRisk rb = robust_risk(catalogue_signal("expcos"), box, n, est, mc(200, 3));
    CHECK(rb.per_member.size() == 9);
    CHECK(rb.worst.mean == rb.per_member[static_cast<std::size_t>(rb.argmax)].mean);
    for (const auto& m : rb.per_member) {
        CHECK(m.mean <= rb.worst.mean);
    }
}

TEST_CASE("bound constants") {
    CHECK(oracle_coefficient(0.1) == doctest::Approx(1.28 / 0.7));
    CHECK(oracle_coefficient(0.1) == doctest::Approx(1.8286).epsilon(1e-4));
    CHECK(oracle_coefficient(1e-9) == doctest::Approx(1.0).epsilon(1e-8));
    double prev = 1.0;
    for (double r = 0.001; r < 1.0 / 3; r += 0.001) {
        CHECK(oracle_coefficient(r) > prev);
        prev = oracle_coefficient(r);
    }
    const FamilyBounds b;
    const MomentConstants m = moment_constants(reference(), b);
    const double psi = psi_Q(m, b, 18, 0.1);
    CHECK(psi == doctest::Approx((6 * 2 * 18 + 4 * 2 * 12 + 56 * 18 * 1332.0) / (1 * 0.1 * 0.7)));
    CHECK(psi > 0.0);
    // kappa* with varsigma* = rho*_max = 2, sigma* = 3 rho*_max = 6, l_n = 1 + ln(n + 1)
    const double d = 0.7, n = 400, ln = 1 + std::log(n + 1);
    CHECK(kappa_star(d, b, 400) ==
          doctest::Approx(4 * d * d + 2 + std::sqrt(ln) + 4 * d * std::sqrt(6.0) / std::pow(n, 0.25) + ln / std::sqrt(n)));
}

TEST_CASE("oracle audit with the zero signal") {
    const int n = 100;
    const WeightGrid grid = build_default_grid(n);
    const auto recs = oracle_audit(zero_signal(), brownian(1.0), FamilyBounds{}, n, grid, rho_schedule(n), mc(300, 4));
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs) {
        CHECK(r.pass);
        CHECK(r.oracle_not_beaten);
        CHECK(r.b_q >= r.psi);
        CHECK(r.coefficient == doctest::Approx(oracle_coefficient(rho_schedule(n))));
        CHECK(r.lhs.mean > 0.0);
        CHECK(r.lhs.mean < 0.5);
    }
    CHECK(recs[0].mode == SigmaMode::known);
    CHECK(recs[1].mode == SigmaMode::estimated);
}

TEST_CASE("sigma consistency") {
    FamilyGrid fam;
    fam.members = {brownian(1.0)};
    const auto rows = sigma_consistency(zero_signal(), fam, {100, 400}, mc(400, 5));
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.pass);
        CHECK(r.abs_error.mean < r.bound);
    }
    CHECK(rows[1].abs_error.mean < rows[0].abs_error.mean);
    CHECK_THROWS(sigma_consistency(SignalSpec("nod", [](double) { return 0.0; }, nullptr, nullptr, 1, 1.0), fam,
                                   {100}, mc(100, 1)));

    // without noise sigma_hat is the signal tail, bounded by 4 |S'|_1^2 / (l - 1)
    const SignalSpec s = catalogue_signal("expcos");
    for (int n : {16, 100, 400}) {
        const CoeffVector c = fourier_coeffs(s, n);
        const double sig = estimate_sigma(c.values, n);
        const int l = sigma_cutoff(n);
        CHECK(sig <= 4 * std::pow(*s.dS_l1(), 2) / (l - 1));
    }
}

TEST_CASE("condition checks") {
    MCConfig cfg = mc(4000, 6);
    const ConditionReport flat = condition_checks(NoiseParams{0.0, 1.0, 1.0, 1.0}, FamilyBounds{}, 50, 8, cfg);
    for (std::size_t j = 0; j < flat.mean_sq.size(); ++j) {
        CHECK(std::abs(flat.mean_sq[j].mean - 2.0) <= 3 * flat.mean_sq[j].se);
    }
    const ConditionReport ref = condition_checks(reference(), FamilyBounds{}, 50, 8, cfg);
    CHECK(ref.envelope[2] == doctest::Approx(15.0 * 2 * 2 / (9 * pi * pi)));
    CHECK(ref.envelope[2] == doctest::Approx(0.6755).epsilon(1e-3));
    CHECK(ref.envelope[0] == 4.0);
    CHECK(ref.pass);
    CHECK(ref.L1_bound == 12.0);
    CHECK(ref.L2_bound == 28.0 * 1332.0);
    CHECK(ref.L2_hat <= ref.L2_bound);
    CHECK_THROWS(condition_checks(reference(), FamilyBounds{}, 5, 8, cfg));
}

TEST_CASE("Pinsker constant") {
    CHECK(pinsker_constant(1, 1, 1) == doctest::Approx(std::cbrt(3.0) * std::pow(1 / (2 * pi), 2.0 / 3)));
    CHECK(pinsker_constant(1, 1, 1) == doctest::Approx(0.42357).epsilon(1e-4));
    CHECK(pinsker_constant(1, 8, 1) == doctest::Approx(2 * pinsker_constant(1, 1, 1)));
    CHECK(pinsker_constant(2, 1, 1) == doctest::Approx(std::pow(5.0, 0.2) * std::pow(2 / (3 * pi), 0.8)));
    CHECK(pinsker_constant(2, 1, 1) == doctest::Approx(0.39921).epsilon(1e-4));
}

TEST_CASE("trend helper and truncation") {
    CHECK(nonincreasing_within_se({{1.0, 0.01}, {0.9, 0.01}, {0.91, 0.01}}));
    CHECK_FALSE(nonincreasing_within_se({{1.0, 0.01}, {1.2, 0.01}}));
    CHECK(risk_truncation(10000, 20.3, 20) == std::max(42, 400));
    CHECK(risk_truncation(20, 20.3, 20) == 20);
    CHECK(l_n(0) == 1.0);
    const SignalTable t(catalogue_signal("expcos"), 64);
    CHECK(t.theta().size() == 64);
    CHECK(t.tail(0) == doctest::Approx(catalogue_signal("expcos").energy()));
    CHECK(t.tail(30) < 1e-20);
}
