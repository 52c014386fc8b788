#include <catch2/catch_amalgamated.hpp>

#include "pcosync/continuity.hpp"

#include <cmath>
#include <random>

using namespace pcosync;
using Catch::Approx;

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ContinuityConfig cf_config(double omega_a, double omega0 = 1.0) {
  ContinuityConfig cfg;
  cfg.mode = ContinuityMode::constant_frequency;
  cfg.omega_a_up = omega_a;
  cfg.omega_a_down = omega_a;
  cfg.omega0 = omega0;
  return cfg;
}

ContinuityConfig ct_config(double tau, double omega0 = 1.0) {
  ContinuityConfig cfg;
  cfg.mode = ContinuityMode::constant_time;
  cfg.tau_fixed = tau;
  cfg.omega0 = omega0;
  return cfg;
}

}  // namespace

TEST_CASE("plan realizes psi per mode", "[continuity]") {
  const AdjustmentPlan cf = plan(0.15, cf_config(0.3), 0.0);
  CHECK(cf.omega == Approx(1.3).margin(1e-15));
  CHECK(cf.remaining == Approx(0.5).margin(1e-15));
  CHECK(cf.duration == Approx(0.5).margin(1e-15));
  CHECK(cf.psi == 0.15);

  const AdjustmentPlan ct = plan(0.15, ct_config(0.3), 0.0);
  CHECK(ct.omega == Approx(1.5).margin(1e-15));
  CHECK(ct.remaining == Approx(0.3).margin(1e-15));

  // Large backward corrections may run the oscillator backward in phase.
  const AdjustmentPlan backward = plan(-0.6, ct_config(0.3), 0.0);
  CHECK(backward.omega == Approx(-1.0).margin(1e-15));
  CHECK(backward.remaining == Approx(0.3).margin(1e-15));

  for (const auto& cfg :
       {cf_config(0.3), ct_config(0.3), ContinuityConfig{}}) {
    const AdjustmentPlan none = plan(0.0, cfg, 2.5);
    CHECK(none.omega == 1.0);
    CHECK(none.remaining == 0.0);
    CHECK(none.psi == 0.0);
    CHECK(none.started_at == 2.5);
  }

  const AdjustmentPlan jump = plan(-0.2, ContinuityConfig{}, 1.0);
  CHECK(jump.remaining == 0.0);
  CHECK(jump.duration == 0.0);
  CHECK(jump.psi == -0.2);

  const AdjustmentPlan down = plan(-0.15, cf_config(0.3), 0.0);
  CHECK(down.omega == Approx(0.7).margin(1e-15));
  CHECK(down.remaining == Approx(0.5).margin(1e-15));
}

TEST_CASE("replan reports the realized fraction", "[continuity]") {
  const ContinuityConfig cfg = cf_config(0.3);
  const AdjustmentPlan old_plan = plan(0.15, cfg, 0.0);  // tau_i = 0.5

  auto [fresh, fraction] = replan(old_plan, 0.2, -0.05, cfg, 0.2);
  CHECK(fraction == Approx(0.4).margin(1e-15));
  CHECK(fresh.psi == -0.05);
  CHECK(fresh.started_at == 0.2);

  auto [after_complete, full] = replan(old_plan, 0.7, 0.1, cfg, 0.7);
  CHECK(full == 1.0);
  CHECK(after_complete.psi == 0.1);

  auto [from_null, whole] = replan(null_plan(1.0), 0.3, 0.1, cfg, 0.3);
  CHECK(whole == 1.0);
  CHECK(from_null.psi == 0.1);

  CHECK_THROWS_AS(replan(old_plan, -0.1, 0.1, cfg, 0.0), std::invalid_argument);
}

TEST_CASE("effective_coupling", "[continuity]") {
  CHECK(effective_coupling(0.2, 0.5, 0.5) == Approx(0.2).margin(1e-15));
  CHECK(effective_coupling(0.8, 0.5, 0.5) == 0.5);  // completed: capped at alpha
  CHECK(effective_coupling(0.0, 0.5, 0.5) == 0.0);
  CHECK(effective_coupling(0.0, 0.0, 0.5) == 0.0);
  CHECK(effective_coupling(0.3, 0.0, 0.5) == 0.5);  // jump limit
  CHECK_THROWS_AS(effective_coupling(-0.1, 0.5, 0.5), std::invalid_argument);
}

TEST_CASE("phase_at evolves piecewise linearly", "[continuity]") {
  AdjustmentPlan p{1.3, 0.5, 0.5, 0.15, 0.0};
  CHECK(phase_at(p, 0.5, 0.2, 1.0) == Approx(0.76).margin(1e-15));
  CHECK(phase_at(p, 0.5, 0.7, 1.0) == Approx(1.35).margin(1e-15));
  CHECK(phase_at(null_plan(1.0), 0.5, 0.25, 1.0) == Approx(0.75).margin(1e-15));
  CHECK_THROWS_AS(phase_at(p, 0.5, -0.1, 1.0), std::invalid_argument);
}

TEST_CASE("completed adjustments equal jump-then-drift", "[continuity][property]") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = unit(rng);
    const double psi = (unit(rng) - 0.5);
    const ContinuityConfig cfg =
        trial % 2 == 0 ? cf_config(0.05 + unit(rng)) : ct_config(0.05 + unit(rng));
    const AdjustmentPlan p = plan(psi, cfg, 0.0);
    const double reached = phase_at(p, theta, p.remaining, cfg.omega0);
    REQUIRE(reached - theta ==
            Approx(psi + cfg.omega0 * p.remaining).margin(1e-12));
  }
}

TEST_CASE("interruption realizes the elapsed fraction exactly", "[continuity][property]") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = unit(rng);
    const double psi = (unit(rng) - 0.5);
    if (psi == 0.0) continue;
    const ContinuityConfig cfg =
        trial % 2 == 0 ? cf_config(0.05 + unit(rng)) : ct_config(0.05 + unit(rng));
    const AdjustmentPlan p = plan(psi, cfg, 0.0);
    const double s = unit(rng) * p.duration;
    const double reached = phase_at(p, theta, s, cfg.omega0);
    REQUIRE(reached - theta ==
            Approx(s * psi / p.duration + cfg.omega0 * s).margin(1e-12));
    REQUIRE(realized_fraction(p, s) == Approx(s / p.duration).margin(1e-15));
  }
}

TEST_CASE("large rates and short durations approach the jump limit",
          "[continuity][property]") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const double psi = unit(rng) - 0.5;
    const AdjustmentPlan fast_cf = plan(psi, cf_config(1e6), 0.0);
    REQUIRE(fast_cf.remaining <= 0.5e-6);
    const AdjustmentPlan fast_ct = plan(psi, ct_config(1e-6), 0.0);
    REQUIRE(fast_ct.remaining == 1e-6);
    // Completing either plan lands within rounding of the instantaneous jump.
    REQUIRE(phase_at(fast_cf, 0.4, fast_cf.remaining, 1.0) ==
            Approx(0.4 + psi).margin(1e-5));
    REQUIRE(phase_at(fast_ct, 0.4, fast_ct.remaining, 1.0) ==
            Approx(0.4 + psi).margin(1e-5));
  }
}

TEST_CASE("constant-frequency rates stay positive when omega_a < omega0",
          "[continuity][property]") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 500; ++trial) {
    const double omega_a = unit(rng) * 0.999;
    const double psi = unit(rng) - 0.5;
    const AdjustmentPlan p = plan(psi, cf_config(omega_a), 0.0);
    REQUIRE(p.omega > 0.0);
  }
}

TEST_CASE("backward plans never cross zero for delay-advance corrections",
          "[continuity][property]") {
  // A delay correction has |psi| = alpha * theta <= theta; the backward
  // excursion is strictly smaller than |psi| in either mode.
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = 0.01 + 0.49 * unit(rng);
    const double alpha = 0.01 + 0.99 * unit(rng);
    const double psi = -alpha * theta;
    const ContinuityConfig cfg =
        trial % 2 == 0 ? cf_config(0.05 + 3.0 * unit(rng)) : ct_config(0.02 + unit(rng));
    const AdjustmentPlan p = plan(psi, cfg, 0.0);
    double lowest = theta;
    for (int k = 0; k <= 100; ++k) {
      lowest = std::min(lowest, phase_at(p, theta, p.remaining * k / 100.0, cfg.omega0));
    }
    REQUIRE(lowest >= 0.0);
  }
}

TEST_CASE("config validation", "[continuity][errors]") {
  CHECK_THROWS_AS(cf_config(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(ct_config(0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(cf_config(0.3, 0.0).validate(), std::invalid_argument);
  CHECK_NOTHROW(ContinuityConfig{}.validate());
  CHECK_NOTHROW(cf_config(0.3).validate());
  CHECK_NOTHROW(ct_config(0.3).validate());
}
