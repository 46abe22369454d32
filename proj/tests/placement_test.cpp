#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "pinchwave/experiments.hpp"
#include "pinchwave/placement.hpp"

namespace pinchwave {
namespace {

SystemParams unit_geometry(int n, double spacing, double height) {
  SystemParams p = SystemParams::make_default(n);
  p.min_spacing_m = spacing;
  p.waveguide_height_m = height;
  return p;
}

TEST(ReciprocalDistanceSum, HandValues) {
  SystemParams p = unit_geometry(1, 1.0, 3.0);
  EXPECT_DOUBLE_EQ(reciprocal_distance_sum(2.0, {2.0, 4.0}, p), 1.0 / 5.0);

  p = unit_geometry(3, 1.0, 10.0);  // C = 100 with y_m = 0
  EXPECT_NEAR(reciprocal_distance_sum(-1.0, {0.0, 0.0}, p), 0.299007438041997827133, 1e-15);
}

TEST(ReciprocalDistanceSum, SymmetricAboutClosedFormOptimum) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 1; n <= 8; ++n) {
    const SystemParams p = unit_geometry(n, 0.3, 2.0);
    const UserPosition user{u(gen) * 4, u(gen) * 4};
    const double x_star = user.x_m - (n - 1) / 2.0 * p.min_spacing_m;
    for (int k = 0; k < 20; ++k) {
      const double t = u(gen) * 3.0;
      EXPECT_NEAR(reciprocal_distance_sum(x_star + t, user, p),
                  reciprocal_distance_sum(x_star - t, user, p), 1e-14);
    }
  }
}

TEST(ReciprocalDistanceSum, DerivativeMatchesFiniteDifference) {
  const SystemParams p = unit_geometry(5, 0.4, 1.5);
  const UserPosition user{0.3, -0.7};
  for (double x : {-3.0, -1.1, 0.0, 0.8, 2.5}) {
    const double h = 1e-6;
    const double fd = (reciprocal_distance_sum(x + h, user, p) - reciprocal_distance_sum(x - h, user, p)) / (2 * h);
    EXPECT_NEAR(reciprocal_distance_sum_derivative(x, user, p), fd, 1e-7);
  }
}

TEST(UnimodalityCondition, Cases) {
  SystemParams p = unit_geometry(1, 100.0, 0.1);
  EXPECT_TRUE(unimodality_condition({0, 0}, p));

  p = SystemParams::make_default(8);
  EXPECT_TRUE(unimodality_condition({0, 0}, p));
  EXPECT_NEAR(std::pow(7 * p.min_spacing_m, 2), 0.0014043049667762775625, 1e-15);

  // C = 3² + 4² = 25 = (N-1)²Δ² with N = 6, Δ = 1: inclusive boundary.
  p = unit_geometry(6, 1.0, 3.0);
  EXPECT_TRUE(unimodality_condition({0.0, 4.0}, p));
  p.min_spacing_m = 1.0 + 1e-9;
  EXPECT_FALSE(unimodality_condition({0.0, 4.0}, p));
}

TEST(Stage1Placement, ClosedFormLayouts) {
  SystemParams p = unit_geometry(1, 0.005, 3.0);
  auto s = stage1_placement({1.25, 2.0}, p);
  ASSERT_EQ(s.layout.size(), 1u);
  EXPECT_DOUBLE_EQ(s.layout.antenna_x[0], 1.25);

  p = unit_geometry(3, 0.005, 3.0);
  s = stage1_placement({5.0, 0.0}, p);
  ASSERT_EQ(s.layout.size(), 3u);
  EXPECT_NEAR(s.layout.antenna_x[0], 4.995, 1e-12);
  EXPECT_NEAR(s.layout.antenna_x[1], 5.000, 1e-12);
  EXPECT_NEAR(s.layout.antenna_x[2], 5.005, 1e-12);
  EXPECT_TRUE(s.condition_satisfied);
  EXPECT_DOUBLE_EQ(s.objective_value, reciprocal_distance_sum(s.layout.antenna_x[0], {5.0, 0.0}, p));

  p = unit_geometry(2, 1.0, 3.0);
  s = stage1_placement({0.0, 0.0}, p);
  EXPECT_DOUBLE_EQ(s.layout.antenna_x[0], -0.5);
  EXPECT_DOUBLE_EQ(s.layout.antenna_x[1], 0.5);
}

TEST(Stage1Placement, SymmetricAndEquallySpaced) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int n = 1; n <= 16; ++n) {
    const SystemParams p = SystemParams::make_default(n);
    const UserPosition user{u(gen), u(gen)};
    const auto s = stage1_placement(user, p);
    for (int k = 0; k < n; ++k)
      EXPECT_NEAR(s.layout.antenna_x[k] + s.layout.antenna_x[n - 1 - k], 2.0 * user.x_m, 1e-12);
    for (int k = 1; k < n; ++k)
      EXPECT_NEAR(s.layout.antenna_x[k] - s.layout.antenna_x[k - 1], p.min_spacing_m, 1e-12);
  }
}

TEST(Stage1Placement, FlagsViolatedCondition) {
  const SystemParams p = unit_geometry(4, 2.0, 1.0);  // (N-1)²Δ² = 36 > C
  const auto s = stage1_placement({0.0, 0.0}, p);
  EXPECT_FALSE(s.condition_satisfied);
  ASSERT_EQ(s.layout.size(), 4u);
  EXPECT_DOUBLE_EQ(s.layout.antenna_x[0], -3.0);
}

TEST(PhaseGap, Cases) {
  EXPECT_DOUBLE_EQ(phase_gap(1.7, 1.7), 0.0);
  EXPECT_NEAR(phase_gap(std::numbers::pi, 0.0), std::numbers::pi, 1e-15);
  EXPECT_NEAR(phase_gap(kTwoPi * 7 + 0.3, 0.0), 0.3, 1e-12);
  EXPECT_NEAR(phase_gap(0.0, kTwoPi * 7 + 0.3), 0.3, 1e-12);
  EXPECT_NEAR(phase_gap(kTwoPi - 0.1, 0.0), 0.1, 1e-12);
  EXPECT_NEAR(phase_gap(-0.2, 0.0), 0.2, 1e-12);
}

TEST(RefineOne, StaysInSegmentAndMeetsLipschitzBound) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    SystemParams p = SystemParams::make_default(2);
    p.waveguide_height_m = 1.0 + 9.0 * u(gen);
    const UserPosition user{(u(gen) - 0.5) * 10, (u(gen) - 0.5) * 10};
    const RefinementConfig cfg = RefinementConfig::make_default(p);
    const double prev = user.x_m + (u(gen) - 0.5) * 0.1;
    const double bound = refinement_gap_bound(p, cfg.search_step_m) + 1e-9;
    for (int dir : {+1, -1}) {
      const double x = refine_one(prev, dir, user, p, cfg);
      const double offset = dir * (x - prev);
      EXPECT_GE(offset, p.min_spacing_m - 1e-12);
      EXPECT_LE(offset, 3.0 * p.min_spacing_m + 1e-12);
      EXPECT_LE(phase_gap(total_phase(user, prev, p), total_phase(user, x, p)), bound);
    }
  }
}

// Fine-scan oracle: step λ/20000 over the same segment.
double fine_scan_best_gap(double prev, const UserPosition& user, const SystemParams& p) {
  const double step = p.wavelength() / 20000.0;
  const double target = total_phase(user, prev, p);
  double best = 10.0;
  for (double off = p.min_spacing_m; off <= 3.0 * p.min_spacing_m; off += step)
    best = std::min(best, phase_gap(target, total_phase(user, prev + off, p)));
  return best;
}

TEST(RefineOne, EqualWavelengthsAgainstFineScan) {
  SystemParams p = SystemParams::make_default(2);
  p.refractive_index = 1.0;
  const RefinementConfig cfg = RefinementConfig::make_default(p);
  const UserPosition user{0.0, 0.0};
  for (double prev : {-0.01, 0.0, 0.004}) {
    const double x = refine_one(prev, +1, user, p, cfg);
    const double gap = phase_gap(total_phase(user, prev, p), total_phase(user, x, p));
    EXPECT_LT(gap, 0.05);
    EXPECT_LT(fine_scan_best_gap(prev, user, p), 1e-3);
    EXPECT_LE(gap, fine_scan_best_gap(prev, user, p) + refinement_gap_bound(p, cfg.search_step_m) / 2);
  }
}

TEST(RefinementConfig, Defaults) {
  const SystemParams p = SystemParams::make_default(4);
  const auto cfg = RefinementConfig::make_default(p);
  EXPECT_DOUBLE_EQ(cfg.search_step_m, p.wavelength() / 200.0);
  EXPECT_DOUBLE_EQ(cfg.phase_tolerance_rad, 0.05);
  EXPECT_TRUE(cfg.is_valid(p));
  EXPECT_FALSE(RefinementConfig::with_step_divisor(p, 2.0).is_valid(p));
  EXPECT_NEAR(refinement_gap_bound(p, cfg.search_step_m), 0.0753982236861550, 1e-12);
}

TEST(Stage2Refine, SingleAntennaUnchanged) {
  const SystemParams p = SystemParams::make_default(1);
  const auto s1 = stage1_placement({0.4, 1.0}, p);
  const auto refined = stage2_refine(s1, {0.4, 1.0}, p, RefinementConfig::make_default(p));
  EXPECT_EQ(refined.antenna_x, s1.layout.antenna_x);
}

TEST(Stage2Refine, AnchorsAndSegments) {
  const SystemParams p3 = SystemParams::make_default(3);
  const UserPosition user{1.2, -2.0};
  const auto cfg = RefinementConfig::make_default(p3);
  const auto r3 = stage2_refine(stage1_placement(user, p3), user, p3, cfg);
  EXPECT_DOUBLE_EQ(r3.antenna_x[1], user.x_m);
  for (int k = 1; k < 3; ++k) {
    const double gap = r3.antenna_x[k] - r3.antenna_x[k - 1];
    EXPECT_GE(gap, p3.min_spacing_m - 1e-12);
    EXPECT_LE(gap, 3 * p3.min_spacing_m + 1e-12);
  }

  const SystemParams p4 = SystemParams::make_default(4);
  const auto s4 = stage1_placement(user, p4);
  const auto r4 = stage2_refine(s4, user, p4, RefinementConfig::make_default(p4));
  EXPECT_EQ(anchor_index(4), 1u);
  EXPECT_DOUBLE_EQ(r4.antenna_x[1], s4.layout.antenna_x[1]);
  EXPECT_NEAR(r4.antenna_x[1], user.x_m - p4.min_spacing_m / 2, 1e-12);
}

TEST(Stage2Refine, PhaseGapsWithinToleranceOnRandomUsers) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const SystemParams p = SystemParams::make_default(2 + i % 15);
    const UserPosition user = sample_user(rng, p);
    const auto cfg = RefinementConfig::make_default(p);
    const auto refined = stage2_refine(stage1_placement(user, p), user, p, cfg);
    EXPECT_TRUE(refined.is_feasible(p.min_spacing_m));
    EXPECT_LE(max_consecutive_phase_gap(refined, user, p), cfg.phase_tolerance_rad);
  }
}

TEST(Stage2Refine, FeasibleOnThousandScenarios) {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    SystemParams p = SystemParams::make_default(1 + i % 16);
    p.waveguide_height_m = 0.5 + 9.5 * rng.uniform();
    const UserPosition user = sample_user(rng, p);
    const auto refined = stage2_refine(stage1_placement(user, p), user, p, RefinementConfig::make_default(p));
    ASSERT_TRUE(refined.is_feasible(p.min_spacing_m)) << "scenario " << i;
  }
}

TEST(TwoStageOptimize, SingleAntennaMatchesStage1) {
  const SystemParams p = SystemParams::make_default(1);
  const auto r = two_stage_optimize({2.0, 3.0}, p, RefinementConfig::make_default(p));
  EXPECT_EQ(r.report.rate_bits, r.stage1_report.rate_bits);
  EXPECT_EQ(r.max_phase_gap_rad, 0.0);
}

TEST(TwoStageOptimize, NeverWorseThanStage1) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    const SystemParams p = SystemParams::make_default(1 + i % 8);
    const UserPosition user = sample_user(rng, p);
    const auto r = two_stage_optimize(user, p, RefinementConfig::make_default(p));
    EXPECT_GE(r.report.rate_bits, r.stage1_report.rate_bits);
    EXPECT_TRUE(r.refined_layout.is_feasible(p.min_spacing_m));
    EXPECT_DOUBLE_EQ(r.report.rate_bits, std::log2(1.0 + r.report.snr_linear));
  }
}

TEST(TwoStageOptimize, RefinementImprovesRateForManyAntennas) {
  // Constructive combination: N aligned antennas give about N² the single
  // antenna gain, so the refined SNR should approach N·|h|²P/σ².
  const SystemParams p = SystemParams::make_default(8);
  const UserPosition user{1.0, 2.0};
  const auto r = two_stage_optimize(user, p, RefinementConfig::make_default(p));
  const double single = std::norm(pinching_coefficient(user, user.x_m, p)) * p.total_power_w / p.noise_power_w;
  EXPECT_GT(r.report.snr_linear, 0.98 * 8.0 * single);
}

}  // namespace
}  // namespace pinchwave
