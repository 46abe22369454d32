#pragma once

// Two-stage pinching-antenna placement.
//
// Stage 1 maximizes the sum of reciprocal distances under the minimum
// spacing constraint. The optimum packs the antennas at exactly the minimum
// spacing and centers the block on the user's x-coordinate, which is the
// global maximizer whenever C = y_m² + d² >= (N-1)²Δ².
//
// Stage 2 keeps one anchor antenna at its stage-1 position and walks outward,
// placing each next antenna on the first grid point of [Δ, 3Δ] beyond its
// neighbor whose total phase best matches the neighbor's modulo 2π.

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "pinchwave/core_model.hpp"

namespace pinchwave {

struct Stage1Solution {
  WaveguideLayout layout;
  double objective_value = 0.0;  // Σ 1/r, in 1/m
  bool condition_satisfied = true;
};

struct RefinementConfig {
  double search_step_m = 0.0;
  double phase_tolerance_rad = 0.05;

  /// Step λ/200 for the given system.
  static RefinementConfig make_default(const SystemParams& params) {
    return with_step_divisor(params, 200.0);
  }

  /// Step λ/divisor.
  static RefinementConfig with_step_divisor(const SystemParams& params, double divisor) {
    RefinementConfig cfg;
    cfg.search_step_m = params.wavelength() / divisor;
    return cfg;
  }

  /// The step must resolve the faster (guided) phase rotation.
  bool is_valid(const SystemParams& params) const {
    return search_step_m > 0.0 && search_step_m < guided_wavelength(params) / 4.0;
  }
};

struct TwoStageResult {
  Stage1Solution stage1;
  WaveguideLayout refined_layout;
  RateReport report;
  RateReport stage1_report;
  double max_phase_gap_rad = 0.0;
  bool refinement_accepted = true;
};

/// g(x1) = Σ_n [(x1 + (n-1)Δ - x_m)² + C]^(-1/2) for an equally spaced block
/// whose first antenna is at x1.
inline double reciprocal_distance_sum(double x1, const UserPosition& user,
                                      const SystemParams& params) {
  const double c = lateral_offset_sq(user, params);
  double sum = 0.0;
  for (int n = 0; n < params.num_antennas; ++n) {
    const double dx = x1 + n * params.min_spacing_m - user.x_m;
    sum += 1.0 / std::sqrt(dx * dx + c);
  }
  return sum;
}

/// Analytic derivative dg/dx1.
inline double reciprocal_distance_sum_derivative(double x1, const UserPosition& user,
                                                 const SystemParams& params) {
  const double c = lateral_offset_sq(user, params);
  double sum = 0.0;
  for (int n = 0; n < params.num_antennas; ++n) {
    const double dx = x1 + n * params.min_spacing_m - user.x_m;
    const double r2 = dx * dx + c;
    sum -= dx / (r2 * std::sqrt(r2));
  }
  return sum;
}

/// C >= (N-1)²Δ², the sufficient condition for g to be unimodal.
inline bool unimodality_condition(const UserPosition& user, const SystemParams& params) {
  const double span = (params.num_antennas - 1) * params.min_spacing_m;
  return lateral_offset_sq(user, params) >= span * span;
}

/// Offset of antenna n (0-based) from the block center in a Δ-spaced block.
inline double centered_offset(int n, int count, double spacing) {
  return (n - (count - 1) / 2.0) * spacing;
}

/// Closed-form stage-1 layout: Δ-spaced and centered on x_m. The layout is
/// still returned when the unimodality condition fails, with
/// condition_satisfied = false (it remains a stationary point of g).
inline Stage1Solution stage1_placement(const UserPosition& user, const SystemParams& params) {
  Stage1Solution s;
  const int count = params.num_antennas;
  s.layout.height_m = params.waveguide_height_m;
  s.layout.antenna_x.reserve(count);
  for (int n = 0; n < count; ++n)
    s.layout.antenna_x.push_back(user.x_m + centered_offset(n, count, params.min_spacing_m));
  s.objective_value = reciprocal_distance_sum(s.layout.antenna_x.front(), user, params);
  s.condition_satisfied = unimodality_condition(user, params);
  return s;
}

/// Circular distance between two phases, in [0, π].
inline double phase_gap(double phi_a, double phi_b) {
  const double m = std::fmod(std::fmod(phi_a - phi_b, kTwoPi) + kTwoPi, kTwoPi);
  return std::min(m, kTwoPi - m);
}

/// Places the antenna next to prev_x (direction +1 to the right, -1 to the
/// left) on the first scan point of [Δ, 3Δ] away from prev_x that minimizes
/// the phase gap to the antenna at prev_x.
inline double refine_one(double prev_x, int direction, const UserPosition& user,
                         const SystemParams& params, const RefinementConfig& cfg) {
  const double spacing = params.min_spacing_m;
  const double step = cfg.search_step_m;
  const auto steps = static_cast<long>(std::floor(2.0 * spacing / step + 1e-9));
  const double target = total_phase(user, prev_x, params);
  const double sign = direction >= 0 ? 1.0 : -1.0;

  double best_x = prev_x + sign * spacing;
  double best_gap = phase_gap(target, total_phase(user, best_x, params));
  for (long k = 1; k <= steps; ++k) {
    const double x = prev_x + sign * (spacing + static_cast<double>(k) * step);
    const double gap = phase_gap(target, total_phase(user, x, params));
    if (gap < best_gap) {
      best_gap = gap;
      best_x = x;
    }
  }
  return best_x;
}

/// 0-based index of the antenna that stage 2 keeps fixed: (N+1)/2 for odd
/// N, N/2 for even N (1-based).
inline std::size_t anchor_index(std::size_t count) {
  return count % 2 == 1 ? (count - 1) / 2 : count / 2 - 1;
}

inline WaveguideLayout stage2_refine(const Stage1Solution& stage1, const UserPosition& user,
                                     const SystemParams& params, const RefinementConfig& cfg) {
  WaveguideLayout out = stage1.layout;
  auto& x = out.antenna_x;
  if (x.size() < 2) return out;
  const std::size_t anchor = anchor_index(x.size());
  for (std::size_t n = anchor + 1; n < x.size(); ++n) x[n] = refine_one(x[n - 1], +1, user, params, cfg);
  for (std::size_t n = anchor; n-- > 0;) x[n] = refine_one(x[n + 1], -1, user, params, cfg);
  return out;
}

/// Largest circular phase gap between neighboring antennas.
inline double max_consecutive_phase_gap(const WaveguideLayout& layout, const UserPosition& user,
                                        const SystemParams& params) {
  double worst = 0.0;
  for (std::size_t n = 1; n < layout.size(); ++n) {
    worst = std::max(worst, phase_gap(total_phase(user, layout.antenna_x[n - 1], params),
                                      total_phase(user, layout.antenna_x[n], params)));
  }
  return worst;
}

/// Stage 1 followed by stage 2. The refined layout is kept only if it does
/// not lower the rate; otherwise the stage-1 layout is returned.
inline TwoStageResult two_stage_optimize(const UserPosition& user, const SystemParams& params,
                                         const RefinementConfig& cfg) {
  TwoStageResult result;
  result.stage1 = stage1_placement(user, params);
  result.stage1_report = pinching_rate(user, result.stage1.layout, params);

  WaveguideLayout refined = stage2_refine(result.stage1, user, params, cfg);
  RateReport refined_report = pinching_rate(user, refined, params);
  if (refined_report.snr_linear >= result.stage1_report.snr_linear) {
    result.refined_layout = std::move(refined);
    result.report = std::move(refined_report);
  } else {
    result.refined_layout = result.stage1.layout;
    result.report = result.stage1_report;
    result.refinement_accepted = false;
  }
  result.max_phase_gap_rad = max_consecutive_phase_gap(result.refined_layout, user, params);
  return result;
}

/// Lipschitz bound on the phase gap left by a scan of the given step:
/// 2π·step·(1/λ + 1/λ_g).
inline double refinement_gap_bound(const SystemParams& params, double step) {
  return kTwoPi * step * (1.0 / params.wavelength() + 1.0 / guided_wavelength(params));
}

}  // namespace pinchwave
