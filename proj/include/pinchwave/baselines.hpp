#pragma once

// Reference systems: the fixed array above the region centroid, a movable
// array on a y-parallel track, and a grid oracle for the exact pinching
// placement problem.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pinchwave/core_model.hpp"
#include "pinchwave/parallel.hpp"

namespace pinchwave {

/// N antennas at height d, Δ-spaced along x and centered on the centroid.
inline std::vector<AntennaPoint> conventional_array(const SystemParams& params) {
  std::vector<AntennaPoint> points;
  points.reserve(params.num_antennas);
  for (int n = 0; n < params.num_antennas; ++n) {
    const double offset = (n - (params.num_antennas - 1) / 2.0) * params.min_spacing_m;
    points.push_back({offset, 0.0, params.waveguide_height_m});
  }
  return points;
}

inline RateReport conventional_array_rate(const UserPosition& user, const SystemParams& params) {
  const auto points = conventional_array(params);
  const auto channel = conventional_channel(user, points, params);
  RateReport report = conventional_rate(channel, params);
  for (const auto& p : points) report.per_antenna_distance_m.push_back(distance_to_user(user, p));
  return report;
}

/// Track parallel to the y-axis through (0, 0, d) of length (N+9)Δ. Antenna
/// n may move 5Δ either way from its nominal slot in the centered Δ-spaced
/// block, so the block center ranges over [-5Δ, 5Δ].
struct MovableTrack {
  double height_m = 0.0;
  double spacing_m = 0.0;
  int num_antennas = 1;

  explicit MovableTrack(const SystemParams& params)
      : height_m(params.waveguide_height_m),
        spacing_m(params.min_spacing_m),
        num_antennas(params.num_antennas) {}

  double length_m() const { return (num_antennas + 9) * spacing_m; }
  double max_excursion_m() const { return 10.0 * spacing_m; }
  double max_center_shift_m() const { return max_excursion_m() / 2.0; }

  double nominal_y(int n) const { return (n - (num_antennas - 1) / 2.0) * spacing_m; }

  /// Antennas of a Δ-spaced block whose center is at `center_y`.
  std::vector<AntennaPoint> block(double center_y) const {
    std::vector<AntennaPoint> points;
    points.reserve(num_antennas);
    for (int n = 0; n < num_antennas; ++n) points.push_back({0.0, center_y + nominal_y(n), height_m});
    return points;
  }

  /// Track bounds, spacing and per-antenna excursion limits (1e-12 m slack).
  bool is_feasible(std::span<const AntennaPoint> points) const {
    constexpr double tol = 1e-12;
    const double half = length_m() / 2.0;
    for (std::size_t n = 0; n < points.size(); ++n) {
      const double y = points[n].y;
      if (y < -half - tol || y > half + tol) return false;
      if (std::abs(y - nominal_y(static_cast<int>(n))) > max_center_shift_m() + tol) return false;
      if (n > 0 && y - points[n - 1].y < spacing_m - tol) return false;
    }
    return true;
  }
};

struct MovableSolution {
  std::vector<AntennaPoint> antennas;
  RateReport report;
};

/// ‖h‖² depends on distances only, so the best placement is a Δ-spaced block
/// as close to the user as the track allows: center at y_m clamped to the
/// excursion range, then a local grid check at step Δ/20.
inline MovableSolution movable_placement(const UserPosition& user, const SystemParams& params) {
  const MovableTrack track(params);
  const double limit = track.max_center_shift_m();
  auto channel_norm = [&](double center) {
    const auto points = track.block(center);
    double s = 0.0;
    for (const auto& h : conventional_channel(user, points, params)) s += std::norm(h);
    return s;
  };

  double center = std::clamp(user.y_m, -limit, limit);
  double best = channel_norm(center);
  const double step = params.min_spacing_m / 20.0;
  for (int k = -20; k <= 20; ++k) {
    const double c = std::clamp(center + k * step, -limit, limit);
    const double v = channel_norm(c);
    if (v > best) {
      best = v;
      center = c;
    }
  }

  MovableSolution sol;
  sol.antennas = track.block(center);
  sol.report = conventional_rate(conventional_channel(user, sol.antennas, params), params);
  for (const auto& p : sol.antennas) sol.report.per_antenna_distance_m.push_back(distance_to_user(user, p));
  return sol;
}

inline RateReport movable_optimize(const UserPosition& user, const SystemParams& params) {
  return movable_placement(user, params).report;
}

class CostGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OracleConfig {
  double step_m = 0.0;
  double window_halfwidth_m = 0.0;
  bool full_span = false;  // search the whole region [-D/2, D/2] instead
  unsigned threads = 1;

  static constexpr int kMaxAntennas = 3;

  /// Step λ/50 and a window of ±5λ around the user.
  static OracleConfig make_default(const SystemParams& params) {
    OracleConfig cfg;
    cfg.step_m = params.wavelength() / 50.0;
    cfg.window_halfwidth_m = 5.0 * params.wavelength();
    return cfg;
  }

  bool is_valid(const SystemParams& params) const {
    return step_m > 0.0 && step_m <= params.wavelength() / 50.0 * (1.0 + 1e-12) &&
           (full_span || window_halfwidth_m > 0.0);
  }
};

struct OracleResult {
  WaveguideLayout layout;
  RateReport report;
};

/// Enumerates every N-tuple (N <= 3) of window grid points with spacing >= Δ
/// and returns the one with the highest rate. Ties go to the
/// lexicographically smallest tuple.
inline OracleResult exhaustive_search(const UserPosition& user, const SystemParams& params,
                                      const OracleConfig& cfg) {
  const int count = params.num_antennas;
  if (count > OracleConfig::kMaxAntennas)
    throw CostGuardError("exhaustive_search supports at most 3 antennas, got " +
                         std::to_string(count));
  if (!cfg.is_valid(params)) throw std::invalid_argument("exhaustive_search: invalid OracleConfig");

  double lo = user.x_m - cfg.window_halfwidth_m;
  double hi = user.x_m + cfg.window_halfwidth_m;
  if (cfg.full_span) {
    lo = -params.region_side_m / 2.0;
    hi = params.region_side_m / 2.0;
  }
  const auto points = static_cast<std::size_t>(std::floor((hi - lo) / cfg.step_m + 1e-9)) + 1;
  const auto min_gap =
      static_cast<std::size_t>(std::ceil(params.min_spacing_m / cfg.step_m - 1e-9));
  const std::size_t span = min_gap * static_cast<std::size_t>(count - 1);
  if (points <= span) throw std::invalid_argument("exhaustive_search: window narrower than the array");

  std::vector<double> grid(points);
  std::vector<ComplexGain> coeff(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = lo + static_cast<double>(k) * cfg.step_m;
    coeff[k] = pinching_coefficient(user, grid[k], params);
  }

  struct Best {
    double value = -1.0;
    std::size_t idx[3] = {0, 0, 0};
  };
  const std::size_t first_count = points - span;
  std::vector<Best> per_first(first_count);

  parallel_for(first_count, cfg.threads, [&](std::size_t i) {
    Best best;
    if (count == 1) {
      best.value = std::norm(coeff[i]);
      best.idx[0] = i;
    } else if (count == 2) {
      for (std::size_t j = i + min_gap; j < points; ++j) {
        const double v = std::norm(coeff[i] + coeff[j]);
        if (v > best.value) best = {v, {i, j, 0}};
      }
    } else {
      for (std::size_t j = i + min_gap; j + min_gap < points; ++j) {
        const ComplexGain partial = coeff[i] + coeff[j];
        for (std::size_t l = j + min_gap; l < points; ++l) {
          const double v = std::norm(partial + coeff[l]);
          if (v > best.value) best = {v, {i, j, l}};
        }
      }
    }
    per_first[i] = best;
  });

  Best best;
  for (const auto& b : per_first)
    if (b.value > best.value) best = b;

  OracleResult result;
  result.layout.height_m = params.waveguide_height_m;
  for (int n = 0; n < count; ++n) result.layout.antenna_x.push_back(grid[best.idx[n]]);
  result.report = pinching_rate(user, result.layout, params);
  return result;
}

}  // namespace pinchwave
