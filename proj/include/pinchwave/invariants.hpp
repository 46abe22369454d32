#pragma once

// Executable checks of the structural results behind the placement
// algorithm. Each check draws its scenarios from Rng::substream(seed, case)
// so a failure can be replayed from the reported seed and case index.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "pinchwave/experiments.hpp"
#include "pinchwave/placement.hpp"

namespace pinchwave::invariants {

struct CheckResult {
  std::string name;
  bool passed = true;
  int cases = 0;
  std::string detail;  // first failure, empty on success
};

struct Scenario {
  UserPosition user;
  SystemParams params;
};

/// `base` with N antennas, a user uniform on the region, a height in
/// [0.5, 10] m and a spacing between λ/2 and 50λ (log-uniform). Redraws
/// until C >= (N-1)²Δ².
inline Scenario random_scenario(Rng& rng, int num_antennas, const SystemParams& base) {
  Scenario s;
  s.params = base;
  s.params.num_antennas = num_antennas;
  for (;;) {
    s.params.waveguide_height_m = 0.5 + 9.5 * rng.uniform();
    s.params.min_spacing_m = s.params.wavelength() / 2.0 * std::pow(10.0, 2.0 * rng.uniform());
    s.user = sample_user(rng, s.params);
    if (unimodality_condition(s.user, s.params)) return s;
  }
}

inline std::string describe(std::uint64_t seed, int index, const Scenario& s) {
  std::ostringstream os;
  os << "seed=" << seed << " case=" << index << " N=" << s.params.num_antennas
     << " user=(" << s.user.x_m << "," << s.user.y_m << ") d=" << s.params.waveguide_height_m
     << " spacing=" << s.params.min_spacing_m;
  return os.str();
}

/// Exhaustive maximization of Σ 1/r over grid layouts with spacing >= Δ.
/// Grid step Δ/50 over x_m ± 3NΔ; N must be 2 or 3. Returns grid indices.
inline std::vector<std::size_t> grid_best_layout(const Scenario& s, double& step_out,
                                                 std::vector<double>& grid_out) {
  const auto& p = s.params;
  const int count = p.num_antennas;
  const double step = p.min_spacing_m / 50.0;
  const double lo = s.user.x_m - 3.0 * count * p.min_spacing_m;
  const std::size_t points = static_cast<std::size_t>(6 * count * 50) + 1;
  const std::size_t gap = 50;
  std::vector<double> inv_r(points);
  grid_out.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid_out[k] = lo + static_cast<double>(k) * step;
    inv_r[k] = 1.0 / distance_to_user(s.user, grid_out[k], p);
  }
  step_out = step;

  double best = -1.0;
  std::vector<std::size_t> arg;
  if (count == 2) {
    for (std::size_t i = 0; i + gap < points; ++i)
      for (std::size_t j = i + gap; j < points; ++j)
        if (const double v = inv_r[i] + inv_r[j]; v > best) {
          best = v;
          arg = {i, j};
        }
  } else {
    for (std::size_t i = 0; i + 2 * gap < points; ++i)
      for (std::size_t j = i + gap; j + gap < points; ++j) {
        const double partial = inv_r[i] + inv_r[j];
        for (std::size_t l = j + gap; l < points; ++l)
          if (const double v = partial + inv_r[l]; v > best) {
            best = v;
            arg = {i, j, l};
          }
      }
  }
  return arg;
}

/// The grid maximizer of Σ 1/r packs consecutive antennas at Δ (within one
/// grid step), for N = 2 and N = 3.
inline CheckResult check_equal_spacing(std::uint64_t seed, int cases,
                                       const SystemParams& base = SystemParams::make_default()) {
  CheckResult res{"equal spacing is optimal for the path-loss objective", true, cases, {}};
  for (int c = 0; c < cases; ++c) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
    const Scenario s = random_scenario(rng, 2 + c % 2, base);
    double step = 0.0;
    std::vector<double> grid;
    const auto idx = grid_best_layout(s, step, grid);
    for (std::size_t n = 1; n < idx.size(); ++n) {
      const double spacing = grid[idx[n]] - grid[idx[n - 1]];
      if (std::abs(spacing - s.params.min_spacing_m) > step * (1.0 + 1e-9)) {
        res.passed = false;
        std::ostringstream os;
        os << describe(seed, c, s) << " grid spacing " << spacing;
        res.detail = os.str();
        return res;
      }
    }
  }
  return res;
}

/// Central difference of g at the closed-form first-antenna position.
inline double stationarity_residual(const Scenario& s) {
  const auto& p = s.params;
  const double x1 = stage1_placement(s.user, p).layout.antenna_x.front();
  const double h = p.min_spacing_m / 100.0;
  return (reciprocal_distance_sum(x1 + h, s.user, p) - reciprocal_distance_sum(x1 - h, s.user, p)) /
         (2.0 * h);
}

inline int scenario_antennas(int c) { return 2 + c % 7; }

/// |g'(x̃₁*)| < 1e-9 · g(x̃₁*) / Δ, N in 2..8.
inline CheckResult check_stationarity(std::uint64_t seed, int cases,
                                      const SystemParams& base = SystemParams::make_default()) {
  CheckResult res{"closed-form first antenna is a stationary point", true, cases, {}};
  for (int c = 0; c < cases; ++c) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
    const Scenario s = random_scenario(rng, scenario_antennas(c), base);
    const double x1 = stage1_placement(s.user, s.params).layout.antenna_x.front();
    const double bound = 1e-9 * reciprocal_distance_sum(x1, s.user, s.params) / s.params.min_spacing_m;
    const double residual = stationarity_residual(s);
    if (!(std::abs(residual) < bound)) {
      res.passed = false;
      std::ostringstream os;
      os << describe(seed, c, s) << " |g'|=" << std::abs(residual) << " bound=" << bound;
      res.detail = os.str();
      return res;
    }
  }
  return res;
}

/// Sign pattern of the finite-difference derivative over the scan window.
struct SignScan {
  int sign_changes = 0;
  bool positive_left = true;   // every nonzero sign left of x̃₁* is +
  bool negative_right = true;  // every nonzero sign right of x̃₁* is -
};

inline SignScan scan_derivative_signs(const Scenario& s) {
  const auto& p = s.params;
  const int count = p.num_antennas;
  const double spacing = p.min_spacing_m;
  const double x_star = stage1_placement(s.user, p).layout.antenna_x.front();
  const double step = spacing / 100.0;
  const double h = step;
  const double dead_band = 1e-9 * reciprocal_distance_sum(x_star, s.user, p) / spacing;
  const long points = 600L * count;

  SignScan scan;
  int last = 0;
  for (long k = 0; k <= points; ++k) {
    const double x = s.user.x_m - 3.0 * count * spacing + static_cast<double>(k) * step;
    const double d = (reciprocal_distance_sum(x + h, s.user, p) - reciprocal_distance_sum(x - h, s.user, p)) /
                     (2.0 * h);
    const int sign = std::abs(d) <= dead_band ? 0 : (d > 0 ? 1 : -1);
    if (sign == 0) continue;
    if (x < x_star && sign < 0) scan.positive_left = false;
    if (x > x_star && sign > 0) scan.negative_right = false;
    if (last != 0 && sign != last) ++scan.sign_changes;
    last = sign;
  }
  return scan;
}

/// g' changes sign exactly once over x_m ± 3NΔ (step Δ/100), from + to -.
inline CheckResult check_unimodality(std::uint64_t seed, int cases,
                                     const SystemParams& base = SystemParams::make_default()) {
  CheckResult res{"path-loss objective is unimodal in the first antenna position", true, cases, {}};
  for (int c = 0; c < cases; ++c) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
    const Scenario s = random_scenario(rng, scenario_antennas(c), base);
    const SignScan scan = scan_derivative_signs(s);
    if (scan.sign_changes != 1 || !scan.positive_left || !scan.negative_right) {
      res.passed = false;
      std::ostringstream os;
      os << describe(seed, c, s) << " sign changes=" << scan.sign_changes;
      res.detail = os.str();
      return res;
    }
  }
  return res;
}

/// g'(x̃₁* + t) = -g'(x̃₁* - t) within 1e-9 relative.
inline CheckResult check_derivative_antisymmetry(std::uint64_t seed, int cases,
                                                 const SystemParams& base = SystemParams::make_default()) {
  CheckResult res{"derivative is antisymmetric about the closed-form optimum", true, cases, {}};
  for (int c = 0; c < cases; ++c) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
    const Scenario s = random_scenario(rng, scenario_antennas(c), base);
    const double x_star = stage1_placement(s.user, s.params).layout.antenna_x.front();
    const double t = (rng.uniform() * 6.0 - 3.0) * s.params.num_antennas * s.params.min_spacing_m;
    const double right = reciprocal_distance_sum_derivative(x_star + t, s.user, s.params);
    const double left = reciprocal_distance_sum_derivative(x_star - t, s.user, s.params);
    const double scale = std::max(std::abs(right), std::abs(left));
    if (std::abs(right + left) > 1e-9 * scale + 1e-300) {
      res.passed = false;
      std::ostringstream os;
      os << describe(seed, c, s) << " t=" << t << " g'(+t)=" << right << " g'(-t)=" << left;
      res.detail = os.str();
      return res;
    }
  }
  return res;
}

/// Stage 2 at step λ/200 on `base`, N in 1..16: layout stays
/// ordered with spacing >= Δ and every neighboring phase gap is within
/// 2π·step·(1/λ + 1/λ_g) + 1e-9.
inline CheckResult check_refinement_alignment(std::uint64_t seed, int cases,
                                              const SystemParams& base = SystemParams::make_default()) {
  CheckResult res{"refined layout is feasible and phase aligned", true, cases, {}};
  for (int c = 0; c < cases; ++c) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(c));
    Scenario s;
    s.params = base;
    s.params.num_antennas = 1 + c % 16;
    s.user = sample_user(rng, s.params);
    const RefinementConfig cfg = RefinementConfig::make_default(s.params);
    const WaveguideLayout refined = stage2_refine(stage1_placement(s.user, s.params), s.user, s.params, cfg);
    const double gap = max_consecutive_phase_gap(refined, s.user, s.params);
    const double bound = refinement_gap_bound(s.params, cfg.search_step_m) + 1e-9;
    if (!refined.is_feasible(s.params.min_spacing_m) || gap > bound) {
      res.passed = false;
      std::ostringstream os;
      os << describe(seed, c, s) << " max gap=" << gap << " bound=" << bound
         << " feasible=" << refined.is_feasible(s.params.min_spacing_m);
      res.detail = os.str();
      return res;
    }
  }
  return res;
}

struct SuiteSizes {
  int equal_spacing = 20;
  int stationarity = 50;
  int unimodality = 50;
  int antisymmetry = 50;
  int refinement = 1000;

  static SuiteSizes uniform(int cases) { return {cases, cases, cases, cases, cases}; }
};

inline std::vector<CheckResult> run_all(std::uint64_t seed, const SuiteSizes& sizes = {},
                                        const SystemParams& base = SystemParams::make_default()) {
  return {check_equal_spacing(seed, sizes.equal_spacing, base),
          check_stationarity(seed, sizes.stationarity, base),
          check_unimodality(seed, sizes.unimodality, base),
          check_derivative_antisymmetry(seed, sizes.antisymmetry, base),
          check_refinement_alignment(seed, sizes.refinement, base)};
}

}  // namespace pinchwave::invariants
