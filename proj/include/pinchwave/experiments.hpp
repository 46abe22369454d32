#pragma once

// Monte Carlo estimation of ergodic rates over uniformly placed users.
//
// Trial t of a run seeded with s draws its user from its own generator,
// seeded from (s, t). Every system and every sweep point sees the same
// sequence of unit draws, so comparisons between them are paired.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pinchwave/baselines.hpp"
#include "pinchwave/core_model.hpp"
#include "pinchwave/parallel.hpp"
#include "pinchwave/placement.hpp"
#include "pinchwave/units.hpp"

namespace pinchwave {

inline constexpr std::string_view kRngAlgorithm = "mt19937_64+splitmix64-substream+u53";

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable generator with a platform-independent output sequence.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for trial `index` of a run seeded with `seed`.
  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// User uniform on the square [-D/2, D/2]².
inline UserPosition sample_user(Rng& rng, const SystemParams& params) {
  const double d = params.region_side_m;
  const double u = rng.uniform();
  const double v = rng.uniform();
  return {(u - 0.5) * d, (v - 0.5) * d};
}

enum class SystemKind { PinchingTwoStage, PinchingStage1Only, Conventional, Movable, PinchingOracle };
enum class SweepVariable { PowerDbm, SideLengthM, NumAntennas };

inline std::string_view to_string(SystemKind k) {
  switch (k) {
    case SystemKind::PinchingTwoStage: return "pinching_two_stage";
    case SystemKind::PinchingStage1Only: return "pinching_stage1_only";
    case SystemKind::Conventional: return "conventional";
    case SystemKind::Movable: return "movable";
    case SystemKind::PinchingOracle: return "pinching_oracle";
  }
  return "unknown";
}

inline std::string_view to_string(SweepVariable v) {
  switch (v) {
    case SweepVariable::PowerDbm: return "power_dbm";
    case SweepVariable::SideLengthM: return "side_length_m";
    case SweepVariable::NumAntennas: return "num_antennas";
  }
  return "unknown";
}

inline std::optional<SystemKind> parse_system(std::string_view s) {
  for (auto k : {SystemKind::PinchingTwoStage, SystemKind::PinchingStage1Only, SystemKind::Conventional,
                 SystemKind::Movable, SystemKind::PinchingOracle})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

inline std::optional<SweepVariable> parse_sweep_variable(std::string_view s) {
  for (auto v : {SweepVariable::PowerDbm, SweepVariable::SideLengthM, SweepVariable::NumAntennas})
    if (to_string(v) == s) return v;
  return std::nullopt;
}

struct ExperimentSpec {
  std::vector<SystemKind> systems{SystemKind::PinchingTwoStage};
  SweepVariable sweep_variable = SweepVariable::PowerDbm;
  std::vector<double> sweep_values{30.0};
  int trials = 10000;
  std::uint64_t rng_seed = 1;
  unsigned threads = 0;

  static constexpr int kDefaultOracleTrials = 200;

  /// Throws std::invalid_argument (CostGuardError for an oracle with N > 3).
  void validate(const SystemParams& params) const {
    if (systems.empty()) throw std::invalid_argument("no systems requested");
    if (sweep_values.empty()) throw std::invalid_argument("sweep_values must be nonempty");
    for (std::size_t i = 1; i < sweep_values.size(); ++i)
      if (!(sweep_values[i] > sweep_values[i - 1]))
        throw std::invalid_argument("sweep_values must be strictly increasing");
    if (trials < 1) throw std::invalid_argument("trials must be positive");
    for (auto k : systems) {
      if (k != SystemKind::PinchingOracle) continue;
      int max_n = params.num_antennas;
      if (sweep_variable == SweepVariable::NumAntennas)
        for (double v : sweep_values) max_n = std::max(max_n, static_cast<int>(std::lround(v)));
      if (max_n > OracleConfig::kMaxAntennas)
        throw CostGuardError("pinching_oracle requires at most 3 antennas");
    }
  }
};

/// Knobs shared by all systems during a run.
struct SolverConfig {
  std::optional<double> refinement_step_divisor;  // λ/K; default 200
  std::optional<double> oracle_step_divisor;      // λ/K; default 50
  std::optional<double> oracle_window_halfwidth_m;
  bool oracle_full_span = false;

  RefinementConfig refinement(const SystemParams& params) const {
    return RefinementConfig::with_step_divisor(params, refinement_step_divisor.value_or(200.0));
  }

  OracleConfig oracle(const SystemParams& params) const {
    OracleConfig cfg = OracleConfig::make_default(params);
    if (oracle_step_divisor) cfg.step_m = params.wavelength() / *oracle_step_divisor;
    if (oracle_window_halfwidth_m) cfg.window_halfwidth_m = *oracle_window_halfwidth_m;
    cfg.full_span = oracle_full_span;
    return cfg;
  }
};

/// Rate of one system for one user.
inline double system_rate(SystemKind kind, const UserPosition& user, const SystemParams& params,
                          const SolverConfig& solver = {}) {
  switch (kind) {
    case SystemKind::PinchingTwoStage:
      return two_stage_optimize(user, params, solver.refinement(params)).report.rate_bits;
    case SystemKind::PinchingStage1Only:
      return pinching_rate(user, stage1_placement(user, params).layout, params).rate_bits;
    case SystemKind::Conventional:
      return conventional_array_rate(user, params).rate_bits;
    case SystemKind::Movable:
      return movable_optimize(user, params).rate_bits;
    case SystemKind::PinchingOracle:
      return exhaustive_search(user, params, solver.oracle(params)).report.rate_bits;
  }
  throw std::logic_error("unhandled SystemKind");
}

struct RateEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  int trials = 0;
};

/// Mean and standard error (sample stddev / √trials) of the per-trial values.
inline RateEstimate summarize(std::span<const double> values) {
  RateEstimate est;
  est.trials = static_cast<int>(values.size());
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - est.mean) * (v - est.mean);
    const double n = static_cast<double>(values.size());
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

/// Per-trial rates of one system, in trial order.
inline std::vector<double> trial_rates(SystemKind kind, const SystemParams& params, int trials,
                                       std::uint64_t seed, const SolverConfig& solver = {},
                                       unsigned threads = 0) {
  std::vector<double> rates(static_cast<std::size_t>(trials));
  parallel_for(rates.size(), threads, [&](std::size_t t) {
    Rng rng = Rng::substream(seed, t);
    rates[t] = system_rate(kind, sample_user(rng, params), params, solver);
  });
  return rates;
}

inline RateEstimate ergodic_rate(SystemKind kind, const SystemParams& params, int trials,
                                 std::uint64_t seed, const SolverConfig& solver = {},
                                 unsigned threads = 0) {
  if (kind == SystemKind::PinchingOracle && params.num_antennas > OracleConfig::kMaxAntennas)
    throw CostGuardError("pinching_oracle requires at most 3 antennas");
  const auto rates = trial_rates(kind, params, trials, seed, solver, threads);
  return summarize(rates);
}

struct SweepRow {
  double sweep_value = 0.0;
  SystemKind system = SystemKind::PinchingTwoStage;
  RateEstimate estimate;
};

struct SweepResult {
  ExperimentSpec spec;
  SystemParams base_params;
  std::vector<SweepRow> rows;  // sweep value major, then systems in spec order

  const SweepRow* find(double sweep_value, SystemKind system) const {
    for (const auto& r : rows)
      if (r.sweep_value == sweep_value && r.system == system) return &r;
    return nullptr;
  }
};

/// Applies one sweep value to a copy of the base parameters. A side-length
/// sweep also moves the feed point when it sits at its default location.
inline SystemParams apply_sweep_value(SystemParams params, SweepVariable variable, double value) {
  switch (variable) {
    case SweepVariable::PowerDbm:
      params.total_power_w = dbm_to_watts(value);
      break;
    case SweepVariable::SideLengthM:
      if (params.feed_x_m == SystemParams::default_feed_x(params.region_side_m))
        params.feed_x_m = SystemParams::default_feed_x(value);
      params.region_side_m = value;
      break;
    case SweepVariable::NumAntennas:
      params.num_antennas = static_cast<int>(std::lround(value));
      break;
  }
  params.validate();
  return params;
}

inline SweepResult run_sweep(const ExperimentSpec& spec, const SystemParams& params,
                             const SolverConfig& solver = {}) {
  spec.validate(params);
  SweepResult result;
  result.spec = spec;
  result.base_params = params;
  for (double value : spec.sweep_values) {
    const SystemParams point = apply_sweep_value(params, spec.sweep_variable, value);
    for (SystemKind kind : spec.systems) {
      result.rows.push_back(
          {value, kind, ergodic_rate(kind, point, spec.trials, spec.rng_seed, solver, spec.threads)});
    }
  }
  return result;
}

}  // namespace pinchwave
