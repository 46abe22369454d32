#pragma once

// Geometry, channel and rate model of a single-waveguide pinching-antenna
// downlink and of a conventional fixed-position array.
//
// Coordinates: the user sits on the ground plane at (x_m, y_m, 0). The
// waveguide runs parallel to the x-axis at height d, directly above y = 0,
// and is fed at (feed_x, 0, d). All quantities are SI and linear scale.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinchwave/units.hpp"

namespace pinchwave {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Channel amplitude of one antenna or of a sum of antennas.
using ComplexGain = std::complex<double>;

/// Carrier, noise and geometry constants of one scenario.
struct SystemParams {
  double carrier_frequency_hz = 28e9;
  double noise_power_w = 1e-12;
  double waveguide_height_m = 3.0;
  double min_spacing_m = 0.0;  // set by make_default() to half a wavelength
  double region_side_m = 10.0;
  double refractive_index = 1.4;
  double total_power_w = 1.0;
  double feed_x_m = -6.0;
  int num_antennas = 1;

  /// Free-space wavelength c / f_c.
  double wavelength() const { return kSpeedOfLight / carrier_frequency_hz; }

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(what);
    };
    require(std::isfinite(carrier_frequency_hz) && carrier_frequency_hz > 0,
            "carrier_frequency_hz must be positive");
    require(std::isfinite(noise_power_w) && noise_power_w > 0, "noise_power_w must be positive");
    require(std::isfinite(waveguide_height_m) && waveguide_height_m > 0,
            "waveguide_height_m must be positive");
    require(std::isfinite(min_spacing_m) && min_spacing_m > 0, "min_spacing_m must be positive");
    require(std::isfinite(region_side_m) && region_side_m > 0, "region_side_m must be positive");
    require(std::isfinite(refractive_index) && refractive_index >= 1.0,
            "refractive_index must be at least 1");
    require(std::isfinite(total_power_w) && total_power_w >= 0,
            "total_power_w must be non-negative");
    require(std::isfinite(feed_x_m), "feed_x_m must be finite");
    require(num_antennas >= 1, "num_antennas must be at least 1");
  }

  /// The default simulation profile: 28 GHz, -90 dBm noise, d = 3 m,
  /// spacing λ/2, n_eff = 1.4, 30 dBm transmit power, D = 10 m and the feed
  /// one meter beyond the left edge of the region.
  static SystemParams make_default(int num_antennas = 1, double region_side_m = 10.0) {
    SystemParams p;
    p.num_antennas = num_antennas;
    p.region_side_m = region_side_m;
    p.noise_power_w = dbm_to_watts(-90.0);
    p.total_power_w = dbm_to_watts(30.0);
    p.min_spacing_m = p.wavelength() / 2.0;
    p.feed_x_m = default_feed_x(region_side_m);
    p.validate();
    return p;
  }

  static double default_feed_x(double region_side_m) { return -region_side_m / 2.0 - 1.0; }
};

struct UserPosition {
  double x_m = 0.0;
  double y_m = 0.0;
};

/// Antenna x-coordinates along the waveguide, left to right.
struct WaveguideLayout {
  std::vector<double> antenna_x;
  double height_m = 0.0;

  static constexpr double kSpacingTolerance = 1e-12;

  std::size_t size() const { return antenna_x.size(); }

  /// Strictly increasing with every gap at least min_spacing (up to 1e-12 m).
  bool is_feasible(double min_spacing) const {
    for (std::size_t n = 1; n < antenna_x.size(); ++n) {
      const double gap = antenna_x[n] - antenna_x[n - 1];
      if (!(gap > 0.0) || gap < min_spacing - kSpacingTolerance) return false;
    }
    return true;
  }
};

/// An antenna location in 3-D, used by the fixed and movable arrays.
struct AntennaPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Rate of one evaluated scenario. rate_bits = log2(1 + snr_linear).
struct RateReport {
  double rate_bits = 0.0;
  double snr_linear = 0.0;
  std::vector<double> per_antenna_distance_m;
  std::vector<double> per_antenna_phase_rad;  // unreduced, empty for arrays

  static RateReport from_snr(double snr) {
    RateReport r;
    r.snr_linear = snr;
    r.rate_bits = std::log2(1.0 + snr);
    return r;
  }
};

/// Free-space path loss constant η = c² / (16 π² f_c²), in m².
inline double eta(const SystemParams& params) {
  const double f = params.carrier_frequency_hz;
  return kSpeedOfLight * kSpeedOfLight / (16.0 * std::numbers::pi * std::numbers::pi * f * f);
}

/// Wavelength inside the dielectric, λ / n_eff.
inline double guided_wavelength(const SystemParams& params) {
  return params.wavelength() / params.refractive_index;
}

/// C = y_m² + d², the squared distance from the user to the waveguide line.
inline double lateral_offset_sq(const UserPosition& user, const SystemParams& params) {
  const double d = params.waveguide_height_m;
  return user.y_m * user.y_m + d * d;
}

inline double distance_to_user(const UserPosition& user, double antenna_x,
                               const SystemParams& params) {
  const double dx = antenna_x - user.x_m;
  return std::sqrt(dx * dx + lateral_offset_sq(user, params));
}

inline double distance_to_user(const UserPosition& user, const AntennaPoint& antenna) {
  const double dx = antenna.x - user.x_m;
  const double dy = antenna.y - user.y_m;
  return std::sqrt(dx * dx + dy * dy + antenna.z * antenna.z);
}

/// Total phase φ = (2π/λ)·r + (2π/λ_g)·|feed_x − x|, not reduced mod 2π.
inline double total_phase(const UserPosition& user, double antenna_x, const SystemParams& params) {
  const double r = distance_to_user(user, antenna_x, params);
  const double in_guide = std::abs(params.feed_x_m - antenna_x);
  return kTwoPi * r / params.wavelength() + kTwoPi * in_guide / guided_wavelength(params);
}

/// Channel coefficient of one pinching antenna: √η/r · e^{−jφ}.
inline ComplexGain pinching_coefficient(const UserPosition& user, double antenna_x,
                                        const SystemParams& params) {
  const double r = distance_to_user(user, antenna_x, params);
  return std::polar(std::sqrt(eta(params)) / r, -total_phase(user, antenna_x, params));
}

/// Sum of the per-antenna coefficients of a layout.
inline ComplexGain effective_gain(const UserPosition& user, const WaveguideLayout& layout,
                                  const SystemParams& params) {
  ComplexGain sum{0.0, 0.0};
  for (double x : layout.antenna_x) sum += pinching_coefficient(user, x, params);
  return sum;
}

/// Pinching-antenna rate with the power split evenly over the N antennas of
/// the layout: snr = |Σh|² P / (N σ²).
inline RateReport pinching_rate(const UserPosition& user, const WaveguideLayout& layout,
                                const SystemParams& params) {
  const auto n = static_cast<double>(layout.size());
  const double gain_sq = std::norm(effective_gain(user, layout, params));
  RateReport report =
      RateReport::from_snr(n > 0 ? gain_sq * params.total_power_w / (n * params.noise_power_w) : 0.0);
  report.per_antenna_distance_m.reserve(layout.size());
  report.per_antenna_phase_rad.reserve(layout.size());
  for (double x : layout.antenna_x) {
    report.per_antenna_distance_m.push_back(distance_to_user(user, x, params));
    report.per_antenna_phase_rad.push_back(total_phase(user, x, params));
  }
  return report;
}

/// Spherical-wave channel of a fixed array: √η e^{−j2πr/λ} / r per element.
inline std::vector<ComplexGain> conventional_channel(const UserPosition& user,
                                                     std::span<const AntennaPoint> antennas,
                                                     const SystemParams& params) {
  if (antennas.empty()) throw std::invalid_argument("conventional_channel: no antennas");
  const double amp = std::sqrt(eta(params));
  const double k = kTwoPi / params.wavelength();
  std::vector<ComplexGain> h;
  h.reserve(antennas.size());
  for (const auto& a : antennas) {
    const double r = distance_to_user(user, a);
    h.push_back(std::polar(amp / r, -k * r));
  }
  return h;
}

/// Conventional rate with full power P: snr = P‖h‖² / σ².
inline RateReport conventional_rate(std::span<const ComplexGain> channel,
                                    const SystemParams& params) {
  if (channel.empty()) throw std::invalid_argument("conventional_rate: empty channel");
  double norm_sq = 0.0;
  for (const auto& h : channel) norm_sq += std::norm(h);
  return RateReport::from_snr(params.total_power_w * norm_sq / params.noise_power_w);
}

}  // namespace pinchwave
