#pragma once

#include <cmath>

namespace pinchwave {

// Power conversions used only at the CLI boundary; the library works in watts.
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

inline double ghz_to_hz(double ghz) { return ghz * 1e9; }
inline double hz_to_ghz(double hz) { return hz / 1e9; }

}  // namespace pinchwave
