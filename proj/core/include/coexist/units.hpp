#pragma once

namespace coexist {

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

double db_to_linear(double db);
double linear_to_db(double ratio);

inline constexpr double hz_to_mhz(double hz) { return hz * 1e-6; }
inline constexpr double mhz_to_hz(double mhz) { return mhz * 1e6; }

}  // namespace coexist
