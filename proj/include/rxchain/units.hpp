#pragma once

#include <cmath>
#include <limits>

namespace rxchain {

inline constexpr double boltzmann_j_per_k = 1.380649e-23;
inline constexpr double zero_celsius_k = 273.15;
inline constexpr double standard_noise_temp_k = 290.0;
inline constexpr double reference_temp_degc = 25.0;
inline constexpr double reference_impedance_ohm = 50.0;

/// Power ratio from decibels.
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_mw(double dbm) { return db_to_lin(dbm); }
inline double mw_to_dbm(double mw) { return lin_to_db(mw); }

inline double dbm_to_watts(double dbm) { return db_to_lin(dbm) * 1e-3; }
inline double watts_to_dbm(double w) { return lin_to_db(w * 1e3); }

/// Peak voltage of a sinusoid delivering `dbm` into `ohms` (P = A^2 / 2R).
inline double dbm_to_peak_volts(double dbm, double ohms = reference_impedance_ohm) {
    return std::sqrt(2.0 * ohms * dbm_to_watts(dbm));
}

inline double peak_volts_to_dbm(double volts, double ohms = reference_impedance_ohm) {
    return watts_to_dbm(volts * volts / (2.0 * ohms));
}

inline double celsius_to_kelvin(double degc) { return degc + zero_celsius_k; }

}  // namespace rxchain
