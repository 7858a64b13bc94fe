#pragma once

#include <numbers>

namespace thermspec {

/// CODATA-2018 values (h, k_B, e are exact in the 2019 SI).
struct PhysicalConstants {
    double planck_J_s;
    double reduced_planck_J_s;
    double boltzmann_J_per_K;
    double electron_charge_C;
};

inline constexpr PhysicalConstants constants{
    6.62607015e-34,
    6.62607015e-34 / (2.0 * std::numbers::pi),
    1.380649e-23,
    1.602176634e-19,
};

/// 1e-3 * 10^(p_dbm/10). Throws std::domain_error on non-finite input.
double dbm_to_watts(double p_dbm);

/// Inverse of dbm_to_watts. Requires p > 0.
double watts_to_dbm(double p_watt);

/// Bose-Einstein occupation 1/(exp(hf/kT) - 1). Returns 0 at t = 0.
double bose_einstein(double f_hz, double t_kelvin);

} // namespace thermspec
