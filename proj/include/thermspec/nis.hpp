#pragma once

#include <span>
#include <utility>

namespace thermspec {

struct JunctionParams {
    double gap_eV = 0.0;            // superconducting gap, electron-volts
    double dynes = 0.0;             // subgap broadening parameter, in (0,1)
    double tunnel_resistance_ohm = 0.0; // one junction
};

/// A thermometer made of junction_count identical junctions in series,
/// carrying bias_current; junction holds per-junction parameters.
struct ThermometerConfig {
    JunctionParams junction;
    double bias_current_A = 0.0;
    int junction_count = 2;
};

/// V_th = a*T0 + b. The temperature range is populated by the fit; a
/// default-constructed fit places no range restriction.
struct CalibrationFit {
    double slope_V_per_K = 0.0;
    double intercept_V = 0.0;
    double t_min_K = 0.0;
    double t_max_K = 0.0; // 0 means unrestricted
    double rms_residual_V = 0.0;
    int n_points = 0;
};

/// Dynes DOS |Re[(E/Delta + i d)/sqrt((E/Delta + i d)^2 - 1)]|.
double bcs_dos(double energy_ratio, double dynes);

/// Quasiparticle tunnel current of one junction at voltage V and normal-metal
/// electron temperature T. Adaptive panel quadrature with subdivisions
/// anchored at the gap edges and the Fermi steps.
double qp_current(double voltage_V, double t_electron_K, const JunctionParams& j);

/// Total voltage across the series stack at fixed bias current (root of the
/// I-V curve, which is strictly increasing in V). t_electron in [20, 600] mK.
double thermometer_voltage(double t_electron_K, const ThermometerConfig& cfg);

/// Exact inverse of thermometer_voltage: the electron temperature whose I-V
/// curve passes through (bias_current, v_th). Monotone-decreasing V(T) makes
/// the root unique on [t_min, t_max].
double electron_temperature_from_voltage(double v_th, const ThermometerConfig& cfg,
                                         double t_min_K = 0.02, double t_max_K = 0.6);

/// Least-squares line through (T0, V_th) points. Requires at least two
/// points spanning more than 50 mK.
CalibrationFit linear_calibration_fit(std::span<const std::pair<double, double>> points);

/// T = (v_th - b)/a; range-checked when the fit carries a range.
double temperature_from_voltage(double v_th, const CalibrationFit& cal);

} // namespace thermspec
