#pragma once

namespace thermspec {

struct BolometerBody {
    double sigma_ep_W_per_K5_m3 = 0.0;  // electron-phonon coupling constant
    double volume_m3 = 0.0;
    double parasitic_power_W = 0.0;     // constant background heating
    double heat_capacity_const = 71.0;  // J K^-2 m^-3 (Cu)
    double wire_inductance_H = 0.0;
    double absorber_resistance_ohm = 0.0;
};

struct ThermalOperatingPoint {
    double t_electron_K = 0.0; // absorber electrons
    double t_phonon_K = 0.0;   // bath
};

struct PhotonNumber {
    double simplified = 0.0;         // P_b Q_b / (2 pi h f0^2)
    double full = 0.0;               // simplified + thermal occupation
    double thermal_occupation = 0.0; // Bose-Einstein at (f0, T_b)
};

struct FiguresOfMerit {
    double g_th_at_tb_W_per_K = 0.0;     // 5 Sigma Omega T_b^4
    double g_th_at_t0_W_per_K = 0.0;     // 5 Sigma Omega T0^4
    double nep_thermal_W_per_sqrtHz = 0.0; // sqrt(4 kB T_b^2 G_th(T_b))
    double heat_capacity_J_per_K = 0.0;  // at T_b
    double relaxation_time_s = 0.0;      // C_h(T_b) / G_th(T0)
    double cutoff_hz = 0.0;              // R_b / (2 pi L_b)
    double single_photon_power_W = 0.0;  // 2 pi h f0^2 / Q_b
    double thermal_occupation = 0.0;     // at (f0, T_b)
};

/// Signal power P_b = Sigma*Omega*(T_b^5 - T0^5) - P_e. May be negative
/// when the operating point sits below the parasitic background.
double electron_phonon_power(const ThermalOperatingPoint& op, const BolometerBody& body);

/// Exact inverse: T_b = (T0^5 + (p_b + P_e)/(Sigma*Omega))^(1/5).
double temperature_from_power(double p_b_watt, double t0_kelvin, const BolometerBody& body);

/// Small-signal form 5*Sigma*Omega*T0^4*dT (parasitic power ignored).
double linearized_power(double delta_t_kelvin, double t0_kelvin, const BolometerBody& body);

/// Photon number from peak absorbed power; both the simplified and the
/// thermally corrected value are reported.
PhotonNumber photon_number(double p_b_peak_watt, double q_bolometer, double f0_hz,
                           double t_bolometer_K);

/// Detector figures of merit. Temperature conventions: the thermal-
/// fluctuation NEP uses G_th at t_b; the relaxation time pairs C_h(t_b)
/// with G_th(t0). Both conductances are reported.
FiguresOfMerit figures_of_merit(const BolometerBody& body, double t_b_kelvin,
                                double t0_kelvin, double q_bolometer, double f0_hz);

} // namespace thermspec
