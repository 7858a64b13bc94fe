#include "thermspec/thermal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "thermspec/units.hpp"

namespace thermspec {

namespace {

double pow5(double x) {
    const double x2 = x * x;
    return x2 * x2 * x;
}

void check_body(const BolometerBody& b) {
    if (!(b.sigma_ep_W_per_K5_m3 > 0.0) || !(b.volume_m3 > 0.0))
        throw std::invalid_argument("BolometerBody: Sigma and volume must be positive");
    if (b.parasitic_power_W < 0.0)
        throw std::invalid_argument("BolometerBody: parasitic power must be >= 0");
    if (!(b.heat_capacity_const > 0.0))
        throw std::invalid_argument("BolometerBody: heat capacity constant must be positive");
}

} // namespace

double electron_phonon_power(const ThermalOperatingPoint& op, const BolometerBody& body) {
    check_body(body);
    if (!(op.t_electron_K > 0.0) || !(op.t_phonon_K > 0.0))
        throw std::invalid_argument("ThermalOperatingPoint: temperatures must be positive");
    const double so = body.sigma_ep_W_per_K5_m3 * body.volume_m3;
    return so * (pow5(op.t_electron_K) - pow5(op.t_phonon_K)) - body.parasitic_power_W;
}

double temperature_from_power(double p_b_watt, double t0_kelvin, const BolometerBody& body) {
    check_body(body);
    if (!(t0_kelvin > 0.0))
        throw std::invalid_argument("temperature_from_power: bath temperature must be positive");
    const double so = body.sigma_ep_W_per_K5_m3 * body.volume_m3;
    const double t5 = pow5(t0_kelvin) + (p_b_watt + body.parasitic_power_W) / so;
    if (!(t5 > 0.0))
        throw std::domain_error(
            "temperature_from_power: total power drives T_b^5 non-positive");
    return std::pow(t5, 0.2);
}

double linearized_power(double delta_t_kelvin, double t0_kelvin, const BolometerBody& body) {
    check_body(body);
    if (!(t0_kelvin > 0.0))
        throw std::invalid_argument("linearized_power: bath temperature must be positive");
    const double t2 = t0_kelvin * t0_kelvin;
    return 5.0 * body.sigma_ep_W_per_K5_m3 * body.volume_m3 * t2 * t2 * delta_t_kelvin;
}

PhotonNumber photon_number(double p_b_peak_watt, double q_bolometer, double f0_hz,
                           double t_bolometer_K) {
    if (!(q_bolometer > 0.0) || !(f0_hz > 0.0) || !(t_bolometer_K > 0.0))
        throw std::invalid_argument("photon_number: q_b, f0 and T_b must be positive");
    PhotonNumber n;
    n.simplified = p_b_peak_watt * q_bolometer /
                   (2.0 * std::numbers::pi * constants.planck_J_s * f0_hz * f0_hz);
    n.thermal_occupation = bose_einstein(f0_hz, t_bolometer_K);
    n.full = n.simplified + n.thermal_occupation;
    return n;
}

FiguresOfMerit figures_of_merit(const BolometerBody& body, double t_b_kelvin,
                                double t0_kelvin, double q_bolometer, double f0_hz) {
    check_body(body);
    if (!(t_b_kelvin > 0.0) || !(t0_kelvin > 0.0) || !(q_bolometer > 0.0) || !(f0_hz > 0.0))
        throw std::invalid_argument("figures_of_merit: all inputs must be positive");
    if (!(body.wire_inductance_H > 0.0) || !(body.absorber_resistance_ohm > 0.0))
        throw std::invalid_argument("figures_of_merit: wire inductance and absorber "
                                    "resistance must be positive");
    const double so = body.sigma_ep_W_per_K5_m3 * body.volume_m3;
    const auto g_th = [so](double t) {
        const double t2 = t * t;
        return 5.0 * so * t2 * t2;
    };
    FiguresOfMerit fom;
    fom.g_th_at_tb_W_per_K = g_th(t_b_kelvin);
    fom.g_th_at_t0_W_per_K = g_th(t0_kelvin);
    fom.nep_thermal_W_per_sqrtHz = std::sqrt(4.0 * constants.boltzmann_J_per_K *
                                             t_b_kelvin * t_b_kelvin * fom.g_th_at_tb_W_per_K);
    fom.heat_capacity_J_per_K = body.heat_capacity_const * body.volume_m3 * t_b_kelvin;
    fom.relaxation_time_s = fom.heat_capacity_J_per_K / fom.g_th_at_t0_W_per_K;
    fom.cutoff_hz = body.absorber_resistance_ohm /
                    (2.0 * std::numbers::pi * body.wire_inductance_H);
    fom.single_photon_power_W =
        2.0 * std::numbers::pi * constants.planck_J_s * f0_hz * f0_hz / q_bolometer;
    fom.thermal_occupation = bose_einstein(f0_hz, t_b_kelvin);
    return fom;
}

} // namespace thermspec
