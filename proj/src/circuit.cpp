#include "thermspec/circuit.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace thermspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_resonator(const QuarterWaveResonator& r) {
    if (!(r.z0_ohm > 0.0))
        throw std::invalid_argument("QuarterWaveResonator: z0 must be positive");
    if (!(r.f_mode_hz > 0.0))
        throw std::invalid_argument("QuarterWaveResonator: f_mode must be positive");
    if (r.attenuation_length_product && r.internal_q_override)
        throw std::invalid_argument(
            "QuarterWaveResonator: set at most one of alpha*l and the Q_i override");
    if (r.attenuation_length_product && !(*r.attenuation_length_product > 0.0))
        throw std::invalid_argument("QuarterWaveResonator: alpha*l must be positive");
    if (r.internal_q_override && !(*r.internal_q_override > 0.0))
        throw std::invalid_argument("QuarterWaveResonator: Q_i override must be positive");
}

void check_assembly(const CircuitAssembly& a) {
    if (!(a.resonator.inductance_H > 0.0) || !(a.resonator.capacitance_F > 0.0))
        throw std::invalid_argument("CircuitAssembly: L and C must be positive");
    if (!(a.resonator.resistance_ohm > 0.0)) // +inf passes
        throw std::invalid_argument("CircuitAssembly: R must be positive or infinite");
    if (!(a.feedline_port.series_capacitance_F > 0.0) ||
        !(a.bolometer_port.series_capacitance_F > 0.0))
        throw std::invalid_argument("CircuitAssembly: coupling capacitances must be positive");
    if (!(a.feedline_port.termination_resistance_ohm > 0.0) ||
        !(a.bolometer_port.termination_resistance_ohm > 0.0))
        throw std::invalid_argument("CircuitAssembly: terminations must be positive");
    if (!(a.line_impedance_ohm > 0.0))
        throw std::invalid_argument("CircuitAssembly: line impedance must be positive");
    const double expected = 0.5 * a.line_impedance_ohm;
    if (std::fabs(a.feedline_port.termination_resistance_ohm - expected) > 1e-9 * expected)
        throw std::invalid_argument(
            "CircuitAssembly: feedline termination must be Z0/2 (two line halves in parallel)");
}

struct LoadedPoint {
    double omega0p; // shifted resonance, rad/s
    double c_total;
    NortonEquivalent feed, bolo;
};

LoadedPoint loaded_point(const CircuitAssembly& a) {
    const double w0 = 1.0 / std::sqrt(a.resonator.inductance_H * a.resonator.capacitance_F);
    const NortonEquivalent nf = norton_equivalent(a.feedline_port, w0);
    const NortonEquivalent nb = norton_equivalent(a.bolometer_port, w0);
    const double ct = a.resonator.capacitance_F + nf.c_eff_F + nb.c_eff_F;
    const double w0p = 1.0 / std::sqrt(a.resonator.inductance_H * ct);
    // Re-evaluate the port equivalents where the loaded circuit actually
    // resonates; C_t itself stays pinned at the bare-frequency definition.
    return {w0p, ct, norton_equivalent(a.feedline_port, w0p),
            norton_equivalent(a.bolometer_port, w0p)};
}

} // namespace

LumpedResonator lumped_from_quarter_wave(const QuarterWaveResonator& r) {
    check_resonator(r);
    LumpedResonator out;
    out.capacitance_F = 1.0 / (8.0 * r.z0_ohm * r.f_mode_hz);
    out.inductance_H = 2.0 * r.z0_ohm / (kPi * kPi * r.f_mode_hz);
    if (r.attenuation_length_product) {
        out.resistance_ohm = r.z0_ohm / *r.attenuation_length_product;
    } else if (r.internal_q_override) {
        const double w0 = 2.0 * kPi * r.f_mode_hz;
        out.resistance_ohm = *r.internal_q_override / (w0 * out.capacitance_F);
    } else {
        out.resistance_ohm = kInf;
    }
    return out;
}

NortonEquivalent norton_equivalent(const PortCoupling& port, double omega_rad_s) {
    if (!(omega_rad_s > 0.0))
        throw std::invalid_argument("norton_equivalent: omega must be positive");
    const double rk = port.termination_resistance_ohm;
    const double wc = omega_rad_s * port.series_capacitance_F;
    NortonEquivalent n;
    n.r_eff_ohm = rk + 1.0 / (rk * wc * wc);
    n.c_eff_F = (1.0 / (omega_rad_s * omega_rad_s * port.series_capacitance_F)) /
                (rk * rk + 1.0 / (wc * wc));
    return n;
}

QualityFactors quality_factors(const CircuitAssembly& a) {
    check_assembly(a);
    const double c = a.resonator.capacitance_F;
    const double zlc = std::sqrt(a.resonator.inductance_H / c);
    const double f0 = bare_mode_hz(a);
    const double w0 = 2.0 * kPi * f0;

    QualityFactors qf;
    qf.f0_hz = f0;
    const double cf = a.feedline_port.series_capacitance_F;
    const double cb = a.bolometer_port.series_capacitance_F;
    const double rb = a.bolometer_port.termination_resistance_ohm;
    qf.q_feedline = (2.0 * zlc / a.line_impedance_ohm) * (c / cf) * (c / cf);
    qf.q_bolometer = (zlc / rb) * (c / cb) * (c / cb);
    qf.q_internal = std::isinf(a.resonator.resistance_ohm)
                        ? kInf
                        : w0 * c * a.resonator.resistance_ohm;
    qf.q_total = 1.0 / (1.0 / qf.q_internal + 1.0 / qf.q_feedline + 1.0 / qf.q_bolometer);
    qf.gamma_i_hz = f0 / qf.q_internal;
    qf.gamma_f_hz = f0 / qf.q_feedline;
    qf.gamma_b_hz = f0 / qf.q_bolometer;
    qf.gamma_t_hz = f0 / qf.q_total;

    const NortonEquivalent nf = norton_equivalent(a.feedline_port, w0);
    const NortonEquivalent nb = norton_equivalent(a.bolometer_port, w0);
    qf.coupling_fraction_feedline = nf.c_eff_F / c;
    qf.coupling_fraction_bolometer = nb.c_eff_F / c;
    qf.small_coupling_ok =
        qf.coupling_fraction_feedline < 0.05 && qf.coupling_fraction_bolometer < 0.05;
    // Dropped series term w0*C*R_k relative to the kept (Z_LC/R_k)(C/C_k)^2.
    qf.dropped_term_fraction_feedline = w0 * c * (0.5 * a.line_impedance_ohm) / qf.q_feedline;
    qf.dropped_term_fraction_bolometer = w0 * c * rb / qf.q_bolometer;
    return qf;
}

QualityFactors loaded_quality_factors(const CircuitAssembly& a) {
    check_assembly(a);
    const LoadedPoint lp = loaded_point(a);
    QualityFactors qf;
    qf.f0_hz = lp.omega0p / (2.0 * kPi);
    qf.q_feedline = lp.omega0p * lp.c_total * lp.feed.r_eff_ohm;
    qf.q_bolometer = lp.omega0p * lp.c_total * lp.bolo.r_eff_ohm;
    qf.q_internal = std::isinf(a.resonator.resistance_ohm)
                        ? kInf
                        : lp.omega0p * lp.c_total * a.resonator.resistance_ohm;
    qf.q_total = 1.0 / (1.0 / qf.q_internal + 1.0 / qf.q_feedline + 1.0 / qf.q_bolometer);
    qf.gamma_i_hz = qf.f0_hz / qf.q_internal;
    qf.gamma_f_hz = qf.f0_hz / qf.q_feedline;
    qf.gamma_b_hz = qf.f0_hz / qf.q_bolometer;
    qf.gamma_t_hz = qf.f0_hz / qf.q_total;
    const double c = a.resonator.capacitance_F;
    qf.coupling_fraction_feedline = lp.feed.c_eff_F / c;
    qf.coupling_fraction_bolometer = lp.bolo.c_eff_F / c;
    qf.small_coupling_ok = true; // no small-coupling approximation taken here
    return qf;
}

double transmission_exact_unclamped(const CircuitAssembly& a, double f_hz) {
    check_assembly(a);
    if (!(f_hz > 0.0))
        throw std::invalid_argument("transmission_exact: frequency must be positive");
    using cd = std::complex<double>;
    const double w = 2.0 * kPi * f_hz;
    // Z_k = R_k + 1/(j w C_k); 1/(j w C) contributes -j/(w C).
    const cd yf = 1.0 / cd{a.feedline_port.termination_resistance_ohm,
                           -1.0 / (w * a.feedline_port.series_capacitance_F)};
    const cd yb = 1.0 / cd{a.bolometer_port.termination_resistance_ohm,
                           -1.0 / (w * a.bolometer_port.series_capacitance_F)};
    cd y_total = yf + yb +
                 cd{0.0, w * a.resonator.capacitance_F - 1.0 / (w * a.resonator.inductance_H)};
    if (!std::isinf(a.resonator.resistance_ohm))
        y_total += cd{1.0 / a.resonator.resistance_ohm, 0.0};
    return 2.0 * yf.real() * yb.real() / std::norm(y_total);
}

double transmission_exact(const CircuitAssembly& a, double f_hz) {
    const double s2 = transmission_exact_unclamped(a, f_hz);
    if (s2 < 0.0) return 0.0;
    if (s2 > 1.0) return 1.0;
    return s2;
}

double power_to_bolometer_lorentzian(double f_hz, const QualityFactors& qf, double p_in_watt) {
    if (!(f_hz > 0.0))
        throw std::invalid_argument("power_to_bolometer_lorentzian: frequency must be positive");
    if (p_in_watt < 0.0)
        throw std::invalid_argument("power_to_bolometer_lorentzian: input power must be >= 0");
    const double df = f_hz - qf.f0_hz;
    const double hw = 0.5 * qf.gamma_t_hz;
    return 0.5 * qf.gamma_f_hz * qf.gamma_b_hz / (df * df + hw * hw) * p_in_watt;
}

double shifted_resonance_hz(const CircuitAssembly& a) {
    check_assembly(a);
    const double w0 = 1.0 / std::sqrt(a.resonator.inductance_H * a.resonator.capacitance_F);
    const NortonEquivalent nf = norton_equivalent(a.feedline_port, w0);
    const NortonEquivalent nb = norton_equivalent(a.bolometer_port, w0);
    const double ct = a.resonator.capacitance_F + nf.c_eff_F + nb.c_eff_F;
    return 1.0 / (2.0 * kPi * std::sqrt(a.resonator.inductance_H * ct));
}

double bare_mode_hz(const CircuitAssembly& a) {
    return 1.0 / (2.0 * kPi *
                  std::sqrt(a.resonator.inductance_H * a.resonator.capacitance_F));
}

CircuitAssembly make_assembly(const QuarterWaveResonator& r,
                              double cf_farad, double cb_farad, double rb_ohm) {
    CircuitAssembly a;
    a.resonator = lumped_from_quarter_wave(r);
    a.feedline_port = {cf_farad, 0.5 * r.z0_ohm};
    a.bolometer_port = {cb_farad, rb_ohm};
    a.line_impedance_ohm = r.z0_ohm;
    check_assembly(a);
    return a;
}

} // namespace thermspec
