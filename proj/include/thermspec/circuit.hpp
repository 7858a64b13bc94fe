#pragma once

#include <optional>

namespace thermspec {

/// Quarter-wave transmission-line resonator near one of its modes.
/// At most one of attenuation_length_product / internal_q_override may be
/// set; if neither is, the internal shunt resistance is infinite (lossless).
struct QuarterWaveResonator {
    double z0_ohm = 0.0;
    double f_mode_hz = 0.0;
    std::optional<double> attenuation_length_product; // alpha*l, dimensionless
    std::optional<double> internal_q_override;
};

/// Parallel LCR equivalent. resistance_ohm may be +infinity.
struct LumpedResonator {
    double inductance_H = 0.0;
    double capacitance_F = 0.0;
    double resistance_ohm = 0.0;
};

/// Series capacitor into a resistive termination (Z0/2 for the feedline,
/// the absorber resistance for the bolometer port).
struct PortCoupling {
    double series_capacitance_F = 0.0;
    double termination_resistance_ohm = 0.0;
};

struct CircuitAssembly {
    LumpedResonator resonator;
    PortCoupling feedline_port;  // termination must equal line_impedance/2
    PortCoupling bolometer_port;
    double line_impedance_ohm = 0.0;
};

struct QualityFactors {
    double q_internal = 0.0; // may be +infinity
    double q_feedline = 0.0;
    double q_bolometer = 0.0;
    double q_total = 0.0;
    double f0_hz = 0.0; // frequency the linewidths refer to
    double gamma_i_hz = 0.0;
    double gamma_f_hz = 0.0;
    double gamma_b_hz = 0.0;
    double gamma_t_hz = 0.0;
    // Diagnostics for the small-coupling approximation: effective coupling
    // capacitances as a fraction of C, and the size of the series-resistance
    // term dropped from Q_k relative to the kept term.
    double coupling_fraction_feedline = 0.0;
    double coupling_fraction_bolometer = 0.0;
    double dropped_term_fraction_feedline = 0.0;
    double dropped_term_fraction_bolometer = 0.0;
    bool small_coupling_ok = true; // both fractions below 5 %
};

struct NortonEquivalent {
    double r_eff_ohm = 0.0;
    double c_eff_F = 0.0;
};

/// C = 1/(8 Z0 f), L = 2 Z0 / (pi^2 f); R from alpha*l or a Q_i override.
LumpedResonator lumped_from_quarter_wave(const QuarterWaveResonator& r);

/// Series RC seen as a parallel RC at angular frequency omega.
NortonEquivalent norton_equivalent(const PortCoupling& port, double omega_rad_s);

/// Quality factors from the small-coupling formulas evaluated at the bare
/// mode frequency: Q_f = (2 Z_LC/Z0)(C/C_f)^2, Q_b = (Z_LC/R_b)(C/C_b)^2,
/// Q_i = w0 C R. Attaches the approximation diagnostics.
QualityFactors quality_factors(const CircuitAssembly& a);

/// Quality factors without the small-coupling approximation, evaluated at
/// the shifted resonance: Q_k = w0' C_t R_k_eff(w0'). This is the
/// parameterization under which the Lorentzian matches the exact
/// transmission near resonance.
QualityFactors loaded_quality_factors(const CircuitAssembly& a);

/// Exact power transmission |S|^2 with full complex port impedances,
/// clamped to [0, 1].
double transmission_exact(const CircuitAssembly& a, double f_hz);

/// Same without the clamp (for diagnosing rounding excess).
double transmission_exact_unclamped(const CircuitAssembly& a, double f_hz);

/// P_b(f) = 1/2 * gf*gb / ((f-f0)^2 + (gt/2)^2) * p_in, with the line
/// centered at qf.f0_hz.
double power_to_bolometer_lorentzian(double f_hz, const QualityFactors& qf, double p_in_watt);

/// Resonance of the loaded circuit: 1/(2 pi sqrt(L C_t)) with
/// C_t = C + C_f_eff + C_b_eff, Norton equivalents taken at the bare w0.
double shifted_resonance_hz(const CircuitAssembly& a);

/// Bare mode frequency 1/(2 pi sqrt(LC)) of the assembly.
double bare_mode_hz(const CircuitAssembly& a);

/// Convenience builder used by the CLI and the synthesis pipeline.
CircuitAssembly make_assembly(const QuarterWaveResonator& r,
                              double cf_farad, double cb_farad, double rb_ohm);

} // namespace thermspec
