#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "thermspec/device.hpp"
#include "thermspec/nis.hpp"
#include "thermspec/thermal.hpp"

namespace thermspec {

enum class ValueKind { thermometer_voltage, bolometer_power, bolometer_temperature };
enum class Orientation { peak, dip };

const char* to_string(ValueKind k);
std::optional<ValueKind> value_kind_from_string(const std::string& s);

struct SpectralTrace {
    std::vector<double> frequencies_hz; // strictly increasing, length >= 8
    std::vector<double> values;
    ValueKind kind = ValueKind::bolometer_power;
};

void validate(const SpectralTrace& trace);

/// Four-parameter Lorentzian value(f) = baseline +- amplitude * (g/2)^2 /
/// ((f-f0)^2 + (g/2)^2). Covariance order: (f0, gamma, amplitude, baseline).
struct LorentzianFit {
    double center_f0_hz = 0.0;
    double linewidth_hz = 0.0;
    double peak_amplitude = 0.0; // positive; orientation carries the sign
    double baseline = 0.0;
    Orientation orientation = Orientation::peak;
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();
    double sigma_f0_hz = 0.0;
    double sigma_linewidth_hz = 0.0;
    double noise_sigma = 0.0;  // per-point scatter estimated off resonance
    double rms_residual = 0.0;
    double span_linewidths = 0.0; // trace span / fitted linewidth
    int iterations = 0;
};

/// Deterministic initial guess (extremum, half-max width, edge-median
/// baseline) followed by damped least squares with the analytic Jacobian.
LorentzianFit fit_lorentzian(const SpectralTrace& trace);

struct InternalQEstimate {
    double q_internal = 0.0;
    double inv_q_internal = 0.0;
    double sigma_q_from_fit = 0.0;  // from the linewidth uncertainty alone
    double sigma_q_total = 0.0;     // plus coupling-capacitance uncertainty
};

/// 1/Q_i = gamma_t/f0 - (Z0/2Z_LC)(C_f/C)^2 - (R_b/Z_LC)(C_b/C)^2.
/// coupling_fraction_uncertainty is the relative error assumed on C_f and
/// C_b (each enters squared, so the term error is twice that).
InternalQEstimate internal_q_from_linewidth(double gamma_t_hz, double sigma_gamma_hz,
                                            double f0_hz, const CircuitAssembly& assembly,
                                            double coupling_fraction_uncertainty = 0.0);

/// Power-dependent internal loss: a TLS branch saturating as
/// sqrt(1+(P/P_c)^(beta/2)) and an exponential quasiparticle branch.
struct LossModelParams {
    double delta_tls0 = 0.0;
    double beta_exponent = 0.0;
    double p_critical_watt = 0.0;
    double amplitude_A = 0.0;
    double p_quasiparticle_watt = 0.0;
    double f0_hz = 0.0;
    double t0_kelvin = 0.0;
};

struct LossModelQ {
    double q_internal = 0.0;
    double q_tls = 0.0;
    double q_qps = 0.0;
};

LossModelQ loss_model_q(double p_in_watt, const LossModelParams& params);

struct QiPoint {
    double p_in_watt = 0.0;
    double q_internal = 0.0;
    double sigma_q = 0.0;
};

struct LossModelFitResult {
    LossModelParams params;
    Eigen::MatrixXd covariance_log; // in (ln d0, beta, ln Pc, ln A, ln Pq)
    double chi2 = 0.0;
    int n_points = 0;
};

/// Weighted fit of the five loss parameters at fixed (f0, T0); multi-start
/// over log-spaced P_c and P_q candidates. Requires at least 7 points that
/// straddle the Q_i maximum.
LossModelFitResult fit_loss_model(std::span<const QiPoint> points, double f0_hz,
                                  double t0_kelvin);

enum class ConversionMode { nis_model, linear_calibration };

struct AnalyzeOptions {
    ConversionMode conversion = ConversionMode::nis_model;
    std::optional<CalibrationFit> calibration; // required for linear mode
    double coupling_fraction_uncertainty = 0.02;
};

struct TraceAnalysis {
    double p_in_watt = 0.0;
    bool ok = false;
    std::string error;
    LorentzianFit power_fit; // on the trace converted to bolometer power
    std::optional<LorentzianFit> voltage_fit; // direct fit when input was V_th
    double q_total = 0.0;
    InternalQEstimate qi;
    PhotonNumber photons;
    double peak_temperature_K = 0.0;
    double gamma_voltage_vs_power = 0.0; // relative deviation of the two estimates
};

struct SweepReport {
    std::vector<TraceAnalysis> traces;
    std::optional<LossModelFitResult> loss_fit;
    std::string loss_fit_notice; // reason when the sweep-level fit is skipped
};

/// Per-trace conversion + Lorentzian fit + Q budget, then the power sweep
/// loss-model fit across traces. Per-trace failures are isolated.
SweepReport analyze_power_sweep(std::span<const std::pair<double, SpectralTrace>> traces,
                                const AnalysisDevice& device,
                                const AnalyzeOptions& options = {});

} // namespace thermspec
