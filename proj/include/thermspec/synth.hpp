#pragma once

#include <cstdint>
#include <vector>

#include "thermspec/device.hpp"
#include "thermspec/spectral.hpp"

namespace thermspec {

enum class NoiseMode { none, nep_power, voltage_std };

struct NoiseSpec {
    NoiseMode mode = NoiseMode::none;
    double nep_W_per_sqrtHz = 1.4e-18;
    double integration_time_s = 1.0;
    double voltage_std_V = 0.0;
    std::uint64_t seed = 0;
};

struct SynthConfig {
    CircuitAssembly assembly; // built at the addressed mode
    BolometerBody body;
    ThermometerConfig thermometer;
    double t_phonon_K = 0.0;
    double internal_q_truth = 0.0;
    std::vector<double> frequency_grid_hz;
    double p_in_watt = 0.0;
    int mode_index = 1;
};

/// Ground truth embedded alongside a synthesized trace (never in the value
/// columns, so analysis code cannot read it by accident).
struct TraceTruth {
    double f0_hz = 0.0;
    double gamma_t_hz = 0.0;
    double q_total = 0.0;
    double q_internal = 0.0;
    double q_feedline = 0.0;
    double q_bolometer = 0.0;
    double peak_power_W = 0.0;
    double p_in_watt = 0.0;
    int mode_index = 1;
    NoiseMode noise_mode = NoiseMode::none;
    double noise_sigma_power_W = 0.0;
    double noise_sigma_voltage_V = 0.0;
    std::uint64_t seed = 0;
};

struct SynthesizedTrace {
    SpectralTrace trace;
    TraceTruth truth;
};

/// Grid of n points spanning +-(span_linewidths/2) * gamma_t around the
/// mode resonance of the device, plus the full synthesis configuration.
SynthConfig synth_config_from_device(const DeviceConfig& device, double p_in_watt,
                                     int n_points = 401, double span_linewidths = 10.0);

/// Forward chain per frequency point: Lorentzian absorbed power -> absorber
/// temperature -> thermometer voltage. NEP-mode noise is applied to the
/// power before the temperature conversion; voltage noise is applied last.
SynthesizedTrace synthesize_trace(const SynthConfig& cfg, const NoiseSpec& noise,
                                  ValueKind output_kind);

struct RoundTripReport {
    TraceTruth truth;
    double f0_recovered_hz = 0.0;
    double gamma_recovered_hz = 0.0;
    double qi_recovered = 0.0;
    double f0_error_hz = 0.0;
    double gamma_rel_error = 0.0;
    double qi_rel_error = 0.0;
    double sigma_f0_hz = 0.0;
    double sigma_gamma_hz = 0.0;
    bool gamma_within_one_sigma = false;
};

/// Synthesize a thermometer-voltage trace, run the single-trace analysis
/// path, and score the recovered parameters against the embedded truth.
RoundTripReport round_trip(const SynthConfig& cfg, const NoiseSpec& noise);

/// Seed-indexed repeats (seed, seed+1, ...), run on a small thread pool and
/// returned in seed order.
std::vector<RoundTripReport> round_trip_ensemble(const SynthConfig& cfg,
                                                 const NoiseSpec& noise, int n_repeats,
                                                 int n_threads = 0);

} // namespace thermspec
