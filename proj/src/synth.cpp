#include "thermspec/synth.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "thermspec/random.hpp"

namespace thermspec {

SynthConfig synth_config_from_device(const DeviceConfig& device, double p_in_watt,
                                     int n_points, double span_linewidths) {
    device.validate();
    if (n_points < 8)
        throw std::invalid_argument("synth_config_from_device: need at least 8 points");
    SynthConfig cfg;
    cfg.assembly = device.assembly();
    cfg.body = device.body();
    cfg.thermometer = device.thermometer();
    cfg.t_phonon_K = device.t0_kelvin;
    cfg.internal_q_truth = device.internal_q.value_or(
        std::numeric_limits<double>::infinity());
    cfg.p_in_watt = p_in_watt;
    cfg.mode_index = device.mode_index;

    const QualityFactors qf = quality_factors(cfg.assembly);
    const double half_span = 0.5 * span_linewidths * qf.gamma_t_hz;
    cfg.frequency_grid_hz.resize(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i)
        cfg.frequency_grid_hz[static_cast<std::size_t>(i)] =
            qf.f0_hz - half_span +
            2.0 * half_span * static_cast<double>(i) / static_cast<double>(n_points - 1);
    return cfg;
}

namespace {

QualityFactors truth_quality_factors(const SynthConfig& cfg) {
    CircuitAssembly a = cfg.assembly;
    if (std::isfinite(cfg.internal_q_truth)) {
        if (!(cfg.internal_q_truth > 0.0))
            throw std::invalid_argument("SynthConfig: internal_q_truth must be positive");
        const double w0 = 2.0 * std::numbers::pi * bare_mode_hz(a);
        a.resonator.resistance_ohm = cfg.internal_q_truth / (w0 * a.resonator.capacitance_F);
    }
    return quality_factors(a);
}

} // namespace

SynthesizedTrace synthesize_trace(const SynthConfig& cfg, const NoiseSpec& noise,
                                  ValueKind output_kind) {
    if (cfg.frequency_grid_hz.size() < 8)
        throw std::invalid_argument("synthesize_trace: frequency grid too short");
    if (!std::is_sorted(cfg.frequency_grid_hz.begin(), cfg.frequency_grid_hz.end(),
                        std::less_equal<>()))
        throw std::invalid_argument("synthesize_trace: grid must be strictly increasing");
    if (!(cfg.p_in_watt >= 0.0))
        throw std::invalid_argument("synthesize_trace: input power must be >= 0");
    if (noise.mode == NoiseMode::nep_power &&
        (!(noise.nep_W_per_sqrtHz > 0.0) || !(noise.integration_time_s > 0.0)))
        throw std::invalid_argument("synthesize_trace: NEP noise needs nep > 0 and "
                                    "integration time > 0");
    if (noise.mode == NoiseMode::voltage_std && !(noise.voltage_std_V > 0.0))
        throw std::invalid_argument("synthesize_trace: voltage noise needs a positive std");

    const QualityFactors qf = truth_quality_factors(cfg);

    SynthesizedTrace out;
    out.truth.f0_hz = qf.f0_hz;
    out.truth.gamma_t_hz = qf.gamma_t_hz;
    out.truth.q_total = qf.q_total;
    out.truth.q_internal = qf.q_internal;
    out.truth.q_feedline = qf.q_feedline;
    out.truth.q_bolometer = qf.q_bolometer;
    out.truth.p_in_watt = cfg.p_in_watt;
    out.truth.peak_power_W = power_to_bolometer_lorentzian(qf.f0_hz, qf, cfg.p_in_watt);
    out.truth.mode_index = cfg.mode_index;
    out.truth.noise_mode = noise.mode;
    out.truth.seed = noise.seed;
    if (noise.mode == NoiseMode::nep_power)
        out.truth.noise_sigma_power_W =
            noise.nep_W_per_sqrtHz / std::sqrt(noise.integration_time_s);
    if (noise.mode == NoiseMode::voltage_std)
        out.truth.noise_sigma_voltage_V = noise.voltage_std_V;

    GaussianStream rng(noise.seed);
    const std::size_t n = cfg.frequency_grid_hz.size();
    out.trace.frequencies_hz = cfg.frequency_grid_hz;
    out.trace.values.resize(n);
    out.trace.kind = output_kind;

    for (std::size_t i = 0; i < n; ++i) {
        double p_b =
            power_to_bolometer_lorentzian(cfg.frequency_grid_hz[i], qf, cfg.p_in_watt);
        if (noise.mode == NoiseMode::nep_power)
            p_b += out.truth.noise_sigma_power_W * rng.next();
        if (output_kind == ValueKind::bolometer_power) {
            out.trace.values[i] = p_b;
            continue;
        }
        const double t_b = temperature_from_power(p_b, cfg.t_phonon_K, cfg.body);
        if (output_kind == ValueKind::bolometer_temperature) {
            out.trace.values[i] = t_b;
            continue;
        }
        double v = thermometer_voltage(t_b, cfg.thermometer);
        if (noise.mode == NoiseMode::voltage_std) v += noise.voltage_std_V * rng.next();
        out.trace.values[i] = v;
    }
    return out;
}

RoundTripReport round_trip(const SynthConfig& cfg, const NoiseSpec& noise) {
    const SynthesizedTrace synth =
        synthesize_trace(cfg, noise, ValueKind::thermometer_voltage);

    AnalysisDevice device{cfg.assembly, cfg.body, cfg.thermometer, cfg.t_phonon_K};
    const std::pair<double, SpectralTrace> one{cfg.p_in_watt, synth.trace};
    const SweepReport report = analyze_power_sweep({&one, 1}, device);
    const TraceAnalysis& ta = report.traces.front();
    if (!ta.ok)
        throw std::runtime_error("round_trip: analysis failed: " + ta.error);

    RoundTripReport r;
    r.truth = synth.truth;
    r.f0_recovered_hz = ta.power_fit.center_f0_hz;
    r.gamma_recovered_hz = ta.power_fit.linewidth_hz;
    r.qi_recovered = ta.qi.q_internal;
    r.f0_error_hz = ta.power_fit.center_f0_hz - synth.truth.f0_hz;
    r.gamma_rel_error = ta.power_fit.linewidth_hz / synth.truth.gamma_t_hz - 1.0;
    r.qi_rel_error = std::isfinite(synth.truth.q_internal)
                         ? ta.qi.q_internal / synth.truth.q_internal - 1.0
                         : 0.0;
    r.sigma_f0_hz = ta.power_fit.sigma_f0_hz;
    r.sigma_gamma_hz = ta.power_fit.sigma_linewidth_hz;
    r.gamma_within_one_sigma =
        std::fabs(ta.power_fit.linewidth_hz - synth.truth.gamma_t_hz) <= r.sigma_gamma_hz;
    return r;
}

std::vector<RoundTripReport> round_trip_ensemble(const SynthConfig& cfg,
                                                 const NoiseSpec& noise, int n_repeats,
                                                 int n_threads) {
    if (n_repeats < 1)
        throw std::invalid_argument("round_trip_ensemble: need at least one repeat");
    if (n_threads <= 0)
        n_threads = static_cast<int>(
            std::max(1u, std::thread::hardware_concurrency()));
    std::vector<RoundTripReport> reports(static_cast<std::size_t>(n_repeats));
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::string first_error;
    for (int t = 0; t < std::min(n_threads, n_repeats); ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n_repeats; i = next.fetch_add(1)) {
                NoiseSpec local = noise;
                local.seed = noise.seed + static_cast<std::uint64_t>(i);
                try {
                    reports[static_cast<std::size_t>(i)] = round_trip(cfg, local);
                } catch (const std::exception& e) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error.empty()) first_error = e.what();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (!first_error.empty())
        throw std::runtime_error("round_trip_ensemble: " + first_error);
    return reports;
}

} // namespace thermspec
