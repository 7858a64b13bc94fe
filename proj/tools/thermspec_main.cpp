// thermspec: forward model and inverse analysis for a bolometric resonator
// spectrometer. See README.md for the command and exit-code reference.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "thermspec/errors.hpp"
#include "thermspec/io.hpp"
#include "thermspec/kernels.hpp"
#include "thermspec/lindblad.hpp"
#include "thermspec/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace thermspec;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSchema = 3;
constexpr int kExitPhysics = 4;
constexpr int kExitFit = 5;
constexpr int kExitQuantum = 6;
constexpr int kExitIo = 7;

struct MissingInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path))
        throw MissingInput(std::string(what) + " not found: " + path);
}

DeviceConfig load_config_checked(const std::string& path) {
    require_file(path, "config file");
    return load_device_config(path);
}

json report_header(const std::string& command) {
    return json{{"schema_version", kSchemaVersion},
                {"tool_version", kToolVersion},
                {"command", command},
                {"kernel_backend", kernels::backend_name()}};
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_atomic(out_path, text);
}

void emit_text(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        write_text_atomic(out_path, text);
}

int run_lumped(const std::string& config_path) {
    const DeviceConfig cfg = load_config_checked(config_path);
    const CircuitAssembly a = cfg.assembly();
    json j = report_header("lumped");
    j["input_digest"] = file_digest(config_path);
    j["lumped"] = to_json(a.resonator);
    j["quality_factors"] = to_json(quality_factors(a));
    j["quality_factors_loaded"] = to_json(loaded_quality_factors(a));
    j["shifted_resonance_hz"] = shifted_resonance_hz(a);
    emit(j, "");
    return 0;
}

int run_transmit(const std::string& config_path, bool exact, bool lorentzian,
                 double fstart, double fstop, int points, double pin_dbm,
                 const std::string& out) {
    if (exact == lorentzian)
        throw CLI::ValidationError("transmit", "pass exactly one of --exact / --lorentzian");
    const DeviceConfig cfg = load_config_checked(config_path);
    const CircuitAssembly a = cfg.assembly();
    std::string csv;
    csv += exact ? "frequency_hz,s2\n" : "frequency_hz,p_b_watt\n";
    const QualityFactors qf = quality_factors(a);
    const double pin = dbm_to_watts(pin_dbm);
    for (int i = 0; i < points; ++i) {
        const double f =
            fstart + (fstop - fstart) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = exact ? transmission_exact(a, f)
                               : power_to_bolometer_lorentzian(f, qf, pin);
        csv += format_double(f) + "," + format_double(v) + "\n";
    }
    emit_text(csv, out);
    return 0;
}

int run_calibrate(const std::string& config_path, double tmin, double tmax, int points,
                  const std::string& out, const std::string& fit_out) {
    const DeviceConfig cfg = load_config_checked(config_path);
    const ThermometerConfig th = cfg.thermometer();
    std::vector<std::pair<double, double>> curve;
    std::string csv = "t0_kelvin,v_th_volt\n";
    for (int i = 0; i < points; ++i) {
        const double t =
            tmin + (tmax - tmin) * static_cast<double>(i) / static_cast<double>(points - 1);
        const double v = thermometer_voltage(t, th);
        curve.emplace_back(t, v);
        csv += format_double(t) + "," + format_double(v) + "\n";
    }
    emit_text(csv, out);
    if (!fit_out.empty()) {
        const CalibrationFit fit = linear_calibration_fit(curve);
        json j = report_header("calibrate");
        j["input_digest"] = file_digest(config_path);
        j["calibration_fit"] = to_json(fit);
        emit(j, fit_out);
    }
    return 0;
}

int run_simulate(const std::string& config_path, double pin_dbm, double noise_nep,
                 double integration_time, std::uint64_t seed, int points, double span,
                 const std::string& kind_name, const std::string& out) {
    const DeviceConfig cfg = load_config_checked(config_path);
    const auto kind = value_kind_from_string(kind_name);
    if (!kind)
        throw CLI::ValidationError("simulate", "unknown --kind '" + kind_name + "'");
    const SynthConfig synth_cfg =
        synth_config_from_device(cfg, dbm_to_watts(pin_dbm), points, span);
    NoiseSpec noise;
    if (noise_nep > 0.0) {
        noise.mode = NoiseMode::nep_power;
        noise.nep_W_per_sqrtHz = noise_nep;
        noise.integration_time_s = integration_time;
    }
    noise.seed = seed;
    const SynthesizedTrace synth = synthesize_trace(synth_cfg, noise, *kind);
    auto meta = truth_metadata(synth.truth);
    meta.emplace_back("pin_dbm", format_double(pin_dbm));
    if (noise.mode == NoiseMode::nep_power) {
        meta.emplace_back("nep_w_per_sqrthz", format_double(noise.nep_W_per_sqrtHz));
        meta.emplace_back("integration_time_s", format_double(noise.integration_time_s));
    }
    emit_text(trace_to_csv(synth.trace, meta), out);
    return 0;
}

int run_fit(const std::string& config_path, const std::string& trace_path,
            const std::string& kind_override, const std::string& out) {
    const DeviceConfig cfg = load_config_checked(config_path);
    require_file(trace_path, "trace file");
    TraceFile tf = load_trace_csv(trace_path);
    if (!kind_override.empty()) {
        const auto kind = value_kind_from_string(kind_override);
        if (!kind) throw CLI::ValidationError("fit", "unknown --kind '" + kind_override + "'");
        tf.trace.kind = *kind;
    }
    double pin = 0.0;
    if (const auto it = tf.metadata.find("pin_watt"); it != tf.metadata.end())
        pin = std::stod(it->second);
    const std::pair<double, SpectralTrace> one{pin, tf.trace};
    const SweepReport report = analyze_power_sweep({&one, 1}, cfg.analysis_device());
    const TraceAnalysis& ta = report.traces.front();
    if (!ta.ok) throw FitError(ta.error);

    json j = report_header("fit");
    j["input_digest"] = file_digest(trace_path);
    j["trace_path"] = trace_path;
    j["analysis"] = to_json(ta);
    // Truth metadata, when present, rides along for round-trip scoring.
    json meta = json::object();
    for (const auto& [k, v] : tf.metadata) meta[k] = v;
    j["trace_metadata"] = meta;
    emit(j, out);
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& manifest_path,
              const std::string& out) {
    const DeviceConfig cfg = load_config_checked(config_path);
    require_file(manifest_path, "manifest");
    const auto entries = load_manifest(manifest_path);
    std::vector<std::pair<double, SpectralTrace>> traces;
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& e : entries) {
        fs::path p(e.trace_path);
        if (p.is_relative()) p = base / p;
        require_file(p.string(), "trace file");
        traces.emplace_back(dbm_to_watts(e.pin_dbm), load_trace_csv(p.string()).trace);
    }
    const SweepReport report = analyze_power_sweep(traces, cfg.analysis_device());
    json j = report_header("sweep");
    j["input_digest"] = file_digest(manifest_path);
    j["sweep"] = to_json(report);
    emit(j, out);
    return 0;
}

int run_quantum_check(const std::string& config_path, double pin_dbm, int nmax, int points,
                      const std::string& out) {
    const DeviceConfig cfg = load_config_checked(config_path);
    const CircuitAssembly a = cfg.assembly();
    const QualityFactors qf = quality_factors(a);
    if (!std::isfinite(qf.q_internal))
        throw std::invalid_argument("quantum-check: config needs a finite internal_q");
    const double f0 = qf.f0_hz;
    const double pin = dbm_to_watts(pin_dbm);
    const double lambda = drive_amplitude_from_input_power(pin, qf.q_feedline, f0);
    const std::vector<BathSpec> baths{{qf.q_feedline, cfg.t0_kelvin},
                                      {qf.q_bolometer, cfg.t0_kelvin},
                                      {qf.q_internal, cfg.t0_kelvin}};
    const BathSpec bolometer = baths[1];

    std::string csv =
        "detuning_hz,power_numeric_watt,power_analytic_watt,power_lorentzian_watt,"
        "rel_err_analytic,rel_err_lorentzian\n";
    double max_rel = 0.0;
    for (int i = 0; i < points; ++i) {
        const double x = points == 1 ? 0.0
                                     : -3.0 + 6.0 * static_cast<double>(i) /
                                                  static_cast<double>(points - 1);
        const double detuning = x * qf.gamma_t_hz;
        const DriveSpec drive{lambda, f0 + detuning};
        const TruncatedDensityMatrix rho = steady_state(f0, drive, baths, nmax);
        const double p_num = bath_power_from_state(rho, bolometer, f0);
        const double p_an = steady_power_analytic(drive, f0, qf.q_total, qf.q_bolometer);
        const double p_lor = power_to_bolometer_lorentzian(f0 + detuning, qf, pin);
        const double e_an = p_num / p_an - 1.0;
        const double e_lor = p_num / p_lor - 1.0;
        max_rel = std::max({max_rel, std::fabs(e_an), std::fabs(e_lor)});
        csv += format_double(detuning) + "," + format_double(p_num) + "," +
               format_double(p_an) + "," + format_double(p_lor) + "," +
               format_double(e_an) + "," + format_double(e_lor) + "\n";
    }
    emit_text(csv, out);
    std::fprintf(stderr, "quantum-check: max relative error %.3e over %d detunings\n",
                 max_rel, points);
    return 0;
}

int run_figures(const std::string& config_path, std::optional<double> tb_kelvin) {
    const DeviceConfig cfg = load_config_checked(config_path);
    const QualityFactors qf = quality_factors(cfg.assembly());
    const BolometerBody body = cfg.body();
    // Default operating point: the parasitic-power saturation temperature.
    const double t_saturation = temperature_from_power(0.0, cfg.t0_kelvin, body);
    const double tb = tb_kelvin.value_or(t_saturation);
    const FiguresOfMerit fom =
        figures_of_merit(body, tb, cfg.t0_kelvin, qf.q_bolometer, qf.f0_hz);
    json j = report_header("figures");
    j["input_digest"] = file_digest(config_path);
    j["t_bolometer_kelvin"] = tb;
    j["t_saturation_kelvin"] = t_saturation;
    j["figures_of_merit"] = to_json(fom);
    emit(j, "");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermspec: bolometric spectrometer model and analysis"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "device config JSON")->required();

    auto* lumped = app.add_subcommand("lumped", "lumped LCR equivalent and Q budget");

    auto* transmit = app.add_subcommand("transmit", "power transmission over a grid");
    bool tr_exact = false, tr_lor = false;
    double tr_fstart = 0.0, tr_fstop = 0.0, tr_pin = -120.0;
    int tr_points = 401;
    transmit->add_flag("--exact", tr_exact, "exact |S|^2 from the circuit model");
    transmit->add_flag("--lorentzian", tr_lor, "Lorentzian absorbed power");
    transmit->add_option("--fstart", tr_fstart, "grid start, Hz")->required();
    transmit->add_option("--fstop", tr_fstop, "grid stop, Hz")->required();
    transmit->add_option("--points", tr_points, "grid points (default 401)");
    transmit->add_option("--pin-dbm", tr_pin, "input power for --lorentzian (default -120)");
    std::string tr_out;
    transmit->add_option("--out", tr_out, "output CSV (default stdout)");

    auto* calibrate = app.add_subcommand("calibrate", "thermometer V(T) curve + linear fit");
    double ca_tmin = 0.05, ca_tmax = 0.4;
    int ca_points = 15;
    std::string ca_out, ca_fit_out;
    calibrate->add_option("--tmin", ca_tmin, "lowest bath temperature, K (default 0.05)");
    calibrate->add_option("--tmax", ca_tmax, "highest bath temperature, K (default 0.4)");
    calibrate->add_option("--points", ca_points, "sweep points (default 15)");
    calibrate->add_option("--out", ca_out, "calibration CSV (default stdout)");
    calibrate->add_option("--fit-out", ca_fit_out, "linear-fit report JSON");

    auto* simulate = app.add_subcommand("simulate", "synthesize a trace");
    double si_pin = -120.0, si_nep = 0.0, si_itime = 1.0, si_span = 10.0;
    int si_points = 401;
    std::uint64_t si_seed = 0;
    std::string si_kind = "thermometer_voltage", si_out;
    simulate->add_option("--pin-dbm", si_pin, "input power, dBm")->required();
    simulate->add_option("--noise-nep", si_nep, "NEP in W/sqrt(Hz); 0 disables noise");
    simulate->add_option("--integration-time", si_itime, "seconds per point (default 1)");
    simulate->add_option("--seed", si_seed, "noise seed (default 0)");
    simulate->add_option("--points", si_points, "grid points (default 401)");
    simulate->add_option("--span", si_span, "grid span in linewidths (default 10)");
    simulate->add_option("--kind", si_kind,
                         "output kind: thermometer_voltage|bolometer_power|"
                         "bolometer_temperature");
    simulate->add_option("--out", si_out, "output CSV")->required();

    auto* fit = app.add_subcommand("fit", "fit one trace and report the Q budget");
    std::string fi_trace, fi_out, fi_kind;
    fit->add_option("--trace", fi_trace, "trace CSV")->required();
    fit->add_option("--kind", fi_kind, "override the trace value kind");
    fit->add_option("--out", fi_out, "report JSON (default stdout)");

    auto* sweep = app.add_subcommand("sweep", "analyze a power sweep from a manifest");
    std::string sw_manifest, sw_out;
    sweep->add_option("--manifest", sw_manifest, "JSON array of {pin_dbm, trace_path}")
        ->required();
    sweep->add_option("--out", sw_out, "report JSON (default stdout)");

    auto* qc = app.add_subcommand("quantum-check",
                                  "steady-state solver vs the closed forms");
    double qc_pin = -130.0;
    int qc_nmax = 40, qc_points = 11;
    std::string qc_out;
    qc->add_option("--pin-dbm", qc_pin, "input power, dBm (default -130)");
    qc->add_option("--nmax", qc_nmax, "Fock cutoff (default 40)");
    qc->add_option("--points", qc_points, "detunings across +-3 linewidths (default 11)");
    qc->add_option("--out", qc_out, "comparison CSV (default stdout)");

    auto* figures = app.add_subcommand("figures", "detector figures of merit");
    double fg_tb = 0.0;
    figures->add_option("--tb-kelvin", fg_tb,
                        "bolometer temperature (default: saturation temperature)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (lumped->parsed()) return run_lumped(config_path);
        if (transmit->parsed())
            return run_transmit(config_path, tr_exact, tr_lor, tr_fstart, tr_fstop,
                                tr_points, tr_pin, tr_out);
        if (calibrate->parsed())
            return run_calibrate(config_path, ca_tmin, ca_tmax, ca_points, ca_out,
                                 ca_fit_out);
        if (simulate->parsed())
            return run_simulate(config_path, si_pin, si_nep, si_itime, si_seed, si_points,
                                si_span, si_kind, si_out);
        if (fit->parsed()) return run_fit(config_path, fi_trace, fi_kind, fi_out);
        if (sweep->parsed()) return run_sweep(config_path, sw_manifest, sw_out);
        if (qc->parsed())
            return run_quantum_check(config_path, qc_pin, qc_nmax, qc_points, qc_out);
        if (figures->parsed())
            return run_figures(config_path,
                               fg_tb > 0.0 ? std::optional<double>(fg_tb) : std::nullopt);
    } catch (const MissingInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const FitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFit;
    } catch (const QuantumError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitQuantum;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitPhysics;
    }
    return 0;
}
