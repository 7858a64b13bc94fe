#include "thermspec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "thermspec/errors.hpp"
#include "thermspec/units.hpp"

namespace thermspec {

namespace {

namespace fs = std::filesystem;

constexpr const char* kKnownKeys[] = {
    "z0_ohm", "f0_hz", "cf_farad", "cb_farad", "rb_ohm",
    "sigma_ep_w_per_k5_m3", "volume_m3", "pe_watt", "heat_capacity_const",
    "lb_henry", "delta_ev", "dynes", "rt_sinis_ohm", "ibias_ampere",
    "t0_kelvin", "internal_q", "mode_index",
};

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

std::string nearest_key(const std::string& key) {
    std::string best;
    std::size_t best_d = key.size() + 8;
    for (const char* k : kKnownKeys) {
        const std::size_t d = edit_distance(key, k);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

double require_positive(const nlohmann::json& j, const char* key) {
    if (!j.contains(key))
        throw ConfigError(std::string("config: missing field '") + key + "'", key);
    if (!j.at(key).is_number())
        throw ConfigError(std::string("config: field '") + key + "' must be a number", key);
    const double v = j.at(key).get<double>();
    if (!(v > 0.0))
        throw ConfigError(std::string("config: field '") + key + "' must be positive", key);
    return v;
}

} // namespace

void DeviceConfig::validate() const {
    const auto positive = [](double v, const char* name) {
        if (!(v > 0.0))
            throw ConfigError(std::string("config: field '") + name + "' must be positive",
                              name);
    };
    positive(z0_ohm, "z0_ohm");
    positive(f0_hz, "f0_hz");
    positive(cf_farad, "cf_farad");
    positive(cb_farad, "cb_farad");
    positive(rb_ohm, "rb_ohm");
    positive(sigma_ep_w_per_k5_m3, "sigma_ep_w_per_k5_m3");
    positive(volume_m3, "volume_m3");
    positive(heat_capacity_const, "heat_capacity_const");
    positive(lb_henry, "lb_henry");
    positive(delta_ev, "delta_ev");
    positive(dynes, "dynes");
    positive(rt_sinis_ohm, "rt_sinis_ohm");
    positive(ibias_ampere, "ibias_ampere");
    positive(t0_kelvin, "t0_kelvin");
    if (pe_watt < 0.0)
        throw ConfigError("config: field 'pe_watt' must be >= 0", "pe_watt");
    if (internal_q && !(*internal_q > 0.0))
        throw ConfigError("config: field 'internal_q' must be positive", "internal_q");
    if (mode_index < 1 || mode_index % 2 == 0)
        throw ConfigError("config: field 'mode_index' must be an odd positive integer",
                          "mode_index");
}

QuarterWaveResonator DeviceConfig::resonator_at_mode() const {
    QuarterWaveResonator r;
    r.z0_ohm = z0_ohm;
    r.f_mode_hz = mode_frequency_hz();
    if (internal_q) r.internal_q_override = *internal_q;
    return r;
}

CircuitAssembly DeviceConfig::assembly() const {
    return make_assembly(resonator_at_mode(), cf_farad, cb_farad, rb_ohm);
}

BolometerBody DeviceConfig::body() const {
    BolometerBody b;
    b.sigma_ep_W_per_K5_m3 = sigma_ep_w_per_k5_m3;
    b.volume_m3 = volume_m3;
    b.parasitic_power_W = pe_watt;
    b.heat_capacity_const = heat_capacity_const;
    b.wire_inductance_H = lb_henry;
    b.absorber_resistance_ohm = rb_ohm;
    return b;
}

ThermometerConfig DeviceConfig::thermometer() const {
    ThermometerConfig t;
    t.junction = {delta_ev, dynes, 0.5 * rt_sinis_ohm};
    t.bias_current_A = ibias_ampere;
    t.junction_count = 2;
    return t;
}

AnalysisDevice DeviceConfig::analysis_device() const {
    return {assembly(), body(), thermometer(), t0_kelvin};
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_text_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    const fs::path tmp = target.parent_path() / (target.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw IoError("rename failed for " + path + ": " + ec.message());
    }
}

DeviceConfig device_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool known = false;
        for (const char* k : kKnownKeys)
            if (key == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("config: unknown key '" + key + "' (did you mean '" +
                                  nearest_key(key) + "'?)",
                              key);
    }
    DeviceConfig c;
    c.z0_ohm = require_positive(j, "z0_ohm");
    c.f0_hz = require_positive(j, "f0_hz");
    c.cf_farad = require_positive(j, "cf_farad");
    c.cb_farad = require_positive(j, "cb_farad");
    c.rb_ohm = require_positive(j, "rb_ohm");
    c.sigma_ep_w_per_k5_m3 = require_positive(j, "sigma_ep_w_per_k5_m3");
    c.volume_m3 = require_positive(j, "volume_m3");
    c.heat_capacity_const = require_positive(j, "heat_capacity_const");
    c.lb_henry = require_positive(j, "lb_henry");
    c.delta_ev = require_positive(j, "delta_ev");
    c.dynes = require_positive(j, "dynes");
    c.rt_sinis_ohm = require_positive(j, "rt_sinis_ohm");
    c.ibias_ampere = require_positive(j, "ibias_ampere");
    c.t0_kelvin = require_positive(j, "t0_kelvin");
    if (!j.contains("pe_watt"))
        throw ConfigError("config: missing field 'pe_watt'", "pe_watt");
    c.pe_watt = j.at("pe_watt").get<double>();
    if (j.contains("internal_q")) c.internal_q = j.at("internal_q").get<double>();
    if (j.contains("mode_index")) c.mode_index = j.at("mode_index").get<int>();
    c.validate();
    return c;
}

nlohmann::json device_config_to_json(const DeviceConfig& cfg) {
    nlohmann::json j{
        {"z0_ohm", cfg.z0_ohm},
        {"f0_hz", cfg.f0_hz},
        {"cf_farad", cfg.cf_farad},
        {"cb_farad", cfg.cb_farad},
        {"rb_ohm", cfg.rb_ohm},
        {"sigma_ep_w_per_k5_m3", cfg.sigma_ep_w_per_k5_m3},
        {"volume_m3", cfg.volume_m3},
        {"pe_watt", cfg.pe_watt},
        {"heat_capacity_const", cfg.heat_capacity_const},
        {"lb_henry", cfg.lb_henry},
        {"delta_ev", cfg.delta_ev},
        {"dynes", cfg.dynes},
        {"rt_sinis_ohm", cfg.rt_sinis_ohm},
        {"ibias_ampere", cfg.ibias_ampere},
        {"t0_kelvin", cfg.t0_kelvin},
        {"mode_index", cfg.mode_index},
    };
    if (cfg.internal_q) j["internal_q"] = *cfg.internal_q;
    return j;
}

DeviceConfig load_device_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: invalid JSON in " + path + ": " + e.what());
    }
    return device_config_from_json(j);
}

std::string trace_to_csv(const SpectralTrace& trace,
                         const std::vector<std::pair<std::string, std::string>>& metadata) {
    std::ostringstream out;
    out << "# value_kind = " << to_string(trace.kind) << "\n";
    for (const auto& [k, v] : metadata) out << "# " << k << " = " << v << "\n";
    out << "frequency_hz,value\n";
    for (std::size_t i = 0; i < trace.frequencies_hz.size(); ++i)
        out << format_double(trace.frequencies_hz[i]) << ','
            << format_double(trace.values[i]) << '\n';
    return out.str();
}

TraceFile trace_from_csv_text(const std::string& text) {
    TraceFile tf;
    std::istringstream in(text);
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                std::string key = line.substr(1, eq - 1);
                std::string val = line.substr(eq + 1);
                const auto strip = [](std::string& s) {
                    const auto a = s.find_first_not_of(" \t");
                    const auto b = s.find_last_not_of(" \t\r");
                    s = a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
                };
                strip(key);
                strip(val);
                tf.metadata[key] = val;
            }
            continue;
        }
        if (!header_seen) {
            if (line.rfind("frequency_hz", 0) != 0)
                throw ConfigError("trace CSV: expected 'frequency_hz,value' header, got: " + line);
            header_seen = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("trace CSV: malformed row: " + line);
        tf.trace.frequencies_hz.push_back(std::stod(line.substr(0, comma)));
        tf.trace.values.push_back(std::stod(line.substr(comma + 1)));
    }
    const auto it = tf.metadata.find("value_kind");
    if (it != tf.metadata.end()) {
        const auto kind = value_kind_from_string(it->second);
        if (!kind) throw ConfigError("trace CSV: unknown value_kind '" + it->second + "'");
        tf.trace.kind = *kind;
    }
    validate(tf.trace);
    return tf;
}

TraceFile load_trace_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open trace file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return trace_from_csv_text(ss.str());
}

std::vector<std::pair<std::string, std::string>> truth_metadata(const TraceTruth& truth) {
    std::vector<std::pair<std::string, std::string>> m;
    m.emplace_back("truth_f0_hz", format_double(truth.f0_hz));
    m.emplace_back("truth_gamma_t_hz", format_double(truth.gamma_t_hz));
    m.emplace_back("truth_q_total", format_double(truth.q_total));
    m.emplace_back("truth_q_internal", format_double(truth.q_internal));
    m.emplace_back("truth_q_feedline", format_double(truth.q_feedline));
    m.emplace_back("truth_q_bolometer", format_double(truth.q_bolometer));
    m.emplace_back("truth_peak_power_watt", format_double(truth.peak_power_W));
    m.emplace_back("pin_watt", format_double(truth.p_in_watt));
    m.emplace_back("mode_index", std::to_string(truth.mode_index));
    const char* nm = truth.noise_mode == NoiseMode::none
                         ? "none"
                         : (truth.noise_mode == NoiseMode::nep_power ? "nep_power"
                                                                     : "voltage_std");
    m.emplace_back("noise_mode", nm);
    if (truth.noise_mode == NoiseMode::nep_power)
        m.emplace_back("noise_sigma_power_watt", format_double(truth.noise_sigma_power_W));
    if (truth.noise_mode == NoiseMode::voltage_std)
        m.emplace_back("noise_sigma_voltage_volt",
                       format_double(truth.noise_sigma_voltage_V));
    m.emplace_back("seed", std::to_string(truth.seed));
    m.emplace_back("rng", "mt19937_64+box-muller");
    return m;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("manifest: invalid JSON: " + std::string(e.what()));
    }
    if (!j.is_array()) throw ConfigError("manifest: top level must be a JSON array");
    std::vector<ManifestEntry> entries;
    for (const auto& e : j) {
        if (!e.contains("pin_dbm") || !e.contains("trace_path"))
            throw ConfigError("manifest: entries need 'pin_dbm' and 'trace_path'");
        entries.push_back({e.at("pin_dbm").get<double>(),
                           e.at("trace_path").get<std::string>()});
    }
    return entries;
}

std::string file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for digest: " + path);
    std::uint64_t h = 1469598103934665603ull; // FNV-1a
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

nlohmann::json to_json(const LumpedResonator& r) {
    nlohmann::json j{{"inductance_henry", r.inductance_H},
                     {"capacitance_farad", r.capacitance_F}};
    if (std::isfinite(r.resistance_ohm))
        j["resistance_ohm"] = r.resistance_ohm;
    else
        j["resistance_ohm"] = "infinite";
    return j;
}

nlohmann::json to_json(const QualityFactors& qf) {
    nlohmann::json j{
        {"f0_hz", qf.f0_hz},
        {"q_feedline", qf.q_feedline},
        {"q_bolometer", qf.q_bolometer},
        {"q_total", qf.q_total},
        {"gamma_f_hz", qf.gamma_f_hz},
        {"gamma_b_hz", qf.gamma_b_hz},
        {"gamma_t_hz", qf.gamma_t_hz},
        {"coupling_fraction_feedline", qf.coupling_fraction_feedline},
        {"coupling_fraction_bolometer", qf.coupling_fraction_bolometer},
        {"small_coupling_ok", qf.small_coupling_ok},
        {"dropped_term_fraction_feedline", qf.dropped_term_fraction_feedline},
        {"dropped_term_fraction_bolometer", qf.dropped_term_fraction_bolometer},
    };
    if (std::isfinite(qf.q_internal)) {
        j["q_internal"] = qf.q_internal;
        j["gamma_i_hz"] = qf.gamma_i_hz;
    } else {
        j["q_internal"] = "infinite";
        j["gamma_i_hz"] = 0.0;
    }
    return j;
}

nlohmann::json to_json(const LorentzianFit& fit) {
    nlohmann::json cov = nlohmann::json::array();
    for (int r = 0; r < 4; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < 4; ++c) row.push_back(fit.covariance(r, c));
        cov.push_back(row);
    }
    return nlohmann::json{
        {"center_f0_hz", fit.center_f0_hz},
        {"linewidth_hz", fit.linewidth_hz},
        {"peak_amplitude", fit.peak_amplitude},
        {"baseline", fit.baseline},
        {"orientation", fit.orientation == Orientation::peak ? "peak" : "dip"},
        {"sigma_f0_hz", fit.sigma_f0_hz},
        {"sigma_linewidth_hz", fit.sigma_linewidth_hz},
        {"noise_sigma", fit.noise_sigma},
        {"rms_residual", fit.rms_residual},
        {"span_linewidths", fit.span_linewidths},
        {"iterations", fit.iterations},
        {"covariance", cov},
    };
}

nlohmann::json to_json(const InternalQEstimate& qi) {
    return nlohmann::json{
        {"q_internal", qi.q_internal},
        {"inv_q_internal", qi.inv_q_internal},
        {"sigma_q_from_fit", qi.sigma_q_from_fit},
        {"sigma_q_total", qi.sigma_q_total},
    };
}

nlohmann::json to_json(const PhotonNumber& n) {
    return nlohmann::json{
        {"simplified", n.simplified},
        {"full", n.full},
        {"thermal_occupation", n.thermal_occupation},
    };
}

nlohmann::json to_json(const FiguresOfMerit& fom) {
    return nlohmann::json{
        {"g_th_at_tb_w_per_k", fom.g_th_at_tb_W_per_K},
        {"g_th_at_t0_w_per_k", fom.g_th_at_t0_W_per_K},
        {"nep_thermal_w_per_sqrthz", fom.nep_thermal_W_per_sqrtHz},
        {"heat_capacity_j_per_k", fom.heat_capacity_J_per_K},
        {"relaxation_time_s", fom.relaxation_time_s},
        {"cutoff_hz", fom.cutoff_hz},
        {"single_photon_watt", fom.single_photon_power_W},
        {"thermal_occupation", fom.thermal_occupation},
    };
}

nlohmann::json to_json(const LossModelParams& p) {
    return nlohmann::json{
        {"delta_tls0", p.delta_tls0},
        {"beta_exponent", p.beta_exponent},
        {"p_critical_watt", p.p_critical_watt},
        {"p_critical_dbm", watts_to_dbm(p.p_critical_watt)},
        {"amplitude_a", p.amplitude_A},
        {"p_quasiparticle_watt", p.p_quasiparticle_watt},
        {"p_quasiparticle_dbm", watts_to_dbm(p.p_quasiparticle_watt)},
        {"f0_hz", p.f0_hz},
        {"t0_kelvin", p.t0_kelvin},
    };
}

nlohmann::json to_json(const TraceAnalysis& t) {
    nlohmann::json j{
        {"pin_watt", t.p_in_watt},
        {"ok", t.ok},
    };
    if (!t.ok) {
        j["error"] = t.error;
        return j;
    }
    j["power_fit"] = to_json(t.power_fit);
    if (t.voltage_fit) {
        j["voltage_fit"] = to_json(*t.voltage_fit);
        j["gamma_voltage_vs_power"] = t.gamma_voltage_vs_power;
    }
    j["q_total"] = t.q_total;
    j["internal_q"] = to_json(t.qi);
    j["photon_number"] = to_json(t.photons);
    j["peak_temperature_kelvin"] = t.peak_temperature_K;
    return j;
}

nlohmann::json to_json(const SweepReport& r) {
    nlohmann::json traces = nlohmann::json::array();
    for (const auto& t : r.traces) traces.push_back(to_json(t));
    nlohmann::json j{{"traces", traces}};
    if (r.loss_fit) {
        j["loss_model"] = to_json(r.loss_fit->params);
        j["loss_model_chi2"] = r.loss_fit->chi2;
        j["loss_model_points"] = r.loss_fit->n_points;
    } else {
        j["loss_model_notice"] = r.loss_fit_notice;
    }
    return j;
}

nlohmann::json to_json(const CalibrationFit& c) {
    return nlohmann::json{
        {"slope_v_per_k", c.slope_V_per_K},
        {"intercept_v", c.intercept_V},
        {"t_min_kelvin", c.t_min_K},
        {"t_max_kelvin", c.t_max_K},
        {"rms_residual_v", c.rms_residual_V},
        {"n_points", c.n_points},
    };
}

} // namespace thermspec
