#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "thermspec/device.hpp"
#include "thermspec/spectral.hpp"
#include "thermspec/synth.hpp"

namespace thermspec {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Write-temp-then-rename. Throws IoError.
void write_text_atomic(const std::string& path, const std::string& content);

/// Strict parse: unknown keys are rejected (with a nearest-key suggestion),
/// units are fixed by the suffixed field names. Throws ConfigError.
DeviceConfig device_config_from_json(const nlohmann::json& j);
nlohmann::json device_config_to_json(const DeviceConfig& cfg);
DeviceConfig load_device_config(const std::string& path);

/// Trace CSV: '#'-prefixed "key = value" metadata lines, then a
/// "frequency_hz,value" header and the rows.
struct TraceFile {
    SpectralTrace trace;
    std::map<std::string, std::string> metadata;
};
std::string trace_to_csv(const SpectralTrace& trace,
                         const std::vector<std::pair<std::string, std::string>>& metadata);
TraceFile trace_from_csv_text(const std::string& text);
TraceFile load_trace_csv(const std::string& path);

std::vector<std::pair<std::string, std::string>> truth_metadata(const TraceTruth& truth);

/// Sweep manifest: JSON array of {pin_dbm, trace_path}.
struct ManifestEntry {
    double pin_dbm = 0.0;
    std::string trace_path;
};
std::vector<ManifestEntry> load_manifest(const std::string& path);

/// FNV-1a over the raw bytes; recorded in reports as the input digest.
std::string file_digest(const std::string& path);

nlohmann::json to_json(const LumpedResonator& r);
nlohmann::json to_json(const QualityFactors& qf);
nlohmann::json to_json(const LorentzianFit& fit);
nlohmann::json to_json(const InternalQEstimate& qi);
nlohmann::json to_json(const PhotonNumber& n);
nlohmann::json to_json(const FiguresOfMerit& fom);
nlohmann::json to_json(const LossModelParams& p);
nlohmann::json to_json(const TraceAnalysis& t);
nlohmann::json to_json(const SweepReport& r);
nlohmann::json to_json(const CalibrationFit& c);

} // namespace thermspec
