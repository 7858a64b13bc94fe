#pragma once

#include <optional>

#include "thermspec/circuit.hpp"
#include "thermspec/nis.hpp"
#include "thermspec/thermal.hpp"

namespace thermspec {

/// Everything the analysis side needs to convert and interpret a trace.
struct AnalysisDevice {
    CircuitAssembly assembly;
    BolometerBody body;
    ThermometerConfig thermometer;
    double t_phonon_K = 0.0;
};

/// Flat device description as stored in the JSON config file. Field names
/// carry their unit suffix; all values are SI.
struct DeviceConfig {
    double z0_ohm = 0.0;
    double f0_hz = 0.0; // fundamental mode
    double cf_farad = 0.0;
    double cb_farad = 0.0;
    double rb_ohm = 0.0;
    double sigma_ep_w_per_k5_m3 = 0.0;
    double volume_m3 = 0.0;
    double pe_watt = 0.0;
    double heat_capacity_const = 71.0;
    double lb_henry = 0.0;
    double delta_ev = 0.0;
    double dynes = 0.0;
    double rt_sinis_ohm = 0.0; // total series resistance of the SINIS pair
    double ibias_ampere = 0.0;
    double t0_kelvin = 0.0;
    std::optional<double> internal_q;
    int mode_index = 1;

    void validate() const; // throws ConfigError naming the field

    /// Mode frequency addressed by mode_index (odd multiples of f0).
    double mode_frequency_hz() const { return f0_hz * mode_index; }

    QuarterWaveResonator resonator_at_mode() const;
    CircuitAssembly assembly() const;
    BolometerBody body() const;
    /// SINIS pair: two identical junctions, each at rt_sinis/2.
    ThermometerConfig thermometer() const;
    AnalysisDevice analysis_device() const;
};

} // namespace thermspec
