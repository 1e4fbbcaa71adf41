// Copyright 2026 The kapitza-floq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kapitza/circuit.hpp"
#include "kapitza/dynamics.hpp"
#include "kapitza/floquet.hpp"
#include "kapitza/gates.hpp"
#include "kapitza/measurement.hpp"

namespace kapitza {

enum class SpectrumSetting { Idle, X, Z };
enum class SpectrumOperator { Charge, CosPhi, Identity };

struct SpectrumConfig {
    SpectrumSetting setting = SpectrumSetting::Idle;
    double alpha_x = 0.0052;  // GHz, static cos(phi) amplitude for the X setting
    double omega_z = 20.0;    // GHz, drive frequency for the Z setting
    SpectrumOperator op = SpectrumOperator::Charge;
    int n_side = 64;
    int levels = 6;
    double threshold = 1e-6;
};

// Filter keys left unset follow the preset; "auto" picks the Z-gate filter
// for Z gates and Z measurements and the idle filter otherwise.
struct FilterConfig {
    std::string preset = "auto";
    std::optional<int> n_modes;
    std::optional<double> omega_f;
    std::optional<double> kappa_f;
    std::optional<double> g_over_kappa_f;
    std::optional<double> j_over_kappa_f;
    std::optional<int> fock_cutoff;
    std::optional<int> max_excitations;

    FilterParams resolve(bool z_context) const;
};

struct SweepConfig {
    std::string parameter;  // "section.key"
    std::vector<double> values;
};

struct ExperimentConfig {
    CircuitParams circuit;
    WaveformKind waveform = WaveformKind::Linear;
    double waveform_alpha = 0.0;
    FloquetOptions floquet;
    SpectrumConfig spectrum;
    FilterConfig filter;
    GateParams gate = GateParams::defaults(GateKind::X);
    GateMode gate_mode = GateMode::Unitary;
    MeasurementConfig measure = MeasurementConfig::defaults(MeasurementBasis::X);
    int n_traj = 300;
    int spectrum_files = 1;
    int ensemble_n = 0;
    double ensemble_duration = 100.0;
    SweepConfig sweep;
    std::string output_dir = "out";

    FluxWaveform flux_waveform() const;
    FilterParams gate_filter() const { return filter.resolve(gate.kind == GateKind::Z); }
    FilterParams measure_filter() const { return filter.resolve(measure.basis == MeasurementBasis::Z); }
    // Measurement settings with the resolved filter.
    MeasurementConfig measurement() const;
    void validate() const;
};

// INI text plus "section.key=value" overrides applied in order. Unknown
// sections or keys are errors.
ExperimentConfig parse_config(const std::string& ini_text,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Fully resolved snapshot; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& c);

// Applies one "section.key=value" assignment.
void apply_setting(ExperimentConfig& c, const std::string& assignment);

// All recognised "section.key" names.
std::vector<std::string> config_keys();

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

std::string to_string(SpectrumSetting s);
std::string to_string(SpectrumOperator s);

}  // namespace kapitza
