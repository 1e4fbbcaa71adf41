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

#include "kapitza/config.hpp"
#include "kapitza/emission.hpp"
#include "kapitza/floquet.hpp"

namespace kapitza {

struct FloquetRun {
    CircuitParams circuit;
    FloquetSolution solution;
    EffectiveModel effective;
    double splitting = 0.0;  // (eps_1 - eps_0) / 2pi, GHz
};

// Floquet solution of the configured circuit and flux waveform.
FloquetRun run_floquet(const ExperimentConfig& cfg);

// Max |<Psi_a(t)| n |Psi_b(t)>| over the grid for a, b in {0, 1}.
double qubit_charge_matrix_max(const FloquetRun& run);

struct SpectrumRun {
    CircuitParams circuit;  // omega replaced by omega_z in the Z setting
    FloquetSolution solution;
    SidebandExpansion expansion;
    std::vector<EmissionLine> lines;
    std::optional<DominantLines> dominant;  // rad/ns; empty for the identity operator
    std::optional<ProtectionMetrics> metrics;
    RMatrix rates;  // Gamma(a, b) in units of the bath rate
};

// Emission spectrum of the configured noise operator in the idle, X (static
// alpha_x cos phi) or Z (omega_z drive) setting.
SpectrumRun run_spectrum(const ExperimentConfig& cfg, bool allow_ambiguous = false);

struct SweepPoint {
    double value = 0.0;
    bool ok = false;
    std::string error;
    std::vector<double> quasienergies;  // GHz
    double splitting = 0.0;             // GHz
    DominantLines lines;                // GHz
    double line_difference = 0.0;       // omega_20 - omega_31, GHz
    double gamma_10 = 0.0;
    double gamma_01 = 0.0;
    double gamma_00 = 0.0;
    double gamma_11 = 0.0;
};

// Evaluates one sweep point: the parameter is applied to a copy of cfg.
SweepPoint sweep_point(const ExperimentConfig& cfg, const std::string& parameter, double value);

// Points run concurrently on n_threads workers; results are ordered as values.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, int n_threads = 1);

}  // namespace kapitza
