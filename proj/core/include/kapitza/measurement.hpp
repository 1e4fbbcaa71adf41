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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kapitza/circuit.hpp"
#include "kapitza/dynamics.hpp"
#include "kapitza/emission.hpp"

namespace kapitza {

enum class MeasurementBasis { X, Z };

std::string to_string(MeasurementBasis b);
MeasurementBasis parse_measurement_basis(const std::string& s);

// Frequencies in GHz, times in ns. Zero drive or window frequencies select
// the computed omega_02 / omega_13 and omega_20 / omega_31 lines.
struct MeasurementConfig {
    MeasurementBasis basis = MeasurementBasis::X;
    double rabi = 0.0064;
    double drive1 = 0.0;
    double drive2 = 0.0;
    double window20 = 0.0;
    double window31 = 0.0;
    double window_width = 0.01;  // half-width of each integration window
    double duration = 2000.0;
    double dt = 0.025;           // integration step
    double dt_record = 0.05;
    double population_dt = 1.0;
    double alpha_x = 0.5;        // static cos(phi) amplitude, X basis
    double omega_z = 20.0;       // flux drive frequency, Z basis
    double rwa_cutoff = 3.0;
    double kappa_h_inv_us = 100.0;
    int floquet_steps = 1024;
    FilterParams filter = FilterParams::idle_defaults();
    std::uint64_t seed = 1;

    static MeasurementConfig defaults(MeasurementBasis basis);
    double kappa_h() const { return kappa_h_inv_us > 0.0 ? 1.0 / (kappa_h_inv_us * 1e3) : 0.0; }
    void validate() const;
};

// Joint Hamiltonian of the four lowest Floquet states and the filter chain,
// in the Floquet frame of the qubit and the frame rotating at omega_f,
// written as a sum of terms h_k exp(i nu_k t) with |nu_k| below the RWA cutoff.
struct MeasurementModel {
    MeasurementConfig cfg;
    FilterSpace space;
    int filter_dim = 0;
    int dim = 0;
    RVector quasienergies;   // rad/ns, four levels
    DominantLines lines;     // rad/ns
    double drive1 = 0.0;     // rad/ns, resolved
    double drive2 = 0.0;
    double window20 = 0.0;   // GHz, resolved
    double window31 = 0.0;
    double delta = 0.0;      // rad/ns, |omega_20 - omega_31|
    std::vector<std::string> warnings;

    struct Entry {
        int row;
        int col;
        cplx value;
        int group;
    };
    std::vector<double> group_freq;  // rad/ns
    std::vector<Entry> entries;      // Hermitian part
    CMatrix output;                  // a_N on the joint space
    std::vector<CMatrix> heating;    // secular kappa_h jump operators on the four levels, rates included

    CMatrix hamiltonian(double t) const;
    OpenSystemSetup setup() const;
    CVector initial_state() const;  // (Psi_0 + Psi_1)/sqrt2 with the filter in vacuum
    // Populations of the four Floquet levels (filter traced out).
    std::array<double, 4> populations(const CVector& psi) const;
    std::array<double, 4> populations(const CMatrix& rho) const;
};

MeasurementModel measurement_model(const CircuitParams& circuit, const MeasurementConfig& cfg);

struct Spectrum {
    std::vector<double> freq;   // GHz relative to omega_f
    std::vector<double> power;
};

struct TrajectoryRecord {
    std::uint64_t seed = 0;
    double dt_record = 0.0;
    std::vector<cplx> record;
    double population_dt = 0.0;
    std::vector<std::array<double, 4>> populations;
    std::array<double, 4> final_populations{};
    int jumps = 0;
};

TrajectoryRecord simulate_trajectory(const MeasurementModel& model, const CVector& psi0,
                                     std::uint64_t seed);

// Periodogram |sum_k S_k exp(+i w t_k)|^2 / N, so a record oscillating as
// exp(-i d t) (photon at omega_f + d) peaks at +d.
Spectrum power_spectrum(const std::vector<cplx>& record, double dt_record);

struct Classification {
    double s20 = 0.0;
    double s31 = 0.0;
    double s_signal = 0.0;
    int outcome = 0;
    bool ambiguous = false;
};

Classification classify(const Spectrum& spectrum, const MeasurementModel& model);

struct TrajectorySummary {
    std::uint64_t seed = 0;
    Classification cls;
    double final_p0 = 0.0;
    double final_p1 = 0.0;
    int jumps = 0;
    bool correct() const { return cls.outcome == (final_p1 > final_p0 ? 1 : 0); }
};

struct FidelityEstimate {
    int n = 0;
    int correct = 0;
    int ambiguous = 0;
    int outcome1 = 0;
    double fidelity = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<TrajectorySummary> trajectories;
};

// Wilson score interval at z (95% for 1.96).
std::pair<double, double> wilson_interval(int successes, int n, double z = 1.96);

// Trajectory i uses seed cfg.seed + i; results do not depend on n_threads.
FidelityEstimate measurement_fidelity(const MeasurementModel& model, int n_traj, int n_threads = 1);

struct EnsembleCheck {
    int n = 0;
    double duration = 0.0;
    std::array<double, 4> master{};
    std::array<double, 4> mean{};
    std::array<double, 4> stderr_{};
    double max_z = 0.0;  // largest |mean - master| / stderr over the four populations
};

// Mean Floquet-level populations of n trajectories against the master equation.
EnsembleCheck ensemble_vs_master(const MeasurementModel& model, int n_traj, double duration,
                                 int n_threads = 1);

}  // namespace kapitza
