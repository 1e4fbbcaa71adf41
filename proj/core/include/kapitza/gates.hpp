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

#include <string>
#include <utility>
#include <vector>

#include "kapitza/circuit.hpp"
#include "kapitza/dynamics.hpp"
#include "kapitza/filter_system.hpp"

namespace kapitza {

enum class GateKind { Idle, X, Z, XX, Init };
enum class GateMode { Unitary, OpenNoFilter, OpenWithFilter };

std::string to_string(GateKind kind);
std::string to_string(GateMode mode);
GateKind parse_gate_kind(const std::string& s);
GateMode parse_gate_mode(const std::string& s);

struct GateParams {
    GateKind kind = GateKind::X;
    double t_gate = 60.0;          // ns
    double tau = 10.0;             // ns
    double alpha = 0.0052;         // GHz: alpha_x (X), omega_z (Z), alpha_xx (XX)
    int n_steps = 512;             // composite split steps per idle drive period
    int floquet_steps = 1024;      // steps per period for the frame-defining Floquet solutions
    bool calibrate = false;
    int levels = 6;                // Floquet levels kept per qubit (open frames, XX)
    int joint_levels = 4;          // qubit levels in the joint qubit + filter model
    int joint_steps = 2048;        // midpoint steps per period, joint propagators
    int lindblad_steps = 16;       // RK4 steps per drive period
    double kappa_h_inv_us = 100.0; // intrinsic heating time 1 / kappa_h
    double equilibration_ns = 50.0;

    static GateParams defaults(GateKind kind);
    PulseShape pulse() const { return {t_gate, tau}; }
    double kappa_h() const { return kappa_h_inv_us > 0.0 ? 1.0 / (kappa_h_inv_us * 1e3) : 0.0; }
    void validate() const;
};

// Lab-frame single-qubit Hamiltonians (X, Z, Init and Idle).
RotorHamiltonian gate_hamiltonian(GateKind kind, const CircuitParams& circuit, const GateParams& p);

// Lab-frame two-qubit XX Hamiltonian on the dense product basis.
TimeOperator xx_hamiltonian(const CircuitParams& circuit, const GateParams& p);

// Ideal action on the qubit basis {Psi_0, Psi_1} (or its two-qubit product).
CMatrix target_unitary(GateKind kind);

struct GateResult {
    GateKind kind = GateKind::X;
    GateMode mode = GateMode::Unitary;
    QuantumChannel channel;
    CMatrix target;
    double avg_fidelity = 0.0;
    double infidelity = 0.0;
    double leakage = 0.0;
    double alpha_used = 0.0;
    double t_gate_used = 0.0;
    // With filter: infidelity of the 50 ns idle equilibration alone, and the
    // gate infidelity in excess of it.
    bool has_reference = false;
    double reference_infidelity = 0.0;
    double excess_infidelity = 0.0;
    std::vector<std::pair<std::string, double>> state_fidelities;
    double min_label_overlap = 1.0;
    LindbladStats stats;
};

GateResult run_gate(const CircuitParams& circuit, const GateParams& p, GateMode mode,
                    const FilterParams& filter = FilterParams::idle_defaults());

// Relative phase of the two eigen-components of a rotation, used by calibration:
// the X (XX) gate needs pi between the +/- (++/+-) components, Z between Psi_0 and Psi_1.
double rotation_phase(GateKind kind, const CMatrix& m);

}  // namespace kapitza
