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

#include <functional>
#include <memory>
#include <utility>

#include "kapitza/linalg.hpp"

namespace kapitza {

// Circuit constants. Frequencies are ordinary GHz; conversion to rad/ns
// happens when operators are built.
struct CircuitParams {
    double e_j = 100.0;
    double e_c = 0.01;
    double omega = 10.0;
    double n_g = 0.0;
    double delta_e = 0.0;
    double c_ratio = 0.5;
    int n_max = 40;

    void validate() const;
    int dim() const { return 2 * n_max + 1; }
    double period() const { return 1.0 / omega; }
    double omega_ang() const { return angular(omega); }
};

enum class WaveformKind { Linear, Triangle, Cosine, Constant, Blend };

// External flux phi_ext(t). Blend mixes the drive amplitudes of two
// waveforms, (1 - a(t)) cos phi_from + a(t) cos phi_to, which is how the
// Z-gate and initialisation drives are written.
struct FluxWaveform {
    WaveformKind kind = WaveformKind::Linear;
    double rate = 0.0;   // GHz; 0 selects the circuit drive frequency
    double alpha = 0.0;  // cosine amplitude, rad
    std::shared_ptr<const FluxWaveform> from;
    std::shared_ptr<const FluxWaveform> to;
    std::function<double(double)> envelope;

    static FluxWaveform linear(double rate = 0.0);
    static FluxWaveform triangle(double rate = 0.0);
    static FluxWaveform cosine(double alpha, double rate = 0.0);
    static FluxWaveform constant();
    static FluxWaveform blend(const FluxWaveform& from, const FluxWaveform& to,
                              std::function<double(double)> envelope);

    double phi_ext(double t, double omega_ghz) const;
    // (cos phi_ext, sin phi_ext); amplitude-weighted for Blend.
    std::pair<double, double> trig(double t, double omega_ghz) const;
    // Period of the Hamiltonian generated by this waveform, or 0 if aperiodic.
    double period(double omega_ghz) const;
};

// Coefficients of cos(phi) and sin(phi) in rad/ns.
struct RotorDrive {
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

// H(t) = 4 E_C (n - n_g)^2 + c(t) cos(phi) + s(t) sin(phi).
class RotorHamiltonian {
   public:
    RotorHamiltonian(CircuitParams params, std::function<RotorDrive(double)> drive,
                     double period = 0.0);

    const CircuitParams& params() const { return params_; }
    RotorDrive drive(double t) const { return drive_(t); }
    double period() const { return period_; }
    CMatrix at(double t) const;
    RVector kinetic() const;

    // Adds extra(t) to the cos(phi) coefficient; extra is in rad/ns.
    RotorHamiltonian with_cos_term(std::function<double(double)> extra,
                                   double period) const;

   private:
    CircuitParams params_;
    std::function<RotorDrive(double)> drive_;
    double period_;
};

CMatrix charge_operator(const CircuitParams& params);
CMatrix cos_k_phi(const CircuitParams& params, int k);
CMatrix sin_k_phi(const CircuitParams& params, int k);
CMatrix parity_operator(const CircuitParams& params);

// Flux-driven Kapitzonium in the symmetrised frame:
// -E_J1 cos(phi - phi_ext) - E_J2 cos(phi + phi_ext) with E_J1,2 = E_J (1 +- delta_e)/2.
RotorHamiltonian driven_rotor(const CircuitParams& params, const FluxWaveform& waveform);

CMatrix hamiltonian_at(const CircuitParams& params, const FluxWaveform& waveform, double t);

// Two identical-period Kapitzonia coupled by alpha_xx * envelope * cos(phi_1 - phi_2).
CMatrix two_qubit_hamiltonian_at(const CircuitParams& q1, const CircuitParams& q2,
                                 double alpha_xx_ghz, double envelope, double t);

}  // namespace kapitza
