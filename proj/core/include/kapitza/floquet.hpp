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

#include <vector>

#include "kapitza/circuit.hpp"
#include "kapitza/linalg.hpp"

namespace kapitza {

// U(t_j, t0) on a uniform grid t_j = t0 + j T / n_grid, plus U(t0 + T, t0).
struct Propagation {
    double period = 0.0;
    double t0 = 0.0;
    int n_steps = 0;
    std::vector<double> grid;
    std::vector<CMatrix> u_grid;
    CMatrix u_period;
};

// Piecewise-constant midpoint exponentials, U <- exp(-i H(t_mid) dt) U.
Propagation propagate_period(const TimeOperator& h, double period, int n_steps, int n_grid = 256,
                             double t0 = 0.0);

// Fourth-order (Yoshida) composition of midpoint split steps for rotor Hamiltonians.
Propagation propagate_period(const RotorHamiltonian& h, double period, int n_steps,
                             int n_grid = 256, double t0 = 0.0);

// Split-step engine: kinetic term diagonal in the charge basis, the
// c cos(phi) + s sin(phi) term diagonalised once through cos(phi - theta).
class RotorPropagator {
   public:
    explicit RotorPropagator(const RotorHamiltonian& h);

    // Advances the columns of psi from t0 to t1 using n_steps composite steps.
    void evolve(CMatrix& psi, double t0, double t1, int n_steps) const;

    // Second-order variant (one midpoint split step per step), kept for
    // convergence comparisons.
    void evolve_strang(CMatrix& psi, double t0, double t1, int n_steps) const;

    const RotorHamiltonian& hamiltonian() const { return h_; }

   private:
    void strang(RMatrix& x, double t_mid, double h) const;
    void composite(RMatrix& x, double t, double h) const;

    RotorHamiltonian h_;
    RMatrix v_;
    RVector lambda_;
    RVector kinetic_;
    RVector charge_;
};

enum class EffectiveVariant { Linear, Cosine, Disordered };

struct EffectiveModel {
    EffectiveVariant variant = EffectiveVariant::Linear;
    double e_j_tilde = 0.0;  // rad/ns
    double cos_coeff = 0.0;  // rad/ns, coefficient of cos(phi)
    double cos2_coeff = 0.0; // rad/ns, coefficient of cos(2 phi)
    CMatrix hamiltonian;
    RVector energies;
    CMatrix eigenvectors;    // sign fixed: largest-magnitude component positive
};

// alpha_x_ghz adds a static alpha_x cos(phi) term (X-gate hold configuration).
EffectiveModel effective_model(const CircuitParams& params, const FluxWaveform& waveform,
                               double alpha_x_ghz = 0.0);

struct FloquetSolution {
    double period = 0.0;
    double omega_ang = 0.0;
    RVector quasienergies;            // rad/ns, in (-omega/2, omega/2]
    std::vector<double> grid;         // t_j in [0, T)
    std::vector<CMatrix> modes;       // modes[j].col(alpha) = |Phi_alpha(t_j)>
    std::vector<int> eigen_index;     // position of each state in the raw eigen-decomposition
    std::vector<std::vector<int>> degenerate_clusters;
    bool labeled = false;
    bool ambiguous_labels = false;

    int n_states() const { return static_cast<int>(quasienergies.size()); }
    int dim() const { return modes.empty() ? 0 : static_cast<int>(modes.front().rows()); }
    int n_grid() const { return static_cast<int>(grid.size()); }

    // Grid index of time t (t must be commensurate with the grid).
    int grid_index(double t) const;
    // |Psi_alpha(t)> = exp(-i eps t) |Phi_alpha(t mod T)> for the first `count` states.
    CMatrix psi_at(double t, int count) const;
    FloquetSolution truncated(int count) const;
};

FloquetSolution floquet_modes(const Propagation& prop, double omega_ghz);

// Re-indexes states by maximal overlap with effective eigenstates, fixes the
// phase of each mode against the effective eigenvector, and orients the odd
// partner of each pair so that (Psi_2k + Psi_2k+1)/sqrt2 sits at phi = 0.
FloquetSolution label_and_gauge(const FloquetSolution& sol, const EffectiveModel& eff,
                                int n_tracked = 6);

CVector encode(const FloquetSolution& sol, cplx c0, cplx c1);

struct FloquetOptions {
    int n_steps = 4096;
    int n_grid = 256;
    int n_tracked = 6;
};

// propagate_period + floquet_modes + label_and_gauge for a periodic rotor Hamiltonian.
FloquetSolution solve_floquet(const RotorHamiltonian& h, const EffectiveModel& eff,
                              const FloquetOptions& opts);

}  // namespace kapitza
