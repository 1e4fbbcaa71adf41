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

#include <utility>
#include <vector>

#include "kapitza/emission.hpp"
#include "kapitza/linalg.hpp"

namespace kapitza {

// Chain of N linearly coupled modes; frequencies in GHz (value / 2pi for rates).
struct FilterParams {
    int n_modes = 3;
    double omega_f = 10.5;
    double kappa_f = 0.4;
    double g_over_kappa_f = 0.2;
    double j_over_kappa_f = 0.5;
    int fock_cutoff = 3;
    int max_excitations = 2;  // total photon cap, <= 0 disables

    void validate() const;
    double omega_f_ang() const { return angular(omega_f); }
    double kappa_f_ang() const { return angular(kappa_f); }
    double g_ang() const { return g_over_kappa_f * kappa_f_ang(); }
    double j_ang() const { return j_over_kappa_f * kappa_f_ang(); }
    // Cooling rate 4 g^2 / kappa_f after eliminating the chain (rad/ns).
    double kappa_c_ang() const { return 4.0 * g_ang() * g_ang() / kappa_f_ang(); }

    static FilterParams idle_defaults();
    static FilterParams z_defaults();
};

struct FilterSpace {
    std::vector<std::vector<int>> occupations;  // index 0 is the vacuum
    std::vector<CMatrix> lowering;              // a_1 ... a_N

    int dim() const { return static_cast<int>(occupations.size()); }
};

FilterSpace filter_space(const FilterParams& fp);

// omega_f sum a^dag a + J sum (a_k a_{k+1}^dag + h.c.); rotating drops the first term.
CMatrix filter_hamiltonian(const FilterParams& fp, const FilterSpace& space, bool rotating);

// sin^2 ramps of length tau at both ends of [0, t_gate], flat top in between.
struct PulseShape {
    double t_gate = 0.0;
    double tau = 0.0;

    void validate() const;
    double value(double t) const;
};

struct Dissipator {
    double rate = 0.0;  // 1/ns
    TimeOperator op;
};

enum class Frame { Lab, FloquetFrame };

struct OpenSystemSetup {
    int dim = 0;
    TimeOperator hamiltonian;  // empty means H = 0
    std::vector<Dissipator> dissipators;
    Frame frame = Frame::Lab;
    double kappa_h = 0.0;
};

struct LindbladStats {
    double max_trace_drift = 0.0;
    double max_hermiticity = 0.0;
    double min_eigenvalue = 1.0;
};

struct LindbladTrajectory {
    std::vector<double> times;
    std::vector<CMatrix> states;
    LindbladStats stats;
};

// Fixed-step RK4 on the master equation. Records every `record_every` steps
// (0 records only the endpoints).
LindbladTrajectory lindblad_evolve(const OpenSystemSetup& setup, const CMatrix& rho0, double t0,
                                   double t1, double dt, int record_every = 0);

// rate D[A] with A(t) = exp(iEt) P(t) exp(-iEt), P T-periodic.
struct FloquetChannel {
    double rate = 0.0;
    FrequencyPart op;
};

// Master equation in a Floquet frame (H = 0, dissipators built from
// negative-frequency parts), integrated in the co-rotating variable
// rho' = exp(-iEt) rho exp(iEt), whose generator is T-periodic.
class FloquetLindblad {
   public:
    FloquetLindblad(RVector quasienergies, double period, const std::vector<FloquetChannel>& channels,
                    int steps_per_period = 64);

    int dim() const { return static_cast<int>(eps_.size()); }
    double period() const { return period_; }
    double step() const { return period_ / steps_; }

    // Floquet-frame density matrices at t0 -> t0 + duration. Both times must
    // sit on the half-step grid; a whole-period superoperator is used when
    // that is cheaper.
    std::vector<CMatrix> evolve(const std::vector<CMatrix>& rho, double t0, double duration,
                                LindbladStats* stats = nullptr) const;

    // One-period map of the co-rotating variable on column-stacked matrices,
    // starting at grid phase t0.
    CMatrix period_superoperator(double t0) const;

    OpenSystemSetup setup() const;

   private:
    int phase_index(double t) const;
    void rk4_periods(std::vector<CMatrix>& x, int j0, long long n_steps, bool general,
                     LindbladStats* stats) const;
    void rhs(const std::vector<CMatrix>& x, int j, bool general, std::vector<CMatrix>& out) const;

    RVector eps_;
    double period_;
    int steps_;
    std::vector<FloquetChannel> channels_;
    std::vector<std::vector<CMatrix>> a_;  // a_[c][j] = sqrt(rate) P_c(j T / (2 steps))
    std::vector<CMatrix> g_;               // sum_c a^dag a at each cached point
};

// Linear map on an N-dimensional subspace, stored through the images of
// the matrix units |m><n|.
struct QuantumChannel {
    int n_dim = 0;
    std::vector<CMatrix> units;  // units[m * n_dim + n]

    const CMatrix& at(int m, int n) const { return units.at(m * n_dim + n); }
    CMatrix apply(const CMatrix& rho) const;
};

// Physical input states used to probe a channel: |m><m| and, for m < n, the
// two superpositions (|m> + |n>)/sqrt2 and (|m> + i|n>)/sqrt2.
std::vector<CMatrix> channel_probe_states(int n_dim);

// Rebuilds the matrix-unit images from the images of channel_probe_states.
QuantumChannel channel_from_probes(int n_dim, const std::vector<CMatrix>& outputs);

QuantumChannel unitary_channel(const CMatrix& m);
QuantumChannel identity_channel(int n_dim);

double average_fidelity(const QuantumChannel& channel, const CMatrix& target);

}  // namespace kapitza
