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
#include "kapitza/dynamics.hpp"
#include "kapitza/emission.hpp"
#include "kapitza/floquet.hpp"

namespace kapitza {

struct FilterSystemOptions {
    int qubit_levels = 4;
    int n_steps = 2048;          // midpoint steps for the joint one-period propagator
    int n_grid = 256;
    int n_side = 64;
    double extra_cos_ghz = 0.0;  // static extra alpha cos(phi) in the joint Hamiltonian
    bool label = true;           // assign dressed qubit labels (fails on weak overlap)
};

// Qubit (first K Floquet levels of a bare solution, in its micromotion
// frame) coupled to the filter chain through g n (a_1 + a_1^dag):
//   H(t) = diag(eps) (x) 1 + 1 (x) H_f + g n_P(t) (x) (a_1 + a_1^dag) + c cos_P(t) (x) 1.
// The filter is kept in the lab frame so that H(t) stays T-periodic.
struct FilterSystem {
    FilterParams filter;
    FilterSpace space;
    int qubit_levels = 0;
    double period = 0.0;
    RVector bare_quasienergies;
    SidebandExpansion charge;  // periodic part of n in the bare frame
    SidebandExpansion cosine;  // periodic part of cos(phi) in the bare frame
    std::vector<CMatrix> charge_grid;
    CMatrix static_part;
    CMatrix coupling;          // 1 (x) (a_1 + a_1^dag)
    CMatrix output;            // 1 (x) (a_N + a_N^dag)
    double extra_cos = 0.0;    // rad/ns
    FloquetSolution dressed;   // labelled states first when options.label is set
    std::vector<double> label_overlap;

    int dim() const { return static_cast<int>(static_part.rows()); }
    int filter_dim() const { return space.dim(); }
    // Joint basis index of qubit level a with the filter in the vacuum.
    int bare_index(int a) const { return a * space.dim(); }

    // Hamiltonian with the cos(phi) amplitude replaced by cos_amp (rad/ns).
    CMatrix hamiltonian(double t, double cos_amp) const;
    CMatrix hamiltonian(double t) const { return hamiltonian(t, extra_cos); }

    // kappa_h D[n_-] + kappa_f D[(a_N + a_N^dag)_-] in the dressed Floquet frame.
    FloquetLindblad lindblad(double kappa_h, int steps_per_period = 16) const;
};

FilterSystem build_filter_system(const FloquetSolution& bare, const FilterParams& filter,
                                 const FilterSystemOptions& opts);

FilterSystem build_filter_system(const CircuitParams& circuit, const FluxWaveform& waveform,
                                 const FilterParams& filter, const FilterSystemOptions& opts,
                                 const FloquetOptions& floquet = {});

}  // namespace kapitza
