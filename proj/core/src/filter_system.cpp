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

#include "kapitza/filter_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kapitza {

CMatrix FilterSystem::hamiltonian(double t, double cos_amp) const {
    int f = space.dim();
    CMatrix h = static_part;
    CMatrix np = charge.periodic_part(t);
    CMatrix x1 = space.lowering.front() + space.lowering.front().adjoint();
    h += filter.g_ang() * kron(np, x1);
    if (cos_amp != 0.0) h += cos_amp * kron(cosine.periodic_part(t), CMatrix::Identity(f, f));
    return h;
}

FloquetLindblad FilterSystem::lindblad(double kappa_h, int steps_per_period) const {
    int d = dim();
    int f = space.dim();
    CMatrix idf = CMatrix::Identity(f, f);
    std::vector<CMatrix> charge_ops;
    charge_ops.reserve(charge_grid.size());
    for (const auto& n : charge_grid) charge_ops.push_back(kron(n, idf));
    SidebandExpansion n_exp =
        sideband_coefficients(floquet_frame_operator(dressed, charge_ops, d), charge.n_side, "n");
    SidebandExpansion out_exp =
        sideband_coefficients(floquet_frame_operator(dressed, output, d), charge.n_side, "a_N + a_N^dag");
    std::vector<FloquetChannel> ch;
    ch.push_back({kappa_h, FrequencyPart(n_exp, FrequencySign::Negative, 1e-12)});
    ch.push_back({filter.kappa_f_ang(), FrequencyPart(out_exp, FrequencySign::Negative, 1e-12)});
    return FloquetLindblad(dressed.quasienergies, period, ch, steps_per_period);
}

FilterSystem build_filter_system(const FloquetSolution& bare, const FilterParams& filter,
                                 const FilterSystemOptions& opts) {
    filter.validate();
    if (opts.qubit_levels < 2 || opts.qubit_levels > bare.n_states())
        throw Error("build_filter_system: qubit_levels out of range");
    if (bare.n_grid() != opts.n_grid)
        throw Error("build_filter_system: bare solution grid must match n_grid");
    FilterSystem s;
    s.filter = filter;
    s.space = filter_space(filter);
    s.qubit_levels = opts.qubit_levels;
    s.period = bare.period;
    int k = opts.qubit_levels;
    int f = s.space.dim();
    s.bare_quasienergies = bare.quasienergies.head(k);
    int dq = bare.dim();
    int n_max = (dq - 1) / 2;
    CircuitParams cp;
    cp.n_max = n_max;
    CMatrix n_op = CMatrix::Zero(dq, dq);
    for (int i = 0; i < dq; ++i) n_op(i, i) = i - n_max;
    // The coupling uses the bare charge n; an offset n_g would only add a
    // static displacement drive on the first filter mode.
    FramedOperator fn = floquet_frame_operator(bare, n_op, k);
    FramedOperator fc = floquet_frame_operator(bare, cos_k_phi(cp, 1), k);
    s.charge = sideband_coefficients(fn, opts.n_side, "n");
    s.cosine = sideband_coefficients(fc, opts.n_side, "cos phi");
    s.charge_grid = fn.samples;

    CMatrix idf = CMatrix::Identity(f, f);
    CMatrix idk = CMatrix::Identity(k, k);
    s.static_part = kron(s.bare_quasienergies.cast<cplx>().asDiagonal().toDenseMatrix(), idf) +
                    kron(idk, filter_hamiltonian(filter, s.space, false));
    const CMatrix& a1 = s.space.lowering.front();
    const CMatrix& an = s.space.lowering.back();
    s.coupling = kron(idk, a1 + a1.adjoint());
    s.output = kron(idk, an + an.adjoint());
    s.extra_cos = angular(opts.extra_cos_ghz);

    const FilterSystem& cs = s;
    TimeOperator h = [&cs](double t) { return cs.hamiltonian(t); };
    Propagation prop = propagate_period(h, s.period, opts.n_steps, opts.n_grid);
    FloquetSolution raw = floquet_modes(prop, 1.0 / s.period);

    if (!opts.label) {
        s.dressed = raw;
        return s;
    }
    int ns = raw.n_states();
    std::vector<int> order;
    std::vector<bool> used(ns, false);
    for (int a = 0; a < k; ++a) {
        int best = -1;
        double best_ov = -1.0;
        for (int st = 0; st < ns; ++st) {
            if (used[st]) continue;
            double ov = std::norm(raw.modes[0](s.bare_index(a), st));
            if (ov > best_ov) {
                best_ov = ov;
                best = st;
            }
        }
        used[best] = true;
        order.push_back(best);
        s.label_overlap.push_back(best_ov);
        if (a < 2 && best_ov < 0.9)
            throw Error("build_filter_system: hybridization failure, dressed overlap " +
                        std::to_string(best_ov) + " for qubit level " + std::to_string(a));
    }
    std::vector<int> rest;
    for (int st = 0; st < ns; ++st)
        if (!used[st]) rest.push_back(st);
    std::stable_sort(rest.begin(), rest.end(),
                     [&](int a, int b) { return raw.quasienergies(a) < raw.quasienergies(b); });
    order.insert(order.end(), rest.begin(), rest.end());

    FloquetSolution out = raw;
    out.labeled = true;
    std::vector<cplx> phase(ns, 1.0);
    for (int a = 0; a < k; ++a) {
        cplx o = raw.modes[0](s.bare_index(a), order[a]);
        phase[a] = std::abs(o) > 0.0 ? std::conj(o) / std::abs(o) : cplx(1.0);
    }
    for (int i = 0; i < ns; ++i) {
        out.quasienergies(i) = raw.quasienergies(order[i]);
        out.eigen_index[i] = raw.eigen_index[order[i]];
    }
    for (std::size_t j = 0; j < raw.modes.size(); ++j)
        for (int i = 0; i < ns; ++i) out.modes[j].col(i) = phase[i] * raw.modes[j].col(order[i]);
    s.dressed = std::move(out);
    return s;
}

FilterSystem build_filter_system(const CircuitParams& circuit, const FluxWaveform& waveform,
                                 const FilterParams& filter, const FilterSystemOptions& opts,
                                 const FloquetOptions& floquet) {
    RotorHamiltonian h = driven_rotor(circuit, waveform);
    FloquetOptions fo = floquet;
    fo.n_grid = opts.n_grid;
    FloquetSolution bare = solve_floquet(h, effective_model(circuit, waveform), fo);
    return build_filter_system(bare, filter, opts);
}

}  // namespace kapitza
