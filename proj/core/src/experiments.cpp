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

#include "kapitza/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kapitza {

namespace {

std::string fmt_value(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

}  // namespace

FloquetRun run_floquet(const ExperimentConfig& cfg) {
    FloquetRun r;
    r.circuit = cfg.circuit;
    FluxWaveform w = cfg.flux_waveform();
    r.effective = effective_model(r.circuit, w);
    r.solution = solve_floquet(driven_rotor(r.circuit, w), r.effective, cfg.floquet);
    r.splitting = ordinary(r.solution.quasienergies(1) - r.solution.quasienergies(0));
    return r;
}

double qubit_charge_matrix_max(const FloquetRun& run) {
    CMatrix n = charge_operator(run.circuit);
    double worst = 0.0;
    for (int j = 0; j < run.solution.n_grid(); ++j) {
        const CMatrix& m = run.solution.modes[j];
        CMatrix q = m.leftCols(2).adjoint() * n * m.leftCols(2);
        worst = std::max(worst, q.cwiseAbs().maxCoeff());
    }
    return worst;
}

SpectrumRun run_spectrum(const ExperimentConfig& cfg, bool allow_ambiguous) {
    SpectrumRun r;
    r.circuit = cfg.circuit;
    FluxWaveform w = cfg.flux_waveform();
    const SpectrumConfig& sc = cfg.spectrum;
    RotorHamiltonian h = driven_rotor(r.circuit, w);
    EffectiveModel eff;
    if (sc.setting == SpectrumSetting::X) {
        double a = angular(sc.alpha_x);
        h = h.with_cos_term([a](double) { return a; }, r.circuit.period());
        eff = effective_model(r.circuit, w, sc.alpha_x);
    } else {
        if (sc.setting == SpectrumSetting::Z) {
            r.circuit.omega = sc.omega_z;
            h = driven_rotor(r.circuit, w);
        }
        eff = effective_model(r.circuit, w);
    }
    FloquetOptions fo = cfg.floquet;
    fo.n_tracked = std::max(fo.n_tracked, sc.levels);
    r.solution = solve_floquet(h, eff, fo);

    CMatrix op;
    std::string name;
    switch (sc.op) {
        case SpectrumOperator::CosPhi:
            op = cos_k_phi(r.circuit, 1);
            name = "cos_phi";
            break;
        case SpectrumOperator::Identity:
            op = CMatrix::Identity(r.circuit.dim(), r.circuit.dim());
            name = "identity";
            break;
        default:
            op = charge_operator(r.circuit);
            name = "n";
    }
    int levels = std::min(sc.levels, r.solution.n_states());
    r.expansion = sideband_coefficients(floquet_frame_operator(r.solution, op, levels), sc.n_side, name);
    r.lines = emission_lines(r.expansion, sc.threshold);
    r.rates = transition_rates(r.expansion);
    bool has_sidebands = std::any_of(r.lines.begin(), r.lines.end(),
                                     [](const EmissionLine& l) { return l.n != 0 && l.emission_allowed(); });
    if (sc.op != SpectrumOperator::Identity && levels >= 4 && has_sidebands) {
        r.dominant = dominant_lines(r.expansion, allow_ambiguous);
        r.metrics = protection_metrics(*r.dominant);
    }
    return r;
}

SweepPoint sweep_point(const ExperimentConfig& cfg, const std::string& parameter, double value) {
    SweepPoint p;
    p.value = value;
    try {
        ExperimentConfig c = cfg;
        apply_setting(c, parameter + "=" + fmt_value(value));
        c.validate();
        SpectrumRun r = run_spectrum(c, true);
        int k = std::min(r.solution.n_states(), c.spectrum.levels);
        for (int i = 0; i < k; ++i) p.quasienergies.push_back(ordinary(r.solution.quasienergies(i)));
        p.splitting = ordinary(r.solution.quasienergies(1) - r.solution.quasienergies(0));
        if (!r.dominant) throw Error("sweep: no sideband emission lines for the configured operator");
        p.lines = {ordinary(r.dominant->w02), ordinary(r.dominant->w13), ordinary(r.dominant->w20),
                   ordinary(r.dominant->w31)};
        p.line_difference = p.lines.w20 - p.lines.w31;
        p.gamma_10 = r.rates(1, 0);
        p.gamma_01 = r.rates(0, 1);
        p.gamma_00 = r.rates(0, 0);
        p.gamma_11 = r.rates(1, 1);
        p.ok = true;
    } catch (const std::exception& e) {
        p.ok = false;
        p.error = e.what();
    }
    return p;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, int n_threads) {
    if (cfg.sweep.parameter.empty()) throw Error("sweep: sweep.parameter is not set");
    if (cfg.sweep.values.empty()) throw Error("sweep: sweep.values is empty");
    std::vector<SweepPoint> out(cfg.sweep.values.size());
    parallel_for(static_cast<int>(out.size()), n_threads,
                 [&](int i) { out[i] = sweep_point(cfg, cfg.sweep.parameter, cfg.sweep.values[i]); });
    return out;
}

}  // namespace kapitza
