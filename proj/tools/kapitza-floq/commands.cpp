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

#include "commands.hpp"

#include <algorithm>
#include <cmath>

#include "kapitza/experiments.hpp"
#include "kapitza/gates.hpp"
#include "kapitza/measurement.hpp"

namespace kapitza::cli {

namespace {

using nlohmann::json;

std::string num(double v) { return format_number(v); }

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

// True when the circuit matches the reference device apart from the drive
// frequency, which is compared separately.
bool reference_circuit(const CircuitParams& c, double omega) {
    CircuitParams d;
    return near(c.e_j, d.e_j) && near(c.e_c, d.e_c) && near(c.n_g, d.n_g) && near(c.delta_e, d.delta_e) &&
           near(c.c_ratio, d.c_ratio) && near(c.omega, omega);
}

bool within(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

std::string band(double target, double rel) { return num(target) + " +/- " + num(rel * 100.0) + "%"; }

json lines_json(const DominantLines& l) {
    return {{"w02_ghz", ordinary(l.w02)}, {"w13_ghz", ordinary(l.w13)}, {"w20_ghz", ordinary(l.w20)},
            {"w31_ghz", ordinary(l.w31)}};
}

json channel_json(const QuantumChannel& ch) {
    json units = json::array();
    for (const auto& u : ch.units) {
        json m = json::array();
        for (Eigen::Index r = 0; r < u.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < u.cols(); ++c) row.push_back({u(r, c).real(), u(r, c).imag()});
            m.push_back(row);
        }
        units.push_back(m);
    }
    return {{"n_dim", ch.n_dim}, {"matrix_units", units}};
}

json gate_json(const GateResult& r) {
    json j = {{"kind", to_string(r.kind)},
              {"mode", to_string(r.mode)},
              {"average_fidelity", r.avg_fidelity},
              {"infidelity", r.infidelity},
              {"leakage", r.leakage},
              {"alpha_used", r.alpha_used},
              {"t_gate_used_ns", r.t_gate_used},
              {"min_label_overlap", r.min_label_overlap}};
    if (r.has_reference) {
        j["reference_infidelity"] = r.reference_infidelity;
        j["excess_infidelity"] = r.excess_infidelity;
    }
    json sf = json::object();
    for (const auto& [name, f] : r.state_fidelities) sf[name] = f;
    j["state_fidelities"] = sf;
    if (r.mode != GateMode::Unitary)
        j["lindblad"] = {{"max_trace_drift", r.stats.max_trace_drift},
                         {"max_hermiticity", r.stats.max_hermiticity},
                         {"min_eigenvalue", r.stats.min_eigenvalue}};
    j["channel"] = channel_json(r.channel);
    return j;
}

}  // namespace

void cmd_floquet(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out) {
    FloquetRun run = run_floquet(cfg);
    const FloquetSolution& sol = run.solution;
    const EffectiveModel& eff = run.effective;
    int k = std::min<int>(sol.n_states(), static_cast<int>(eff.energies.size()));
    k = std::min(k, cfg.floquet.n_tracked);

    CsvTable q({"alpha", "label", "epsilon_over_2pi_ghz", "gap_ghz", "effective_gap_ghz", "relative_difference"});
    double worst = 0.0;
    for (int a = 0; a < k; ++a) {
        double gap = ordinary(std::remainder(sol.quasienergies(a) - sol.quasienergies(0), sol.omega_ang));
        double egap = ordinary(eff.energies(a) - eff.energies(0));
        double rel = a == 0 ? 0.0 : std::abs(gap - egap) / std::abs(egap);
        worst = std::max(worst, rel);
        std::string label = sol.labeled ? "Psi_" + std::to_string(a) : "raw_" + std::to_string(sol.eigen_index[a]);
        q.add({std::to_string(a), label, num(ordinary(sol.quasienergies(a))), num(gap), num(egap), num(rel)});
    }
    out.write_csv("quasienergies.csv", q);

    CMatrix cosphi = cos_k_phi(run.circuit, 1);
    CMatrix n = charge_operator(run.circuit);
    CMatrix n2 = n * n;
    CsvTable mm({"state", "t_ns", "cos_phi", "charge_mean", "charge_rms"});
    for (int j = 0; j < sol.n_grid(); ++j) {
        for (int a = 0; a < k; ++a) {
            CVector v = sol.modes[j].col(a);
            double c = v.dot(cosphi * v).real();
            double m1 = v.dot(n * v).real();
            double m2 = v.dot(n2 * v).real();
            mm.add({std::to_string(a), num(sol.grid[j]), num(c), num(m1), num(std::sqrt(std::max(0.0, m2 - m1 * m1)))});
        }
    }
    out.write_csv("micromotion.csv", mm);

    std::vector<std::string> header = {"phi", "effective_potential_ghz"};
    for (int a = 0; a < k; ++a) header.push_back("density_" + std::to_string(a));
    CsvTable loc(header);
    const int n_phi = 256;
    int nmax = run.circuit.n_max;
    for (int p = 0; p < n_phi; ++p) {
        double phi = kTwoPi * (static_cast<double>(p) / n_phi - 0.5);
        double v = ordinary(eff.cos_coeff * std::cos(phi) + eff.cos2_coeff * std::cos(2.0 * phi));
        std::vector<std::string> row = {num(phi), num(v)};
        for (int a = 0; a < k; ++a) {
            cplx amp = 0.0;
            for (int m = -nmax; m <= nmax; ++m) amp += sol.modes[0](m + nmax, a) * std::polar(1.0, m * phi);
            row.push_back(num(std::norm(amp) / kTwoPi));
        }
        loc.add(row);
    }
    out.write_csv("modes.csv", loc);

    json summary = {{"splitting_khz", run.splitting * 1e6},
                    {"labeled", sol.labeled},
                    {"ambiguous_labels", sol.ambiguous_labels},
                    {"max_effective_gap_relative_difference", worst}};
    out.write_json("floquet.json", summary);
    if (sol.ambiguous_labels) out.warn("Floquet state labels are ambiguous");

    if (!ctx.check) return;
    out.check("effective_spectrum_match", worst <= 0.05, worst, "<= 0.05");
    if (reference_circuit(run.circuit, 10.0))
        out.check("splitting_idle_khz", within(run.splitting * 1e6, 4.7, 0.15), run.splitting * 1e6, band(4.7, 0.15));
    if (reference_circuit(run.circuit, 20.0))
        out.check("splitting_z_mhz", within(run.splitting * 1e3, 1.8, 0.10), run.splitting * 1e3, band(1.8, 0.10));
    if (run.circuit.n_g == 0.0 && run.circuit.delta_e == 0.0) {
        double m = qubit_charge_matrix_max(run);
        out.check("parity_selection", m < 1e-9, m, "< 1e-9");
    }
}

void cmd_spectrum(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out) {
    SpectrumRun r = run_spectrum(cfg);
    CsvTable e({"alpha", "beta", "n", "freq_over_2pi_ghz", "weight", "emission_allowed"});
    for (const auto& l : r.lines)
        e.add({std::to_string(l.alpha), std::to_string(l.beta), std::to_string(l.n), num(ordinary(l.frequency)),
               num(l.weight), l.emission_allowed() ? "1" : "0"});
    out.write_csv("emission.csv", e);

    double kappa_c = cfg.filter.resolve(cfg.spectrum.setting == SpectrumSetting::Z).kappa_c_ang();
    CsvTable m({"delta_mhz", "b_mhz", "kappa_c_mhz", "w02_ghz", "w13_ghz", "w20_ghz", "w31_ghz"});
    if (r.dominant) {
        const DominantLines& d = *r.dominant;
        m.add({num(ordinary(r.metrics->delta) * 1e3), num(ordinary(r.metrics->b_spacing) * 1e3),
               num(ordinary(kappa_c) * 1e3), num(ordinary(d.w02)), num(ordinary(d.w13)), num(ordinary(d.w20)),
               num(ordinary(d.w31))});
    }
    out.write_csv("metrics.csv", m);

    CsvTable g({"alpha", "beta", "gamma"});
    for (int a = 0; a < r.rates.rows(); ++a)
        for (int b = 0; b < r.rates.cols(); ++b) g.add({std::to_string(a), std::to_string(b), num(r.rates(a, b))});
    out.write_csv("rates.csv", g);
    if (r.expansion.aliasing_warning) out.warn("sideband expansion may be aliased; increase floquet.n_grid");

    if (!ctx.check || !r.dominant || cfg.spectrum.op != SpectrumOperator::Charge) return;
    const SpectrumConfig& sc = cfg.spectrum;
    double delta_mhz = ordinary(r.metrics->delta) * 1e3;
    if (sc.setting == SpectrumSetting::Idle && reference_circuit(cfg.circuit, 10.0)) {
        for (auto [name, w] : {std::pair{"heating_w02_ghz", r.dominant->w02}, {"heating_w13_ghz", r.dominant->w13}})
            out.check(name, within(ordinary(w), 9.5, 0.01), ordinary(w), band(9.5, 0.01));
        for (auto [name, w] : {std::pair{"cooling_w20_ghz", r.dominant->w20}, {"cooling_w31_ghz", r.dominant->w31}})
            out.check(name, within(ordinary(w), 10.5, 0.01), ordinary(w), band(10.5, 0.01));
        out.check("idle_delta_mhz", within(delta_mhz, 0.2, 0.5), delta_mhz, band(0.2, 0.5));
    }
    if (sc.setting == SpectrumSetting::X && reference_circuit(cfg.circuit, 10.0) && near(sc.alpha_x, 0.0052))
        out.check("x_gate_delta_mhz", within(delta_mhz, 0.8, 0.3), delta_mhz, band(0.8, 0.3));
    if (sc.setting == SpectrumSetting::Z && reference_circuit(cfg.circuit, 10.0) && near(sc.omega_z, 20.0)) {
        double b = ordinary(r.metrics->b_spacing) * 1e3;
        out.check("z_gate_b_spacing_mhz", within(b, 468.0, 0.05), b, band(468.0, 0.05));
        out.check("z_gate_delta_mhz", within(delta_mhz, 27.0, 0.2), delta_mhz, band(27.0, 0.2));
    }
}

void cmd_gate(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out) {
    FilterParams filter = cfg.gate_filter();
    GateResult r = run_gate(cfg.circuit, cfg.gate, cfg.gate_mode, filter);
    json report = gate_json(r);
    report["params"] = {{"t_gate_ns", cfg.gate.t_gate},
                        {"tau_ns", cfg.gate.tau},
                        {"alpha", cfg.gate.alpha},
                        {"n_steps", cfg.gate.n_steps},
                        {"calibrate", cfg.gate.calibrate},
                        {"kappa_h_inv_us", cfg.gate.kappa_h_inv_us}};
    if (r.min_label_overlap < 0.9) out.warn("dressed-state labeling overlap below 0.9");

    bool compare = ctx.check && cfg.gate_mode == GateMode::OpenWithFilter &&
                   (cfg.gate.kind == GateKind::Idle || cfg.gate.kind == GateKind::X);
    double ratio = 0.0;
    if (compare) {
        GateResult bare = run_gate(cfg.circuit, cfg.gate, GateMode::OpenNoFilter, filter);
        ratio = bare.infidelity / std::max(r.excess_infidelity, 1e-300);
        report["without_filter"] = {{"infidelity", bare.infidelity}, {"leakage", bare.leakage}};
        report["protection_ratio"] = ratio;
        report["protection_ratio_absolute"] = bare.infidelity / r.infidelity;
    }
    out.write_json("gate_report.json", report);

    if (!ctx.check) return;
    if (cfg.gate.t_gate == 0.0) {
        out.check("zero_duration_identity", std::abs(1.0 - r.avg_fidelity) <= 1e-9, r.avg_fidelity, "1 +/- 1e-9");
        return;
    }
    if (cfg.gate_mode == GateMode::Unitary) {
        double bound = cfg.gate.kind == GateKind::Z ? 1e-5 : 1e-6;
        if (cfg.gate.kind == GateKind::X || cfg.gate.kind == GateKind::Z || cfg.gate.kind == GateKind::XX)
            out.check("unitary_infidelity", r.infidelity <= bound, r.infidelity, "<= " + num(bound));
    }
    if (compare) out.check("filter_protection_ratio", ratio >= 50.0, ratio, ">= 50");
    if (cfg.gate_mode == GateMode::OpenWithFilter && cfg.gate.kind == GateKind::Z) {
        double f0 = 0, f1 = 0, fp = 0, fm = 0;
        for (const auto& [name, f] : r.state_fidelities) {
            if (name == "psi0") f0 = f;
            if (name == "psi1") f1 = f;
            if (name == "plus") fp = f;
            if (name == "minus") fm = f;
        }
        double margin = std::min(f0, f1) - std::max(fp, fm);
        double noise = 10.0 * std::max(r.stats.max_trace_drift, r.stats.max_hermiticity) + 1e-6;
        out.check("z_selective_protection", margin > noise, margin, "> " + num(noise));
    }
}

void cmd_measure(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out) {
    MeasurementModel model = measurement_model(cfg.circuit, cfg.measurement());
    for (const auto& w : model.warnings) out.warn(w);
    FidelityEstimate est = measurement_fidelity(model, cfg.n_traj, ctx.threads);

    CsvTable t({"seed", "s_signal", "outcome", "final_p0", "final_p1", "s20", "s31", "ambiguous", "jumps"});
    for (const auto& s : est.trajectories)
        t.add({std::to_string(s.seed), num(s.cls.s_signal), std::to_string(s.cls.outcome), num(s.final_p0),
               num(s.final_p1), num(s.cls.s20), num(s.cls.s31), s.cls.ambiguous ? "1" : "0",
               std::to_string(s.jumps)});
    out.write_csv("trajectories.csv", t);

    int n_files = std::min(cfg.spectrum_files, cfg.n_traj);
    for (int i = 0; i < n_files; ++i) {
        std::uint64_t seed = model.cfg.seed + static_cast<std::uint64_t>(i);
        TrajectoryRecord rec = simulate_trajectory(model, model.initial_state(), seed);
        Spectrum sp = power_spectrum(rec.record, rec.dt_record);
        CsvTable s({"frequency_offset_ghz", "power"});
        for (std::size_t k = 0; k < sp.freq.size(); ++k) s.add({num(sp.freq[k]), num(sp.power[k])});
        out.write_csv("spectrum_" + std::to_string(seed) + ".csv", s);
        CsvTable rr({"t_ns", "record_re", "record_im"});
        for (std::size_t k = 0; k < rec.record.size(); ++k)
            rr.add({num((k + 1) * rec.dt_record), num(rec.record[k].real()), num(rec.record[k].imag())});
        out.write_csv("record_" + std::to_string(seed) + ".csv", rr);
        CsvTable pp({"t_ns", "p0", "p1", "p2", "p3"});
        for (std::size_t k = 0; k < rec.populations.size(); ++k) {
            const auto& p = rec.populations[k];
            pp.add({num(k * rec.population_dt), num(p[0]), num(p[1]), num(p[2]), num(p[3])});
        }
        out.write_csv("populations_" + std::to_string(seed) + ".csv", pp);
    }

    double p1 = static_cast<double>(est.outcome1) / est.n;
    double sigma = std::sqrt(0.25 / est.n);
    json f = {{"basis", to_string(cfg.measure.basis)},
              {"n_traj", est.n},
              {"correct", est.correct},
              {"fidelity", est.fidelity},
              {"ci95", {est.ci_low, est.ci_high}},
              {"ambiguous", est.ambiguous},
              {"outcome_counts", {est.n - est.outcome1, est.outcome1}},
              {"duration_us", cfg.measure.duration * 1e-3},
              {"collection_efficiency", 1.0},
              {"lines_ghz", lines_json(model.lines)},
              {"drive_ghz", {ordinary(model.drive1), ordinary(model.drive2)}},
              {"windows_ghz", {model.window20, model.window31}},
              {"window_halfwidth_mhz", cfg.measure.window_width * 1e3},
              {"delta_mhz", ordinary(model.delta) * 1e3}};
    EnsembleCheck ens;
    if (cfg.ensemble_n > 0) {
        ens = ensemble_vs_master(model, cfg.ensemble_n, cfg.ensemble_duration, ctx.threads);
        f["ensemble_check"] = {{"n", ens.n},
                               {"duration_ns", ens.duration},
                               {"master", ens.master},
                               {"mean", ens.mean},
                               {"stderr", ens.stderr_},
                               {"max_z", ens.max_z}};
    }
    out.write_json("fidelity.json", f);

    if (!ctx.check) return;
    double target = cfg.measure.basis == MeasurementBasis::X ? 0.98 : 0.985;
    out.check("measurement_fidelity", est.fidelity >= target, est.fidelity, ">= " + num(target));
    out.check("outcome_balance", std::abs(p1 - 0.5) <= 3.0 * sigma, p1, "0.5 +/- " + num(3.0 * sigma));
    if (cfg.ensemble_n > 0) out.check("ensemble_vs_master_z", ens.max_z <= 3.0, ens.max_z, "<= 3");
}

void cmd_sweep(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out) {
    std::vector<SweepPoint> pts = run_sweep(cfg, ctx.threads);
    const std::string& param = cfg.sweep.parameter;
    CsvTable t({"parameter", "value", "status", "quantity", "result"});
    for (const auto& p : pts) {
        std::string v = num(p.value);
        if (!p.ok) {
            t.add({param, v, "error", "error", ""});
            out.warn(param + "=" + v + ": " + p.error);
            continue;
        }
        auto row = [&](const std::string& q, double x) { t.add({param, v, "ok", q, num(x)}); };
        for (std::size_t i = 0; i < p.quasienergies.size(); ++i) row("eps_" + std::to_string(i) + "_ghz", p.quasienergies[i]);
        row("splitting_khz", p.splitting * 1e6);
        row("w02_ghz", p.lines.w02);
        row("w13_ghz", p.lines.w13);
        row("w20_ghz", p.lines.w20);
        row("w31_ghz", p.lines.w31);
        row("w20_minus_w31_khz", p.line_difference * 1e6);
        row("gamma_1_0", p.gamma_10);
        row("gamma_0_1", p.gamma_01);
        row("gamma_0_0", p.gamma_00);
        row("gamma_1_1", p.gamma_11);
    }
    out.write_csv("sweep.csv", t);

    if (!ctx.check) return;
    bool all_ok = std::all_of(pts.begin(), pts.end(), [](const SweepPoint& p) { return p.ok; });
    out.check("sweep_points_ok", all_ok, all_ok ? 1.0 : 0.0, "all points succeed");
    if (param == "circuit.n_g" && near(cfg.circuit.omega, 20.0)) {
        for (const auto& p : pts) {
            if (!p.ok || !near(p.value, 0.5)) continue;
            out.check("degenerate_splitting_khz", std::abs(p.splitting) * 1e6 < 50.0, p.splitting * 1e6, "|x| < 50");
            out.check("degenerate_line_difference_khz", std::abs(p.line_difference) * 1e6 < 50.0,
                      p.line_difference * 1e6, "|x| < 50");
        }
    }
    if (param == "circuit.e_j_ghz" && all_ok && pts.size() > 1) {
        bool bit = true, ph0 = true, ph1 = true;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            bool up = pts[i].value > pts[i - 1].value;
            auto dec = [up](double prev, double cur) { return up ? cur < prev : cur > prev; };
            bit = bit && dec(pts[i - 1].gamma_10, pts[i].gamma_10);
            ph0 = ph0 && dec(pts[i - 1].gamma_00, pts[i].gamma_00);
            ph1 = ph1 && dec(pts[i - 1].gamma_11, pts[i].gamma_11);
        }
        out.check("bit_flip_decreasing", bit, pts.back().gamma_10, "strictly decreasing in e_j");
        out.check("phase_flip_decreasing", ph0 && ph1, pts.back().gamma_00, "strictly decreasing in e_j");
    }
}

}  // namespace kapitza::cli
