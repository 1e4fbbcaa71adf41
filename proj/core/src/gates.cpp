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

#include "kapitza/gates.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>

namespace kapitza {

namespace {

constexpr int kGrid = 256;

double wrap_phase(double x) {
    x = std::remainder(x, kTwoPi);
    return x <= -std::numbers::pi ? x + kTwoPi : x;
}

FloquetOptions frame_options(const GateParams& p, double period, double idle_period) {
    FloquetOptions fo;
    int steps = static_cast<int>(std::llround(p.floquet_steps * period / idle_period));
    steps = std::max(kGrid, steps / kGrid * kGrid);
    fo.n_steps = steps;
    fo.n_grid = kGrid;
    fo.n_tracked = 6;
    return fo;
}

FloquetSolution idle_solution(const CircuitParams& c, const GateParams& p) {
    FluxWaveform w = FluxWaveform::linear();
    return solve_floquet(driven_rotor(c, w), effective_model(c, w), frame_options(p, c.period(), c.period()));
}

struct HoldSpec {
    RotorHamiltonian h;
    EffectiveModel eff;
    CMatrix charge;
    double period;
};

HoldSpec hold_spec(GateKind kind, const CircuitParams& c, double alpha) {
    FluxWaveform w = FluxWaveform::linear();
    if (kind == GateKind::X) {
        double a = angular(alpha);
        RotorHamiltonian h = driven_rotor(c, w).with_cos_term([a](double) { return a; }, c.period());
        return {h, effective_model(c, w, alpha), charge_operator(c), c.period()};
    }
    if (kind == GateKind::Z) {
        CircuitParams cz = c;
        cz.omega = alpha;
        return {driven_rotor(cz, w), effective_model(cz, w), charge_operator(cz), cz.period()};
    }
    return {driven_rotor(c, w), effective_model(c, w), charge_operator(c), c.period()};
}

int ramp_steps(double duration, double idle_period, int n_steps) {
    return std::max(1, static_cast<int>(std::llround(duration / idle_period * n_steps)));
}

CMatrix propagate_columns(const RotorHamiltonian& h, CMatrix psi, double t0, double t1,
                          double idle_period, int n_steps) {
    if (t1 - t0 <= 1e-12) return psi;
    RotorPropagator prop(h);
    prop.evolve(psi, t0, t1, ramp_steps(t1 - t0, idle_period, n_steps));
    return psi;
}

CMatrix unitary_power(const CMatrix& u, long long k) {
    UnitaryEigen e = unitary_eigen(u);
    CVector lk(e.values.size());
    for (Eigen::Index i = 0; i < e.values.size(); ++i)
        lk(i) = std::polar(std::pow(std::abs(e.values(i)), static_cast<double>(k)),
                           static_cast<double>(k) * std::arg(e.values(i)));
    return e.vectors * lk.asDiagonal() * e.vectors.adjoint();
}

bool on_multiple(double t, double period) {
    double s = t / period;
    return std::abs(s - std::round(s)) < 1e-9 * std::max(1.0, s);
}

// Propagates psi across the hold [tau, t_gate - tau] with the one-period
// propagator of the hold Hamiltonian, finishing any fractional period with
// the full gate Hamiltonian.
CMatrix apply_hold(const HoldSpec& hold, const CMatrix& u_period, const RotorHamiltonian& h_gate,
                   CMatrix psi, double t0, double t1, double idle_period, int n_steps) {
    double len = t1 - t0;
    if (len <= 1e-12) return psi;
    if (!on_multiple(t0, hold.period)) return propagate_columns(h_gate, psi, t0, t1, idle_period, n_steps);
    long long k = static_cast<long long>(std::floor(len / hold.period + 1e-9));
    psi = unitary_power(u_period, k) * psi;
    return propagate_columns(h_gate, psi, t0 + k * hold.period, t1, idle_period, n_steps);
}

CMatrix hold_period_propagator(const HoldSpec& hold, double idle_period, int n_steps) {
    int steps = std::max(1, static_cast<int>(std::llround(n_steps * hold.period / idle_period)));
    return propagate_period(hold.h, hold.period, steps, 1).u_period;
}

CMatrix embed_qubit(const CMatrix& rho2, int dim, int i0, int i1) {
    CMatrix r = CMatrix::Zero(dim, dim);
    int idx[2] = {i0, i1};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) r(idx[a], idx[b]) = rho2(a, b);
    return r;
}

CMatrix project_qubit(const CMatrix& rho, int i0, int i1) {
    CMatrix r(2, 2);
    int idx[2] = {i0, i1};
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) r(a, b) = rho(idx[a], idx[b]);
    return r;
}

double channel_leakage(const QuantumChannel& ch) {
    double kept = 0.0;
    for (int m = 0; m < ch.n_dim; ++m) kept += ch.at(m, m).trace().real();
    return 1.0 - kept / ch.n_dim;
}

void finish(GateResult& r) {
    r.avg_fidelity = average_fidelity(r.channel, r.target);
    r.infidelity = 1.0 - r.avg_fidelity;
    r.leakage = channel_leakage(r.channel);
    if (r.has_reference) r.excess_infidelity = r.infidelity - r.reference_infidelity;
}

// Secant search for a root of f, starting from x0 and x1.
template <class F>
double secant(F f, double x0, double x1, double tol, int max_iter) {
    double f0 = f(x0);
    double f1 = f(x1);
    for (int i = 0; i < max_iter && std::abs(f1) > tol && f1 != f0; ++i) {
        double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
    }
    return x1;
}

// ---- single-qubit segmented gates (X, Z) ----

struct SingleQubit {
    const CircuitParams& c;
    GateParams p;
    FloquetSolution idle;
    double idle_period;

    SingleQubit(const CircuitParams& circuit, const GateParams& params)
        : c(circuit), p(params), idle(idle_solution(circuit, params)), idle_period(circuit.period()) {}

    // 2x2 map on {Psi_0, Psi_1} for amplitude/frequency alpha and gate length t_gate.
    CMatrix unitary(double alpha, double t_gate) const {
        GateParams gp = p;
        gp.alpha = alpha;
        gp.t_gate = t_gate;
        HoldSpec hold = hold_spec(p.kind, c, alpha);
        RotorHamiltonian hg = gate_hamiltonian(p.kind, c, gp);
        CMatrix u = hold_period_propagator(hold, idle_period, p.n_steps);
        CMatrix psi = idle.psi_at(0.0, 2);
        psi = propagate_columns(hg, psi, 0.0, gp.tau, idle_period, p.n_steps);
        psi = apply_hold(hold, u, hg, psi, gp.tau, t_gate - gp.tau, idle_period, p.n_steps);
        psi = propagate_columns(hg, psi, t_gate - gp.tau, t_gate, idle_period, p.n_steps);
        return idle.psi_at(t_gate, 2).adjoint() * psi;
    }

    void calibrate(double& alpha, double& t_gate) const {
        if (p.kind == GateKind::X) {
            auto f = [&](double a) {
                return wrap_phase(rotation_phase(GateKind::X, unitary(a, t_gate)) - std::numbers::pi);
            };
            alpha = secant(f, alpha, alpha * 1.001, 1e-7, 6);
        } else if (p.kind == GateKind::Z) {
            double tz = 1.0 / alpha;
            double ph0 = rotation_phase(GateKind::Z, unitary(alpha, t_gate));
            double ph1 = rotation_phase(GateKind::Z, unitary(alpha, t_gate + tz));
            double slope = wrap_phase(ph1 - ph0);
            if (std::abs(slope) < 1e-12) return;
            long long dk = std::llround(wrap_phase(std::numbers::pi - ph0) / slope);
            double tg = t_gate + dk * tz;
            if (tg >= 2.0 * p.tau) t_gate = tg;
        }
    }
};

QuantumChannel single_qubit_open(const SingleQubit& sq, double alpha, double t_gate, double kappa_h,
                                 LindbladStats& stats) {
    const GateParams& p = sq.p;
    int k = p.levels;
    GateParams gp = p;
    gp.alpha = alpha;
    gp.t_gate = t_gate;
    HoldSpec hold = hold_spec(p.kind, sq.c, alpha);
    RotorHamiltonian hg = gate_hamiltonian(p.kind, sq.c, gp);
    double t_up = gp.tau;
    double t_down = t_gate - gp.tau;
    FloquetSolution s1 =
        solve_floquet(hold.h, hold.eff, frame_options(p, hold.period, sq.idle_period)).truncated(k);

    CMatrix psi = propagate_columns(hg, sq.idle.psi_at(0.0, 2), 0.0, t_up, sq.idle_period, p.n_steps);
    CMatrix r_up = s1.psi_at(t_up, k).adjoint() * psi;
    CMatrix cols = propagate_columns(hg, s1.psi_at(t_down, k), t_down, t_gate, sq.idle_period, p.n_steps);
    CMatrix r_down = sq.idle.psi_at(t_gate, 2).adjoint() * cols;

    SidebandExpansion n_exp = sideband_coefficients(floquet_frame_operator(s1, hold.charge, k), 64, "n");
    FloquetLindblad lind(s1.quasienergies, hold.period,
                         {{kappa_h, FrequencyPart(n_exp, FrequencySign::Negative, 1e-12)}},
                         p.lindblad_steps);
    std::vector<CMatrix> inputs;
    for (const auto& probe : channel_probe_states(2)) inputs.push_back(r_up * probe * r_up.adjoint());
    std::vector<CMatrix> held = lind.evolve(inputs, t_up, t_down - t_up, &stats);
    std::vector<CMatrix> outputs;
    for (const auto& r : held) outputs.push_back(r_down * r * r_down.adjoint());
    return channel_from_probes(2, outputs);
}

// ---- XX gate in the interaction frame of the two idle Floquet solutions ----

CMatrix xx_unitary(const FloquetSolution& idle, const CircuitParams& c, const GateParams& p,
                   double alpha) {
    int k = std::min(p.levels, idle.n_states());
    int ng = idle.n_grid();
    int steps = ng / 2;
    double period = idle.period;
    double dt = period / steps;
    CMatrix cosop = cos_k_phi(c, 1);
    CMatrix sinop = sin_k_phi(c, 1);
    std::vector<CMatrix> cp(ng), sp(ng);
    for (int j = 0; j < ng; ++j) {
        auto m = idle.modes[j].leftCols(k);
        cp[j] = m.adjoint() * cosop * m;
        sp[j] = m.adjoint() * sinop * m;
    }
    PulseShape pulse = p.pulse();
    double amp = angular(alpha);
    RVector eps = idle.quasienergies.head(k);
    auto h_at = [&](long long half_index) {
        double t = half_index * 0.5 * dt;
        int j = static_cast<int>(half_index % ng);
        double a = amp * pulse.value(t);
        int k2 = k * k;
        if (a == 0.0) return CMatrix(CMatrix::Zero(k2, k2));
        CVector ph = (kI * t * eps.cast<cplx>()).array().exp();
        CMatrix ci = ph.asDiagonal() * cp[j] * ph.conjugate().asDiagonal();
        CMatrix si = ph.asDiagonal() * sp[j] * ph.conjugate().asDiagonal();
        return CMatrix(a * (kron(ci, ci) + kron(si, si)));
    };
    int k2 = k * k;
    std::vector<int> idx = {0, 1, k, k + 1};
    CMatrix psi = CMatrix::Zero(k2, 4);
    for (int i = 0; i < 4; ++i) psi(idx[i], i) = 1.0;
    long long n = std::llround(p.t_gate / dt);
    for (long long s = 0; s < n; ++s) {
        CMatrix h0 = h_at(2 * s);
        CMatrix hm = h_at(2 * s + 1);
        CMatrix h1 = h_at(2 * s + 2);
        CMatrix k1 = -kI * (h0 * psi);
        CMatrix k2m = -kI * (hm * (psi + 0.5 * dt * k1));
        CMatrix k3 = -kI * (hm * (psi + 0.5 * dt * k2m));
        CMatrix k4 = -kI * (h1 * (psi + dt * k3));
        psi += (dt / 6.0) * (k1 + 2.0 * k2m + 2.0 * k3 + k4);
    }
    CMatrix m(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) m(a, b) = psi(idx[a], b);
    return m;
}

// ---- joint qubit + filter protocols ----

CMatrix joint_ramp(const FilterSystem& sys, double amp, const PulseShape& pulse, double t_offset,
                   double t0, double t1, int steps_per_period) {
    int d = sys.dim();
    CMatrix u = CMatrix::Identity(d, d);
    if (t1 - t0 <= 1e-12) return u;
    int n = std::max(1, static_cast<int>(std::llround((t1 - t0) / sys.period * steps_per_period)));
    double dt = (t1 - t0) / n;
    for (int s = 0; s < n; ++s) {
        double tm = t0 + (s + 0.5) * dt;
        u = expm_hermitian(sys.hamiltonian(tm, amp * pulse.value(tm - t_offset)), dt) * u;
    }
    return u;
}

CMatrix conjugate(const CMatrix& u, const CMatrix& rho) { return u * rho * u.adjoint(); }

}  // namespace

std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::Idle: return "idle";
        case GateKind::X: return "x";
        case GateKind::Z: return "z";
        case GateKind::XX: return "xx";
        case GateKind::Init: return "init";
    }
    return "?";
}

std::string to_string(GateMode mode) {
    switch (mode) {
        case GateMode::Unitary: return "unitary";
        case GateMode::OpenNoFilter: return "open_no_filter";
        case GateMode::OpenWithFilter: return "open_with_filter";
    }
    return "?";
}

GateKind parse_gate_kind(const std::string& s) {
    if (s == "idle") return GateKind::Idle;
    if (s == "x") return GateKind::X;
    if (s == "z") return GateKind::Z;
    if (s == "xx") return GateKind::XX;
    if (s == "init") return GateKind::Init;
    throw Error("unknown gate kind '" + s + "' (expected idle, x, z, xx or init)");
}

GateMode parse_gate_mode(const std::string& s) {
    if (s == "unitary") return GateMode::Unitary;
    if (s == "open_no_filter") return GateMode::OpenNoFilter;
    if (s == "open_with_filter") return GateMode::OpenWithFilter;
    throw Error("unknown gate mode '" + s + "' (expected unitary, open_no_filter or open_with_filter)");
}

GateParams GateParams::defaults(GateKind kind) {
    GateParams p;
    p.kind = kind;
    switch (kind) {
        case GateKind::Idle:
            p.t_gate = 50.0;
            p.tau = 0.0;
            p.alpha = 0.0;
            break;
        case GateKind::X:
            p.t_gate = 60.0;
            p.tau = 10.0;
            p.alpha = 0.0052;
            break;
        case GateKind::Z:
            p.t_gate = 296.2;
            p.tau = 20.0;
            p.alpha = 20.0;
            break;
        case GateKind::XX:
            p.t_gate = 39.0;
            p.tau = 12.0;
            p.alpha = 0.010;
            break;
        case GateKind::Init:
            p.t_gate = 100.0;
            p.tau = 100.0;
            p.alpha = 0.0;
            break;
    }
    return p;
}

void GateParams::validate() const {
    if (!(t_gate >= 0.0) || !(tau >= 0.0)) throw Error("gate: t_gate and tau must be non-negative");
    if (kind == GateKind::Init) {
        if (tau > t_gate) throw Error("gate: init ramp tau must not exceed t_gate");
    } else {
        pulse().validate();
    }
    if (kind == GateKind::Z && !(alpha > 0.0)) throw Error("gate: z gate needs omega_z > 0");
    if (n_steps < 1 || floquet_steps < kGrid) throw Error("gate: step counts too small");
    if (levels < 2 || joint_levels < 2) throw Error("gate: need at least two levels");
    if (lindblad_steps < 4) throw Error("gate: lindblad_steps must be >= 4");
    if (!(kappa_h_inv_us >= 0.0)) throw Error("gate: kappa_h_inv_us must be non-negative");
    if (!(equilibration_ns >= 0.0)) throw Error("gate: equilibration_ns must be non-negative");
}

RotorHamiltonian gate_hamiltonian(GateKind kind, const CircuitParams& c, const GateParams& p) {
    p.validate();
    FluxWaveform idle = FluxWaveform::linear();
    PulseShape pulse = p.pulse();
    switch (kind) {
        case GateKind::Idle:
            return driven_rotor(c, idle);
        case GateKind::X: {
            double a = angular(p.alpha);
            return driven_rotor(c, idle).with_cos_term([a, pulse](double t) { return a * pulse.value(t); },
                                                       0.0);
        }
        case GateKind::Z:
            return driven_rotor(c, FluxWaveform::blend(idle, FluxWaveform::linear(p.alpha),
                                                      [pulse](double t) { return pulse.value(t); }));
        case GateKind::Init: {
            double tau = p.tau;
            auto env = [tau](double t) {
                if (t >= tau) return 1.0;
                double s = std::sin(0.5 * std::numbers::pi * t / tau);
                return s * s;
            };
            return driven_rotor(c, FluxWaveform::blend(FluxWaveform::constant(), idle, env));
        }
        case GateKind::XX:
            break;
    }
    throw Error("gate_hamiltonian: the XX gate acts on two qubits, use xx_hamiltonian");
}

TimeOperator xx_hamiltonian(const CircuitParams& c, const GateParams& p) {
    p.validate();
    PulseShape pulse = p.pulse();
    double a = p.alpha;
    return [c, a, pulse](double t) { return two_qubit_hamiltonian_at(c, c, a, pulse.value(t), t); };
}

CMatrix target_unitary(GateKind kind) {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    switch (kind) {
        case GateKind::X:
            return x;
        case GateKind::Z: {
            CMatrix z = CMatrix::Identity(2, 2);
            z(1, 1) = -1.0;
            return z;
        }
        case GateKind::XX:
            return kron(x, x);
        default:
            return CMatrix::Identity(2, 2);
    }
}

double rotation_phase(GateKind kind, const CMatrix& m) {
    if (kind == GateKind::Z) return std::arg(m(0, 0) * std::conj(m(1, 1)));
    CMatrix h(2, 2);
    h << 1, 1, 1, -1;
    h /= std::sqrt(2.0);
    if (kind == GateKind::XX) h = kron(h, h);
    CMatrix mp = h * m * h;
    return std::arg(mp(0, 0) * std::conj(mp(1, 1)));
}

GateResult run_gate(const CircuitParams& c, const GateParams& p, GateMode mode, const FilterParams& filter) {
    p.validate();
    c.validate();
    GateResult r;
    r.kind = p.kind;
    r.mode = mode;
    r.alpha_used = p.alpha;
    r.t_gate_used = p.t_gate;
    double kappa_h = p.kappa_h();

    if (p.kind == GateKind::Init) {
        if (mode != GateMode::Unitary) throw Error("run_gate: initialisation is simulated unitarily only");
        FloquetSolution idle = idle_solution(c, p);
        CMatrix h0 = RotorHamiltonian(c, [&](double) {
                         return RotorDrive{-angular(c.e_j), 0.0};
                     }, 0.0).at(0.0);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h0);
        CMatrix psi = es.eigenvectors().col(0);
        psi = propagate_columns(gate_hamiltonian(GateKind::Init, c, p), psi, 0.0, p.t_gate, c.period(),
                                p.n_steps);
        CMatrix psis = idle.psi_at(p.t_gate, 2);
        CVector zero = (psis.col(0) + psis.col(1)) / std::sqrt(2.0);
        double f = std::norm(zero.dot(psi.col(0)));
        r.channel = identity_channel(2);
        r.target = CMatrix::Identity(2, 2);
        r.avg_fidelity = f;
        r.infidelity = 1.0 - f;
        r.state_fidelities.push_back({"zero", f});
        return r;
    }

    if (p.kind == GateKind::XX) {
        if (mode != GateMode::Unitary) throw Error("run_gate: the XX gate is simulated unitarily only");
        FloquetSolution idle = idle_solution(c, p);
        double alpha = p.alpha;
        if (p.calibrate) {
            auto f = [&](double a) {
                return wrap_phase(rotation_phase(GateKind::XX, xx_unitary(idle, c, p, a)) - std::numbers::pi);
            };
            alpha = secant(f, alpha, alpha * 1.001, 1e-7, 6);
        }
        r.alpha_used = alpha;
        r.channel = unitary_channel(xx_unitary(idle, c, p, alpha));
        r.target = p.t_gate > 0.0 ? target_unitary(GateKind::XX) : CMatrix::Identity(4, 4);
        finish(r);
        return r;
    }

    // A zero-length pulse ideally does nothing.
    r.target = p.t_gate > 0.0 ? target_unitary(p.kind) : CMatrix::Identity(2, 2);
    if (mode == GateMode::OpenWithFilter) {
        FilterSystemOptions fo;
        fo.qubit_levels = p.joint_levels;
        fo.n_steps = p.joint_steps;
        fo.n_grid = kGrid;
        if (p.kind == GateKind::Z) {
            CircuitParams cz = c;
            cz.omega = p.alpha;
            FloquetSolution bare = idle_solution(cz, p);
            FilterSystem sys = build_filter_system(bare, filter, fo);
            r.min_label_overlap = std::min(sys.label_overlap[0], sys.label_overlap[1]);
            FloquetLindblad lind = sys.lindblad(kappa_h, p.lindblad_steps);
            int d = sys.dim();
            std::vector<CMatrix> inputs;
            for (const auto& probe : channel_probe_states(2)) inputs.push_back(embed_qubit(probe, d, 0, 1));
            CMatrix minus(2, 2);
            minus << 0.5, -0.5, -0.5, 0.5;
            inputs.push_back(embed_qubit(minus, d, 0, 1));
            double hold = p.t_gate - 2.0 * p.tau;
            std::vector<CMatrix> out = lind.evolve(inputs, 0.0, hold, &r.stats);
            std::vector<CMatrix> q;
            for (int i = 0; i < 4; ++i) q.push_back(project_qubit(out[i], 0, 1));
            r.channel = channel_from_probes(2, q);
            r.target = CMatrix::Identity(2, 2);
            CMatrix pm = project_qubit(out[4], 0, 1);
            r.state_fidelities = {{"psi0", q[0](0, 0).real()},
                                  {"psi1", q[1](1, 1).real()},
                                  {"plus", 0.5 * (q[2].sum()).real()},
                                  {"minus", 0.5 * (pm(0, 0) + pm(1, 1) - pm(0, 1) - pm(1, 0)).real()}};
            finish(r);
            return r;
        }
        FloquetSolution bare = idle_solution(c, p);
        FilterSystem sys0 = build_filter_system(bare, filter, fo);
        r.min_label_overlap = std::min(sys0.label_overlap[0], sys0.label_overlap[1]);
        FloquetLindblad l0 = sys0.lindblad(kappa_h, p.lindblad_steps);
        int d = sys0.dim();
        std::vector<CMatrix> probes;
        for (const auto& probe : channel_probe_states(2)) probes.push_back(embed_qubit(probe, d, 0, 1));
        double t_eq = p.equilibration_ns;
        std::vector<CMatrix> eq = t_eq > 0.0 ? l0.evolve(probes, 0.0, t_eq, &r.stats) : probes;
        std::vector<CMatrix> q_eq;
        for (const auto& m : eq) q_eq.push_back(project_qubit(m, 0, 1));
        QuantumChannel ref = channel_from_probes(2, q_eq);
        r.has_reference = true;
        r.reference_infidelity = 1.0 - average_fidelity(ref, CMatrix::Identity(2, 2));

        std::vector<CMatrix> out;
        if (p.kind == GateKind::Idle) {
            out = p.t_gate > 0.0 ? l0.evolve(eq, t_eq, p.t_gate, &r.stats) : eq;
        } else {
            double alpha = p.alpha;
            PulseShape pulse = p.pulse();
            double ts = t_eq;
            double tg = p.t_gate;
            int ramp_res = std::max(64, p.joint_steps / 16);
            auto build_gate_sys = [&](double a) {
                FilterSystemOptions g = fo;
                g.extra_cos_ghz = a;
                g.label = false;
                return build_filter_system(bare, filter, g);
            };
            // Ramps are unitary in the joint frame; the hold is dissipative in
            // the Floquet frame of the joint gate Hamiltonian.
            auto run = [&](double a, const std::vector<CMatrix>& in, bool dissipative) {
                FilterSystem sys1 = build_gate_sys(a);
                double amp = angular(a);
                CMatrix up = joint_ramp(sys0, amp, pulse, ts, ts, ts + p.tau, ramp_res);
                CMatrix down = joint_ramp(sys0, amp, pulse, ts, ts + tg - p.tau, ts + tg, ramp_res);
                CMatrix w0s = sys0.dressed.psi_at(ts, d);
                CMatrix w0e = sys0.dressed.psi_at(ts + tg, d);
                CMatrix w1s = sys1.dressed.psi_at(ts + p.tau, d);
                CMatrix w1e = sys1.dressed.psi_at(ts + tg - p.tau, d);
                CMatrix into = w1s.adjoint() * up * w0s;
                CMatrix outof = w0e.adjoint() * down * w1e;
                std::vector<CMatrix> x;
                for (const auto& m : in) x.push_back(conjugate(into, m));
                if (dissipative) {
                    FloquetLindblad l1 = sys1.lindblad(kappa_h, p.lindblad_steps);
                    x = l1.evolve(x, ts + p.tau, tg - 2.0 * p.tau, &r.stats);
                }
                for (auto& m : x) m = conjugate(outof, m);
                return x;
            };
            if (p.calibrate) {
                auto f = [&](double a) {
                    std::vector<CMatrix> in;
                    for (int i = 0; i < 2; ++i) {
                        CMatrix e = CMatrix::Zero(d, d);
                        e(i, i) = 1.0;
                        in.push_back(e);
                    }
                    // Pure-state map from the two basis projectors' coherent image.
                    CVector v0 = CVector::Zero(d), v1 = CVector::Zero(d);
                    v0(0) = 1.0;
                    v1(1) = 1.0;
                    FilterSystem sys1 = build_gate_sys(a);
                    double amp = angular(a);
                    CMatrix up = joint_ramp(sys0, amp, pulse, ts, ts, ts + p.tau, ramp_res);
                    CMatrix down = joint_ramp(sys0, amp, pulse, ts, ts + tg - p.tau, ts + tg, ramp_res);
                    CMatrix m = sys0.dressed.psi_at(ts + tg, d).adjoint() * down *
                                sys1.dressed.psi_at(ts + tg - p.tau, d) *
                                sys1.dressed.psi_at(ts + p.tau, d).adjoint() * up * sys0.dressed.psi_at(ts, d);
                    return wrap_phase(rotation_phase(GateKind::X, m.topLeftCorner(2, 2)) - std::numbers::pi);
                };
                alpha = secant(f, alpha, alpha * 1.001, 1e-6, 4);
            }
            r.alpha_used = alpha;
            out = run(alpha, eq, true);
        }
        std::vector<CMatrix> q;
        for (const auto& m : out) q.push_back(project_qubit(m, 0, 1));
        r.channel = channel_from_probes(2, q);
        finish(r);
        return r;
    }

    if (p.kind == GateKind::Idle) {
        if (mode == GateMode::Unitary) {
            r.channel = identity_channel(2);
            finish(r);
            return r;
        }
        FloquetSolution idle = idle_solution(c, p).truncated(p.levels);
        SidebandExpansion n_exp =
            sideband_coefficients(floquet_frame_operator(idle, charge_operator(c), p.levels), 64, "n");
        FloquetLindblad lind(idle.quasienergies, idle.period,
                             {{kappa_h, FrequencyPart(n_exp, FrequencySign::Negative, 1e-12)}}, p.lindblad_steps);
        std::vector<CMatrix> inputs;
        for (const auto& probe : channel_probe_states(2)) inputs.push_back(embed_qubit(probe, p.levels, 0, 1));
        std::vector<CMatrix> out = lind.evolve(inputs, 0.0, p.t_gate, &r.stats);
        std::vector<CMatrix> q;
        for (const auto& m : out) q.push_back(project_qubit(m, 0, 1));
        r.channel = channel_from_probes(2, q);
        finish(r);
        return r;
    }

    SingleQubit sq(c, p);
    double alpha = p.alpha;
    double t_gate = p.t_gate;
    if (p.calibrate) sq.calibrate(alpha, t_gate);
    r.alpha_used = alpha;
    r.t_gate_used = t_gate;
    if (mode == GateMode::Unitary) {
        r.channel = unitary_channel(sq.unitary(alpha, t_gate));
    } else {
        r.channel = single_qubit_open(sq, alpha, t_gate, kappa_h, r.stats);
    }
    finish(r);
    return r;
}

}  // namespace kapitza
