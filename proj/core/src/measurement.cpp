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

#include "kapitza/measurement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <thread>
#include <tuple>

#include <fftw3.h>

#include "kapitza/floquet.hpp"

namespace kapitza {

namespace {

constexpr int kLevels = 4;

bool is_multiple(double big, double small) {
    double r = big / small;
    return std::abs(r - std::round(r)) < 1e-9 * std::max(1.0, r);
}

long long ratio(double big, double small) { return std::llround(big / small); }

// Sparse y += sum_k v_k ph[g_k] x[c_k] over the Hamiltonian entries.
void apply_h(const std::vector<MeasurementModel::Entry>& entries, const std::vector<cplx>& ph,
             const cplx* x, cplx* y, int dim) {
    std::fill(y, y + dim, cplx(0.0));
    for (const auto& e : entries) y[e.row] += e.value * ph[e.group] * x[e.col];
}

struct SparseOp {
    std::vector<std::tuple<int, int, cplx>> nz;

    static SparseOp from(const CMatrix& m) {
        SparseOp s;
        for (int j = 0; j < m.cols(); ++j)
            for (int i = 0; i < m.rows(); ++i)
                if (std::abs(m(i, j)) > 0.0) s.nz.emplace_back(i, j, m(i, j));
        return s;
    }
    void apply(const CVector& x, CVector& y) const {
        y.setZero();
        for (const auto& [i, j, v] : nz) y(i) += v * x(j);
    }
    void apply_adjoint(const CVector& x, CVector& y) const {
        y.setZero();
        for (const auto& [i, j, v] : nz) y(j) += std::conj(v) * x(i);
    }
};

// psi viewed as a (4 x F) block matrix: out = (q (x) 1_F) psi.
void apply_qubit(const CMatrix& q, const CVector& psi, CVector& out, int f) {
    for (int a = 0; a < kLevels; ++a) {
        cplx* o = out.data() + a * f;
        std::fill(o, o + f, cplx(0.0));
        for (int b = 0; b < kLevels; ++b) {
            cplx v = q(a, b);
            if (v == cplx(0.0)) continue;
            const cplx* x = psi.data() + b * f;
            for (int i = 0; i < f; ++i) o[i] += v * x[i];
        }
    }
}

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

std::string to_string(MeasurementBasis b) { return b == MeasurementBasis::X ? "x" : "z"; }

MeasurementBasis parse_measurement_basis(const std::string& s) {
    if (s == "x" || s == "X") return MeasurementBasis::X;
    if (s == "z" || s == "Z") return MeasurementBasis::Z;
    throw Error("unknown measurement basis '" + s + "' (expected x or z)");
}

MeasurementConfig MeasurementConfig::defaults(MeasurementBasis basis) {
    MeasurementConfig c;
    c.basis = basis;
    c.dt = 0.025;
    if (basis == MeasurementBasis::Z) {
        c.dt = 0.05;
        c.rabi = 0.0023;
        c.duration = 10000.0;
        c.filter = FilterParams::z_defaults();
    }
    return c;
}

void MeasurementConfig::validate() const {
    filter.validate();
    if (!(rabi >= 0.0)) throw Error("measure: rabi must be non-negative");
    if (!(duration > 0.0) || !(dt > 0.0) || !(dt_record > 0.0) || !(population_dt > 0.0))
        throw Error("measure: duration and time steps must be positive");
    if (!is_multiple(dt_record, dt) || !is_multiple(population_dt, dt) || !is_multiple(duration, dt_record))
        throw Error("measure: dt_record and population_dt must be multiples of dt, duration of dt_record");
    if (!(window_width > 0.0)) throw Error("measure: window width must be positive");
    if (!(rwa_cutoff > 0.0)) throw Error("measure: rwa cutoff must be positive");
    if (!(kappa_h_inv_us >= 0.0)) throw Error("measure: kappa_h_inv_us must be non-negative");
    if (basis == MeasurementBasis::Z && !(omega_z > 0.0)) throw Error("measure: omega_z must be positive");
    if (floquet_steps < 256) throw Error("measure: floquet_steps must be >= 256");
    if (drive1 < 0.0 || drive2 < 0.0 || window20 < 0.0 || window31 < 0.0)
        throw Error("measure: frequencies must be non-negative (0 selects the computed line)");
}

CMatrix MeasurementModel::hamiltonian(double t) const {
    std::vector<cplx> ph(group_freq.size());
    for (std::size_t g = 0; g < ph.size(); ++g) ph[g] = std::polar(1.0, group_freq[g] * t);
    CMatrix h = CMatrix::Zero(dim, dim);
    for (const auto& e : entries) h(e.row, e.col) += e.value * ph[e.group];
    return h;
}

OpenSystemSetup MeasurementModel::setup() const {
    auto self = std::make_shared<MeasurementModel>(*this);
    OpenSystemSetup s;
    s.dim = dim;
    s.hamiltonian = [self](double t) { return self->hamiltonian(t); };
    CMatrix out = output;
    s.dissipators.push_back({cfg.filter.kappa_f_ang(), [out](double) { return out; }});
    CMatrix idf = CMatrix::Identity(filter_dim, filter_dim);
    for (const auto& q : heating) {
        CMatrix l = kron(q, idf);
        s.dissipators.push_back({1.0, [l](double) { return l; }});
    }
    s.frame = Frame::FloquetFrame;
    s.kappa_h = cfg.kappa_h();
    return s;
}

CVector MeasurementModel::initial_state() const {
    CVector psi = CVector::Zero(dim);
    psi(0) = 1.0 / std::sqrt(2.0);
    psi(filter_dim) = 1.0 / std::sqrt(2.0);
    return psi;
}

std::array<double, 4> MeasurementModel::populations(const CVector& psi) const {
    std::array<double, 4> p{};
    for (int a = 0; a < kLevels; ++a) p[a] = psi.segment(a * filter_dim, filter_dim).squaredNorm();
    return p;
}

std::array<double, 4> MeasurementModel::populations(const CMatrix& rho) const {
    std::array<double, 4> p{};
    for (int a = 0; a < kLevels; ++a)
        for (int i = 0; i < filter_dim; ++i) p[a] += rho(a * filter_dim + i, a * filter_dim + i).real();
    return p;
}

MeasurementModel measurement_model(const CircuitParams& circuit, const MeasurementConfig& cfg) {
    cfg.validate();
    circuit.validate();
    MeasurementModel m;
    m.cfg = cfg;
    CircuitParams c = circuit;
    FluxWaveform w = FluxWaveform::linear();
    RotorHamiltonian h = driven_rotor(c, w);
    EffectiveModel eff = effective_model(c, w);
    if (cfg.basis == MeasurementBasis::X) {
        double a = angular(cfg.alpha_x);
        h = h.with_cos_term([a](double) { return a; }, c.period());
        eff = effective_model(c, w, cfg.alpha_x);
    } else {
        c.omega = cfg.omega_z;
        h = driven_rotor(c, w);
        eff = effective_model(c, w);
    }
    FloquetOptions fo;
    fo.n_steps = cfg.floquet_steps;
    fo.n_grid = 256;
    fo.n_tracked = 6;
    FloquetSolution sol = solve_floquet(h, eff, fo);
    SidebandExpansion ex = sideband_coefficients(floquet_frame_operator(sol, charge_operator(c), kLevels), 64, "n");
    m.quasienergies = ex.quasienergies;
    m.lines = dominant_lines(ex, true);

    const FilterParams& fp = cfg.filter;
    m.space = filter_space(fp);
    m.filter_dim = m.space.dim();
    m.dim = kLevels * m.filter_dim;
    m.drive1 = cfg.drive1 > 0.0 ? angular(cfg.drive1) : m.lines.w02;
    m.drive2 = cfg.drive2 > 0.0 ? angular(cfg.drive2) : m.lines.w13;
    m.window20 = cfg.window20 > 0.0 ? cfg.window20 : ordinary(m.lines.w20);
    m.window31 = cfg.window31 > 0.0 ? cfg.window31 : ordinary(m.lines.w31);
    m.delta = std::abs(m.lines.w20 - m.lines.w31);

    double rabi = angular(cfg.rabi);
    if (rabi > m.delta)
        throw Error("measure: Rabi frequency " + std::to_string(cfg.rabi) +
                    " GHz exceeds the line splitting " + std::to_string(ordinary(m.delta)) + " GHz");
    if (rabi > m.delta / 3.0)
        m.warnings.push_back("Rabi frequency above a third of the line splitting; expect crosstalk");
    if (rabi > fp.kappa_c_ang() / 3.0)
        m.warnings.push_back("Rabi frequency not small against the filter cooling rate");
    double pass = 2.0 * fp.j_ang() * std::cos(std::numbers::pi / (fp.n_modes + 1)) + 0.5 * fp.kappa_f_ang();
    for (double d : {m.drive1, m.drive2})
        if (std::abs(d - fp.omega_f_ang()) < pass)
            throw Error("measure: charge drive at " + std::to_string(ordinary(d)) +
                        " GHz lies inside the filter passband");
    if (std::abs(m.window20 - m.window31) <= 2.0 * cfg.window_width)
        throw Error("measure: emission windows overlap");

    int f = m.filter_dim;
    double cutoff = angular(cfg.rwa_cutoff);
    std::map<long long, int> group_of;
    std::map<std::tuple<int, int, int>, cplx> acc;
    auto group = [&](double nu) {
        long long key = std::llround(nu * 1e9);
        auto it = group_of.find(key);
        if (it != group_of.end()) return it->second;
        int g = static_cast<int>(m.group_freq.size());
        m.group_freq.push_back(nu);
        group_of.emplace(key, g);
        return g;
    };
    auto add_qubit_term = [&](int a, int b, const CMatrix& fop, cplx coeff, double nu) {
        int g = group(nu);
        for (int j = 0; j < f; ++j)
            for (int i = 0; i < f; ++i)
                if (std::abs(fop(i, j)) > 0.0) acc[{a * f + i, b * f + j, g}] += coeff * fop(i, j);
    };
    CMatrix idf = CMatrix::Identity(f, f);
    const CMatrix& a1 = m.space.lowering.front();
    CMatrix a1d = a1.adjoint();
    double g_c = fp.g_ang();
    double wf = fp.omega_f_ang();
    for (int n = -ex.n_side; n <= ex.n_side; ++n) {
        const CMatrix& cn = ex.at(n);
        for (int a = 0; a < kLevels; ++a)
            for (int b = 0; b < kLevels; ++b) {
                cplx v = cn(a, b);
                if (std::abs(v) < 1e-7) continue;
                double nu = ex.line_frequency(a, b, n);
                if (rabi > 0.0)
                    for (double d : {m.drive1, m.drive2})
                        for (double s : {1.0, -1.0})
                            if (std::abs(nu + s * d) < cutoff) add_qubit_term(a, b, idf, rabi * v, nu + s * d);
                if (std::abs(nu - wf) < cutoff) add_qubit_term(a, b, a1, g_c * v, nu - wf);
                if (std::abs(nu + wf) < cutoff) add_qubit_term(a, b, a1d, g_c * v, nu + wf);
            }
    }
    CMatrix chain = filter_hamiltonian(fp, m.space, true);
    int g0 = group(0.0);
    for (int a = 0; a < kLevels; ++a)
        for (int j = 0; j < f; ++j)
            for (int i = 0; i < f; ++i)
                if (std::abs(chain(i, j)) > 0.0) acc[{a * f + i, a * f + j, g0}] += chain(i, j);
    for (const auto& [key, v] : acc)
        if (std::abs(v) > 0.0) m.entries.push_back({std::get<0>(key), std::get<1>(key), v, std::get<2>(key)});

    m.output = kron(CMatrix::Identity(kLevels, kLevels), m.space.lowering.back());

    double kh = cfg.kappa_h();
    if (kh > 0.0) {
        RMatrix rates = transition_rates(ex);
        for (int a = 0; a < kLevels; ++a)
            for (int b = 0; b < kLevels; ++b) {
                if (a == b || rates(a, b) <= 0.0) continue;
                CMatrix l = CMatrix::Zero(kLevels, kLevels);
                l(b, a) = std::sqrt(kh * rates(a, b));
                m.heating.push_back(l);
            }
        for (int n = 1; n <= ex.n_side; ++n) {
            CMatrix l = CMatrix::Zero(kLevels, kLevels);
            for (int a = 0; a < kLevels; ++a) l(a, a) = std::sqrt(kh) * std::conj(ex.at(n)(a, a));
            if (l.norm() > 1e-6 * std::sqrt(kh)) m.heating.push_back(l);
        }
    }
    if (hermiticity_error(m.hamiltonian(0.37)) > 1e-9)
        throw Error("measurement_model: internal error, RWA Hamiltonian is not Hermitian");
    return m;
}

TrajectoryRecord simulate_trajectory(const MeasurementModel& model, const CVector& psi0, std::uint64_t seed) {
    const MeasurementConfig& cfg = model.cfg;
    int dim = model.dim;
    int f = model.filter_dim;
    if (psi0.size() != dim) throw Error("simulate_trajectory: initial state dimension mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) throw Error("simulate_trajectory: initial state must be normalized");

    double dt = cfg.dt;
    long long n_steps = ratio(cfg.duration, dt);
    long long rec_every = ratio(cfg.dt_record, dt);
    long long pop_every = ratio(cfg.population_dt, dt);
    double kappa = cfg.filter.kappa_f_ang();
    double sk = std::sqrt(kappa);
    SparseOp out = SparseOp::from(model.output);

    CMatrix mq = CMatrix::Zero(kLevels, kLevels);
    for (const auto& l : model.heating) mq += l.adjoint() * l;
    bool heat = !model.heating.empty();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::size_t ng = model.group_freq.size();
    std::vector<cplx> half(ng), ph0(ng), ph1(ng), ph2(ng);
    for (std::size_t g = 0; g < ng; ++g) half[g] = std::polar(1.0, model.group_freq[g] * 0.5 * dt);

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.dt_record = cfg.dt_record;
    rec.population_dt = cfg.population_dt;
    rec.record.reserve(static_cast<std::size_t>(n_steps / rec_every));
    rec.populations.push_back(model.populations(psi0));

    CVector psi = psi0;
    CVector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), lpsi(dim), llpsi(dim), dpsi(dim), mpsi(dim);
    cplx rec_acc = 0.0;
    double noise_sd = std::sqrt(0.5 * dt);
    auto rk_stage = [&](const std::vector<cplx>& ph, const CVector& x, CVector& k) {
        apply_h(model.entries, ph, x.data(), k.data(), dim);
        k *= -kI;
    };
    for (long long s = 0; s < n_steps; ++s) {
        if (s % 4096 == 0)
            for (std::size_t g = 0; g < ng; ++g) ph0[g] = std::polar(1.0, model.group_freq[g] * (s * dt));
        for (std::size_t g = 0; g < ng; ++g) {
            ph1[g] = ph0[g] * half[g];
            ph2[g] = ph1[g] * half[g];
        }
        rk_stage(ph0, psi, k1);
        tmp.noalias() = psi + (0.5 * dt) * k1;
        rk_stage(ph1, tmp, k2);
        tmp.noalias() = psi + (0.5 * dt) * k2;
        rk_stage(ph1, tmp, k3);
        tmp.noalias() = psi + dt * k3;
        rk_stage(ph2, tmp, k4);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        std::swap(ph0, ph2);

        // Heterodyne monitoring of sqrt(kappa) a_N.
        out.apply(psi, lpsi);
        lpsi *= sk;
        cplx l = psi.dot(lpsi);
        cplx dz(noise_sd * normal(rng), noise_sd * normal(rng));
        rec_acc += (l * dt + dz) / (sk * dt);
        out.apply_adjoint(lpsi, llpsi);
        llpsi *= sk;
        dpsi.noalias() = (-0.5 * dt) * (llpsi - (2.0 * std::conj(l)) * lpsi + std::norm(l) * psi) +
                         std::conj(dz) * (lpsi - l * psi);

        if (heat) {
            apply_qubit(mq, psi, mpsi, f);
            double rate = psi.dot(mpsi).real();
            if (uniform(rng) < rate * dt) {
                double r = uniform(rng) * rate;
                for (std::size_t j = 0; j < model.heating.size(); ++j) {
                    apply_qubit(model.heating[j], psi, mpsi, f);
                    r -= mpsi.squaredNorm();
                    if (r <= 0.0) break;
                }
                psi = mpsi;
                dpsi.setZero();
                ++rec.jumps;
            } else {
                dpsi -= (0.5 * dt) * (mpsi - rate * psi);
            }
        }
        psi += dpsi;
        double nrm = psi.norm();
        if (!(nrm > 1e-12)) throw Error("simulate_trajectory: state norm collapsed");
        psi /= nrm;

        if ((s + 1) % rec_every == 0) {
            rec.record.push_back(rec_acc / static_cast<double>(rec_every));
            rec_acc = 0.0;
        }
        if ((s + 1) % pop_every == 0) rec.populations.push_back(model.populations(psi));
    }
    rec.final_populations = model.populations(psi);
    return rec;
}

Spectrum power_spectrum(const std::vector<cplx>& record, double dt_record) {
    int n = static_cast<int>(record.size());
    Spectrum s;
    if (n == 0) return s;
    std::vector<cplx> out(n);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        plan = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(record.data())),
                                reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
    }
    s.freq.resize(n);
    s.power.resize(n);
    int half = n / 2;
    for (int i = 0; i < n; ++i) {
        int k = (i + (n - half)) % n;  // bins in ascending frequency
        int kk = k < n - half ? k : k - n;
        s.freq[i] = kk / (n * dt_record);
        s.power[i] = std::norm(out[k]) / n;
    }
    return s;
}

Classification classify(const Spectrum& spectrum, const MeasurementModel& model) {
    double wf = model.cfg.filter.omega_f;
    double c20 = model.window20 - wf;
    double c31 = model.window31 - wf;
    double w = model.cfg.window_width;
    Classification c;
    for (std::size_t i = 0; i < spectrum.freq.size(); ++i) {
        double fr = spectrum.freq[i];
        if (std::abs(fr - c20) <= w) c.s20 += spectrum.power[i];
        if (std::abs(fr - c31) <= w) c.s31 += spectrum.power[i];
    }
    c.s_signal = c.s31 - c.s20;
    c.outcome = c.s_signal > 0.0 ? 1 : 0;
    c.ambiguous = std::abs(c.s_signal) < 0.01 * (c.s31 + c.s20);
    return c;
}

std::pair<double, double> wilson_interval(int successes, int n, double z) {
    if (n <= 0) return {0.0, 1.0};
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double centre = (p + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

FidelityEstimate measurement_fidelity(const MeasurementModel& model, int n_traj, int n_threads) {
    if (n_traj < 1) throw Error("measurement_fidelity: need at least one trajectory");
    FidelityEstimate est;
    est.n = n_traj;
    est.trajectories.resize(n_traj);
    CVector psi0 = model.initial_state();
    parallel_for(n_traj, n_threads, [&](int i) {
        std::uint64_t seed = model.cfg.seed + static_cast<std::uint64_t>(i);
        TrajectoryRecord rec = simulate_trajectory(model, psi0, seed);
        TrajectorySummary& s = est.trajectories[i];
        s.seed = seed;
        s.cls = classify(power_spectrum(rec.record, rec.dt_record), model);
        s.final_p0 = rec.final_populations[0];
        s.final_p1 = rec.final_populations[1];
        s.jumps = rec.jumps;
    });
    for (const auto& s : est.trajectories) {
        est.correct += s.correct() ? 1 : 0;
        est.ambiguous += s.cls.ambiguous ? 1 : 0;
        est.outcome1 += s.cls.outcome;
    }
    est.fidelity = static_cast<double>(est.correct) / n_traj;
    std::tie(est.ci_low, est.ci_high) = wilson_interval(est.correct, n_traj);
    return est;
}

EnsembleCheck ensemble_vs_master(const MeasurementModel& model, int n_traj, double duration, int n_threads) {
    if (n_traj < 2) throw Error("ensemble_vs_master: need at least two trajectories");
    MeasurementModel m = model;
    m.cfg.duration = duration;
    m.cfg.population_dt = duration;
    m.cfg.dt_record = duration;
    if (!is_multiple(duration, m.cfg.dt)) throw Error("ensemble_vs_master: duration must be a multiple of dt");
    EnsembleCheck chk;
    chk.n = n_traj;
    chk.duration = duration;
    CVector psi0 = m.initial_state();
    LindbladTrajectory me = lindblad_evolve(m.setup(), psi0 * psi0.adjoint(), 0.0, duration, m.cfg.dt);
    chk.master = m.populations(me.states.back());
    std::vector<std::array<double, 4>> finals(n_traj);
    parallel_for(n_traj, n_threads, [&](int i) {
        finals[i] = simulate_trajectory(m, psi0, m.cfg.seed + static_cast<std::uint64_t>(i)).final_populations;
    });
    for (int a = 0; a < kLevels; ++a) {
        double sum = 0.0, sq = 0.0;
        for (const auto& p : finals) {
            sum += p[a];
            sq += p[a] * p[a];
        }
        double mean = sum / n_traj;
        double var = std::max(0.0, (sq - n_traj * mean * mean) / (n_traj - 1));
        chk.mean[a] = mean;
        chk.stderr_[a] = std::sqrt(var / n_traj);
        double diff = std::abs(mean - chk.master[a]);
        double z = chk.stderr_[a] > 0.0 ? diff / chk.stderr_[a] : (diff > 1e-9 ? 1e9 : 0.0);
        chk.max_z = std::max(chk.max_z, z);
    }
    return chk;
}

}  // namespace kapitza
