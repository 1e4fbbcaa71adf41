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

#include "kapitza/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace kapitza {

void FilterParams::validate() const {
    if (n_modes < 1) throw Error("filter: n_modes must be >= 1");
    if (fock_cutoff < 2) throw Error("filter: fock_cutoff must be >= 2");
    if (!(omega_f > 0.0)) throw Error("filter: omega_f must be positive");
    if (!(kappa_f > 0.0)) throw Error("filter: kappa_f must be positive");
    if (!(g_over_kappa_f >= 0.0) || !(j_over_kappa_f >= 0.0))
        throw Error("filter: coupling ratios must be non-negative");
}

FilterParams FilterParams::idle_defaults() { return FilterParams{}; }

FilterParams FilterParams::z_defaults() {
    FilterParams fp;
    fp.omega_f = 20.234;
    fp.kappa_f = 0.2;
    return fp;
}

FilterSpace filter_space(const FilterParams& fp) {
    fp.validate();
    FilterSpace space;
    std::vector<int> occ(fp.n_modes, 0);
    std::vector<std::vector<int>> all;
    while (true) {
        int total = 0;
        for (int n : occ) total += n;
        if (fp.max_excitations <= 0 || total <= fp.max_excitations) all.push_back(occ);
        int k = fp.n_modes - 1;
        while (k >= 0 && occ[k] == fp.fock_cutoff - 1) occ[k--] = 0;
        if (k < 0) break;
        ++occ[k];
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        int sa = 0, sb = 0;
        for (int n : a) sa += n;
        for (int n : b) sb += n;
        return sa < sb;
    });
    space.occupations = all;
    std::map<std::vector<int>, int> index;
    for (int i = 0; i < space.dim(); ++i) index[all[i]] = i;
    for (int k = 0; k < fp.n_modes; ++k) {
        CMatrix a = CMatrix::Zero(space.dim(), space.dim());
        for (int i = 0; i < space.dim(); ++i) {
            std::vector<int> s = all[i];
            if (s[k] == 0) continue;
            double amp = std::sqrt(static_cast<double>(s[k]));
            --s[k];
            auto it = index.find(s);
            if (it != index.end()) a(it->second, i) = amp;
        }
        space.lowering.push_back(a);
    }
    return space;
}

CMatrix filter_hamiltonian(const FilterParams& fp, const FilterSpace& space, bool rotating) {
    int d = space.dim();
    CMatrix h = CMatrix::Zero(d, d);
    if (!rotating)
        for (const auto& a : space.lowering) h += fp.omega_f_ang() * a.adjoint() * a;
    for (int k = 0; k + 1 < static_cast<int>(space.lowering.size()); ++k) {
        CMatrix hop = space.lowering[k] * space.lowering[k + 1].adjoint();
        h += fp.j_ang() * (hop + hop.adjoint());
    }
    return h;
}

void PulseShape::validate() const {
    if (!(t_gate >= 0.0) || !(tau >= 0.0)) throw Error("pulse: t_gate and tau must be non-negative");
    if (tau > 0.5 * t_gate + 1e-12) throw Error("pulse: tau must not exceed t_gate / 2");
}

double PulseShape::value(double t) const {
    if (t < 0.0 || t > t_gate) return 0.0;
    if (tau <= 0.0) return 1.0;
    constexpr double half_pi = 0.5 * std::numbers::pi;
    if (t < tau) {
        double s = std::sin(half_pi * t / tau);
        return s * s;
    }
    if (t > t_gate - tau) {
        double s = std::sin(half_pi * (t_gate - t) / tau);
        return s * s;
    }
    return 1.0;
}

namespace {

void check_density(const CMatrix& rho, const char* who) {
    if (rho.rows() != rho.cols()) throw Error(std::string(who) + ": density matrix must be square");
    if (hermiticity_error(rho) > 1e-9) throw Error(std::string(who) + ": rho0 is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-9) throw Error(std::string(who) + ": rho0 must have unit trace");
    if (min_eigenvalue(rho) < -1e-9) throw Error(std::string(who) + ": rho0 is not positive semidefinite");
}

void update_stats(LindbladStats& s, const CMatrix& rho, double trace0, bool positivity) {
    s.max_trace_drift = std::max(s.max_trace_drift, std::abs(rho.trace() - trace0));
    s.max_hermiticity = std::max(s.max_hermiticity, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    if (positivity) {
        double m = min_eigenvalue(rho);
        s.min_eigenvalue = std::min(s.min_eigenvalue, m);
        if (m < -1e-6)
            throw Error("lindblad: density matrix lost positivity (min eigenvalue " +
                        std::to_string(m) + "); reduce the step size");
    }
}

CMatrix general_rhs(const OpenSystemSetup& s, const CMatrix& rho, double t) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    if (s.hamiltonian) {
        CMatrix h = s.hamiltonian(t);
        out += -kI * (h * rho - rho * h);
    }
    for (const auto& d : s.dissipators) {
        if (d.rate == 0.0) continue;
        CMatrix a = d.op(t);
        CMatrix ad = a.adjoint();
        CMatrix ada = ad * a;
        out += d.rate * (a * rho * ad - 0.5 * (ada * rho + rho * ada));
    }
    return out;
}

}  // namespace

LindbladTrajectory lindblad_evolve(const OpenSystemSetup& setup, const CMatrix& rho0, double t0,
                                   double t1, double dt, int record_every) {
    check_density(rho0, "lindblad_evolve");
    if (rho0.rows() != setup.dim) throw Error("lindblad_evolve: rho0 dimension does not match setup");
    if (!(dt > 0.0)) throw Error("lindblad_evolve: dt must be positive");
    for (const auto& d : setup.dissipators)
        if (d.rate < 0.0) throw Error("lindblad_evolve: negative dissipation rate");
    long long n = std::max<long long>(0, std::llround((t1 - t0) / dt));
    double h = n > 0 ? (t1 - t0) / n : 0.0;
    LindbladTrajectory out;
    CMatrix rho = rho0;
    out.times.push_back(t0);
    out.states.push_back(rho);
    long long check_every = std::max<long long>(1, n / 200);
    for (long long k = 0; k < n; ++k) {
        double t = t0 + k * h;
        CMatrix k1 = general_rhs(setup, rho, t);
        CMatrix k2 = general_rhs(setup, rho + 0.5 * h * k1, t + 0.5 * h);
        CMatrix k3 = general_rhs(setup, rho + 0.5 * h * k2, t + 0.5 * h);
        CMatrix k4 = general_rhs(setup, rho + h * k3, t + h);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        update_stats(out.stats, rho, 1.0, (k + 1) % check_every == 0 || k + 1 == n);
        if (record_every > 0 && (k + 1) % record_every == 0 && k + 1 != n) {
            out.times.push_back(t + h);
            out.states.push_back(rho);
        }
    }
    if (n > 0) {
        out.times.push_back(t1);
        out.states.push_back(rho);
    }
    return out;
}

FloquetLindblad::FloquetLindblad(RVector quasienergies, double period,
                                 const std::vector<FloquetChannel>& channels, int steps_per_period)
    : eps_(std::move(quasienergies)), period_(period), steps_(steps_per_period), channels_(channels) {
    if (steps_ < 4) throw Error("FloquetLindblad: need at least 4 steps per period");
    int d = dim();
    int m = 2 * steps_;
    g_.assign(m, CMatrix::Zero(d, d));
    for (const auto& c : channels_) {
        if (c.rate < 0.0) throw Error("FloquetLindblad: negative dissipation rate");
        if (c.op.n_levels() != d) throw Error("FloquetLindblad: operator dimension mismatch");
        std::vector<CMatrix> cache;
        cache.reserve(m);
        double s = std::sqrt(c.rate);
        for (int j = 0; j < m; ++j) {
            CMatrix a = s * c.op.periodic(j * period_ / m);
            g_[j] += a.adjoint() * a;
            cache.push_back(std::move(a));
        }
        a_.push_back(std::move(cache));
    }
}

int FloquetLindblad::phase_index(double t) const {
    double s = t / period_ * (2 * steps_);
    double r = std::round(s);
    if (std::abs(s - r) > 1e-6 * std::max(1.0, std::abs(s)))
        throw Error("FloquetLindblad: time " + std::to_string(t) + " ns is off the step grid");
    long long j = static_cast<long long>(r) % (2 * steps_);
    return static_cast<int>(j < 0 ? j + 2 * steps_ : j);
}

void FloquetLindblad::rhs(const std::vector<CMatrix>& x, int j, bool general,
                          std::vector<CMatrix>& out) const {
    int d = dim();
    CVector ie = (-kI * eps_.cast<cplx>());
    CMatrix left = 0.5 * g_[j];
    out.resize(x.size());
    for (std::size_t b = 0; b < x.size(); ++b) {
        const CMatrix& r = x[b];
        CMatrix mm = ie.asDiagonal() * r;
        mm.noalias() -= left * r;
        if (general) {
            CMatrix rr = r * ie.conjugate().asDiagonal();
            rr.noalias() -= r * left;
            out[b] = mm + rr;
        } else {
            out[b] = mm + mm.adjoint();
        }
        for (const auto& a : a_) {
            CMatrix ar(d, d);
            ar.noalias() = a[j] * r;
            out[b].noalias() += ar * a[j].adjoint();
        }
    }
}

void FloquetLindblad::rk4_periods(std::vector<CMatrix>& x, int j0, long long n_steps, bool general,
                                  LindbladStats* stats) const {
    int m = 2 * steps_;
    double h = period_ / steps_;
    std::vector<CMatrix> k1, k2, k3, k4, tmp(x.size());
    long long check_every = std::max<long long>(1, steps_);
    std::vector<cplx> trace0;
    for (const auto& r : x) trace0.push_back(r.trace());
    int j = j0;
    for (long long k = 0; k < n_steps; ++k) {
        int jm = (j + 1) % m;
        int je = (j + 2) % m;
        rhs(x, j, general, k1);
        for (std::size_t b = 0; b < x.size(); ++b) tmp[b] = x[b] + 0.5 * h * k1[b];
        rhs(tmp, jm, general, k2);
        for (std::size_t b = 0; b < x.size(); ++b) tmp[b] = x[b] + 0.5 * h * k2[b];
        rhs(tmp, jm, general, k3);
        for (std::size_t b = 0; b < x.size(); ++b) tmp[b] = x[b] + h * k3[b];
        rhs(tmp, je, general, k4);
        for (std::size_t b = 0; b < x.size(); ++b)
            x[b] += (h / 6.0) * (k1[b] + 2.0 * k2[b] + 2.0 * k3[b] + k4[b]);
        j = je;
        if (stats && !general) {
            bool pos = (k + 1) % check_every == 0 || k + 1 == n_steps;
            for (std::size_t b = 0; b < x.size(); ++b)
                update_stats(*stats, x[b], trace0[b].real(), pos);
        }
    }
}

CMatrix FloquetLindblad::period_superoperator(double t0) const {
    int d = dim();
    int j0 = phase_index(t0);
    CMatrix lam(d * d, d * d);
    constexpr int chunk = 64;
    for (int start = 0; start < d * d; start += chunk) {
        int count = std::min(chunk, d * d - start);
        std::vector<CMatrix> x(count, CMatrix::Zero(d, d));
        for (int c = 0; c < count; ++c) x[c](((start + c) % d), (start + c) / d) = 1.0;
        rk4_periods(x, j0, steps_, true, nullptr);
        for (int c = 0; c < count; ++c)
            lam.col(start + c) = Eigen::Map<const CVector>(x[c].data(), d * d);
    }
    return lam;
}

std::vector<CMatrix> FloquetLindblad::evolve(const std::vector<CMatrix>& rho, double t0,
                                             double duration, LindbladStats* stats) const {
    int d = dim();
    for (const auto& r : rho)
        if (r.rows() != d || r.cols() != d) throw Error("FloquetLindblad: density dimension mismatch");
    double h = period_ / steps_;
    double ns = duration / h;
    long long n_steps = std::llround(ns);
    if (std::abs(ns - n_steps) > 1e-6 * std::max(1.0, ns) || n_steps < 0)
        throw Error("FloquetLindblad: duration must be a whole number of steps");
    int j0 = phase_index(t0);

    auto rotate = [&](CMatrix r, double t, double sign) {
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) r(a, b) *= std::exp(sign * kI * (eps_(a) - eps_(b)) * t);
        return r;
    };
    std::vector<CMatrix> x;
    for (const auto& r : rho) x.push_back(rotate(r, t0, -1.0));

    long long periods = n_steps / steps_;
    long long rest = n_steps % steps_;
    double b = static_cast<double>(x.size());
    double d3 = static_cast<double>(d) * d * d;
    double per_period = 4.0 * steps_ * 6.0 * d3;
    double direct = periods * b * per_period;
    double d2 = static_cast<double>(d) * d;
    double apply = std::min(periods * b * d2 * d2, std::ceil(std::log2(std::max<long long>(periods, 2))) * 2.0 * d2 * d2 * d2);
    double super = d2 * per_period * 1.3 + apply;
    bool use_super = periods >= 2 && d <= 64 && super < direct;

    if (use_super) {
        CMatrix lam = period_superoperator(t0);
        CMatrix v(d * d, x.size());
        for (std::size_t c = 0; c < x.size(); ++c) v.col(c) = Eigen::Map<const CVector>(x[c].data(), d * d);
        if (periods * b * d2 * d2 <= std::ceil(std::log2(static_cast<double>(periods))) * 2.0 * d2 * d2 * d2) {
            for (long long p = 0; p < periods; ++p) v = (lam * v).eval();
        } else {
            long long e = periods;
            CMatrix base = lam;
            while (e > 0) {
                if (e & 1) v = (base * v).eval();
                e >>= 1;
                if (e > 0) base = (base * base).eval();
            }
        }
        for (std::size_t c = 0; c < x.size(); ++c) {
            x[c] = Eigen::Map<const CMatrix>(v.col(c).data(), d, d);
            x[c] = (0.5 * (x[c] + x[c].adjoint())).eval();
        }
        if (stats)
            for (std::size_t c = 0; c < x.size(); ++c) update_stats(*stats, x[c], rho[c].trace().real(), true);
        rk4_periods(x, j0, rest, false, stats);
    } else {
        rk4_periods(x, j0, n_steps, false, stats);
    }
    std::vector<CMatrix> out;
    for (const auto& r : x) out.push_back(rotate(r, t0 + duration, 1.0));
    return out;
}

OpenSystemSetup FloquetLindblad::setup() const {
    OpenSystemSetup s;
    s.dim = dim();
    s.frame = Frame::FloquetFrame;
    for (const auto& c : channels_) {
        FrequencyPart op = c.op;
        s.dissipators.push_back({c.rate, [op](double t) { return op.at(t); }});
    }
    return s;
}

CMatrix QuantumChannel::apply(const CMatrix& rho) const {
    CMatrix out = CMatrix::Zero(units.front().rows(), units.front().cols());
    for (int m = 0; m < n_dim; ++m)
        for (int n = 0; n < n_dim; ++n)
            if (rho(m, n) != 0.0) out += rho(m, n) * at(m, n);
    return out;
}

std::vector<CMatrix> channel_probe_states(int n_dim) {
    std::vector<CMatrix> out;
    for (int m = 0; m < n_dim; ++m) {
        CMatrix r = CMatrix::Zero(n_dim, n_dim);
        r(m, m) = 1.0;
        out.push_back(r);
    }
    for (int m = 0; m < n_dim; ++m) {
        for (int n = m + 1; n < n_dim; ++n) {
            for (cplx c : {cplx(1.0), kI}) {
                CVector v = CVector::Zero(n_dim);
                v(m) = 1.0 / std::sqrt(2.0);
                v(n) = c / std::sqrt(2.0);
                out.push_back(v * v.adjoint());
            }
        }
    }
    return out;
}

QuantumChannel channel_from_probes(int n_dim, const std::vector<CMatrix>& outputs) {
    if (static_cast<int>(outputs.size()) != n_dim * n_dim)
        throw Error("channel_from_probes: expected n_dim^2 outputs");
    QuantumChannel ch;
    ch.n_dim = n_dim;
    ch.units.assign(n_dim * n_dim, CMatrix());
    for (int m = 0; m < n_dim; ++m) ch.units[m * n_dim + m] = outputs[m];
    int p = n_dim;
    const cplx half_1i = 0.5 * cplx(1.0, 1.0);
    for (int m = 0; m < n_dim; ++m) {
        for (int n = m + 1; n < n_dim; ++n) {
            // |m><n| = rho_+ + i rho_{+i} - (1+i)/2 (rho_m + rho_n)
            CMatrix u = outputs[p] + kI * outputs[p + 1] - half_1i * (outputs[m] + outputs[n]);
            ch.units[m * n_dim + n] = u;
            ch.units[n * n_dim + m] = u.adjoint();
            p += 2;
        }
    }
    return ch;
}

QuantumChannel unitary_channel(const CMatrix& m) {
    QuantumChannel ch;
    ch.n_dim = static_cast<int>(m.cols());
    for (int a = 0; a < ch.n_dim; ++a)
        for (int b = 0; b < ch.n_dim; ++b) ch.units.push_back(m.col(a) * m.col(b).adjoint());
    return ch;
}

QuantumChannel identity_channel(int n_dim) {
    return unitary_channel(CMatrix::Identity(n_dim, n_dim));
}

double average_fidelity(const QuantumChannel& ch, const CMatrix& target) {
    int n = ch.n_dim;
    if (target.rows() != n || target.cols() != n)
        throw Error("average_fidelity: target dimension does not match the channel");
    double norm = 1.0 / (n * (n + 1.0));
    double f = 0.0;
    for (int k = 0; k < n; ++k) {
        CMatrix a = target.adjoint() * ch.at(k, k) * target;
        f += norm * (a.trace().real() + a(k, k).real());
    }
    for (int m = 0; m < n; ++m) {
        for (int k = m + 1; k < n; ++k) {
            CMatrix a = target.adjoint() * ch.at(m, k) * target;
            f += 2.0 * norm * a(m, k).real();
        }
    }
    return f;
}

}  // namespace kapitza
