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

#include "kapitza/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace kapitza {

namespace {

// Yoshida weights for the fourth-order triple-jump composition.
const double kCbrt2 = std::cbrt(2.0);
const double kW1 = 1.0 / (2.0 - kCbrt2);
const double kW0 = -kCbrt2 / (2.0 - kCbrt2);

constexpr double kUnitarityTol = 1e-10;

void check_grid(int n_steps, int n_grid) {
    if (n_steps < 1 || n_grid < 1) throw Error("propagate_period: n_steps and n_grid must be positive");
    if (n_steps % n_grid != 0)
        throw Error("propagate_period: n_steps must be a multiple of n_grid");
}

// Rows of x = [re | im] multiplied by the complex diagonal (a + i b).
void apply_diag(RMatrix& x, const RVector& a, const RVector& b) {
    Eigen::Index m = x.cols() / 2;
    RMatrix re = x.leftCols(m);
    auto im = x.rightCols(m);
    x.leftCols(m) = (re.array().colwise() * a.array()) - (im.array().colwise() * b.array());
    x.rightCols(m) = (im.array().colwise() * a.array()) + (re.array().colwise() * b.array());
}

RMatrix split_complex(const CMatrix& psi) {
    RMatrix x(psi.rows(), 2 * psi.cols());
    x.leftCols(psi.cols()) = psi.real();
    x.rightCols(psi.cols()) = psi.imag();
    return x;
}

CMatrix join_complex(const RMatrix& x) {
    Eigen::Index m = x.cols() / 2;
    CMatrix psi(x.rows(), m);
    psi.real() = x.leftCols(m);
    psi.imag() = x.rightCols(m);
    return psi;
}

CMatrix cos_phi_matrix(int dim) {
    CMatrix c = CMatrix::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; ++i) {
        c(i, i + 1) = 0.5;
        c(i + 1, i) = 0.5;
    }
    return c;
}

}  // namespace

RotorPropagator::RotorPropagator(const RotorHamiltonian& h) : h_(h) {
    const CircuitParams& p = h.params();
    RMatrix c = cos_k_phi(p, 1).real();
    Eigen::SelfAdjointEigenSolver<RMatrix> es(c);
    v_ = es.eigenvectors();
    lambda_ = es.eigenvalues();
    kinetic_ = h.kinetic();
    charge_.resize(p.dim());
    for (int i = 0; i < p.dim(); ++i) charge_(i) = i - p.n_max;
}

void RotorPropagator::strang(RMatrix& x, double t_mid, double h) const {
    RotorDrive d = h_.drive(t_mid);
    double r = std::hypot(d.cos_coeff, d.sin_coeff);
    double theta = std::atan2(d.sin_coeff, d.cos_coeff);
    // c cos(phi) + s sin(phi) = r cos(phi - theta) = D r cos(phi) D^dag, D = exp(-i theta n).
    RVector ph_right = -0.5 * h * kinetic_ + theta * charge_;
    RVector ph_left = -0.5 * h * kinetic_ - theta * charge_;
    RVector ph_pot = -h * r * lambda_;
    apply_diag(x, ph_right.array().cos().matrix(), ph_right.array().sin().matrix());
    RMatrix y = v_.transpose() * x;
    apply_diag(y, ph_pot.array().cos().matrix(), ph_pot.array().sin().matrix());
    x.noalias() = v_ * y;
    apply_diag(x, ph_left.array().cos().matrix(), ph_left.array().sin().matrix());
}

void RotorPropagator::composite(RMatrix& x, double t, double h) const {
    double h1 = kW1 * h;
    double h0 = kW0 * h;
    strang(x, t + 0.5 * h1, h1);
    strang(x, t + h1 + 0.5 * h0, h0);
    strang(x, t + h1 + h0 + 0.5 * h1, h1);
}

void RotorPropagator::evolve(CMatrix& psi, double t0, double t1, int n_steps) const {
    if (n_steps < 1) throw Error("RotorPropagator: n_steps must be positive");
    RMatrix x = split_complex(psi);
    double h = (t1 - t0) / n_steps;
    for (int k = 0; k < n_steps; ++k) composite(x, t0 + k * h, h);
    psi = join_complex(x);
}

void RotorPropagator::evolve_strang(CMatrix& psi, double t0, double t1, int n_steps) const {
    if (n_steps < 1) throw Error("RotorPropagator: n_steps must be positive");
    RMatrix x = split_complex(psi);
    double h = (t1 - t0) / n_steps;
    for (int k = 0; k < n_steps; ++k) strang(x, t0 + (k + 0.5) * h, h);
    psi = join_complex(x);
}

Propagation propagate_period(const TimeOperator& h, double period, int n_steps, int n_grid,
                             double t0) {
    check_grid(n_steps, n_grid);
    CMatrix h0 = h(t0);
    Propagation out;
    out.period = period;
    out.t0 = t0;
    out.n_steps = n_steps;
    CMatrix u = CMatrix::Identity(h0.rows(), h0.cols());
    double dt = period / n_steps;
    int stride = n_steps / n_grid;
    for (int k = 0; k < n_steps; ++k) {
        if (k % stride == 0) {
            out.grid.push_back(t0 + k * dt);
            out.u_grid.push_back(u);
        }
        u = expm_hermitian(h(t0 + (k + 0.5) * dt), dt) * u;
    }
    out.u_period = u;
    double err = unitarity_error(u);
    if (err > kUnitarityTol)
        throw Error("propagate_period: propagator not unitary (error " + std::to_string(err) + ")");
    return out;
}

Propagation propagate_period(const RotorHamiltonian& h, double period, int n_steps, int n_grid,
                             double t0) {
    check_grid(n_steps, n_grid);
    RotorPropagator prop(h);
    int d = h.params().dim();
    Propagation out;
    out.period = period;
    out.t0 = t0;
    out.n_steps = n_steps;
    CMatrix u = CMatrix::Identity(d, d);
    int stride = n_steps / n_grid;
    double dt = period / n_steps;
    for (int j = 0; j < n_grid; ++j) {
        out.grid.push_back(t0 + j * stride * dt);
        out.u_grid.push_back(u);
        prop.evolve(u, t0 + j * stride * dt, t0 + (j + 1) * stride * dt, stride);
    }
    out.u_period = u;
    double err = unitarity_error(u);
    if (err > kUnitarityTol)
        throw Error("propagate_period: propagator not unitary (error " + std::to_string(err) + ")");
    return out;
}

EffectiveModel effective_model(const CircuitParams& params, const FluxWaveform& waveform,
                               double alpha_x_ghz) {
    params.validate();
    EffectiveModel eff;
    double ec = angular(params.e_c);
    double ej = angular(params.e_j);
    double w = angular(waveform.rate > 0.0 ? waveform.rate : params.omega);
    eff.e_j_tilde = ec * ej * ej / (w * w);
    switch (waveform.kind) {
        case WaveformKind::Linear:
        case WaveformKind::Triangle:
            if (params.delta_e != 0.0) {
                eff.variant = EffectiveVariant::Disordered;
                eff.cos2_coeff = -eff.e_j_tilde * (1.0 - params.delta_e * params.delta_e);
            } else {
                eff.variant = EffectiveVariant::Linear;
                eff.cos2_coeff = -eff.e_j_tilde;
            }
            break;
        case WaveformKind::Cosine: {
            eff.variant = EffectiveVariant::Cosine;
            eff.cos_coeff = -ej * std::cyl_bessel_j(0.0, waveform.alpha);
            double sum = 0.0;
            for (int n = 1; n < 200; ++n) {
                double term = std::cyl_bessel_j(2.0 * n, waveform.alpha) / n;
                term *= term;
                sum += term;
                if (n > 1 && term < 1e-12 * sum) break;
            }
            eff.cos2_coeff = -eff.e_j_tilde * sum;
            break;
        }
        default:
            throw Error("effective_model: waveform must be linear, triangle or cosine");
    }
    eff.cos_coeff += angular(alpha_x_ghz);
    CMatrix n = charge_operator(params);
    eff.hamiltonian = 4.0 * ec * n * n + eff.cos_coeff * cos_k_phi(params, 1) +
                      eff.cos2_coeff * cos_k_phi(params, 2);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(eff.hamiltonian);
    RVector energies = es.eigenvalues();
    CMatrix vectors = es.eigenvectors();
    int d = static_cast<int>(energies.size());

    // A tilted double well has localised eigenstates. Label them by well:
    // even labels climb the lower well, odd labels the other one, so that
    // (0, 2) and (1, 3) stay intra-well pairs as in the symmetric case.
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    int n_check = std::min(d, 6);
    CMatrix cphi = cos_k_phi(params, 1);
    std::vector<double> loc(d);
    bool localised = n_check >= 2;
    for (int k = 0; k < std::min(d, 16); ++k) {
        loc[k] = vectors.col(k).dot(cphi * vectors.col(k)).real();
        if (k < n_check && std::abs(loc[k]) <= 0.5) localised = false;
    }
    if (localised) {
        std::vector<int> lower, upper;
        double sign0 = loc[0] > 0.0 ? 1.0 : -1.0;
        for (int k = 0; k < std::min(d, 16); ++k) {
            if (std::abs(loc[k]) <= 0.5) break;
            (loc[k] * sign0 > 0.0 ? lower : upper).push_back(k);
        }
        std::size_t pairs = std::min(lower.size(), upper.size());
        std::vector<int> head;
        for (std::size_t i = 0; i < pairs; ++i) {
            head.push_back(lower[i]);
            head.push_back(upper[i]);
        }
        std::vector<int> rest;
        for (int k = 0; k < d; ++k)
            if (std::find(head.begin(), head.end(), k) == head.end()) rest.push_back(k);
        order = head;
        order.insert(order.end(), rest.begin(), rest.end());
    }
    eff.energies.resize(d);
    eff.eigenvectors.resize(d, d);
    for (int k = 0; k < d; ++k) {
        eff.energies(k) = energies(order[k]);
        eff.eigenvectors.col(k) = vectors.col(order[k]);
    }
    for (Eigen::Index k = 0; k < eff.eigenvectors.cols(); ++k) {
        Eigen::Index imax;
        eff.eigenvectors.col(k).cwiseAbs().maxCoeff(&imax);
        cplx ph = eff.eigenvectors(imax, k) / std::abs(eff.eigenvectors(imax, k));
        eff.eigenvectors.col(k) *= std::conj(ph);
    }
    return eff;
}

int FloquetSolution::grid_index(double t) const {
    double s = t / period * n_grid();
    double r = std::round(s);
    if (std::abs(s - r) > 1e-6)
        throw Error("FloquetSolution: time " + std::to_string(t) + " ns is not on the mode grid");
    long long idx = static_cast<long long>(r) % n_grid();
    if (idx < 0) idx += n_grid();
    return static_cast<int>(idx);
}

CMatrix FloquetSolution::psi_at(double t, int count) const {
    int j = grid_index(t);
    CVector ph(count);
    for (int a = 0; a < count; ++a) ph(a) = std::exp(-kI * quasienergies(a) * t);
    return modes[j].leftCols(count) * ph.asDiagonal();
}

FloquetSolution FloquetSolution::truncated(int count) const {
    FloquetSolution out = *this;
    count = std::min(count, n_states());
    out.quasienergies = quasienergies.head(count);
    for (auto& m : out.modes) m = m.leftCols(count).eval();
    out.eigen_index.resize(count);
    return out;
}

FloquetSolution floquet_modes(const Propagation& prop, double omega_ghz) {
    if (prop.t0 != 0.0) throw Error("floquet_modes: propagation must start at t = 0");
    double err = unitarity_error(prop.u_period);
    if (err > kUnitarityTol) throw Error("floquet_modes: one-period propagator is not unitary");
    double period = prop.period;
    UnitaryEigen eig = unitary_eigen(prop.u_period);
    int d = static_cast<int>(eig.values.size());

    RVector eps(d);
    double half = std::numbers::pi / period;
    for (int a = 0; a < d; ++a) {
        double e = -std::arg(eig.values(a)) / period;
        if (e <= -half) e += 2.0 * half;
        eps(a) = e;
    }
    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eps(a) < eps(b); });

    FloquetSolution sol;
    sol.period = period;
    sol.omega_ang = angular(omega_ghz);
    sol.quasienergies.resize(d);
    CMatrix v0(d, d);
    for (int k = 0; k < d; ++k) {
        sol.quasienergies(k) = eps(order[k]);
        v0.col(k) = eig.vectors.col(order[k]);
        sol.eigen_index.push_back(k);
    }
    for (int k = 0; k + 1 < d; ++k) {
        cplx lk = std::exp(-kI * sol.quasienergies(k) * period);
        std::vector<int> cluster{k};
        while (k + 1 < d && std::abs(std::exp(-kI * sol.quasienergies(k + 1) * period) - lk) < 1e-12) {
            cluster.push_back(++k);
        }
        if (cluster.size() > 1) sol.degenerate_clusters.push_back(cluster);
    }
    sol.grid = prop.grid;
    sol.modes.reserve(prop.u_grid.size());
    for (std::size_t j = 0; j < prop.u_grid.size(); ++j) {
        double t = prop.grid[j];
        CVector ph = (kI * t * sol.quasienergies.cast<cplx>()).array().exp();
        sol.modes.push_back(prop.u_grid[j] * v0 * ph.asDiagonal());
    }
    return sol;
}

FloquetSolution label_and_gauge(const FloquetSolution& in, const EffectiveModel& eff,
                                int n_tracked) {
    int d = in.dim();
    int ns = in.n_states();
    if (eff.eigenvectors.rows() != d) throw Error("label_and_gauge: basis dimensions differ");
    FloquetSolution sol = in;
    const CMatrix& e = eff.eigenvectors;

    // Inside (near-)degenerate clusters the eigenvectors are an arbitrary
    // rotation; replace them by the orthonormalised projections of the
    // effective eigenstates that live in the cluster.
    std::vector<int> order(ns);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sol.quasienergies(a) < sol.quasienergies(b); });
    for (int k = 0; k < ns;) {
        std::vector<int> cluster{order[k]};
        int k2 = k + 1;
        while (k2 < ns && std::abs(sol.quasienergies(order[k2]) - sol.quasienergies(order[k])) *
                                  sol.period < 1e-9) {
            cluster.push_back(order[k2]);
            ++k2;
        }
        k = k2;
        int m = static_cast<int>(cluster.size());
        if (m == 1) continue;
        CMatrix q(d, m);
        for (int c = 0; c < m; ++c) q.col(c) = sol.modes[0].col(cluster[c]);
        CMatrix proj = q.adjoint() * e;
        std::vector<int> cand(e.cols());
        std::iota(cand.begin(), cand.end(), 0);
        std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) {
            return proj.col(a).squaredNorm() > proj.col(b).squaredNorm();
        });
        CMatrix c(m, m);
        for (int i = 0; i < m; ++i) c.col(i) = proj.col(cand[i]);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(c.adjoint() * c);
        if (es.eigenvalues().minCoeff() < 1e-8) continue;
        RVector inv_sqrt = es.eigenvalues().array().rsqrt();
        CMatrix rot = c * es.eigenvectors() * inv_sqrt.cast<cplx>().asDiagonal() *
                      es.eigenvectors().adjoint();
        double eps_mean = 0.0;
        for (int i : cluster) eps_mean += sol.quasienergies(i) / m;
        for (auto& modes : sol.modes) {
            CMatrix cols(d, m);
            for (int i = 0; i < m; ++i) cols.col(i) = modes.col(cluster[i]);
            cols = cols * rot;
            for (int i = 0; i < m; ++i) modes.col(cluster[i]) = cols.col(i);
        }
        for (int i : cluster) sol.quasienergies(i) = eps_mean;
    }

    RMatrix ov = (e.adjoint() * sol.modes[0]).cwiseAbs2();
    std::vector<int> assign(ns, -1);
    std::vector<bool> used(ns, false);
    bool ambiguous = false;
    for (int n = 0; n < ns; ++n) {
        Eigen::Index best_all;
        ov.row(n).maxCoeff(&best_all);
        int best = -1;
        double best_val = -1.0;
        for (int a = 0; a < ns; ++a) {
            if (!used[a] && ov(n, a) > best_val) {
                best_val = ov(n, a);
                best = a;
            }
        }
        if (n < n_tracked && used[best_all]) ambiguous = true;
        used[best] = true;
        assign[n] = best;
    }

    FloquetSolution out = sol;
    out.labeled = true;
    out.ambiguous_labels = ambiguous;
    for (int n = 0; n < ns; ++n) {
        out.quasienergies(n) = sol.quasienergies(assign[n]);
        out.eigen_index[n] = sol.eigen_index[assign[n]];
    }
    std::vector<cplx> phase(ns);
    for (int n = 0; n < ns; ++n) {
        cplx o = e.col(n).dot(sol.modes[0].col(assign[n]));
        phase[n] = std::abs(o) > 0.0 ? std::conj(o) / std::abs(o) : cplx(1.0);
    }
    for (std::size_t j = 0; j < sol.modes.size(); ++j)
        for (int n = 0; n < ns; ++n) out.modes[j].col(n) = phase[n] * sol.modes[j].col(assign[n]);

    CMatrix cphi = cos_phi_matrix(d);
    for (int k = 0; 2 * k + 1 < std::min(n_tracked, ns); ++k) {
        CVector v = (out.modes[0].col(2 * k) + out.modes[0].col(2 * k + 1)) / std::sqrt(2.0);
        double c = v.dot(cphi * v).real();
        if (c < -0.5)
            for (auto& m : out.modes) m.col(2 * k + 1) *= -1.0;
    }
    return out;
}

CVector encode(const FloquetSolution& sol, cplx c0, cplx c1) {
    double norm = std::norm(c0) + std::norm(c1);
    if (std::abs(norm - 1.0) > 1e-9) throw Error("encode: amplitudes are not normalised");
    if (sol.n_states() < 2) throw Error("encode: solution has fewer than two states");
    return c0 * sol.modes[0].col(0) + c1 * sol.modes[0].col(1);
}

FloquetSolution solve_floquet(const RotorHamiltonian& h, const EffectiveModel& eff,
                              const FloquetOptions& opts) {
    double period = h.period();
    if (!(period > 0.0)) throw Error("solve_floquet: Hamiltonian is not periodic");
    Propagation prop = propagate_period(h, period, opts.n_steps, opts.n_grid);
    FloquetSolution sol = floquet_modes(prop, 1.0 / period);
    return label_and_gauge(sol, eff, opts.n_tracked);
}

}  // namespace kapitza
