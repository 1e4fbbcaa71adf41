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

#include "kapitza/circuit.hpp"

#include <cmath>
#include <string>

namespace kapitza {

void CircuitParams::validate() const {
    if (!(e_j >= 0.0)) throw Error("circuit: e_j must be non-negative");
    if (!(e_c > 0.0)) throw Error("circuit: e_c must be positive");
    if (!(omega > 0.0)) throw Error("circuit: omega must be positive");
    if (n_max < 1) throw Error("circuit: n_max must be >= 1");
    if (!(delta_e >= 0.0 && delta_e < 1.0)) throw Error("circuit: delta_e must lie in [0, 1)");
    if (!(c_ratio > 0.0 && c_ratio < 1.0)) throw Error("circuit: c_ratio must lie in (0, 1)");
    if (!std::isfinite(n_g)) throw Error("circuit: n_g must be finite");
}

FluxWaveform FluxWaveform::linear(double rate) {
    FluxWaveform w;
    w.kind = WaveformKind::Linear;
    w.rate = rate;
    return w;
}

FluxWaveform FluxWaveform::triangle(double rate) {
    FluxWaveform w;
    w.kind = WaveformKind::Triangle;
    w.rate = rate;
    return w;
}

FluxWaveform FluxWaveform::cosine(double alpha, double rate) {
    FluxWaveform w;
    w.kind = WaveformKind::Cosine;
    w.alpha = alpha;
    w.rate = rate;
    return w;
}

FluxWaveform FluxWaveform::constant() {
    FluxWaveform w;
    w.kind = WaveformKind::Constant;
    return w;
}

FluxWaveform FluxWaveform::blend(const FluxWaveform& from, const FluxWaveform& to,
                                 std::function<double(double)> envelope) {
    FluxWaveform w;
    w.kind = WaveformKind::Blend;
    w.from = std::make_shared<const FluxWaveform>(from);
    w.to = std::make_shared<const FluxWaveform>(to);
    w.envelope = std::move(envelope);
    return w;
}

double FluxWaveform::phi_ext(double t, double omega_ghz) const {
    double w = angular(rate > 0.0 ? rate : omega_ghz);
    switch (kind) {
        case WaveformKind::Linear:
            return w * t;
        case WaveformKind::Triangle: {
            double u = std::fmod(w * t, 2.0 * kTwoPi);
            if (u < 0.0) u += 2.0 * kTwoPi;
            return u < kTwoPi ? u : 2.0 * kTwoPi - u;
        }
        case WaveformKind::Cosine:
            return alpha * std::cos(w * t);
        case WaveformKind::Constant:
            return 0.0;
        case WaveformKind::Blend:
            break;
    }
    throw Error("phi_ext is not defined for an amplitude blend");
}

std::pair<double, double> FluxWaveform::trig(double t, double omega_ghz) const {
    if (kind == WaveformKind::Blend) {
        double a = envelope(t);
        auto [c0, s0] = from->trig(t, omega_ghz);
        auto [c1, s1] = to->trig(t, omega_ghz);
        return {(1.0 - a) * c0 + a * c1, (1.0 - a) * s0 + a * s1};
    }
    double p = phi_ext(t, omega_ghz);
    return {std::cos(p), std::sin(p)};
}

double FluxWaveform::period(double omega_ghz) const {
    double r = rate > 0.0 ? rate : omega_ghz;
    switch (kind) {
        case WaveformKind::Linear:
        case WaveformKind::Cosine:
            return 1.0 / r;
        case WaveformKind::Triangle:
            return 2.0 / r;
        case WaveformKind::Constant:
        case WaveformKind::Blend:
            return 0.0;
    }
    return 0.0;
}

RotorHamiltonian::RotorHamiltonian(CircuitParams params, std::function<RotorDrive(double)> drive,
                                   double period)
    : params_(params), drive_(std::move(drive)), period_(period) {
    params_.validate();
}

RVector RotorHamiltonian::kinetic() const {
    int d = params_.dim();
    RVector k(d);
    double ec = angular(params_.e_c);
    for (int i = 0; i < d; ++i) {
        double n = i - params_.n_max - params_.n_g;
        k(i) = 4.0 * ec * n * n;
    }
    return k;
}

CMatrix RotorHamiltonian::at(double t) const {
    RotorDrive d = drive_(t);
    CMatrix h = kinetic().cast<cplx>().asDiagonal();
    h += d.cos_coeff * cos_k_phi(params_, 1);
    if (d.sin_coeff != 0.0) h += d.sin_coeff * sin_k_phi(params_, 1);
    return h;
}

RotorHamiltonian RotorHamiltonian::with_cos_term(std::function<double(double)> extra,
                                                 double period) const {
    auto base = drive_;
    return RotorHamiltonian(
        params_,
        [base, extra = std::move(extra)](double t) {
            RotorDrive d = base(t);
            d.cos_coeff += extra(t);
            return d;
        },
        period);
}

CMatrix charge_operator(const CircuitParams& params) {
    params.validate();
    int d = params.dim();
    CMatrix n = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) n(i, i) = i - params.n_max - params.n_g;
    return n;
}

CMatrix cos_k_phi(const CircuitParams& params, int k) {
    params.validate();
    if (k < 1 || k > 2 * params.n_max)
        throw Error("cos_k_phi: k must lie in [1, 2 n_max], got " + std::to_string(k));
    int d = params.dim();
    CMatrix c = CMatrix::Zero(d, d);
    for (int i = 0; i + k < d; ++i) {
        c(i, i + k) = 0.5;
        c(i + k, i) = 0.5;
    }
    return c;
}

CMatrix sin_k_phi(const CircuitParams& params, int k) {
    params.validate();
    if (k < 1 || k > 2 * params.n_max)
        throw Error("sin_k_phi: k must lie in [1, 2 n_max], got " + std::to_string(k));
    // exp(i k phi)|n> = |n + k>, so sin(k phi) = (e^{ik phi} - e^{-ik phi}) / 2i.
    int d = params.dim();
    CMatrix s = CMatrix::Zero(d, d);
    for (int i = 0; i + k < d; ++i) {
        s(i + k, i) = cplx(0.0, -0.5);
        s(i, i + k) = cplx(0.0, 0.5);
    }
    return s;
}

CMatrix parity_operator(const CircuitParams& params) {
    int d = params.dim();
    CMatrix p = CMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) p(d - 1 - i, i) = 1.0;
    return p;
}

RotorHamiltonian driven_rotor(const CircuitParams& params, const FluxWaveform& waveform) {
    params.validate();
    double ej = angular(params.e_j);
    double de = params.delta_e;
    double omega = params.omega;
    return RotorHamiltonian(
        params,
        [waveform, ej, de, omega](double t) {
            auto [c, s] = waveform.trig(t, omega);
            return RotorDrive{-ej * c, -de * ej * s};
        },
        waveform.period(omega));
}

CMatrix hamiltonian_at(const CircuitParams& params, const FluxWaveform& waveform, double t) {
    return driven_rotor(params, waveform).at(t);
}

CMatrix two_qubit_hamiltonian_at(const CircuitParams& q1, const CircuitParams& q2,
                                 double alpha_xx_ghz, double envelope, double t) {
    if (q1.omega != q2.omega) throw Error("two_qubit_hamiltonian_at: drive frequencies differ");
    CMatrix h1 = hamiltonian_at(q1, FluxWaveform::linear(), t);
    CMatrix h2 = hamiltonian_at(q2, FluxWaveform::linear(), t);
    CMatrix id1 = CMatrix::Identity(q1.dim(), q1.dim());
    CMatrix id2 = CMatrix::Identity(q2.dim(), q2.dim());
    CMatrix h = kron(h1, id2) + kron(id1, h2);
    if (alpha_xx_ghz != 0.0 && envelope != 0.0) {
        // cos(phi1 - phi2) = cos phi1 cos phi2 + sin phi1 sin phi2
        CMatrix coupling = kron(cos_k_phi(q1, 1), cos_k_phi(q2, 1)) +
                           kron(sin_k_phi(q1, 1), sin_k_phi(q2, 1));
        h += angular(alpha_xx_ghz) * envelope * coupling;
    }
    return h;
}

}  // namespace kapitza
