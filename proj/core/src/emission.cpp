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

#include "kapitza/emission.hpp"

#include <algorithm>
#include <cmath>

namespace kapitza {

FramedOperator floquet_frame_operator(const FloquetSolution& sol, const CMatrix& op, int n_levels) {
    if (op.rows() != sol.dim()) throw Error("floquet_frame_operator: operator dimension mismatch");
    std::vector<CMatrix> grid_op(sol.n_grid(), op);
    return floquet_frame_operator(sol, grid_op, n_levels);
}

FramedOperator floquet_frame_operator(const FloquetSolution& sol, const std::vector<CMatrix>& op,
                                      int n_levels) {
    if (static_cast<int>(op.size()) != sol.n_grid())
        throw Error("floquet_frame_operator: operator grid does not match the mode grid");
    n_levels = std::min(n_levels, sol.n_states());
    FramedOperator out;
    out.period = sol.period;
    out.omega_ang = sol.omega_ang;
    out.quasienergies = sol.quasienergies.head(n_levels);
    out.grid = sol.grid;
    out.samples.reserve(op.size());
    for (int j = 0; j < sol.n_grid(); ++j) {
        auto phi = sol.modes[j].leftCols(n_levels);
        out.samples.push_back(phi.adjoint() * op[j] * phi);
    }
    return out;
}

CMatrix SidebandExpansion::periodic_part(double t) const {
    int k = n_levels();
    CMatrix p = CMatrix::Zero(k, k);
    for (int n = -n_side; n <= n_side; ++n) p += at(n) * std::exp(kI * (n * omega_ang * t));
    return p;
}

CMatrix SidebandExpansion::frame_operator(double t) const {
    CVector ph = (kI * t * quasienergies.cast<cplx>()).array().exp();
    return ph.asDiagonal() * periodic_part(t) * ph.conjugate().asDiagonal();
}

SidebandExpansion sideband_coefficients(const FramedOperator& op, int n_side,
                                        const std::string& name) {
    int nt = static_cast<int>(op.samples.size());
    if (nt < 2 * n_side + 2)
        throw Error("sideband_coefficients: grid too coarse for the requested sidebands");
    int k = static_cast<int>(op.quasienergies.size());
    SidebandExpansion exp;
    exp.n_side = n_side;
    exp.omega_ang = op.omega_ang;
    exp.quasienergies = op.quasienergies;
    exp.operator_name = name;
    exp.coeffs.assign(2 * n_side + 1, CMatrix::Zero(k, k));
    for (int n = -n_side; n <= n_side; ++n) {
        CMatrix& c = exp.coeffs[n + n_side];
        for (int j = 0; j < nt; ++j) {
            // t_j = j T / N_t, so exp(-i n omega t_j) = exp(-2 pi i n j / N_t) exactly.
            double arg = -kTwoPi * static_cast<double>((static_cast<long long>(n) * j) % nt) / nt;
            c += op.samples[j] * std::polar(1.0, arg);
        }
        c /= static_cast<double>(nt);
    }
    double maxc = 0.0;
    for (const auto& c : exp.coeffs) maxc = std::max(maxc, c.cwiseAbs().maxCoeff());
    double edge = std::max(exp.at(n_side).cwiseAbs().maxCoeff(), exp.at(-n_side).cwiseAbs().maxCoeff());
    exp.aliasing_warning = edge > 1e-6 * maxc;
    return exp;
}

std::vector<EmissionLine> emission_lines(const SidebandExpansion& exp, double threshold) {
    std::vector<EmissionLine> lines;
    int k = exp.n_levels();
    for (int n = -exp.n_side; n <= exp.n_side; ++n) {
        const CMatrix& c = exp.at(n);
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                double w = std::norm(c(a, b));
                if (w >= threshold && w > 0.0)
                    lines.push_back({a, b, n, exp.line_frequency(a, b, n), w});
            }
        }
    }
    std::stable_sort(lines.begin(), lines.end(),
                     [](const EmissionLine& x, const EmissionLine& y) { return x.frequency < y.frequency; });
    return lines;
}

FrequencyPart::FrequencyPart(const SidebandExpansion& exp, FrequencySign sign, double tol)
    : omega_(exp.omega_ang), eps_(exp.quasienergies) {
    int k = exp.n_levels();
    for (int n = -exp.n_side; n <= exp.n_side; ++n) {
        CMatrix m = CMatrix::Zero(k, k);
        bool any = false;
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                double f = exp.line_frequency(a, b, n);
                bool keep = sign == FrequencySign::Negative ? f < 0.0 : f > 0.0;
                if (keep && std::abs(exp.at(n)(a, b)) > tol) {
                    m(a, b) = exp.at(n)(a, b);
                    any = true;
                }
            }
        }
        if (any) terms_.push_back({n, std::move(m)});
    }
}

CMatrix FrequencyPart::periodic(double t) const {
    int k = n_levels();
    CMatrix p = CMatrix::Zero(k, k);
    for (const auto& term : terms_) p += term.coeff * std::exp(kI * (term.n * omega_ * t));
    return p;
}

CMatrix FrequencyPart::at(double t) const {
    CVector ph = (kI * t * eps_.cast<cplx>()).array().exp();
    return ph.asDiagonal() * periodic(t) * ph.conjugate().asDiagonal();
}

CMatrix negative_frequency_operator(const SidebandExpansion& exp, double t) {
    return FrequencyPart(exp, FrequencySign::Negative).at(t);
}

RMatrix transition_rates(const SidebandExpansion& exp) {
    int k = exp.n_levels();
    RMatrix g = RMatrix::Zero(k, k);
    for (int n = -exp.n_side; n <= exp.n_side; ++n)
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b)
                if (exp.line_frequency(a, b, n) > 0.0) g(a, b) += std::norm(exp.at(n)(a, b));
    return g;
}

namespace {

double dominant(const SidebandExpansion& exp, int a, int b, bool allow_ambiguous) {
    double best = -1.0, second = -1.0, freq = 0.0;
    for (int n = -exp.n_side; n <= exp.n_side; ++n) {
        double f = exp.line_frequency(a, b, n);
        if (n == 0 || f <= 0.0) continue;
        double w = std::norm(exp.at(n)(a, b));
        if (w > best) {
            second = best;
            best = w;
            freq = f;
        } else if (w > second) {
            second = w;
        }
    }
    if (best <= 0.0)
        throw Error("dominant_lines: no emission-allowed line for pair " + std::to_string(a) +
                    "->" + std::to_string(b));
    if (!allow_ambiguous && second >= 0.9 * best)
        throw Error("dominant_lines: ambiguous dominant line for pair " + std::to_string(a) + "->" +
                    std::to_string(b));
    return freq;
}

}  // namespace

DominantLines dominant_lines(const SidebandExpansion& exp, bool allow_ambiguous) {
    if (exp.n_levels() < 4) throw Error("dominant_lines: need at least four levels");
    DominantLines d;
    d.w02 = dominant(exp, 0, 2, allow_ambiguous);
    d.w13 = dominant(exp, 1, 3, allow_ambiguous);
    d.w20 = dominant(exp, 2, 0, allow_ambiguous);
    d.w31 = dominant(exp, 3, 1, allow_ambiguous);
    return d;
}

ProtectionMetrics protection_metrics(const DominantLines& l, double kappa_c) {
    ProtectionMetrics m;
    m.delta = std::abs(l.w02 - l.w13);
    m.b_spacing = std::abs((l.w20 + l.w31) - (l.w02 + l.w13)) / 2.0;
    m.kappa_c = kappa_c;
    return m;
}

}  // namespace kapitza
