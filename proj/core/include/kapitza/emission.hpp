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

#include <optional>
#include <string>
#include <vector>

#include "kapitza/floquet.hpp"
#include "kapitza/linalg.hpp"

namespace kapitza {

// Periodic part P_ab(t_j) = <Phi_a(t_j)| O |Phi_b(t_j)> of an operator in the
// Floquet frame; the full element is exp(i (eps_a - eps_b) t) P_ab(t).
struct FramedOperator {
    double period = 0.0;
    double omega_ang = 0.0;
    RVector quasienergies;
    std::vector<double> grid;
    std::vector<CMatrix> samples;
};

FramedOperator floquet_frame_operator(const FloquetSolution& sol, const CMatrix& op, int n_levels);
// Time-dependent operator given on the solution's grid.
FramedOperator floquet_frame_operator(const FloquetSolution& sol, const std::vector<CMatrix>& op,
                                      int n_levels);

// O_ab(t) = exp(i (eps_a - eps_b) t) sum_n O_abn exp(i n omega t).
struct SidebandExpansion {
    int n_side = 0;
    double omega_ang = 0.0;
    RVector quasienergies;
    std::vector<CMatrix> coeffs;  // coeffs[n + n_side]
    std::string operator_name;
    bool aliasing_warning = false;

    int n_levels() const { return static_cast<int>(quasienergies.size()); }
    const CMatrix& at(int n) const { return coeffs.at(n + n_side); }
    double line_frequency(int a, int b, int n) const {
        return quasienergies(a) - quasienergies(b) + n * omega_ang;
    }
    // Periodic part reconstructed from the sidebands.
    CMatrix periodic_part(double t) const;
    // Full Floquet-frame operator O_ab(t).
    CMatrix frame_operator(double t) const;
};

SidebandExpansion sideband_coefficients(const FramedOperator& op, int n_side = 64,
                                        const std::string& name = "n");

struct EmissionLine {
    int alpha = 0;
    int beta = 0;
    int n = 0;
    double frequency = 0.0;  // rad/ns
    double weight = 0.0;
    bool emission_allowed() const { return frequency > 0.0; }
};

std::vector<EmissionLine> emission_lines(const SidebandExpansion& exp, double threshold);

enum class FrequencySign { Negative, Positive };

// Negative (or positive) frequency part of a Floquet-frame operator, stored
// as its T-periodic factor so repeated evaluation is cheap:
// O_-(t) = exp(i E t) P_-(t) exp(-i E t).
class FrequencyPart {
   public:
    FrequencyPart(const SidebandExpansion& exp, FrequencySign sign, double tol = 0.0);

    CMatrix periodic(double t) const;
    CMatrix at(double t) const;
    const RVector& quasienergies() const { return eps_; }
    double period() const { return kTwoPi / omega_; }
    int n_levels() const { return static_cast<int>(eps_.size()); }
    int n_terms() const { return static_cast<int>(terms_.size()); }

   private:
    struct Term {
        int n;
        CMatrix coeff;
    };
    double omega_;
    RVector eps_;
    std::vector<Term> terms_;
};

CMatrix negative_frequency_operator(const SidebandExpansion& exp, double t);

// Gamma(a, b) = sum over emission-allowed n of |O_abn|^2 (rate of a -> b in units of kappa).
RMatrix transition_rates(const SidebandExpansion& exp);

struct DominantLines {
    double w02 = 0.0;
    double w13 = 0.0;
    double w20 = 0.0;
    double w31 = 0.0;
};

// Largest-weight emission-allowed sideband (n != 0) line of each ordered
// pair; the static n = 0 component is not drive-assisted. Throws if the
// runner-up is within 10% of the winner, unless allow_ambiguous is set.
DominantLines dominant_lines(const SidebandExpansion& exp, bool allow_ambiguous = false);

struct ProtectionMetrics {
    double delta = 0.0;      // rad/ns
    double b_spacing = 0.0;  // rad/ns
    double kappa_c = 0.0;    // rad/ns
};

ProtectionMetrics protection_metrics(const DominantLines& lines, double kappa_c = 0.0);

}  // namespace kapitza
