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


#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "kapitza/circuit.hpp"
#include "kapitza/emission.hpp"
#include "kapitza/floquet.hpp"
#include "test_util.hpp"

namespace kapitza {
namespace {

using testing::max_abs;

FloquetSolution reference_solution(const CircuitParams& p) {
    EffectiveModel eff = effective_model(p, FluxWaveform::linear());
    Propagation prop = propagate_period(driven_rotor(p, FluxWaveform::linear()), p.period(), 1024);
    return label_and_gauge(floquet_modes(prop, p.omega), eff, 6);
}

class ChargeExpansion : public ::testing::Test {
   protected:
    static void SetUpTestSuite() {
        CircuitParams p;
        sol_ = new FloquetSolution(reference_solution(p));
        framed_ = new FramedOperator(floquet_frame_operator(*sol_, charge_operator(p), 6));
        exp_ = new SidebandExpansion(sideband_coefficients(*framed_, 64, "n"));
    }
    static void TearDownTestSuite() {
        delete sol_;
        delete framed_;
        delete exp_;
    }
    static FloquetSolution* sol_;
    static FramedOperator* framed_;
    static SidebandExpansion* exp_;
};

FloquetSolution* ChargeExpansion::sol_ = nullptr;
FramedOperator* ChargeExpansion::framed_ = nullptr;
SidebandExpansion* ChargeExpansion::exp_ = nullptr;

TEST_F(ChargeExpansion, HermitianSidebandSymmetry) {
    for (int n = -exp_->n_side; n <= exp_->n_side; ++n)
        EXPECT_LT(max_abs(exp_->at(n) - exp_->at(-n).adjoint()), 1e-9) << "n=" << n;
}

TEST_F(ChargeExpansion, FourierReconstruction) {
    double scale = 0.0;
    for (const auto& s : framed_->samples) scale = std::max(scale, max_abs(s));
    for (std::size_t j = 0; j < framed_->grid.size(); ++j)
        EXPECT_LT(max_abs(exp_->periodic_part(framed_->grid[j]) - framed_->samples[j]), 1e-10 * scale) << "j=" << j;
    EXPECT_FALSE(exp_->aliasing_warning);
}

TEST_F(ChargeExpansion, ParitySelection) {
    for (int n = -exp_->n_side; n <= exp_->n_side; ++n)
        EXPECT_LT(max_abs(exp_->at(n).topLeftCorner(2, 2)), 1e-9) << "n=" << n;
}

TEST_F(ChargeExpansion, MirrorLines) {
    std::vector<EmissionLine> lines = emission_lines(*exp_, 1e-8);
    ASSERT_FALSE(lines.empty());
    std::map<std::tuple<int, int, int>, EmissionLine> index;
    for (const auto& l : lines) index[{l.alpha, l.beta, l.n}] = l;
    for (const auto& l : lines) {
        auto it = index.find({l.beta, l.alpha, -l.n});
        ASSERT_NE(it, index.end());
        EXPECT_NEAR(it->second.frequency, -l.frequency, 1e-9);
        EXPECT_NEAR(it->second.weight, l.weight, 1e-9 * l.weight + 1e-15);
        EXPECT_EQ(it->second.emission_allowed(), l.frequency < 0.0);
    }
}

TEST_F(ChargeExpansion, FrequencyPartsSplitTheOperator) {
    FrequencyPart neg(*exp_, FrequencySign::Negative);
    FrequencyPart pos(*exp_, FrequencySign::Positive);
    int k = exp_->n_levels();
    for (double t : {0.0, 0.0137, 0.31}) {
        CMatrix zero = CMatrix::Zero(k, k);
        CVector ph = (kI * t * exp_->quasienergies.cast<cplx>()).array().exp();
        for (int n = -exp_->n_side; n <= exp_->n_side; ++n)
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b)
                    if (exp_->line_frequency(a, b, n) == 0.0)
                        zero(a, b) += exp_->at(n)(a, b) * ph(a) * std::conj(ph(b)) * std::exp(kI * (n * exp_->omega_ang * t));
        CMatrix full = exp_->frame_operator(t);
        EXPECT_LT(max_abs(neg.at(t) + pos.at(t) + zero - full), 1e-12 * max_abs(full));
        EXPECT_LT(max_abs(neg.at(t).adjoint() - pos.at(t)), 1e-9);
        EXPECT_LT(max_abs(negative_frequency_operator(*exp_, t) - neg.at(t)), 1e-14);
    }
}

TEST_F(ChargeExpansion, RatesSumEmissionLines) {
    RMatrix g = transition_rates(*exp_);
    RMatrix oracle = RMatrix::Zero(g.rows(), g.cols());
    for (const auto& l : emission_lines(*exp_, 0.0))
        if (l.emission_allowed()) oracle(l.alpha, l.beta) += l.weight;
    EXPECT_LT((g - oracle).cwiseAbs().maxCoeff(), 1e-14);
}

TEST_F(ChargeExpansion, IdentityOperatorHasNoLines) {
    int d = sol_->dim();
    SidebandExpansion id = sideband_coefficients(floquet_frame_operator(*sol_, CMatrix::Identity(d, d), 6), 16, "1");
    EXPECT_LT(max_abs(id.at(0) - CMatrix::Identity(6, 6)), 1e-10);
    // Off-diagonal weights are round-off of the mode orthonormality (~1e-24).
    for (const auto& l : emission_lines(id, 1e-20)) {
        EXPECT_EQ(l.alpha, l.beta);
        EXPECT_EQ(l.n, 0);
        EXPECT_FALSE(l.emission_allowed());
    }
    EXPECT_LT(transition_rates(id).cwiseAbs().maxCoeff(), 1e-20);
}

TEST(Emission, RecoversSyntheticSidebands) {
    std::mt19937_64 rng(21);
    CMatrix a = testing::random_matrix(3, rng), b = testing::random_matrix(3, rng), c = testing::random_matrix(3, rng);
    FramedOperator op;
    op.period = 0.1;
    op.omega_ang = kTwoPi / op.period;
    op.quasienergies = RVector::LinSpaced(3, -1.0, 1.0);
    for (int j = 0; j < 32; ++j) {
        double t = op.period * j / 32;
        op.grid.push_back(t);
        op.samples.push_back(a + b * std::exp(kI * op.omega_ang * t) + c * std::exp(-2.0 * kI * op.omega_ang * t));
    }
    SidebandExpansion e = sideband_coefficients(op, 8);
    EXPECT_LT(max_abs(e.at(0) - a), 1e-13);
    EXPECT_LT(max_abs(e.at(1) - b), 1e-13);
    EXPECT_LT(max_abs(e.at(-2) - c), 1e-13);
    EXPECT_LT(max_abs(e.at(3)), 1e-13);
    EXPECT_NEAR(e.line_frequency(2, 0, -1), 2.0 - op.omega_ang, 1e-12);
    EXPECT_THROW(sideband_coefficients(op, 16), Error);
}

TEST(Emission, FreeRotorCosineCouplesNeighbouringCharges) {
    CircuitParams p;
    p.e_j = 0.0;
    p.n_g = 0.1;
    p.n_max = 5;
    FloquetSolution sol =
        floquet_modes(propagate_period(driven_rotor(p, FluxWaveform::linear()), p.period(), 64, 32), p.omega);
    SidebandExpansion e = sideband_coefficients(floquet_frame_operator(sol, cos_k_phi(p, 1), p.dim()), 8);
    // Each Floquet state is a charge state; identify its charge from the mode.
    std::vector<int> charge(p.dim());
    for (int a = 0; a < p.dim(); ++a) {
        Eigen::Index i;
        sol.modes[0].col(a).cwiseAbs().maxCoeff(&i);
        charge[a] = static_cast<int>(i) - p.n_max;
    }
    for (int a = 0; a < p.dim(); ++a) {
        for (int b = 0; b < p.dim(); ++b) {
            double expect = std::abs(charge[a] - charge[b]) == 1 ? 0.5 : 0.0;
            EXPECT_NEAR(std::abs(e.at(0)(a, b)), expect, 1e-12);
            for (int n = 1; n <= 8; ++n) EXPECT_LT(std::abs(e.at(n)(a, b)), 1e-12);
            double f = angular(4 * p.e_c * (std::pow(charge[a] - p.n_g, 2) - std::pow(charge[b] - p.n_g, 2)));
            EXPECT_NEAR(e.line_frequency(a, b, 0), f, 1e-10);
        }
    }
}

TEST(Emission, ProtectionMetricsDefinition) {
    DominantLines d{angular(9.4), angular(9.5), angular(10.6), angular(10.4)};
    ProtectionMetrics m = protection_metrics(d, 0.3);
    EXPECT_NEAR(ordinary(m.delta), 0.1, 1e-12);
    EXPECT_NEAR(ordinary(m.b_spacing), 1.05, 1e-12);
    EXPECT_EQ(m.kappa_c, 0.3);
}

}  // namespace
}  // namespace kapitza
