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


#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "kapitza/circuit.hpp"
#include "kapitza/floquet.hpp"
#include "test_util.hpp"

namespace kapitza {
namespace {

using testing::max_abs;

// A weakly driven rotor small enough for dense reference propagation.
CircuitParams toy_circuit() {
    CircuitParams p;
    p.e_j = 20.0;
    p.e_c = 0.05;
    p.omega = 10.0;
    p.n_g = 0.13;
    p.n_max = 10;
    return p;
}

std::vector<double> sorted(const RVector& v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    return s;
}

double folded(double e, double omega) {
    double f = std::remainder(e, omega);
    return f <= -omega / 2 ? f + omega : f;
}

TEST(Floquet, PeriodPropagatorsAreUnitary) {
    CircuitParams p = toy_circuit();
    RotorHamiltonian h = driven_rotor(p, FluxWaveform::linear());
    Propagation split = propagate_period(h, p.period(), 256, 64);
    EXPECT_LT(unitarity_error(split.u_period), 1e-10);
    for (const auto& u : split.u_grid) EXPECT_LT(unitarity_error(u), 1e-10);
    TimeOperator dense = [&](double t) { return h.at(t); };
    Propagation mid = propagate_period(dense, p.period(), 512, 64);
    EXPECT_LT(unitarity_error(mid.u_period), 1e-10);

    CircuitParams ref;
    Propagation full = propagate_period(driven_rotor(ref, FluxWaveform::linear()), ref.period(), 1024);
    EXPECT_LT(unitarity_error(full.u_period), 1e-10);
}

TEST(Floquet, SplitStepAgreesWithMidpointExponentials) {
    CircuitParams p = toy_circuit();
    RotorHamiltonian h = driven_rotor(p, FluxWaveform::linear());
    TimeOperator dense = [&](double t) { return h.at(t); };
    Propagation split = propagate_period(h, p.period(), 256, 64);
    Propagation mid = propagate_period(dense, p.period(), 16384, 64);
    EXPECT_LT(max_abs(split.u_period - mid.u_period), 1e-6);
    for (int j = 0; j < 64; j += 9) EXPECT_LT(max_abs(split.u_grid[j] - mid.u_grid[j]), 1e-6);
}

TEST(Floquet, SplitStepIsFourthOrder) {
    CircuitParams p = toy_circuit();
    RotorHamiltonian h = driven_rotor(p, FluxWaveform::linear());
    CMatrix exact = propagate_period(h, p.period(), 2048, 16).u_period;
    double e1 = max_abs(propagate_period(h, p.period(), 16, 16).u_period - exact);
    double e2 = max_abs(propagate_period(h, p.period(), 32, 16).u_period - exact);
    EXPECT_GT(e1 / e2, 12.0);
    EXPECT_LT(e1 / e2, 20.0);
}

TEST(Floquet, StaticHamiltonianQuasienergiesAreFoldedEigenvalues) {
    CircuitParams p = toy_circuit();
    p.e_j = 30.0;
    RotorHamiltonian h = driven_rotor(p, FluxWaveform::constant());
    double period = p.period();
    FloquetSolution sol = floquet_modes(propagate_period(h, period, 512, 16), p.omega);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hamiltonian_at(p, FluxWaveform::constant(), 0.0));
    RVector oracle(es.eigenvalues().size());
    for (int i = 0; i < oracle.size(); ++i) oracle(i) = folded(es.eigenvalues()(i), p.omega_ang());
    std::vector<double> a = sorted(sol.quasienergies), b = sorted(oracle);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-9 * p.omega_ang());
    for (int i = 0; i < sol.n_states(); ++i) {
        EXPECT_GT(sol.quasienergies(i), -p.omega_ang() / 2);
        EXPECT_LE(sol.quasienergies(i), p.omega_ang() / 2);
    }
}

TEST(Floquet, FreeRotorQuasienergies) {
    CircuitParams p = toy_circuit();
    p.e_j = 0.0;
    FloquetSolution sol = floquet_modes(propagate_period(driven_rotor(p, FluxWaveform::linear()), p.period(), 64, 16),
                                        p.omega);
    RVector oracle(p.dim());
    for (int m = -p.n_max; m <= p.n_max; ++m)
        oracle(m + p.n_max) = folded(angular(4 * p.e_c * (m - p.n_g) * (m - p.n_g)), p.omega_ang());
    std::vector<double> a = sorted(sol.quasienergies), b = sorted(oracle);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(Floquet, ModesSatisfyFloquetRelation) {
    CircuitParams p = toy_circuit();
    Propagation prop = propagate_period(driven_rotor(p, FluxWaveform::linear()), p.period(), 256, 32);
    FloquetSolution sol = floquet_modes(prop, p.omega);
    CMatrix u_full = prop.u_period * prop.u_grid[0];
    for (int j = 0; j < sol.n_grid(); ++j) {
        CVector ph = (-kI * sol.grid[j] * sol.quasienergies.cast<cplx>()).array().exp();
        EXPECT_LT(max_abs(prop.u_grid[j] * sol.modes[0] - sol.modes[j] * ph.asDiagonal()), 1e-10);
    }
    // Phi(T) = Phi(0): U(T) Phi(0) = exp(-i eps T) Phi(0).
    CVector ph = (-kI * sol.period * sol.quasienergies.cast<cplx>()).array().exp();
    EXPECT_LT(max_abs(u_full * sol.modes[0] - sol.modes[0] * ph.asDiagonal()), 1e-10);
    EXPECT_LT(unitarity_error(sol.modes[5]), 1e-10);
}

class ReferenceSolution : public ::testing::Test {
   protected:
    static void SetUpTestSuite() {
        CircuitParams p;
        eff_ = new EffectiveModel(effective_model(p, FluxWaveform::linear()));
        FloquetOptions o;
        o.n_steps = 1024;
        raw_ = new FloquetSolution(
            floquet_modes(propagate_period(driven_rotor(p, FluxWaveform::linear()), p.period(), o.n_steps), p.omega));
        labeled_ = new FloquetSolution(label_and_gauge(*raw_, *eff_, 6));
    }
    static void TearDownTestSuite() {
        delete eff_;
        delete raw_;
        delete labeled_;
    }
    static EffectiveModel* eff_;
    static FloquetSolution* raw_;
    static FloquetSolution* labeled_;
};

EffectiveModel* ReferenceSolution::eff_ = nullptr;
FloquetSolution* ReferenceSolution::raw_ = nullptr;
FloquetSolution* ReferenceSolution::labeled_ = nullptr;

TEST_F(ReferenceSolution, LabelAndGaugeIsIdempotent) {
    FloquetSolution twice = label_and_gauge(*labeled_, *eff_, 6);
    EXPECT_TRUE(twice.labeled);
    EXPECT_FALSE(twice.ambiguous_labels);
    EXPECT_LT((twice.quasienergies - labeled_->quasienergies).cwiseAbs().maxCoeff(), 1e-12);
    for (int j = 0; j < labeled_->n_grid(); j += 17)
        EXPECT_LT(max_abs(twice.modes[j].leftCols(6) - labeled_->modes[j].leftCols(6)), 1e-10);
}

TEST_F(ReferenceSolution, GaugeLocalisesLogicalPlus) {
    CircuitParams p;
    CMatrix cphi = cos_k_phi(p, 1);
    CVector plus = (labeled_->modes[0].col(0) + labeled_->modes[0].col(1)) / std::sqrt(2.0);
    EXPECT_GT(plus.dot(cphi * plus).real(), 0.5);
    CVector e0 = encode(*labeled_, 1.0, 0.0);
    EXPECT_LT((e0 - labeled_->modes[0].col(0)).norm(), 1e-15);
    EXPECT_THROW(encode(*labeled_, 1.0, 1.0), Error);
}

TEST_F(ReferenceSolution, PsiAtAdvancesByQuasienergyPhase) {
    double t = 3.0 * labeled_->period + labeled_->grid[40];
    CMatrix a = labeled_->psi_at(t, 4);
    for (int k = 0; k < 4; ++k) {
        CVector expect = std::exp(-kI * labeled_->quasienergies(k) * t) * labeled_->modes[40].col(k);
        EXPECT_LT((a.col(k) - expect).norm(), 1e-10);
    }
}

}  // namespace
}  // namespace kapitza
