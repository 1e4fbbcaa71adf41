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
#include <vector>

#include <gtest/gtest.h>

#include "kapitza/dynamics.hpp"
#include "kapitza/emission.hpp"
#include "kapitza/filter_system.hpp"
#include "test_util.hpp"

namespace kapitza {
namespace {

using testing::max_abs;

CMatrix ket_bra(const CVector& a, const CVector& b) { return a * b.adjoint(); }

CMatrix lowering2() {
    CMatrix s = CMatrix::Zero(2, 2);
    s(0, 1) = 1.0;
    return s;
}

TEST(Lindblad, AmplitudeDampingAnalytic) {
    const double gamma = 0.7, delta = 3.0;
    OpenSystemSetup s;
    s.dim = 2;
    s.hamiltonian = [=](double) {
        CMatrix h = CMatrix::Zero(2, 2);
        h(1, 1) = delta;
        return h;
    };
    s.dissipators.push_back({gamma, [](double) { return lowering2(); }});
    CMatrix rho0 = CMatrix::Constant(2, 2, 0.5);
    LindbladTrajectory tr = lindblad_evolve(s, rho0, 0.0, 2.0, 1e-3, 100);
    ASSERT_GT(tr.states.size(), 10u);
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        double t = tr.times[i];
        const CMatrix& r = tr.states[i];
        EXPECT_NEAR(r(1, 1).real(), 0.5 * std::exp(-gamma * t), 1e-10);
        cplx coh = 0.5 * std::exp(-gamma * t / 2) * std::exp(kI * delta * t);
        EXPECT_LT(std::abs(r(0, 1) - coh), 1e-10);
    }
    EXPECT_LT(tr.stats.max_trace_drift, 1e-12);
    EXPECT_LT(tr.stats.max_hermiticity, 1e-12);
    EXPECT_GE(tr.stats.min_eigenvalue, -1e-12);
}

TEST(Lindblad, ClosedRabiOscillation) {
    const double omega = 2.0;
    OpenSystemSetup s;
    s.dim = 2;
    s.hamiltonian = [=](double) {
        CMatrix h = CMatrix::Zero(2, 2);
        h(0, 1) = h(1, 0) = omega / 2;
        return h;
    };
    CMatrix rho0 = CMatrix::Zero(2, 2);
    rho0(0, 0) = 1.0;
    LindbladTrajectory tr = lindblad_evolve(s, rho0, 0.0, 3.0, 1e-3);
    double p1 = std::pow(std::sin(omega * 3.0 / 2), 2);
    EXPECT_NEAR(tr.states.back()(1, 1).real(), p1, 1e-10);
}

TEST(Lindblad, RejectsInvalidInput) {
    OpenSystemSetup s;
    s.dim = 2;
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 1) = 1.0;
    EXPECT_THROW(lindblad_evolve(s, bad, 0.0, 1.0, 0.1), Error);
    CMatrix rho = CMatrix::Identity(2, 2) / 2.0;
    EXPECT_THROW(lindblad_evolve(s, rho, 0.0, 1.0, 0.0), Error);
    s.dissipators.push_back({-1.0, [](double) { return lowering2(); }});
    EXPECT_THROW(lindblad_evolve(s, rho, 0.0, 1.0, 0.1), Error);
}

// A three-level periodic problem with random sidebands.
SidebandExpansion synthetic_expansion() {
    std::mt19937_64 rng(31);
    SidebandExpansion e;
    e.n_side = 2;
    e.omega_ang = kTwoPi * 10.0;
    e.quasienergies = RVector(3);
    e.quasienergies << -5.0, 0.7, 9.0;
    for (int n = -2; n <= 2; ++n) e.coeffs.push_back(0.3 * testing::random_matrix(3, rng) / (1.0 + n * n));
    // Hermitian operator: O_{ab,n} = conj(O_{ba,-n}).
    for (int n = 0; n <= 2; ++n) {
        CMatrix sym = (e.coeffs[n + 2] + e.coeffs[2 - n].adjoint()) / 2.0;
        e.coeffs[n + 2] = sym;
        e.coeffs[2 - n] = sym.adjoint();
    }
    return e;
}

TEST(FloquetLindbladTest, MatchesDirectIntegration) {
    SidebandExpansion e = synthetic_expansion();
    FrequencyPart neg(e, FrequencySign::Negative);
    FloquetLindblad fl(e.quasienergies, 0.1, {{1.5, neg}}, 64);
    std::mt19937_64 rng(32);
    CMatrix psi = testing::random_matrix(3, rng).col(0);
    psi.normalize();
    CMatrix rho0 = psi * psi.adjoint();
    LindbladStats stats;
    for (double duration : {0.35, 1.0}) {
        std::vector<CMatrix> out = fl.evolve({rho0}, 0.0, duration, &stats);
        LindbladTrajectory ref = lindblad_evolve(fl.setup(), rho0, 0.0, duration, 0.1 / 2048);
        EXPECT_LT(max_abs(out[0] - ref.states.back()), 1e-8) << "duration " << duration;
        EXPECT_NEAR(out[0].trace().real(), 1.0, 1e-10);
    }
    EXPECT_LT(stats.max_hermiticity, 1e-10);
    EXPECT_GE(stats.min_eigenvalue, -1e-6);
}

TEST(FloquetLindbladTest, DissipativeFixedPointAndTraceBudget) {
    SidebandExpansion e = synthetic_expansion();
    FloquetLindblad fl(e.quasienergies, 0.1, {{1.5, FrequencyPart(e, FrequencySign::Negative)}}, 16);
    CMatrix rho0 = CMatrix::Identity(3, 3) / 3.0;
    LindbladStats stats;
    std::vector<CMatrix> out = fl.evolve({rho0}, 0.0, 50.0, &stats);
    EXPECT_LT(stats.max_trace_drift, 1e-7);
    EXPECT_LT(stats.max_hermiticity, 1e-10);
    EXPECT_GE(stats.min_eigenvalue, -1e-6);
    EXPECT_THROW(fl.evolve({rho0}, 0.0, 0.1 / 7.0), Error);
}

TEST(Channels, IdentityHasUnitFidelity) {
    for (int d : {2, 4}) {
        EXPECT_NEAR(average_fidelity(identity_channel(d), CMatrix::Identity(d, d)), 1.0, 1e-9);
    }
    std::mt19937_64 rng(41);
    CMatrix u = testing::random_unitary(4, rng);
    EXPECT_NEAR(average_fidelity(unitary_channel(u), u), 1.0, 1e-12);
}

// Average fidelity as the mean over the six Pauli eigenstates (a 2-design).
double pauli_design_fidelity(const QuantumChannel& ch, const CMatrix& v) {
    std::vector<CVector> states;
    double r = 1.0 / std::sqrt(2.0);
    for (auto [a, b] : std::vector<std::pair<cplx, cplx>>{
             {1.0, 0.0}, {0.0, 1.0}, {r, r}, {r, -r}, {r, kI * r}, {r, -kI * r}}) {
        CVector s(2);
        s << a, b;
        states.push_back(s);
    }
    double f = 0.0;
    for (const auto& s : states) {
        CVector t = v * s;
        f += (t.adjoint() * ch.apply(ket_bra(s, s)) * t)(0, 0).real() / 6.0;
    }
    return f;
}

TEST(Channels, AverageFidelityMatchesTwoDesign) {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        CMatrix u = testing::random_unitary(2, rng), v = testing::random_unitary(2, rng);
        QuantumChannel ch = unitary_channel(u);
        EXPECT_NEAR(average_fidelity(ch, v), pauli_design_fidelity(ch, v), 1e-12);
    }
    double g = 0.3;
    CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k0(1, 1) = std::sqrt(1 - g);
    k1(0, 1) = std::sqrt(g);
    std::vector<CMatrix> outs;
    for (const auto& p : channel_probe_states(2)) outs.push_back(k0 * p * k0.adjoint() + k1 * p * k1.adjoint());
    QuantumChannel ad = channel_from_probes(2, outs);
    CMatrix id = CMatrix::Identity(2, 2);
    EXPECT_NEAR(average_fidelity(ad, id), pauli_design_fidelity(ad, id), 1e-12);
}

TEST(Channels, FidelityBoundsAndDepolarizingValue) {
    std::mt19937_64 rng(43);
    for (int d : {2, 4}) {
        std::vector<CMatrix> outs;
        for (const auto& p : channel_probe_states(d)) outs.push_back(p.trace() * CMatrix::Identity(d, d) / d);
        QuantumChannel dep = channel_from_probes(d, outs);
        EXPECT_NEAR(average_fidelity(dep, testing::random_unitary(d, rng)), 1.0 / d, 1e-12);
        for (int trial = 0; trial < 5; ++trial) {
            double f = average_fidelity(unitary_channel(testing::random_unitary(d, rng)), testing::random_unitary(d, rng));
            EXPECT_GE(f, -1e-9);
            EXPECT_LE(f, 1.0 + 1e-9);
        }
    }
}

TEST(Channels, ProbeReconstructionRoundTrip) {
    std::mt19937_64 rng(44);
    for (int d : {2, 3}) {
        CMatrix u = testing::random_unitary(d, rng);
        std::vector<CMatrix> probes = channel_probe_states(d);
        ASSERT_EQ(static_cast<int>(probes.size()), d * d);
        std::vector<CMatrix> outs;
        for (const auto& p : probes) {
            EXPECT_NEAR(p.trace().real(), 1.0, 1e-15);
            EXPECT_GE(min_eigenvalue(p), -1e-15);
            outs.push_back(u * p * u.adjoint());
        }
        QuantumChannel a = channel_from_probes(d, outs), b = unitary_channel(u);
        for (int i = 0; i < d * d; ++i) EXPECT_LT(max_abs(a.units[i] - b.units[i]), 1e-13);
    }
}

TEST(Pulse, SineSquaredRamps) {
    PulseShape p{60.0, 10.0};
    EXPECT_EQ(p.value(0.0), 0.0);
    EXPECT_NEAR(p.value(5.0), 0.5, 1e-15);
    EXPECT_EQ(p.value(30.0), 1.0);
    EXPECT_NEAR(p.value(55.0), 0.5, 1e-15);
    EXPECT_NEAR(p.value(60.0), 0.0, 1e-15);
    EXPECT_EQ(p.value(61.0), 0.0);
    EXPECT_THROW((PulseShape{10.0, 6.0}).validate(), Error);
}

TEST(Filter, FockSpaceAndLadderOperators) {
    FilterParams fp;
    FilterSpace s = filter_space(fp);
    EXPECT_EQ(s.dim(), 10);
    EXPECT_EQ(s.occupations[0], std::vector<int>({0, 0, 0}));
    ASSERT_EQ(static_cast<int>(s.lowering.size()), 3);
    for (int k = 0; k < 3; ++k) {
        const CMatrix& a = s.lowering[k];
        CMatrix comm = a * a.adjoint() - a.adjoint() * a;
        EXPECT_NEAR(comm(0, 0).real(), 1.0, 1e-15);
        for (int j = 0; j < 3; ++j) EXPECT_LT(max_abs(a * s.lowering[j] - s.lowering[j] * a), 1e-15);
        CMatrix number = a.adjoint() * a;
        for (int i = 0; i < s.dim(); ++i) EXPECT_NEAR(number(i, i).real(), s.occupations[i][k], 1e-14);
    }
    fp.max_excitations = 0;
    EXPECT_EQ(filter_space(fp).dim(), 27);
}

TEST(Filter, HamiltonianFrames) {
    FilterParams fp;
    FilterSpace s = filter_space(fp);
    CMatrix lab = filter_hamiltonian(fp, s, false), rot = filter_hamiltonian(fp, s, true);
    EXPECT_LT(hermiticity_error(lab), 1e-15);
    CMatrix n = CMatrix::Zero(s.dim(), s.dim());
    for (const auto& a : s.lowering) n += a.adjoint() * a;
    EXPECT_LT(max_abs(lab - rot - fp.omega_f_ang() * n), 1e-12);
    // Hopping conserves the photon number.
    EXPECT_LT(max_abs(rot * n - n * rot), 1e-12);
    EXPECT_NEAR(fp.kappa_c_ang(), 4 * std::pow(0.2 * fp.kappa_f_ang(), 2) / fp.kappa_f_ang(), 1e-15);
}

}  // namespace
}  // namespace kapitza
