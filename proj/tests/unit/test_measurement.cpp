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
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "kapitza/measurement.hpp"
#include "test_util.hpp"

namespace kapitza {
namespace {

TEST(Periodogram, SinusoidGivesSingleBinPeak) {
    const int n = 512;
    const double dt = 0.05;
    const int k0 = 37;
    double d = k0 / (n * dt);
    std::vector<cplx> rec(n);
    for (int k = 0; k < n; ++k) rec[k] = 2.0 * std::exp(-kI * (kTwoPi * d * k * dt));
    Spectrum s = power_spectrum(rec, dt);
    ASSERT_EQ(static_cast<int>(s.freq.size()), n);
    for (std::size_t i = 1; i < s.freq.size(); ++i) EXPECT_GT(s.freq[i], s.freq[i - 1]);
    int peak = static_cast<int>(std::max_element(s.power.begin(), s.power.end()) - s.power.begin());
    EXPECT_NEAR(s.freq[peak], d, 1e-12);
    EXPECT_NEAR(s.power[peak], 4.0 * n, 1e-9);
    for (int i = 0; i < n; ++i)
        if (i != peak) EXPECT_LT(s.power[i], 1e-18 * n * n);
}

TEST(Periodogram, Parseval) {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> g;
    std::vector<cplx> rec(1000);
    for (auto& x : rec) x = cplx(g(rng), g(rng));
    Spectrum s = power_spectrum(rec, 0.05);
    double time = 0.0;
    for (const auto& x : rec) time += std::norm(x);
    double freq = std::accumulate(s.power.begin(), s.power.end(), 0.0);
    EXPECT_NEAR(freq, time, 1e-10 * time);
}

TEST(Wilson, KnownInterval) {
    auto [lo, hi] = wilson_interval(95, 100);
    EXPECT_NEAR(lo, 0.88825, 1e-5);
    EXPECT_NEAR(hi, 0.97846, 1e-5);
    auto [lo1, hi1] = wilson_interval(10, 10);
    EXPECT_NEAR(hi1, 1.0, 1e-12);
    EXPECT_NEAR(lo1, 0.72246, 1e-5);
}

class ShortMeasurement : public ::testing::Test {
   protected:
    static void SetUpTestSuite() {
        MeasurementConfig cfg = MeasurementConfig::defaults(MeasurementBasis::X);
        cfg.duration = 40.0;
        model_ = new MeasurementModel(measurement_model(CircuitParams{}, cfg));
    }
    static void TearDownTestSuite() { delete model_; }
    static MeasurementModel* model_;
};

MeasurementModel* ShortMeasurement::model_ = nullptr;

TEST_F(ShortMeasurement, ModelIsHermitianWithResolvedLines) {
    for (double t : {0.0, 1.234, 17.0}) EXPECT_LT(hermiticity_error(model_->hamiltonian(t)), 1e-12);
    EXPECT_EQ(model_->dim, 4 * model_->filter_dim);
    EXPECT_GT(model_->delta, 0.0);
    EXPECT_NEAR(model_->drive1, model_->lines.w02, 1e-12);
    EXPECT_NEAR(model_->window31, ordinary(model_->lines.w31), 1e-12);
    CVector psi0 = model_->initial_state();
    EXPECT_NEAR(psi0.norm(), 1.0, 1e-12);
    auto p = model_->populations(psi0);
    EXPECT_NEAR(p[0], 0.5, 1e-12);
    EXPECT_NEAR(p[1], 0.5, 1e-12);
}

TEST_F(ShortMeasurement, SeedDeterminismIsBitExact) {
    CVector psi0 = model_->initial_state();
    TrajectoryRecord a = simulate_trajectory(*model_, psi0, 7);
    TrajectoryRecord b = simulate_trajectory(*model_, psi0, 7);
    TrajectoryRecord c = simulate_trajectory(*model_, psi0, 8);
    ASSERT_EQ(a.record.size(), b.record.size());
    EXPECT_TRUE(a.record == b.record);
    EXPECT_TRUE(a.final_populations == b.final_populations);
    EXPECT_EQ(a.jumps, b.jumps);
    EXPECT_FALSE(a.record == c.record);
    EXPECT_EQ(a.record.size(), static_cast<std::size_t>(std::llround(40.0 / model_->cfg.dt_record)));
}

TEST_F(ShortMeasurement, ClassificationIgnoresGlobalPhase) {
    TrajectoryRecord r = simulate_trajectory(*model_, model_->initial_state(), 3);
    Classification base = classify(power_spectrum(r.record, r.dt_record), *model_);
    for (double theta : {0.3, 1.7, -2.9}) {
        std::vector<cplx> rot = r.record;
        for (auto& x : rot) x *= std::polar(1.0, theta);
        Classification c = classify(power_spectrum(rot, r.dt_record), *model_);
        EXPECT_NEAR(c.s20, base.s20, 1e-9 * (base.s20 + base.s31));
        EXPECT_NEAR(c.s31, base.s31, 1e-9 * (base.s20 + base.s31));
        EXPECT_EQ(c.outcome, base.outcome);
    }
}

TEST_F(ShortMeasurement, ResultsIndependentOfThreadCount) {
    FidelityEstimate a = measurement_fidelity(*model_, 4, 1);
    FidelityEstimate b = measurement_fidelity(*model_, 4, 3);
    ASSERT_EQ(a.trajectories.size(), b.trajectories.size());
    for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
        EXPECT_EQ(a.trajectories[i].seed, model_->cfg.seed + i);
        EXPECT_EQ(a.trajectories[i].cls.s_signal, b.trajectories[i].cls.s_signal);
        EXPECT_EQ(a.trajectories[i].final_p1, b.trajectories[i].final_p1);
    }
    EXPECT_EQ(a.correct, b.correct);
    EXPECT_GE(a.fidelity, a.ci_low);
    EXPECT_LE(a.fidelity, a.ci_high);
}

TEST(Measurement, NoDriveRecordIsShotNoise) {
    MeasurementConfig cfg = MeasurementConfig::defaults(MeasurementBasis::X);
    cfg.rabi = 0.0;
    cfg.kappa_h_inv_us = 0.0;
    cfg.duration = 200.0;
    MeasurementModel m = measurement_model(CircuitParams{}, cfg);
    double floor = 1.0 / (cfg.filter.kappa_f_ang() * cfg.dt_record);
    double mean = 0.0;
    int bins = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        TrajectoryRecord r = simulate_trajectory(m, m.initial_state(), seed);
        EXPECT_EQ(r.jumps, 0);
        Spectrum s = power_spectrum(r.record, r.dt_record);
        for (double p : s.power) mean += p;
        bins += static_cast<int>(s.power.size());
        EXPECT_LT(r.final_populations[2] + r.final_populations[3], 0.05);
    }
    mean /= bins;
    // 12000 exponential bins: relative standard error below 1%.
    EXPECT_NEAR(mean / floor, 1.0, 0.04);
}

TEST(Measurement, RejectsInvalidSettings) {
    MeasurementConfig cfg = MeasurementConfig::defaults(MeasurementBasis::X);
    cfg.rabi = 1.0;
    EXPECT_THROW(measurement_model(CircuitParams{}, cfg), Error);
    cfg = MeasurementConfig::defaults(MeasurementBasis::X);
    cfg.window_width = 0.5;
    EXPECT_THROW(measurement_model(CircuitParams{}, cfg), Error);
    cfg = MeasurementConfig::defaults(MeasurementBasis::X);
    cfg.drive1 = cfg.filter.omega_f;
    EXPECT_THROW(measurement_model(CircuitParams{}, cfg), Error);
    cfg = MeasurementConfig::defaults(MeasurementBasis::X);
    cfg.dt_record = 0.03;
    EXPECT_THROW(cfg.validate(), Error);
    EXPECT_EQ(parse_measurement_basis(to_string(MeasurementBasis::Z)), MeasurementBasis::Z);
    EXPECT_THROW(parse_measurement_basis("y"), Error);
}

}  // namespace
}  // namespace kapitza
