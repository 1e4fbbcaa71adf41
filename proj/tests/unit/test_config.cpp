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
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "kapitza/config.hpp"

namespace kapitza {
namespace {

TEST(Config, EmptyTextGivesDefaults) {
    ExperimentConfig c = parse_config("");
    EXPECT_TRUE(c == ExperimentConfig{});
    EXPECT_EQ(c.circuit.e_j, 100.0);
    EXPECT_EQ(c.floquet.n_steps, 4096);
    EXPECT_EQ(c.gate.kind, GateKind::X);
}

TEST(Config, SnapshotRoundTrip) {
    std::string text =
        "[circuit]\ne_j_ghz = 120.5\nn_g = 0.3\nwaveform = cosine\nalpha = 2.1\n"
        "[gate]\nkind = z\nomega_z_ghz = 19.5\nmode = open_with_filter\n"
        "[measure]\nbasis = z\nduration_us = 2.5\nwindow_mhz = 7\n"
        "[filter]\npreset = idle\nkappa_f_mhz = 350\n"
        "[sweep]\nparameter = circuit.n_g\nvalues = [0.1, 0.2, 0.5]\n";
    ExperimentConfig c = parse_config(text);
    std::string snap = to_ini(c);
    ExperimentConfig again = parse_config(snap);
    EXPECT_TRUE(again == c);
    EXPECT_EQ(to_ini(again), snap);
    EXPECT_EQ(again.sweep.values, std::vector<double>({0.1, 0.2, 0.5}));

    // Values that are not exact in binary survive the MHz and us scaling.
    ExperimentConfig x = parse_config("[spectrum]\nalpha_x_mhz = 5.2\n");
    EXPECT_NE(to_ini(x).find("alpha_x_mhz = 5.2\n"), std::string::npos);
}

TEST(Config, UnitsAreConvertedToInternalValues) {
    ExperimentConfig c = parse_config(
        "[spectrum]\nalpha_x_mhz = 5.2\n[measure]\nduration_us = 2\nomega_rabi_mhz = 6.4\nwindow_mhz = 10\n"
        "[filter]\nkappa_f_mhz = 400\n");
    EXPECT_DOUBLE_EQ(c.spectrum.alpha_x, 0.0052);
    EXPECT_DOUBLE_EQ(c.measure.duration, 2000.0);
    EXPECT_DOUBLE_EQ(c.measure.rabi, 0.0064);
    EXPECT_DOUBLE_EQ(c.measure.window_width, 0.01);
    EXPECT_DOUBLE_EQ(c.measurement().filter.kappa_f, 0.4);
}

TEST(Config, RejectsUnknownOrMalformedInput) {
    EXPECT_THROW(parse_config("[circuit]\nej = 3\n"), Error);
    EXPECT_THROW(parse_config("[nonsense]\nx = 1\n"), Error);
    EXPECT_THROW(parse_config("e_j_ghz = 3\n"), Error);
    EXPECT_THROW(parse_config("[circuit]\ne_j_ghz = fast\n"), Error);
    EXPECT_THROW(parse_config("[circuit]\nn_max = 3.5\n"), Error);
    EXPECT_THROW(parse_config("[circuit]\nwaveform = square\n"), Error);
    EXPECT_THROW(parse_config("", {"circuit.e_j_ghz"}), Error);
    EXPECT_THROW(parse_config("", {"circuit.bogus=1"}), Error);
    EXPECT_THROW(parse_config("[filter]\npreset = strong\n"), Error);
    EXPECT_THROW(parse_config("[gate]\nkind = z\nalpha_mhz = 3\n"), Error);
    EXPECT_THROW(parse_config("[floquet]\nn_steps = 1000\nn_grid = 256\n"), Error);
    EXPECT_THROW(parse_config("[sweep]\nparameter = sweep.values\nvalues = 1\n"), Error);
}

TEST(Config, OverridesWinInOrder) {
    ExperimentConfig c = parse_config("[circuit]\nomega_ghz = 12\n", {"circuit.omega_ghz=15", "circuit.omega_ghz=20"});
    EXPECT_EQ(c.circuit.omega, 20.0);
    apply_setting(c, "circuit.n_g = 0.25");
    EXPECT_EQ(c.circuit.n_g, 0.25);
}

TEST(Config, GateKindSetsItsDefaultsFirst) {
    // The kind is applied before the other keys regardless of their order.
    ExperimentConfig c = parse_config("[gate]\nt_gate_ns = 80\nkind = z\n");
    EXPECT_EQ(c.gate.kind, GateKind::Z);
    EXPECT_EQ(c.gate.t_gate, 80.0);
    EXPECT_EQ(c.gate.tau, GateParams::defaults(GateKind::Z).tau);
    EXPECT_EQ(c.gate.alpha, GateParams::defaults(GateKind::Z).alpha);

    ExperimentConfig m = parse_config("", {"measure.duration_us=3", "measure.basis=z"});
    EXPECT_EQ(m.measure.basis, MeasurementBasis::Z);
    EXPECT_EQ(m.measure.duration, 3000.0);
}

TEST(Config, FilterPresetResolution) {
    ExperimentConfig c = parse_config("[gate]\nkind = z\n[filter]\nn_modes = 2\n");
    FilterParams zf = FilterParams::z_defaults();
    EXPECT_EQ(c.gate_filter().omega_f, zf.omega_f);
    EXPECT_EQ(c.gate_filter().n_modes, 2);
    EXPECT_EQ(c.measure_filter().omega_f, FilterParams::idle_defaults().omega_f);
    ExperimentConfig forced = parse_config("[gate]\nkind = z\n[filter]\npreset = idle\n");
    EXPECT_EQ(forced.gate_filter().omega_f, FilterParams::idle_defaults().omega_f);
}

TEST(Config, KeyListCoversDocumentedKeys) {
    std::vector<std::string> keys = config_keys();
    for (const char* k : {"circuit.e_j_ghz", "circuit.waveform", "floquet.n_levels_tracked", "filter.kappa_f_mhz",
                          "gate.kappa_h_inv_us", "measure.window_mhz", "measure.dt_record_ns", "sweep.values"})
        EXPECT_NE(std::find(keys.begin(), keys.end(), k), keys.end()) << k;
}

}  // namespace
}  // namespace kapitza
