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

#include "kapitza/config.hpp"
#include "output.hpp"

namespace kapitza::cli {

struct RunContext {
    int threads = 1;
    bool check = false;
};

void cmd_floquet(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out);
void cmd_spectrum(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out);
void cmd_gate(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out);
void cmd_measure(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out);
void cmd_sweep(const ExperimentConfig& cfg, const RunContext& ctx, RunOutput& out);

}  // namespace kapitza::cli
