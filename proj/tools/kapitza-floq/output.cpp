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

#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace kapitza::cli {

namespace fs = std::filesystem;

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void CsvTable::add(std::initializer_list<std::string> row) { add(std::vector<std::string>(row)); }

void CsvTable::add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("csv row width does not match header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            const std::string& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                out += '"';
                for (char ch : c) {
                    if (ch == '"') out += '"';
                    out += ch;
                }
                out += '"';
            } else {
                out += c;
            }
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

RunOutput::RunOutput(fs::path dir, std::string command) : dir_(std::move(dir)), command_(std::move(command)) {
    fs::create_directories(dir_);
}

void RunOutput::write(const std::string& name, const std::string& content) {
    fs::path target = dir_ / name;
    fs::path tmp = dir_ / (name + ".tmp");
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
    files_.push_back(name);
}

void RunOutput::check(const std::string& name, bool passed, double value, const std::string& expected) {
    checks_.push_back({name, passed, value, expected});
}

bool RunOutput::checks_passed() const {
    for (const auto& c : checks_)
        if (!c.passed) return false;
    return true;
}

void RunOutput::finish(const std::string& config_snapshot, double wall_seconds, const std::string& error) {
    nlohmann::json j;
    j["schema"] = kReportSchema;
    j["csv_schema"] = kCsvSchema;
    j["command"] = command_;
    j["status"] = error.empty() ? "ok" : "error";
    if (!error.empty()) j["error"] = error;
    j["wall_time_s"] = wall_seconds;
    j["config"] = config_snapshot;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& f : files_) files.push_back(f);
    j["outputs"] = files;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : checks_)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"expected", c.expected}});
    j["checks"] = checks;
    j["warnings"] = warnings_;
    fs::path tmp = dir_ / "run_report.json.tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot write " + tmp.string());
        f << j.dump(2) << "\n";
    }
    fs::rename(tmp, dir_ / "run_report.json");
}

}  // namespace kapitza::cli
