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

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kapitza::cli {

inline constexpr const char* kReportSchema = "kapitza-floq/run-report/1";
inline constexpr const char* kCsvSchema = "kapitza-floq/csv/1";

std::string format_number(double v);

class CsvTable {
   public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
    void add(std::initializer_list<std::string> row);
    void add(std::vector<std::string> row);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

   private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Check {
    std::string name;
    bool passed = false;
    double value = 0.0;
    std::string expected;
};

// Collects output files (written atomically: temp file, then rename) and
// acceptance checks, and emits the run report.
class RunOutput {
   public:
    RunOutput(std::filesystem::path dir, std::string command);

    void write(const std::string& name, const std::string& content);
    void write_csv(const std::string& name, const CsvTable& table) { write(name, table.str()); }
    void write_json(const std::string& name, const nlohmann::json& j) { write(name, j.dump(2) + "\n"); }
    void check(const std::string& name, bool passed, double value, const std::string& expected);
    void warn(const std::string& message) { warnings_.push_back(message); }

    const std::vector<Check>& checks() const { return checks_; }
    bool checks_passed() const;
    const std::filesystem::path& dir() const { return dir_; }

    // Writes run_report.json; status is "ok" or the error message.
    void finish(const std::string& config_snapshot, double wall_seconds, const std::string& error);

   private:
    std::filesystem::path dir_;
    std::string command_;
    std::vector<std::string> files_;
    std::vector<Check> checks_;
    std::vector<std::string> warnings_;
};

}  // namespace kapitza::cli
