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

#include "kapitza/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace kapitza {

namespace {

std::string fmt(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string fmt(int v) { return std::to_string(v); }

// Unit conversion with an exact integer factor, so MHz <-> GHz and
// us <-> ns round-trip through the shortest decimal representation.
double to_internal(double v, double scale) { return scale < 1.0 ? v / std::round(1.0 / scale) : v * scale; }
double to_external(double v, double scale) { return scale < 1.0 ? v * std::round(1.0 / scale) : v / scale; }

double to_double(const std::string& key, const std::string& s) {
    std::string t = boost::algorithm::trim_copy(s);
    double v = 0.0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw Error("config: " + key + " expects a number, got '" + s + "'");
    return v;
}

int to_int(const std::string& key, const std::string& s) {
    std::string t = boost::algorithm::trim_copy(s);
    long long v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw Error("config: " + key + " expects an integer, got '" + s + "'");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& s) {
    std::string t = boost::algorithm::trim_copy(s);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw Error("config: " + key + " expects true or false, got '" + s + "'");
}

std::string unquote(const std::string& s) {
    std::string t = boost::algorithm::trim_copy(s);
    if (t.size() >= 2 && ((t.front() == '"' && t.back() == '"') || (t.front() == '\'' && t.back() == '\'')))
        return t.substr(1, t.size() - 2);
    return t;
}

std::vector<double> to_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    std::string t = unquote(s);
    if (!t.empty() && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (boost::algorithm::trim_copy(item).empty()) continue;
        out.push_back(to_double(key, item));
    }
    return out;
}

WaveformKind parse_waveform(const std::string& s) {
    if (s == "linear") return WaveformKind::Linear;
    if (s == "triangle") return WaveformKind::Triangle;
    if (s == "cosine") return WaveformKind::Cosine;
    throw Error("config: circuit.waveform must be linear, triangle or cosine, got '" + s + "'");
}

std::string waveform_name(WaveformKind k) {
    switch (k) {
        case WaveformKind::Triangle: return "triangle";
        case WaveformKind::Cosine: return "cosine";
        default: return "linear";
    }
}

SpectrumSetting parse_setting(const std::string& s) {
    if (s == "idle") return SpectrumSetting::Idle;
    if (s == "x") return SpectrumSetting::X;
    if (s == "z") return SpectrumSetting::Z;
    throw Error("config: spectrum.configuration must be idle, x or z, got '" + s + "'");
}

SpectrumOperator parse_operator(const std::string& s) {
    if (s == "n") return SpectrumOperator::Charge;
    if (s == "cos_phi") return SpectrumOperator::CosPhi;
    if (s == "identity") return SpectrumOperator::Identity;
    throw Error("config: spectrum.operator must be n, cos_phi or identity, got '" + s + "'");
}

void set_gate_kind(ExperimentConfig& c, GateKind kind) {
    GateParams d = GateParams::defaults(kind);
    c.gate.kind = kind;
    c.gate.t_gate = d.t_gate;
    c.gate.tau = d.tau;
    c.gate.alpha = d.alpha;
}

void set_basis(ExperimentConfig& c, MeasurementBasis b) {
    MeasurementConfig d = MeasurementConfig::defaults(b);
    c.measure.basis = b;
    c.measure.rabi = d.rabi;
    c.measure.duration = d.duration;
    c.measure.dt = d.dt;
}

using Getter = std::function<std::optional<std::string>(const ExperimentConfig&)>;
using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

struct KeyDef {
    std::string section;
    std::string name;
    Getter get;
    Setter set;
};

template <class T>
std::optional<std::string> opt_fmt(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    return fmt(*v);
}

const std::vector<KeyDef>& registry() {
    static const std::vector<KeyDef> keys = [] {
        std::vector<KeyDef> k;
        auto num = [&k](std::string sec, std::string name, std::function<double&(ExperimentConfig&)> ref,
                        double scale = 1.0) {
            std::string key = sec + "." + name;
            k.push_back({sec, name,
                         [ref, scale](const ExperimentConfig& c) {
                             return std::optional<std::string>(
                                 fmt(to_external(ref(const_cast<ExperimentConfig&>(c)), scale)));
                         },
                         [ref, scale, key](ExperimentConfig& c, const std::string& v) {
                             ref(c) = to_internal(to_double(key, v), scale);
                         }});
        };
        auto integer = [&k](std::string sec, std::string name, std::function<int&(ExperimentConfig&)> ref) {
            std::string key = sec + "." + name;
            k.push_back({sec, name,
                         [ref](const ExperimentConfig& c) {
                             return std::optional<std::string>(fmt(ref(const_cast<ExperimentConfig&>(c))));
                         },
                         [ref, key](ExperimentConfig& c, const std::string& v) { ref(c) = to_int(key, v); }});
        };

        num("circuit", "e_j_ghz", [](ExperimentConfig& c) -> double& { return c.circuit.e_j; });
        num("circuit", "e_c_ghz", [](ExperimentConfig& c) -> double& { return c.circuit.e_c; });
        num("circuit", "omega_ghz", [](ExperimentConfig& c) -> double& { return c.circuit.omega; });
        num("circuit", "n_g", [](ExperimentConfig& c) -> double& { return c.circuit.n_g; });
        num("circuit", "delta_e", [](ExperimentConfig& c) -> double& { return c.circuit.delta_e; });
        num("circuit", "c_ratio", [](ExperimentConfig& c) -> double& { return c.circuit.c_ratio; });
        integer("circuit", "n_max", [](ExperimentConfig& c) -> int& { return c.circuit.n_max; });
        k.push_back({"circuit", "waveform",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(waveform_name(c.waveform)); },
                     [](ExperimentConfig& c, const std::string& v) { c.waveform = parse_waveform(unquote(v)); }});
        num("circuit", "alpha", [](ExperimentConfig& c) -> double& { return c.waveform_alpha; });

        integer("floquet", "n_steps", [](ExperimentConfig& c) -> int& { return c.floquet.n_steps; });
        integer("floquet", "n_grid", [](ExperimentConfig& c) -> int& { return c.floquet.n_grid; });
        integer("floquet", "n_levels_tracked", [](ExperimentConfig& c) -> int& { return c.floquet.n_tracked; });

        k.push_back({"spectrum", "configuration",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(to_string(c.spectrum.setting)); },
                     [](ExperimentConfig& c, const std::string& v) { c.spectrum.setting = parse_setting(unquote(v)); }});
        num("spectrum", "alpha_x_mhz", [](ExperimentConfig& c) -> double& { return c.spectrum.alpha_x; }, 1e-3);
        num("spectrum", "omega_z_ghz", [](ExperimentConfig& c) -> double& { return c.spectrum.omega_z; });
        k.push_back({"spectrum", "operator",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(to_string(c.spectrum.op)); },
                     [](ExperimentConfig& c, const std::string& v) { c.spectrum.op = parse_operator(unquote(v)); }});
        integer("spectrum", "n_side", [](ExperimentConfig& c) -> int& { return c.spectrum.n_side; });
        integer("spectrum", "levels", [](ExperimentConfig& c) -> int& { return c.spectrum.levels; });
        num("spectrum", "threshold", [](ExperimentConfig& c) -> double& { return c.spectrum.threshold; });

        k.push_back({"filter", "preset",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(c.filter.preset); },
                     [](ExperimentConfig& c, const std::string& v) {
                         std::string p = unquote(v);
                         if (p != "auto" && p != "idle" && p != "z")
                             throw Error("config: filter.preset must be auto, idle or z, got '" + p + "'");
                         c.filter.preset = p;
                     }});
        auto opt_int = [&k](std::string name, std::function<std::optional<int>&(ExperimentConfig&)> ref) {
            std::string key = "filter." + name;
            k.push_back({"filter", name,
                         [ref](const ExperimentConfig& c) { return opt_fmt(ref(const_cast<ExperimentConfig&>(c))); },
                         [ref, key](ExperimentConfig& c, const std::string& v) { ref(c) = to_int(key, v); }});
        };
        auto opt_num = [&k](std::string name, std::function<std::optional<double>&(ExperimentConfig&)> ref,
                            double scale = 1.0) {
            std::string key = "filter." + name;
            k.push_back({"filter", name,
                         [ref, scale](const ExperimentConfig& c) -> std::optional<std::string> {
                             const auto& v = ref(const_cast<ExperimentConfig&>(c));
                             if (!v) return std::nullopt;
                             return fmt(to_external(*v, scale));
                         },
                         [ref, scale, key](ExperimentConfig& c, const std::string& v) {
                             ref(c) = to_internal(to_double(key, v), scale);
                         }});
        };
        opt_int("n_modes", [](ExperimentConfig& c) -> std::optional<int>& { return c.filter.n_modes; });
        opt_num("omega_f_ghz", [](ExperimentConfig& c) -> std::optional<double>& { return c.filter.omega_f; });
        opt_num("kappa_f_mhz", [](ExperimentConfig& c) -> std::optional<double>& { return c.filter.kappa_f; }, 1e-3);
        opt_num("g_over_kappa_f",
                [](ExperimentConfig& c) -> std::optional<double>& { return c.filter.g_over_kappa_f; });
        opt_num("j_over_kappa_f",
                [](ExperimentConfig& c) -> std::optional<double>& { return c.filter.j_over_kappa_f; });
        opt_int("fock_cutoff", [](ExperimentConfig& c) -> std::optional<int>& { return c.filter.fock_cutoff; });
        opt_int("max_excitations",
                [](ExperimentConfig& c) -> std::optional<int>& { return c.filter.max_excitations; });

        k.push_back({"gate", "kind",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(to_string(c.gate.kind)); },
                     [](ExperimentConfig& c, const std::string& v) { set_gate_kind(c, parse_gate_kind(unquote(v))); }});
        k.push_back({"gate", "mode",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(to_string(c.gate_mode)); },
                     [](ExperimentConfig& c, const std::string& v) { c.gate_mode = parse_gate_mode(unquote(v)); }});
        num("gate", "t_gate_ns", [](ExperimentConfig& c) -> double& { return c.gate.t_gate; });
        num("gate", "tau_ns", [](ExperimentConfig& c) -> double& { return c.gate.tau; });
        k.push_back({"gate", "alpha_mhz",
                     [](const ExperimentConfig& c) -> std::optional<std::string> {
                         if (c.gate.kind == GateKind::Z) return std::nullopt;
                         return fmt(to_external(c.gate.alpha, 1e-3));
                     },
                     [](ExperimentConfig& c, const std::string& v) {
                         if (c.gate.kind == GateKind::Z)
                             throw Error("config: gate.alpha_mhz does not apply to the Z gate, use gate.omega_z_ghz");
                         c.gate.alpha = to_internal(to_double("gate.alpha_mhz", v), 1e-3);
                     }});
        k.push_back({"gate", "omega_z_ghz",
                     [](const ExperimentConfig& c) -> std::optional<std::string> {
                         if (c.gate.kind != GateKind::Z) return std::nullopt;
                         return fmt(c.gate.alpha);
                     },
                     [](ExperimentConfig& c, const std::string& v) {
                         if (c.gate.kind != GateKind::Z)
                             throw Error("config: gate.omega_z_ghz only applies to the Z gate");
                         c.gate.alpha = to_double("gate.omega_z_ghz", v);
                     }});
        integer("gate", "n_steps", [](ExperimentConfig& c) -> int& { return c.gate.n_steps; });
        integer("gate", "floquet_steps", [](ExperimentConfig& c) -> int& { return c.gate.floquet_steps; });
        k.push_back({"gate", "calibrate",
                     [](const ExperimentConfig& c) {
                         return std::optional<std::string>(c.gate.calibrate ? "true" : "false");
                     },
                     [](ExperimentConfig& c, const std::string& v) { c.gate.calibrate = to_bool("gate.calibrate", v); }});
        integer("gate", "levels", [](ExperimentConfig& c) -> int& { return c.gate.levels; });
        integer("gate", "joint_levels", [](ExperimentConfig& c) -> int& { return c.gate.joint_levels; });
        integer("gate", "joint_steps", [](ExperimentConfig& c) -> int& { return c.gate.joint_steps; });
        integer("gate", "lindblad_steps", [](ExperimentConfig& c) -> int& { return c.gate.lindblad_steps; });
        num("gate", "kappa_h_inv_us", [](ExperimentConfig& c) -> double& { return c.gate.kappa_h_inv_us; });
        num("gate", "equilibration_ns", [](ExperimentConfig& c) -> double& { return c.gate.equilibration_ns; });

        k.push_back({"measure", "basis",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(to_string(c.measure.basis)); },
                     [](ExperimentConfig& c, const std::string& v) { set_basis(c, parse_measurement_basis(unquote(v))); }});
        num("measure", "omega_rabi_mhz", [](ExperimentConfig& c) -> double& { return c.measure.rabi; }, 1e-3);
        num("measure", "duration_us", [](ExperimentConfig& c) -> double& { return c.measure.duration; }, 1e3);
        integer("measure", "n_traj", [](ExperimentConfig& c) -> int& { return c.n_traj; });
        k.push_back({"measure", "seed",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(std::to_string(c.measure.seed)); },
                     [](ExperimentConfig& c, const std::string& v) {
                         int s = to_int("measure.seed", v);
                         if (s < 0) throw Error("config: measure.seed must be non-negative");
                         c.measure.seed = static_cast<std::uint64_t>(s);
                     }});
        num("measure", "window_mhz", [](ExperimentConfig& c) -> double& { return c.measure.window_width; }, 1e-3);
        num("measure", "dt_record_ns", [](ExperimentConfig& c) -> double& { return c.measure.dt_record; });
        num("measure", "dt_ns", [](ExperimentConfig& c) -> double& { return c.measure.dt; });
        num("measure", "population_dt_ns", [](ExperimentConfig& c) -> double& { return c.measure.population_dt; });
        num("measure", "drive1_ghz", [](ExperimentConfig& c) -> double& { return c.measure.drive1; });
        num("measure", "drive2_ghz", [](ExperimentConfig& c) -> double& { return c.measure.drive2; });
        num("measure", "window20_ghz", [](ExperimentConfig& c) -> double& { return c.measure.window20; });
        num("measure", "window31_ghz", [](ExperimentConfig& c) -> double& { return c.measure.window31; });
        num("measure", "alpha_x_mhz", [](ExperimentConfig& c) -> double& { return c.measure.alpha_x; }, 1e-3);
        num("measure", "omega_z_ghz", [](ExperimentConfig& c) -> double& { return c.measure.omega_z; });
        num("measure", "rwa_cutoff_ghz", [](ExperimentConfig& c) -> double& { return c.measure.rwa_cutoff; });
        num("measure", "kappa_h_inv_us", [](ExperimentConfig& c) -> double& { return c.measure.kappa_h_inv_us; });
        integer("measure", "floquet_steps", [](ExperimentConfig& c) -> int& { return c.measure.floquet_steps; });
        integer("measure", "spectrum_files", [](ExperimentConfig& c) -> int& { return c.spectrum_files; });
        integer("measure", "ensemble_n", [](ExperimentConfig& c) -> int& { return c.ensemble_n; });
        num("measure", "ensemble_duration_ns", [](ExperimentConfig& c) -> double& { return c.ensemble_duration; });

        k.push_back({"sweep", "parameter",
                     [](const ExperimentConfig& c) -> std::optional<std::string> {
                         if (c.sweep.parameter.empty()) return std::nullopt;
                         return c.sweep.parameter;
                     },
                     [](ExperimentConfig& c, const std::string& v) { c.sweep.parameter = unquote(v); }});
        k.push_back({"sweep", "values",
                     [](const ExperimentConfig& c) -> std::optional<std::string> {
                         if (c.sweep.values.empty()) return std::nullopt;
                         std::string s;
                         for (std::size_t i = 0; i < c.sweep.values.size(); ++i)
                             s += (i ? ", " : "") + fmt(c.sweep.values[i]);
                         return s;
                     },
                     [](ExperimentConfig& c, const std::string& v) { c.sweep.values = to_list("sweep.values", v); }});

        k.push_back({"output", "dir",
                     [](const ExperimentConfig& c) { return std::optional<std::string>(c.output_dir); },
                     [](ExperimentConfig& c, const std::string& v) { c.output_dir = unquote(v); }});
        return k;
    }();
    return keys;
}

const KeyDef& find_key(const std::string& full) {
    auto dot = full.find('.');
    if (dot == std::string::npos) throw Error("config: key '" + full + "' must have the form section.key");
    std::string sec = full.substr(0, dot);
    std::string name = full.substr(dot + 1);
    bool section_known = false;
    for (const auto& k : registry()) {
        if (k.section == sec) {
            section_known = true;
            if (k.name == name) return k;
        }
    }
    if (!section_known) throw Error("config: unknown section [" + sec + "]");
    throw Error("config: unknown key '" + name + "' in section [" + sec + "]");
}

std::pair<std::string, std::string> split_assignment(const std::string& a) {
    auto eq = a.find('=');
    if (eq == std::string::npos) throw Error("config: override '" + a + "' must have the form section.key=value");
    return {boost::algorithm::trim_copy(a.substr(0, eq)), boost::algorithm::trim_copy(a.substr(eq + 1))};
}

}  // namespace

std::string to_string(SpectrumSetting s) {
    switch (s) {
        case SpectrumSetting::X: return "x";
        case SpectrumSetting::Z: return "z";
        default: return "idle";
    }
}

std::string to_string(SpectrumOperator s) {
    switch (s) {
        case SpectrumOperator::CosPhi: return "cos_phi";
        case SpectrumOperator::Identity: return "identity";
        default: return "n";
    }
}

FilterParams FilterConfig::resolve(bool z_context) const {
    bool z = preset == "z" || (preset == "auto" && z_context);
    FilterParams f = z ? FilterParams::z_defaults() : FilterParams::idle_defaults();
    if (n_modes) f.n_modes = *n_modes;
    if (omega_f) f.omega_f = *omega_f;
    if (kappa_f) f.kappa_f = *kappa_f;
    if (g_over_kappa_f) f.g_over_kappa_f = *g_over_kappa_f;
    if (j_over_kappa_f) f.j_over_kappa_f = *j_over_kappa_f;
    if (fock_cutoff) f.fock_cutoff = *fock_cutoff;
    if (max_excitations) f.max_excitations = *max_excitations;
    return f;
}

FluxWaveform ExperimentConfig::flux_waveform() const {
    switch (waveform) {
        case WaveformKind::Triangle: return FluxWaveform::triangle();
        case WaveformKind::Cosine: return FluxWaveform::cosine(waveform_alpha);
        default: return FluxWaveform::linear();
    }
}

MeasurementConfig ExperimentConfig::measurement() const {
    MeasurementConfig m = measure;
    m.filter = measure_filter();
    return m;
}

void ExperimentConfig::validate() const {
    circuit.validate();
    if (floquet.n_steps < 1 || floquet.n_grid < 2 || floquet.n_steps % floquet.n_grid != 0)
        throw Error("config: floquet.n_steps must be a positive multiple of floquet.n_grid");
    if (floquet.n_tracked < 2) throw Error("config: floquet.n_levels_tracked must be >= 2");
    if (spectrum.n_side < 1 || spectrum.levels < 2 || spectrum.threshold < 0.0)
        throw Error("config: spectrum settings out of range");
    gate.validate();
    gate_filter().validate();
    measurement().validate();
    if (n_traj < 1) throw Error("config: measure.n_traj must be >= 1");
    if (spectrum_files < 0 || ensemble_n < 0 || !(ensemble_duration > 0.0))
        throw Error("config: measure ensemble settings out of range");
    if (!sweep.parameter.empty()) {
        find_key(sweep.parameter);
        if (sweep.parameter.rfind("sweep.", 0) == 0 || sweep.parameter.rfind("output.", 0) == 0)
            throw Error("config: sweep.parameter cannot refer to the sweep or output sections");
    }
    if (output_dir.empty()) throw Error("config: output.dir must not be empty");
}

void apply_setting(ExperimentConfig& c, const std::string& assignment) {
    auto [key, value] = split_assignment(assignment);
    find_key(key).set(c, value);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : registry()) out.push_back(k.section + "." + k.name);
    return out;
}

ExperimentConfig parse_config(const std::string& ini_text, const std::vector<std::string>& overrides) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(ini_text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(std::string("config: ") + e.what());
    }
    // Later assignments win; the kind and basis keys reset kind-dependent
    // defaults, so they are applied first.
    std::vector<std::pair<std::string, std::string>> assignments;
    for (const auto& [sec, node] : tree) {
        if (node.empty()) throw Error("config: key '" + sec + "' appears outside a section");
        for (const auto& [name, leaf] : node) {
            if (!leaf.empty()) throw Error("config: nested keys are not supported ('" + sec + "." + name + "')");
            assignments.emplace_back(sec + "." + name, leaf.data());
        }
    }
    for (const auto& o : overrides) assignments.push_back(split_assignment(o));
    std::map<std::string, std::string> last;
    std::vector<std::string> order;
    for (const auto& [k, v] : assignments) {
        find_key(k);
        if (!last.count(k)) order.push_back(k);
        last[k] = v;
    }
    ExperimentConfig c;
    for (const char* first : {"gate.kind", "measure.basis"})
        if (last.count(first)) find_key(first).set(c, last[first]);
    for (const auto& k : order) {
        if (k == "gate.kind" || k == "measure.basis") continue;
        find_key(k).set(c, last[k]);
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream f(path);
    if (!f) throw Error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), overrides);
}

std::string to_ini(const ExperimentConfig& c) {
    std::ostringstream out;
    std::string section;
    for (const auto& k : registry()) {
        auto v = k.get(c);
        if (!v) continue;
        if (k.section != section) {
            if (!section.empty()) out << "\n";
            out << "[" << k.section << "]\n";
            section = k.section;
        }
        out << k.name << " = " << *v << "\n";
    }
    return out.str();
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) { return to_ini(a) == to_ini(b); }

}  // namespace kapitza
