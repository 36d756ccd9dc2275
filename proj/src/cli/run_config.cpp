#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "config_json.hpp"

namespace hsusy::cli {

using nlohmann::json;

const std::vector<std::string>& check_names() {
    static const std::vector<std::string> names = {
        "riccati", "spectrum",   "intertwining", "algebra",
        "number",  "linearized", "susy_block",   "ladder_structure"};
    return names;
}

const std::map<std::string, double>& default_tolerances() {
    static const std::map<std::string, double> table = {
        {"riccati", 1e-5},
        {"spectrum", 1e-3},
        {"intertwining", 1e-3},
        {"algebra", 5e-3},
        {"annihilation", 1e-3},
        {"number", 1e-2},
        {"linearized", 1e-2},
        {"susy_anticommutator", 1e-3},
        {"susy_eigenvalue", 1e-2},
    };
    return table;
}

double RunConfig::tolerance(const std::string& key) const {
    if (auto it = tolerance_overrides.find(key); it != tolerance_overrides.end()) return it->second;
    return default_tolerances().at(key);
}

void RunConfig::validate() const {
    if (!(x_min < x_max)) throw ConfigError("grid: x_min must be below x_max");
    if (std::abs(x_min + x_max) > 1e-12 * std::max(1.0, x_max)) {
        throw ConfigError("grid: the grid must be symmetric (x_min = -x_max)");
    }
    if (n_points < 3) throw ConfigError("grid: n_points must be at least 3");
    if (n_max < 0 || n_max > kMaxOscillatorIndex) {
        throw ConfigError("n_max must lie in [0, " + std::to_string(kMaxOscillatorIndex) + "]");
    }
    try {
        FactorizationConfig cfg(factorizations);
    } catch (const Error& e) {
        throw ConfigError(std::string("factorizations: ") + e.what());
    }
    for (const auto& [key, value] : tolerance_overrides) {
        if (!default_tolerances().count(key)) throw ConfigError("tolerances: unknown key '" + key + "'");
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw ConfigError("tolerances: '" + key + "' must be positive and finite");
        }
    }
    std::set<std::string> known(check_names().begin(), check_names().end());
    for (const auto& c : checks) {
        if (!known.count(c)) throw ConfigError("unknown check '" + c + "'");
    }
    if (!(sweep.nu_step > 0.0) || !(sweep.nu_min <= sweep.nu_max)) {
        throw ConfigError("sweep: need nu_step > 0 and nu_min <= nu_max");
    }
    if (sweep.epsilon > 0.5) throw ConfigError("sweep: epsilon must not exceed 1/2");
}

std::vector<std::string> parse_check_list(std::string_view text) {
    if (text == "all") return check_names();
    std::set<std::string> wanted;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) continue;
        item = item.substr(first, last - first + 1);
        if (std::find(check_names().begin(), check_names().end(), item) == check_names().end()) {
            throw ConfigError("unknown check '" + item + "'");
        }
        wanted.insert(item);
    }
    std::vector<std::string> out;
    for (const auto& name : check_names()) {
        if (wanted.count(name)) out.push_back(name);
    }
    return out;
}

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || item.key() == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text) {
    RunConfig config;
    try {
        const json doc = json::parse(json_text);
        if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
        reject_unknown(doc, {"grid", "factorizations", "n_max", "checks", "output_dir", "tolerances", "sweep"},
                       "config");
        if (doc.contains("grid")) {
            const json& g = doc.at("grid");
            reject_unknown(g, {"x_min", "x_max", "n_points"}, "grid");
            read(g, "x_min", config.x_min);
            read(g, "x_max", config.x_max);
            read(g, "n_points", config.n_points);
        }
        if (doc.contains("factorizations")) {
            for (const json& f : doc.at("factorizations")) {
                reject_unknown(f, {"epsilon", "nu"}, "factorizations");
                config.factorizations.push_back({f.at("epsilon").get<double>(), f.at("nu").get<double>()});
            }
        }
        read(doc, "n_max", config.n_max);
        if (doc.contains("checks")) {
            const json& c = doc.at("checks");
            if (c.is_string()) {
                config.checks = parse_check_list(c.get<std::string>());
            } else {
                std::string joined;
                for (const json& name : c) joined += name.get<std::string>() + ",";
                config.checks = parse_check_list(joined);
            }
        }
        if (doc.contains("output_dir")) config.output_dir = doc.at("output_dir").get<std::string>();
        if (doc.contains("tolerances")) {
            for (const auto& item : doc.at("tolerances").items()) {
                config.tolerance_overrides[item.key()] = item.value().get<double>();
            }
        }
        if (doc.contains("sweep")) {
            const json& s = doc.at("sweep");
            reject_unknown(s, {"epsilon", "nu_min", "nu_max", "nu_step"}, "sweep");
            read(s, "epsilon", config.sweep.epsilon);
            read(s, "nu_min", config.sweep.nu_min);
            read(s, "nu_max", config.sweep.nu_max);
            read(s, "nu_step", config.sweep.nu_step);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid configuration JSON: ") + e.what());
    }
    config.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_run_config(buffer.str());
}

json config_echo(const RunConfig& config) {
    json factorizations = json::array();
    for (const auto& f : config.factorizations) factorizations.push_back({{"epsilon", f.epsilon}, {"nu", f.nu}});
    json overrides = json::object();
    for (const auto& [k, v] : config.tolerance_overrides) overrides[k] = v;
    return {
        {"grid", {{"x_min", config.x_min}, {"x_max", config.x_max}, {"n_points", config.n_points}}},
        {"factorizations", factorizations},
        {"n_max", config.n_max},
        {"checks", config.checks},
        {"output_dir", config.output_dir.string()},
        {"tolerances", overrides},
        {"sweep",
         {{"epsilon", config.sweep.epsilon},
          {"nu_min", config.sweep.nu_min},
          {"nu_max", config.sweep.nu_max},
          {"nu_step", config.sweep.nu_step}}},
    };
}

std::string config_to_json(const RunConfig& config) { return config_echo(config).dump(2); }

const char* mode_name(Mode mode) {
    switch (mode) {
        case Mode::run: return "run";
        case Mode::build: return "build";
        case Mode::verify: return "verify";
        case Mode::spectrum: return "spectrum";
        case Mode::sweep: return "sweep";
    }
    return "run";
}

}  // namespace hsusy::cli
