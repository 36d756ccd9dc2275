#pragma once

// Batch front end: run configuration, check selection and the pipeline that
// writes CSV tables and report.json.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hsusy/chain.hpp"
#include "hsusy/states.hpp"
#include "hsusy/errors.hpp"

namespace hsusy::cli {

// Invalid or unparsable configuration (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

enum class Mode { run, build, verify, spectrum, sweep };

enum ExitCode : int {
    kExitOk = 0,
    kExitCheckFailed = 1,
    kExitInadmissible = 2,
    kExitNumerical = 3,
};

// Canonical order; also the order of report entries.
const std::vector<std::string>& check_names();

// Default tolerance per key. "ladder_structure" is an exact comparison and
// has no entry.
const std::map<std::string, double>& default_tolerances();

struct SweepSpec {
    double epsilon = 0.0;
    double nu_min = -1.5;
    double nu_max = 1.5;
    double nu_step = 0.1;
};

struct RunConfig {
    double x_min = -12.0;
    double x_max = 12.0;
    std::size_t n_points = 2401;
    std::vector<Factorization> factorizations;
    int n_max = 10;
    std::vector<std::string> checks = check_names();
    std::filesystem::path output_dir = "hsusy_out";
    std::map<std::string, double> tolerance_overrides;
    SweepSpec sweep;

    Grid grid() const { return Grid(x_min, x_max, n_points); }
    FactorizationConfig factorization_config() const { return FactorizationConfig(factorizations); }
    double tolerance(const std::string& key) const;
    void validate() const;  // throws ConfigError
};

/// "all" or a comma separated list; throws ConfigError on unknown names.
std::vector<std::string> parse_check_list(std::string_view text);

RunConfig parse_run_config(std::string_view json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config);

const char* mode_name(Mode mode);

/// Runs one subcommand and returns its exit code. Progress goes to `log`.
int execute(const RunConfig& config, Mode mode, std::ostream& log, bool quiet = false);

}  // namespace hsusy::cli
