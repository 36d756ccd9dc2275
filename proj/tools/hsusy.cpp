// hsusy: chain construction, spectra and ladder-algebra checks for
// higher-order SUSY partners of the harmonic oscillator.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "hsusy/cli.hpp"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string checks;
    bool quiet = false;
    std::optional<double> epsilon;
    std::optional<double> nu_min;
    std::optional<double> nu_max;
    std::optional<double> nu_step;
};

void add_common(CLI::App* sub, Options& opt, bool with_checks) {
    sub->add_option("--config", opt.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out_dir, "output directory (overrides output_dir)");
    if (with_checks) sub->add_option("--checks", opt.checks, "\"all\" or comma separated check names");
    sub->add_flag("--quiet", opt.quiet, "suppress progress output");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace hsusy::cli;

    CLI::App app{"Higher-order SUSY partners of the harmonic oscillator"};
    app.require_subcommand(1);
    Options opt;

    auto* run = app.add_subcommand("run", "build artifacts and run the requested checks");
    auto* build = app.add_subcommand("build", "write potential, alpha, spectrum and state tables only");
    auto* verify = app.add_subcommand("verify", "run checks and write report.json only");
    auto* spectrum = app.add_subcommand("spectrum", "write spectrum.csv only");
    auto* sweep = app.add_subcommand("sweep", "scan admissibility over a range of nu at fixed epsilon");
    add_common(run, opt, true);
    add_common(build, opt, false);
    add_common(verify, opt, true);
    add_common(spectrum, opt, false);
    add_common(sweep, opt, false);
    sweep->add_option("--epsilon", opt.epsilon, "factorization energy");
    sweep->add_option("--nu-min", opt.nu_min);
    sweep->add_option("--nu-max", opt.nu_max);
    sweep->add_option("--nu-step", opt.nu_step);

    CLI11_PARSE(app, argc, argv);

    Mode mode = Mode::run;
    if (build->parsed()) mode = Mode::build;
    if (verify->parsed()) mode = Mode::verify;
    if (spectrum->parsed()) mode = Mode::spectrum;
    if (sweep->parsed()) mode = Mode::sweep;

    RunConfig config;
    try {
        if (!opt.config_path.empty()) config = load_run_config(opt.config_path);
        if (!opt.out_dir.empty()) config.output_dir = opt.out_dir;
        if (!opt.checks.empty()) config.checks = parse_check_list(opt.checks);
        if (opt.epsilon) config.sweep.epsilon = *opt.epsilon;
        if (opt.nu_min) config.sweep.nu_min = *opt.nu_min;
        if (opt.nu_max) config.sweep.nu_max = *opt.nu_max;
        if (opt.nu_step) config.sweep.nu_step = *opt.nu_step;
        config.validate();
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitInadmissible;
    }
    return execute(config, mode, opt.quiet ? std::cerr : std::cout, opt.quiet);
}
