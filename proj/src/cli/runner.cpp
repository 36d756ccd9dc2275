#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "config_json.hpp"
#include "hsusy/algebra.hpp"
#include "hsusy/eigensolver.hpp"
#include "hsusy/states.hpp"

namespace hsusy::cli {

using nlohmann::json;

namespace {

constexpr int kCheckBasisMax = 8;  // checks need psi~_0 .. psi~_6 plus one above
constexpr std::size_t kStatesCsvColumns = 8;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

json residual_json(const ResidualReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        entries.push_back({{"state", e.state}, {"energy", e.energy}, {"residual", e.residual}});
    }
    return {{"name", r.name}, {"max_residual", r.max_residual}, {"entries", entries}};
}

json skipped_check() {
    return {{"status", "skipped"}, {"tolerance", nullptr}, {"max_residual", nullptr},
            {"details", nullptr}, {"wall_time_s", nullptr}};
}

struct CheckResult {
    bool pass = false;
    json tolerance;
    json max_residual;
    json details;
};

struct Pipeline {
    const RunConfig& config;
    Grid grid;
    FactorizationConfig factorizations;
    std::optional<SuperpotentialTable> table;
    std::vector<EigenState> spectrum;  // n = 0 .. n_max
    std::vector<double> oracle;        // eigensolver energies paired with spectrum
    std::vector<EigenState> basis;     // n = 0 .. max(n_max, kCheckBasisMax), eigenvector-refined
    std::optional<LadderOperatorSet> ladder;

    std::vector<EigenState> transformed() const {
        std::vector<EigenState> out;
        for (const auto& s : basis) {
            if (s.provenance.kind != Provenance::Kind::missing) out.push_back(s);
        }
        return out;
    }
    std::vector<EigenState> missing() const {
        std::vector<EigenState> out;
        for (const auto& s : basis) {
            if (s.provenance.kind == Provenance::Kind::missing) out.push_back(s);
        }
        return out;
    }
    const EigenState* transformed_n(int n) const {
        for (const auto& s : basis) {
            if (s.provenance.kind != Provenance::Kind::missing && s.provenance.n == n) return &s;
        }
        return nullptr;
    }
};

CheckResult check_riccati(const Pipeline& p) {
    const double tol = p.config.tolerance("riccati");
    double worst = 0.0;
    json entries = json::array();
    for (std::size_t i = 1; i <= p.table->order(); ++i) {
        const GridFunction v = partner_potential(*p.table, i - 1).values;
        for (std::size_t k = i; k <= p.table->order(); ++k) {
            const Superpotential& entry = p.table->entry(i, k);
            const double r = riccati_residual(entry, v, p.factorizations.epsilon(k));
            worst = std::max(worst, r);
            entries.push_back({{"level", i}, {"energy_index", k}, {"residual", r}, {"pole_free", entry.regular()}});
        }
    }
    return {worst <= tol, tol, worst, {{"entries", entries}}};
}

CheckResult check_spectrum(const Pipeline& p) {
    const double tol = p.config.tolerance("spectrum");
    double worst = 0.0;
    json levels = json::array();
    for (std::size_t i = 0; i < p.spectrum.size(); ++i) {
        const double d = std::abs(p.spectrum[i].energy - p.oracle[i]);
        worst = std::max(worst, d);
        levels.push_back({{"index", i}, {"energy", p.spectrum[i].energy}, {"oracle_energy", p.oracle[i]},
                          {"abs_diff", d}, {"provenance", p.spectrum[i].provenance.describe()}});
    }
    return {worst <= tol, tol, worst, {{"levels", levels}}};
}

CheckResult check_intertwining(const Pipeline& p) {
    const double tol = p.config.tolerance("intertwining");
    std::vector<EigenState> states;
    for (int n = 0; n <= 5; ++n) states.push_back(oscillator_state(n, p.grid));
    const ResidualReport r = verify_intertwining(*p.ladder, states);
    return {r.max_residual <= tol, tol, r.max_residual, residual_json(r)};
}

CheckResult check_algebra(const Pipeline& p) {
    const double tol = p.config.tolerance("algebra");
    const double tol_annihilation = p.config.tolerance("annihilation");
    const std::size_t count = std::min<std::size_t>(7, p.basis.size());
    const std::vector<EigenState> lowest(p.basis.begin(), p.basis.begin() + static_cast<long>(count));
    const AlgebraReport alg = verify_polynomial_algebra(*p.ladder, lowest);
    const AnnihilationReport ann = verify_annihilation(*p.ladder, p.missing());
    const double ann_max = std::max(ann.by_d.max_residual, ann.by_d_dagger.max_residual);
    return {alg.max_residual() <= tol && ann_max <= tol_annihilation,
            {{"algebra", tol}, {"annihilation", tol_annihilation}},
            alg.max_residual(),
            {{"lowering", residual_json(alg.lowering)},
             {"raising", residual_json(alg.raising)},
             {"commutator", residual_json(alg.commutator)},
             {"annihilation_by_d", residual_json(ann.by_d)},
             {"annihilation_by_d_dagger", residual_json(ann.by_d_dagger)}}};
}

CheckResult check_number(const Pipeline& p) {
    const double tol = p.config.tolerance("number");
    std::vector<EigenState> states;
    for (int n = 1; n <= 5; ++n) {
        if (const EigenState* s = p.transformed_n(n)) states.push_back(*s);
    }
    const ResidualReport r = verify_number_operator(*p.ladder, states);
    return {r.max_residual <= tol, tol, r.max_residual, residual_json(r)};
}

CheckResult check_linearized(const Pipeline& p) {
    const double tol = p.config.tolerance("linearized");
    const std::vector<EigenState> basis = p.transformed();
    double worst = 0.0;
    bool ok = true;
    json actions = json::array();
    for (int n = 0; n <= 5; ++n) {
        for (LadderDirection dir : {LadderDirection::lower, LadderDirection::raise}) {
            const bool lower = dir == LadderDirection::lower;
            const double expected = lower ? std::sqrt(static_cast<double>(n)) : std::sqrt(n + 1.0);
            const int expected_index = lower ? n - 1 : n + 1;
            json item = {{"direction", lower ? "lower" : "raise"}, {"n", n}, {"expected", expected}};
            try {
                const LinearizedAction a = linearized_action(*p.ladder, basis, dir, n);
                const double err = std::abs(a.coefficient - expected);
                worst = std::max(worst, err);
                ok = ok && err <= tol && a.state_index == expected_index;
                item.update({{"coefficient", a.coefficient}, {"state_index", a.state_index},
                             {"overlap", a.overlap}, {"phase", a.phase}, {"abs_error", err}});
            } catch (const Error& e) {
                ok = false;
                worst = std::max(worst, expected);
                item["error"] = e.what();
            }
            actions.push_back(item);
        }
    }
    return {ok, tol, worst, {{"actions", actions}}};
}

CheckResult check_susy_block(const Pipeline& p) {
    const double tol_anti = p.config.tolerance("susy_anticommutator");
    const double tol_eig = p.config.tolerance("susy_eigenvalue");
    std::vector<BlockTestVector> blocks;
    for (int n = 0; n <= 3; ++n) {
        if (const EigenState* s = p.transformed_n(n)) blocks.push_back({*s, oscillator_state(n, p.grid)});
    }
    const SusyBlockReport r = verify_susy_block(*p.ladder, blocks);
    const bool ok = r.anticommutator.max_residual <= tol_anti && r.eigenvalue.max_residual <= tol_eig;
    return {ok,
            {{"anticommutator", tol_anti}, {"eigenvalue", tol_eig}},
            std::max(r.anticommutator.max_residual, r.eigenvalue.max_residual),
            {{"anticommutator", residual_json(r.anticommutator)},
             {"polynomial", residual_json(r.polynomial)},
             {"eigenvalue", residual_json(r.eigenvalue)}}};
}

json ladders_json(const LadderStructure& s) {
    json out = json::array();
    for (const auto& l : s.ladders) {
        out.push_back({{"start_energy", l.start_energy},
                       {"length", l.length ? json(*l.length) : json("infinite")}});
    }
    return out;
}

CheckResult check_ladder_structure(const Pipeline& p) {
    const RootSet roots = number_root_flags(p.factorizations, p.basis);
    const LadderStructure predicted = analyze_ladder_structure(roots.roots, roots.normalizable);
    const LadderStructure measured = spectrum_ladders(*p.ladder, p.basis);
    const bool ok = same_structure(predicted, measured);
    return {ok, "exact", nullptr,
            {{"roots", roots.roots},
             {"normalizable", roots.normalizable},
             {"predicted", ladders_json(predicted)},
             {"measured", ladders_json(measured)}}};
}

const std::map<std::string, std::function<CheckResult(const Pipeline&)>>& check_table() {
    static const std::map<std::string, std::function<CheckResult(const Pipeline&)>> table = {
        {"riccati", check_riccati},
        {"spectrum", check_spectrum},
        {"intertwining", check_intertwining},
        {"algebra", check_algebra},
        {"number", check_number},
        {"linearized", check_linearized},
        {"susy_block", check_susy_block},
        {"ladder_structure", check_ladder_structure},
    };
    return table;
}

json admissibility_json(const AdmissibilityReport& report) {
    json levels = json::array();
    for (const auto& l : report.levels) {
        levels.push_back({{"level", l.level},
                          {"admissible", l.admissible()},
                          {"sign_changes", l.sign_changes},
                          {"near_zero", l.near_zero},
                          {"cancellations", l.cancellations}});
    }
    json first = nullptr;
    if (auto where = report.first_singularity()) first = {{"level", where->first}, {"x", where->second}};
    return {{"admissible", report.admissible}, {"summary", report.summary()},
            {"first_singularity", first}, {"levels", levels}};
}

void write_artifacts(const Pipeline& p, bool all_tables, std::vector<std::string>& written) {
    const auto& dir = p.config.output_dir;
    const std::size_t n = p.grid.size();
    const std::size_t m = p.table->order();

    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < p.spectrum.size(); ++i) {
        rows.push_back({std::to_string(i), fmt(p.spectrum[i].energy), p.spectrum[i].provenance.describe(),
                        fmt(p.oracle[i]), fmt(std::abs(p.spectrum[i].energy - p.oracle[i]))});
    }
    write_csv(dir / "spectrum.csv", {"index", "energy", "provenance", "oracle_energy", "abs_diff"}, rows);
    written.push_back("spectrum.csv");
    if (!all_tables) return;

    const GridFunction v0 = oscillator_potential(p.grid);
    const GridFunction vm = partner_potential(*p.table, m).values;
    rows.clear();
    for (std::size_t i = 0; i < n; ++i) rows.push_back({fmt(p.grid.x(i)), fmt(v0[i]), fmt(vm[i])});
    write_csv(dir / "potential.csv", {"x", "V0", "V_m"}, rows);

    std::vector<std::string> header = {"x"};
    for (std::size_t j = 1; j <= m; ++j) header.push_back("alpha_" + std::to_string(j));
    rows.clear();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row = {fmt(p.grid.x(i))};
        for (std::size_t j = 1; j <= m; ++j) row.push_back(fmt(p.table->diagonal(j)[i]));
        rows.push_back(std::move(row));
    }
    write_csv(dir / "alphas.csv", header, rows);

    const std::size_t cols = std::min(kStatesCsvColumns, p.spectrum.size());
    header = {"x"};
    for (std::size_t k = 0; k < cols; ++k) header.push_back("psi_" + std::to_string(k));
    rows.clear();
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row = {fmt(p.grid.x(i))};
        for (std::size_t k = 0; k < cols; ++k) row.push_back(fmt(p.spectrum[k].wavefunction[i]));
        rows.push_back(std::move(row));
    }
    write_csv(dir / "states.csv", header, rows);
    written.insert(written.end(), {"potential.csv", "alphas.csv", "states.csv"});
}

int run_sweep(const RunConfig& config, std::ostream& log, bool quiet, json& report) {
    const Grid grid = config.grid();
    const SweepSpec& s = config.sweep;
    std::vector<std::vector<std::string>> rows;
    json samples = json::array();
    const auto steps = static_cast<long>(std::floor((s.nu_max - s.nu_min) / s.nu_step + 1e-9));
    for (long k = 0; k <= steps; ++k) {
        // snap to the step lattice
        const double nu = std::round((s.nu_min + k * s.nu_step) * 1e12) / 1e12;
        const AdmissibilityReport scan = singularity_scan(FactorizationConfig({{s.epsilon, nu}}), grid);
        const auto where = scan.first_singularity();
        rows.push_back({fmt(s.epsilon), fmt(nu), scan.admissible ? "1" : "0",
                        where ? fmt(where->second) : std::string()});
        samples.push_back({{"nu", nu}, {"admissible", scan.admissible}, {"summary", scan.summary()}});
        if (!quiet) log << "nu = " << fmt(nu) << ": " << scan.summary() << '\n';
    }
    write_csv(config.output_dir / "sweep.csv", {"epsilon", "nu", "admissible", "first_singularity_x"}, rows);
    report["sweep"] = samples;
    report["artifacts"] = {"sweep.csv"};
    return kExitOk;
}

}  // namespace

int execute(const RunConfig& config, Mode mode, std::ostream& log, bool quiet) {
    const auto t_start = Clock::now();
    json tolerances = json::object();
    for (const auto& [k, v] : default_tolerances()) tolerances[k] = v;
    tolerances["ladder_structure"] = "exact";
    json effective = json::object();
    for (const auto& [k, v] : default_tolerances()) effective[k] = config.tolerance(k);
    json overrides = json::object();
    for (const auto& [k, v] : config.tolerance_overrides) overrides[k] = v;

    json checks = json::object();
    for (const auto& name : check_names()) checks[name] = skipped_check();

    json report = {
        {"mode", mode_name(mode)},
        {"status", "ok"},
        {"exit_code", kExitOk},
        {"error", nullptr},
        {"config", config_echo(config)},
        {"default_tolerances", tolerances},
        {"tolerance_overrides", overrides},
        {"effective_tolerances", effective},
        {"admissibility", nullptr},
        {"checks", checks},
        {"sweep", nullptr},
        {"artifacts", json::array()},
        {"wall_time_s", {{"total", 0.0}, {"build", nullptr}, {"checks", json::object()}}},
    };

    const bool writes_report = mode != Mode::spectrum;
    auto finish = [&](int code, const std::string& status) {
        report["exit_code"] = code;
        report["status"] = status;
        report["wall_time_s"]["total"] = seconds_since(t_start);
        if (writes_report) {
            std::ofstream out(config.output_dir / "report.json", std::ios::binary);
            out << report.dump(2) << '\n';
        }
        return code;
    };

    try {
        config.validate();
        std::filesystem::create_directories(config.output_dir);
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        report["error"] = e.what();
        return finish(kExitInadmissible, "invalid_config");
    } catch (const std::filesystem::filesystem_error& e) {
        log << "cannot create output directory: " << e.what() << '\n';
        return kExitNumerical;
    }

    try {
        if (mode == Mode::sweep) {
            return finish(run_sweep(config, log, quiet, report), "ok");
        }

        const auto t_build = Clock::now();
        Pipeline p{config, config.grid(), config.factorization_config(), {}, {}, {}, {}, {}};
        const AdmissibilityReport scan = singularity_scan(p.factorizations, p.grid);
        report["admissibility"] = admissibility_json(scan);
        if (!scan.admissible) {
            log << "inadmissible configuration: " << scan.summary() << '\n';
            report["error"] = scan.summary();
            return finish(kExitInadmissible, "inadmissible");
        }
        p.table.emplace(build_table(p.factorizations, p.grid));
        p.spectrum = spectrum_assemble(*p.table, config.n_max);
        const BandedOperator h = build_hamiltonian(partner_potential(*p.table, p.table->order()).values);
        p.oracle = tridiagonal_eigensolve(h, p.spectrum.size()).eigenvalues;
        const bool needs_checks = mode == Mode::run || mode == Mode::verify;
        if (needs_checks) {
            p.basis = refine_states(spectrum_assemble(*p.table, std::max(config.n_max, kCheckBasisMax)), h);
            p.ladder.emplace(build_ladder_set(*p.table));
        }
        report["wall_time_s"]["build"] = seconds_since(t_build);

        std::vector<std::string> written;
        if (mode != Mode::verify) write_artifacts(p, mode == Mode::run || mode == Mode::build, written);
        report["artifacts"] = written;

        bool all_pass = true;
        if (needs_checks) {
            for (const auto& name : config.checks) {
                const auto t_check = Clock::now();
                json entry;
                try {
                    const CheckResult r = check_table().at(name)(p);
                    entry = {{"status", r.pass ? "pass" : "fail"}, {"tolerance", r.tolerance},
                             {"max_residual", r.max_residual}, {"details", r.details}};
                    all_pass = all_pass && r.pass;
                } catch (const OverlapError& e) {
                    entry = {{"status", "fail"}, {"tolerance", nullptr}, {"max_residual", nullptr},
                             {"details", {{"error", e.what()}}}};
                    all_pass = false;
                }
                const double dt = seconds_since(t_check);
                entry["wall_time_s"] = dt;
                report["wall_time_s"]["checks"][name] = dt;
                report["checks"][name] = entry;
                if (!quiet) {
                    log << name << ": " << entry["status"].get<std::string>();
                    if (entry["max_residual"].is_number()) log << " (max residual " << fmt(entry["max_residual"].get<double>()) << ")";
                    log << '\n';
                }
            }
        }
        if (!quiet) {
            for (const auto& f : written) log << "wrote " << (config.output_dir / f).string() << '\n';
        }
        return all_pass ? finish(kExitOk, "ok") : finish(kExitCheckFailed, "check_failed");
    } catch (const SingularityError& e) {
        log << "singular chain: " << e.what() << '\n';
        report["error"] = e.what();
        return finish(kExitInadmissible, "inadmissible");
    } catch (const DomainError& e) {
        log << "invalid configuration: " << e.what() << '\n';
        report["error"] = e.what();
        return finish(kExitInadmissible, "invalid_config");
    } catch (const Error& e) {
        log << "numerical failure: " << e.what() << '\n';
        report["error"] = e.what();
        return finish(kExitNumerical, "numerical_failure");
    }
}

}  // namespace hsusy::cli
