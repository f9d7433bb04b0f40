#include "cli.hpp"

#include "relbgk/config.hpp"
#include "relbgk/errors.hpp"
#include "relbgk/io.hpp"
#include "relbgk/solver.hpp"
#include "relbgk/verification.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace relbgk::cli {
namespace {

namespace fs = std::filesystem;

std::string one_line(std::string s)
{
    for (char &c : s) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    return s;
}

std::ofstream open_output(const std::string &path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot open '" + path + "' for writing");
    }
    return out;
}

std::string snapshot_name(std::int64_t step)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%08lld.relbgk", static_cast<long long>(step));
    return buf;
}

int cmd_run(const std::string &config_path, int threads_override, std::ostream &out)
{
    RunConfig cfg = parse_config(config_path);
    if (threads_override >= 0) {
        cfg.threads = static_cast<unsigned>(threads_override);
    }
    const unsigned threads = resolve_threads(cfg.threads);
    const SolverConfig solver = solver_config(cfg);
    Distribution initial = build_initial(cfg);
    const std::string mode(to_string(cfg.mode));

    RunHooks hooks;
    if (!cfg.snapshot_dir.empty()) {
        fs::create_directories(cfg.snapshot_dir);
        hooks.snapshot = [&](const SimulationState &s) {
            write_snapshot(fs::path(cfg.snapshot_dir) / snapshot_name(s.step), s.f, s.t, mode, threads);
        };
        hooks.on_failure = [&](const SimulationState &s) {
            write_snapshot(fs::path(cfg.snapshot_dir) / "failure_dump.relbgk", s.f, s.t, mode, threads);
        };
    }
    const RunResult result = run(std::move(initial), solver, hooks);
    if (!cfg.csv_path.empty()) {
        auto csv = open_output(cfg.csv_path);
        write_diagnostics_csv(csv, result.series, threads);
    }
    if (!cfg.snapshot_dir.empty()) {
        write_snapshot(fs::path(cfg.snapshot_dir) / "final.relbgk", result.state.f, result.state.t, mode, threads);
    }
    const auto &last = result.series.back();
    out << "steps=" << last.step << " t=" << format_real(last.t) << " mass_defect=" << format_real(last.mass_defect)
        << " energy_defect=" << format_real(last.energy_defect) << " entropy=" << format_real(last.entropy)
        << " clamp_events=" << last.clamp_events << " removed_mass=" << format_real(result.state.events.removed_mass)
        << '\n';
    return 0;
}

int cmd_project(const std::string &in_path, const std::string &out_path, int threads, std::ostream &out)
{
    const Snapshot snap = read_snapshot(in_path);
    const unsigned t = resolve_threads(threads < 0 ? 1u : static_cast<unsigned>(threads));
    if (out_path.empty() || out_path == "-") {
        write_fields_csv(out, snap.f, t);
    } else {
        auto csv = open_output(out_path);
        write_fields_csv(csv, snap.f, t);
    }
    return 0;
}

int cmd_verify(int trials, std::uint64_t seed, double beta_sup, double q_max, int nodes, int threads,
               const std::string &out_path, std::ostream &out)
{
    LemmaSuiteConfig cfg;
    cfg.trials = trials;
    cfg.seed = seed;
    cfg.params = TruncationParams::from_beta_sup(beta_sup);
    cfg.q_max = q_max;
    cfg.nodes_per_axis = nodes;
    cfg.threads = threads < 0 ? 0u : static_cast<unsigned>(threads);
    const auto reports = lemma_suite(cfg);
    if (out_path.empty() || out_path == "-") {
        write_lemma_reports_json(out, reports);
    } else {
        auto json_out = open_output(out_path);
        write_lemma_reports_json(json_out, reports);
    }
    return 0;
}

int cmd_sweep(const std::string &config_path, const std::vector<double> &beta_sups, const std::string &out_path,
              int threads_override, std::ostream &out)
{
    RunConfig cfg = parse_config(config_path);
    if (threads_override >= 0) {
        cfg.threads = static_cast<unsigned>(threads_override);
    }
    const unsigned threads = resolve_threads(cfg.threads);
    SolverConfig base = solver_config(cfg);
    base.threads = cfg.threads;
    const Distribution initial = build_initial(cfg);
    const SweepResult sweep = epsilon_sweep(initial, base, beta_sups);
    if (out_path.empty() || out_path == "-") {
        write_sweep_csv(out, sweep, threads);
    } else {
        auto csv = open_output(out_path);
        write_sweep_csv(csv, sweep, threads);
    }
    return 0;
}

int cmd_tabulate(double beta_min, double beta_max, int points, const std::string &out_path, std::ostream &out)
{
    if (out_path.empty() || out_path == "-") {
        write_specfun_table(out, beta_min, beta_max, points);
    } else {
        auto csv = open_output(out_path);
        write_specfun_table(csv, beta_min, beta_max, points);
    }
    return 0;
}

int exit_code_for(const Error &e)
{
    if (dynamic_cast<const DomainError *>(&e) || dynamic_cast<const ConfigError *>(&e) ||
        dynamic_cast<const ValidationError *>(&e) || dynamic_cast<const ParseError *>(&e) ||
        dynamic_cast<const NoSolutionError *>(&e)) {
        return 1;
    }
    return 2;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Relativistic BGK-Marle solver and verification suite", "relbgk"};
    app.require_subcommand(1);

    std::string config_path, in_path, out_path;
    int threads = -1;

    auto *run_cmd = app.add_subcommand("run", "Evolve a configuration; writes diagnostics CSV and snapshots");
    run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
    run_cmd->add_option("--threads", threads, "Override the configured thread count (0 = auto)");

    auto *project_cmd = app.add_subcommand("project", "Per-cell thermodynamic fields of a snapshot");
    project_cmd->add_option("--in", in_path, "RELBGK01 snapshot")->required();
    project_cmd->add_option("--out", out_path, "Output CSV ('-' for stdout)");
    project_cmd->add_option("--threads", threads, "Worker threads (0 = auto)");

    int trials = 100;
    std::uint64_t seed = 7;
    double beta_sup = 2.0;
    double q_max = 0.0;
    int nodes = 48;
    auto *verify_cmd = app.add_subcommand("verify", "Randomized certification of the quantitative lemmas");
    verify_cmd->add_option("--trials", trials, "Number of random trials")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", seed, "Base seed");
    verify_cmd->add_option("--beta-sup", beta_sup, "Regularization parameter (> 1)");
    verify_cmd->add_option("--q-max", q_max, "Momentum box half-width (0 = automatic)");
    verify_cmd->add_option("--nodes", nodes, "Nodes per momentum axis")->check(CLI::Range(4, 512));
    verify_cmd->add_option("--out", out_path, "Output JSON ('-' for stdout)");
    verify_cmd->add_option("--threads", threads, "Worker threads (0 = auto)");

    std::vector<double> beta_sups{2.0, 3.0, 4.0, 6.0};
    auto *sweep_cmd = app.add_subcommand("sweep", "Truncated-scheme runs along increasing beta_sup");
    sweep_cmd->add_option("--config", config_path, "Base run configuration (JSON)")->required();
    sweep_cmd->add_option("--beta-sup", beta_sups, "Increasing beta_sup list")->delimiter(',');
    sweep_cmd->add_option("--out", out_path, "Output CSV ('-' for stdout)");
    sweep_cmd->add_option("--threads", threads, "Override the configured thread count (0 = auto)");

    double beta_min = 0.1, beta_max = 100.0;
    int points = 50;
    auto *specfun_cmd = app.add_subcommand("specfun", "Special-function utilities");
    specfun_cmd->require_subcommand(1);
    auto *tabulate_cmd = specfun_cmd->add_subcommand("tabulate", "Tabulate K1, K2, K1/K2, M and Psi");
    tabulate_cmd->add_option("--beta-min", beta_min, "Smallest beta");
    tabulate_cmd->add_option("--beta-max", beta_max, "Largest beta");
    tabulate_cmd->add_option("--points", points, "Number of log-spaced points");
    tabulate_cmd->add_option("--out", out_path, "Output CSV ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError &e) {
        err << "relbgk: error[usage]: " << one_line(e.what()) << '\n' << app.help();
        return 1;
    }

    try {
        if (run_cmd->parsed()) {
            return cmd_run(config_path, threads, out);
        }
        if (project_cmd->parsed()) {
            return cmd_project(in_path, out_path, threads, out);
        }
        if (verify_cmd->parsed()) {
            return cmd_verify(trials, seed, beta_sup, q_max, nodes, threads, out_path, out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(config_path, beta_sups, out_path, threads, out);
        }
        if (tabulate_cmd->parsed()) {
            return cmd_tabulate(beta_min, beta_max, points, out_path, out);
        }
    } catch (const Error &e) {
        err << "relbgk: error[" << e.kind() << "]: " << one_line(e.what()) << '\n';
        return exit_code_for(e);
    } catch (const std::exception &e) {
        err << "relbgk: error[internal]: " << one_line(e.what()) << '\n';
        return 2;
    }
    err << "relbgk: error[usage]: no subcommand\n";
    return 1;
}

} // namespace relbgk::cli
