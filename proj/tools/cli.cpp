#include "cli.hpp"

#include "hilbvp/oracle.hpp"
#include "hilbvp/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hilbvp::cli {
namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path resolve_output_dir(const std::string& flag) {
    fs::path dir = ".";
    if (const char* env = std::getenv("HILBVP_OUTPUT_DIR"); env != nullptr && *env != '\0') {
        dir = env;
    }
    if (!flag.empty()) dir = flag;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) {
        throw ConfigError(dir.string() + ": output directory is not writable");
    }
    return dir;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path.string() + ": cannot write file");
    out << text;
}

void write_csv(const fs::path& path, const Trajectory& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path.string() + ": cannot write file");
    write_trajectory_csv(out, traj);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Globals {
    std::string output_dir;
    unsigned long long seed = 0;
};

std::vector<int> parse_mode_list(const std::string& text) {
    std::vector<int> out;
    if (text.empty() || text == "none") return out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        int k = 0;
        try {
            k = std::stoi(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw std::invalid_argument("--active: '" + item + "' is not an integer");
        }
        out.push_back(k);
    }
    return out;
}

struct AmplitudesArgs {
    std::string active = "1";
    std::vector<double> phases;
    int modes = 0;
    bool allow_zero = false;
};

int cmd_amplitudes(const Globals& g, const AmplitudesArgs& args) {
    const std::vector<int> active = parse_mode_list(args.active);
    if (active.empty() && !args.allow_zero) {
        throw std::invalid_argument("no active modes; pass --allow-zero to accept the zero solution");
    }
    int modes = args.modes;
    for (int k : active) modes = std::max(modes, k);
    modes = std::max(modes, 1);
    const AmplitudePairs c = generating_torus(modes, active, args.phases);

    nlohmann::json pairs = nlohmann::json::array();
    for (int k = 1; k <= modes; ++k) {
        std::cout << "mode " << k << ": (" << fmt(c.c1(k)) << ", " << fmt(c.c2(k)) << ")\n";
        pairs.push_back({{"mode", k}, {"c1", c.c1(k)}, {"c2", c.c2(k)}});
    }
    const nlohmann::json doc = {{"mode_count", modes},
                                {"active", active},
                                {"amplitude", active.empty() ? 0.0
                                                             : torus_amplitude(static_cast<int>(
                                                                   active.size()))},
                                {"pairs", pairs}};
    write_text(resolve_output_dir(g.output_dir) / "amplitudes.json", dump_json(doc));
    return kOk;
}

int cmd_solve_linear(const Globals& g, const std::string& path) {
    const LinearRun run = parse_linear_config(read_file(path), path);
    const LinearSolveResult result = solve_linear(run.problem, run.rank_tol, run.consistency_tol);
    const fs::path dir = resolve_output_dir(g.output_dir);
    write_text(dir / "report.json", dump_json(to_json(result)));
    write_csv(dir / "trajectory.csv", result.green_trajectory);
    std::cout << "classification: " << to_string(result.classification)
              << "\nresidual: " << fmt(result.residual) << '\n';
    return kOk;
}

int cmd_solve_vdp(const Globals& g, const std::string& path) {
    const VdpRun run = parse_vdp_config(read_file(path), path);
    const AmplitudePairs c0 =
        generating_torus(run.config.grid.mode_count(), run.config.active, run.config.phases);
    const SolveReport report = iterate_vdp(run.config, c0, run.options);
    const fs::path dir = resolve_output_dir(g.output_dir);
    write_text(dir / "report.json", dump_json(to_json(report)));
    write_csv(dir / "trajectory.csv", report.trajectory);
    write_text(dir / "iterations.log", iteration_log(report));
    std::cout << "converged: " << (report.converged ? "true" : "false")
              << "\niterations: " << report.iterations
              << "\nclassification: " << solve_classification(report.classification) << '\n';
    for (std::size_t i = 0; i < report.active_modes.size(); ++i) {
        std::cout << "amplitude mode " << report.active_modes[i] << ": "
                  << fmt(report.amplitude_check[i]) << '\n';
    }
    if (!report.diagnostic.empty()) std::cout << report.diagnostic << '\n';
    return report.converged ? kOk : kNumericalFailure;
}

struct OracleArgs {
    double epsilon = 0.01;
    int modes = 0;
    std::vector<int> active{1};
    std::vector<double> phases;
    double step = 1e-3;
};

int cmd_oracle(const Globals& g, const OracleArgs& a) {
    if (a.epsilon < 0.0 || a.epsilon >= 1.0) {
        throw std::invalid_argument("--epsilon must satisfy 0 <= epsilon < 1");
    }
    if (a.active.empty()) throw std::invalid_argument("--active must list at least one mode");
    int modes = a.modes;
    for (int k : a.active) modes = std::max(modes, k);
    const AmplitudePairs guess = generating_torus(modes, a.active, a.phases);
    IntegratorConfig cfg;
    cfg.step = a.step;
    const PeriodicOrbit orbit = shoot_periodic(guess.to_vector(), a.epsilon, cfg);
    IntegratorConfig traj_cfg = cfg;
    traj_cfg.t_end = orbit.period;
    const Trajectory traj = integrate(orbit.initial_state, a.epsilon, traj_cfg);

    nlohmann::json amps = nlohmann::json::array();
    for (int k = 1; k <= modes; ++k) {
        amps.push_back({{"mode", k}, {"amplitude", orbit.amplitude_per_mode.at(k - 1)}});
        std::cout << "amplitude mode " << k << ": " << fmt(orbit.amplitude_per_mode.at(k - 1))
                  << '\n';
    }
    std::cout << "period: " << fmt(orbit.period) << "\nresidual: " << fmt(orbit.residual) << '\n';
    const nlohmann::json doc = {{"epsilon", a.epsilon},
                                {"step", a.step},
                                {"period", orbit.period},
                                {"residual", orbit.residual},
                                {"newton_steps", orbit.newton_steps},
                                {"phase_mode", orbit.phase_mode},
                                {"initial_state", vector_to_json(orbit.initial_state)},
                                {"amplitudes", amps}};
    const fs::path dir = resolve_output_dir(g.output_dir);
    write_text(dir / "oracle.json", dump_json(doc));
    write_csv(dir / "trajectory.csv", traj);
    return kOk;
}

int cmd_verify(const Globals& g, const std::string& suite) {
    const std::vector<CheckRow> rows = run_verify(suite, g.seed);
    print_table(std::cout, rows);
    bool ok = true;
    for (const CheckRow& r : rows) ok = ok && r.pass;
    std::cout << (ok ? "all checks passed" : "some checks FAILED") << '\n';
    return ok ? kOk : kNumericalFailure;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Spectral solver for weakly nonlinear periodic boundary-value problems", "hilbvp"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--output-dir", g.output_dir,
                   "Directory for reports (default: $HILBVP_OUTPUT_DIR, else the current directory)");
    app.add_option("--seed", g.seed, "Seed for randomized sweeps");

    AmplitudesArgs amp;
    auto* amplitudes = app.add_subcommand("amplitudes", "Print a generating amplitude on the torus");
    amplitudes->add_option("--active", amp.active, "Active modes, e.g. 1,2 ('none' for N = 0)");
    amplitudes->add_option("--phases", amp.phases, "One phase per active mode")->delimiter(',');
    amplitudes->add_option("--modes", amp.modes, "Truncation order M (default: largest active mode)")
        ->check(CLI::NonNegativeNumber);
    amplitudes->add_flag("--allow-zero", amp.allow_zero, "Accept an empty active set");

    std::string linear_path;
    auto* solve_linear_cmd = app.add_subcommand("solve-linear", "Solve a linear boundary-value problem");
    solve_linear_cmd->add_option("config", linear_path, "JSON config")->required();

    std::string vdp_path;
    auto* solve_vdp = app.add_subcommand("solve-vdp", "Run the van der Pol iteration");
    solve_vdp->add_option("config", vdp_path, "JSON config")->required();

    OracleArgs orc;
    auto* oracle = app.add_subcommand("oracle", "Shoot for the periodic orbit with RK4");
    oracle->add_option("--epsilon", orc.epsilon, "Perturbation size");
    oracle->add_option("--modes", orc.modes, "Truncation order M")->check(CLI::NonNegativeNumber);
    oracle->add_option("--active", orc.active, "Active modes of the initial guess")->delimiter(',');
    oracle->add_option("--phases", orc.phases, "Phases of the initial guess")->delimiter(',');
    oracle->add_option("--step", orc.step, "RK4 step")->check(CLI::PositiveNumber);

    std::string suite = "all";
    auto* verify = app.add_subcommand("verify", "Run cross-check batteries");
    verify->add_option("--suite", suite, "Suite name or 'all'");

    try {
        app.parse(argc, argv);
        if (amplitudes->parsed()) {
            return cmd_amplitudes(g, amp);
        }
        if (solve_linear_cmd->parsed()) return cmd_solve_linear(g, linear_path);
        if (solve_vdp->parsed()) return cmd_solve_vdp(g, vdp_path);
        if (oracle->parsed()) return cmd_oracle(g, orc);
        if (verify->parsed()) return cmd_verify(g, suite);
        return kUsageError;
    } catch (const CLI::CallForHelp& e) {
        app.exit(e);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e);
        return kOk;
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }
}

}  // namespace hilbvp::cli
