#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cpasim/errors.hpp"
#include "cpasim/scenario.hpp"

namespace {

cpasim::ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cpasim::ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return cpasim::parse_config(text.str());
}

void apply_photons_override(cpasim::ScenarioConfig& config, int photons) {
    if (photons < 1) throw cpasim::ConfigError("--photons must be positive");
    if (config.input.kind != cpasim::InputSpec::Kind::noon && photons != 1)
        throw cpasim::ConfigError("--photons above 1 requires a 'noon' input");
    config.input.photons = photons;
}

void write_table(const cpasim::ResultTable& table, const std::string& out_flag,
                 const cpasim::ScenarioConfig& config) {
    if (!out_flag.empty())
        cpasim::emit_csv(table, out_flag);
    else if (config.output)
        cpasim::emit_csv(table, *config.output);
    else
        cpasim::emit_csv(table, std::cout);
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Few-photon simulator for networks of lossy beam splitters"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    int photons = 0;
    int cap = 4;
    double tolerance = 1e-9;

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        auto* opt = cmd->add_option("--config", config_path, "scenario config file (JSON)");
        if (needs_config) opt->required();
        cmd->add_option("--out", out_path, "output file (default: config's output, else stdout)");
        cmd->add_option("--photons", photons, "photon count override (noon inputs)");
        cmd->add_option("--cap", cap, "photon-number cap")->capture_default_str();
        cmd->add_option("--tolerance", tolerance, "conservation residual tolerance")
            ->capture_default_str();
    };

    CLI::App* validate = app.add_subcommand("validate", "parse a config and build its network");
    add_common(validate, true);

    CLI::App* run_cmd = app.add_subcommand("run", "run a config as-is, CSV to --out or stdout");
    add_common(run_cmd, true);

    CLI::App* sweep_cmd =
        app.add_subcommand("sweep", "run with a sweep grid taken from flags over the config");
    add_common(sweep_cmd, true);
    std::string sweep_parameter;
    std::string sweep_start, sweep_stop;
    int sweep_steps = 0;
    auto* par_opt = sweep_cmd->add_option("--parameter", sweep_parameter,
                                          "swept parameter: 'phi' or a phase stage label");
    auto* start_opt = sweep_cmd->add_option("--start", sweep_start, "sweep start (angle)");
    auto* stop_opt = sweep_cmd->add_option("--stop", sweep_stop, "sweep stop (angle, exclusive)");
    auto* steps_opt = sweep_cmd->add_option("--steps", sweep_steps, "number of grid points");

    CLI::App* cpa_cmd = app.add_subcommand(
        "cpa-find", "search the swept phase for an absorption extremum");
    add_common(cpa_cmd, true);
    std::string objective_name;
    cpa_cmd->add_option("--objective", objective_name,
                        "absorption (maximize) or transparency (minimize)")
        ->required()
        ->check(CLI::IsMember({"absorption", "transparency"}));

    CLI::App* scenario_cmd = app.add_subcommand("scenario", "print a canned scenario config");
    std::string scenario_name;
    scenario_cmd->add_option("name", scenario_name, "single-bs or interferometer")
        ->required()
        ->check(CLI::IsMember({"single-bs", "interferometer"}));
    scenario_cmd->add_option("--out", out_path, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        cpasim::RunOptions options;
        options.photon_cap = cap;
        options.residual_tolerance = tolerance;

        if (scenario_cmd->parsed()) {
            const cpasim::ScenarioConfig config =
                scenario_name == "single-bs"
                    ? cpasim::scenario_single_bs(0.5, 0.5, 1.0 / std::sqrt(2.0))
                    : cpasim::scenario_interferometer();
            const std::string text = cpasim::serialize_config(config);
            if (out_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw cpasim::Error("cannot open '" + out_path + "' for writing");
                out << text;
            }
            return 0;
        }

        cpasim::ScenarioConfig config = load_config(config_path);
        if (photons != 0) apply_photons_override(config, photons);

        if (validate->parsed()) {
            const cpasim::Network net = cpasim::build_scenario_network(config, cap);
            cpasim::make_input(config.input, net.registry());
            std::cout << "ok: " << config.modes.size() << " optical modes, "
                      << config.stages.size() << " stages, "
                      << net.registry()->size() << " modes after dilation\n";
            return 0;
        }

        if (run_cmd->parsed()) {
            write_table(cpasim::run(config, options), out_path, config);
            return 0;
        }

        if (sweep_cmd->parsed()) {
            cpasim::SweepConfig sweep = config.sweep.value_or(
                cpasim::SweepConfig{"phi", 0.0, 2.0 * std::numbers::pi, 100});
            if (par_opt->count()) sweep.parameter = sweep_parameter;
            if (start_opt->count()) sweep.start = cpasim::parse_angle_text(sweep_start);
            if (stop_opt->count()) sweep.stop = cpasim::parse_angle_text(sweep_stop);
            if (steps_opt->count()) {
                if (sweep_steps < 1) throw cpasim::ConfigError("--steps must be positive");
                sweep.steps = sweep_steps;
            }
            config.sweep = sweep;
            write_table(cpasim::run(config, options), out_path, config);
            return 0;
        }

        if (cpa_cmd->parsed()) {
            const auto objective = objective_name == "absorption"
                                       ? cpasim::CpaObjective::total_absorption
                                       : cpasim::CpaObjective::total_transparency;
            const cpasim::CpaResult result = cpasim::cpa_find(config, objective, options);
            const std::string text = "phase,value\n" + format_value(result.phase) + "," +
                                     format_value(result.value) + "\n";
            if (out_path.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(out_path, std::ios::binary);
                if (!out) throw cpasim::Error("cannot open '" + out_path + "' for writing");
                out << text;
            }
            return 0;
        }
    } catch (const cpasim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const cpasim::PhysicalityError& e) {
        std::cerr << "physicality error: " << e.what() << '\n';
        return 3;
    } catch (const cpasim::InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
