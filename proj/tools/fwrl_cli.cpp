// Command-line front end: run, scenario, plot, maps.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fwrl/grid_map.hpp"
#include "fwrl/harness.hpp"
#include "fwrl/plots.hpp"
#include "fwrl/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void print_summary(const fwrl::ResultsBundle& bundle) {
    std::cout << "map: " << bundle.map_name << '\n';
    for (const auto& a : bundle.agents) {
        std::cout << "  " << fwrl::to_string(a.algo)
                  << "  median_reward_last20=" << fwrl::format_number(a.median_reward_last20)
                  << "  efficiency_index="
                  << (a.efficiency_index ? fwrl::format_number(*a.efficiency_index) : "n/a")
                  << "  mean_dist_ineff="
                  << (a.mean_dist_ineff ? fwrl::format_number(*a.mean_dist_ineff) : "n/a") << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floyd-Warshall RL grid-world laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed_override;

    auto* run = app.add_subcommand("run", "Run a seeded agent comparison and write results.csv / summary.json");
    run->add_option("--config", config_path, "Run configuration file")->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed-override", seed_override, "Replace the configured seeds with this one seed");
    bool run_plots = false;
    run->add_flag("--plots", run_plots, "Also write curves.svg and dist_ineff.svg");

    std::string scenario_config;
    auto* scenario = app.add_subcommand("scenario", "Replay the scripted transfer scenario (h_maze by default)");
    scenario->add_option("--config", scenario_config, "Scenario script file")->check(CLI::ExistingFile);
    scenario->add_option("--out", out_dir, "Output directory");
    scenario->add_option("--seed-override", seed_override, "Scenario seed");

    std::string snapshot_path;
    std::string snapshot_map;
    std::string snapshot_goal;
    auto* plot = app.add_subcommand("plot", "Render SVG plots from a results directory or an FW snapshot");
    plot->add_option("--out", out_dir, "Directory holding results.csv; SVGs are written here");
    plot->add_option("--snapshot", snapshot_path, "FW table snapshot CSV to render as a heatmap")
        ->check(CLI::ExistingFile);
    plot->add_option("--map", snapshot_map, "Map of the snapshot (bundled name or file)");
    plot->add_option("--goal", snapshot_goal, "Goal cell 'x,y' for the snapshot heatmap");

    bool show = false;
    auto* maps = app.add_subcommand("maps", "List bundled maps");
    maps->add_flag("--show", show, "Print each map");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            fwrl::RunConfig cfg = config_path.empty() ? fwrl::RunConfig{} : fwrl::load_run_config(config_path);
            if (seed_override) cfg.seeds = {*seed_override};
            const auto dir = fwrl::resolve_output_dir(out_dir, cfg.output_dir);
            const auto bundle = fwrl::run_experiment(cfg);
            fwrl::write_results(bundle, dir);
            if (run_plots) fwrl::emit_plots(bundle, dir);
            print_summary(bundle);
            std::cout << "wrote " << (dir / "results.csv").string() << '\n';
        } else if (*scenario) {
            fwrl::ScenarioScript script = scenario_config.empty()
                                              ? fwrl::default_h_maze_script()
                                              : fwrl::parse_scenario_script(read_file(scenario_config));
            if (seed_override) script.seed = *seed_override;
            const auto dir = fwrl::resolve_output_dir(out_dir, "");
            const auto report = fwrl::run_scenario(script);
            fwrl::write_scenario(report, fwrl::resolve_map(script.map), dir);
            std::cout << "map: " << report.map_name << "  oracle distance: " << report.oracle_distance << '\n';
            for (const auto& a : report.agents) {
                std::cout << "  " << fwrl::to_string(a.algo) << "  reached=" << (a.reached ? "true" : "false")
                          << "  steps=" << a.steps << '\n';
            }
            std::cout << "wrote " << (dir / "scenario.json").string() << '\n';
        } else if (*plot) {
            const auto dir = fwrl::resolve_output_dir(out_dir, "");
            if (!snapshot_path.empty()) {
                if (snapshot_map.empty() || snapshot_goal.empty()) {
                    std::cerr << "--snapshot needs --map and --goal\n";
                    return 2;
                }
                const auto map = fwrl::resolve_map(snapshot_map);
                const auto comma = snapshot_goal.find(',');
                if (comma == std::string::npos) {
                    std::cerr << "--goal expects 'x,y'\n";
                    return 2;
                }
                const fwrl::CellCoord goal{std::stoi(snapshot_goal.substr(0, comma)),
                                           std::stoi(snapshot_goal.substr(comma + 1))};
                std::ifstream in(snapshot_path, std::ios::binary);
                const auto table = fwrl::read_fw_snapshot_csv(in, map);
                const auto g = map.require_state(goal);
                fwrl::HeatmapPanel panel{"goal " + snapshot_goal, {}, std::nullopt, goal, {}};
                for (fwrl::StateId s = 0; s < map.num_states(); ++s) panel.values.push_back(table.best(s, g));
                std::filesystem::create_directories(dir);
                std::ofstream svg(dir / "snapshot_heatmap.svg", std::ios::binary);
                svg << fwrl::render_value_heatmap_svg(map, {{"FWRL", {panel}}});
                std::cout << "wrote " << (dir / "snapshot_heatmap.svg").string() << '\n';
            } else {
                std::ifstream in(dir / "results.csv", std::ios::binary);
                if (!in) {
                    std::cerr << "no results.csv in " << dir.string() << '\n';
                    return 1;
                }
                fwrl::ResultsBundle bundle;
                bundle.rows = fwrl::read_results_csv(in);
                bundle.agents = fwrl::summarize_agents(bundle.rows);
                fwrl::emit_plots(bundle, dir);
                std::cout << "wrote " << (dir / "curves.svg").string() << " and "
                          << (dir / "dist_ineff.svg").string() << '\n';
            }
        } else if (*maps) {
            for (const auto& [name, map] : fwrl::bundled_maps()) {
                std::cout << name << "  " << map.width() << "x" << map.height() << "  "
                          << map.num_states() << " free cells\n";
                if (show) std::cout << fwrl::serialize_map(map) << "\n\n";
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
