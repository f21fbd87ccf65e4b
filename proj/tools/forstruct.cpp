#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forstruct/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "forstruct: plot-level forest structure from ALS point clouds\n"
        "  feature extraction, field variables, GA-selected weighted k-nn prediction"};

    std::string config_path;
    std::vector<std::pair<std::string, std::string>> flag_values;

    app.add_option("--config", config_path, "key=value config file");
    auto track = [&](const std::string& key) {
        return [&flag_values, key](const std::string& v) {
            flag_values.emplace_back(key, v);
            return true;
        };
    };
    auto add = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(flag, track(key), help);
    };

    add("--mode", "mode", "features|variables|select|predict|classify|simulate|evaluate");
    add("--clouds", "clouds", "cloud CSV file or directory");
    add("--trees", "trees", "tree-list CSV");
    add("--plots", "plots", "plot metadata CSV");
    add("--features", "features", "feature table CSV");
    add("--variables", "variables", "variables CSV");
    add("--model", "model", "model JSON");
    add("--predictions", "predictions", "predictions CSV (or directory for classify)");
    add("--train-plots", "train_plots", "file of training plot ids, one per line");
    add("--out", "out", "output directory (default out)");
    add("--pixel-size", "pixel_size", "CHM pixel size in m (default 0.5)");
    add("--rt", "r_t", "upper distance limit r_t in m (default 4.5)");
    add("--km-step", "km_step", "KM estimator lattice/bin step in m (default 0.1)");
    add("--inner-radius", "inner_radius", "feature radius in m (default 9)");
    add("--outer-radius", "outer_radius", "CHM build radius in m (default 12)");
    add("--q-levels", "q_levels", "threshold levels (default 0.8,0.6,0.4,0.2)");
    add("--seed", "seed", "random seed (default 1)");
    add("--threads", "threads", "worker threads (default: runtime)");
    add("--population", "population", "GA population size (default 50)");
    add("--generations", "generations", "GA generations (default 100)");
    add("--mutation", "mutation", "GA per-gene mutation probability (default 0.05)");
    add("--elitism", "elitism", "GA elite count (default 2)");
    add("--w-max", "w_max", "max integer feature weight (default 10)");
    add("--response", "response", "response variable or 'all' (default all)");
    add("--kind", "kind", "evaluate mode: continuous|categorical");
    add("--sim-plots", "sim_plots", "simulate mode: number of plots (default 30)");
    add("--pulse-density", "pulse_density", "simulate mode: pulses per m^2 (default 0.89)");
    add("--sim-lambda", "sim_lambda", "simulate mode: tree intensity per m^2 (default 0.1)");
    add("--sim-hardcore", "sim_hardcore", "simulate mode: hard-core distance m (default 1.5)");
    add("--sim-parent-lambda", "sim_parent_lambda", "simulate mode: cluster parent intensity");
    add("--sim-mu", "sim_mu", "simulate mode: mean offspring per cluster (default 5)");
    add("--sim-sigma", "sim_sigma", "simulate mode: cluster dispersal sd m (default 0.7)");
    add("--sim-height-mean", "sim_height_mean", "simulate mode: mean tree height m (default 15)");
    add("--sim-height-sd", "sim_height_sd", "simulate mode: tree height sd m (default 3)");

    CLI11_PARSE(app, argc, argv);

    try {
        forstruct::RunConfig cfg;
        if (!config_path.empty()) forstruct::apply_config_file(cfg, config_path);
        for (const auto& [key, value] : flag_values) {
            forstruct::apply_config_entry(cfg, key, value);
        }
        if (cfg.mode.empty()) {
            std::cerr << "error: --mode is required (or set mode= in the config file)\n";
            return 2;
        }
        std::vector<std::string> warnings;
        forstruct::run_mode(cfg, warnings);
        for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
