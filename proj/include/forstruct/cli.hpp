#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "forstruct/ga_selector.hpp"

namespace forstruct {

// Batch run configuration. Values come from built-in defaults, then an
// optional key=value config file, then command-line flags (flags win).
struct RunConfig {
    std::string mode;  // features|variables|select|predict|classify|simulate|evaluate

    std::string clouds;       // cloud CSV file or directory
    std::string trees;        // tree-list CSV
    std::string plots;        // plot metadata CSV
    std::string features;     // feature table CSV (select/predict input)
    std::string variables;    // variables CSV (select input)
    std::string model;        // model JSON (predict input)
    std::string predictions;  // predictions CSV or directory (classify/evaluate input)
    std::string train_plots;  // optional: file of training plot ids, one per line
    std::string out = "out";  // output directory

    double pixel_size = 0.5;
    double r_t = 4.5;
    double km_step = 0.1;
    double inner_radius = 9.0;
    double outer_radius = 12.0;
    std::vector<double> q_levels{0.8, 0.6, 0.4, 0.2};

    std::uint64_t seed = 1;
    int threads = 0;  // 0 = runtime default

    GaConfig ga;
    std::string response = "all";  // r_index|fd|weibull_scale|weibull_shape|dev_class|all
    std::string kind;              // evaluate mode: continuous|categorical

    // simulate mode
    int sim_plots = 30;
    double pulse_density = 0.89;
    double sim_lambda = 0.1;
    double sim_hardcore = 1.5;
    double sim_parent_lambda = 0.02;
    double sim_mu = 5.0;
    double sim_sigma = 0.7;
    double sim_height_mean = 15.0;
    double sim_height_sd = 3.0;

    void validate() const;
};

// Applies key=value lines ('#' starts a comment). Unknown keys error.
void apply_config_file(RunConfig& cfg, const std::string& path);
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

// Executes one mode; collects non-fatal warnings. Throws on errors.
void run_mode(const RunConfig& cfg, std::vector<std::string>& warnings);

void cmd_features(const RunConfig& cfg, std::vector<std::string>& warnings);
void cmd_variables(const RunConfig& cfg, std::vector<std::string>& warnings);
void cmd_select(const RunConfig& cfg, std::vector<std::string>& warnings);
void cmd_predict(const RunConfig& cfg, std::vector<std::string>& warnings);
void cmd_classify(const RunConfig& cfg, std::vector<std::string>& warnings);
void cmd_simulate(const RunConfig& cfg, std::vector<std::string>& warnings);
void cmd_evaluate(const RunConfig& cfg, std::vector<std::string>& warnings);

}  // namespace forstruct
