#include "forstruct/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "forstruct/cli_data.hpp"
#include "forstruct/csv.hpp"
#include "forstruct/feature_catalog.hpp"
#include "forstruct/raster_spatial.hpp"
#include "forstruct/synthetic_forest.hpp"
#include "forstruct/vertical_features.hpp"

namespace forstruct {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ResponseSpec {
    std::string name;
    ResponseKind kind;
};

const std::vector<ResponseSpec>& response_catalog() {
    static const std::vector<ResponseSpec> specs{
        {"r_index", ResponseKind::continuous},   {"fd", ResponseKind::continuous},
        {"weibull_scale", ResponseKind::continuous}, {"weibull_shape", ResponseKind::continuous},
        {"dev_class", ResponseKind::categorical},
    };
    return specs;
}

void set_threads(const RunConfig& cfg) {
#ifdef _OPENMP
    if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#else
    (void)cfg;
#endif
}

void ensure_out(const RunConfig& cfg) { fs::create_directories(cfg.out); }

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out) / name).string();
}

json missing_to_json(double v) {
    if (is_missing(v)) return nullptr;
    return v;
}

int structure_code(StructureClass c) {
    switch (c) {
        case StructureClass::regular: return 0;
        case StructureClass::random_: return 1;
        case StructureClass::clustered: return 2;
    }
    return 1;
}

const std::vector<std::string>& structure_names() {
    static const std::vector<std::string> names{"regular", "random", "clustered"};
    return names;
}

}  // namespace

void RunConfig::validate() const {
    static const std::set<std::string> modes{"features", "variables", "select",  "predict",
                                             "classify", "simulate",  "evaluate"};
    if (!modes.count(mode)) {
        throw InvalidInput("unknown mode '" + mode +
                           "' (features|variables|select|predict|classify|simulate|evaluate)");
    }
    if (!(pixel_size > 0.0)) throw InvalidInput("pixel_size must be positive");
    if (!(r_t > 0.0)) throw InvalidInput("r_t must be positive");
    if (!(km_step > 0.0)) throw InvalidInput("km_step must be positive");
    if (!(inner_radius > 0.0) || !(inner_radius < outer_radius)) {
        throw InvalidInput("need 0 < inner_radius < outer_radius");
    }
    const std::vector<double> standard{0.8, 0.6, 0.4, 0.2};
    if (q_levels != standard) {
        throw InvalidInput("the feature catalog is defined for q_levels=0.8,0.6,0.4,0.2");
    }
    if (!response.empty() && response != "all") {
        bool known = false;
        for (const auto& r : response_catalog()) known = known || r.name == response;
        if (!known) throw InvalidInput("unknown response '" + response + "'");
    }
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&](const std::string& v) {
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (...) {
            throw InvalidInput("config key '" + key + "': cannot parse number '" + v + "'");
        }
    };
    auto as_int = [&](const std::string& v) {
        const double x = as_double(v);
        if (x != std::floor(x)) throw InvalidInput("config key '" + key + "' must be an integer");
        return static_cast<long long>(x);
    };

    if (key == "mode") cfg.mode = value;
    else if (key == "clouds") cfg.clouds = value;
    else if (key == "trees") cfg.trees = value;
    else if (key == "plots") cfg.plots = value;
    else if (key == "features") cfg.features = value;
    else if (key == "variables") cfg.variables = value;
    else if (key == "model") cfg.model = value;
    else if (key == "predictions") cfg.predictions = value;
    else if (key == "train_plots") cfg.train_plots = value;
    else if (key == "out") cfg.out = value;
    else if (key == "pixel_size") cfg.pixel_size = as_double(value);
    else if (key == "r_t") cfg.r_t = as_double(value);
    else if (key == "km_step") cfg.km_step = as_double(value);
    else if (key == "inner_radius") cfg.inner_radius = as_double(value);
    else if (key == "outer_radius") cfg.outer_radius = as_double(value);
    else if (key == "q_levels") {
        cfg.q_levels.clear();
        std::istringstream ss(value);
        std::string item;
        while (std::getline(ss, item, ',')) cfg.q_levels.push_back(as_double(item));
    } else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(value));
    else if (key == "threads") cfg.threads = static_cast<int>(as_int(value));
    else if (key == "population") cfg.ga.population = static_cast<int>(as_int(value));
    else if (key == "generations") cfg.ga.generations = static_cast<int>(as_int(value));
    else if (key == "mutation") cfg.ga.mutation = as_double(value);
    else if (key == "elitism") cfg.ga.elitism = static_cast<int>(as_int(value));
    else if (key == "w_max") cfg.ga.w_max = static_cast<int>(as_int(value));
    else if (key == "response") cfg.response = value;
    else if (key == "kind") cfg.kind = value;
    else if (key == "sim_plots") cfg.sim_plots = static_cast<int>(as_int(value));
    else if (key == "pulse_density") cfg.pulse_density = as_double(value);
    else if (key == "sim_lambda") cfg.sim_lambda = as_double(value);
    else if (key == "sim_hardcore") cfg.sim_hardcore = as_double(value);
    else if (key == "sim_parent_lambda") cfg.sim_parent_lambda = as_double(value);
    else if (key == "sim_mu") cfg.sim_mu = as_double(value);
    else if (key == "sim_sigma") cfg.sim_sigma = as_double(value);
    else if (key == "sim_height_mean") cfg.sim_height_mean = as_double(value);
    else if (key == "sim_height_sd") cfg.sim_height_sd = as_double(value);
    else throw InvalidInput("unknown config key '" + key + "'");
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw IoError(path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        try {
            apply_config_entry(cfg, line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidInput& e) {
            throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

// ---------------------------------------------------------------------------
// features

void cmd_features(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.clouds.empty() || cfg.plots.empty()) {
        throw InvalidInput("features mode needs --clouds and --plots");
    }
    const auto plots = load_plots_csv(cfg.plots);
    const auto clouds =
        load_clouds(cfg.clouds, plots, cfg.outer_radius, cfg.inner_radius, warnings);

    const auto n = static_cast<std::int64_t>(clouds.size());
    std::vector<std::optional<std::array<double, kNumFeatures>>> rows(clouds.size());
    std::vector<std::string> row_warnings(clouds.size());

#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            const VerticalFeatureSet vert = compute_vertical(clouds[i]);
            LayerFeatureSet spatial;
            bool have_spatial = true;
            const Chm chm = build_chm(clouds[i], cfg.pixel_size);
            try {
                spatial = layer_features(chm, cfg.r_t);
            } catch (const DegenerateCanopy&) {
                have_spatial = false;
                row_warnings[i] = "plot '" + clouds[i].plot_id() +
                                  "': degenerate canopy, spatial features set to NA";
            }
            auto out = have_spatial
                           ? assemble_features(vert, spatial)
                           : [&] {
                                 std::array<double, kNumFeatures> a;
                                 for (std::size_t s = 0; s < 62; ++s) a[s] = vert.slots[s];
                                 for (std::size_t s = 62; s < kNumFeatures; ++s) a[s] = kMissing;
                                 return a;
                             }();
            rows[i] = out;
        } catch (const InsufficientData& e) {
            row_warnings[i] = "plot '" + clouds[i].plot_id() + "' skipped: " + e.what();
        }
    }

    std::ostringstream os;
    os << "plot_id";
    for (const auto& name : feature_names()) os << ',' << name;
    os << '\n';
    for (std::size_t i = 0; i < clouds.size(); ++i) {
        if (!row_warnings[i].empty()) warnings.push_back(row_warnings[i]);
        if (!rows[i]) continue;
        os << clouds[i].plot_id();
        for (double v : *rows[i]) os << ',' << format_value(v);
        os << '\n';
    }
    ensure_out(cfg);
    write_text_file(out_path(cfg, "features.csv"), os.str());
}

// ---------------------------------------------------------------------------
// variables

void cmd_variables(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.trees.empty() || cfg.plots.empty()) {
        throw InvalidInput("variables mode needs --trees and --plots");
    }
    const auto plots = load_plots_csv(cfg.plots);
    auto trees = load_trees_csv(cfg.trees, warnings);

    for (const auto& [id, _] : trees) {
        if (!plots.count(id)) {
            warnings.push_back("tree list references unknown plot '" + id + "'; skipped");
        }
    }

    std::ostringstream vars;
    vars << "plot_id,r_index,fd,weibull_scale,weibull_shape,dev_class,r_class,fd_class\n";
    std::ostringstream rejects;
    rejects << "plot_id,n_trees,reason\n";

    for (const auto& [id, meta] : plots) {
        auto it = trees.find(id);
        std::vector<TreeRecord> plot_trees = it == trees.end() ? std::vector<TreeRecord>{}
                                                               : it->second;
        const Window window = Window::disc(meta.center, cfg.inner_radius);
        std::size_t outside = 0;
        std::erase_if(plot_trees, [&](const TreeRecord& t) {
            const bool out = !window.contains({t.x, t.y});
            outside += out;
            return out;
        });
        if (outside > 0) {
            warnings.push_back("plot '" + id + "': dropped " + std::to_string(outside) +
                               " trees outside the plot window");
        }
        if (plot_trees.size() < kMinPlotTrees) {
            rejects << id << ',' << plot_trees.size() << ",fewer than "
                    << kMinPlotTrees << " trees\n";
            continue;
        }
        PlotVariables v;
        try {
            v = plot_variables(id, plot_trees, window, meta.dev_class);
        } catch (const InvalidInput& e) {
            throw IoError("plot '" + id + "': " + e.what());
        }
        vars << id << ',' << format_value(v.r_index) << ',' << format_value(v.fd) << ','
             << format_value(v.weibull_scale) << ',' << format_value(v.weibull_shape) << ','
             << dev_class_token(v.dev_class) << ',' << to_string(v.r_class) << ','
             << to_string(v.fd_class) << '\n';
        if (is_missing(v.weibull_scale)) {
            warnings.push_back("plot '" + id + "': Weibull fit failed, parameters set to NA");
        }
    }
    ensure_out(cfg);
    write_text_file(out_path(cfg, "variables.csv"), vars.str());
    write_text_file(out_path(cfg, "rejects.csv"), rejects.str());
}

// ---------------------------------------------------------------------------
// select / predict

namespace {

struct VariableTable {
    std::vector<std::string> plot_ids;  // sorted
    std::map<std::string, std::vector<double>> cont;  // per continuous response
    std::vector<int> dev_class;
};

VariableTable load_variables_csv(const std::string& path) {
    CsvReader csv(path);
    const auto id_col = csv.column("plot_id");
    std::vector<std::size_t> order(csv.n_rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return csv.cell(a, id_col) < csv.cell(b, id_col);
    });

    VariableTable t;
    for (const auto& spec : response_catalog()) {
        if (spec.kind == ResponseKind::continuous) {
            const auto col = csv.column(spec.name);
            auto& v = t.cont[spec.name];
            v.reserve(order.size());
            for (auto r : order) v.push_back(csv.num(r, col, /*allow_na=*/true));
        }
    }
    const auto dev_col = csv.column("dev_class");
    for (auto r : order) {
        t.plot_ids.push_back(csv.cell(r, id_col));
        try {
            t.dev_class.push_back(parse_dev_class(csv.cell(r, dev_col)));
        } catch (const IoError& e) {
            csv.fail(r, e.what());
        }
    }
    for (std::size_t i = 1; i < t.plot_ids.size(); ++i) {
        if (t.plot_ids[i] == t.plot_ids[i - 1]) {
            throw IoError(path + ": duplicate plot_id '" + t.plot_ids[i] + "'");
        }
    }
    return t;
}

void require_aligned_ids(const std::vector<std::string>& a, const std::vector<std::string>& b,
                         const std::string& a_name, const std::string& b_name) {
    std::vector<std::string> only_a, only_b;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
    std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
    if (only_a.empty() && only_b.empty()) return;
    std::ostringstream os;
    os << a_name << " and " << b_name << " do not align on plot_id;";
    auto list = [&](const std::vector<std::string>& v, const std::string& where) {
        if (v.empty()) return;
        os << " only in " << where << ":";
        for (std::size_t i = 0; i < v.size() && i < 10; ++i) os << ' ' << v[i];
        if (v.size() > 10) os << " (+" << v.size() - 10 << " more)";
        os << ';';
    };
    list(only_a, a_name);
    list(only_b, b_name);
    throw IoError(os.str());
}

std::set<std::string> load_id_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::set<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) ids.insert(line);
    }
    if (ids.empty()) throw IoError(path + ": no plot ids");
    return ids;
}

FeatureMatrix subset_rows(const FeatureMatrix& m, const std::vector<std::size_t>& rows) {
    FeatureMatrix out;
    out.cols = m.cols;
    out.plot_ids.reserve(rows.size());
    out.values.reserve(rows.size() * m.cols);
    for (auto r : rows) {
        out.plot_ids.push_back(m.plot_ids[r]);
        const auto row = m.row(r);
        out.values.insert(out.values.end(), row.begin(), row.end());
    }
    return out;
}

json standardizer_to_json(const Standardizer& s) {
    return json{{"mean", s.mean},
                {"sd", s.sd},
                {"usable", std::vector<int>(s.usable.begin(), s.usable.end())}};
}

Standardizer standardizer_from_json(const json& j) {
    Standardizer s;
    s.mean = j.at("mean").get<std::vector<double>>();
    s.sd = j.at("sd").get<std::vector<double>>();
    const auto u = j.at("usable").get<std::vector<int>>();
    s.usable.assign(u.begin(), u.end());
    return s;
}

void write_predictions_csv(const RunConfig& cfg, const std::string& response,
                           const std::vector<std::string>& ids,
                           const std::vector<std::string>& observed,
                           const std::vector<std::string>& predicted) {
    std::ostringstream os;
    os << "plot_id,observed,predicted\n";
    for (std::size_t i = 0; i < ids.size(); ++i) {
        os << ids[i] << ',' << observed[i] << ',' << predicted[i] << '\n';
    }
    write_text_file(out_path(cfg, "predictions_" + response + ".csv"), os.str());
}

std::pair<int, int> selection_counts(const std::vector<int>& selected_cols) {
    int spatial = 0;
    for (int c : selected_cols) {
        if (is_spatial_feature(static_cast<std::size_t>(c) + 1)) ++spatial;
    }
    return {spatial, static_cast<int>(selected_cols.size())};
}

const std::vector<int>& dev_class_labels() {
    static const std::vector<int> labels{kDevClassNA, 1, 2, 3, 4, 5, 6, 7};
    return labels;
}

std::vector<std::string> dev_class_label_names() {
    std::vector<std::string> names;
    for (int l : dev_class_labels()) names.push_back(dev_class_token(l));
    return names;
}

}  // namespace

void cmd_select(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.features.empty() || cfg.variables.empty()) {
        throw InvalidInput("select mode needs --features and --variables");
    }
    const FeatureMatrix all_features = load_features_csv(cfg.features);
    const VariableTable vars = load_variables_csv(cfg.variables);
    require_aligned_ids(all_features.plot_ids, vars.plot_ids, "features", "variables");

    std::set<std::string> train_ids;
    const bool partitioned = !cfg.train_plots.empty();
    if (partitioned) {
        train_ids = load_id_file(cfg.train_plots);
        for (const auto& id : train_ids) {
            if (!std::binary_search(all_features.plot_ids.begin(), all_features.plot_ids.end(),
                                    id)) {
                throw IoError("train plot '" + id + "' not present in the feature table");
            }
        }
    }

    json model_json;
    model_json["seed"] = cfg.seed;
    json metrics_json;
    metrics_json["seed"] = cfg.seed;

    ensure_out(cfg);
    for (std::size_t resp_idx = 0; resp_idx < response_catalog().size(); ++resp_idx) {
        const auto& spec = response_catalog()[resp_idx];
        if (cfg.response != "all" && cfg.response != spec.name) continue;

        // rows with an observed value for this response
        std::vector<std::size_t> usable_rows;
        for (std::size_t r = 0; r < all_features.rows(); ++r) {
            if (spec.kind == ResponseKind::continuous &&
                is_missing(vars.cont.at(spec.name)[r])) {
                warnings.push_back("response " + spec.name + ": plot '" +
                                   all_features.plot_ids[r] + "' has NA observation; excluded");
                continue;
            }
            usable_rows.push_back(r);
        }

        std::vector<std::size_t> train_rows, val_rows;
        for (auto r : usable_rows) {
            if (!partitioned || train_ids.count(all_features.plot_ids[r])) {
                train_rows.push_back(r);
            } else {
                val_rows.push_back(r);
            }
        }
        if (train_rows.size() < 2) {
            throw InsufficientData("response " + spec.name + ": fewer than 2 training plots");
        }

        const FeatureMatrix train_raw = subset_rows(all_features, train_rows);
        const Standardizer stand = Standardizer::fit(train_raw);
        const FeatureMatrix train = stand.transform(train_raw);

        Response response;
        response.kind = spec.kind;
        for (auto r : train_rows) {
            if (spec.kind == ResponseKind::continuous) {
                response.cont.push_back(vars.cont.at(spec.name)[r]);
            } else {
                response.cat.push_back(vars.dev_class[r]);
            }
        }

        GaConfig ga = cfg.ga;
        ga.seed = cfg.seed + 1000 * resp_idx;
        const GaResult result = run_ga(ga, train, response, stand.usable);
        const ChromosomeEval eval = evaluate_chromosome(result.best, train, response,
                                                        stand.usable, ga);

        std::vector<int> selected;
        std::vector<double> weights;
        chromosome_selection(result.best, stand.usable, selected, weights);
        const auto [n_spatial, n_total] = selection_counts(selected);

        // predictions: leave-one-out over training plots, then (optionally)
        // validation plots with training-only neighbors
        std::vector<std::string> ids, observed, predicted;
        for (std::size_t i = 0; i < train_rows.size(); ++i) {
            ids.push_back(all_features.plot_ids[train_rows[i]]);
            if (spec.kind == ResponseKind::continuous) {
                observed.push_back(format_value(response.cont[i]));
                predicted.push_back(format_value(eval.pred_cont[i]));
            } else {
                observed.push_back(dev_class_token(response.cat[i]));
                predicted.push_back(dev_class_token(eval.pred_cat[i]));
            }
        }

        KnnModel model;
        model.selected = selected;
        model.weights = weights;
        model.k = result.best.k;
        model.g = result.best.g();
        model.train = train;
        model.standardizer = stand;
        model.response = response;

        json resp_metrics;
        resp_metrics["kind"] =
            spec.kind == ResponseKind::continuous ? "continuous" : "categorical";
        resp_metrics["k"] = model.k;
        resp_metrics["g"] = model.g;
        resp_metrics["fitness"] = result.best_fitness;
        resp_metrics["n_spatial"] = n_spatial;
        resp_metrics["n_total"] = n_total;
        if (spec.kind == ResponseKind::continuous) {
            resp_metrics["train"] = {{"rmse", eval.cont.rmse},
                                     {"bias", eval.cont.bias},
                                     {"n", train_rows.size()}};
        } else {
            resp_metrics["train"] = {{"oa", eval.cat.oa},
                                     {"kappa", missing_to_json(eval.cat.kappa)},
                                     {"n", train_rows.size()}};
            const auto m = fixed_label_matrix(response.cat, eval.pred_cat, dev_class_labels());
            write_text_file(out_path(cfg, "errmatrix_dev_class.csv"),
                            error_matrix_csv(m, dev_class_label_names()));
        }

        if (!val_rows.empty()) {
            const FeatureMatrix val = stand.transform(subset_rows(all_features, val_rows));
            std::vector<double> val_pred_cont;
            std::vector<int> val_pred_cat;
            std::vector<double> val_obs_cont;
            std::vector<int> val_obs_cat;
            for (std::size_t i = 0; i < val_rows.size(); ++i) {
                ids.push_back(all_features.plot_ids[val_rows[i]]);
                if (spec.kind == ResponseKind::continuous) {
                    const double y = knn_predict_continuous(val.row(i), model);
                    const double obs = vars.cont.at(spec.name)[val_rows[i]];
                    val_pred_cont.push_back(y);
                    val_obs_cont.push_back(obs);
                    observed.push_back(format_value(obs));
                    predicted.push_back(format_value(y));
                } else {
                    const int y = knn_predict_categorical(val.row(i), model);
                    const int obs = vars.dev_class[val_rows[i]];
                    val_pred_cat.push_back(y);
                    val_obs_cat.push_back(obs);
                    observed.push_back(dev_class_token(obs));
                    predicted.push_back(dev_class_token(y));
                }
            }
            if (spec.kind == ResponseKind::continuous) {
                const auto vm = evaluate_continuous(val_pred_cont, val_obs_cont);
                resp_metrics["validation"] = {{"rmse", vm.rmse},
                                              {"bias", vm.bias},
                                              {"n", val_rows.size()}};
            } else {
                const auto vm = evaluate_categorical(val_pred_cat, val_obs_cat);
                resp_metrics["validation"] = {{"oa", vm.oa},
                                              {"kappa", missing_to_json(vm.kappa)},
                                              {"n", val_rows.size()}};
                const auto m = fixed_label_matrix(val_obs_cat, val_pred_cat, dev_class_labels());
                write_text_file(out_path(cfg, "errmatrix_dev_class_validation.csv"),
                                error_matrix_csv(m, dev_class_label_names()));
            }
        }

        write_predictions_csv(cfg, spec.name, ids, observed, predicted);
        metrics_json["responses"][spec.name] = resp_metrics;

        json jm;
        jm["kind"] = spec.kind == ResponseKind::continuous ? "continuous" : "categorical";
        jm["k"] = model.k;
        jm["g"] = model.g;
        json ids_1based = json::array();
        for (int c : selected) ids_1based.push_back(c + 1);
        jm["selected_ids"] = ids_1based;
        jm["weights"] = weights;
        jm["fitness"] = result.best_fitness;
        jm["trace"] = result.trace;
        jm["standardizer"] = standardizer_to_json(stand);
        jm["train_plot_ids"] = train.plot_ids;
        jm["train_values"] = train.values;
        if (spec.kind == ResponseKind::continuous) jm["response_cont"] = response.cont;
        else jm["response_cat"] = response.cat;
        model_json["responses"][spec.name] = jm;
    }

    write_text_file(out_path(cfg, "model.json"), model_json.dump(1) + "\n");
    write_text_file(out_path(cfg, "metrics.json"), metrics_json.dump(1) + "\n");
}

void cmd_predict(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.model.empty() || cfg.features.empty()) {
        throw InvalidInput("predict mode needs --model and --features");
    }
    std::ifstream in(cfg.model);
    if (!in) throw IoError("cannot open " + cfg.model);
    json model_json;
    try {
        in >> model_json;
    } catch (const json::exception& e) {
        throw IoError(cfg.model + ": " + e.what());
    }

    const FeatureMatrix queries_raw = load_features_csv(cfg.features);

    std::optional<VariableTable> observed_vars;
    if (!cfg.variables.empty()) {
        observed_vars = load_variables_csv(cfg.variables);
        require_aligned_ids(queries_raw.plot_ids, observed_vars->plot_ids, "features",
                            "variables");
    }

    ensure_out(cfg);
    for (const auto& spec : response_catalog()) {
        if (cfg.response != "all" && cfg.response != spec.name) continue;
        if (!model_json.at("responses").contains(spec.name)) {
            if (cfg.response == spec.name) {
                throw IoError("model has no response '" + spec.name + "'");
            }
            continue;
        }
        const json& jm = model_json["responses"][spec.name];

        KnnModel model;
        model.k = jm.at("k").get<int>();
        model.g = jm.at("g").get<double>();
        for (int id : jm.at("selected_ids").get<std::vector<int>>()) {
            model.selected.push_back(id - 1);
        }
        model.weights = jm.at("weights").get<std::vector<double>>();
        model.standardizer = standardizer_from_json(jm.at("standardizer"));
        model.train.plot_ids = jm.at("train_plot_ids").get<std::vector<std::string>>();
        model.train.cols = model.standardizer.mean.size();
        model.train.values = jm.at("train_values").get<std::vector<double>>();
        model.response.kind = spec.kind;
        if (spec.kind == ResponseKind::continuous) {
            model.response.cont = jm.at("response_cont").get<std::vector<double>>();
        } else {
            model.response.cat = jm.at("response_cat").get<std::vector<int>>();
        }
        model.validate();

        const FeatureMatrix queries = model.standardizer.transform(queries_raw);
        std::vector<std::string> ids, observed, predicted;
        for (std::size_t i = 0; i < queries.rows(); ++i) {
            // a query that is itself a reference plot must not be its own neighbor
            int exclude = -1;
            for (std::size_t t = 0; t < model.train.plot_ids.size(); ++t) {
                if (model.train.plot_ids[t] == queries.plot_ids[i]) {
                    exclude = static_cast<int>(t);
                    break;
                }
            }
            ids.push_back(queries.plot_ids[i]);
            if (spec.kind == ResponseKind::continuous) {
                predicted.push_back(
                    format_value(knn_predict_continuous(queries.row(i), model, exclude)));
                observed.push_back(
                    observed_vars
                        ? format_value(observed_vars->cont.at(spec.name)[i])
                        : "NA");
            } else {
                predicted.push_back(
                    dev_class_token(knn_predict_categorical(queries.row(i), model, exclude)));
                observed.push_back(observed_vars ? dev_class_token(observed_vars->dev_class[i])
                                                 : "NA");
            }
        }
        write_predictions_csv(cfg, spec.name, ids, observed, predicted);
    }
    if (!observed_vars && cfg.variables.empty()) {
        warnings.push_back("no --variables given; observed column written as NA");
    }
}

// ---------------------------------------------------------------------------
// classify

void cmd_classify(const RunConfig& cfg, std::vector<std::string>& warnings) {
    std::vector<std::string> responses;
    if (cfg.response == "all" || cfg.response.empty()) {
        responses = {"r_index", "fd"};
    } else if (cfg.response == "r_index" || cfg.response == "fd") {
        responses = {cfg.response};
    } else {
        throw InvalidInput("classify mode supports responses r_index and fd");
    }

    ensure_out(cfg);
    json metrics;
    for (const auto& resp : responses) {
        std::string file = cfg.predictions;
        if (file.empty()) file = out_path(cfg, "predictions_" + resp + ".csv");
        else if (fs::is_directory(file)) {
            file = (fs::path(file) / ("predictions_" + resp + ".csv")).string();
        } else if (responses.size() > 1) {
            throw InvalidInput("classify with response=all needs --predictions as a directory");
        }

        CsvReader csv(file);
        const auto oc = csv.column("observed");
        const auto pc = csv.column("predicted");
        std::vector<int> obs, pred;
        std::size_t skipped = 0;
        for (std::size_t r = 0; r < csv.n_rows(); ++r) {
            const double o = csv.num(r, oc, /*allow_na=*/true);
            const double p = csv.num(r, pc, /*allow_na=*/true);
            if (is_missing(o) || is_missing(p)) {
                ++skipped;
                continue;
            }
            const auto rule = resp == "r_index" ? classify_r : classify_fd;
            obs.push_back(structure_code(rule(o)));
            pred.push_back(structure_code(rule(p)));
        }
        if (skipped > 0) {
            warnings.push_back(resp + ": skipped " + std::to_string(skipped) +
                               " rows with NA values");
        }
        if (obs.empty()) throw InsufficientData(resp + ": no classified rows");

        const auto m = fixed_label_matrix(obs, pred, {0, 1, 2});
        write_text_file(out_path(cfg, "errmatrix_" + resp + ".csv"),
                        error_matrix_csv(m, structure_names()));
        const double kappa = m.kappa();
        if (is_missing(kappa)) {
            warnings.push_back(resp + ": kappa undefined (single-class table), reported as NA");
        }
        metrics["responses"][resp] = {{"oa", m.overall_accuracy()},
                                      {"kappa", missing_to_json(kappa)},
                                      {"n", obs.size()}};
    }
    write_text_file(out_path(cfg, "classify_metrics.json"), metrics.dump(1) + "\n");
}

// ---------------------------------------------------------------------------
// simulate

void cmd_simulate(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.sim_plots < 1) throw InvalidInput("simulate mode needs sim_plots >= 1");
    ensure_out(cfg);

    std::ostringstream plots, trees, clouds;
    plots << "plot_id,center_x,center_y,dev_class\n";
    trees << "plot_id,x,y,dbh\n";
    clouds << "x,y,height,intensity,return_index,plot_id\n";

    for (int i = 0; i < cfg.sim_plots; ++i) {
        char idbuf[16];
        std::snprintf(idbuf, sizeof idbuf, "P%04d", i + 1);
        const std::string id = idbuf;
        const Point center{100.0 * (i % 10), 100.0 * (i / 10)};

        StandSpec spec;
        spec.window = Window::disc(center, cfg.inner_radius);
        spec.height_mean = cfg.sim_height_mean;
        spec.height_sd = cfg.sim_height_sd;
        switch (i % 3) {
            case 0:
                spec.process = StandSpec::Process::matern2;
                spec.lambda = 3.0 * cfg.sim_lambda;
                spec.hardcore = cfg.sim_hardcore;
                break;
            case 1:
                spec.process = StandSpec::Process::poisson;
                spec.lambda = cfg.sim_lambda;
                break;
            case 2:
                spec.process = StandSpec::Process::thomas;
                spec.parent_lambda = cfg.sim_parent_lambda;
                spec.mean_offspring = cfg.sim_mu;
                spec.sigma = cfg.sim_sigma;
                break;
        }

        const std::uint64_t base = cfg.seed + 7919ULL * static_cast<std::uint64_t>(i);
        bool low_count = false;
        const PointPattern pattern = simulate_pattern(spec, base + 1, &low_count);
        if (low_count) warnings.push_back("plot '" + id + "': expected tree count below 2");
        const auto heights = mark_heights(pattern.size(), spec, base + 2);

        std::mt19937_64 dbh_rng(base + 3);
        std::normal_distribution<double> dbh_noise(0.0, 1.0);
        for (std::size_t t = 0; t < pattern.size(); ++t) {
            const double dbh = std::max(
                4.6, 1.5 * (heights[t] - 1.3) * (1.0 + 0.15 * dbh_noise(dbh_rng)));
            trees << id << ',' << format_value(pattern.points()[t].x) << ','
                  << format_value(pattern.points()[t].y) << ',' << format_value(dbh) << '\n';
        }

        double mean_h = 0.0;
        for (double h : heights) mean_h += h;
        if (!heights.empty()) mean_h /= static_cast<double>(heights.size());
        int dev = kDevClassNA;
        if (i % 17 != 0) {
            const double mean_dbh = 1.5 * std::max(0.0, mean_h - 1.3);
            dev = mean_dbh < 10.0 ? 4 : (mean_dbh < 20.0 ? 5 : 6);
        }
        plots << id << ',' << format_value(center.x) << ',' << format_value(center.y) << ','
              << dev_class_token(dev) << '\n';

        const PlotCloud cloud = simulate_cloud(id, pattern, heights, spec, cfg.pulse_density,
                                               base + 4, cfg.outer_radius, cfg.inner_radius);
        for (const auto& r : cloud.returns()) {
            clouds << format_value(r.x) << ',' << format_value(r.y) << ','
                   << format_value(r.height) << ',' << format_value(r.intensity) << ','
                   << to_string(r.return_class) << ',' << id << '\n';
        }
    }

    write_text_file(out_path(cfg, "plots.csv"), plots.str());
    write_text_file(out_path(cfg, "trees.csv"), trees.str());
    write_text_file(out_path(cfg, "clouds.csv"), clouds.str());
}

// ---------------------------------------------------------------------------
// evaluate

void cmd_evaluate(const RunConfig& cfg, std::vector<std::string>& warnings) {
    if (cfg.predictions.empty()) throw InvalidInput("evaluate mode needs --predictions");
    if (cfg.kind != "continuous" && cfg.kind != "categorical") {
        throw InvalidInput("evaluate mode needs --kind continuous|categorical");
    }
    CsvReader csv(cfg.predictions);
    const auto oc = csv.column("observed");
    const auto pc = csv.column("predicted");

    ensure_out(cfg);
    json metrics;
    if (cfg.kind == "continuous") {
        std::vector<double> obs, pred;
        std::size_t skipped = 0;
        for (std::size_t r = 0; r < csv.n_rows(); ++r) {
            const double o = csv.num(r, oc, true);
            const double p = csv.num(r, pc, true);
            if (is_missing(o) || is_missing(p)) {
                ++skipped;
                continue;
            }
            obs.push_back(o);
            pred.push_back(p);
        }
        if (skipped > 0) {
            warnings.push_back("skipped " + std::to_string(skipped) + " rows with NA values");
        }
        const auto m = evaluate_continuous(pred, obs);
        metrics = {{"kind", "continuous"}, {"rmse", m.rmse}, {"bias", m.bias}, {"n", obs.size()}};
    } else {
        std::vector<int> obs, pred;
        for (std::size_t r = 0; r < csv.n_rows(); ++r) {
            try {
                obs.push_back(parse_dev_class(csv.cell(r, oc)));
                pred.push_back(parse_dev_class(csv.cell(r, pc)));
            } catch (const IoError& e) {
                csv.fail(r, e.what());
            }
        }
        const auto m = evaluate_categorical(pred, obs);
        metrics = {{"kind", "categorical"},
                   {"oa", m.oa},
                   {"kappa", missing_to_json(m.kappa)},
                   {"n", obs.size()}};
        const auto fixed = fixed_label_matrix(obs, pred, dev_class_labels());
        write_text_file(out_path(cfg, "eval_errmatrix.csv"),
                        error_matrix_csv(fixed, dev_class_label_names()));
        if (is_missing(m.kappa)) {
            warnings.push_back("kappa undefined (single-class table), reported as NA");
        }
    }
    write_text_file(out_path(cfg, "eval_metrics.json"), metrics.dump(1) + "\n");
}

void run_mode(const RunConfig& cfg, std::vector<std::string>& warnings) {
    cfg.validate();
    set_threads(cfg);
    if (cfg.mode == "features") cmd_features(cfg, warnings);
    else if (cfg.mode == "variables") cmd_variables(cfg, warnings);
    else if (cfg.mode == "select") cmd_select(cfg, warnings);
    else if (cfg.mode == "predict") cmd_predict(cfg, warnings);
    else if (cfg.mode == "classify") cmd_classify(cfg, warnings);
    else if (cfg.mode == "simulate") cmd_simulate(cfg, warnings);
    else if (cfg.mode == "evaluate") cmd_evaluate(cfg, warnings);
}

}  // namespace forstruct
