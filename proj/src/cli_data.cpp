#include "forstruct/cli_data.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "forstruct/csv.hpp"
#include "forstruct/feature_catalog.hpp"

namespace forstruct {

namespace fs = std::filesystem;

int parse_dev_class(const std::string& token) {
    if (token == "NA") return kDevClassNA;
    try {
        const int v = std::stoi(token);
        if (v >= 1 && v <= 7 && std::to_string(v) == token) return v;
    } catch (...) {
    }
    throw IoError("invalid development class '" + token + "' (expected NA or 1..7)");
}

std::string dev_class_token(int dev_class) {
    return dev_class == kDevClassNA ? "NA" : std::to_string(dev_class);
}

std::map<std::string, PlotMeta> load_plots_csv(const std::string& path) {
    CsvReader csv(path);
    const auto id_col = csv.column("plot_id");
    const auto x_col = csv.column("center_x");
    const auto y_col = csv.column("center_y");
    const bool has_dev = csv.has_column("dev_class");

    std::map<std::string, PlotMeta> plots;
    for (std::size_t r = 0; r < csv.n_rows(); ++r) {
        const std::string& id = csv.cell(r, id_col);
        if (plots.count(id)) csv.fail(r, "duplicate plot_id '" + id + "'");
        PlotMeta m;
        m.center = {csv.num(r, x_col), csv.num(r, y_col)};
        if (has_dev) {
            try {
                m.dev_class = parse_dev_class(csv.cell(r, csv.column("dev_class")));
            } catch (const IoError& e) {
                csv.fail(r, e.what());
            }
        }
        plots.emplace(id, m);
    }
    if (plots.empty()) throw IoError(path + ": no plots");
    return plots;
}

std::vector<PlotCloud> load_clouds(const std::string& path,
                                   const std::map<std::string, PlotMeta>& plots,
                                   double outer_radius, double inner_radius,
                                   std::vector<std::string>& warnings) {
    std::vector<std::string> files;
    if (fs::is_directory(path)) {
        for (const auto& entry : fs::directory_iterator(path)) {
            if (entry.path().extension() == ".csv") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) throw IoError(path + ": no .csv cloud files");
    } else {
        files.push_back(path);
    }

    std::map<std::string, std::vector<PulseReturn>> by_plot;
    std::map<std::string, std::size_t> dropped;
    for (const auto& file : files) {
        CsvReader csv(file);
        const auto xc = csv.column("x");
        const auto yc = csv.column("y");
        const auto hc = csv.column("height");
        const auto ic = csv.column("intensity");
        const auto rc = csv.column("return_index");
        const auto pc = csv.column("plot_id");
        for (std::size_t r = 0; r < csv.n_rows(); ++r) {
            const std::string& id = csv.cell(r, pc);
            const auto plot = plots.find(id);
            if (plot == plots.end()) {
                ++dropped["unknown plot '" + id + "'"];
                continue;
            }
            PulseReturn ret;
            ret.x = csv.num(r, xc);
            ret.y = csv.num(r, yc);
            ret.height = csv.num(r, hc);
            ret.intensity = csv.num(r, ic);
            if (ret.intensity < 0.0) csv.fail(r, "negative intensity");
            try {
                ret.return_class = return_class_from_string(csv.cell(r, rc));
            } catch (const InvalidInput& e) {
                csv.fail(r, e.what());
            }
            const double d2 = squared_distance({ret.x, ret.y}, plot->second.center);
            if (d2 > outer_radius * outer_radius) {
                ++dropped["returns outside the outer radius of plot '" + id + "'"];
                continue;
            }
            by_plot[id].push_back(ret);
        }
    }
    for (const auto& [what, n] : dropped) {
        warnings.push_back("skipped " + std::to_string(n) + " " + what);
    }

    std::vector<PlotCloud> clouds;
    for (const auto& [id, meta] : plots) {
        const auto it = by_plot.find(id);
        if (it == by_plot.end() || it->second.empty()) {
            warnings.push_back("plot '" + id + "' has no returns; skipped");
            continue;
        }
        clouds.emplace_back(id, it->second, meta.center, outer_radius, inner_radius);
    }
    return clouds;
}

std::map<std::string, std::vector<TreeRecord>> load_trees_csv(const std::string& path,
                                                              std::vector<std::string>& warnings) {
    CsvReader csv(path);
    const auto pc = csv.column("plot_id");
    const auto xc = csv.column("x");
    const auto yc = csv.column("y");
    const auto dc = csv.column("dbh");

    std::map<std::string, std::vector<TreeRecord>> trees;
    std::size_t under_cut = 0;
    for (std::size_t r = 0; r < csv.n_rows(); ++r) {
        TreeRecord t;
        t.plot_id = csv.cell(r, pc);
        t.x = csv.num(r, xc);
        t.y = csv.num(r, yc);
        t.dbh = csv.num(r, dc);
        if (!(t.dbh > 0.0)) csv.fail(r, "dbh must be positive");
        if (t.dbh < kMinDbh) {
            ++under_cut;
            continue;
        }
        trees[t.plot_id].push_back(t);
    }
    if (under_cut > 0) {
        warnings.push_back("dropped " + std::to_string(under_cut) + " trees under the " +
                           format_value(kMinDbh) + " cm tally cut");
    }
    return trees;
}

FeatureMatrix load_features_csv(const std::string& path) {
    CsvReader csv(path);
    const auto& names = feature_names();
    if (csv.header().size() != kNumFeatures + 1 || csv.header()[0] != "plot_id") {
        throw IoError(path + ": expected header plot_id plus the " +
                      std::to_string(kNumFeatures) + " catalog feature columns");
    }
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        if (csv.header()[i + 1] != names[i]) {
            throw IoError(path + ": feature column " + std::to_string(i + 1) + " is '" +
                          csv.header()[i + 1] + "', expected '" + names[i] + "'");
        }
    }

    std::vector<std::size_t> order(csv.n_rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return csv.cell(a, 0) < csv.cell(b, 0);
    });

    FeatureMatrix m;
    m.cols = kNumFeatures;
    m.values.reserve(csv.n_rows() * kNumFeatures);
    for (const auto r : order) {
        m.plot_ids.push_back(csv.cell(r, 0));
        for (std::size_t c = 0; c < kNumFeatures; ++c) {
            m.values.push_back(csv.num(r, c + 1, /*allow_na=*/true));
        }
    }
    for (std::size_t i = 1; i < m.plot_ids.size(); ++i) {
        if (m.plot_ids[i] == m.plot_ids[i - 1]) {
            throw IoError(path + ": duplicate plot_id '" + m.plot_ids[i] + "'");
        }
    }
    return m;
}

ErrorMatrix fixed_label_matrix(const std::vector<int>& observed, const std::vector<int>& predicted,
                               const std::vector<int>& labels) {
    if (observed.size() != predicted.size()) {
        throw InvalidInput("fixed_label_matrix: observed/predicted length mismatch");
    }
    std::vector<std::vector<std::int64_t>> counts(labels.size(),
                                                  std::vector<std::int64_t>(labels.size(), 0));
    auto index = [&](int cls) {
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == cls) return i;
        }
        throw InvalidInput("fixed_label_matrix: class code outside the label universe");
    };
    for (std::size_t i = 0; i < observed.size(); ++i) {
        ++counts[index(observed[i])][index(predicted[i])];
    }
    return ErrorMatrix::from_counts(labels, std::move(counts));
}

std::string error_matrix_csv(const ErrorMatrix& m, const std::vector<std::string>& label_names) {
    if (label_names.size() != m.labels.size()) {
        throw InvalidInput("error_matrix_csv: label name count mismatch");
    }
    std::ostringstream os;
    os << "observed\\predicted";
    for (const auto& n : label_names) os << ',' << n;
    os << ",Total\n";
    std::vector<std::int64_t> col_tot(m.labels.size(), 0);
    for (std::size_t i = 0; i < m.labels.size(); ++i) {
        os << label_names[i];
        std::int64_t row_tot = 0;
        for (std::size_t j = 0; j < m.labels.size(); ++j) {
            os << ',' << m.counts[i][j];
            row_tot += m.counts[i][j];
            col_tot[j] += m.counts[i][j];
        }
        os << ',' << row_tot << '\n';
    }
    os << "Total";
    for (auto t : col_tot) os << ',' << t;
    os << ',' << m.total() << '\n';
    return os.str();
}

}  // namespace forstruct
