#pragma once

#include <map>
#include <string>
#include <vector>

#include "forstruct/chm.hpp"
#include "forstruct/forest_variables.hpp"
#include "forstruct/prediction.hpp"

namespace forstruct {

// Plot-level metadata: the plot center anchors the observation window and
// the cloud footprint; the development class comes from field records.
struct PlotMeta {
    Point center;
    int dev_class = kDevClassNA;
};

// plots.csv: plot_id,center_x,center_y,dev_class (dev_class NA or 1..7).
std::map<std::string, PlotMeta> load_plots_csv(const std::string& path);

// Cloud CSV(s) with columns x,y,height,intensity,return_index,plot_id;
// path may be a single file or a directory of *.csv files. Returns clouds
// sorted by plot_id; plots without returns and returns outside the outer
// radius or with unknown plot ids are skipped with a warning.
std::vector<PlotCloud> load_clouds(const std::string& path,
                                   const std::map<std::string, PlotMeta>& plots,
                                   double outer_radius, double inner_radius,
                                   std::vector<std::string>& warnings);

// trees.csv: plot_id,x,y,dbh. Trees under the tally cut are dropped.
std::map<std::string, std::vector<TreeRecord>> load_trees_csv(const std::string& path,
                                                              std::vector<std::string>& warnings);

// features.csv produced by the features command: plot_id + the 98 catalog
// columns, NA for degenerate slots. Rows come back sorted by plot_id.
FeatureMatrix load_features_csv(const std::string& path);

// "NA" or an integer class 1..7.
int parse_dev_class(const std::string& token);
std::string dev_class_token(int dev_class);

// Error matrix with a fixed label universe (rows observed, columns
// predicted), so published layouts keep empty classes.
ErrorMatrix fixed_label_matrix(const std::vector<int>& observed, const std::vector<int>& predicted,
                               const std::vector<int>& labels);

// Table-style CSV rendering with row/column margins.
std::string error_matrix_csv(const ErrorMatrix& m, const std::vector<std::string>& label_names);

}  // namespace forstruct
