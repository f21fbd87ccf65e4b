#pragma once

#include <string>
#include <vector>

#include "forstruct/point_pattern.hpp"

namespace forstruct {

struct TreeRecord {
    std::string plot_id;
    double x = 0.0;
    double y = 0.0;
    double dbh = 0.0;  // cm
};

inline constexpr double kMinDbh = 4.5;          // cm, tally-tree cut
inline constexpr std::size_t kMinPlotTrees = 10;  // plot inclusion filter

enum class StructureClass { regular, random_, clustered };

std::string to_string(StructureClass c);

struct WeibullFit {
    double scale = 0.0;  // cm
    double shape = 0.0;
};

// Development class: -1 = NA, otherwise 1..7.
inline constexpr int kDevClassNA = -1;

struct PlotVariables {
    std::string plot_id;
    double r_index = 0.0;
    double fd = 0.0;
    double weibull_scale = 0.0;  // kMissing when the fit failed
    double weibull_shape = 0.0;
    int dev_class = kDevClassNA;
    StructureClass r_class = StructureClass::random_;
    StructureClass fd_class = StructureClass::random_;
};

// Two-parameter Weibull maximum likelihood fit: the shape profile equation
// is solved by a safeguarded Newton iteration, then the scale follows in
// closed form. Requires >= 10 positive observations.
WeibullFit weibull_fit(const std::vector<double>& dbh);

// Cut-off classification of the spatial structure variables: R below 0.85
// is clustered, above 1.15 regular; FD below -15 clustered, above +15
// regular. Boundary values fall to random.
StructureClass classify_r(double r_index);
StructureClass classify_fd(double fd);

struct StructureClassPair {
    StructureClass by_r;
    StructureClass by_fd;
};

StructureClassPair structure_classify(double r_index, double fd);

// Assembles the plot-level response variables from a field tree list.
// r_t for the FD summary is fixed at 4.5 m.
PlotVariables plot_variables(const std::string& plot_id, const std::vector<TreeRecord>& trees,
                             const Window& window, int dev_class = kDevClassNA);

}  // namespace forstruct
