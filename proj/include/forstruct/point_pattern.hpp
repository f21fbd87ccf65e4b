#pragma once

#include <vector>

#include "forstruct/curves.hpp"
#include "forstruct/window.hpp"

namespace forstruct {

// A finite planar point pattern observed in a window. Construction
// validates that every point lies inside the window and rejects duplicate
// coordinates: tree stems cannot coincide, so duplicates signal upstream
// data errors.
class PointPattern {
public:
    PointPattern(std::vector<Point> points, Window window);

    const std::vector<Point>& points() const { return points_; }
    const Window& window() const { return window_; }
    std::size_t size() const { return points_.size(); }

    // Estimated intensity n / |W|, trees per square meter.
    double intensity() const;

private:
    std::vector<Point> points_;
    Window window_;
};

// Euclidean distance from each point to its nearest other point.
std::vector<double> nn_distances(const PointPattern& p);

// Clark-Evans aggregation index R = 2 / sqrt(n |W|) * sum_i ||x_i - nn(x_i)||.
// R ~ 1 for CSR, > 1 for regular and < 1 for clustered patterns.
double aggregation_index(const PointPattern& p);

// Kaplan-Meier corrected empty-space function estimate on [0, r_max].
// Query locations form a square lattice with the given spacing (which is
// also the estimator's bin width); distances to the window boundary act
// as censoring times. The result is a valid sub-CDF.
CurveOnGrid f_function_km(const PointPattern& p, double r_max, double grid_step);

// KL-type divergence of the estimated empty-space function from its CSR
// reference at intensity n / |W|. Positive values indicate regularity,
// negative clustering; ~0 under CSR.
double fd_summary(const PointPattern& p, double r_t, double grid_step = 0.1);

}  // namespace forstruct
