#pragma once

#include <cstdint>
#include <vector>

#include "forstruct/window.hpp"

namespace forstruct::kernels {

// Distance from every query location to its nearest pattern point.
// OpenMP-parallel over queries when built with OpenMP.
std::vector<double> nearest_point_distances(const std::vector<Point>& queries,
                                            const std::vector<Point>& points);

// Exact squared Euclidean distance transform on a binary grid, in pixel
// units. feature[row * cols + col] marks source pixels; the result holds,
// for every pixel, the squared distance from its center to the nearest
// feature pixel center (kNoFeature where the grid has no features).
// Two-phase lower-envelope scan, OpenMP-parallel over columns then rows.
inline constexpr std::int64_t kNoFeature = -1;
std::vector<std::int64_t> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                                     int rows, int cols);

// Weighted leave-one-out style squared feature-space distances from one
// row of a standardized row-major matrix to every other row, over the
// selected columns. weights_sq holds the squared column weights.
void weighted_row_distances_sq(const std::vector<double>& data, std::size_t cols,
                               std::size_t query_row, const std::vector<int>& selected,
                               const std::vector<double>& weights_sq,
                               std::vector<double>& out_sq);

}  // namespace forstruct::kernels

// Serial reference implementations kept for correctness testing and as the
// baseline of the kernel benchmark. They must agree with the parallel
// kernels bit for bit.
namespace forstruct::serial {

std::vector<double> nearest_point_distances(const std::vector<Point>& queries,
                                            const std::vector<Point>& points);

std::vector<std::int64_t> squared_distance_transform(const std::vector<std::uint8_t>& feature,
                                                     int rows, int cols);

}  // namespace forstruct::serial
