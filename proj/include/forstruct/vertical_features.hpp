#pragma once

#include <array>

#include "forstruct/chm.hpp"

namespace forstruct {

// The 62 vertical feature slots (catalog ids 1-62), computed from the
// returns inside the inner circle:
//   1      canopy height (max height over all returns)
//   2-8    min/max/mean/sd/skewness/kurtosis/range of first-return heights
//   9-15   the same for last returns
//   16     proportion of canopy returns among all pulse returns
//   17-27  height percentiles 5,10,20,...,90,95 of first returns
//   28-38  the same for last returns
//   39-49  cumulative foliage-return proportions of first returns at
//          relative heights 5,10,20,...,90,95 % of the class height range
//   50-60  the same for last returns
//   61-62  mean intensity of first / last returns
// Degenerate moments (constant samples, too few returns) hold kMissing.
struct VerticalFeatureSet {
    std::array<double, 62> slots{};

    double operator[](std::size_t catalog_id_1based) const { return slots[catalog_id_1based - 1]; }
};

inline constexpr std::array<double, 11> kPercentLevels{5, 10, 20, 30, 40, 50,
                                                       60, 70, 80, 90, 95};

VerticalFeatureSet compute_vertical(const PlotCloud& cloud);

}  // namespace forstruct
