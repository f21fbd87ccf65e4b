#pragma once

#include <array>
#include <string>

#include "forstruct/raster_spatial.hpp"
#include "forstruct/vertical_features.hpp"

namespace forstruct {

inline constexpr std::size_t kNumFeatures = 98;
inline constexpr std::size_t kFirstSpatialId = 63;  // 1-based catalog id

// Stable column names of the feature table, indexed by catalog id - 1.
const std::array<std::string, kNumFeatures>& feature_names();

inline bool is_spatial_feature(std::size_t catalog_id_1based) {
    return catalog_id_1based >= kFirstSpatialId;
}

// Full 98-slot feature vector in catalog order: vertical slots 1-62
// followed by spatial slots 63-98.
std::array<double, kNumFeatures> assemble_features(const VerticalFeatureSet& vertical,
                                                   const LayerFeatureSet& spatial);

}  // namespace forstruct
