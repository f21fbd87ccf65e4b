#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "forstruct/chm.hpp"
#include "forstruct/curves.hpp"

namespace forstruct {

enum class Phase { canopy, gap };
enum class Connectivity { four = 4, eight = 8 };

// Labeling of one phase of a thresholded CHM. Label 0 marks the other
// phase and unmasked pixels; components are numbered 1..count.
struct LabeledComponents {
    std::vector<std::int32_t> labels;
    int rows = 0;
    int cols = 0;
    std::int32_t count = 0;
    std::vector<std::int64_t> sizes;  // pixels, indexed by label - 1
    std::vector<double> diameters;    // m, max pairwise pixel-center distance
};

struct PatchStats {
    double count = 0.0;
    double mean_size_px = 0.0;
    double sd_size_px = 0.0;  // population standard deviation
};

// Boolean-model reference parameters estimated from canopy patches.
struct BooleanModelParams {
    double area_fraction = 0.0;   // p in [0, 1)
    double mean_radius = 0.0;     // E[R], m
    double mean_radius_sq = 0.0;  // E[R^2], m^2
    double implied_lambda = 0.0;  // disc centers per m^2
};

// Whether the Boolean-model radius is half the patch diameter (default) or
// the full diameter.
enum class RadiusRule { half_diameter, full_diameter };

LabeledComponents connected_components(const ThresholdedChm& t, Phase phase,
                                       Connectivity conn = Connectivity::four);

PatchStats patch_stats(const LabeledComponents& c);

// Average count of masked-in 4-neighbors sharing the focal pixel's type,
// over all masked-in pixels. In [0, 4].
double mean_same_neighbors(const ThresholdedChm& t);

// Number of canopy patches minus number of gaps.
int euler_number(const ThresholdedChm& t, Connectivity conn = Connectivity::four);

// Empirical CDF of the exact Euclidean distance from every masked gap
// pixel center to the nearest masked canopy pixel center, on a grid of
// step pixel_size up to r_t. nullopt when either phase is empty.
std::optional<CurveOnGrid> raster_f_function(const ThresholdedChm& t, double r_t);

// Eq.-style Boolean reference: F(r) = 1 - exp(-lambda pi r (2 E[R] + r)).
CurveOnGrid boolean_f_theo(const BooleanModelParams& params, const std::vector<double>& r_grid);

// p = canopy fraction of the masked area; radii from component diameters.
// When every patch is point-like the implied intensity falls back to
// patch count / masked area (the E[R] -> 0 limit). nullopt without canopy.
std::optional<BooleanModelParams> estimate_boolean_params(
    const LabeledComponents& canopy, const ThresholdedChm& t,
    RadiusRule rule = RadiusRule::half_diameter);

struct LevelFeatures {
    double level_q = 0.0;
    double n_patches = 0.0;
    double mean_patch_size = 0.0;
    double sd_patch_size = 0.0;
    double mean_same_neighbors = 0.0;
    double euler = 0.0;
    double d_i_vs_theo = 0.0;   // kMissing on degenerate layers
    double d_kl_vs_theo = 0.0;  // kMissing on degenerate layers
};

struct PairFeatures {
    double level_high = 0.0;
    double level_low = 0.0;
    double d_i = 0.0;   // kMissing when either layer is degenerate
    double d_kl = 0.0;  // kMissing when either layer is degenerate
};

// The 36 spatial feature slots (catalog ids 63-98): per-level summaries at
// q = 0.8, 0.6, 0.4, 0.2 plus the F-function comparisons of the level
// pairs (0.8,0.6), (0.6,0.4), (0.4,0.2), (0.8,0.4), higher level first.
struct LayerFeatureSet {
    std::array<LevelFeatures, 4> levels;
    std::array<PairFeatures, 4> pairs;

    static constexpr std::array<double, 4> kLevels{0.8, 0.6, 0.4, 0.2};
    static constexpr std::array<std::pair<double, double>, 4> kPairs{
        {{0.8, 0.6}, {0.6, 0.4}, {0.4, 0.2}, {0.8, 0.4}}};

    // Values in catalog slot order 63..98; degenerate slots are kMissing.
    std::array<double, 36> to_slots() const;
};

LayerFeatureSet layer_features(const Chm& chm, double r_t,
                               Connectivity conn = Connectivity::four,
                               RadiusRule rule = RadiusRule::half_diameter);

}  // namespace forstruct
