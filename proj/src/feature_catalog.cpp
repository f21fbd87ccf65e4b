#include "forstruct/feature_catalog.hpp"

#include <cstdio>

namespace forstruct {

namespace {

std::array<std::string, kNumFeatures> build_names() {
    std::array<std::string, kNumFeatures> n;
    auto set = [&](std::size_t id, std::string name) { n[id - 1] = std::move(name); };

    set(1, "h_canopy");
    const char* stats[] = {"min", "max", "mean", "sd", "skew", "kurt", "range"};
    for (std::size_t i = 0; i < 7; ++i) {
        set(2 + i, std::string("first_h_") + stats[i]);
        set(9 + i, std::string("last_h_") + stats[i]);
    }
    set(16, "canopy_return_prop");
    char buf[48];
    for (std::size_t i = 0; i < kPercentLevels.size(); ++i) {
        const int p = static_cast<int>(kPercentLevels[i]);
        std::snprintf(buf, sizeof buf, "first_p%02d", p);
        set(17 + i, buf);
        std::snprintf(buf, sizeof buf, "last_p%02d", p);
        set(28 + i, buf);
        std::snprintf(buf, sizeof buf, "first_fol%02d", p);
        set(39 + i, buf);
        std::snprintf(buf, sizeof buf, "last_fol%02d", p);
        set(50 + i, buf);
    }
    set(61, "first_int_mean");
    set(62, "last_int_mean");

    const int levels[] = {80, 60, 40, 20};
    const char* groups[] = {"n_patches", "patch_size_mean", "patch_size_sd",
                            "same_neighbors", "euler", "d_i_theo", "d_kl_theo"};
    for (std::size_t g = 0; g < 7; ++g) {
        for (std::size_t i = 0; i < 4; ++i) {
            std::snprintf(buf, sizeof buf, "%s_q%02d", groups[g], levels[i]);
            set(63 + 4 * g + i, buf);
        }
    }
    const std::pair<int, int> pairs[] = {{80, 60}, {60, 40}, {40, 20}, {80, 40}};
    for (std::size_t i = 0; i < 4; ++i) {
        std::snprintf(buf, sizeof buf, "d_i_pair_q%02d_q%02d", pairs[i].first, pairs[i].second);
        set(91 + i, buf);
        std::snprintf(buf, sizeof buf, "d_kl_pair_q%02d_q%02d", pairs[i].first, pairs[i].second);
        set(95 + i, buf);
    }
    return n;
}

}  // namespace

const std::array<std::string, kNumFeatures>& feature_names() {
    static const std::array<std::string, kNumFeatures> names = build_names();
    return names;
}

std::array<double, kNumFeatures> assemble_features(const VerticalFeatureSet& vertical,
                                                   const LayerFeatureSet& spatial) {
    std::array<double, kNumFeatures> out{};
    for (std::size_t i = 0; i < 62; ++i) out[i] = vertical.slots[i];
    const auto s = spatial.to_slots();
    for (std::size_t i = 0; i < 36; ++i) out[62 + i] = s[i];
    return out;
}

}  // namespace forstruct
