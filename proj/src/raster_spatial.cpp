#include "forstruct/raster_spatial.hpp"

#include <algorithm>
#include <cmath>

#include "forstruct/common.hpp"
#include "forstruct/kernels.hpp"

namespace forstruct {

namespace {

bool in_phase(const ThresholdedChm& t, std::size_t i, Phase phase) {
    if (!t.mask[i]) return false;
    return phase == Phase::canopy ? t.bits[i] != 0 : t.bits[i] == 0;
}

}  // namespace

LabeledComponents connected_components(const ThresholdedChm& t, Phase phase, Connectivity conn) {
    if (t.rows <= 0 || t.cols <= 0) throw InvalidInput("connected_components: empty raster");

    LabeledComponents out;
    out.rows = t.rows;
    out.cols = t.cols;
    out.labels.assign(t.bits.size(), 0);

    static constexpr int dr8[] = {-1, -1, -1, 0, 0, 1, 1, 1};
    static constexpr int dc8[] = {-1, 0, 1, -1, 1, -1, 0, 1};
    static constexpr int dr4[] = {-1, 0, 0, 1};
    static constexpr int dc4[] = {0, -1, 1, 0};
    const int n_dirs = conn == Connectivity::four ? 4 : 8;
    const int* drs = conn == Connectivity::four ? dr4 : dr8;
    const int* dcs = conn == Connectivity::four ? dc4 : dc8;

    std::vector<std::pair<int, int>> stack;
    std::vector<std::pair<int, int>> members;
    for (int r = 0; r < t.rows; ++r) {
        for (int c = 0; c < t.cols; ++c) {
            const std::size_t i = t.idx(r, c);
            if (out.labels[i] != 0 || !in_phase(t, i, phase)) continue;
            ++out.count;
            stack.assign(1, {r, c});
            members.clear();
            out.labels[i] = out.count;
            while (!stack.empty()) {
                const auto [cr, cc] = stack.back();
                stack.pop_back();
                members.emplace_back(cr, cc);
                for (int k = 0; k < n_dirs; ++k) {
                    const int nr = cr + drs[k];
                    const int nc = cc + dcs[k];
                    if (nr < 0 || nr >= t.rows || nc < 0 || nc >= t.cols) continue;
                    const std::size_t ni = t.idx(nr, nc);
                    if (out.labels[ni] == 0 && in_phase(t, ni, phase)) {
                        out.labels[ni] = out.count;
                        stack.emplace_back(nr, nc);
                    }
                }
            }
            out.sizes.push_back(static_cast<std::int64_t>(members.size()));
            std::int64_t best = 0;
            for (std::size_t a = 0; a < members.size(); ++a) {
                for (std::size_t b = a + 1; b < members.size(); ++b) {
                    const std::int64_t di = members[a].first - members[b].first;
                    const std::int64_t dj = members[a].second - members[b].second;
                    best = std::max(best, di * di + dj * dj);
                }
            }
            out.diameters.push_back(std::sqrt(static_cast<double>(best)) * t.pixel_size);
        }
    }
    return out;
}

PatchStats patch_stats(const LabeledComponents& c) {
    PatchStats s;
    s.count = static_cast<double>(c.count);
    if (c.count == 0) return s;
    double sum = 0.0;
    for (auto sz : c.sizes) sum += static_cast<double>(sz);
    s.mean_size_px = sum / static_cast<double>(c.count);
    double ss = 0.0;
    for (auto sz : c.sizes) {
        const double d = static_cast<double>(sz) - s.mean_size_px;
        ss += d * d;
    }
    s.sd_size_px = std::sqrt(ss / static_cast<double>(c.count));
    return s;
}

double mean_same_neighbors(const ThresholdedChm& t) {
    static constexpr int dr4[] = {-1, 0, 0, 1};
    static constexpr int dc4[] = {0, -1, 1, 0};
    std::int64_t total = 0;
    std::int64_t n_pixels = 0;
    for (int r = 0; r < t.rows; ++r) {
        for (int c = 0; c < t.cols; ++c) {
            const std::size_t i = t.idx(r, c);
            if (!t.mask[i]) continue;
            ++n_pixels;
            for (int k = 0; k < 4; ++k) {
                const int nr = r + dr4[k];
                const int nc = c + dc4[k];
                if (nr < 0 || nr >= t.rows || nc < 0 || nc >= t.cols) continue;
                const std::size_t ni = t.idx(nr, nc);
                if (t.mask[ni] && t.bits[ni] == t.bits[i]) ++total;
            }
        }
    }
    if (n_pixels == 0) throw InsufficientData("mean_same_neighbors: no masked pixels");
    return static_cast<double>(total) / static_cast<double>(n_pixels);
}

int euler_number(const ThresholdedChm& t, Connectivity conn) {
    const auto canopy = connected_components(t, Phase::canopy, conn);
    const auto gaps = connected_components(t, Phase::gap, conn);
    return canopy.count - gaps.count;
}

std::optional<CurveOnGrid> raster_f_function(const ThresholdedChm& t, double r_t) {
    std::vector<std::uint8_t> feature(t.bits.size(), 0);
    std::size_t n_canopy = 0;
    std::size_t n_gap = 0;
    for (std::size_t i = 0; i < t.bits.size(); ++i) {
        if (!t.mask[i]) continue;
        if (t.bits[i]) {
            feature[i] = 1;
            ++n_canopy;
        } else {
            ++n_gap;
        }
    }
    if (n_canopy == 0 || n_gap == 0) return std::nullopt;

    const auto d2 = kernels::squared_distance_transform(feature, t.rows, t.cols);

    std::vector<std::int64_t> gap_d2;
    gap_d2.reserve(n_gap);
    for (std::size_t i = 0; i < t.bits.size(); ++i) {
        if (t.mask[i] && !t.bits[i]) gap_d2.push_back(d2[i]);
    }
    std::sort(gap_d2.begin(), gap_d2.end());

    const std::vector<double> grid = uniform_grid(r_t, t.pixel_size);
    std::vector<double> values(grid.size(), 0.0);
    for (std::size_t j = 1; j < grid.size(); ++j) {
        // grid[j] = j * pixel_size, so d <= grid[j] iff d2 <= j^2 pixel^2
        const std::int64_t cut = static_cast<std::int64_t>(j) * static_cast<std::int64_t>(j);
        const auto it = std::upper_bound(gap_d2.begin(), gap_d2.end(), cut);
        values[j] = static_cast<double>(it - gap_d2.begin()) / static_cast<double>(n_gap);
    }
    return CurveOnGrid(grid, std::move(values));
}

CurveOnGrid boolean_f_theo(const BooleanModelParams& params, const std::vector<double>& r_grid) {
    if (params.area_fraction < 0.0 || params.area_fraction >= 1.0) {
        throw InvalidInput("boolean_f_theo: area fraction must be in [0, 1)");
    }
    std::vector<double> v(r_grid.size());
    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const double r = r_grid[i];
        v[i] = 1.0 - std::exp(-params.implied_lambda * M_PI * r * (2.0 * params.mean_radius + r));
    }
    return CurveOnGrid(r_grid, std::move(v));
}

std::optional<BooleanModelParams> estimate_boolean_params(const LabeledComponents& canopy,
                                                          const ThresholdedChm& t,
                                                          RadiusRule rule) {
    if (canopy.count == 0) return std::nullopt;

    const std::size_t masked = t.masked_count();
    std::int64_t canopy_px = 0;
    for (auto sz : canopy.sizes) canopy_px += sz;

    BooleanModelParams p;
    p.area_fraction = static_cast<double>(canopy_px) / static_cast<double>(masked);

    const double scale = rule == RadiusRule::half_diameter ? 0.5 : 1.0;
    double sum_r = 0.0;
    double sum_r2 = 0.0;
    for (auto d : canopy.diameters) {
        const double radius = scale * d;
        sum_r += radius;
        sum_r2 += radius * radius;
    }
    p.mean_radius = sum_r / static_cast<double>(canopy.count);
    p.mean_radius_sq = sum_r2 / static_cast<double>(canopy.count);

    if (p.area_fraction >= 1.0) {
        // all-canopy layer: no empty space, no reference model
        return std::nullopt;
    }
    if (p.mean_radius_sq > 0.0) {
        p.implied_lambda = -std::log(1.0 - p.area_fraction) / (M_PI * p.mean_radius_sq);
    } else {
        // every patch is a single pixel: CSR limit with lambda = count/area
        const double masked_area = static_cast<double>(masked) * t.pixel_size * t.pixel_size;
        p.implied_lambda = static_cast<double>(canopy.count) / masked_area;
    }
    return p;
}

std::array<double, 36> LayerFeatureSet::to_slots() const {
    std::array<double, 36> s{};
    for (std::size_t i = 0; i < 4; ++i) {
        s[0 + i] = levels[i].n_patches;
        s[4 + i] = levels[i].mean_patch_size;
        s[8 + i] = levels[i].sd_patch_size;
        s[12 + i] = levels[i].mean_same_neighbors;
        s[16 + i] = levels[i].euler;
        s[20 + i] = levels[i].d_i_vs_theo;
        s[24 + i] = levels[i].d_kl_vs_theo;
    }
    for (std::size_t i = 0; i < 4; ++i) {
        if (!(pairs[i].level_high > pairs[i].level_low)) {
            throw std::logic_error("LayerFeatureSet: pair must order the higher level first");
        }
        s[28 + i] = pairs[i].d_i;
        s[32 + i] = pairs[i].d_kl;
    }
    return s;
}

LayerFeatureSet layer_features(const Chm& chm, double r_t, Connectivity conn, RadiusRule rule) {
    if (!(chm.hmax() > 0.0)) throw DegenerateCanopy("layer_features: degenerate canopy (hmax = 0)");

    LayerFeatureSet out;
    std::array<std::optional<CurveOnGrid>, 4> curves;

    for (std::size_t i = 0; i < LayerFeatureSet::kLevels.size(); ++i) {
        const double q = LayerFeatureSet::kLevels[i];
        const ThresholdedChm t = threshold_chm(chm, q);
        const auto canopy = connected_components(t, Phase::canopy, conn);
        const auto stats = patch_stats(canopy);

        LevelFeatures f;
        f.level_q = q;
        f.n_patches = stats.count;
        f.mean_patch_size = stats.mean_size_px;
        f.sd_patch_size = stats.sd_size_px;
        f.mean_same_neighbors = mean_same_neighbors(t);
        f.euler = static_cast<double>(canopy.count -
                                      connected_components(t, Phase::gap, conn).count);

        curves[i] = raster_f_function(t, r_t);
        f.d_i_vs_theo = kMissing;
        f.d_kl_vs_theo = kMissing;
        if (curves[i]) {
            const auto params = estimate_boolean_params(canopy, t, rule);
            if (params) {
                const CurveOnGrid theo = boolean_f_theo(*params, curves[i]->r);
                f.d_i_vs_theo = d_integrated(*curves[i], theo, r_t);
                try {
                    f.d_kl_vs_theo = d_kl(*curves[i], theo, r_t);
                } catch (const DivergenceError&) {
                    f.d_kl_vs_theo = kMissing;
                }
            }
        }
        out.levels[i] = f;
    }

    const auto level_index = [](double q) -> std::size_t {
        for (std::size_t i = 0; i < LayerFeatureSet::kLevels.size(); ++i) {
            if (LayerFeatureSet::kLevels[i] == q) return i;
        }
        throw std::logic_error("layer_features: unknown level");
    };

    for (std::size_t i = 0; i < LayerFeatureSet::kPairs.size(); ++i) {
        const auto [hi, lo] = LayerFeatureSet::kPairs[i];
        PairFeatures pf;
        pf.level_high = hi;
        pf.level_low = lo;
        pf.d_i = kMissing;
        pf.d_kl = kMissing;
        const auto& fh = curves[level_index(hi)];
        const auto& fl = curves[level_index(lo)];
        if (fh && fl) {
            pf.d_i = d_integrated(*fh, *fl, r_t);
            try {
                pf.d_kl = d_kl(*fh, *fl, r_t);
            } catch (const DivergenceError&) {
                pf.d_kl = kMissing;
            }
        }
        out.pairs[i] = pf;
    }
    return out;
}

}  // namespace forstruct
