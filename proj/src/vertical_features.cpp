#include "forstruct/vertical_features.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "forstruct/common.hpp"

namespace forstruct {

namespace {

struct Moments {
    double min = 0, max = 0, mean = 0, sd = 0, skewness = 0, kurtosis = 0, range = 0;
};

// Sample sd, adjusted Fisher-Pearson skewness, excess kurtosis. Constant
// samples (and samples too small for the adjustment) flag the shape
// moments as missing.
Moments moments_of(const std::vector<double>& x) {
    Moments m;
    const double n = static_cast<double>(x.size());
    m.min = *std::min_element(x.begin(), x.end());
    m.max = *std::max_element(x.begin(), x.end());
    m.range = m.max - m.min;
    double sum = 0.0;
    for (double v : x) sum += v;
    m.mean = sum / n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m.sd = std::sqrt(m2 / (n - 1.0));
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0 && x.size() >= 3) {
        const double g1 = m3 / std::pow(m2, 1.5);
        m.skewness = g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
    } else {
        m.skewness = kMissing;
    }
    if (m2 > 0.0 && x.size() >= 4) {
        const double s2 = m2 * n / (n - 1.0);
        const double num = n * (n + 1.0) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
        m.kurtosis = num * (m4 * n) / (s2 * s2) -
                     3.0 * (n - 1.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
    } else {
        m.kurtosis = kMissing;
    }
    return m;
}

// Linear interpolation of order statistics (the common type-7 rule).
double percentile(const std::vector<double>& sorted, double pct) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * pct / 100.0;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Cumulative fraction of returns at or below each relative-height bin
// boundary of the class height range.
std::array<double, 11> foliage_proportions(const std::vector<double>& sorted) {
    std::array<double, 11> out{};
    const double lo = sorted.front();
    const double range = sorted.back() - lo;
    for (std::size_t i = 0; i < kPercentLevels.size(); ++i) {
        const double cut = lo + range * kPercentLevels[i] / 100.0;
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), cut);
        out[i] = static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    }
    return out;
}

}  // namespace

VerticalFeatureSet compute_vertical(const PlotCloud& cloud) {
    std::vector<double> first_h, last_h;
    double first_int = 0.0, last_int = 0.0;
    std::size_t n_all = 0, n_canopy = 0;
    double h_canopy = 0.0;
    for (const auto& r : cloud.returns()) {
        if (!cloud.within_inner(r)) continue;
        ++n_all;
        if (r.height >= PlotCloud::kGroundCut) ++n_canopy;
        h_canopy = std::max(h_canopy, r.height);
        if (r.return_class == ReturnClass::first) {
            first_h.push_back(r.height);
            first_int += r.intensity;
        } else if (r.return_class == ReturnClass::last) {
            last_h.push_back(r.height);
            last_int += r.intensity;
        }
    }
    if (first_h.size() < 2) {
        throw InsufficientData("compute_vertical: plot " + cloud.plot_id() +
                               " has fewer than 2 first returns inside the inner circle");
    }
    if (last_h.size() < 2) {
        throw InsufficientData("compute_vertical: plot " + cloud.plot_id() +
                               " has fewer than 2 last returns inside the inner circle");
    }

    VerticalFeatureSet f;
    auto& s = f.slots;
    s[0] = h_canopy;

    const Moments mf = moments_of(first_h);
    s[1] = mf.min; s[2] = mf.max; s[3] = mf.mean; s[4] = mf.sd;
    s[5] = mf.skewness; s[6] = mf.kurtosis; s[7] = mf.range;

    const Moments ml = moments_of(last_h);
    s[8] = ml.min; s[9] = ml.max; s[10] = ml.mean; s[11] = ml.sd;
    s[12] = ml.skewness; s[13] = ml.kurtosis; s[14] = ml.range;

    s[15] = static_cast<double>(n_canopy) / static_cast<double>(n_all);

    std::sort(first_h.begin(), first_h.end());
    std::sort(last_h.begin(), last_h.end());
    for (std::size_t i = 0; i < kPercentLevels.size(); ++i) {
        s[16 + i] = percentile(first_h, kPercentLevels[i]);
        s[27 + i] = percentile(last_h, kPercentLevels[i]);
    }
    const auto fol_first = foliage_proportions(first_h);
    const auto fol_last = foliage_proportions(last_h);
    for (std::size_t i = 0; i < 11; ++i) {
        s[38 + i] = fol_first[i];
        s[49 + i] = fol_last[i];
    }

    s[60] = first_int / static_cast<double>(first_h.size());
    s[61] = last_int / static_cast<double>(last_h.size());
    return f;
}

}  // namespace forstruct
